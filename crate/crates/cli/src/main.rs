//! `estcomm`: run protocols, fit scaling sweeps and print spectral
//! diagnostics.

mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use estcomm::diag::{
    brute_force_discrepancy, lambda_bound_check, path_distance_inverse_check, svd_summary,
};
use estcomm::generic::DebiasPlan;
use estcomm::harness::{
    export_csv, family_from_name, fit_scaling, run_experiment, summarize, ExperimentSpec, InstanceKind, ProtocolId,
    TrialRecord, WILSON_Z_99,
};
use estcomm::{build_family, AccessMode, Error, FamilySpec, ProbVec, ProtocolConfig};

#[derive(Parser, Debug)]
#[command(name = "estcomm", version, about = "Two-party expectation estimation with exact bit accounting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run trials at one or more epsilons and report failure rates.
    Run(Flags),
    /// Run trials over at least three epsilons and fit bits against 1/eps.
    Sweep(Flags),
    /// Spectral and discrepancy diagnostics.
    Diag {
        target: DiagTarget,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiagTarget {
    Svd,
    Lambda,
    DistanceInverse,
    Discrepancy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Access {
    Full,
    Sample,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// sampling, debias, svd, spectral, hybrid, eq, sparse, gt, abs, convex, smooth, toeplitz, power_law
    #[arg(long)]
    protocol: Option<String>,
    /// eq, identity, gt, ip, abs, smooth, toeplitz, hadamard, distance, double_index, random_boolean
    #[arg(long)]
    family: Option<String>,
    /// Input bits; the domain has 2^n elements unless --k is given.
    #[arg(long)]
    n: Option<u32>,
    /// Domain size.
    #[arg(long)]
    k: Option<usize>,
    /// Target additive error (repeatable, or comma separated).
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    access: Option<Access>,
    /// point-mass, uniform, random-sparse, random-dense, adversarial-atom
    #[arg(long)]
    instances: Option<String>,
    /// Truncation rank for svd (default: full rank).
    #[arg(long)]
    rank: Option<usize>,
    /// Exactly sent directions for hybrid.
    #[arg(long)]
    t: Option<usize>,
    /// Derivative order for smooth.
    #[arg(long)]
    order: Option<usize>,
    /// Bit exponent of the power_law stub.
    #[arg(long)]
    exponent: Option<f64>,
    /// Bit scale of the power_law stub.
    #[arg(long)]
    scale: Option<f64>,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::SvdUnavailable(_) | Error::LambdaFloorViolated { .. } => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Flags merged with the optional config file.
struct Settings {
    flags: Flags,
    file: BTreeMap<String, String>,
}

impl Settings {
    fn new(flags: Flags) -> CliResult<Self> {
        let file = match &flags.config {
            Some(p) => config::load(p).map_err(usage)?,
            None => BTreeMap::new(),
        };
        Ok(Self { flags, file })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key `{key}`: cannot parse `{v}`"))),
            None => Ok(None),
        }
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }

    fn epsilons(&self) -> CliResult<Vec<f64>> {
        if !self.flags.epsilon.is_empty() {
            return Ok(self.flags.epsilon.clone());
        }
        match self.file.get("epsilon") {
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| usage(format!("config key `epsilon`: cannot parse `{s}`"))))
                .collect(),
            None => Ok(vec![0.1]),
        }
    }

    fn protocol(&self) -> CliResult<ProtocolId> {
        let name = self.string(&self.flags.protocol, "protocol").unwrap_or_else(|| "eq".into());
        let mut p: ProtocolId = name.parse()?;
        match &mut p {
            ProtocolId::Svd { rank } => *rank = self.pick(self.flags.rank, "rank")?,
            ProtocolId::Hybrid { t } => *t = self.pick(self.flags.t, "t")?.unwrap_or(*t),
            ProtocolId::Smooth { k } => *k = self.pick(self.flags.order, "order")?.unwrap_or(*k),
            ProtocolId::PowerLaw { exponent, scale } => {
                *exponent = self.pick(self.flags.exponent, "exponent")?.unwrap_or(*exponent);
                *scale = self.pick(self.flags.scale, "scale")?.unwrap_or(*scale);
            }
            _ => {}
        }
        Ok(p)
    }

    fn seed(&self) -> CliResult<u64> {
        Ok(self.pick(self.flags.seed, "seed")?.unwrap_or(0))
    }

    fn family(&self, fallback: &str) -> CliResult<FamilySpec> {
        let name = self.string(&self.flags.family, "family").unwrap_or_else(|| fallback.into());
        let n = self.pick(self.flags.n, "n")?;
        let k = self.pick(self.flags.k, "k")?;
        let (n, k) = if n.is_none() && k.is_none() { (Some(8), None) } else { (n, k) };
        Ok(family_from_name(&name, n, k, self.seed()?)?)
    }

    fn spec(&self) -> CliResult<ExperimentSpec> {
        let protocol = self.protocol()?;
        let family = self.family(protocol.default_family_name())?;
        let mut eps = self.epsilons()?;
        eps.sort_by(|a, b| b.total_cmp(a));
        let trials = self.pick(self.flags.trials, "trials")?.unwrap_or(100);
        let mut spec = ExperimentSpec::new(protocol, family, eps, trials, self.seed()?);
        if let Some(d) = self.pick(self.flags.delta, "delta")? {
            spec.delta = d;
        }
        if let Some(i) = self.string(&self.flags.instances, "instances") {
            spec.instances = i.parse::<InstanceKind>()?;
        }
        let access = match self.flags.access {
            Some(a) => Some(a),
            None => match self.file.get("access").map(String::as_str) {
                Some("full") => Some(Access::Full),
                Some("sample") => Some(Access::Sample),
                Some(other) => return Err(usage(format!("config key `access`: `{other}` is not full or sample"))),
                None => None,
            },
        };
        if let Some(Access::Sample) = access {
            spec.access = AccessMode::SampleOnly;
        }
        spec.validate()?;
        Ok(spec)
    }

    fn out(&self) -> CliResult<Option<PathBuf>> {
        self.pick(self.flags.out.clone(), "out")
    }
}

fn write_out(settings: &Settings, records: &[TrialRecord]) -> CliResult<()> {
    if let Some(path) = settings.out()? {
        export_csv(records, &path)?;
        println!("wrote {} records to {}", records.len(), path.display());
    }
    Ok(())
}

fn cmd_run(settings: Settings) -> CliResult<()> {
    let spec = settings.spec()?;
    let records = run_experiment(&spec)?;
    write_out(&settings, &records)?;
    for s in summarize(&records) {
        println!(
            "protocol={} epsilon={} trials={} failures={} failure_rate={:.4} wilson99=[{:.4}, {:.4}] median_bits={}",
            spec.protocol, s.epsilon, s.trials, s.failures, s.failure_rate, s.failure_ci.0, s.failure_ci.1, s.median_bits
        );
        if let ProtocolId::Debias = spec.protocol {
            let cfg = ProtocolConfig::new(s.epsilon, spec.delta, 0)?;
            let k = DebiasPlan::for_config(&cfg).k_outer;
            let sq: Vec<f64> = records
                .iter()
                .filter(|r| r.epsilon == s.epsilon)
                .map(|r| r.abs_error * r.abs_error)
                .collect();
            let n = sq.len() as f64;
            let mse = sq.iter().sum::<f64>() / n;
            let sd = (sq.iter().map(|v| (v - mse).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
            let bound = 16.0 / (k * k) as f64;
            let half = WILSON_Z_99 * sd / n.sqrt();
            println!(
                "variance k={k} mse={mse:.6e} ci99_half={half:.6e} bound_16_over_k2={bound:.6e} within={}",
                mse - half <= bound
            );
        }
    }
    Ok(())
}

fn cmd_sweep(settings: Settings) -> CliResult<()> {
    let spec = settings.spec()?;
    if spec.epsilons.len() < 3 {
        return Err(usage(format!("sweep needs at least 3 epsilons, got {}", spec.epsilons.len())));
    }
    let records = run_experiment(&spec)?;
    write_out(&settings, &records)?;
    for s in summarize(&records) {
        println!("epsilon={} median_bits={} failures={}/{}", s.epsilon, s.median_bits, s.failures, s.trials);
    }
    let fit = fit_scaling(&records)?;
    println!("slope={:.3} r2={:.3}", fit.slope, fit.r_squared);
    Ok(())
}

fn cmd_diag(target: DiagTarget, settings: Settings) -> CliResult<()> {
    match target {
        DiagTarget::Svd | DiagTarget::Lambda => {
            let spec = settings.family("identity")?;
            let f = build_family(spec)?;
            let s = svd_summary(&f)?;
            println!("rank={} spectral_norm={:.12e} frobenius={:.12e}", s.rank, s.spectral_norm, s.frobenius);
            if let DiagTarget::Lambda = target {
                if f.rows() != f.cols() {
                    return Err(usage("lambda floor needs a square matrix"));
                }
                let margins = lambda_bound_check(&s, f.rows())?;
                println!("t,sigma_t,lambda_t,margin");
                for (i, m) in margins.iter().enumerate() {
                    println!("{},{:.12e},{:.12e},{:.6e}", i + 1, s.singular_values[i], s.lambda[i], m);
                }
            } else {
                println!("t,sigma_t");
                for (i, v) in s.singular_values.iter().enumerate() {
                    println!("{},{:.12e}", i + 1, v);
                }
            }
        }
        DiagTarget::DistanceInverse => {
            let k = settings.pick(settings.flags.k, "k")?.unwrap_or(16);
            let c = path_distance_inverse_check(k)?;
            println!(
                "k={} residual={:.3e} lambda_k={:.6e} bound={:.6e} within_bound={}",
                c.k, c.residual, c.lambda_k, c.bound, c.within_bound()
            );
        }
        DiagTarget::Discrepancy => {
            let f = build_family(settings.family("ip")?)?;
            let tx = ProbVec::uniform(f.rows())?;
            let ty = ProbVec::uniform(f.cols())?;
            let r = brute_force_discrepancy(&f, &tx, &ty)?;
            println!("value={:.12e}", r.value);
            println!("witness_rows={:?}", r.witness_rows);
            println!("witness_cols={:?}", r.witness_cols);
        }
    }
    Ok(())
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("ESTCOMM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("ESTCOMM_THREADS must be a positive integer, got `{v}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Run(flags) => cmd_run(Settings::new(flags)?),
        Command::Sweep(flags) => cmd_sweep(Settings::new(flags)?),
        Command::Diag { target, flags } => cmd_diag(target, Settings::new(flags)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}
