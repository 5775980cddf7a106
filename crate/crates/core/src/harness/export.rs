use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{ScalingFit, TrialRecord};
use crate::error::Result;

pub const CSV_HEADER: [&str; 12] = [
    "protocol", "family", "n", "epsilon", "trial", "estimate", "truth", "abs_error", "bits_alice", "bits_bob",
    "rounds", "seed",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_records<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.protocol.clone(),
            r.family.clone(),
            r.n.to_string(),
            real(r.epsilon),
            r.trial.to_string(),
            real(r.estimate),
            real(r.truth),
            real(r.abs_error),
            r.bits_alice.to_string(),
            r.bits_bob.to_string(),
            r.rounds.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn export_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_records(records, File::create(path)?)
}

pub fn import_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    read_records(File::open(path)?)
}

/// Writes the fitted points and the fit line as `log_inv_eps,log_bits` rows
/// followed by a `# slope=... intercept=... r2=...` trailer.
pub fn export_fit(fit: &ScalingFit, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "log_inv_eps,log_bits")?;
    for (x, y) in &fit.points {
        writeln!(f, "{},{}", real(*x), real(*y))?;
    }
    writeln!(f, "# slope={} intercept={} r2={}", real(fit.slope), real(fit.intercept), real(fit.r_squared))?;
    Ok(())
}
