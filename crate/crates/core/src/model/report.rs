use super::ledger::CostLedger;

/// Output of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate: f64,
    pub truth: Option<f64>,
    pub abs_error: Option<f64>,
    pub ledger: CostLedger,
    pub seed: u64,
    /// Named error-budget terms the protocol guarantees by construction.
    pub budget: Vec<(String, f64)>,
}

impl EstimateReport {
    pub fn new(estimate: f64, ledger: CostLedger, seed: u64) -> Self {
        Self {
            estimate,
            truth: None,
            abs_error: None,
            ledger,
            seed,
            budget: Vec::new(),
        }
    }

    pub fn with_truth(mut self, truth: f64) -> Self {
        self.truth = Some(truth);
        self.abs_error = Some((self.estimate - truth).abs());
        self
    }

    pub fn with_budget(mut self, name: &str, value: f64) -> Self {
        self.budget.push((name.to_string(), value));
        self
    }

    pub fn budget_term(&self, name: &str) -> Option<f64> {
        self.budget.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}
