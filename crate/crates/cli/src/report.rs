use serde::{Deserialize, Serialize};

pub const TOOL: &str = "qfm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerances in effect for a command, echoed into its report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_tol: Option<f64>,
}

/// Envelope around every command's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub elapsed_ms: f64,
    pub report: T,
}

impl<T> ReportFile<T> {
    pub fn new(command: &str, seed: u64, tolerances: Tolerances, elapsed_ms: f64, report: T) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            tolerances,
            elapsed_ms,
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub dims: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub entropy_nats: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfm_core::markov::{self, CheckOptions, MarkovReport};

    #[test]
    fn markov_report_round_trips() {
        let opts = CheckOptions::default();
        let r = markov::check(&markov::counterexample(), &opts).unwrap();
        let file = ReportFile::new(
            "check",
            0,
            Tolerances {
                tol: Some(opts.tol),
                gap_tol: Some(opts.gap_tol),
                t_samples: Some(opts.t_samples.clone()),
                oracle_tol: None,
            },
            1.25,
            r,
        );
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: ReportFile<MarkovReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
    }
}
