//! Inequality reports: per-trial ratios, summary, negative controls.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Trial {
    pub fn new(index: usize, label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Trial {
            index,
            label: label.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
        }
    }
}

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// A configuration that violates a hypothesis; it must fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// The value the control is judged against.
    pub threshold: f64,
    pub failed: bool,
}

impl Control {
    /// Fails when `lhs/rhs` exceeds `threshold`.
    pub fn ratio_above(label: impl Into<String>, lhs: f64, rhs: f64, threshold: f64) -> Self {
        let r = ratio(lhs, rhs);
        Control {
            label: label.into(),
            lhs,
            rhs,
            ratio: r,
            threshold,
            failed: r > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub config: ExperimentConfig,
    pub trials: Vec<Trial>,
    pub max: f64,
    pub median: f64,
    /// Index into `trials` of the maximum ratio.
    pub witness: usize,
    pub ceiling: f64,
    /// `max <= ceiling`.
    pub pass: bool,
    pub controls: Vec<Control>,
    /// Every control failed.
    pub controls_ok: bool,
    /// Side measurements, keyed by name.
    pub measured: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(
        config: ExperimentConfig,
        trials: Vec<Trial>,
        controls: Vec<Control>,
        measured: BTreeMap<String, f64>,
        notes: Vec<String>,
    ) -> Self {
        let mut witness = 0;
        let mut max = f64::NEG_INFINITY;
        for (i, t) in trials.iter().enumerate() {
            // NaN ratios count as the maximum.
            if !(t.ratio <= max) {
                max = t.ratio;
                witness = i;
            }
        }
        if trials.is_empty() {
            max = 0.0;
        }
        let mut sorted: Vec<f64> = trials.iter().map(|t| t.ratio).collect();
        sorted.sort_by(f64::total_cmp);
        let median = match sorted.len() {
            0 => 0.0,
            n if n % 2 == 1 => sorted[n / 2],
            n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
        };
        let ceiling = config.ceiling;
        let controls_ok = !controls.is_empty() && controls.iter().all(|c| c.failed);
        InequalityReport {
            config,
            trials,
            max,
            median,
            witness,
            ceiling,
            pass: max <= ceiling,
            controls,
            controls_ok,
            measured,
            notes,
        }
    }

    /// The suite succeeds: bounded ratios and every control failing.
    pub fn ok(&self) -> bool {
        self.pass && self.controls_ok
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `suite,trial,lhs,rhs,ratio` rows.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            w.write_record(["suite", "trial", "lhs", "rhs", "ratio"])?;
        }
        let suite = self.config.suite.name();
        for t in &self.trials {
            w.serialize((suite, t.index, t.lhs, t.rhs, t.ratio))?;
        }
        w.flush().map_err(|e| crate::Error::Format(e.to_string()))?;
        Ok(())
    }

    /// A one-line summary for logs.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} (max {:.4} vs ceiling {}, median {:.4}, {} trials, controls {})",
            self.config.suite,
            if self.ok() { "PASS" } else { "FAIL" },
            self.max,
            self.ceiling,
            self.median,
            self.trials.len(),
            if self.controls_ok { "failed as required" } else { "DID NOT FAIL" },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            ceiling: 2.0,
            ..ExperimentConfig::reference(Suite::SparseDomination, None)
        }
    }

    #[test]
    fn summary_statistics() {
        let trials = vec![Trial::new(0, "a", 1.0, 1.0), Trial::new(1, "b", 3.0, 2.0), Trial::new(2, "c", 0.0, 0.0)];
        let r = InequalityReport::new(cfg(), trials, vec![Control::ratio_above("x", 5.0, 1.0, 2.0)], BTreeMap::new(), vec![]);
        assert_eq!((r.max, r.witness, r.median), (1.5, 1, 1.0));
        assert!(r.pass && r.controls_ok && r.ok());
        let mut buf = Vec::new();
        r.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("suite,trial,lhs,rhs,ratio"));
        assert_eq!(text.lines().nth(2), Some("sparse_domination,1,3.0,2.0,1.5"));
    }

    #[test]
    fn pass_tracks_ceiling_and_controls() {
        let r = InequalityReport::new(cfg(), vec![Trial::new(0, "a", 5.0, 1.0)], vec![], BTreeMap::new(), vec![]);
        assert!(!r.pass && !r.controls_ok);
        let r = InequalityReport::new(
            cfg(),
            vec![Trial::new(0, "a", 1.0, 0.0)],
            vec![Control::ratio_above("x", 1.0, 1.0, 2.0)],
            BTreeMap::new(),
            vec![],
        );
        assert_eq!(r.max, f64::INFINITY);
        assert!(!r.pass && !r.controls_ok);
    }
}
