//! Trial batches over the `(k, θ, detector)` grid and their aggregation.

use std::io::Write;

use rayon::prelude::*;

use crate::cmat::format_g17;
use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::trial::{Detector, Experiment, TrialOutcome};

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a rate `p_hat` observed over `n` trials.
pub fn wilson_interval(p_hat: f64, n: usize) -> (f64, f64) {
    if n == 0 || p_hat.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let n = n as f64;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).max(0.0).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Grid coordinates of a cell. `theta = 0` marks the oracle `θ = |I|` of the full-support baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub k: usize,
    pub detector: Detector,
    pub theta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub key: CellKey,
    /// Selected element (or group) count actually used by the detector.
    pub effective_theta: usize,
    /// `|E|` in the detector's index domain.
    pub zero_count: usize,
    pub trials: usize,
    pub mean_fdp: f64,
    pub fdp_ci: (f64, f64),
    /// NaN when no trial had `E ≠ ∅`.
    pub mean_zero_fraction: f64,
    pub zero_fraction_ci: (f64, f64),
    pub zero_fraction_trials: usize,
    pub pe: f64,
    pub pe_ci: (f64, f64),
}

impl CellSummary {
    /// True when `θ > |E|`, where the FDP curve reports the zero fraction instead.
    pub fn reports_zero_fraction(&self) -> bool {
        self.key.detector != Detector::OstTopkFullSupport && self.effective_theta > self.zero_count
    }

    /// The FDP-curve value and its interval.
    pub fn fdp_curve_point(&self) -> (f64, (f64, f64)) {
        if self.reports_zero_fraction() {
            (self.mean_zero_fraction, self.zero_fraction_ci)
        } else {
            (self.mean_fdp, self.fdp_ci)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub summary: CellSummary,
    /// One outcome per trial, in trial order.
    pub outcomes: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatchReport {
    pub config: ExperimentConfig,
    /// Ordered by k (grid order), then detector (config order), then theta (grid order).
    pub cells: Vec<Cell>,
}

pub fn summarize(key: CellKey, effective_theta: usize, zero_count: usize, outcomes: &[TrialOutcome]) -> CellSummary {
    let n = outcomes.len();
    let mean = |it: &mut dyn Iterator<Item = f64>| -> (f64, usize) {
        let (s, c) = it.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if c == 0 {
            (f64::NAN, 0)
        } else {
            (s / c as f64, c)
        }
    };
    let (mean_fdp, _) = mean(&mut outcomes.iter().map(|o| o.fdp));
    let (mean_zf, zf_n) = mean(&mut outcomes.iter().map(|o| o.zero_fraction).filter(|v| !v.is_nan()));
    let errors = outcomes.iter().filter(|o| o.error()).count();
    let pe = if n == 0 { f64::NAN } else { errors as f64 / n as f64 };
    CellSummary {
        key,
        effective_theta,
        zero_count,
        trials: n,
        mean_fdp,
        fdp_ci: wilson_interval(mean_fdp, n),
        mean_zero_fraction: mean_zf,
        zero_fraction_ci: wilson_interval(mean_zf, zf_n),
        zero_fraction_trials: zf_n,
        pe,
        pe_ci: wilson_interval(pe, n),
    }
}

impl Experiment {
    /// The grid cells in report order.
    pub fn cell_keys(&self, k: usize) -> Vec<CellKey> {
        let c = self.config();
        let mut keys = Vec::new();
        for &detector in &c.detectors {
            if detector.uses_theta() {
                keys.extend(c.theta_grid.iter().map(|&theta| CellKey { k, detector, theta }));
            } else {
                keys.push(CellKey { k, detector, theta: 0 });
            }
        }
        keys
    }

    /// `|E|` for `detector` at sparsity `k`.
    pub fn zero_count(&self, detector: Detector, k: usize) -> usize {
        match detector {
            Detector::ZdGroth => self.domain_size() - k,
            _ => self.matrix().cols() - k * self.unit(),
        }
    }

    /// Every trial is evaluated once for all cells, in parallel; results are
    /// gathered in trial order, so the report does not depend on scheduling.
    pub fn run_batch(&self) -> Result<TrialBatchReport> {
        let c = self.config();
        let mut cells = Vec::new();
        for &k in &c.k_grid {
            let keys = self.cell_keys(k);
            let per_trial: Vec<Vec<TrialOutcome>> = (0..c.trials)
                .into_par_iter()
                .map(|t| {
                    let data = self.trial_data(k, t)?;
                    keys.iter().map(|key| self.evaluate(&data, key.detector, key.theta)).collect()
                })
                .collect::<Result<_>>()?;
            for (i, key) in keys.iter().enumerate() {
                let outcomes: Vec<TrialOutcome> = per_trial.iter().map(|row| row[i]).collect();
                let summary = summarize(
                    *key,
                    self.effective_theta(key.detector, key.theta, k),
                    self.zero_count(key.detector, k),
                    &outcomes,
                );
                cells.push(Cell { summary, outcomes });
            }
        }
        Ok(TrialBatchReport { config: c.clone(), cells })
    }
}

/// Builds the experiment from `config` and runs the whole grid.
pub fn run_batch(config: &ExperimentConfig) -> Result<TrialBatchReport> {
    Experiment::new(config.clone())?.run_batch()
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "k",
    "detector",
    "theta",
    "effective_theta",
    "zero_count",
    "trials",
    "mean_fdp",
    "fdp_lo",
    "fdp_hi",
    "mean_zero_fraction",
    "zero_fraction_lo",
    "zero_fraction_hi",
    "zero_fraction_trials",
    "pe",
    "pe_lo",
    "pe_hi",
];

pub const TRIALS_HEADER: [&str; 7] = ["k", "detector", "theta", "trial", "fdp", "zero_fraction", "hit"];

impl TrialBatchReport {
    pub fn summaries(&self) -> impl Iterator<Item = &CellSummary> {
        self.cells.iter().map(|c| &c.summary)
    }

    pub fn cell(&self, k: usize, detector: Detector, theta: usize) -> Option<&Cell> {
        let key = CellKey { k, detector, theta };
        self.cells.iter().find(|c| c.summary.key == key)
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_HEADER)?;
        for s in self.summaries() {
            w.write_record([
                s.key.k.to_string(),
                s.key.detector.name().to_string(),
                s.key.theta.to_string(),
                s.effective_theta.to_string(),
                s.zero_count.to_string(),
                s.trials.to_string(),
                format_g17(s.mean_fdp),
                format_g17(s.fdp_ci.0),
                format_g17(s.fdp_ci.1),
                format_g17(s.mean_zero_fraction),
                format_g17(s.zero_fraction_ci.0),
                format_g17(s.zero_fraction_ci.1),
                s.zero_fraction_trials.to_string(),
                format_g17(s.pe),
                format_g17(s.pe_ci.0),
                format_g17(s.pe_ci.1),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_trials_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRIALS_HEADER)?;
        for cell in &self.cells {
            let key = cell.summary.key;
            for (t, o) in cell.outcomes.iter().enumerate() {
                w.write_record([
                    key.k.to_string(),
                    key.detector.name().to_string(),
                    key.theta.to_string(),
                    t.to_string(),
                    format_g17(o.fdp),
                    format_g17(o.zero_fraction),
                    u8::from(o.hit).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
