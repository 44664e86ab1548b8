//! One Monte-Carlo trial: signal, measurement, detection, scoring.

use std::fs::File;
use std::io::BufReader;

use num_complex::Complex64;

use crate::cmat::read_cmat;
use crate::detectors::{element_scores, group_scores, ost_topk, select_highest, select_lowest, Mode};
use crate::error::{Error, Result};
use crate::experiments::config::{ExperimentConfig, MatrixSource};
use crate::experiments::signal::{gen_group_signal_with, gen_noise, gen_signal};
use crate::matrices::{bernoulli_meta, build_bernoulli, build_kerdock, KerdockSpec};
use crate::matrix::{hermitian_apply, MeasurementMatrix};
use crate::rng::RngSpec;
use crate::support::{SignalInstance, SupportSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    ZdOst,
    ZdGroth,
    OstTopk,
    /// `ost_topk` with `θ = |I|`, scored as exact support recovery; ignores θ.
    OstTopkFullSupport,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Self::ZdOst, Self::ZdGroth, Self::OstTopk, Self::OstTopkFullSupport];

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown detector `{s}`")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ZdOst => "zd_ost",
            Self::ZdGroth => "zd_groth",
            Self::OstTopk => "ost_topk",
            Self::OstTopkFullSupport => "ost_topk_full_support",
        }
    }

    pub fn uses_theta(&self) -> bool {
        *self != Self::OstTopkFullSupport
    }
}

/// Scores of one detection against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Zero detectors: `|Ê\E|/|Ê|`. Support detectors: `|Ê\I|/|Ê|`, 0 when `I = ∅`.
    pub fdp: f64,
    /// `|Ê∩E|/|E|`; NaN when `E = ∅`.
    pub zero_fraction: f64,
    /// Zero detectors: `Ê∩E ≠ ∅`. `ost_topk`: `Ê∩I ≠ ∅` or `I = ∅`. Full support: `Ê = I`.
    pub hit: bool,
    pub selected: usize,
}

impl TrialOutcome {
    pub fn error(&self) -> bool {
        !self.hit
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSupportOutcome {
    pub error: bool,
    pub fdp: f64,
}

/// Oracle-sparsity support recovery: the `|I|` most correlated columns.
///
/// `|I| = 0` selects nothing and counts as success.
pub fn baseline_full_support(y: &[Complex64], m: &MeasurementMatrix<f64>, support: &SupportSet) -> Result<FullSupportOutcome> {
    let k = support.len();
    if k == 0 {
        return Ok(FullSupportOutcome { error: false, fdp: 0.0 });
    }
    let sel = ost_topk(y, m, k)?.estimate;
    let false_picks = sel.difference_len(support);
    Ok(FullSupportOutcome {
        error: false_picks != 0,
        fdp: false_picks as f64 / k as f64,
    })
}

/// A configuration with its measurement matrix built and its grids checked.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    matrix: MeasurementMatrix<f64>,
    meta: Vec<(String, String)>,
}

const SIGNAL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Signal, measurements and correlations of one trial.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub signal: SignalInstance<f64>,
    pub y: Vec<Complex64>,
    pub corr: Vec<Complex64>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate_basic()?;
        let (matrix, meta) = match &config.matrix {
            MatrixSource::Kerdock { m } => {
                let spec = KerdockSpec::new(*m)?;
                (build_kerdock(&spec)?, spec.meta())
            }
            MatrixSource::Bernoulli { rows, cols, seed } => {
                let rng = RngSpec::new(*seed, 0);
                (build_bernoulli(*rows, *cols, &rng)?, bernoulli_meta(*rows, *cols, &rng))
            }
            MatrixSource::File(path) => {
                let f = read_cmat(BufReader::new(File::open(path)?))?;
                (MeasurementMatrix::new(f.matrix)?, f.meta)
            }
        };
        Self::with_matrix(config, matrix, meta)
    }

    /// Uses `matrix` in place of the configured source.
    pub fn with_matrix(config: ExperimentConfig, matrix: MeasurementMatrix<f64>, meta: Vec<(String, String)>) -> Result<Self> {
        config.validate_basic()?;
        let matrix = match config.group_size {
            Some(r) => matrix.with_groups(r)?,
            None => matrix.without_groups(),
        };
        let exp = Self { config, matrix, meta };
        let max = exp.domain_size();
        if let Some(&k) = exp.config.k_grid.iter().find(|&&k| k > max) {
            return Err(Error::BadK { k, max });
        }
        if exp.config.detectors.iter().any(Detector::uses_theta) {
            if let Some(&theta) = exp.config.theta_grid.iter().find(|&&t| t == 0 || t > max) {
                return Err(Error::ThetaOutOfRange { theta, max });
            }
        }
        Ok(exp)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn matrix(&self) -> &MeasurementMatrix<f64> {
        &self.matrix
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    /// Columns `r` per sparsity/theta unit: the group size, or 1.
    pub fn unit(&self) -> usize {
        self.config.group_size.unwrap_or(1)
    }

    /// `q` for group experiments, `p` otherwise.
    pub fn domain_size(&self) -> usize {
        self.matrix.cols() / self.unit()
    }

    /// Number of selected indices `detector` uses for grid value `theta`.
    pub fn effective_theta(&self, detector: Detector, theta: usize, k: usize) -> usize {
        match detector {
            Detector::ZdGroth => theta,
            Detector::OstTopkFullSupport => k * self.unit(),
            _ => theta * self.unit(),
        }
    }

    fn base_rng(&self) -> RngSpec {
        RngSpec::new(self.config.master_seed, 0)
    }

    /// Trial streams depend only on `(master_seed, k, trial)`, so every detector
    /// and theta is evaluated on the same signal and noise.
    pub fn trial_data(&self, k: usize, trial: usize) -> Result<TrialData> {
        let base = self.base_rng();
        let mut srng = base.derive(&[SIGNAL_STREAM, k as u64, trial as u64]).rng();
        let c = &self.config;
        let signal = match c.group_size {
            Some(r) => gen_group_signal_with(self.domain_size(), r, k, c.signal, &c.amplitude, &mut srng)?,
            None => gen_signal(self.matrix.cols(), k, c.signal, &c.amplitude, &mut srng)?,
        };
        let mut nrng = base.derive(&[NOISE_STREAM, k as u64, trial as u64]).rng();
        let w = gen_noise(self.matrix.rows(), c.sigma2, c.noise_convention, &mut nrng)?;
        let mut y = self.matrix.apply(signal.x())?;
        for (yi, wi) in y.iter_mut().zip(&w) {
            *yi += wi;
        }
        let corr = hermitian_apply(&self.matrix, &y)?;
        Ok(TrialData { signal, y, corr })
    }

    /// Scores `detector` at grid value `theta` on precomputed trial data.
    pub fn evaluate(&self, data: &TrialData, detector: Detector, theta: usize) -> Result<TrialOutcome> {
        let sig = &data.signal;
        match detector {
            Detector::ZdGroth => {
                let groups = sig.groups().ok_or(Error::NoGroups)?;
                let part = self.matrix.groups().ok_or(Error::NoGroups)?;
                let est = select_lowest(group_scores(&data.corr, part), theta, Mode::Group)?.estimate;
                Ok(zero_outcome(&est, &groups.zero))
            }
            Detector::ZdOst => {
                let t = self.effective_theta(detector, theta, 0);
                let est = select_lowest(element_scores(&data.corr), t, Mode::Element)?.estimate;
                Ok(zero_outcome(&est, sig.zero_support()))
            }
            Detector::OstTopk => {
                let t = self.effective_theta(detector, theta, 0);
                let est = select_highest(element_scores(&data.corr), t, Mode::Element)?.estimate;
                let support = sig.support();
                let fdp = if support.is_empty() {
                    0.0
                } else {
                    est.difference_len(support) as f64 / est.len() as f64
                };
                Ok(TrialOutcome {
                    fdp,
                    zero_fraction: zero_fraction(&est, sig.zero_support()),
                    hit: support.is_empty() || est.intersection_len(support) > 0,
                    selected: est.len(),
                })
            }
            Detector::OstTopkFullSupport => {
                let support = sig.support();
                let base = baseline_full_support(&data.y, &self.matrix, support)?;
                let est = if support.is_empty() {
                    SupportSet::empty(self.matrix.cols())
                } else {
                    select_highest(element_scores(&data.corr), support.len(), Mode::Element)?.estimate
                };
                Ok(TrialOutcome {
                    fdp: base.fdp,
                    zero_fraction: zero_fraction(&est, sig.zero_support()),
                    hit: !base.error,
                    selected: est.len(),
                })
            }
        }
    }

    /// Full pipeline for one `(k, θ, detector, trial)` cell.
    pub fn run_trial(&self, k: usize, theta: usize, detector: Detector, trial: usize) -> Result<TrialOutcome> {
        let data = self.trial_data(k, trial)?;
        self.evaluate(&data, detector, theta)
    }
}

/// Builds the experiment and runs a single trial.
pub fn run_trial(config: &ExperimentConfig, k: usize, theta: usize, detector: Detector, trial: usize) -> Result<TrialOutcome> {
    Experiment::new(config.clone())?.run_trial(k, theta, detector, trial)
}

fn zero_fraction(est: &SupportSet, zeros: &SupportSet) -> f64 {
    if zeros.is_empty() {
        f64::NAN
    } else {
        est.intersection_len(zeros) as f64 / zeros.len() as f64
    }
}

fn zero_outcome(est: &SupportSet, zeros: &SupportSet) -> TrialOutcome {
    let true_zeros = est.intersection_len(zeros);
    TrialOutcome {
        fdp: (est.len() - true_zeros) as f64 / est.len() as f64,
        zero_fraction: zero_fraction(est, zeros),
        hit: true_zeros > 0,
        selected: est.len(),
    }
}
