//! Closed-form performance guarantees for ZD-OST and ZD-GroTh.
//!
//! Every calculator is total on its domain: when a hypothesis of the underlying
//! guarantee fails, the value is still returned together with `valid = false`,
//! so callers can chart the regions where a guarantee does not apply.
//!
//! Conventions: logarithms are natural; `sigma` is the noise standard deviation
//! with the per-entry variance convention selected by [`NoiseConvention`].

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::support::SignalInstance;

/// How `sigma²` maps onto the complex noise entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseConvention {
    /// `w_t ~ CN(0, σ²)`: each of re/im has variance `σ²/2`, `E‖w‖² = nσ²`.
    #[default]
    Total,
    /// Each of re/im has variance `σ²`, `E‖w‖² = 2nσ²`.
    PerComponent,
}

impl NoiseConvention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Self::Total),
            "per_component" => Ok(Self::PerComponent),
            _ => Err(Error::Config(format!("unknown noise convention `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Total => "total",
            Self::PerComponent => "per_component",
        }
    }

    /// `E|w_t|² / σ²`.
    pub fn energy_factor(&self) -> f64 {
        match self {
            Self::Total => 1.0,
            Self::PerComponent => 2.0,
        }
    }

    /// Standard deviation of the real and imaginary part of each entry.
    pub fn component_std(&self, sigma2: f64) -> f64 {
        match self {
            Self::Total => (sigma2 / 2.0).sqrt(),
            Self::PerComponent => sigma2.sqrt(),
        }
    }
}

/// A computed quantity and whether the hypotheses behind it hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub valid: bool,
}

/// Free constants of both guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremParams {
    /// `a > 1`, trades the sparsity bound against the StOC constant.
    pub a: f64,
    /// `t ∈ (0, 1)`, splits the FDP threshold between signal and noise.
    pub t: f64,
    pub mu0: f64,
    pub sigma: f64,
    /// `c₁ ≥ 2` of the group guarantee.
    pub c1: f64,
    /// `c₂ ∈ (0, 1)` of the group guarantee.
    pub c2: f64,
    pub c_mu: f64,
    pub c_nu: f64,
}

impl TheoremParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("parameter out of range: {what}")));
        if !(self.a > 1.0) {
            return bad("a > 1");
        }
        if !(self.t > 0.0 && self.t < 1.0) {
            return bad("0 < t < 1");
        }
        if !(self.mu0 > 0.0) {
            return bad("mu0 > 0");
        }
        if !(self.sigma >= 0.0) {
            return bad("sigma >= 0");
        }
        if !(self.c1 >= 2.0) {
            return bad("c1 >= 2");
        }
        if !(self.c2 > 0.0 && self.c2 < 1.0) {
            return bad("0 < c2 < 1");
        }
        if !(self.c_mu > 0.0 && self.c_nu > 0.0) {
            return bad("c_mu, c_nu > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalStats {
    pub snr: f64,
    pub snr_min: f64,
    /// `LAR_m` for `m = 1..k`, nonincreasing.
    pub lar: Vec<f64>,
    pub x_min: f64,
    pub energy: f64,
    pub sorted_magnitudes: Vec<f64>,
}

/// SNR `‖x‖²/E‖w‖²`, `LAR_m = |x_(m)|² / (‖x‖²/k)`, and `SNR_min = x_min²/σ²`.
pub fn signal_stats<T: Real>(x: &SignalInstance<T>, sigma: f64, n: usize, convention: NoiseConvention) -> Result<SignalStats> {
    let mags: Vec<f64> = x.sorted_magnitudes().into_iter().map(Real::as_f64).collect();
    stats_from_magnitudes(mags, sigma, n, convention)
}

/// Same as [`signal_stats`] from the nonzero magnitudes alone.
pub fn stats_from_magnitudes(mut mags: Vec<f64>, sigma: f64, n: usize, convention: NoiseConvention) -> Result<SignalStats> {
    mags.retain(|&v| v != 0.0);
    if mags.is_empty() {
        return Err(Error::EmptySupport);
    }
    mags.sort_by(|a, b| b.total_cmp(a));
    let k = mags.len() as f64;
    let energy: f64 = mags.iter().map(|v| v * v).sum();
    let x_min = *mags.last().expect("nonempty");
    let sigma2 = sigma * sigma;
    Ok(SignalStats {
        snr: energy / (n as f64 * sigma2 * convention.energy_factor()),
        snr_min: x_min * x_min / sigma2,
        lar: mags.iter().map(|v| v * v / (energy / k)).collect(),
        x_min,
        energy,
        sorted_magnitudes: mags,
    })
}

/// `√c = 4(2 + a⁻¹)`, the StOC constant.
pub fn stoc_constant(a: f64) -> f64 {
    16.0 * (2.0 + 1.0 / a).powi(2)
}

/// `ε₀ = (√SNR_min − 4√(log p)) / (2√SNR)`; valid when `SNR_min > 16 log p`.
pub fn epsilon0(snr_min: f64, snr: f64, p: usize) -> Flagged {
    let log_p = (p as f64).ln();
    Flagged {
        value: (snr_min.sqrt() - 4.0 * log_p.sqrt()) / (2.0 * snr.sqrt()),
        valid: snr_min > 16.0 * log_p,
    }
}

/// `min{((ε₀ − 4(2+a⁻¹)μ₀)/ν)², p/(1+a)}`; `0` and invalid when the first base is nonpositive.
pub fn theorem1_k_bound(params: &TheoremParams, epsilon0: f64, nu: f64, p: usize) -> Flagged {
    let gap = epsilon0 - 4.0 * (2.0 + 1.0 / params.a) * params.mu0;
    if gap <= 0.0 {
        return Flagged { value: 0.0, valid: false };
    }
    let first = if nu > 0.0 { (gap / nu).powi(2) } else { f64::INFINITY };
    let second = p as f64 / (1.0 + params.a);
    Flagged {
        value: first.min(second),
        valid: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    pub alpha: f64,
    /// `c = 16(2 + a⁻¹)²`.
    pub c: f64,
    /// `√(2/π)/p + 4p^{1−α}`.
    pub pe_bound: f64,
    /// Same with the noise term's `(log p)^{-1/2}` factor kept.
    pub pe_bound_with_log_factor: f64,
    /// `α > 1`.
    pub valid: bool,
}

/// `α = (ε₀ − √k ν)² / (c μ₀²)` and the resulting error-probability bound.
pub fn theorem1_alpha(epsilon0: f64, k: usize, nu: f64, mu0: f64, a: f64, p: usize) -> Alpha {
    let c = stoc_constant(a);
    let alpha = (epsilon0 - (k as f64).sqrt() * nu).powi(2) / (c * mu0 * mu0);
    let pf = p as f64;
    let stoc_term = 4.0 * pf.powf(1.0 - alpha);
    let noise = (2.0 / PI).sqrt() / pf;
    Alpha {
        alpha,
        c,
        pe_bound: noise + stoc_term,
        pe_bound_with_log_factor: noise / pf.ln().sqrt() + stoc_term,
        valid: alpha > 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdpBound {
    pub m: usize,
    pub bound: f64,
    pub threshold: f64,
}

/// FDP bound `(k − m)/θ` where `m` counts the `LAR_m` meeting
/// `max{c₁ k log p / (n SNR), c₂ μ² log p}` with `c₁ = 32/t`, `c₂ = 800/(1−t)`.
pub fn theorem1_fdp_bound(stats: &SignalStats, params: &TheoremParams, mu: f64, k: usize, n: usize, p: usize, theta: usize) -> FdpBound {
    let log_p = (p as f64).ln();
    let c1 = 32.0 / params.t;
    let c2 = 800.0 / (1.0 - params.t);
    let threshold = (c1 * k as f64 * log_p / (n as f64 * stats.snr)).max(c2 * mu * mu * log_p);
    let m = stats.lar.iter().take_while(|&&l| l >= threshold).count();
    FdpBound {
        m,
        bound: (k.saturating_sub(m)) as f64 / theta as f64,
        threshold,
    }
}

/// Picks the `t` from `grid` giving the smallest FDP bound (first on ties).
pub fn grid_search_t(
    stats: &SignalStats,
    params: &TheoremParams,
    mu: f64,
    k: usize,
    n: usize,
    p: usize,
    theta: usize,
    grid: &[f64],
) -> Option<(f64, FdpBound)> {
    grid.iter()
        .filter(|&&t| t > 0.0 && t < 1.0)
        .map(|&t| (t, theorem1_fdp_bound(stats, &TheoremParams { t, ..*params }, mu, k, n, p, theta)))
        .fold(None, |best: Option<(f64, FdpBound)>, cur| match best {
            Some(b) if b.1.bound <= cur.1.bound => Some(b),
            _ => Some(cur),
        })
}

/// `c₃ = 32√(2e)(2c₁ − 1) / ((1 − c₂)(c₁ − 1))`.
pub fn theorem2_constants(params: &TheoremParams) -> f64 {
    32.0 * (2.0 * E).sqrt() * (2.0 * params.c1 - 1.0) / ((1.0 - params.c2) * (params.c1 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem2Gates {
    /// `c₁ r k ≤ n`.
    pub rank: bool,
    /// `c_μ < c₃⁻¹`.
    pub worst_case: bool,
    /// `c_ν ≤ √c₁ c₂ c₃`.
    pub average: bool,
}

impl Theorem2Gates {
    pub fn all(&self) -> bool {
        self.rank && self.worst_case && self.average
    }
}

pub fn theorem2_gates(params: &TheoremParams, c3: f64, r: usize, k: usize, n: usize) -> Theorem2Gates {
    Theorem2Gates {
        rank: params.c1 * (r * k) as f64 <= n as f64,
        worst_case: params.c_mu < 1.0 / c3,
        average: params.c_nu <= params.c1.sqrt() * params.c2 * c3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Bound {
    pub m: usize,
    pub bound: f64,
    pub threshold: f64,
    /// `1 − (1 + e²)/q`.
    pub success_floor: f64,
    /// `(1 − 1/q)(1 − e²/q)`.
    pub success_floor_product: f64,
}

/// FDP bound for ZD-GroTh; `group_norms` are the active block norms, nonincreasing.
///
/// `m` counts the blocks with `‖x_(m)‖₂ ≥ c₃ μ^g ‖x‖₂ √(log q) + 2σ√(2 log q + (r/2) log 2)`.
pub fn theorem2_m_and_fdp(group_norms: &[f64], sigma: f64, mu_g: f64, q: usize, r: usize, c3: f64, theta: usize) -> Theorem2Bound {
    let x_norm = group_norms.iter().map(|v| v * v).sum::<f64>().sqrt();
    let qf = q as f64;
    let log_q = qf.ln();
    let (_, tau_g) = noise_thresholds(sigma, 1, q, r);
    let threshold = c3 * mu_g * x_norm * log_q.sqrt() + tau_g;
    let m = group_norms.iter().take_while(|&&v| v >= threshold).count();
    let e2 = E * E;
    Theorem2Bound {
        m,
        bound: (group_norms.len() - m) as f64 / theta as f64,
        threshold,
        success_floor: 1.0 - (1.0 + e2) / qf,
        success_floor_product: (1.0 - 1.0 / qf) * (1.0 - e2 / qf),
    }
}

/// `τ = 2σ√(log p)` for elements and `τ_g = 2σ√(2 log q + (r/2) log 2)` for groups.
pub fn noise_thresholds(sigma: f64, p: usize, q: usize, r: usize) -> (f64, f64) {
    let tau = 2.0 * sigma * (p as f64).ln().sqrt();
    let tau_g = 2.0 * sigma * (2.0 * (q as f64).ln() + r as f64 / 2.0 * 2f64.ln()).sqrt();
    (tau, tau_g)
}

/// Lower bound `1 − √(2/π) p⁻¹ (log p)^{-1/2}` on `P{max_i |a_iᴴ w| ≤ 2σ√(log p)}`.
pub fn element_noise_event_floor(p: usize) -> f64 {
    let pf = p as f64;
    1.0 - (2.0 / PI).sqrt() / (pf * pf.ln().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// Bound clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl TailBound {
    fn from_raw(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
            clamped: raw > 1.0,
        }
    }
}

/// Chernoff bound `e^{−τ²/(4σ²)} 2^{r/2}` on `P{‖Gᴴw‖₂ > τ}` for one block of `r` orthonormal columns.
pub fn chi2_tail_bound(tau: f64, sigma: f64, r: usize) -> TailBound {
    TailBound::from_raw((-tau * tau / (4.0 * sigma * sigma)).exp() * 2f64.powf(r as f64 / 2.0))
}

/// Union over `q` blocks: bound on `P{max_i ‖A_iᴴ w‖₂ ≥ τ}`.
pub fn group_noise_failure_bound(tau: f64, sigma: f64, r: usize, q: usize) -> TailBound {
    TailBound::from_raw(q as f64 * chi2_tail_bound(tau, sigma, r).raw)
}
