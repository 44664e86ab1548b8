//! Random sparse signals and measurement noise.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::GroupPartition;
use crate::support::SignalInstance;
use crate::theory::NoiseConvention;

/// Law of the nonzero magnitudes `|x_ω|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeLaw {
    Uniform { lo: f64, hi: f64 },
}

impl AmplitudeLaw {
    /// Requires `0 < lo <= hi < ∞` so every draw is nonzero.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!("amplitude range [{lo}, {hi}] must satisfy 0 < lo <= hi")));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { lo, hi } if lo == hi => lo,
            Self::Uniform { lo, hi } => rng.random_range(lo..=hi),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

impl Default for AmplitudeLaw {
    fn default() -> Self {
        Self::Uniform { lo: 1.0, hi: 1000.0 }
    }
}

/// Phase law of the nonzero coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalModel {
    /// DFT-grid tones: phase uniform on `[0, 2π)`.
    #[default]
    Tone,
    /// Real coefficients with a random sign.
    Generic,
}

impl SignalModel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tone" => Ok(Self::Tone),
            "generic" => Ok(Self::Generic),
            _ => Err(Error::Config(format!("unknown signal model `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Tone => "tone",
            Self::Generic => "generic",
        }
    }

    fn coefficient<R: Rng + ?Sized>(&self, law: &AmplitudeLaw, rng: &mut R) -> Complex64 {
        let a = law.sample(rng);
        match self {
            Self::Tone => Complex64::from_polar(a, rng.random::<f64>() * TAU),
            Self::Generic => Complex64::new(if rng.random::<bool>() { a } else { -a }, 0.0),
        }
    }
}

/// `k` tone coefficients on a uniformly drawn support of `{0..p}`.
///
/// Draw order: the support, then one (amplitude, phase) pair per support index
/// in ascending index order.
pub fn gen_tone_signal<R: Rng + ?Sized>(p: usize, k: usize, law: &AmplitudeLaw, rng: &mut R) -> Result<SignalInstance<f64>> {
    gen_signal(p, k, SignalModel::Tone, law, rng)
}

pub fn gen_signal<R: Rng + ?Sized>(
    p: usize,
    k: usize,
    model: SignalModel,
    law: &AmplitudeLaw,
    rng: &mut R,
) -> Result<SignalInstance<f64>> {
    if k > p {
        return Err(Error::BadK { k, max: p });
    }
    let mut support = sample(rng, p, k).into_vec();
    support.sort_unstable();
    let mut x = vec![Complex64::new(0.0, 0.0); p];
    for i in support {
        x[i] = model.coefficient(law, rng);
    }
    Ok(SignalInstance::from_vector(x))
}

/// `k` of `q` contiguous blocks of `r` coefficients, every entry of an active block nonzero.
pub fn gen_group_signal<R: Rng + ?Sized>(
    q: usize,
    r: usize,
    k: usize,
    law: &AmplitudeLaw,
    rng: &mut R,
) -> Result<SignalInstance<f64>> {
    gen_group_signal_with(q, r, k, SignalModel::Tone, law, rng)
}

pub fn gen_group_signal_with<R: Rng + ?Sized>(
    q: usize,
    r: usize,
    k: usize,
    model: SignalModel,
    law: &AmplitudeLaw,
    rng: &mut R,
) -> Result<SignalInstance<f64>> {
    if k > q {
        return Err(Error::BadK { k, max: q });
    }
    let partition = GroupPartition::new(q * r, r)?;
    let mut groups = sample(rng, q, k).into_vec();
    groups.sort_unstable();
    let mut x = vec![Complex64::new(0.0, 0.0); q * r];
    for g in groups {
        for i in partition.columns_of(g) {
            x[i] = model.coefficient(law, rng);
        }
    }
    SignalInstance::from_grouped_vector(x, partition)
}

/// i.i.d. circular complex Gaussian noise; `σ² = 0` gives exact zeros.
pub fn gen_noise<R: Rng + ?Sized>(n: usize, sigma2: f64, convention: NoiseConvention, rng: &mut R) -> Result<Vec<Complex64>> {
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::Config(format!("sigma2 must be finite and >= 0, got {sigma2}")));
    }
    if sigma2 == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let normal = Normal::new(0.0, convention.component_std(sigma2)).expect("positive finite std");
    Ok((0..n)
        .map(|_| {
            let re = normal.sample(rng);
            Complex64::new(re, normal.sample(rng))
        })
        .collect())
}
