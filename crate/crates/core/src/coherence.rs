//! Coherence statistics of measurement matrices and the empirical StOC estimator.
//!
//! Definitions, for unit-norm columns `a_i` and blocks `A_i` of `r` columns:
//!
//! * worst-case coherence `μ = max_{i≠j} |a_iᴴ a_j|`
//! * average coherence `ν = max_i |Σ_{j≠i} a_iᴴ a_j| / (p − 1)`
//! * worst-case group coherence `μ^g = max_{i≠j} ‖A_iᴴ A_j‖₂`
//! * average group coherence `ν^g = max_i ‖Σ_{j≠i} A_iᴴ A_j‖₂ / (q − 1)`
//!
//! All logarithms are natural logarithms.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_apply, norm2, MeasurementMatrix};
use crate::rng::RngSpec;
use crate::scalar::Real;

pub const POWER_ITERATION_TOL: f64 = 1e-10;
pub const POWER_ITERATION_MAX_ITERS: usize = 10_000;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `aᴴ b`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}

/// A coherence value together with the (zero-based) pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attained<T> {
    pub value: T,
    pub pair: (usize, usize),
}

pub fn worst_case_coherence<T: Real>(m: &MeasurementMatrix<T>) -> Result<Attained<T>> {
    if m.cols() < 2 {
        return Err(Error::SingleColumn);
    }
    let cols = m.matrix().columns();
    let mut best = Attained {
        value: T::neg_infinity(),
        pair: (0, 1),
    };
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let v = inner(&cols[i], &cols[j]).norm();
            if v > best.value {
                best = Attained { value: v, pair: (i, j) };
            }
        }
    }
    Ok(best)
}

/// Uses `Σ_{j≠i} a_iᴴ a_j = a_iᴴ (Σ_j a_j) − ‖a_i‖²`.
pub fn average_coherence<T: Real>(m: &MeasurementMatrix<T>) -> Result<T> {
    let p = m.cols();
    if p < 2 {
        return Err(Error::SingleColumn);
    }
    let a = m.matrix();
    let col_sum: Vec<Complex<T>> = (0..a.rows()).map(|t| a.row(t).iter().fold(czero(), |s, z| s + z)).collect();
    let corr = hermitian_apply(m, &col_sum)?;
    let self_energy = crate::matrix::column_norms(a);
    let worst = corr
        .iter()
        .zip(&self_energy)
        .map(|(c, e)| (c - Complex::new(*e * *e, T::zero())).norm())
        .fold(T::zero(), T::max);
    Ok(worst / T::of((p - 1) as f64))
}

/// Dense `r x c` complex block, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Block<T> {
    fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows)
            .map(|i| inner_plain(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    fn apply_adjoint(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![czero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(&self.data[i * self.cols..(i + 1) * self.cols]) {
                *o += b.conj() * vi;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }
}

fn inner_plain<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x * y)
}

fn power_iterate<T: Real>(b: &Block<T>, start: Vec<Complex<T>>) -> T {
    let tol = T::of(POWER_ITERATION_TOL).max(T::of(16.0) * T::epsilon());
    let mut v = start;
    let mut lambda = T::zero();
    for _ in 0..POWER_ITERATION_MAX_ITERS {
        let w = b.apply(&v);
        let next = w.iter().map(|z| z.norm_sqr()).sum::<T>();
        let u = b.apply_adjoint(&w);
        let un = norm2(&u);
        if un == T::zero() {
            return next.sqrt();
        }
        v = u.into_iter().map(|z| z.unscale(un)).collect();
        let converged = (next - lambda).abs() <= tol * next;
        lambda = next;
        if converged {
            break;
        }
    }
    lambda.sqrt()
}

/// Spectral norm by power iteration on `BᴴB`, started from the normalized all-ones vector.
///
/// A start vector nearly orthogonal to the dominant singular subspace is detected
/// through `‖B‖₂ ≥ ‖B‖_F / √rank`, and the iteration is repeated from a fixed
/// non-symmetric vector.
pub fn spectral_norm<T: Real>(b: &Block<T>) -> T {
    let c = b.cols;
    let ones = vec![Complex::new(T::one() / T::of(c as f64).sqrt(), T::zero()); c];
    let est = power_iterate(b, ones);
    let floor = b.frobenius_norm() / T::of(b.rows.min(b.cols) as f64).sqrt();
    if est >= floor * (T::one() - T::of(1e-6)) {
        return est;
    }
    let alt: Vec<Complex<T>> = (0..c)
        .map(|i| Complex::new(T::of(1.0 + i as f64), T::of(0.5 * (i as f64 + 1.0).sqrt())))
        .collect();
    let n = norm2(&alt);
    let alt = alt.into_iter().map(|z| z.unscale(n)).collect();
    est.max(power_iterate(b, alt))
}

/// `A_iᴴ A_j` for zero-based groups.
pub fn cross_gram<T: Real>(m: &MeasurementMatrix<T>, gi: usize, gj: usize) -> Result<Block<T>> {
    let g = m.groups().ok_or(Error::NoGroups)?;
    let a = m.matrix();
    let (ri, rj) = (g.columns_of(gi), g.columns_of(gj));
    let r = g.group_size();
    let mut data = Vec::with_capacity(r * r);
    for ci in ri {
        for cj in rj.clone() {
            data.push((0..a.rows()).fold(czero(), |s, t| s + a.get(t, ci).conj() * a.get(t, cj)));
        }
    }
    Ok(Block { rows: r, cols: r, data })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupCoherence<T> {
    pub mu_g: Attained<T>,
    pub nu_g: T,
}

pub fn group_coherences<T: Real>(m: &MeasurementMatrix<T>) -> Result<GroupCoherence<T>> {
    let g = *m.groups().ok_or(Error::NoGroups)?;
    let q = g.group_count();
    if q < 2 {
        return Err(Error::NoGroups);
    }
    let r = g.group_size();
    let mut mu_g = Attained {
        value: T::neg_infinity(),
        pair: (0, 1),
    };
    // sums[i] = Σ_{j≠i} A_iᴴ A_j, accumulated from the pair blocks
    let mut sums: Vec<Block<T>> = (0..q)
        .map(|_| Block {
            rows: r,
            cols: r,
            data: vec![czero(); r * r],
        })
        .collect();
    for i in 0..q {
        for j in i + 1..q {
            let b = cross_gram(m, i, j)?;
            let s = spectral_norm(&b);
            if s > mu_g.value {
                mu_g = Attained { value: s, pair: (i, j) };
            }
            // A_jᴴ A_i is the adjoint of A_iᴴ A_j
            for u in 0..r {
                for v in 0..r {
                    let z = b.data[u * r + v];
                    sums[i].data[u * r + v] += z;
                    sums[j].data[v * r + u] += z.conj();
                }
            }
        }
    }
    let nu_g = sums.iter().map(spectral_norm).fold(T::zero(), T::max) / T::of((q - 1) as f64);
    Ok(GroupCoherence { mu_g, nu_g })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceCheck {
    pub holds: bool,
    /// Smallest constant for which the condition holds.
    pub required: f64,
    /// Bound minus statistic; nonnegative when the condition holds.
    pub slack: f64,
}

/// `μ ≤ μ₀ / √(log p)`; `required` is `μ₀* = μ √(log p)`.
pub fn coherence_property_check<T: Real>(m: &MeasurementMatrix<T>, mu0: f64) -> Result<CoherenceCheck> {
    let mu = worst_case_coherence(m)?.value.as_f64();
    let log_p = (m.cols() as f64).ln();
    Ok(CoherenceCheck {
        holds: mu * log_p.sqrt() <= mu0,
        required: mu * log_p.sqrt(),
        slack: mu0 / log_p.sqrt() - mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupCoherenceCheck {
    pub worst_case: CoherenceCheck,
    pub average: CoherenceCheck,
}

/// `μ^g ≤ c_μ / √(log q)` and `ν^g ≤ c_ν μ^g √(r log q / n)`.
pub fn group_coherence_property_check<T: Real>(m: &MeasurementMatrix<T>, c_mu: f64, c_nu: f64) -> Result<GroupCoherenceCheck> {
    let gc = group_coherences(m)?;
    let g = m.groups().ok_or(Error::NoGroups)?;
    let (q, r, n) = (g.group_count() as f64, g.group_size() as f64, m.rows() as f64);
    let log_q = q.ln();
    let mu_g = gc.mu_g.value.as_f64();
    let nu_g = gc.nu_g.as_f64();
    let worst_bound = c_mu / log_q.sqrt();
    let avg_factor = (r * log_q / n).sqrt();
    let avg_bound = c_nu * mu_g * avg_factor;
    Ok(GroupCoherenceCheck {
        worst_case: CoherenceCheck {
            holds: mu_g <= worst_bound,
            required: mu_g * log_q.sqrt(),
            slack: worst_bound - mu_g,
        },
        average: CoherenceCheck {
            holds: nu_g <= avg_bound,
            required: if mu_g * avg_factor > 0.0 { nu_g / (mu_g * avg_factor) } else { 0.0 },
            slack: avg_bound - nu_g,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport<T> {
    pub mu: Attained<T>,
    pub nu: T,
    pub group: Option<GroupCoherence<T>>,
}

pub fn coherence_report<T: Real>(m: &MeasurementMatrix<T>) -> Result<CoherenceReport<T>> {
    let group = match m.groups() {
        Some(g) if g.group_count() >= 2 => Some(group_coherences(m)?),
        _ => None,
    };
    Ok(CoherenceReport {
        mu: worst_case_coherence(m)?,
        nu: average_coherence(m)?,
        group,
    })
}

/// How the probe vector `z` of the StOC inequalities is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZStrategy {
    /// First standard basis vector.
    E1,
    /// All entries `k^{-1/2}`.
    Flat,
    /// Complex Gaussian entries drawn from the run's seed, normalized.
    GaussianSeeded,
}

impl ZStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            ZStrategy::E1 => "e1",
            ZStrategy::Flat => "flat",
            ZStrategy::GaussianSeeded => "gaussian-seeded",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "e1" => Ok(ZStrategy::E1),
            "flat" => Ok(ZStrategy::Flat),
            "gaussian-seeded" | "gaussian" => Ok(ZStrategy::GaussianSeeded),
            _ => Err(Error::Parse(format!("unknown z strategy `{s}`"))),
        }
    }

    pub fn make<T: Real>(&self, k: usize, rng: &RngSpec) -> Vec<Complex<T>> {
        match self {
            ZStrategy::E1 => (0..k)
                .map(|i| if i == 0 { Complex::new(T::one(), T::zero()) } else { czero() })
                .collect(),
            ZStrategy::Flat => vec![Complex::new(T::one() / T::of(k as f64).sqrt(), T::zero()); k],
            ZStrategy::GaussianSeeded => {
                let mut r = rng.derive(&[u64::MAX]).rng();
                let z: Vec<Complex<T>> = (0..k)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut r);
                        let im: f64 = StandardNormal.sample(&mut r);
                        Complex::new(T::of(re), T::of(im))
                    })
                    .collect();
                let n = norm2(&z);
                z.into_iter().map(|v| v.unscale(n)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StocEstimate {
    pub k: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub violations: usize,
    pub delta_hat: f64,
    pub z_strategy: String,
}

/// Largest left-hand sides of the two StOC inequalities for one ordered support `Π`.
pub fn stoc_deviations<T: Real>(m: &MeasurementMatrix<T>, pi: &[usize], z: &[Complex<T>]) -> Result<(T, T)> {
    let a = m.matrix();
    let mut v = vec![czero(); a.rows()];
    for (&col, zl) in pi.iter().zip(z) {
        for (t, vt) in v.iter_mut().enumerate() {
            *vt += a.get(t, col) * zl;
        }
    }
    let u = hermitian_apply(m, &v)?;
    let mut in_pi = vec![false; a.cols()];
    let mut near_isometry = T::zero();
    for (&col, zl) in pi.iter().zip(z) {
        in_pi[col] = true;
        near_isometry = near_isometry.max((u[col] - zl).norm());
    }
    let cross = (0..a.cols())
        .filter(|&c| !in_pi[c])
        .map(|c| u[c].norm())
        .fold(T::zero(), T::max);
    Ok((near_isometry, cross))
}

/// Fraction of uniformly random permutations violating either StOC inequality for the fixed `z`.
///
/// Trial `t` draws its permutation from `rng.derive(&[t])`, so the count does not
/// depend on scheduling.
pub fn stoc_estimate<T: Real>(
    m: &MeasurementMatrix<T>,
    k: usize,
    epsilon: f64,
    z: &[Complex<T>],
    trials: usize,
    strategy_name: &str,
    rng: &RngSpec,
) -> Result<StocEstimate> {
    let p = m.cols();
    if k == 0 || k >= p {
        return Err(Error::BadK { k, max: p - 1 });
    }
    if z.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: z.len() });
    }
    let z_norm = norm2(z);
    if z_norm == T::zero() {
        return Err(Error::ZeroZ);
    }
    if trials == 0 {
        return Err(Error::InvalidSpec("stoc needs at least one trial".into()));
    }
    let bound = T::of(epsilon) * z_norm;
    let violated = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.derive(&[t as u64]).rng();
            let mut perm: Vec<usize> = (0..p).collect();
            let (head, _) = perm.partial_shuffle(&mut r, k);
            let (iso, cross) = stoc_deviations(m, head, z)?;
            Ok(iso > bound || cross > bound)
        })
        .collect::<Result<Vec<bool>>>()?;
    let violations = violated.iter().filter(|&&v| v).count();
    Ok(StocEstimate {
        k,
        epsilon,
        trials,
        violations,
        delta_hat: violations as f64 / trials as f64,
        z_strategy: strategy_name.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn identity(n: usize) -> MeasurementMatrix<f64> {
        MeasurementMatrix::new(ComplexMatrix::identity(n).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_zero_coherence() {
        let i = identity(5);
        assert_eq!(worst_case_coherence(&i).unwrap().value, 0.0);
        assert_eq!(average_coherence(&i).unwrap(), 0.0);
        assert_eq!(coherence_property_check(&i, 1.0).unwrap().required, 0.0);
    }

    #[test]
    fn repeated_columns() {
        let col = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let p = 4;
        let m = ComplexMatrix::from_fn(2, p, |i, _| col[i]).unwrap();
        let m = MeasurementMatrix::new(m).unwrap();
        assert!((worst_case_coherence(&m).unwrap().value - 1.0).abs() < 1e-15);
        assert!((average_coherence(&m).unwrap() - 1.0).abs() < 1e-15);

        let two = MeasurementMatrix::new(ComplexMatrix::from_fn(2, 2, |i, _| col[i]).unwrap()).unwrap();
        let chk = coherence_property_check(&two, 1.0).unwrap();
        assert!((chk.required - 2f64.ln().sqrt()).abs() < 1e-12);
        assert!(chk.holds);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let one = identity(1);
        assert!(matches!(average_coherence(&one), Err(Error::SingleColumn)));
        assert!(matches!(group_coherences(&identity(4)), Err(Error::NoGroups)));
        let q1 = identity(4).with_groups(4).unwrap();
        assert!(matches!(group_coherences(&q1), Err(Error::NoGroups)));
        assert!(group_coherence_property_check(&q1, 1.0, 1.0).is_err());
    }

    #[test]
    fn orthonormal_blocks() {
        let m = identity(6).with_groups(2).unwrap();
        let gc = group_coherences(&m).unwrap();
        assert_eq!(gc.mu_g.value, 0.0);
        assert_eq!(gc.nu_g, 0.0);
        let chk = group_coherence_property_check(&m, 0.5, 0.5).unwrap();
        assert!(chk.worst_case.holds && chk.average.holds);
    }

    #[test]
    fn duplicated_block_has_unit_group_coherence() {
        // A = [I_2, I_2] padded into 3 rows
        let m = ComplexMatrix::from_fn(3, 4, |i, j| if i == j % 2 { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap();
        let m = MeasurementMatrix::new(m).unwrap().with_groups(2).unwrap();
        let gc = group_coherences(&m).unwrap();
        assert!((gc.mu_g.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_escapes_deficient_start() {
        // all-ones start is in the kernel of this block
        let b = Block {
            rows: 2,
            cols: 2,
            data: vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        };
        assert!((spectral_norm(&b) - 2f64.sqrt()).abs() < 1e-9);
        let zero = Block {
            rows: 2,
            cols: 2,
            data: vec![c(0.0, 0.0); 4],
        };
        assert_eq!(spectral_norm(&zero), 0.0);
    }

    #[test]
    fn stoc_rejects_bad_inputs() {
        let m = identity(4);
        let rng = RngSpec::new(1, 0);
        let z = vec![c(1.0, 0.0)];
        assert!(matches!(stoc_estimate(&m, 0, 0.1, &[], 10, "e1", &rng), Err(Error::BadK { .. })));
        assert!(matches!(stoc_estimate(&m, 4, 0.1, &[c(1.0, 0.0); 4], 10, "e1", &rng), Err(Error::BadK { .. })));
        assert!(matches!(stoc_estimate(&m, 1, 0.1, &[c(0.0, 0.0)], 10, "e1", &rng), Err(Error::ZeroZ)));
        assert_eq!(stoc_estimate(&m, 1, 0.0, &z, 50, "e1", &rng).unwrap().delta_hat, 0.0);
    }

    #[test]
    fn z_strategies() {
        let rng = RngSpec::new(3, 0);
        let e1: Vec<Complex<f64>> = ZStrategy::E1.make(3, &rng);
        assert_eq!(e1, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let flat: Vec<Complex<f64>> = ZStrategy::Flat.make(4, &rng);
        assert!(flat.iter().all(|z| (z.re - 0.5).abs() < 1e-15));
        let g1: Vec<Complex<f64>> = ZStrategy::GaussianSeeded.make(5, &rng);
        let g2: Vec<Complex<f64>> = ZStrategy::GaussianSeeded.make(5, &rng);
        assert_eq!(g1, g2);
        assert!((norm2(&g1) - 1.0).abs() < 1e-12);
        assert!(ZStrategy::parse("nope").is_err());
    }
}
