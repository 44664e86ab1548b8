//! Measurement matrix families: deterministic Kerdock frames and random Bernoulli matrices.

use num_complex::Complex;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::galois::GaloisRing;
use crate::matrix::{ComplexMatrix, MeasurementMatrix};
use crate::rng::RngSpec;
use crate::scalar::Real;

/// Largest odd `m` accepted by [`build_kerdock`]; the exhaustive frame check is
/// quadratic in `M²` and a 128 x 16384 frame is already impractical.
pub const MAX_KERDOCK_M: usize = 5;

/// Kerdock frame of `M = 2^(m+1)` rows and `M²` columns, `m` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KerdockSpec {
    m: usize,
}

impl KerdockSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m % 2 == 0 {
            return Err(Error::InvalidSpec(format!("kerdock m must be odd and >= 1, got {m}")));
        }
        if m > MAX_KERDOCK_M {
            return Err(Error::InvalidSpec(format!("kerdock m = {m} exceeds the supported maximum {MAX_KERDOCK_M}")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        1 << (self.m + 1)
    }

    pub fn cols(&self) -> usize {
        self.rows() * self.rows()
    }

    /// Degree of the Galois ring whose Teichmüller set indexes the rows.
    pub fn ring_degree(&self) -> usize {
        self.m + 1
    }

    /// `key=value` pairs for the matrix file header.
    pub fn meta(&self) -> Vec<(String, String)> {
        let ring = GaloisRing::new(self.ring_degree()).expect("supported degree");
        vec![
            ("family".into(), "kerdock".into()),
            ("m".into(), self.m.to_string()),
            ("ring".into(), format!("GR(4,{})", self.ring_degree())),
            ("polynomial".into(), ring.modulus_string()),
            ("binary_polynomial".into(), ring.binary_polynomial_string()),
        ]
    }
}

/// Z4 codewords of the frame: column `λ` holds `Tr(λ·t)` for every Teichmüller `t`.
///
/// Columns follow the lexicographic coefficient order of `λ ∈ GR(4, m+1)`; rows
/// follow `0, 1, ξ, ξ², …`.
pub fn kerdock_codewords(spec: &KerdockSpec) -> Result<Vec<Vec<u8>>> {
    let ring = GaloisRing::new(spec.ring_degree())?;
    let positions = ring.teichmuller_set();
    ring.elements()
        .map(|lambda| {
            positions
                .iter()
                .map(|t| ring.trace(&ring.mul(&lambda, t)?))
                .collect::<Result<Vec<u8>>>()
        })
        .collect()
}

/// `|Σ_t i^(v_t - w_t)|²`, computed exactly over the Gaussian integers.
fn codeword_correlation_sq(v: &[u8], w: &[u8]) -> i64 {
    let mut counts = [0i64; 4];
    for (a, b) in v.iter().zip(w) {
        counts[((a + 4 - b) & 3) as usize] += 1;
    }
    let re = counts[0] - counts[2];
    let im = counts[1] - counts[3];
    re * re + im * im
}

/// Checks that every pair of distinct columns correlates with squared modulus `0` or `M`
/// (in units of the unnormalized ±1, ±i entries) and that duplicates are absent.
fn verify_frame(words: &[Vec<u8>], rows: usize) -> Result<()> {
    let target = rows as i64;
    let mut attained = false;
    for (i, v) in words.iter().enumerate() {
        for (j, w) in words.iter().enumerate().skip(i + 1) {
            match codeword_correlation_sq(v, w) {
                0 => {}
                c if c == target => attained = true,
                c if c == target * target => {
                    return Err(Error::ConstructionCheck(format!("columns {i} and {j} coincide up to phase")))
                }
                c => {
                    return Err(Error::ConstructionCheck(format!(
                        "columns {i} and {j} have squared correlation {c}, expected 0 or {target}"
                    )))
                }
            }
        }
    }
    if !attained {
        return Err(Error::ConstructionCheck("no column pair attains 1/sqrt(M)".into()));
    }
    Ok(())
}

fn quarter_turn<T: Real>(w: u8, scale: T) -> Complex<T> {
    let z = T::zero();
    match w & 3 {
        0 => Complex::new(scale, z),
        1 => Complex::new(z, scale),
        2 => Complex::new(-scale, z),
        _ => Complex::new(z, -scale),
    }
}

/// Kerdock frame with entries `i^{Tr(λt)} / √M`.
///
/// Fails with `ConstructionCheck` unless all pairwise column correlations have
/// modulus exactly `0` or `1/√M`.
pub fn build_kerdock<T: Real>(spec: &KerdockSpec) -> Result<MeasurementMatrix<T>> {
    let words = kerdock_codewords(spec)?;
    let rows = spec.rows();
    verify_frame(&words, rows)?;
    let scale = T::one() / T::of(rows as f64).sqrt();
    let m = ComplexMatrix::from_fn(rows, words.len(), |t, col| quarter_turn(words[col][t], scale))?;
    MeasurementMatrix::new(m)
}

/// Bernoulli matrix with i.i.d. `±1/√n` entries.
///
/// Row-major entry `e` is decided by the low bit of word `e` of the ChaCha stream
/// selected by `rng`, so any entry can be regenerated independently.
pub fn build_bernoulli<T: Real>(n: usize, p: usize, rng: &RngSpec) -> Result<MeasurementMatrix<T>> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidShape(format!("{n}x{p}")));
    }
    let scale = T::one() / T::of(n as f64).sqrt();
    let mut stream = rng.rng();
    let data = (0..n * p)
        .map(|_| {
            let v = if stream.next_u32() & 1 == 0 { scale } else { -scale };
            Complex::new(v, T::zero())
        })
        .collect();
    MeasurementMatrix::new(ComplexMatrix::from_row_major(n, p, data)?)
}

pub fn bernoulli_meta(n: usize, p: usize, rng: &RngSpec) -> Vec<(String, String)> {
    vec![
        ("family".into(), "bernoulli".into()),
        ("rows".into(), n.to_string()),
        ("cols".into(), p.to_string()),
        ("seed".into(), rng.master_seed.to_string()),
        ("stream".into(), rng.stream_id.to_string()),
        ("polynomial".into(), "none".into()),
    ]
}

/// Attaches contiguous groups of `r` columns.
pub fn attach_groups<T: Real>(m: MeasurementMatrix<T>, r: usize) -> Result<MeasurementMatrix<T>> {
    m.with_groups(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::column_norms;

    #[test]
    fn kerdock_spec_validation() {
        assert!(KerdockSpec::new(0).is_err());
        assert!(KerdockSpec::new(2).is_err());
        assert!(KerdockSpec::new(7).is_err());
        let s = KerdockSpec::new(3).unwrap();
        assert_eq!((s.rows(), s.cols()), (16, 256));
    }

    #[test]
    fn kerdock_m3_shape_and_modulus() {
        let a: MeasurementMatrix<f64> = build_kerdock(&KerdockSpec::new(3).unwrap()).unwrap();
        assert_eq!((a.rows(), a.cols()), (16, 256));
        assert!(a.matrix().as_slice().iter().all(|z| (z.norm() - 0.25).abs() < 1e-15));
        assert!(column_norms(a.matrix()).iter().all(|n| (n - 1.0).abs() < 1e-12));
    }

    #[test]
    fn kerdock_m1_is_a_4x16_frame() {
        let a: MeasurementMatrix<f64> = build_kerdock(&KerdockSpec::new(1).unwrap()).unwrap();
        assert_eq!((a.rows(), a.cols()), (4, 16));
    }

    #[test]
    fn kerdock_is_deterministic() {
        let spec = KerdockSpec::new(3).unwrap();
        let a: MeasurementMatrix<f64> = build_kerdock(&spec).unwrap();
        let b: MeasurementMatrix<f64> = build_kerdock(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_check_catches_phase_duplicates() {
        let spec = KerdockSpec::new(1).unwrap();
        let mut words = kerdock_codewords(&spec).unwrap();
        let shifted: Vec<u8> = words[3].iter().map(|w| (w + 1) & 3).collect();
        words.push(shifted);
        assert!(matches!(verify_frame(&words, 4), Err(Error::ConstructionCheck(_))));
    }

    #[test]
    fn bernoulli_entries_and_reproducibility() {
        let one: MeasurementMatrix<f64> = build_bernoulli(1, 1, &RngSpec::new(1, 0)).unwrap();
        assert_eq!(one.matrix().get(0, 0).norm(), 1.0);

        let spec = RngSpec::new(42, 0);
        let a: MeasurementMatrix<f64> = build_bernoulli(16, 256, &spec).unwrap();
        assert!(a.matrix().as_slice().iter().all(|z| (z.re == 0.25 || z.re == -0.25) && z.im == 0.0));
        let b: MeasurementMatrix<f64> = build_bernoulli(16, 256, &spec).unwrap();
        assert_eq!(a, b);
        let c: MeasurementMatrix<f64> = build_bernoulli(16, 256, &RngSpec::new(42, 1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bernoulli_entry_is_addressable_by_word_position() {
        let spec = RngSpec::new(5, 2);
        let a: MeasurementMatrix<f64> = build_bernoulli(4, 8, &spec).unwrap();
        let mut s = spec.rng();
        s.set_word_pos(13);
        let expected = if s.next_u32() & 1 == 0 { 0.5 } else { -0.5 };
        assert_eq!(a.matrix().get(13 / 8, 13 % 8).re, expected);
    }

    #[test]
    fn bernoulli_mean_is_near_zero() {
        let a: MeasurementMatrix<f64> = build_bernoulli(1000, 1000, &RngSpec::new(3, 0)).unwrap();
        let mean: f64 = a.matrix().as_slice().iter().map(|z| z.re * 1000f64.sqrt()).sum::<f64>() / 1e6;
        assert!(mean.abs() < 3e-3, "mean {mean}");
    }

    #[test]
    fn group_attachment() {
        let a: MeasurementMatrix<f64> = build_kerdock(&KerdockSpec::new(3).unwrap()).unwrap();
        let g = attach_groups(a.clone(), 8).unwrap();
        assert_eq!(g.groups().unwrap().group_count(), 32);
        assert_eq!(g.matrix(), a.matrix());
        assert_eq!(attach_groups(a.clone(), 256).unwrap().groups().unwrap().group_count(), 1);
        assert!(matches!(attach_groups(a, 3), Err(Error::IndivisibleGroupSize { .. })));
    }
}
