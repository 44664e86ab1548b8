//! Property tests against independent oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use zerodetect::coherence::{average_coherence, group_coherences, stoc_estimate, worst_case_coherence, ZStrategy};
use zerodetect::detectors::{ost_topk, zd_groth, zd_ost};
use zerodetect::matrices::{build_bernoulli, build_kerdock, KerdockSpec};
use zerodetect::matrix::{normalize_columns, ComplexMatrix, MeasurementMatrix};
use zerodetect::{MeasurementMatrix32, RngSpec, SupportSet};

fn gaussian(n: usize, seed: u64) -> Vec<Complex64> {
    let mut r = RngSpec::new(seed, 17).rng();
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut r);
            Complex64::new(re, StandardNormal.sample(&mut r))
        })
        .collect()
}

fn random_matrix(n: usize, p: usize, seed: u64) -> MeasurementMatrix<f64> {
    let raw = ComplexMatrix::from_row_major(n, p, gaussian(n * p, seed)).unwrap();
    normalize_columns(&raw).unwrap()
}

fn to_dense(m: &ComplexMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn gram_oracle(m: &MeasurementMatrix<f64>) -> (f64, f64) {
    let cols = m.matrix().columns();
    let p = cols.len();
    let mut mu: f64 = 0.0;
    let mut nu: f64 = 0.0;
    for i in 0..p {
        let mut row_sum = Complex64::new(0.0, 0.0);
        for j in 0..p {
            if i == j {
                continue;
            }
            let g: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            mu = mu.max(g.norm());
            row_sum += g;
        }
        nu = nu.max(row_sum.norm() / (p - 1) as f64);
    }
    (mu, nu)
}

fn svd_group_oracle(m: &MeasurementMatrix<f64>, r: usize) -> (f64, f64) {
    let a = to_dense(m.matrix());
    let q = m.cols() / r;
    let block = |g: usize| a.columns(g * r, r).into_owned();
    let spec = |b: &DMatrix<Complex64>| b.clone().svd(false, false).singular_values.max();
    let mut mu: f64 = 0.0;
    let mut nu: f64 = 0.0;
    for i in 0..q {
        let mut sum = DMatrix::<Complex64>::zeros(r, r);
        for j in 0..q {
            if i == j {
                continue;
            }
            let cross = block(i).adjoint() * block(j);
            mu = mu.max(spec(&cross));
            sum += cross;
        }
        nu = nu.max(spec(&sum) / (q - 1) as f64);
    }
    (mu, nu)
}

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..10, 2usize..24, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherences_match_gram_oracle((n, p, seed) in shape()) {
        let m = random_matrix(n, p, seed);
        let (mu, nu) = gram_oracle(&m);
        let got_mu = worst_case_coherence(&m).unwrap();
        prop_assert!((got_mu.value - mu).abs() <= 1e-12);
        let (i, j) = got_mu.pair;
        prop_assert!(i < j);
        let ci = m.matrix().column(i);
        let cj = m.matrix().column(j);
        let g: Complex64 = ci.iter().zip(&cj).map(|(a, b)| a.conj() * b).sum();
        prop_assert!((g.norm() - got_mu.value).abs() <= 1e-12);
        let got_nu = average_coherence(&m).unwrap();
        prop_assert!((got_nu - nu).abs() <= 1e-12);
        // equal when p = 2, up to rounding
        prop_assert!(got_nu <= got_mu.value + 1e-12);
    }

    #[test]
    fn group_coherences_match_svd_oracle(n in 2usize..8, q in 2usize..6, r in 1usize..5, seed in any::<u64>()) {
        let m = random_matrix(n, q * r, seed).with_groups(r).unwrap();
        let (mu, nu) = svd_group_oracle(&m, r);
        let g = group_coherences(&m).unwrap();
        prop_assert!((g.mu_g.value - mu).abs() <= 1e-9, "{} vs {}", g.mu_g.value, mu);
        prop_assert!((g.nu_g - nu).abs() <= 1e-9, "{} vs {}", g.nu_g, nu);
    }

    #[test]
    fn singleton_groups_reduce_to_elements((n, p, seed) in shape()) {
        let m = random_matrix(n, p, seed);
        let g = group_coherences(&m.clone().with_groups(1).unwrap()).unwrap();
        prop_assert!((g.mu_g.value - worst_case_coherence(&m).unwrap().value).abs() <= 1e-10);
        prop_assert!((g.nu_g - average_coherence(&m).unwrap()).abs() <= 1e-10);

        let y = gaussian(n, seed ^ 1);
        let theta = 1 + (seed as usize) % p;
        let a = zd_ost(&y, &m, theta).unwrap();
        let b = zd_groth(&y, &m.with_groups(1).unwrap(), theta).unwrap();
        prop_assert_eq!(a.ranked, b.ranked);
        prop_assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn detection_is_permutation_equivariant((n, p, seed) in shape()) {
        let m = random_matrix(n, p, seed);
        let mut perm: Vec<usize> = (0..p).collect();
        perm.shuffle(&mut RngSpec::new(seed, 3).rng());
        let mp = m.permute_columns(&perm).unwrap();
        let y = gaussian(n, seed ^ 2);
        let theta = 1 + (seed as usize / 7) % p;
        let base = zd_ost(&y, &m, theta).unwrap();
        let permuted = zd_ost(&y, &mp, theta).unwrap();
        let mapped: Vec<usize> = permuted.ranked.iter().map(|&j| perm[j]).collect();
        prop_assert_eq!(mapped, base.ranked);
        let base = ost_topk(&y, &m, theta).unwrap();
        let mapped: Vec<usize> = ost_topk(&y, &mp, theta).unwrap().ranked.iter().map(|&j| perm[j]).collect();
        prop_assert_eq!(mapped, base.ranked);
    }

    #[test]
    fn detection_is_scale_invariant((n, p, seed) in shape(), e in -20i32..20, quarter in 0usize..4) {
        let m = random_matrix(n, p, seed);
        let y = gaussian(n, seed ^ 4);
        let c = Complex64::new(0.0, 1.0).powu(quarter as u32) * 2f64.powi(e);
        let cy: Vec<Complex64> = y.iter().map(|v| v * c).collect();
        let theta = 1 + (seed as usize / 3) % p;
        prop_assert_eq!(zd_ost(&y, &m, theta).unwrap().estimate, zd_ost(&cy, &m, theta).unwrap().estimate);
    }

    #[test]
    fn coherence_is_unitarily_invariant((n, p, seed) in shape()) {
        let m = random_matrix(n, p, seed);
        let g = DMatrix::from_vec(n, n, gaussian(n * n, seed ^ 5));
        let u = g.qr().q();
        let ua = u * to_dense(m.matrix());
        let data: Vec<Complex64> = (0..n).flat_map(|i| (0..p).map(move |j| (i, j))).map(|(i, j)| ua[(i, j)]).collect();
        let um = MeasurementMatrix::new(ComplexMatrix::from_row_major(n, p, data).unwrap()).unwrap();
        let a = worst_case_coherence(&m).unwrap().value;
        let b = worst_case_coherence(&um).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!((average_coherence(&m).unwrap() - average_coherence(&um).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn full_theta_selects_everything((n, p, seed) in shape()) {
        let m = random_matrix(n, p, seed);
        let r = zd_ost(&gaussian(n, seed), &m, p).unwrap();
        prop_assert_eq!(r.estimate, SupportSet::full(p));
    }

    #[test]
    fn support_complement_partitions(p in 1usize..64, seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..p).collect();
        idx.shuffle(&mut RngSpec::new(seed, 0).rng());
        let k = (seed as usize) % (p + 1);
        let s = SupportSet::new(idx[..k].to_vec(), p).unwrap();
        let c = s.complement();
        prop_assert_eq!(s.len() + c.len(), p);
        prop_assert_eq!(s.intersection_len(&c), 0);
        prop_assert_eq!(c.complement(), s);
    }
}

#[test]
fn bernoulli_and_kerdock_satisfy_nu_le_mu() {
    let k: MeasurementMatrix<f64> = build_kerdock(&KerdockSpec::new(3).unwrap()).unwrap();
    assert!(average_coherence(&k).unwrap() <= worst_case_coherence(&k).unwrap().value);
    for seed in 0..5 {
        let b: MeasurementMatrix<f64> = build_bernoulli(16, 256, &RngSpec::new(seed, 0)).unwrap();
        assert!(average_coherence(&b).unwrap() <= worst_case_coherence(&b).unwrap().value);
    }
}

#[test]
fn single_precision_kerdock() {
    let k: MeasurementMatrix32 = build_kerdock(&KerdockSpec::new(3).unwrap()).unwrap();
    assert!((worst_case_coherence(&k).unwrap().value - 0.25).abs() < 1e-6);
    let y: Vec<num_complex::Complex32> = (0..16).map(|i| num_complex::Complex32::new(i as f32, 0.0)).collect();
    assert_eq!(zd_ost(&y, &k, 5).unwrap().estimate.len(), 5);
}

#[test]
fn stoc_estimate_is_reproducible() {
    let k: MeasurementMatrix<f64> = build_kerdock(&KerdockSpec::new(3).unwrap()).unwrap();
    let rng = RngSpec::new(11, 0);
    let z = ZStrategy::GaussianSeeded.make::<f64>(6, &rng);
    let a = stoc_estimate(&k, 6, 0.4, &z, 500, "gaussian-seeded", &rng).unwrap();
    let b = stoc_estimate(&k, 6, 0.4, &z, 500, "gaussian-seeded", &rng).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| stoc_estimate(&k, 6, 0.4, &z, 500, "gaussian-seeded", &rng).unwrap());
    assert_eq!(a, c);
}
