//! One-step zero detectors (ZD-OST, ZD-GroTh) and the OST top-k baseline.
//!
//! Every detector correlates the measurements with the columns, `s = Aᴴ y`, and
//! ranks the resulting scores. Ties are broken by the smaller index.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_apply, GroupPartition, MeasurementMatrix};
use crate::scalar::Real;
use crate::support::SupportSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Element,
    Group,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult<T> {
    /// Selected indices (elements or groups), sorted ascending.
    pub estimate: SupportSet,
    /// Selected indices in rank order.
    pub ranked: Vec<usize>,
    /// `|s_i|` per element or `‖A_iᴴ y‖₂` per group.
    pub scores: Vec<T>,
    pub theta: usize,
    pub mode: Mode,
}

/// `|s_j|`, computed as `sqrt(|s_j|²)` so that singleton groups score identically.
pub fn element_scores<T: Real>(corr: &[Complex<T>]) -> Vec<T> {
    corr.iter().map(|z| z.norm_sqr().sqrt()).collect()
}

/// `‖A_iᴴ y‖₂` per group, from the full correlation vector.
pub fn group_scores<T: Real>(corr: &[Complex<T>], groups: &GroupPartition) -> Vec<T> {
    (0..groups.group_count())
        .map(|g| groups.columns_of(g).map(|j| corr[j].norm_sqr()).sum::<T>().sqrt())
        .collect()
}

fn check_theta(theta: usize, max: usize) -> Result<()> {
    if theta == 0 || theta > max {
        return Err(Error::ThetaOutOfRange { theta, max });
    }
    Ok(())
}

fn rank<T: Real>(scores: &[T], theta: usize, descending: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let by_score = |a: &usize, b: &usize| -> Ordering {
        let c = scores[*a].partial_cmp(&scores[*b]).unwrap_or(Ordering::Equal);
        let c = if descending { c.reverse() } else { c };
        c.then(a.cmp(b))
    };
    if theta < order.len() {
        order.select_nth_unstable_by(theta, by_score);
        order.truncate(theta);
    }
    order.sort_by(by_score);
    order
}

/// Indices of the `theta` smallest scores (ascending score, then ascending index).
pub fn select_lowest<T: Real>(scores: Vec<T>, theta: usize, mode: Mode) -> Result<DetectionResult<T>> {
    check_theta(theta, scores.len())?;
    Ok(finish(rank(&scores, theta, false), scores, theta, mode))
}

/// Indices of the `theta` largest scores (descending score, then ascending index).
pub fn select_highest<T: Real>(scores: Vec<T>, theta: usize, mode: Mode) -> Result<DetectionResult<T>> {
    check_theta(theta, scores.len())?;
    Ok(finish(rank(&scores, theta, true), scores, theta, mode))
}

fn finish<T: Real>(ranked: Vec<usize>, scores: Vec<T>, theta: usize, mode: Mode) -> DetectionResult<T> {
    let domain = scores.len();
    DetectionResult {
        estimate: SupportSet::new(ranked.clone(), domain).expect("ranked indices are distinct and in range"),
        ranked,
        scores,
        theta,
        mode,
    }
}

/// ZD-OST: declare the `theta` least correlated columns zero.
pub fn zd_ost<T: Real>(y: &[Complex<T>], m: &MeasurementMatrix<T>, theta: usize) -> Result<DetectionResult<T>> {
    check_theta(theta, m.cols())?;
    let corr = hermitian_apply(m, y)?;
    select_lowest(element_scores(&corr), theta, Mode::Element)
}

/// ZD-GroTh: declare the `theta` groups with smallest `‖A_iᴴ y‖₂` zero.
pub fn zd_groth<T: Real>(y: &[Complex<T>], m: &MeasurementMatrix<T>, theta: usize) -> Result<DetectionResult<T>> {
    let groups = *m.groups().ok_or(Error::NoGroups)?;
    check_theta(theta, groups.group_count())?;
    let corr = hermitian_apply(m, y)?;
    select_lowest(group_scores(&corr, &groups), theta, Mode::Group)
}

/// One-step thresholding baseline: the `theta` most correlated columns.
pub fn ost_topk<T: Real>(y: &[Complex<T>], m: &MeasurementMatrix<T>, theta: usize) -> Result<DetectionResult<T>> {
    check_theta(theta, m.cols())?;
    let corr = hermitian_apply(m, y)?;
    select_highest(element_scores(&corr), theta, Mode::Element)
}
