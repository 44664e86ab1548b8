//! Index sets and sparse signal realizations.
//!
//! Sets are stored zero-based; `one_based` converts for user-facing output.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::GroupPartition;
use crate::scalar::Real;

/// Sorted, duplicate-free subset of `0..domain_size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
    domain_size: usize,
}

impl SupportSet {
    pub fn new(mut indices: Vec<usize>, domain_size: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSupport("duplicate index".into()));
        }
        if indices.last().is_some_and(|&i| i >= domain_size) {
            return Err(Error::InvalidSupport(format!(
                "index outside domain of size {domain_size}"
            )));
        }
        Ok(Self {
            indices,
            domain_size,
        })
    }

    pub fn from_one_based(indices: &[usize], domain_size: usize) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidSupport("one-based index 0".into()));
        }
        Self::new(indices.iter().map(|i| i - 1).collect(), domain_size)
    }

    pub fn empty(domain_size: usize) -> Self {
        Self {
            indices: Vec::new(),
            domain_size,
        }
    }

    pub fn full(domain_size: usize) -> Self {
        Self {
            indices: (0..domain_size).collect(),
            domain_size,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> Self {
        let mut mask = vec![true; self.domain_size];
        for &i in &self.indices {
            mask[i] = false;
        }
        Self {
            indices: (0..self.domain_size).filter(|&i| mask[i]).collect(),
            domain_size: self.domain_size,
        }
    }

    /// `|self ∩ other|`.
    pub fn intersection_len(&self, other: &SupportSet) -> usize {
        self.indices.iter().filter(|&&i| other.contains(i)).count()
    }

    /// `|self \ other|`.
    pub fn difference_len(&self, other: &SupportSet) -> usize {
        self.len() - self.intersection_len(other)
    }
}

/// Group-level view of a group-structured signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSupport {
    pub partition: GroupPartition,
    /// Groups holding a nonzero block.
    pub active: SupportSet,
    /// Groups whose block is identically zero.
    pub zero: SupportSet,
}

/// Realized sparse signal with its support `I` and zero-support `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalInstance<T: Real> {
    x: Vec<Complex<T>>,
    support: SupportSet,
    zero_support: SupportSet,
    groups: Option<GroupSupport>,
}

impl<T: Real> SignalInstance<T> {
    /// Derives `I` and `E` from the exact zero pattern of `x`.
    pub fn from_vector(x: Vec<Complex<T>>) -> Self {
        let p = x.len();
        let nz: Vec<usize> = (0..p).filter(|&i| !x[i].is_zero()).collect();
        let support = SupportSet { indices: nz, domain_size: p };
        let zero_support = support.complement();
        Self {
            x,
            support,
            zero_support,
            groups: None,
        }
    }

    /// Like `from_vector`, additionally recording which groups are active.
    pub fn from_grouped_vector(x: Vec<Complex<T>>, partition: GroupPartition) -> Result<Self> {
        let q = partition.group_count();
        if q * partition.group_size() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: q * partition.group_size(),
                got: x.len(),
            });
        }
        let mut s = Self::from_vector(x);
        let active: Vec<usize> = (0..q)
            .filter(|&g| partition.columns_of(g).any(|i| !s.x[i].is_zero()))
            .collect();
        let active = SupportSet::new(active, q)?;
        let zero = active.complement();
        s.groups = Some(GroupSupport {
            partition,
            active,
            zero,
        });
        Ok(s)
    }

    pub fn x(&self) -> &[Complex<T>] {
        &self.x
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn zero_support(&self) -> &SupportSet {
        &self.zero_support
    }

    pub fn groups(&self) -> Option<&GroupSupport> {
        self.groups.as_ref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Number of nonzero entries.
    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// Magnitudes of the nonzero entries, largest first.
    pub fn sorted_magnitudes(&self) -> Vec<T> {
        let mut mags: Vec<T> = self.support.indices.iter().map(|&i| self.x[i].norm()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
        mags
    }

    /// Block norms of the active groups, largest first.
    pub fn sorted_group_norms(&self) -> Option<Vec<T>> {
        let g = self.groups.as_ref()?;
        let mut norms: Vec<T> = g
            .active
            .indices
            .iter()
            .map(|&grp| {
                g.partition
                    .columns_of(grp)
                    .map(|i| self.x[i].norm_sqr())
                    .sum::<T>()
                    .sqrt()
            })
            .collect();
        norms.sort_by(|a, b| b.partial_cmp(a).expect("finite norms"));
        Some(norms)
    }
}
