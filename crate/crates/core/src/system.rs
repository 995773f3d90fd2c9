//! System types: ordered lists of factor dimensions.
//!
//! Composite indices use a row-major mixed radix with the leftmost factor
//! most significant. The trivial system is the empty factor list.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemType {
    factors: Vec<usize>,
}

impl SystemType {
    /// Panics on a zero dimension; use [`SystemType::try_new`] for untrusted input.
    pub fn new(factors: Vec<usize>) -> Self {
        Self::try_new(factors).expect("factor dimensions must be at least 1")
    }

    pub fn try_new(factors: Vec<usize>) -> Option<Self> {
        if factors.contains(&0) {
            None
        } else {
            Some(Self { factors })
        }
    }

    pub fn trivial() -> Self {
        Self { factors: Vec::new() }
    }

    pub fn single(dim: usize) -> Self {
        Self::new(vec![dim])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Parallel composition: factor lists concatenate.
    pub fn compose(&self, other: &SystemType) -> SystemType {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SystemType { factors }
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a SystemType>) -> SystemType {
        let factors = parts.into_iter().flat_map(|s| s.factors.iter().copied()).collect();
        SystemType { factors }
    }

    pub fn slice(&self, start: usize, end: usize) -> SystemType {
        SystemType { factors: self.factors[start..end].to_vec() }
    }

    pub fn select(&self, slots: &[usize]) -> SystemType {
        SystemType { factors: slots.iter().map(|&s| self.factors[s]).collect() }
    }

    /// Flat index of a digit tuple.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, &r)| {
            debug_assert!(d < r);
            acc * r + d
        })
    }

    /// Digit tuple of a flat index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, &radix) in self.factors.iter().enumerate().rev() {
            digits[slot] = index % radix;
            index /= radix;
        }
        digits
    }
}

impl From<Vec<usize>> for SystemType {
    fn from(factors: Vec<usize>) -> Self {
        SystemType::new(factors)
    }
}

impl fmt::Display for SystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_has_dim_one() {
        assert_eq!(SystemType::trivial().dim(), 1);
        assert_eq!(SystemType::trivial().compose(&SystemType::single(3)), SystemType::single(3));
    }

    #[test]
    fn leftmost_is_most_significant() {
        let s = SystemType::new(vec![2, 3]);
        assert_eq!(s.index_of(&[1, 0]), 3);
        assert_eq!(s.digits_of(5), vec![1, 2]);
    }

    #[test]
    fn factor_order_matters() {
        assert_ne!(SystemType::new(vec![2, 3]), SystemType::new(vec![3, 2]));
        assert!(SystemType::try_new(vec![2, 0]).is_none());
    }

    proptest! {
        #[test]
        fn mixed_radix_is_a_bijection(factors in prop::collection::vec(1usize..4, 0..5)) {
            let s = SystemType::new(factors);
            for i in 0..s.dim() {
                prop_assert_eq!(s.index_of(&s.digits_of(i)), i);
            }
        }
    }
}
