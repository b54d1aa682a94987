use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// A bound that is either `-inf` or an integer.
///
/// The derived order puts `NegInf` below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bound {
    NegInf,
    Finite(i32),
}

impl Bound {
    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(self) -> Option<i32> {
        match self {
            Bound::Finite(c) => Some(c),
            Bound::NegInf => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::Finite(c) => write!(f, "{c}"),
        }
    }
}

/// Set of clock indices.
pub type ClockSet = FixedBitSet;

/// Per-clock lower and upper bounds. Entry 0 belongs to the reference clock
/// and stays `-inf`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LuBounds {
    lower: Vec<Bound>,
    upper: Vec<Bound>,
}

impl LuBounds {
    /// All bounds `-inf`.
    pub fn new(dim: usize) -> Self {
        LuBounds { lower: vec![Bound::NegInf; dim], upper: vec![Bound::NegInf; dim] }
    }

    pub fn from_vecs(lower: Vec<Bound>, upper: Vec<Bound>) -> Self {
        assert_eq!(lower.len(), upper.len());
        LuBounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, x: usize) -> Bound {
        self.lower[x]
    }

    pub fn upper(&self, x: usize) -> Bound {
        self.upper[x]
    }

    pub fn lowers(&self) -> &[Bound] {
        &self.lower
    }

    pub fn uppers(&self) -> &[Bound] {
        &self.upper
    }

    /// Max-merges `b` into `L(x)`; true when the bound grew.
    pub fn raise_lower(&mut self, x: usize, b: Bound) -> bool {
        debug_assert!(x > 0);
        if b > self.lower[x] {
            self.lower[x] = b;
            true
        } else {
            false
        }
    }

    pub fn raise_upper(&mut self, x: usize, b: Bound) -> bool {
        debug_assert!(x > 0);
        if b > self.upper[x] {
            self.upper[x] = b;
            true
        } else {
            false
        }
    }

    /// Pointwise max with `other`; returns the clocks whose `L` and `U` grew.
    pub fn merge(&mut self, other: &LuBounds) -> (ClockSet, ClockSet) {
        let mut dl = ClockSet::with_capacity(self.dim());
        let mut du = ClockSet::with_capacity(self.dim());
        for x in 1..self.dim() {
            if self.raise_lower(x, other.lower[x]) {
                dl.insert(x);
            }
            if self.raise_upper(x, other.upper[x]) {
                du.insert(x);
            }
        }
        (dl, du)
    }

    /// Replaces the bounds by `other`; returns the clocks that differ.
    pub fn assign(&mut self, other: &LuBounds) -> (ClockSet, ClockSet) {
        let mut dl = ClockSet::with_capacity(self.dim());
        let mut du = ClockSet::with_capacity(self.dim());
        for x in 1..self.dim() {
            if self.lower[x] != other.lower[x] {
                dl.insert(x);
            }
            if self.upper[x] != other.upper[x] {
                du.insert(x);
            }
        }
        self.lower.clone_from(&other.lower);
        self.upper.clone_from(&other.upper);
        (dl, du)
    }

    pub fn clear(&mut self) {
        self.lower.fill(Bound::NegInf);
        self.upper.fill(Bound::NegInf);
    }

    pub fn is_bottom(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|b| *b == Bound::NegInf)
    }

    /// Clocks with a finite `L` and with a finite `U`.
    pub fn active(&self) -> (ClockSet, ClockSet) {
        let mut dl = ClockSet::with_capacity(self.dim());
        let mut du = ClockSet::with_capacity(self.dim());
        for x in 1..self.dim() {
            dl.set(x, self.lower[x].is_finite());
            du.set(x, self.upper[x].is_finite());
        }
        (dl, du)
    }

    /// Pointwise `<=`.
    pub fn le(&self, other: &LuBounds) -> bool {
        self.lower.iter().zip(&other.lower).all(|(a, b)| a <= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a <= b)
    }

    pub fn max_constant(&self) -> Option<i32> {
        self.lower.iter().chain(&self.upper).filter_map(|b| b.finite()).max()
    }
}

impl fmt::Debug for LuBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LuBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Bound]| {
            v.iter()
                .enumerate()
                .skip(1)
                .map(|(x, b)| format!("{x}:{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "L[{}] U[{}]", list(&self.lower), list(&self.upper))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_smallest() {
        assert!(Bound::NegInf < Bound::Finite(-100));
        assert!(Bound::Finite(0) < Bound::Finite(1));
    }

    #[test]
    fn merge_reports_growth() {
        let mut a = LuBounds::new(3);
        a.raise_lower(1, Bound::Finite(4));
        let mut b = LuBounds::new(3);
        b.raise_lower(1, Bound::Finite(2));
        b.raise_upper(2, Bound::Finite(0));
        let (dl, du) = a.merge(&b);
        assert_eq!(dl.ones().collect::<Vec<_>>(), Vec::<usize>::new());
        assert_eq!(du.ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.lower(1), Bound::Finite(4));
        assert!(b.le(&a));
        assert!(!a.le(&b));
    }

    #[test]
    fn assign_and_clear() {
        let mut a = LuBounds::new(3);
        let mut b = LuBounds::new(3);
        b.raise_upper(1, Bound::Finite(7));
        let (dl, du) = a.assign(&b);
        assert_eq!(dl.count_ones(..), 0);
        assert_eq!(du.ones().collect::<Vec<_>>(), vec![1]);
        assert_eq!(a, b);
        a.clear();
        assert!(a.is_bottom());
        assert_eq!(a.to_string(), "L[1:-inf 2:-inf] U[1:-inf 2:-inf]");
    }
}
