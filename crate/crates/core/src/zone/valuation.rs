use std::fmt;

use serde::{Deserialize, Serialize};

/// A clock valuation with rational values `nums[x] / denom`.
///
/// `nums[0]` belongs to the reference clock and is always 0.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation {
    denom: i64,
    nums: Vec<i64>,
}

impl Valuation {
    /// # Panics
    /// If `denom <= 0`, `nums` is empty, `nums[0] != 0` or a value is negative.
    pub fn new(denom: i64, nums: Vec<i64>) -> Self {
        assert!(denom > 0, "denominator must be positive");
        assert!(!nums.is_empty() && nums[0] == 0, "reference clock must be 0");
        assert!(nums.iter().all(|&n| n >= 0), "clock values are non-negative");
        Valuation { denom, nums }
    }

    /// Valuation over clocks `1..=k` given in half units: `doubled[i]` is
    /// twice the value of clock `i + 1`.
    pub fn halves(doubled: &[i64]) -> Self {
        let mut nums = Vec::with_capacity(doubled.len() + 1);
        nums.push(0);
        nums.extend_from_slice(doubled);
        Valuation::new(2, nums)
    }

    pub fn integers(values: &[i64]) -> Self {
        let mut nums = Vec::with_capacity(values.len() + 1);
        nums.push(0);
        nums.extend_from_slice(values);
        Valuation::new(1, nums)
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn num(&self, x: usize) -> i64 {
        self.nums[x]
    }

    pub fn nums(&self) -> &[i64] {
        &self.nums
    }

    pub fn dim(&self) -> usize {
        self.nums.len()
    }

    /// `v[R := 0]`.
    pub fn reset(&self, clocks: &[usize]) -> Valuation {
        let mut nums = self.nums.clone();
        for &r in clocks {
            nums[r] = 0;
        }
        Valuation { denom: self.denom, nums }
    }

    /// `v + delta` with `delta = num / self.denom`.
    pub fn delay(&self, num: i64) -> Valuation {
        let mut nums = self.nums.clone();
        for n in nums.iter_mut().skip(1) {
            *n += num;
        }
        Valuation { denom: self.denom, nums }
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.nums[1..]
            .iter()
            .map(|n| if self.denom == 1 { n.to_string() } else { format!("{n}/{}", self.denom) })
            .collect();
        write!(f, "({})", vals.join(", "))
    }
}
