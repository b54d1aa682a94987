use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Whether a bound includes its constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strictness {
    Strict,
    Weak,
}

/// Largest magnitude a finite weight constant may take.
pub const MAX_CONSTANT: i32 = (1 << 29) - 1;

/// Edge weight of a distance graph: a pair `(strictness, constant)` or the
/// infinite weight `(<, +inf)`.
///
/// Packed as `constant << 1 | weak`, so the derived integer order is exactly
/// the weight order: `(<, c) < (<=, c) < (<, c + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(i32);

impl Weight {
    pub const INFINITY: Weight = Weight(i32::MAX);
    pub const LE_ZERO: Weight = Weight(1);
    pub const LT_ZERO: Weight = Weight(0);

    /// Builds a finite weight.
    ///
    /// # Panics
    /// If `|c|` exceeds [`MAX_CONSTANT`].
    pub fn new(strictness: Strictness, c: i32) -> Self {
        assert!(
            (-MAX_CONSTANT..=MAX_CONSTANT).contains(&c),
            "weight constant {c} out of range"
        );
        Weight((c << 1) | (strictness == Strictness::Weak) as i32)
    }

    pub fn weak(c: i32) -> Self {
        Weight::new(Strictness::Weak, c)
    }

    pub fn strict(c: i32) -> Self {
        Weight::new(Strictness::Strict, c)
    }

    pub fn is_infinite(self) -> bool {
        self == Weight::INFINITY
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    /// The constant, or `None` for the infinite weight.
    pub fn constant(self) -> Option<i32> {
        self.is_finite().then_some(self.0 >> 1)
    }

    pub fn strictness(self) -> Strictness {
        if self.0 & 1 == 1 && self.is_finite() {
            Strictness::Weak
        } else {
            Strictness::Strict
        }
    }

    pub fn is_strict(self) -> bool {
        self.strictness() == Strictness::Strict
    }

    /// Sum of two weights; `None` when the constant leaves the representable range.
    pub fn checked_add(self, other: Weight) -> Option<Weight> {
        if self.is_infinite() || other.is_infinite() {
            return Some(Weight::INFINITY);
        }
        let c = (self.0 >> 1).checked_add(other.0 >> 1)?;
        if !(-MAX_CONSTANT..=MAX_CONSTANT).contains(&c) {
            return None;
        }
        Some(Weight((c << 1) | (self.0 & other.0 & 1)))
    }

    /// Multiplies the constant by `k > 0`, keeping the strictness.
    pub fn scale(self, k: i32) -> Option<Weight> {
        if self.is_infinite() {
            return Some(self);
        }
        let c = (self.0 >> 1).checked_mul(k)?;
        if !(-MAX_CONSTANT..=MAX_CONSTANT).contains(&c) {
            return None;
        }
        Some(Weight((c << 1) | (self.0 & 1)))
    }

    /// The packed representation; exposed for hashing and compact storage.
    pub fn raw(self) -> i32 {
        self.0
    }
}

impl Add for Weight {
    type Output = Weight;

    /// # Panics
    /// On constant overflow.
    fn add(self, other: Weight) -> Weight {
        self.checked_add(other)
            .unwrap_or_else(|| panic!("weight overflow: {self} + {other}"))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant() {
            None => write!(f, "(<,inf)"),
            Some(c) if self.is_strict() => write!(f, "(<,{c})"),
            Some(c) => write!(f, "(<=,{c})"),
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Compares two weights by the `(constant, strictness)` definition rather
/// than the packed encoding. Used to test the encoding against its meaning.
pub fn compare_by_definition(a: Weight, b: Weight) -> Ordering {
    match (a.constant(), b.constant()) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| match (a.is_strict(), b.is_strict()) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => Ordering::Equal,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weight() -> impl Strategy<Value = Weight> {
        prop_oneof![
            1 => Just(Weight::INFINITY),
            8 => (any::<bool>(), -1000i32..1000).prop_map(|(s, c)| if s {
                Weight::strict(c)
            } else {
                Weight::weak(c)
            }),
        ]
    }

    #[test]
    fn order_of_small_weights() {
        assert!(Weight::strict(3) < Weight::weak(3));
        assert!(Weight::weak(3) < Weight::strict(4));
        assert!(Weight::weak(-5) < Weight::LT_ZERO);
        assert!(Weight::LT_ZERO < Weight::LE_ZERO);
        assert!(Weight::weak(MAX_CONSTANT) < Weight::INFINITY);
    }

    #[test]
    fn addition_table() {
        assert_eq!(Weight::weak(2) + Weight::weak(3), Weight::weak(5));
        assert_eq!(Weight::weak(2) + Weight::strict(3), Weight::strict(5));
        assert_eq!(Weight::strict(-2) + Weight::strict(3), Weight::strict(1));
        assert_eq!(Weight::strict(-2) + Weight::INFINITY, Weight::INFINITY);
        assert_eq!(Weight::INFINITY + Weight::INFINITY, Weight::INFINITY);
    }

    #[test]
    fn overflow_is_detected() {
        assert_eq!(Weight::weak(MAX_CONSTANT).checked_add(Weight::weak(1)), None);
        assert_eq!(Weight::weak(-MAX_CONSTANT).checked_add(Weight::weak(-1)), None);
        assert!(std::panic::catch_unwind(|| Weight::weak(MAX_CONSTANT) + Weight::weak(1)).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Weight::weak(-3).to_string(), "(<=,-3)");
        assert_eq!(Weight::strict(0).to_string(), "(<,0)");
        assert_eq!(Weight::INFINITY.to_string(), "(<,inf)");
        assert!(Weight::INFINITY.is_strict());
    }

    proptest! {
        #[test]
        fn packed_order_matches_definition(a in weight(), b in weight()) {
            prop_assert_eq!(a.cmp(&b), compare_by_definition(a, b));
        }

        #[test]
        fn addition_is_commutative_and_associative(a in weight(), b in weight(), c in weight()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
        }

        #[test]
        fn addition_is_monotone(a in weight(), b in weight(), c in weight()) {
            prop_assume!(a <= b);
            prop_assert!(a + c <= b + c);
        }

        #[test]
        fn sum_strictness(a in weight(), b in weight()) {
            let s = a + b;
            if s.is_finite() {
                prop_assert_eq!(s.constant().unwrap(), a.constant().unwrap() + b.constant().unwrap());
                prop_assert_eq!(s.is_strict(), a.is_strict() || b.is_strict());
            }
        }
    }
}
