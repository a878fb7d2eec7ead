//! Orthant ordering cones.
//!
//! A cone is a sign pattern `s ∈ {+1, -1}^n`; it induces `a ⪯ b` iff
//! `s_i (b_i - a_i) >= 0` for every coordinate and the strict order
//! `a ≺≺ b` iff every such difference is strictly positive (the interior of
//! the orthant). Comparisons are exact; callers that need slack widen their
//! arguments.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderCone {
    signs: Vec<Sign>,
}

impl OrderCone {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::MalformedCone(String::new()));
        }
        Ok(Self { signs })
    }

    /// The usual order on ℝ, induced by `[0, ∞)`.
    pub fn standard() -> Self {
        Self { signs: alloc::vec![Sign::Pos] }
    }

    /// The order on ℝ induced by `(-∞, 0]`.
    pub fn opposite() -> Self {
        Self { signs: alloc::vec![Sign::Neg] }
    }

    /// Nonnegative orthant of ℝⁿ.
    pub fn orthant(n: usize) -> Result<Self> {
        Self::new(alloc::vec![Sign::Pos; n])
    }

    /// Parses a sign string such as `"+"`, `"-"` or `"+-+"`.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Pos),
                '-' => Ok(Sign::Neg),
                _ => Err(Error::MalformedCone(s.into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(signs)
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn is_standard_scalar(&self) -> bool {
        self.signs == [Sign::Pos]
    }

    pub fn is_opposite_scalar(&self) -> bool {
        self.signs == [Sign::Neg]
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    /// `a ⪯ b`, i.e. `b - a ∈ K`.
    pub fn leq(&self, a: &[f64], b: &[f64]) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.signs.iter().zip(a.iter().zip(b)).all(|(s, (x, y))| s.value() * (y - x) >= 0.0))
    }

    /// `a ≺≺ b`, i.e. `b - a ∈ int K`.
    pub fn ll(&self, a: &[f64], b: &[f64]) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.signs.iter().zip(a.iter().zip(b)).all(|(s, (x, y))| s.value() * (y - x) > 0.0))
    }

    /// `a ⪯ b` up to `slack`: every `s_i (b_i - a_i) >= -slack`.
    pub fn leq_within(&self, a: &[f64], b: &[f64], slack: f64) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.signs.iter().zip(a.iter().zip(b)).all(|(s, (x, y))| s.value() * (y - x) >= -slack))
    }

    /// Scalar shorthand for [`leq`](Self::leq) on one-dimensional cones.
    pub fn leq_scalar(&self, a: f64, b: f64) -> Result<bool> {
        self.leq(&[a], &[b])
    }

    /// True iff every pair of distinct points is strictly ordered one way
    /// or the other.
    pub fn is_totally_ordered(&self, points: &[Vec<f64>]) -> Result<bool> {
        for p in points {
            self.check(p)?;
        }
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                if p == q {
                    continue;
                }
                if !(self.ll(p, q)? || self.ll(q, p)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for OrderCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for OrderCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn scalar_examples() {
        assert!(OrderCone::standard().leq(&[1.0], &[2.0]).unwrap());
        assert!(OrderCone::opposite().leq(&[1.0], &[0.5]).unwrap());
        assert!(OrderCone::standard().ll(&[0.0], &[1.0]).unwrap());
    }

    #[test]
    fn orthant_examples() {
        let k = OrderCone::orthant(2).unwrap();
        assert!(!k.leq(&[1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(!k.ll(&[0.0, 0.0], &[1.0, 0.0]).unwrap());
        assert!(k.ll(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn total_order_examples() {
        let s = OrderCone::standard();
        assert!(s.is_totally_ordered(&[vec![0.5], vec![2.0]]).unwrap());
        let k = OrderCone::orthant(2).unwrap();
        assert!(k.is_totally_ordered(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap());
        assert!(!k.is_totally_ordered(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
    }

    #[test]
    fn parse_and_errors() {
        assert_eq!(OrderCone::parse("+-").unwrap().signs(), &[Sign::Pos, Sign::Neg]);
        assert_eq!(OrderCone::parse("+-").unwrap().to_string(), "+-");
        assert!(matches!(OrderCone::parse("+x"), Err(Error::MalformedCone(_))));
        assert!(matches!(OrderCone::parse(""), Err(Error::MalformedCone(_))));
        assert!(matches!(
            OrderCone::standard().leq(&[1.0, 2.0], &[1.0]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    fn cone_and_points(n: usize) -> impl Strategy<Value = (Vec<bool>, Vec<f64>, Vec<f64>)> {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(-10.0..10.0f64, n),
            proptest::collection::vec(-10.0..10.0f64, n),
        )
    }

    fn cone_of(bits: &[bool]) -> OrderCone {
        OrderCone::new(bits.iter().map(|&b| if b { Sign::Pos } else { Sign::Neg }).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn cone_is_pointed_convex((bits, a, b) in cone_and_points(3), t in 0.0..5.0f64) {
            let k = cone_of(&bits);
            let zero = vec![0.0; 3];
            let in_k = |v: &[f64]| k.leq(&zero, v).unwrap();
            if in_k(&a) {
                let scaled: Vec<f64> = a.iter().map(|x| t * x).collect();
                prop_assert!(in_k(&scaled));
                if in_k(&b) {
                    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                    prop_assert!(in_k(&sum));
                }
                let neg: Vec<f64> = a.iter().map(|x| -x).collect();
                if in_k(&neg) {
                    prop_assert!(a.iter().all(|x| *x == 0.0));
                }
            }
        }

        #[test]
        fn strict_implies_weak((bits, a, b) in cone_and_points(2)) {
            let k = cone_of(&bits);
            if k.ll(&a, &b).unwrap() {
                prop_assert!(k.leq(&a, &b).unwrap());
            }
        }

        #[test]
        fn boundary_pairs_are_not_strict(a in -5.0..5.0f64, b in -5.0..5.0f64, d in 0.0..5.0f64) {
            let k = OrderCone::orthant(2).unwrap();
            let p = [a, b];
            let q = [a + d, b];
            prop_assert!(k.leq(&p, &q).unwrap());
            prop_assert!(!k.ll(&p, &q).unwrap());
        }

        #[test]
        fn opposite_is_swapped_standard(a in -5.0..5.0f64, b in -5.0..5.0f64) {
            prop_assert_eq!(
                OrderCone::opposite().leq_scalar(a, b).unwrap(),
                OrderCone::standard().leq_scalar(b, a).unwrap()
            );
        }
    }
}
