use alloc::vec::Vec;

use crate::dynsys::Interval;
use crate::math::sort_dedup;
use crate::{Error, Result};

/// Graph given by a connected polyline; where the polyline folds back over
/// itself the map is multi-valued.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PiecewiseLinearMap {
    vertices: Vec<(f64, f64)>,
}

impl PiecewiseLinearMap {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument("a polyline needs at least two vertices".into()));
        }
        if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidArgument("polyline vertices must be finite".into()));
        }
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument("consecutive polyline vertices coincide".into()));
            }
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument("vertical polyline segments are not supported".into()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Projection of the graph on the input axis.
    pub fn domain(&self) -> Interval {
        let lo = self.vertices.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let hi = self.vertices.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    /// Slope of segment `k` (between vertices `k` and `k+1`).
    pub fn slope(&self, k: usize) -> f64 {
        let (a, b) = (self.vertices[k], self.vertices[k + 1]);
        (b.1 - a.1) / (b.0 - a.0)
    }

    /// All intersections of the vertical line at `p` with the polyline,
    /// sorted and merged within `tol`.
    pub fn eval(&self, p: f64, tol: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (lo, hi) = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
            if p < lo || p > hi {
                continue;
            }
            let v = if p == a.0 {
                a.1
            } else if p == b.0 {
                b.1
            } else {
                a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
            };
            out.push(v);
        }
        sort_dedup(&mut out, tol);
        out
    }
}

/// The inverted Zorro map (`epsilon = 0`, vertices A, B, C, D) or its
/// perturbation with middle-segment slope `-1 - epsilon` (A, B, E, D).
pub fn make_zorro(epsilon: f64) -> Result<PiecewiseLinearMap> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument("zorro epsilon must be a finite number >= 0".into()));
    }
    let third = if epsilon == 0.0 { (0.25, 0.5) } else { ((1.0 + 2.0 * epsilon) / (4.0 + 4.0 * epsilon), 0.5) };
    PiecewiseLinearMap::new(alloc::vec![(0.0, 0.0), (0.5, 0.25), third, (1.0, 1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::abs;

    #[test]
    fn zorro_values() {
        let f = make_zorro(0.0).unwrap();
        let v = f.eval(0.3, 1e-12);
        assert_eq!(v.len(), 3);
        assert!(abs(v[0] - 0.15) < 1e-15);
        assert!(abs(v[1] - 0.45) < 1e-15);
        assert!(abs(v[2] - 1.6 / 3.0) < 1e-15);
        assert_eq!(f.eval(0.0, 1e-12), alloc::vec![0.0]);
        assert_eq!(f.eval(0.5, 1e-12), alloc::vec![0.25, 2.0 / 3.0]);
        assert_eq!(f.domain(), Interval::new(0.0, 1.0));
    }

    #[test]
    fn perturbed_vertex_and_slope() {
        let f = make_zorro(1.5).unwrap();
        assert_eq!(f.vertices()[2], (0.4, 0.5));
        for eps in [0.0, 0.1, 0.5, 1.5, 3.0] {
            let f = make_zorro(eps).unwrap();
            assert!(abs(f.slope(1) - (-1.0 - eps)) < 1e-14, "eps {eps}");
        }
        assert!(make_zorro(-0.1).is_err());
    }

    #[test]
    fn rejects_degenerate_polylines() {
        assert!(PiecewiseLinearMap::new(alloc::vec![(0.0, 0.0)]).is_err());
        assert!(PiecewiseLinearMap::new(alloc::vec![(0.0, 0.0), (0.0, 0.0)]).is_err());
        assert!(PiecewiseLinearMap::new(alloc::vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }
}
