//! Equilibria of scalar systems by bracketing on a uniform grid, with the
//! extrema of `f(·, u)` located from `∂f/∂x` so that tangential (double)
//! roots at folds are not missed.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynsys::{Interval, SystemDef};
use crate::math::{abs, sort_dedup};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootSearch {
    /// Restricts the search to this box (intersected with the state domain).
    pub search_box: Option<Interval>,
    /// Length used in place of an infinite end of the state domain.
    pub span: f64,
    pub cells: usize,
    /// `|f|` below this at an extremum of `f` counts as a double root.
    pub residual_tol: f64,
    /// Roots closer than this are merged.
    pub dedup_tol: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        Self { search_box: None, span: 20.0, cells: 256, residual_tol: 1e-10, dedup_tol: 1e-7 }
    }
}

impl RootSearch {
    pub fn interval(&self, domain: Interval) -> Interval {
        let d = match self.search_box {
            Some(b) => Interval::new(domain.lo.max(b.lo), domain.hi.min(b.hi)),
            None => domain,
        };
        d.finite_part(self.span)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "kebab-case"))]
pub enum Stability {
    Attracting,
    Repelling,
    /// Attracts from above, repels below.
    SemiStableAbove,
    /// Attracts from below, repels above.
    SemiStableBelow,
}

impl Stability {
    pub fn basin_note(self) -> &'static str {
        match self {
            Stability::Attracting => "two-sided neighbourhood",
            Stability::Repelling => "the equilibrium alone",
            Stability::SemiStableAbove => "one-sided, from above",
            Stability::SemiStableBelow => "one-sided, from below",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumPair {
    pub input: f64,
    pub state: Vec<f64>,
    pub stability: Option<Stability>,
    pub basin_note: String,
}

/// All equilibria of the scalar system `sys` under the constant input `u`.
pub fn equilibria_at_input(sys: &SystemDef, u: f64) -> Result<Vec<EquilibriumPair>> {
    equilibria_with(sys, u, &RootSearch::default())
}

pub fn equilibria_with(sys: &SystemDef, u: f64, cfg: &RootSearch) -> Result<Vec<EquilibriumPair>> {
    Ok(scalar_roots(sys, u, cfg)?
        .into_iter()
        .map(|(x, s)| EquilibriumPair {
            input: u,
            state: vec![x],
            stability: Some(s),
            basin_note: s.basin_note().into(),
        })
        .collect())
}

/// Bisection to machine resolution on a bracket `[a, b]` where `g(a)` has
/// sign `ga` and `g(b)` the opposite sign.
pub(crate) fn bisect(mut a: f64, mut b: f64, ga: f64, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let neg = ga < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == neg {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sorted roots of `f(·, u)` with their stability. Requires a scalar system.
pub fn scalar_roots(sys: &SystemDef, u: f64, cfg: &RootSearch) -> Result<Vec<(f64, Stability)>> {
    if sys.dim() != 1 {
        return Err(Error::UnsupportedDimension { dim: sys.dim() });
    }
    if cfg.cells == 0 {
        return Err(Error::InvalidArgument("root search needs at least one cell".into()));
    }
    let domain = sys.state_domain[0];
    let iv = cfg.interval(domain);
    if !(iv.hi >= iv.lo) {
        return Ok(Vec::new());
    }
    let f = |x: f64| sys.scalar_rhs_dual(x, u).map(|p| p.0);
    let df = |x: f64| sys.scalar_rhs_dual(x, u).map(|p| p.1);

    let n = if iv.hi > iv.lo { cfg.cells } else { 0 };
    let xs: Vec<f64> = (0..=n).map(|i| if i == n { iv.hi } else { iv.lo + iv.width() * i as f64 / n as f64 }).collect();
    let mut fv = Vec::with_capacity(xs.len());
    let mut dv = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (v, d) = sys.scalar_rhs_dual(x, u)?;
        if !v.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite { what: "f(x, u) during root search".into() });
        }
        fv.push(v);
        dv.push(d);
    }

    let mut run = 0;
    for i in 0..xs.len() {
        if abs(fv[i]) <= cfg.residual_tol && abs(dv[i]) <= cfg.residual_tol {
            run += 1;
            if run >= 3 {
                return Err(Error::DegenerateCharacteristic { input: u, lo: xs[i - 2], hi: xs[i] });
            }
        } else {
            run = 0;
        }
    }

    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if fv[i] == 0.0 {
            roots.push(xs[i]);
        } else if dv[i] == 0.0 && abs(fv[i]) <= cfg.residual_tol {
            let left = i == 0 || fv[i - 1] * fv[i] > 0.0;
            let right = i + 1 == xs.len() || fv[i + 1] * fv[i] > 0.0;
            if left && right {
                roots.push(xs[i]);
            }
        }
    }
    for i in 0..n {
        let (a, b) = (xs[i], xs[i + 1]);
        if dv[i] * dv[i + 1] < 0.0 {
            let m = bisect(a, b, dv[i], df)?;
            let fm = f(m)?;
            let mut crossed = false;
            if fm == 0.0 {
                roots.push(m);
                crossed = true;
            }
            if fv[i] * fm < 0.0 {
                roots.push(bisect(a, m, fv[i], f)?);
                crossed = true;
            }
            if fm * fv[i + 1] < 0.0 {
                roots.push(bisect(m, b, fm, f)?);
                crossed = true;
            }
            if !crossed && abs(fm) <= cfg.residual_tol {
                roots.push(m);
            }
        } else if fv[i] * fv[i + 1] < 0.0 {
            roots.push(bisect(a, b, fv[i], f)?);
        }
    }
    sort_dedup(&mut roots, cfg.dedup_tol);

    let mut out = Vec::with_capacity(roots.len());
    for (k, &r) in roots.iter().enumerate() {
        let mut h = 1e-6 * r.abs().max(1.0);
        if k > 0 {
            h = h.min((r - roots[k - 1]) / 4.0);
        }
        if k + 1 < roots.len() {
            h = h.min((roots[k + 1] - r) / 4.0);
        }
        let below = if domain.contains(r - h) { Some(f(r - h)?) } else { None };
        let above = if domain.contains(r + h) { Some(f(r + h)?) } else { None };
        out.push((r, classify(below, above)));
    }
    Ok(out)
}

fn classify(below: Option<f64>, above: Option<f64>) -> Stability {
    let from_below = below.is_some_and(|v| v > 0.0);
    let from_above = above.is_some_and(|v| v < 0.0);
    match (from_below || below.is_none(), from_above || above.is_none()) {
        (true, true) => Stability::Attracting,
        (true, false) => Stability::SemiStableBelow,
        (false, true) => Stability::SemiStableAbove,
        (false, false) => Stability::Repelling,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    fn z_sys() -> SystemDef {
        SystemDef::from_strs("z", &["-(x1*(2*x1^2 - 9*x1 + 12)) + u"], "1/(1+x1^2)").unwrap()
    }

    fn states(u: f64) -> Vec<(f64, Stability)> {
        scalar_roots(&z_sys(), u, &RootSearch::default()).unwrap()
    }

    #[test]
    fn fold_values() {
        let r = states(4.0);
        assert_eq!(r.len(), 2);
        assert!(abs(r[0].0 - 0.5) < 1e-12 && abs(r[1].0 - 2.0) < 1e-9);
        assert_eq!(r[0].1, Stability::Attracting);
        assert_eq!(r[1].1, Stability::SemiStableAbove);
        let r = states(5.0);
        assert_eq!(r.len(), 2);
        assert!(abs(r[0].0 - 1.0) < 1e-9 && abs(r[1].0 - 2.5) < 1e-12);
        assert_eq!(r[0].1, Stability::SemiStableBelow);
        assert_eq!(r[1].1, Stability::Attracting);
    }

    #[test]
    fn three_roots_middle_repelling() {
        let r = states(4.5);
        let s3 = sqrt(3.0);
        let want = [(3.0 - s3) / 2.0, 1.5, (3.0 + s3) / 2.0];
        assert_eq!(r.len(), 3);
        for (got, w) in r.iter().zip(want) {
            assert!(abs(got.0 - w) < 1e-12, "{} vs {w}", got.0);
        }
        let kinds: Vec<_> = r.iter().map(|p| p.1).collect();
        assert_eq!(kinds, [Stability::Attracting, Stability::Repelling, Stability::Attracting]);
    }

    #[test]
    fn boundary_root_at_zero() {
        let r = states(0.0);
        assert_eq!(r, vec![(0.0, Stability::Attracting)]);
    }

    #[test]
    fn near_tangent_input_resolves_three_roots() {
        let r = states(4.0 + 1e-6);
        assert_eq!(r.len(), 3);
        let r = states(5.0 - 1e-6);
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn rejects_vector_systems_and_continua() {
        let two = SystemDef::from_strs("two", &["-x1", "-x2"], "x1").unwrap();
        assert!(matches!(equilibria_at_input(&two, 0.0), Err(Error::UnsupportedDimension { dim: 2 })));
        let flat = SystemDef::from_strs("flat", &["0*x1"], "x1").unwrap();
        assert!(matches!(equilibria_at_input(&flat, 0.0), Err(Error::DegenerateCharacteristic { .. })));
    }

    #[test]
    fn search_box_limits_results() {
        let cfg = RootSearch { search_box: Some(Interval::new(1.0, 3.0)), ..Default::default() };
        let r = scalar_roots(&z_sys(), 4.5, &cfg).unwrap();
        assert_eq!(r.len(), 2);
    }
}
