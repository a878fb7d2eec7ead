use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::roots::{scalar_roots, RootSearch};
use crate::dynsys::{Expr, Interval, SystemDef};
use crate::inclusion::PiecewiseLinearMap;
use crate::math::sort_dedup;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum MapKind {
    /// Equilibria of a scalar system as a function of the constant input.
    Characteristic {
        sys: Arc<SystemDef>,
        search: RootSearch,
    },
    PiecewiseLinear(PiecewiseLinearMap),
    /// `p ↦ ∪{outer(v) : v ∈ inner(p)}`.
    Composition {
        outer: Box<MultiMap>,
        inner: Box<MultiMap>,
    },
    /// Singleton map `p ↦ {e(p)}`; the argument is bound to both `x1` and `u`.
    ClosedForm(Expr),
}

/// A set-valued map `F: D ⇉ ℝ` on a closed interval `D`.
#[derive(Debug, Clone)]
pub struct MultiMap {
    name: String,
    kind: MapKind,
    domain: Interval,
    tol: f64,
}

impl MultiMap {
    /// `k_x` of a scalar system on the input interval `domain`.
    pub fn characteristic(sys: SystemDef, domain: Interval) -> Result<Self> {
        Self::characteristic_with(sys, domain, RootSearch::default())
    }

    pub fn characteristic_with(sys: SystemDef, domain: Interval, search: RootSearch) -> Result<Self> {
        if sys.dim() != 1 {
            return Err(Error::UnsupportedDimension { dim: sys.dim() });
        }
        check_domain(domain)?;
        let name = format!("k[{}]", sys.name);
        Ok(Self { name, tol: search.dedup_tol, kind: MapKind::Characteristic { sys: Arc::new(sys), search }, domain })
    }

    /// `k_y = h ∘ k_x`.
    pub fn io_characteristic(sys: SystemDef, domain: Interval) -> Result<Self> {
        let name = format!("h∘k[{}]", sys.name);
        let h = Self::closed_form(sys.output.clone(), Interval::REAL)?;
        Ok(compose_maps(h, Self::characteristic(sys, domain)?).named(&name))
    }

    pub fn piecewise_linear(map: PiecewiseLinearMap) -> Self {
        let domain = map.domain();
        Self { name: "pwl".into(), kind: MapKind::PiecewiseLinear(map), domain, tol: 1e-12 }
    }

    pub fn closed_form(expr: Expr, domain: Interval) -> Result<Self> {
        if expr.state_arity() > 1 {
            return Err(Error::UnknownVariable { name: format!("x{}", expr.state_arity()), dim: 1 });
        }
        check_domain(domain)?;
        Ok(Self { name: format!("{expr}"), kind: MapKind::ClosedForm(expr), domain, tol: 1e-12 })
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        check_domain(domain)?;
        self.domain = domain;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The polyline behind a piecewise-linear map.
    pub fn as_polyline(&self) -> Option<&PiecewiseLinearMap> {
        match &self.kind {
            MapKind::PiecewiseLinear(m) => Some(m),
            _ => None,
        }
    }

    /// The sorted, deduplicated, non-empty value set `F(p)`.
    pub fn eval(&self, p: f64) -> Result<Vec<f64>> {
        if !p.is_finite() {
            return Err(Error::NonFinite { what: "map argument".into() });
        }
        let slack = self.tol.max(1e-12 * p.abs().max(1.0));
        let (lo, hi) = (self.domain.lo, self.domain.hi);
        if p < lo - slack || p > hi + slack {
            return Err(Error::OutOfDomain { value: p, lo, hi });
        }
        let p = p.clamp(lo, hi);
        let mut values = match &self.kind {
            MapKind::Characteristic { sys, search } => scalar_roots(sys, p, search)?.into_iter().map(|r| r.0).collect(),
            MapKind::PiecewiseLinear(m) => m.eval(p, self.tol),
            MapKind::ClosedForm(e) => alloc::vec![e.eval(&[p], p)?],
            MapKind::Composition { outer, inner } => {
                let mut acc = Vec::new();
                for v in inner.eval(p)? {
                    acc.extend(outer.eval(v)?);
                }
                acc
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "map value".into() });
        }
        sort_dedup(&mut values, self.tol);
        if values.is_empty() {
            return Err(Error::HypothesisViolation(format!("{} has no value at {p}", self.name)));
        }
        Ok(values)
    }

    /// Largest `|v|` over `v ∈ F(p)` for `p` on a uniform grid of `grid`
    /// points in `[lo, hi]`.
    pub fn grid_sup(&self, lo: f64, hi: f64, grid: usize) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for p in linspace(lo, hi, grid) {
            for v in self.eval(p)? {
                sup = sup.max(v.abs());
            }
        }
        Ok(sup)
    }
}

fn check_domain(d: Interval) -> Result<()> {
    if d.lo.is_nan() || d.hi.is_nan() || d.lo > d.hi {
        return Err(Error::InvalidArgument(format!("empty map domain {}..{}", d.lo, d.hi)));
    }
    Ok(())
}

/// `outer ∘ inner`. The inner range is checked against the outer domain at
/// evaluation time.
pub fn compose_maps(outer: MultiMap, inner: MultiMap) -> MultiMap {
    let name = format!("{}∘{}", outer.name, inner.name);
    let tol = outer.tol.max(inner.tol);
    let domain = inner.domain;
    MultiMap { name, kind: MapKind::Composition { outer: Box::new(outer), inner: Box::new(inner) }, domain, tol }
}

/// `n` equally spaced points from `lo` to `hi` inclusive (`n = 1` gives `lo`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}
