use alloc::vec::Vec;

use super::map::MultiMap;
use crate::order::OrderCone;
use crate::{Error, Result};

/// Which half of the weak non-decreasing condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum MissingSelection {
    /// No `r_p ∈ F(p)` with `r_p ⪯ k_q`.
    Lower,
    /// No `r_q ∈ F(q)` with `k_p ⪯ r_q`.
    Upper,
}

/// `p ⪯ q` with `k_p ∈ F(p)`, `k_q ∈ F(q)`; the value on the side named by
/// `missing` is the one that has no partner.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrderWitness {
    pub p: f64,
    pub q: f64,
    pub k_p: f64,
    pub k_q: f64,
    pub missing: MissingSelection,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrderCheckReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub witness: Option<OrderWitness>,
}

fn eval_grid(map: &MultiMap, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    grid.iter().map(|p| map.eval(*p)).collect()
}

/// Weak non-decreasingness of `map` on `grid`, with comparisons widened by
/// the map tolerance.
pub fn check_weakly_nondecreasing(
    map: &MultiMap,
    grid: &[f64],
    cone_in: &OrderCone,
    cone_out: &OrderCone,
) -> Result<OrderCheckReport> {
    let values = eval_grid(map, grid)?;
    let slack = map.tol();
    let mut pairs = 0;
    for (i, &p) in grid.iter().enumerate() {
        for (j, &q) in grid.iter().enumerate() {
            if i == j || !cone_in.leq_scalar(p, q)? {
                continue;
            }
            pairs += 1;
            let (fp, fq) = (&values[i], &values[j]);
            for &k_q in fq {
                let mut ok = false;
                for &r in fp {
                    ok |= cone_out.leq_within(&[r], &[k_q], slack)?;
                }
                if !ok {
                    let w = OrderWitness { p, q, k_p: fp[0], k_q, missing: MissingSelection::Lower };
                    return Ok(OrderCheckReport { pass: false, pairs_checked: pairs, witness: Some(w) });
                }
            }
            for &k_p in fp {
                let mut ok = false;
                for &r in fq {
                    ok |= cone_out.leq_within(&[k_p], &[r], slack)?;
                }
                if !ok {
                    let w = OrderWitness { p, q, k_p, k_q: fq[0], missing: MissingSelection::Upper };
                    return Ok(OrderCheckReport { pass: false, pairs_checked: pairs, witness: Some(w) });
                }
            }
        }
    }
    Ok(OrderCheckReport { pass: true, pairs_checked: pairs, witness: None })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AntimonotoneWitness {
    pub p: f64,
    pub q: f64,
    /// Value in `F(p)` for which every `k_q ∈ F(q)` has `(k_p - k_q)(p - q) > 0`.
    pub k_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AntimonotoneReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub witness: Option<AntimonotoneWitness>,
}

/// For all grid pairs `p ≠ q` and every `k_p ∈ F(p)`, some `k_q ∈ F(q)` has
/// `(k_p - k_q)(p - q) <= tol·|p - q|`.
pub fn check_antimonotone(map: &MultiMap, grid: &[f64]) -> Result<AntimonotoneReport> {
    let values = eval_grid(map, grid)?;
    let tol = map.tol();
    let mut pairs = 0;
    for (i, &p) in grid.iter().enumerate() {
        for (j, &q) in grid.iter().enumerate() {
            if p == q {
                continue;
            }
            pairs += 1;
            let d = p - q;
            for &k_p in &values[i] {
                if !values[j].iter().any(|k_q| (k_p - k_q) * d <= tol * d.abs()) {
                    let w = AntimonotoneWitness { p, q, k_p };
                    return Ok(AntimonotoneReport { pass: false, pairs_checked: pairs, witness: Some(w) });
                }
            }
        }
    }
    Ok(AntimonotoneReport { pass: true, pairs_checked: pairs, witness: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "kebab-case"))]
pub enum NoCycles {
    /// The equilibria are totally ordered by `≺≺`, so no two of them form a
    /// cycle of a monotone system.
    Certified,
    /// The ordering argument does not apply; cycles are not ruled out.
    Inconclusive,
}

/// Sufficient no-cycle test for the equilibria of a monotone system under one
/// fixed input.
pub fn check_no_cycles_by_order(equilibria: &[Vec<f64>], cone: &OrderCone) -> NoCycles {
    match cone.is_totally_ordered(equilibria) {
        Ok(true) => NoCycles::Certified,
        _ => NoCycles::Inconclusive,
    }
}
