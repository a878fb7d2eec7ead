use alloc::vec::Vec;

use super::map::{linspace, MultiMap};
use crate::math::sort_dedup;
use crate::{Error, Result};

/// Values of a map at one grid input.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BranchSample {
    pub u: f64,
    pub values: Vec<f64>,
}

/// Branch-count structure of a map over an input interval.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Profile {
    /// Maximal runs of constant cardinality as `(lo, hi, count)`; interval
    /// ends are fold locations or the range ends. A count that holds only at
    /// a single input shows up as a (nearly) degenerate interval.
    pub intervals: Vec<(f64, f64, usize)>,
    /// Inputs where the cardinality jumps, localised by bisection.
    pub folds: Vec<f64>,
    pub samples: Vec<BranchSample>,
}

impl Profile {
    /// Cardinality of the run containing `u` (first match at shared ends).
    pub fn count_at(&self, u: f64) -> Option<usize> {
        self.intervals.iter().find(|(lo, hi, _)| *lo <= u && u <= *hi).map(|t| t.2)
    }
}

const FOLD_MERGE: f64 = 1e-7;

pub fn cardinality_profile(map: &MultiMap, u_lo: f64, u_hi: f64, grid: usize) -> Result<Profile> {
    if grid < 2 || !(u_hi > u_lo) {
        return Err(Error::InvalidArgument("profile needs grid >= 2 and u_lo < u_hi".into()));
    }
    let us = linspace(u_lo, u_hi, grid);
    let mut samples = Vec::with_capacity(grid);
    for &u in &us {
        samples.push(BranchSample { u, values: map.eval(u)? });
    }
    let count = |u: f64| map.eval(u).map(|v| v.len());

    let mut intervals = Vec::new();
    let mut folds = Vec::new();
    let mut start = u_lo;
    for i in 0..grid - 1 {
        let (ca, cb) = (samples[i].values.len(), samples[i + 1].values.len());
        if ca == cb {
            continue;
        }
        let (mut a, mut b) = (us[i], us[i + 1]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b || b - a <= 1e-13 * a.abs().max(1.0) {
                break;
            }
            if count(m)? == ca {
                a = m;
            } else {
                b = m;
            }
        }
        let fold = 0.5 * (a + b);
        intervals.push((start, fold, ca));
        folds.push(fold);
        start = fold;
    }
    intervals.push((start, u_hi, samples[grid - 1].values.len()));
    sort_dedup(&mut folds, FOLD_MERGE);
    intervals.retain(|t| t.1 >= t.0);
    Ok(Profile { intervals, folds, samples })
}
