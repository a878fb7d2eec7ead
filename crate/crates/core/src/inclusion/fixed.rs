//! Fixed points `w ∈ F(w)` of a set-valued map on an interval.
//!
//! Between two grid points with the same branch count the `j`-th sorted
//! value is tracked as one branch and its residual `v_j(w) - w` is
//! bracketed and bisected. Brackets where the count changes are rescanned
//! at ten times the resolution; a count change that survives is located by
//! bisection and both sides are treated with one-sided branch values.

use alloc::vec::Vec;

use crate::charmap::{linspace, MultiMap};
use crate::math::{abs, sort_dedup};
use crate::{Error, Result};

/// `min{|v - w| : v ∈ F(w)}`.
pub fn membership_residual(map: &MultiMap, w: f64) -> Result<f64> {
    Ok(map.eval(w)?.iter().map(|v| abs(v - w)).fold(f64::INFINITY, f64::min))
}

struct Scan<'a> {
    map: &'a MultiMap,
    tol: f64,
    found: Vec<f64>,
}

const RESCANS: u32 = 2;

impl Scan<'_> {
    fn push_if_fixed(&mut self, w: f64) -> Result<()> {
        if membership_residual(self.map, w)? < self.tol {
            self.found.push(w);
        }
        Ok(())
    }

    fn cell(&mut self, a: f64, b: f64, fa: &[f64], fb: &[f64], level: u32) -> Result<()> {
        if fa.len() == fb.len() {
            // Equal end counts can hide a short multi-valued stretch.
            let m = 0.5 * (a + b);
            if m > a && m < b {
                let fm = self.map.eval(m)?;
                if fm.len() != fa.len() {
                    if level < RESCANS {
                        return self.rescan(a, b, fa, fb, level);
                    }
                    self.cell(a, m, fa, &fm, level)?;
                    return self.cell(m, b, &fm, fb, level);
                }
            }
            for j in 0..fa.len() {
                let (ra, rb) = (fa[j] - a, fb[j] - b);
                if ra * rb < 0.0 {
                    self.bisect_branch(j, a, b, fa.len(), ra, level)?;
                }
            }
            return Ok(());
        }
        if level < RESCANS {
            return self.rescan(a, b, fa, fb, level);
        }
        // A fold inside `[a, b]`: locate the count jump and continue on both
        // sides with the branch values just next to it.
        let ca = fa.len();
        let (mut lo, mut hi) = (a, b);
        let mut f_lo = fa.to_vec();
        let mut f_hi = fb.to_vec();
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let fm = self.map.eval(m)?;
            if fm.len() == ca {
                lo = m;
                f_lo = fm;
            } else {
                hi = m;
                f_hi = fm;
            }
        }
        self.push_if_fixed(lo)?;
        self.push_if_fixed(hi)?;
        if lo > a {
            self.cell(a, lo, fa, &f_lo, level)?;
        }
        if hi < b {
            self.cell(hi, b, &f_hi, fb, level)?;
        }
        Ok(())
    }

    fn rescan(&mut self, a: f64, b: f64, fa: &[f64], fb: &[f64], level: u32) -> Result<()> {
        let pts = linspace(a, b, 11);
        let mut prev = (a, fa.to_vec());
        for &p in &pts[1..10] {
            let v = self.map.eval(p)?;
            if v.contains(&p) {
                self.found.push(p);
            }
            self.cell(prev.0, p, &prev.1, &v, level + 1)?;
            prev = (p, v);
        }
        self.cell(prev.0, b, &prev.1, fb, level + 1)
    }

    fn bisect_branch(&mut self, j: usize, a: f64, b: f64, count: usize, ra: f64, level: u32) -> Result<()> {
        let (mut lo, mut hi) = (a, b);
        let neg = ra < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let fm = self.map.eval(m)?;
            if fm.len() != count {
                let fa = self.map.eval(a)?;
                let fb = self.map.eval(b)?;
                return self
                    .cell(a, m, &fa, &fm, level.max(RESCANS))
                    .and_then(|_| self.cell(m, b, &fm, &fb, level.max(RESCANS)));
            }
            let r = fm[j] - m;
            if r == 0.0 {
                lo = m;
                hi = m;
                break;
            }
            if (r < 0.0) == neg {
                lo = m;
            } else {
                hi = m;
            }
        }
        let w = if lo == hi { lo } else { 0.5 * (lo + hi) };
        self.push_if_fixed(w)
    }
}

/// All `w ∈ [lo, hi]` with `w ∈ F(w)` up to `tol`, sorted and merged.
pub fn find_fixed_points(map: &MultiMap, lo: f64, hi: f64, grid: usize, tol: f64) -> Result<Vec<f64>> {
    if grid < 2 || !(hi > lo) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("fixed-point search needs grid >= 2, lo < hi and tol > 0".into()));
    }
    let pts = linspace(lo, hi, grid);
    let vals = pts.iter().map(|p| map.eval(*p)).collect::<Result<Vec<_>>>()?;
    let mut scan = Scan { map, tol, found: Vec::new() };
    for (p, v) in pts.iter().zip(&vals) {
        if v.contains(p) {
            scan.found.push(*p);
        }
    }
    for i in 0..grid - 1 {
        scan.cell(pts[i], pts[i + 1], &vals[i], &vals[i + 1], 0)?;
    }
    let mut found = scan.found;
    sort_dedup(&mut found, 10.0 * tol);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inclusion::make_zorro;

    #[test]
    fn zorro_fixed_points() {
        let f = MultiMap::piecewise_linear(make_zorro(0.0).unwrap());
        let fp = find_fixed_points(&f, 0.0, 1.0, 101, 1e-9).unwrap();
        assert_eq!(fp.len(), 3, "{fp:?}");
        assert!(abs(fp[1] - 0.375) < 1e-12);
        let f = MultiMap::piecewise_linear(make_zorro(1.5).unwrap());
        for grid in [11, 64, 101, 1000] {
            let fp = find_fixed_points(&f, 0.0, 1.0, grid, 1e-9).unwrap();
            assert_eq!(fp.len(), 3, "grid {grid}: {fp:?}");
            assert!(abs(fp[0]) < 1e-12 && abs(fp[1] - 3.0 / 7.0) < 1e-12 && abs(fp[2] - 1.0) < 1e-12);
        }
    }

    #[test]
    fn every_result_is_a_member() {
        let f = MultiMap::piecewise_linear(make_zorro(0.7).unwrap());
        for w in find_fixed_points(&f, 0.0, 1.0, 37, 1e-9).unwrap() {
            assert!(membership_residual(&f, w).unwrap() < 1e-9);
        }
    }
}
