use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::charmap::MultiMap;
use crate::exec::Executor;
use crate::math::{abs, sort_dedup};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PathOptions {
    pub depth: usize,
    /// Maximum number of paths reported per start before the enumeration is
    /// cut off and flagged as truncated.
    pub branch_cap: usize,
    pub tol: f64,
    /// Consecutive increments below `tol` needed to call a path converged.
    pub converge_run: usize,
    pub max_period: usize,
    /// `|w_k|` above this classifies a path as divergent.
    pub escape_radius: f64,
    /// Stop extending a path as soon as it is classified.
    pub prune: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            depth: 200,
            branch_cap: 10_000,
            tol: 1e-9,
            converge_run: 5,
            max_period: 8,
            escape_radius: 1e6,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(tag = "kind", rename_all = "snake_case"))]
pub enum PathClass {
    Converged {
        limit: f64,
    },
    Periodic {
        period: usize,
        orbit: Vec<f64>,
    },
    /// `|w_k|` left the escape radius at step `step`.
    Divergent {
        step: usize,
    },
    Undetermined {
        note: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InclusionPath {
    pub values: Vec<f64>,
    /// `branches[k]` is the index of `values[k+1]` in the sorted `F(values[k])`.
    pub branches: Vec<usize>,
    pub class: PathClass,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PathSet {
    pub start: f64,
    pub paths: Vec<InclusionPath>,
    pub truncated: bool,
}

/// Sorted successor set `F(w)` merged within `tol`.
pub fn successors(map: &MultiMap, w: f64, tol: f64) -> Result<Vec<f64>> {
    let mut v = map.eval(w)?;
    sort_dedup(&mut v, tol);
    Ok(v)
}

/// Successor sets keyed by the exact bit pattern of the argument.
pub struct Memo<'a> {
    map: &'a MultiMap,
    tol: f64,
    cache: BTreeMap<u64, Vec<f64>>,
}

impl<'a> Memo<'a> {
    pub fn new(map: &'a MultiMap, tol: f64) -> Self {
        Self { map, tol, cache: BTreeMap::new() }
    }

    pub fn get(&mut self, w: f64) -> Result<&[f64]> {
        let key = w.to_bits();
        if !self.cache.contains_key(&key) {
            let v = successors(self.map, w, self.tol)?;
            self.cache.insert(key, v);
        }
        Ok(&self.cache[&key])
    }
}

fn classify(values: &[f64], memo: &mut Memo<'_>, o: &PathOptions) -> Result<Option<PathClass>> {
    let k = values.len() - 1;
    let last = values[k];
    if !(abs(last) <= o.escape_radius) {
        return Ok(Some(PathClass::Divergent { step: k }));
    }
    let inc = |i: usize, p: usize| abs(values[i] - values[i - p]);
    let still = k >= 1 && inc(k, 1) < o.tol;
    if still && k >= o.converge_run && (0..o.converge_run).all(|i| inc(k - i, 1) < o.tol) {
        match memo.get(last) {
            Ok(next) => {
                if next.iter().any(|v| abs(v - last) <= 10.0 * o.tol) {
                    return Ok(Some(PathClass::Converged { limit: last }));
                }
            }
            Err(Error::OutOfDomain { .. } | Error::HypothesisViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if still {
        return Ok(None);
    }
    for p in 2..=o.max_period {
        if k + 1 < 2 * p {
            break;
        }
        if (0..p).all(|i| inc(k - i, p) < o.tol) {
            let orbit = values[k + 1 - p..].to_vec();
            return Ok(Some(PathClass::Periodic { period: p, orbit }));
        }
    }
    Ok(None)
}

struct Walker<'m, 'v, V: FnMut(InclusionPath)> {
    memo: Memo<'m>,
    opts: PathOptions,
    visit: &'v mut V,
    emitted: usize,
    truncated: bool,
}

impl<V: FnMut(InclusionPath)> Walker<'_, '_, V> {
    fn emit(&mut self, values: &[f64], branches: &[usize], class: PathClass) {
        if self.emitted >= self.opts.branch_cap {
            self.truncated = true;
            return;
        }
        self.emitted += 1;
        (self.visit)(InclusionPath { values: values.to_vec(), branches: branches.to_vec(), class });
    }

    fn rec(&mut self, values: &mut Vec<f64>, branches: &mut Vec<usize>) -> Result<()> {
        if self.truncated {
            return Ok(());
        }
        let at_end = values.len() > self.opts.depth;
        if self.opts.prune || at_end {
            if let Some(class) = classify(values, &mut self.memo, &self.opts)? {
                self.emit(values, branches, class);
                return Ok(());
            }
        }
        if at_end {
            self.emit(values, branches, PathClass::Undetermined { note: None });
            return Ok(());
        }
        let w = *values.last().unwrap_or(&f64::NAN);
        let next = match self.memo.get(w) {
            Ok(v) => v.to_vec(),
            Err(e @ (Error::OutOfDomain { .. } | Error::HypothesisViolation(_))) => {
                let note = Some(format!("left the map domain: {e}"));
                self.emit(values, branches, PathClass::Undetermined { note });
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        for (b, v) in next.into_iter().enumerate() {
            values.push(v);
            branches.push(b);
            self.rec(values, branches)?;
            values.pop();
            branches.pop();
            if self.truncated {
                break;
            }
        }
        Ok(())
    }
}

/// Depth-first enumeration of all selections from `w0`, handing each
/// finished path to `visit` in lexicographic order of its selection trace.
/// Returns whether the enumeration was truncated.
pub fn walk_paths(map: &MultiMap, w0: f64, opts: &PathOptions, visit: &mut impl FnMut(InclusionPath)) -> Result<bool> {
    if opts.depth == 0 || opts.branch_cap == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("path enumeration needs depth >= 1, branch_cap >= 1, tol > 0".into()));
    }
    let mut w = Walker { memo: Memo::new(map, opts.tol), opts: *opts, visit, emitted: 0, truncated: false };
    let mut values = alloc::vec![w0];
    let mut branches = Vec::new();
    w.rec(&mut values, &mut branches)?;
    Ok(w.truncated)
}

pub fn iterate_paths(map: &MultiMap, w0: f64, opts: &PathOptions) -> Result<PathSet> {
    let mut paths = Vec::new();
    let truncated = walk_paths(map, w0, opts, &mut |p| paths.push(p))?;
    Ok(PathSet { start: w0, paths, truncated })
}

/// True iff every consecutive pair satisfies `w_{k+1} ∈ F(w_k)` within `tol`.
pub fn replay(map: &MultiMap, path: &InclusionPath, tol: f64) -> Result<bool> {
    for w in path.values.windows(2) {
        if !map.eval(w[0])?.iter().any(|v| abs(v - w[1]) <= tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "kebab-case"))]
pub enum GridVerdict {
    AllConverge,
    PeriodicFound,
    DivergentFound,
    Truncated,
    /// Some path was neither converged, periodic nor divergent within the
    /// depth budget.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StartSummary {
    pub start: f64,
    pub paths: usize,
    pub converged: usize,
    pub periodic: usize,
    pub divergent: usize,
    pub undetermined: usize,
    pub truncated: bool,
    /// Distinct limits of converged paths.
    pub limits: Vec<f64>,
    /// Distinct periods of periodic paths.
    pub periods: Vec<usize>,
    /// First periodic orbit found, if any.
    pub orbit: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridSummary {
    pub verdict: GridVerdict,
    pub starts: Vec<StartSummary>,
    pub options: PathOptions,
    /// How "divergent" is decided.
    pub divergence_rule: String,
}

fn summarize(map: &MultiMap, w0: f64, opts: &PathOptions) -> Result<StartSummary> {
    let mut s = StartSummary {
        start: w0,
        paths: 0,
        converged: 0,
        periodic: 0,
        divergent: 0,
        undetermined: 0,
        truncated: false,
        limits: Vec::new(),
        periods: Vec::new(),
        orbit: None,
    };
    s.truncated = walk_paths(map, w0, opts, &mut |p| {
        s.paths += 1;
        match p.class {
            PathClass::Converged { limit } => {
                s.converged += 1;
                s.limits.push(limit);
            }
            PathClass::Periodic { period, orbit } => {
                s.periodic += 1;
                s.periods.push(period);
                s.orbit.get_or_insert(orbit);
            }
            PathClass::Divergent { .. } => s.divergent += 1,
            PathClass::Undetermined { .. } => s.undetermined += 1,
        }
    })?;
    sort_dedup(&mut s.limits, 1e3 * opts.tol);
    s.periods.sort_unstable();
    s.periods.dedup();
    Ok(s)
}

/// Enumerates paths from every start and aggregates a global verdict.
pub fn classify_grid<E: Executor>(map: &MultiMap, grid: &[f64], opts: &PathOptions, exec: &E) -> Result<GridSummary> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("classify_grid needs at least one start".into()));
    }
    let starts = exec.run(grid.len(), |i| summarize(map, grid[i], opts)).into_iter().collect::<Result<Vec<_>>>()?;
    let any = |f: fn(&StartSummary) -> bool| starts.iter().any(f);
    let verdict = if any(|s| s.periodic > 0) {
        GridVerdict::PeriodicFound
    } else if any(|s| s.divergent > 0) {
        GridVerdict::DivergentFound
    } else if any(|s| s.truncated) {
        GridVerdict::Truncated
    } else if any(|s| s.undetermined > 0) {
        GridVerdict::Inconclusive
    } else {
        GridVerdict::AllConverge
    };
    let divergence_rule = format!("|w_k| > {:e}", opts.escape_radius);
    Ok(GridSummary { verdict, starts, options: *opts, divergence_rule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charmap::linspace;
    use crate::exec::Sequential;
    use crate::inclusion::make_zorro;

    fn zorro(eps: f64) -> MultiMap {
        MultiMap::piecewise_linear(make_zorro(eps).unwrap())
    }

    #[test]
    fn successor_sets() {
        assert_eq!(successors(&zorro(0.0), 0.5, 1e-9).unwrap(), alloc::vec![0.25, 2.0 / 3.0]);
        let s = successors(&zorro(0.0), 0.375, 1e-9).unwrap();
        assert_eq!(s.len(), 3);
        assert!(abs(s[0] - 0.1875) < 1e-15 && abs(s[1] - 0.375) < 1e-15 && abs(s[2] - 7.0 / 12.0) < 1e-15);
        assert!(successors(&zorro(0.0), 1.5, 1e-9).is_err());
    }

    #[test]
    fn zorro_period_two_orbit() {
        let opts = PathOptions { depth: 40, ..Default::default() };
        let set = iterate_paths(&zorro(0.0), 0.3, &opts).unwrap();
        assert!(!set.truncated);
        let p = set
            .paths
            .iter()
            .find(|p| matches!(&p.class, PathClass::Periodic { period: 2, .. }))
            .expect("period-2 path");
        if let PathClass::Periodic { orbit, .. } = &p.class {
            let mut o = orbit.clone();
            o.sort_by(f64::total_cmp);
            assert!(abs(o[0] - 0.3) < 1e-12 && abs(o[1] - 0.45) < 1e-12);
        }
        assert!(set.paths.iter().all(|p| replay(&zorro(0.0), p, 1e-9).unwrap()));
    }

    #[test]
    fn perturbed_zorro_converges_from_045() {
        let opts = PathOptions { depth: 60, ..Default::default() };
        let set = iterate_paths(&zorro(1.5), 0.45, &opts).unwrap();
        let first = &set.paths[0];
        assert!(abs(first.values[1] - 0.225) < 1e-15 && abs(first.values[2] - 0.1125) < 1e-15);
        let mid_then_low = set.paths.iter().find(|p| p.branches.first() == Some(&1)).unwrap();
        assert!(abs(mid_then_low.values[1] - 0.375) < 1e-15);
        assert!(abs(mid_then_low.values[2] - 0.1875) < 1e-15);
        assert_eq!(mid_then_low.class, PathClass::Converged { limit: *mid_then_low.values.last().unwrap() });
    }

    #[test]
    fn grid_verdicts_for_zorro() {
        let grid = linspace(0.0, 1.0, 11);
        let s = classify_grid(&zorro(0.0), &grid, &PathOptions::default(), &Sequential).unwrap();
        assert_eq!(s.verdict, GridVerdict::PeriodicFound);
        for st in &s.starts {
            let inside = (0.25..=0.5).contains(&st.start);
            assert_eq!(st.periodic > 0, inside, "start {}", st.start);
            if inside {
                assert_eq!(st.periods, [2]);
            }
        }
        let s = classify_grid(&zorro(1.5), &grid, &PathOptions::default(), &Sequential).unwrap();
        assert_eq!(s.verdict, GridVerdict::AllConverge, "{:?}", s.starts);
    }

    #[test]
    fn escape_is_divergent_and_cap_truncates() {
        let dbl = MultiMap::closed_form(crate::dynsys::Expr::parse("2*x1", 1).unwrap(), crate::dynsys::Interval::REAL)
            .unwrap();
        let set = iterate_paths(&dbl, 1.0, &PathOptions::default()).unwrap();
        assert_eq!(set.paths[0].class, PathClass::Divergent { step: 20 });
        let opts = PathOptions { branch_cap: 3, ..Default::default() };
        let set = iterate_paths(&zorro(0.0), 0.3, &opts).unwrap();
        assert!(set.truncated);
        assert_eq!(set.paths.len(), 3);
    }
}
