use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::interconnection::{box_grid, box_grid_shape, Interconnection};
use crate::charmap::{
    linspace, verify_characteristic, CharacteristicCheckOptions, CharacteristicReport, MultiMap, Verdict,
};
use crate::dynsys::{
    check_monotone_sampled, integrate_field, IntegratorOptions, Interval, MonotoneCheckOptions, MonotoneReport,
};
use crate::exec::Executor;
use crate::inclusion::{classify_grid, find_fixed_points, walk_paths, GridSummary, GridVerdict, PathOptions};
use crate::math::{abs, dist_euclid, sort_dedup};
use crate::{Error, Result};

/// Sample counts, grids, horizons and tolerances used by [`verify_hypotheses`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Budget {
    /// Random pair tests per subsystem. `input_range` and `state_box` are
    /// replaced by the interconnection's ranges.
    pub monotone: MonotoneCheckOptions,
    pub characteristic: CharacteristicCheckOptions,
    /// Constant inputs per subsystem for the characteristic check.
    pub char_inputs: usize,
    /// Initial states per axis for the characteristic check.
    pub char_starts: usize,
    /// Inputs at which `k_x` must have exactly one value.
    pub singleton_grid: usize,
    /// Grid for the sup of `|k_z|`; the check is repeated on `2·n - 1` points.
    pub bound_grid: usize,
    /// Largest relative growth of the sup under refinement still counted as bounded.
    pub bound_refine_tol: f64,
    /// Closed-loop starts per axis of the state box; a single entry applies
    /// to every axis.
    pub sweep_grid: Vec<usize>,
    pub t_final: f64,
    pub escape_radius: f64,
    pub integrator: IntegratorOptions,
    pub path: PathOptions,
    /// Starts per loop map for path classification.
    pub loop_grid: usize,
    /// Path depth for the `k_y`-image route.
    pub image_depth: usize,
    pub fixed_grid: usize,
    pub fixed_tol: f64,
    pub dist_tol: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            monotone: MonotoneCheckOptions::default(),
            characteristic: CharacteristicCheckOptions::default(),
            char_inputs: 7,
            char_starts: 12,
            singleton_grid: 61,
            bound_grid: 61,
            bound_refine_tol: 1e-2,
            sweep_grid: vec![5],
            t_final: 60.0,
            escape_radius: 1e6,
            integrator: IntegratorOptions::with_tol(1e-10, 1e-12),
            path: PathOptions::default(),
            loop_grid: 9,
            image_depth: 8,
            fixed_grid: 401,
            fixed_tol: 1e-9,
            dist_tol: 1e-3,
        }
    }
}

impl Budget {
    /// Per-axis sweep counts for a state space of dimension `dim`.
    pub fn sweep_shape(&self, dim: usize) -> Result<Vec<usize>> {
        match self.sweep_grid.len() {
            1 => Ok(vec![self.sweep_grid[0]; dim]),
            n if n == dim => Ok(self.sweep_grid.clone()),
            n => Err(Error::DimensionMismatch { expected: dim, found: n }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("char_inputs", self.char_inputs),
            ("char_starts", self.char_starts),
            ("singleton_grid", self.singleton_grid),
            ("bound_grid", self.bound_grid),
            ("loop_grid", self.loop_grid),
            ("image_depth", self.image_depth),
            ("fixed_grid", self.fixed_grid),
        ];
        if self.sweep_grid.is_empty() || self.sweep_grid.contains(&0) {
            return Err(Error::InvalidArgument("budget field sweep_grid needs positive entries".into()));
        }
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidArgument(format!("budget field {name} must be positive")));
            }
        }
        let reals = [
            ("bound_refine_tol", self.bound_refine_tol),
            ("t_final", self.t_final),
            ("escape_radius", self.escape_radius),
            ("fixed_tol", self.fixed_tol),
            ("dist_tol", self.dist_tol),
        ];
        for (name, v) in reals {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("budget field {name} must be positive and finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonotonicityCondition {
    pub verdict: Verdict,
    pub subsystem: String,
    /// Sign-pattern problem of the loop, reported with the z-subsystem.
    pub orientation: Option<String>,
    pub report: Option<MonotoneReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SingletonCheck {
    pub grid: usize,
    pub max_count: usize,
    /// First input with a count other than one.
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundednessCheck {
    pub grid: usize,
    pub sup: f64,
    pub sup_refined: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CharacteristicCondition {
    pub verdict: Verdict,
    pub k_x: Option<CharacteristicReport>,
    pub k_x_singleton: Option<SingletonCheck>,
    pub k_z: Option<CharacteristicReport>,
    pub k_z_bounded: Option<BoundednessCheck>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRecord {
    pub x0: Vec<f64>,
    pub terminal: Vec<f64>,
    /// Largest max-norm of the state over the stored steps.
    pub max_norm: f64,
    /// Largest `|x|` (max norm over the x-block) over the stored steps.
    pub max_abs_x: f64,
    /// Integration finished and the state stayed inside the escape radius.
    pub bounded: bool,
    /// `max_abs_x <= |x(0)| + offset + 1e-6` when the interconnection declares an offset.
    pub x_bound_ok: Option<bool>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ImageCheck {
    pub depth: usize,
    pub starts: usize,
    pub paths: usize,
    pub truncated: bool,
    /// Paths that left the map domain before reaching the depth.
    pub short_paths: usize,
    /// Distinct final `k_y` values.
    pub limits: Vec<f64>,
    /// Largest `|y_k - y_depth|` over the second half of each path.
    pub max_tail_spread: f64,
    /// Largest final increment `|y_depth - y_{depth-1}|`.
    pub max_final_step: f64,
    /// Paths whose increments grew somewhere in their second half.
    pub growing_paths: usize,
    /// Smallest `k` after which every path's images stay within `tol` of their final value.
    pub stabilized_by: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LoopCondition {
    pub verdict: Verdict,
    pub sweep: Vec<SweepRecord>,
    pub bounded: bool,
    pub x_bound_ok: Option<bool>,
    /// `"4"` (both loop inclusions converge), `"4'"` (the `k_y`-images
    /// converge), or `None` if neither was established.
    pub route: Option<String>,
    pub w_loop: Option<GridSummary>,
    pub v_loop: Option<GridSummary>,
    pub image_check: Option<ImageCheck>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AttractivePair {
    pub w: f64,
    pub x: f64,
    pub z_set: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceRecord {
    pub x0: Vec<f64>,
    pub terminal: Vec<f64>,
    pub distance: f64,
    /// Index of the nearest pair and the `z̄` member it selected.
    pub selected: Option<(usize, f64)>,
    pub bounded: bool,
    pub max_abs_x: f64,
    pub x_bound_ok: Option<bool>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceReport {
    pub t_final: f64,
    pub dist_tol: f64,
    pub starts: Vec<ConvergenceRecord>,
    pub max_distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VerificationReport {
    pub interconnection: String,
    pub evidence: &'static str,
    pub condition1: MonotonicityCondition,
    pub condition2: MonotonicityCondition,
    pub condition3: CharacteristicCondition,
    pub condition4: LoopCondition,
    pub loop_equilibria: Vec<f64>,
    pub attractive_set: Vec<AttractivePair>,
    pub convergence: Option<ConvergenceReport>,
    pub verdict: Verdict,
    /// First item that kept the verdict from passing.
    pub blocking: Option<String>,
    pub budgets: Budget,
}

fn err_string(e: Error) -> String {
    e.to_string()
}

fn monotonicity(ic: &Interconnection, z_side: bool, budget: &Budget) -> MonotonicityCondition {
    let nx = ic.sys_x.dim();
    let (sys, range, bx) = if z_side {
        (&ic.sys_z, ic.y_range, &ic.state_box[nx..])
    } else {
        (&ic.sys_x, ic.w_range, &ic.state_box[..nx])
    };
    let opts = MonotoneCheckOptions { input_range: range, state_box: Some(bx.to_vec()), ..budget.monotone.clone() };
    let orientation = if z_side { ic.orientation().err() } else { None };
    let (report, error) = match check_monotone_sampled(sys, &opts) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(err_string(e))),
    };
    let verdict = match &report {
        Some(r) => Verdict::from_bool(r.pass && orientation.is_none()),
        None if orientation.is_some() => Verdict::Fail,
        None => Verdict::Inconclusive,
    };
    MonotonicityCondition { verdict, subsystem: sys.name.clone(), orientation, report, error }
}

fn singleton(k_x: &MultiMap, range: Interval, grid: usize) -> Result<SingletonCheck> {
    let mut max_count = 0;
    let mut witness = None;
    for w in linspace(range.lo, range.hi, grid) {
        let n = k_x.eval(w)?.len();
        max_count = max_count.max(n);
        if n != 1 && witness.is_none() {
            witness = Some(w);
        }
    }
    Ok(SingletonCheck { grid, max_count, witness })
}

fn characteristics<E: Executor>(ic: &Interconnection, budget: &Budget, exec: &E) -> CharacteristicCondition {
    let nx = ic.sys_x.dim();
    let mut c = CharacteristicCondition {
        verdict: Verdict::Pass,
        k_x: None,
        k_x_singleton: None,
        k_z: None,
        k_z_bounded: None,
        errors: Vec::new(),
    };
    let x_starts = box_grid(&ic.state_box[..nx], budget.char_starts);
    let z_starts = box_grid(&ic.state_box[nx..], budget.char_starts);
    let w_grid = linspace(ic.w_range.lo, ic.w_range.hi, budget.char_inputs);
    let y_grid = linspace(ic.y_range.lo, ic.y_range.hi, budget.char_inputs);
    match verify_characteristic(&ic.sys_x, &w_grid, &x_starts, &budget.characteristic, exec) {
        Ok(r) => c.k_x = Some(r),
        Err(e) => c.errors.push(format!("k_x: {e}")),
    }
    match verify_characteristic(&ic.sys_z, &y_grid, &z_starts, &budget.characteristic, exec) {
        Ok(r) => c.k_z = Some(r),
        Err(e) => c.errors.push(format!("k_z: {e}")),
    }
    match ic.k_x().and_then(|k| singleton(&k, ic.w_range, budget.singleton_grid)) {
        Ok(s) => c.k_x_singleton = Some(s),
        Err(e) => c.errors.push(format!("k_x singleton check: {e}")),
    }
    let bound = ic.k_z().and_then(|k| {
        let (lo, hi, n) = (ic.y_range.lo, ic.y_range.hi, budget.bound_grid);
        let sup = k.grid_sup(lo, hi, n)?;
        let sup_refined = k.grid_sup(lo, hi, 2 * n - 1)?;
        let stable = sup.is_finite()
            && sup_refined.is_finite()
            && sup_refined <= sup * (1.0 + budget.bound_refine_tol) + budget.fixed_tol;
        Ok(BoundednessCheck { grid: n, sup, sup_refined, stable })
    });
    match bound {
        Ok(b) => c.k_z_bounded = Some(b),
        Err(e) => c.errors.push(format!("k_z boundedness: {e}")),
    }
    let mut v = if c.errors.is_empty() { Verdict::Pass } else { Verdict::Inconclusive };
    for r in [&c.k_x, &c.k_z].into_iter().flatten() {
        v = v.and(r.verdict);
    }
    if let Some(s) = &c.k_x_singleton {
        v = v.and(Verdict::from_bool(s.witness.is_none()));
    }
    if let Some(b) = &c.k_z_bounded {
        v = v.and(Verdict::from_bool(b.stable));
    }
    c.verdict = v;
    c
}

/// Integrates the closed loop from every start and records boundedness.
pub fn sweep<E: Executor>(
    ic: &Interconnection,
    starts: &[Vec<f64>],
    t_final: f64,
    escape_radius: f64,
    integrator: &IntegratorOptions,
    exec: &E,
) -> Vec<SweepRecord> {
    let field = ic.closed_loop();
    let nx = ic.sys_x.dim();
    exec.run(starts.len(), |i| {
        let x0 = &starts[i];
        let x_bound = |max_abs_x: f64| {
            ic.x_bound_offset.map(|off| {
                let x0_norm = x0[..nx].iter().fold(0.0f64, |m, v| m.max(abs(*v)));
                max_abs_x <= x0_norm + off + 1e-6
            })
        };
        match integrate_field(&field, x0, t_final, integrator, &[]) {
            Ok((_, states)) => {
                let mut max_norm: f64 = 0.0;
                let mut max_abs_x: f64 = 0.0;
                for s in &states {
                    for (j, v) in s.iter().enumerate() {
                        max_norm = max_norm.max(abs(*v));
                        if j < nx {
                            max_abs_x = max_abs_x.max(abs(*v));
                        }
                    }
                }
                let bounded = max_norm.is_finite() && max_norm < escape_radius;
                let note = (!bounded).then(|| String::from("left the escape radius"));
                let terminal = states.last().cloned().unwrap_or_default();
                SweepRecord {
                    x0: x0.clone(),
                    terminal,
                    max_norm,
                    max_abs_x,
                    bounded,
                    x_bound_ok: x_bound(max_abs_x),
                    note,
                }
            }
            Err(e) => SweepRecord {
                x0: x0.clone(),
                terminal: Vec::new(),
                max_norm: f64::INFINITY,
                max_abs_x: f64::INFINITY,
                bounded: false,
                x_bound_ok: x_bound(f64::INFINITY),
                note: Some(err_string(e)),
            },
        }
    })
}

/// Enumerates every `w`-path of length `depth` and checks that the images
/// `y_k = k_y(w_k)` settle: on every path the increments `|y_{k+1} - y_k|`
/// do not grow over the second half and the last one is below `opts.tol`.
pub fn image_check(
    w_loop: &MultiMap,
    k_y: &MultiMap,
    starts: &[f64],
    depth: usize,
    opts: &PathOptions,
) -> Result<ImageCheck> {
    let popts = PathOptions { depth, prune: false, ..*opts };
    let tol = opts.tol;
    let mut cache: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    let mut out = ImageCheck {
        depth,
        starts: starts.len(),
        paths: 0,
        truncated: false,
        short_paths: 0,
        limits: Vec::new(),
        max_tail_spread: 0.0,
        max_final_step: 0.0,
        growing_paths: 0,
        stabilized_by: 0,
        verdict: Verdict::Pass,
    };
    let mut failure: Option<Error> = None;
    for &w0 in starts {
        let mut paths = Vec::new();
        out.truncated |= walk_paths(w_loop, w0, &popts, &mut |p| paths.push(p.values))?;
        for values in paths {
            out.paths += 1;
            if values.len() <= depth {
                out.short_paths += 1;
                continue;
            }
            let mut ys = Vec::with_capacity(values.len());
            for w in &values {
                let imgs = match cache.get(&w.to_bits()) {
                    Some(v) => v.clone(),
                    None => {
                        let v = k_y.eval(*w)?;
                        cache.insert(w.to_bits(), v.clone());
                        v
                    }
                };
                if imgs.len() != 1 {
                    failure
                        .get_or_insert(Error::HypothesisViolation(format!("k_y has {} values at w = {w}", imgs.len())));
                    break;
                }
                ys.push(imgs[0]);
            }
            if ys.len() != values.len() {
                continue;
            }
            let last = ys[depth];
            let settled = (0..=depth).rev().take_while(|k| abs(ys[*k] - last) <= tol).last().unwrap_or(depth);
            out.stabilized_by = out.stabilized_by.max(settled);
            let spread = ys[depth / 2..].iter().fold(0.0f64, |m, y| m.max(abs(y - last)));
            out.max_tail_spread = out.max_tail_spread.max(spread);
            let steps: Vec<f64> = ys.windows(2).map(|p| abs(p[1] - p[0])).collect();
            out.max_final_step = out.max_final_step.max(steps[depth - 1]);
            if steps[depth / 2..].windows(2).any(|d| d[1] > d[0] + tol) {
                out.growing_paths += 1;
            }
            out.limits.push(last);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    sort_dedup(&mut out.limits, 1e3 * tol);
    out.verdict = if out.truncated || out.short_paths > 0 || out.paths == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(out.max_final_step <= tol && out.growing_paths == 0)
    };
    Ok(out)
}

fn loop_condition<E: Executor>(
    ic: &Interconnection,
    budget: &Budget,
    records: Vec<SweepRecord>,
    exec: &E,
) -> LoopCondition {
    let bounded = records.iter().all(|r| r.bounded);
    let x_bound_ok = ic.x_bound_offset.map(|_| records.iter().all(|r| r.x_bound_ok == Some(true)));
    let mut c = LoopCondition {
        verdict: Verdict::Inconclusive,
        sweep: records,
        bounded,
        x_bound_ok,
        route: None,
        w_loop: None,
        v_loop: None,
        image_check: None,
        errors: Vec::new(),
    };
    let w_grid = linspace(ic.w_range.lo, ic.w_range.hi, budget.loop_grid);
    let y_grid = linspace(ic.y_range.lo, ic.y_range.hi, budget.loop_grid);
    match ic.w_loop().and_then(|m| classify_grid(&m, &w_grid, &budget.path, exec)) {
        Ok(g) => c.w_loop = Some(g),
        Err(e) => c.errors.push(format!("k_w∘k_y paths: {e}")),
    }
    match ic.v_loop().and_then(|m| classify_grid(&m, &y_grid, &budget.path, exec)) {
        Ok(g) => c.v_loop = Some(g),
        Err(e) => c.errors.push(format!("k_y∘k_w paths: {e}")),
    }
    let converges = |g: &Option<GridSummary>| g.as_ref().is_some_and(|g| g.verdict == GridVerdict::AllConverge);
    let mut inclusion = Verdict::Inconclusive;
    if converges(&c.w_loop) && converges(&c.v_loop) {
        c.route = Some("4".into());
        inclusion = Verdict::Pass;
    } else {
        let check = ic.w_loop().and_then(|m| image_check(&m, &ic.k_y()?, &w_grid, budget.image_depth, &budget.path));
        match check {
            Ok(r) => {
                if r.verdict == Verdict::Pass {
                    c.route = Some("4'".into());
                }
                inclusion = r.verdict;
                c.image_check = Some(r);
            }
            Err(e) => c.errors.push(format!("k_y images: {e}")),
        }
    }
    c.verdict = Verdict::from_bool(bounded && x_bound_ok != Some(false)).and(inclusion);
    c
}

/// `E(k_w∘k_y) ∩ [lo, hi]`.
pub fn loop_equilibria(ic: &Interconnection, lo: f64, hi: f64, grid: usize, tol: f64) -> Result<Vec<f64>> {
    find_fixed_points(&ic.w_loop()?, lo, hi, grid, tol)
}

/// `{(k_x(w̄), (k_z∘k_y)(w̄)) : w̄ ∈ equilibria}`.
pub fn attractive_set(ic: &Interconnection, equilibria: &[f64]) -> Result<Vec<AttractivePair>> {
    let (k_x, k_y, k_z) = (ic.k_x()?, ic.k_y()?, ic.k_z()?);
    let mut out = Vec::with_capacity(equilibria.len());
    for &w in equilibria {
        let xs = k_x.eval(w)?;
        if xs.len() != 1 {
            return Err(Error::HypothesisViolation(format!("k_x({w}) has {} values, expected one", xs.len())));
        }
        let mut z_set = Vec::new();
        for y in k_y.eval(w)? {
            z_set.extend(k_z.eval(y)?);
        }
        sort_dedup(&mut z_set, k_z.tol());
        out.push(AttractivePair { w, x: xs[0], z_set });
    }
    Ok(out)
}

fn measure(records: &[SweepRecord], set: &[AttractivePair], t_final: f64, dist_tol: f64) -> ConvergenceReport {
    let mut starts = Vec::with_capacity(records.len());
    let mut max_distance: f64 = 0.0;
    let mut pass = !set.is_empty();
    for r in records {
        let mut best = (f64::INFINITY, None);
        if !r.terminal.is_empty() {
            for (i, p) in set.iter().enumerate() {
                for &z in &p.z_set {
                    let d = dist_euclid(&r.terminal, &[p.x, z]);
                    if d < best.0 {
                        best = (d, Some((i, z)));
                    }
                }
            }
        }
        max_distance = max_distance.max(best.0);
        pass &= r.bounded && best.0 < dist_tol;
        starts.push(ConvergenceRecord {
            x0: r.x0.clone(),
            terminal: r.terminal.clone(),
            distance: best.0,
            selected: best.1,
            bounded: r.bounded,
            max_abs_x: r.max_abs_x,
            x_bound_ok: r.x_bound_ok,
            note: r.note.clone(),
        });
    }
    ConvergenceReport { t_final, dist_tol, starts, max_distance, pass }
}

/// Integrates the closed loop from every start and measures the terminal
/// distance to the nearest `(x̄, z̄)` of `set`.
pub fn validate_convergence<E: Executor>(
    ic: &Interconnection,
    set: &[AttractivePair],
    starts: &[Vec<f64>],
    t_final: f64,
    dist_tol: f64,
    integrator: &IntegratorOptions,
    exec: &E,
) -> Result<ConvergenceReport> {
    if ic.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: ic.dim() });
    }
    if starts.iter().any(|s| s.len() != 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: starts.iter().map(Vec::len).find(|l| *l != 2).unwrap_or(0),
        });
    }
    let records = sweep(ic, starts, t_final, f64::INFINITY, integrator, exec);
    Ok(measure(&records, set, t_final, dist_tol))
}

/// Sampled check of the four hypotheses, followed by the attractive set and
/// its validation on the same closed-loop sweep.
pub fn verify_hypotheses<E: Executor>(ic: &Interconnection, budget: &Budget, exec: &E) -> Result<VerificationReport> {
    ic.validate()?;
    budget.validate()?;
    let condition1 = monotonicity(ic, false, budget);
    let condition2 = monotonicity(ic, true, budget);
    let condition3 = characteristics(ic, budget, exec);
    let starts = box_grid_shape(&ic.state_box, &budget.sweep_shape(ic.dim())?);
    let records = sweep(ic, &starts, budget.t_final, budget.escape_radius, &budget.integrator, exec);
    let condition4 = loop_condition(ic, budget, records, exec);

    let mut blocking: Option<String> = None;
    let mut verdict = Verdict::Pass;
    let items: [(Verdict, String); 4] = [
        (condition1.verdict, describe_mono("condition1", &condition1)),
        (condition2.verdict, describe_mono("condition2", &condition2)),
        (condition3.verdict, describe_char(&condition3)),
        (condition4.verdict, describe_loop(&condition4)),
    ];
    for (v, why) in items {
        if v != Verdict::Pass && (blocking.is_none() || (v == Verdict::Fail && verdict != Verdict::Fail)) {
            blocking = Some(why);
        }
        verdict = verdict.and(v);
    }

    let mut loop_eqs = Vec::new();
    let mut set = Vec::new();
    let mut convergence = None;
    if condition3.k_x_singleton.as_ref().is_some_and(|s| s.witness.is_none()) {
        let found = loop_equilibria(ic, ic.w_range.lo, ic.w_range.hi, budget.fixed_grid, budget.fixed_tol)
            .and_then(|e| attractive_set(ic, &e).map(|s| (e, s)));
        match found {
            Ok((e, s)) => {
                loop_eqs = e;
                set = s;
            }
            Err(e) => {
                verdict = verdict.and(Verdict::Inconclusive);
                blocking.get_or_insert(format!("attractive set: {e}"));
            }
        }
    }
    if ic.dim() == 2 && !set.is_empty() {
        let r = measure(&condition4.sweep, &set, budget.t_final, budget.dist_tol);
        if verdict == Verdict::Pass && !r.pass {
            verdict = Verdict::Fail;
            blocking =
                Some(format!("convergence: max terminal distance {:e} >= {:e}", r.max_distance, budget.dist_tol));
        }
        convergence = Some(r);
    }

    Ok(VerificationReport {
        interconnection: ic.name.clone(),
        evidence: "sampled",
        condition1,
        condition2,
        condition3,
        condition4,
        loop_equilibria: loop_eqs,
        attractive_set: set,
        convergence,
        verdict,
        blocking,
        budgets: budget.clone(),
    })
}

fn describe_mono(label: &str, c: &MonotonicityCondition) -> String {
    if let Some(o) = &c.orientation {
        return format!("{label}: {o}");
    }
    if let Some(w) = c.report.as_ref().and_then(|r| r.witness.as_ref()) {
        return format!("{label}: {} is not monotone ({:?} at t = {})", c.subsystem, w.kind, w.t);
    }
    match &c.error {
        Some(e) => format!("{label}: {e}"),
        None => format!("{label}: {}", c.subsystem),
    }
}

fn describe_char(c: &CharacteristicCondition) -> String {
    if let Some(w) = c.k_x_singleton.as_ref().and_then(|s| s.witness) {
        return format!("condition3: k_x is not singleton-valued at w = {w}");
    }
    if c.k_z_bounded.as_ref().is_some_and(|b| !b.stable) {
        return "condition3: sup of k_z is not stable under refinement".into();
    }
    for (name, r) in [("k_x", &c.k_x), ("k_z", &c.k_z)] {
        if let Some(r) = r.as_ref().filter(|r| r.verdict != Verdict::Pass) {
            return format!("condition3: characteristic check for {name} is {:?}", r.verdict);
        }
    }
    match c.errors.first() {
        Some(e) => format!("condition3: {e}"),
        None => "condition3".into(),
    }
}

fn describe_loop(c: &LoopCondition) -> String {
    if !c.bounded {
        return "condition4: a closed-loop trajectory was not bounded".into();
    }
    if c.x_bound_ok == Some(false) {
        return "condition4: the declared bound on |x(t)| was exceeded".into();
    }
    if let Some(e) = c.errors.first() {
        return format!("condition4: {e}");
    }
    match &c.image_check {
        Some(r) => format!("condition4: neither loop inclusion converges and the k_y-images are {:?}", r.verdict),
        None => "condition4".into(),
    }
}
