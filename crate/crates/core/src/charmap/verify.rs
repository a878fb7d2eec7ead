//! Sampled verification of the four defining properties of an input-state
//! characteristic: equilibria match the computed values, every sampled start
//! converges to one of them, each is statically Lyapunov stable on its
//! empirical basin, and they are isolated with no cycles.
//!
//! Scalar systems get their equilibria from root finding. For vector systems
//! they are the clusters of settled ω-limit estimates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::checks::{check_no_cycles_by_order, NoCycles};
use super::roots::{equilibria_with, EquilibriumPair, RootSearch};
use crate::dynsys::{classify_terminal, constant_input_run, IntegratorOptions, SystemDef};
use crate::exec::Executor;
use crate::math::{abs, dist_inf};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates Inconclusive, which dominates Pass.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    pub input: f64,
    pub point: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConditionResult {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl ConditionResult {
    fn collect(witnesses: Vec<Witness>, inconclusive: bool) -> Self {
        let verdict = if !witnesses.is_empty() {
            Verdict::Fail
        } else if inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        Self { verdict, witnesses }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LyapunovRecord {
    pub state: Vec<f64>,
    pub eps: f64,
    /// Largest tested radius whose in-basin starts stayed within `eps`.
    pub delta: Option<f64>,
    /// Number of tested starts that belonged to the basin.
    pub basin_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InputReport {
    pub input: f64,
    pub equilibria: Vec<EquilibriumPair>,
    pub starts: usize,
    pub unsettled: Vec<Vec<f64>>,
    pub lyapunov: Vec<LyapunovRecord>,
    pub min_separation: Option<f64>,
    pub no_cycles: NoCycles,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CharacteristicReport {
    pub evidence: &'static str,
    pub inputs: Vec<InputReport>,
    pub condition1: ConditionResult,
    pub condition2: ConditionResult,
    pub condition3: ConditionResult,
    pub condition4: ConditionResult,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CharacteristicCheckOptions {
    pub t_final: f64,
    /// Settling, coverage and residual tolerance.
    pub tol: f64,
    pub integrator: IntegratorOptions,
    pub lyapunov_eps: Vec<f64>,
    /// `δ` is searched over `eps · 2^-k` for `k = 0..=delta_halvings`.
    pub delta_halvings: u32,
    pub roots: RootSearch,
}

impl Default for CharacteristicCheckOptions {
    fn default() -> Self {
        Self {
            t_final: 50.0,
            tol: 1e-6,
            integrator: IntegratorOptions::with_tol(1e-10, 1e-12),
            lyapunov_eps: vec![0.1, 0.05, 0.01],
            delta_halvings: 8,
            roots: RootSearch::default(),
        }
    }
}

/// Where a run from one start ended up.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Fate {
    Equilibrium(usize),
    Unsettled,
}

struct Run {
    fate: Fate,
    /// Max-norm excursion from the equilibrium it converged to.
    excursion: f64,
}

struct Ctx<'a> {
    sys: &'a SystemDef,
    u: f64,
    opts: &'a CharacteristicCheckOptions,
}

impl Ctx<'_> {
    fn run(&self, x0: &[f64], eqs: &[Vec<f64>]) -> Result<(Run, Vec<f64>)> {
        let o = self.opts;
        let (times, states) = constant_input_run(self.sys, x0, self.u, o.t_final, &o.integrator)?;
        let omega = classify_terminal(self.sys, self.u, o.t_final, o.tol, &times, &states)?;
        let terminal = omega.terminal().to_vec();
        let mut fate = Fate::Unsettled;
        if omega.settled().is_some() {
            if let Some(k) = nearest(eqs, &terminal, o.tol) {
                fate = Fate::Equilibrium(k);
            }
        } else if self.sys.dim() == 1 {
            fate = self.monotone_approach(&states, eqs)?;
        }
        let excursion = match fate {
            Fate::Equilibrium(k) => states.iter().map(|x| dist_inf(x, &eqs[k])).fold(0.0, f64::max),
            Fate::Unsettled => f64::INFINITY,
        };
        Ok((Run { fate, excursion }, terminal))
    }

    /// A scalar trajectory that is still moving but monotonically heads for
    /// the next equilibrium in the direction of `f` (slow approach to a
    /// semi-stable point) is attributed to that equilibrium.
    fn monotone_approach(&self, states: &[Vec<f64>], eqs: &[Vec<f64>]) -> Result<Fate> {
        let term = states.last().map(|x| x[0]).unwrap_or(f64::NAN);
        let mut f = [0.0];
        self.sys.eval_rhs(&[term], self.u, &mut f)?;
        let s = f[0];
        if s == 0.0 || !term.is_finite() {
            return Ok(Fate::Unsettled);
        }
        let monotone = states.windows(2).all(|w| (w[1][0] - w[0][0]) * s >= -1e-12);
        if !monotone {
            return Ok(Fate::Unsettled);
        }
        let tol = self.opts.tol;
        let target = eqs
            .iter()
            .enumerate()
            .filter(|(_, e)| if s > 0.0 { e[0] >= term - tol } else { e[0] <= term + tol })
            .min_by(|a, b| abs(a.1[0] - term).total_cmp(&abs(b.1[0] - term)));
        Ok(target.map_or(Fate::Unsettled, |(k, _)| Fate::Equilibrium(k)))
    }
}

fn nearest(eqs: &[Vec<f64>], x: &[f64], tol: f64) -> Option<usize> {
    eqs.iter()
        .enumerate()
        .map(|(k, e)| (k, dist_inf(e, x)))
        .filter(|(_, d)| *d < tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
}

/// Merges settled terminal states into cluster centres.
fn cluster(points: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    let mut centres: Vec<(Vec<f64>, usize)> = Vec::new();
    for p in points {
        match centres.iter_mut().find(|(c, _)| dist_inf(c, p) < radius) {
            Some((c, n)) => {
                for (ci, pi) in c.iter_mut().zip(p) {
                    *ci += (pi - *ci) / (*n + 1) as f64;
                }
                *n += 1;
            }
            None => centres.push((p.clone(), 1)),
        }
    }
    let mut out: Vec<Vec<f64>> = centres.into_iter().map(|c| c.0).collect();
    out.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
    });
    out
}

fn check_input(
    sys: &SystemDef,
    u: f64,
    x0_grid: &[Vec<f64>],
    opts: &CharacteristicCheckOptions,
) -> Result<(InputReport, [Vec<Witness>; 4])> {
    let ctx = Ctx { sys, u, opts };
    let n = sys.dim();
    let mut w: [Vec<Witness>; 4] = Default::default();
    let witness = |point: &[f64], note: String| Witness { input: u, point: point.to_vec(), note };

    let scalar = n == 1;
    let mut equilibria: Vec<EquilibriumPair>;
    if scalar {
        equilibria = equilibria_with(sys, u, &opts.roots)?;
        let mut f = [0.0];
        for e in &equilibria {
            sys.eval_rhs(&e.state, u, &mut f)?;
            if abs(f[0]) >= opts.tol {
                w[0].push(witness(&e.state, format!("residual {:e}", f[0])));
            }
        }
    } else {
        let mut settled = Vec::new();
        for x0 in x0_grid {
            let (times, states) = constant_input_run(sys, x0, u, opts.t_final, &opts.integrator)?;
            let om = classify_terminal(sys, u, opts.t_final, opts.tol, &times, &states)?;
            if let Some(p) = om.settled() {
                settled.push(p.to_vec());
            }
        }
        equilibria = cluster(&settled, 100.0 * opts.tol)
            .into_iter()
            .map(|s| EquilibriumPair { input: u, state: s, stability: None, basin_note: "empirical".into() })
            .collect();
        let mut f = vec![0.0; n];
        for e in &equilibria {
            sys.eval_rhs(&e.state, u, &mut f)?;
            if f.iter().any(|v| abs(*v) >= opts.tol) {
                w[0].push(witness(&e.state, "cluster centre is not an equilibrium".into()));
            }
        }
    }
    let eqs: Vec<Vec<f64>> = equilibria.iter().map(|e| e.state.clone()).collect();

    let mut unsettled = Vec::new();
    for x0 in x0_grid {
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
        }
        let (run, terminal) = ctx.run(x0, &eqs)?;
        if run.fate == Fate::Unsettled {
            unsettled.push(x0.clone());
            w[1].push(witness(x0, format!("not settled; terminal state {terminal:?}")));
        }
    }

    let mut cache: BTreeMap<Vec<u64>, (Fate, f64)> = BTreeMap::new();
    let mut lyapunov = Vec::new();
    for (k, e) in eqs.iter().enumerate() {
        for &eps in &opts.lyapunov_eps {
            let mut found = None;
            let mut basin_points = 0;
            for j in 0..=opts.delta_halvings {
                let delta = eps / (1u64 << j) as f64;
                let mut ok = true;
                let mut in_basin = 0;
                for start in probe_points(sys, e, delta) {
                    let key: Vec<u64> = start.iter().map(|v| v.to_bits()).collect();
                    let (fate, exc) = match cache.get(&key) {
                        Some(r) => *r,
                        None => {
                            let (r, _) = ctx.run(&start, &eqs)?;
                            cache.insert(key, (r.fate, r.excursion));
                            (r.fate, r.excursion)
                        }
                    };
                    if fate == Fate::Equilibrium(k) {
                        in_basin += 1;
                        ok &= exc <= eps;
                    }
                }
                if ok {
                    found = Some(delta);
                    basin_points = in_basin;
                    break;
                }
            }
            if found.is_none() {
                w[2].push(witness(e, format!("no delta found for eps {eps}")));
            }
            lyapunov.push(LyapunovRecord { state: e.clone(), eps, delta: found, basin_points });
        }
    }

    let mut min_sep: Option<f64> = None;
    for (i, a) in eqs.iter().enumerate() {
        for b in &eqs[i + 1..] {
            let d = dist_inf(a, b);
            min_sep = Some(min_sep.map_or(d, |m| m.min(d)));
            if d <= 10.0 * opts.tol {
                w[3].push(witness(a, format!("not isolated from {b:?}")));
            }
        }
    }
    let no_cycles = check_no_cycles_by_order(&eqs, &sys.state_cone);
    let note = scalar.then(|| String::from("scalar: no cycles"));
    if scalar {
        for e in &mut equilibria {
            e.basin_note = format!("{} (sampled)", e.basin_note);
        }
    }
    let report = InputReport {
        input: u,
        equilibria,
        starts: x0_grid.len(),
        unsettled,
        lyapunov,
        min_separation: min_sep,
        no_cycles,
        note,
    };
    Ok((report, w))
}

/// Starts at `e ± δ`, `e ± δ/2`, `e ± δ/4` along each axis, kept inside the
/// state domain.
fn probe_points(sys: &SystemDef, e: &[f64], delta: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..e.len() {
        for scale in [1.0, 0.5, 0.25] {
            for sign in [-1.0, 1.0] {
                let mut p = e.to_vec();
                p[i] += sign * scale * delta;
                if sys.state_domain[i].contains(p[i]) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Sampled check of the characteristic properties of `sys` over the input
/// grid `u_grid`, using the starts `x0_grid` for coverage (and, for vector
/// systems, for locating the equilibria).
pub fn verify_characteristic<E: Executor>(
    sys: &SystemDef,
    u_grid: &[f64],
    x0_grid: &[Vec<f64>],
    opts: &CharacteristicCheckOptions,
    exec: &E,
) -> Result<CharacteristicReport> {
    if u_grid.is_empty() || x0_grid.is_empty() {
        return Err(Error::InvalidArgument("verify_characteristic needs non-empty grids".into()));
    }
    if !(opts.t_final > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("t_final and tol must be positive".into()));
    }
    let results = exec.run(u_grid.len(), |i| check_input(sys, u_grid[i], x0_grid, opts));
    let mut inputs = Vec::with_capacity(results.len());
    let mut w: [Vec<Witness>; 4] = Default::default();
    let mut cycles_open = false;
    for r in results {
        let (rep, ws) = r?;
        cycles_open |= rep.note.is_none() && rep.no_cycles == NoCycles::Inconclusive;
        for (acc, ws) in w.iter_mut().zip(ws) {
            acc.extend(ws);
        }
        inputs.push(rep);
    }
    let [w1, w2, w3, w4] = w;
    let condition1 = ConditionResult::collect(w1, false);
    let condition2 = ConditionResult::collect(w2, false);
    let condition3 = ConditionResult::collect(w3, false);
    let condition4 = ConditionResult::collect(w4, cycles_open);
    let verdict = condition1.verdict.and(condition2.verdict).and(condition3.verdict).and(condition4.verdict);
    Ok(CharacteristicReport { evidence: "sampled", inputs, condition1, condition2, condition3, condition4, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charmap::linspace;
    use crate::exec::Sequential;

    fn z_sys() -> SystemDef {
        SystemDef::from_strs("z", &["-(x1*(2*x1^2 - 9*x1 + 12)) + u"], "1/(1+x1^2)").unwrap()
    }

    fn starts(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
        linspace(lo, hi, n).into_iter().map(|x| vec![x]).collect()
    }

    #[test]
    fn z_subsystem_passes_all_conditions() {
        let u = [0.0, 2.0, 4.0, 4.5, 5.0, 5.5];
        let r = verify_characteristic(&z_sys(), &u, &starts(0.0, 5.0, 20), &Default::default(), &Sequential).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", (&r.condition1, &r.condition2, &r.condition3, &r.condition4));
        assert_eq!(r.inputs[3].equilibria.len(), 3);
        assert_eq!(r.inputs[3].no_cycles, NoCycles::Certified);
    }

    #[test]
    fn repelling_start_stays_and_counts_as_covered() {
        let r = verify_characteristic(&z_sys(), &[4.5], &[vec![1.5]], &Default::default(), &Sequential).unwrap();
        assert_eq!(r.condition2.verdict, Verdict::Pass);
        let mid = r.inputs[0].lyapunov.iter().find(|l| abs(l.state[0] - 1.5) < 1e-9).unwrap();
        assert_eq!(mid.basin_points, 0);
    }

    #[test]
    fn divergent_system_fails_coverage() {
        let grow = SystemDef::from_strs("grow", &["x1"], "x1").unwrap();
        let opts = CharacteristicCheckOptions { t_final: 10.0, ..Default::default() };
        let r = verify_characteristic(&grow, &[0.0, 1.0], &starts(0.5, 2.0, 3), &opts, &Sequential).unwrap();
        assert_eq!(r.condition2.verdict, Verdict::Fail);
        assert_eq!(r.condition2.witnesses.len(), 6);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn planar_system_by_clustering() {
        let lin = SystemDef::from_strs("lin", &["-x1 + u", "-2*x2 + x1"], "x2").unwrap();
        let x0: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![2.0, 1.0], vec![1.0, 3.0]];
        let opts = CharacteristicCheckOptions {
            t_final: 30.0,
            lyapunov_eps: vec![0.1],
            delta_halvings: 2,
            ..Default::default()
        };
        let r = verify_characteristic(&lin, &[1.0], &x0, &opts, &Sequential).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let e = &r.inputs[0].equilibria;
        assert_eq!(e.len(), 1);
        assert!(dist_inf(&e[0].state, &[1.0, 0.5]) < 1e-6);
    }
}
