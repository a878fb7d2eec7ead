//! Falsification-oriented monotonicity check: integrate ordered pairs of
//! initial states under ordered pairs of inputs and look for a time where the
//! order breaks.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::integrate::{sample_field, Driven, IntegratorOptions};
use super::signal::InputSignal;
use super::system::{Interval, SystemDef};
use crate::order::Sign;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonotoneCheckOptions {
    pub samples: usize,
    pub t_final: f64,
    pub seed: u64,
    /// Box the initial states are drawn from; defaults to the state domain
    /// with infinite ends cut at a span of 10.
    pub state_box: Option<Vec<Interval>>,
    pub input_range: Interval,
    /// Order violations up to this size are attributed to integration error.
    pub tol: f64,
    /// Number of equally spaced comparison times on `[0, t_final]`.
    pub time_points: usize,
    pub integrator: IntegratorOptions,
}

impl Default for MonotoneCheckOptions {
    fn default() -> Self {
        Self {
            samples: 16,
            t_final: 10.0,
            seed: 1,
            state_box: None,
            input_range: Interval::new(0.0, 10.0),
            tol: 1e-6,
            time_points: 201,
            integrator: IntegratorOptions::with_tol(1e-9, 1e-11),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum ViolationKind {
    /// `φ(t, p, u) ⪯ φ(t, q, v)` failed.
    State,
    /// `h(φ(t, p, u)) ⪯ h(φ(t, q, v))` failed in the output cone.
    Output,
}

/// Inputs are reported as `(start time, value)` pieces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonotoneWitness {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub u: Vec<(f64, f64)>,
    pub v: Vec<(f64, f64)>,
    pub t: f64,
    pub kind: ViolationKind,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MonotoneReport {
    pub pass: bool,
    pub samples_run: usize,
    pub witness: Option<MonotoneWitness>,
}

fn ordered(a: f64, b: f64, sign: Sign) -> (f64, f64) {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    match sign {
        Sign::Pos => (lo, hi),
        Sign::Neg => (hi, lo),
    }
}

fn pieces(sig: &InputSignal) -> Vec<(f64, f64)> {
    match sig {
        InputSignal::Constant(v) => alloc::vec![(0.0, *v)],
        InputSignal::PiecewiseConstant { breakpoints, values } => {
            core::iter::once(0.0).chain(breakpoints.iter().copied()).zip(values.iter().copied()).collect()
        }
        InputSignal::Sampled { times, values } => times.iter().copied().zip(values.iter().copied()).collect(),
    }
}

pub fn check_monotone_sampled(sys: &SystemDef, opts: &MonotoneCheckOptions) -> Result<MonotoneReport> {
    if opts.samples == 0 || opts.time_points < 2 || !(opts.t_final > 0.0) {
        return Err(Error::InvalidArgument("monotone check needs samples >= 1, time_points >= 2, t_final > 0".into()));
    }
    let n = sys.dim();
    let bx: Vec<Interval> = match &opts.state_box {
        Some(b) if b.len() != n => return Err(Error::DimensionMismatch { expected: n, found: b.len() }),
        Some(b) => b.clone(),
        None => sys.state_domain.iter().map(|d| d.finite_part(10.0)).collect(),
    };
    let in_sign = sys.input_cone.signs()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let times: Vec<f64> =
        (0..opts.time_points).map(|i| opts.t_final * i as f64 / (opts.time_points - 1) as f64).collect();
    let draw = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| if hi > lo { rng.gen_range(lo..=hi) } else { lo };

    for i in 0..opts.samples {
        let mut p = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        for (d, s) in bx.iter().zip(sys.state_cone.signs()) {
            let (a, b) = ordered(draw(d.lo, d.hi, &mut rng), draw(d.lo, d.hi, &mut rng), *s);
            p.push(a);
            q.push(b);
        }
        if i % 4 == 0 {
            q.clone_from(&p);
        }
        let (lo, hi) = (opts.input_range.lo, opts.input_range.hi);
        let (u, v) = if i % 2 == 0 {
            let (a, b) = ordered(draw(lo, hi, &mut rng), draw(lo, hi, &mut rng), in_sign);
            (InputSignal::Constant(a), InputSignal::Constant(b))
        } else {
            let mut bps = [0.0; 2].map(|_| draw(0.0, opts.t_final, &mut rng));
            bps.sort_by(f64::total_cmp);
            let bps = if bps[0] < bps[1] { bps.to_vec() } else { alloc::vec![bps[0]] };
            let (mut uv, mut vv) = (Vec::new(), Vec::new());
            for _ in 0..=bps.len() {
                let (a, b) = ordered(draw(lo, hi, &mut rng), draw(lo, hi, &mut rng), in_sign);
                uv.push(a);
                vv.push(b);
            }
            (InputSignal::piecewise_constant(bps.clone(), uv)?, InputSignal::piecewise_constant(bps, vv)?)
        };
        let v = if i % 4 == 1 { u.clone() } else { v };

        let mut bp: Vec<f64> = u.breakpoints().iter().chain(v.breakpoints()).copied().collect();
        bp.sort_by(f64::total_cmp);
        let xp = sample_field(&Driven { sys, input: &u }, &p, &times, &opts.integrator, &bp)?;
        let xq = sample_field(&Driven { sys, input: &v }, &q, &times, &opts.integrator, &bp)?;

        for (k, (a, b)) in xp.iter().zip(&xq).enumerate() {
            let witness = |kind, lower: Vec<f64>, upper: Vec<f64>| MonotoneWitness {
                p: p.clone(),
                q: q.clone(),
                u: pieces(&u),
                v: pieces(&v),
                t: times[k],
                kind,
                lower,
                upper,
            };
            if !sys.state_cone.leq_within(a, b, opts.tol)? {
                return Ok(MonotoneReport {
                    pass: false,
                    samples_run: i + 1,
                    witness: Some(witness(ViolationKind::State, a.clone(), b.clone())),
                });
            }
            let (ya, yb) = (sys.eval_output(a)?, sys.eval_output(b)?);
            if !sys.output_cone.leq_within(&[ya], &[yb], opts.tol)? {
                return Ok(MonotoneReport {
                    pass: false,
                    samples_run: i + 1,
                    witness: Some(witness(ViolationKind::Output, alloc::vec![ya], alloc::vec![yb])),
                });
            }
        }
    }
    Ok(MonotoneReport { pass: true, samples_run: opts.samples, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::OrderCone;

    fn z_sys() -> SystemDef {
        SystemDef::from_strs("z", &["-(x1*(2*x1^2 - 9*x1 + 12)) + u"], "1/(1+x1^2)")
            .unwrap()
            .with_output_cone(OrderCone::opposite())
            .unwrap()
    }

    #[test]
    fn worked_example_subsystems_pass() {
        let x = SystemDef::from_strs("x", &["-x1 + 5 + u"], "x1").unwrap();
        let opts = MonotoneCheckOptions { input_range: Interval::new(0.0, 1.0), ..Default::default() };
        assert!(check_monotone_sampled(&x, &opts).unwrap().pass);
        let opts = MonotoneCheckOptions {
            input_range: Interval::new(0.0, 6.0),
            state_box: Some(alloc::vec![Interval::new(0.0, 5.0)]),
            ..Default::default()
        };
        let r = check_monotone_sampled(&z_sys(), &opts).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.samples_run, 16);
    }

    #[test]
    fn passing_systems_pass_for_many_seeds() {
        let z = z_sys();
        for seed in 0..6 {
            let opts = MonotoneCheckOptions {
                seed,
                samples: 6,
                input_range: Interval::new(0.0, 6.0),
                state_box: Some(alloc::vec![Interval::new(0.0, 4.0)]),
                ..Default::default()
            };
            assert!(check_monotone_sampled(&z, &opts).unwrap().pass, "seed {seed}");
        }
    }

    #[test]
    fn rotation_fails_with_witness() {
        let rot = SystemDef::from_strs("rot", &["-x2", "x1"], "x1")
            .unwrap()
            .with_domain(alloc::vec![Interval::REAL; 2])
            .unwrap();
        let r = check_monotone_sampled(&rot, &MonotoneCheckOptions::default()).unwrap();
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert!(OrderCone::orthant(2).unwrap().leq(&w.p, &w.q).unwrap());
        assert!(!OrderCone::orthant(2).unwrap().leq_within(&w.lower, &w.upper, 1e-6).unwrap());
        assert!(w.t > 0.0);
    }

    #[test]
    fn wrong_output_orientation_is_caught() {
        let z = z_sys().with_output_cone(OrderCone::standard()).unwrap();
        let r = check_monotone_sampled(&z, &MonotoneCheckOptions::default()).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness.unwrap().kind, ViolationKind::Output);
    }
}
