//! System definitions, integration, ω-limit estimation and sampled
//! monotonicity checks.

mod expr;
mod integrate;
mod monotone;
mod signal;
mod system;

pub use expr::{BinOp, Expr, Var};
pub use integrate::{
    integrate, integrate_field, sample_field, solve, Driven, IntegratorOptions, Step, Trajectory, VectorField,
};
pub use monotone::{check_monotone_sampled, MonotoneCheckOptions, MonotoneReport, MonotoneWitness};
pub use signal::InputSignal;
pub use system::{parse_system, parse_systems, Interval, SystemDef};

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, dist_inf};
use crate::Result;

/// Outcome of [`omega_limit_estimate`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum OmegaLimit {
    Settled(Vec<f64>),
    /// The trajectory had not come to rest; carries the terminal state.
    NotSettled(Vec<f64>),
}

impl OmegaLimit {
    pub fn settled(&self) -> Option<&[f64]> {
        match self {
            OmegaLimit::Settled(p) => Some(p),
            OmegaLimit::NotSettled(_) => None,
        }
    }

    pub fn terminal(&self) -> &[f64] {
        match self {
            OmegaLimit::Settled(p) | OmegaLimit::NotSettled(p) => p,
        }
    }
}

/// Integrates under the constant input `u_const` and declares the terminal
/// state an ω-limit point if the last 10% of the window stayed within
/// `settle_tol` of it and `|f(terminal, u_const)| < settle_tol`.
pub fn omega_limit_estimate(
    sys: &SystemDef,
    x0: &[f64],
    u_const: f64,
    t_final: f64,
    settle_tol: f64,
    opts: &IntegratorOptions,
) -> Result<OmegaLimit> {
    let (times, states) = constant_input_run(sys, x0, u_const, t_final, opts)?;
    classify_terminal(sys, u_const, t_final, settle_tol, &times, &states)
}

/// Integration used by the ω-limit estimate: the step is capped at 1% of the
/// horizon so the settle window always holds several samples.
pub(crate) fn constant_input_run(
    sys: &SystemDef,
    x0: &[f64],
    u_const: f64,
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let input = InputSignal::Constant(u_const);
    let opts = IntegratorOptions { h_max: Some(opts.h_max.unwrap_or(f64::INFINITY).min(t_final / 100.0)), ..*opts };
    integrate_field(&Driven { sys, input: &input }, x0, t_final, &opts, &[])
}

pub(crate) fn classify_terminal(
    sys: &SystemDef,
    u_const: f64,
    t_final: f64,
    settle_tol: f64,
    times: &[f64],
    states: &[Vec<f64>],
) -> Result<OmegaLimit> {
    let terminal = states.last().cloned().unwrap_or_default();
    let window_start = 0.9 * t_final;
    let still =
        times.iter().zip(states).filter(|(t, _)| **t >= window_start).all(|(_, x)| dist_inf(x, &terminal) < settle_tol);
    let mut f = vec![0.0; sys.dim()];
    sys.eval_rhs(&terminal, u_const, &mut f)?;
    let resting = f.iter().all(|v| abs(*v) < settle_tol);
    Ok(if still && resting { OmegaLimit::Settled(terminal) } else { OmegaLimit::NotSettled(terminal) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    fn z_sys() -> SystemDef {
        SystemDef::from_strs("z", &["-(x1*(2*x1^2 - 9*x1 + 12)) + u"], "1/(1+x1^2)").unwrap()
    }

    #[test]
    fn z_subsystem_smallest_root() {
        let sys = z_sys();
        let tr = integrate(&sys, &[0.0], &InputSignal::Constant(4.5), 50.0, &IntegratorOptions::default()).unwrap();
        assert!(abs(tr.last_state()[0] - (3.0 - sqrt(3.0)) / 2.0) < 1e-6);
    }

    #[test]
    fn omega_limits_of_z_subsystem() {
        let sys = z_sys();
        let o = IntegratorOptions::default();
        let hi = omega_limit_estimate(&sys, &[3.0], 4.5, 50.0, 1e-6, &o).unwrap();
        assert!(abs(hi.settled().unwrap()[0] - (3.0 + sqrt(3.0)) / 2.0) < 1e-6);
        let mid = omega_limit_estimate(&sys, &[1.5], 4.5, 50.0, 1e-6, &o).unwrap();
        assert_eq!(mid.settled().unwrap(), &[1.5]);
        let zero = omega_limit_estimate(&sys, &[0.0], 0.0, 50.0, 1e-6, &o).unwrap();
        assert!(abs(zero.settled().unwrap()[0]) < 1e-6);
        for out in [hi, mid, zero] {
            let p = out.settled().unwrap();
            let mut f = [0.0];
            let u = if p[0] == 0.0 { 0.0 } else { 4.5 };
            sys.eval_rhs(p, u, &mut f).unwrap();
            assert!(abs(f[0]) < 1e-6);
        }
    }

    #[test]
    fn divergent_trajectory_is_not_settled() {
        let sys = SystemDef::from_strs("grow", &["x1"], "x1").unwrap();
        let out = omega_limit_estimate(&sys, &[1.0], 0.0, 20.0, 1e-6, &IntegratorOptions::default()).unwrap();
        assert!(matches!(out, OmegaLimit::NotSettled(_)));
    }

    #[test]
    fn slow_semistable_approach_is_not_settled() {
        // Double root at z = 2 for u = 4: approach is algebraic, ~1/(3t).
        let out = omega_limit_estimate(&z_sys(), &[3.0], 4.0, 50.0, 1e-6, &IntegratorOptions::default()).unwrap();
        let z = out.terminal()[0];
        assert!(matches!(out, OmegaLimit::NotSettled(_)));
        assert!(z > 2.0 && z < 2.02);
    }
}
