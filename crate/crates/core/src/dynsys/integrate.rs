//! Adaptive Dormand–Prince 5(4) integration with step rejection, restarts
//! at input breakpoints and projection onto the state domain.

use alloc::vec;
use alloc::vec::Vec;

use super::signal::InputSignal;
use super::system::{Interval, SystemDef};
use crate::math::{abs, powf, sqrt};
use crate::{Error, Result};

/// Autonomous or input-driven vector field on a box domain.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn domain(&self) -> &[Interval];
    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()>;
}

/// A [`SystemDef`] driven by an [`InputSignal`].
pub struct Driven<'a> {
    pub sys: &'a SystemDef,
    pub input: &'a InputSignal,
}

impl VectorField for Driven<'_> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn domain(&self) -> &[Interval] {
        &self.sys.state_domain
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        self.sys.eval_rhs(x, self.input.value(t), dx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size (defaults to the whole span).
    pub h_max: Option<f64>,
    /// If set, extra interpolated points are stored so that consecutive
    /// states differ by at most this much in the max norm.
    pub output_stride: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-11, h_max: None, output_stride: None, max_steps: 500_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// One accepted step with the data for the 4th-order continuous extension.
pub struct Step<'a> {
    pub t0: f64,
    pub x0: &'a [f64],
    pub f0: &'a [f64],
    pub t1: f64,
    pub x1: &'a [f64],
    pub f1: &'a [f64],
    /// `h·Σ d_s k_s`, the quartic correction term of the dense output.
    pub dense: &'a [f64],
}

impl Step<'_> {
    #[allow(clippy::needless_range_loop)]
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s1 = 1.0 - s;
        for i in 0..out.len() {
            let diff = self.x1[i] - self.x0[i];
            let b = h * self.f0[i] - diff;
            let c = diff - h * self.f1[i] - b;
            out[i] = self.x0[i] + s * (diff + s1 * (b + s * (c + s1 * self.dense[i])));
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[inline]
fn sq(v: f64) -> f64 {
    v * v
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what: "integrator state".into() })
    }
}

/// Integrates `field` from `x0` at `t = 0` to `t_final`, restarting at each
/// breakpoint in `(0, t_final)`, and hands every accepted step to `observer`.
pub fn solve<V: VectorField + ?Sized>(
    field: &V,
    x0: &[f64],
    t_final: f64,
    opts: &IntegratorOptions,
    breakpoints: &[f64],
    mut observer: impl FnMut(&Step<'_>),
) -> Result<()> {
    let n = field.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    if !(t_final > 0.0) || !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("t_final and tolerances must be positive".into()));
    }
    check_finite(x0)?;
    for (i, (v, d)) in x0.iter().zip(field.domain()).enumerate() {
        if !d.contains(*v) {
            return Err(Error::InvarianceViolation { t: 0.0, coordinate: i, value: *v });
        }
    }

    let mut segments: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > 0.0 && *b < t_final).collect();
    segments.push(t_final);

    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut k = vec![vec![0.0; n]; 7];
    let mut xs = vec![0.0; n];
    let mut xn = vec![0.0; n];
    let mut dense = vec![0.0; n];
    let mut steps = 0usize;

    for &t_end in &segments {
        let span = t_end - t;
        let h_max = opts.h_max.unwrap_or(span).min(span);
        field.eval(t, &x, &mut k[0])?;
        let mut h = initial_step(field, t, &x, &k[0], opts, h_max)?;
        let mut last_rejected = false;
        while t < t_end {
            if steps >= opts.max_steps {
                return Err(Error::TooManySteps { t, steps });
            }
            let remaining = t_end - t;
            let at_end = h >= remaining * (1.0 - 1e-12);
            if at_end {
                h = remaining;
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    xs[i] = x[i] + h * acc;
                }
                field.eval(t + C[s] * h, &xs, &mut k[s])?;
            }
            // Stage 7 is evaluated at the 5th-order solution (FSAL).
            xn.copy_from_slice(&xs);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for s in 0..7 {
                    e += E[s] * k[s][i];
                }
                let sc = opts.abs_tol + opts.rel_tol * abs(x[i]).max(abs(xn[i]));
                err += (h * e / sc) * (h * e / sc);
            }
            let err = sqrt(err / n as f64);
            if !err.is_finite() || xn.iter().any(|v| !v.is_finite()) {
                h *= 0.2;
                last_rejected = true;
                if h < 16.0 * f64::EPSILON * abs(t).max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
                continue;
            }
            if err <= 1.0 {
                steps += 1;
                let t_new = if at_end { t_end } else { t + h };
                let mut projected = false;
                for (i, d) in field.domain().iter().enumerate() {
                    let slack = opts.abs_tol + opts.rel_tol * abs(x[i]);
                    if xn[i] < d.lo || xn[i] > d.hi {
                        if xn[i] < d.lo - slack || xn[i] > d.hi + slack {
                            return Err(Error::InvarianceViolation { t: t_new, coordinate: i, value: xn[i] });
                        }
                        xn[i] = xn[i].clamp(d.lo, d.hi);
                        projected = true;
                    }
                }
                let mut f_new = core::mem::take(&mut k[6]);
                if projected {
                    field.eval(t_new, &xn, &mut f_new)?;
                }
                for (i, di) in dense.iter_mut().enumerate() {
                    let mut acc = D[6] * f_new[i];
                    for s in 0..6 {
                        acc += D[s] * k[s][i];
                    }
                    *di = h * acc;
                }
                observer(&Step { t0: t, x0: &x, f0: &k[0], t1: t_new, x1: &xn, f1: &f_new, dense: &dense });
                core::mem::swap(&mut x, &mut xn);
                k[0] = f_new;
                k[6] = vec![0.0; n];
                t = t_new;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * powf(err, -0.2)).clamp(0.2, 5.0) };
                h = (h * if last_rejected { factor.min(1.0) } else { factor }).min(h_max);
                last_rejected = false;
            } else {
                h *= (0.9 * powf(err, -0.2)).max(0.2);
                last_rejected = true;
                if h < 16.0 * f64::EPSILON * abs(t).max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
    }
    Ok(())
}

fn initial_step<V: VectorField + ?Sized>(
    field: &V,
    t: f64,
    x: &[f64],
    f0: &[f64],
    opts: &IntegratorOptions,
    h_max: f64,
) -> Result<f64> {
    let n = x.len();
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * abs(x[i]);
    let d0 = sqrt(x.iter().enumerate().map(|(i, v)| sq(v / scale(i))).sum::<f64>() / n as f64);
    let d1 = sqrt(f0.iter().enumerate().map(|(i, v)| sq(v / scale(i))).sum::<f64>() / n as f64);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(h_max);
    let x1: Vec<f64> = x.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; n];
    field.eval(t + h0, &x1, &mut f1)?;
    let d2 = sqrt(f1.iter().zip(f0).enumerate().map(|(i, (a, b))| sq((a - b) / scale(i))).sum::<f64>() / n as f64) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { powf(0.01 / d1.max(d2), 0.2) };
    Ok((100.0 * h0).min(h1).min(h_max))
}

/// Integrates `field` and stores every accepted step (plus interpolated
/// points when an output stride is configured). Returns `(times, states)`.
pub fn integrate_field<V: VectorField + ?Sized>(
    field: &V,
    x0: &[f64],
    t_final: f64,
    opts: &IntegratorOptions,
    breakpoints: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut buf = vec![0.0; x0.len()];
    solve(field, x0, t_final, opts, breakpoints, |st| {
        if let Some(stride) = opts.output_stride.filter(|s| *s > 0.0) {
            let h = st.t1 - st.t0;
            let speed = st.f0.iter().chain(st.f1).fold(0.0f64, |m, v| m.max(abs(*v)));
            let jump = crate::math::dist_inf(st.x0, st.x1).max(speed * h);
            let pieces = libm::ceil(jump / stride) as usize;
            for j in 1..pieces {
                let tj = st.t0 + (st.t1 - st.t0) * j as f64 / pieces as f64;
                st.interpolate(tj, &mut buf);
                times.push(tj);
                states.push(buf.clone());
            }
        }
        times.push(st.t1);
        states.push(st.x1.to_vec());
    })?;
    Ok((times, states))
}

/// States at the requested (nondecreasing) times in `[0, t_final]`, by cubic
/// Hermite interpolation between accepted steps.
pub fn sample_field<V: VectorField + ?Sized>(
    field: &V,
    x0: &[f64],
    times: &[f64],
    opts: &IntegratorOptions,
    breakpoints: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let t_final = times.last().copied().unwrap_or(0.0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    let mut next = 0;
    while next < times.len() && times[next] <= 0.0 {
        out.push(x0.to_vec());
        next += 1;
    }
    if next == times.len() {
        return Ok(out);
    }
    let mut buf = vec![0.0; x0.len()];
    solve(field, x0, t_final, opts, breakpoints, |st| {
        while next < times.len() && times[next] <= st.t1 {
            if times[next] >= st.t1 {
                out.push(st.x1.to_vec());
            } else {
                st.interpolate(times[next], &mut buf);
                out.push(buf.clone());
            }
            next += 1;
        }
    })?;
    Ok(out)
}

/// Integrates `sys` under input `u` and records inputs and outputs alongside
/// the states.
pub fn integrate(
    sys: &SystemDef,
    x0: &[f64],
    u: &InputSignal,
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    u.validate()?;
    let field = Driven { sys, input: u };
    let (times, states) = integrate_field(&field, x0, t_final, opts, u.breakpoints())?;
    let inputs = times.iter().map(|t| u.value(*t)).collect();
    let outputs = states.iter().map(|x| sys.eval_output(x)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times, states, inputs, outputs })
}
