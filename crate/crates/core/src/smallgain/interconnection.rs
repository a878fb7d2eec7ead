use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::charmap::{compose_maps, MultiMap};
use crate::dynsys::{Interval, SystemDef, VectorField};
use crate::{Error, Result};

/// Feedback loop `ẋ = f_x(x, w), y = h_x(x); ż = f_z(z, y), w = h_z(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interconnection {
    pub name: String,
    pub sys_x: SystemDef,
    pub sys_z: SystemDef,
    /// Input range of the x-subsystem used for its characteristic.
    pub w_range: Interval,
    /// Input range of the z-subsystem used for its characteristic.
    pub y_range: Interval,
    /// Box of initial conditions in the product space for closed-loop sweeps.
    pub state_box: Vec<Interval>,
    /// A-priori bound `|x(t)| <= |x(0)| + offset` to check along trajectories.
    pub x_bound_offset: Option<f64>,
    pub wiring: &'static str,
}

const WIRING: &str = "U_x = Y_z (w), U_z = Y_x (y)";

impl Interconnection {
    pub fn new(name: &str, sys_x: SystemDef, sys_z: SystemDef) -> Result<Self> {
        let state_box = sys_x.state_domain.iter().chain(&sys_z.state_domain).map(|d| d.finite_part(10.0)).collect();
        let ic = Self {
            name: name.into(),
            sys_x,
            sys_z,
            w_range: Interval::new(0.0, 10.0),
            y_range: Interval::new(0.0, 10.0),
            state_box,
            x_bound_offset: None,
            wiring: WIRING,
        };
        ic.validate()?;
        Ok(ic)
    }

    pub fn with_ranges(mut self, w_range: Interval, y_range: Interval) -> Result<Self> {
        self.w_range = w_range;
        self.y_range = y_range;
        self.validate()?;
        Ok(self)
    }

    pub fn with_state_box(mut self, state_box: Vec<Interval>) -> Result<Self> {
        self.state_box = state_box;
        self.validate()?;
        Ok(self)
    }

    pub fn with_x_bound(mut self, offset: f64) -> Self {
        self.x_bound_offset = Some(offset);
        self
    }

    pub fn dim(&self) -> usize {
        self.sys_x.dim() + self.sys_z.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.sys_x.validate()?;
        self.sys_z.validate()?;
        if self.state_box.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: self.state_box.len() });
        }
        for r in [self.w_range, self.y_range].iter().chain(&self.state_box) {
            if !(r.lo <= r.hi) || !r.lo.is_finite() || !r.hi.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "ranges must be finite and non-empty, got {}..{}",
                    r.lo, r.hi
                )));
            }
        }
        Ok(())
    }

    /// Checks the sign pattern of a negative-feedback loop: the y-channel is
    /// ordered the same way at both ends and the w-channel oppositely. With
    /// standard orders on x's input and output this is exactly "z's output
    /// ordered by the opposite cone".
    pub fn orientation(&self) -> core::result::Result<(), String> {
        let (xi, xo) = (&self.sys_x.input_cone, &self.sys_x.output_cone);
        let (zi, zo) = (&self.sys_z.input_cone, &self.sys_z.output_cone);
        if xo != zi {
            return Err(format!("y is ordered by {xo} at the x-output but by {zi} at the z-input"));
        }
        if xi == zo {
            return Err(format!("w is ordered by {zo} at both ends, which makes the loop positive feedback"));
        }
        Ok(())
    }

    /// Splits a product-space point into `(x, z)`.
    pub fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        p.split_at(self.sys_x.dim())
    }

    pub fn k_x(&self) -> Result<MultiMap> {
        Ok(MultiMap::characteristic(self.sys_x.clone(), self.w_range)?.named("k_x"))
    }

    pub fn k_y(&self) -> Result<MultiMap> {
        Ok(MultiMap::io_characteristic(self.sys_x.clone(), self.w_range)?.named("k_y"))
    }

    pub fn k_z(&self) -> Result<MultiMap> {
        Ok(MultiMap::characteristic(self.sys_z.clone(), self.y_range)?.named("k_z"))
    }

    pub fn k_w(&self) -> Result<MultiMap> {
        Ok(MultiMap::io_characteristic(self.sys_z.clone(), self.y_range)?.named("k_w"))
    }

    /// `k_w ∘ k_y` on the w-range.
    pub fn w_loop(&self) -> Result<MultiMap> {
        Ok(compose_maps(self.k_w()?, self.k_y()?).named("k_w∘k_y"))
    }

    /// `k_y ∘ k_w` on the y-range.
    pub fn v_loop(&self) -> Result<MultiMap> {
        Ok(compose_maps(self.k_y()?, self.k_w()?).named("k_y∘k_w"))
    }

    pub fn closed_loop(&self) -> ClosedLoop<'_> {
        let domain = self.sys_x.state_domain.iter().chain(&self.sys_z.state_domain).copied().collect();
        ClosedLoop { ic: self, domain }
    }
}

/// The product vector field `(f_x(x, h_z(z)), f_z(z, h_x(x)))`.
pub struct ClosedLoop<'a> {
    ic: &'a Interconnection,
    domain: Vec<Interval>,
}

impl VectorField for ClosedLoop<'_> {
    fn dim(&self) -> usize {
        self.ic.dim()
    }

    fn domain(&self) -> &[Interval] {
        &self.domain
    }

    fn eval(&self, _t: f64, p: &[f64], dp: &mut [f64]) -> Result<()> {
        let (x, z) = self.ic.split(p);
        let w = self.ic.sys_z.eval_output(z)?;
        let y = self.ic.sys_x.eval_output(x)?;
        let (dx, dz) = dp.split_at_mut(x.len());
        self.ic.sys_x.eval_rhs(x, w, dx)?;
        self.ic.sys_z.eval_rhs(z, y, dz)
    }
}

/// Tensor grid with `per_axis` points along each axis of `bx`.
pub fn box_grid(bx: &[Interval], per_axis: usize) -> Vec<Vec<f64>> {
    box_grid_shape(bx, &vec![per_axis; bx.len()])
}

/// Tensor grid with `counts[i]` points along axis `i` of `bx`.
pub fn box_grid_shape(bx: &[Interval], counts: &[usize]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for (iv, &n) in bx.iter().zip(counts) {
        let axis = crate::charmap::linspace(iv.lo, iv.hi, n);
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out
}
