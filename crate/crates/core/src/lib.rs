//! Multi-valued input-state characteristics and small-gain verification for
//! monotone SISO feedback loops.
//!
//! The crate is `no_std` and needs only `alloc`. It covers:
//!
//! * [`order`]: orthant ordering cones and the partial-order predicates.
//! * [`dynsys`]: system definitions with a small rational expression
//!   language, an adaptive Runge–Kutta integrator, ω-limit estimation and
//!   sampled monotonicity checks.
//! * [`charmap`]: set-valued maps (characteristics, polylines, closed forms,
//!   compositions), their cardinality profiles and order-theoretic checks.
//! * [`inclusion`]: exhaustive path enumeration for `w_{k+1} ∈ F(w_k)`,
//!   fixed points and asymptotic classification.
//! * [`smallgain`]: the two-subsystem negative-feedback pipeline that checks
//!   the four hypotheses, computes the attractive set and validates it by
//!   closed-loop simulation.
//!
//! File IO, the CLI and JSON output live in the companion `mono-sgt` crate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

pub mod charmap;
pub mod dynsys;
mod error;
pub mod exec;
pub mod inclusion;
pub(crate) mod math;
pub mod order;
pub mod smallgain;

pub use error::{Error, Result};
