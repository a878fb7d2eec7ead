//! `--budget` JSON fragments.
//!
//! A fragment is a flat object whose keys override single fields of
//! [`Budget`]; unknown keys are rejected. Keys without a prefix name the
//! top-level field, the prefixed ones reach into the nested options:
//!
//! | key | field |
//! |---|---|
//! | `rel_tol`, `abs_tol` | closed-loop integrator tolerances |
//! | `path_depth`, `branch_cap`, `path_tol`, `converge_run`, `max_period` | loop path enumeration |
//! | `monotone_samples`, `monotone_t_final`, `monotone_seed` | sampled monotonicity check |
//! | `char_t_final`, `char_tol` | characteristic check |
//!
//! `sweep_grid` takes a number (every axis) or a per-axis array.

use mono_sgt_core::smallgain::Budget;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Grid {
    One(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Patch {
    char_inputs: Option<usize>,
    char_starts: Option<usize>,
    singleton_grid: Option<usize>,
    bound_grid: Option<usize>,
    bound_refine_tol: Option<f64>,
    sweep_grid: Option<Grid>,
    t_final: Option<f64>,
    escape_radius: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    loop_grid: Option<usize>,
    image_depth: Option<usize>,
    fixed_grid: Option<usize>,
    fixed_tol: Option<f64>,
    dist_tol: Option<f64>,
    path_depth: Option<usize>,
    branch_cap: Option<usize>,
    path_tol: Option<f64>,
    converge_run: Option<usize>,
    max_period: Option<usize>,
    monotone_samples: Option<usize>,
    monotone_t_final: Option<f64>,
    monotone_seed: Option<u64>,
    char_t_final: Option<f64>,
    char_tol: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Applies a JSON fragment (or `@FILE` holding one) to `budget`.
pub fn apply_fragment(budget: &mut Budget, fragment: &str) -> CliResult<()> {
    let text = match fragment.strip_prefix('@') {
        Some(path) => crate::resolve::read_file(std::path::Path::new(path))?,
        None => fragment.to_string(),
    };
    let p: Patch = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("--budget: {e}")))?;
    set(&mut budget.char_inputs, p.char_inputs);
    set(&mut budget.char_starts, p.char_starts);
    set(&mut budget.singleton_grid, p.singleton_grid);
    set(&mut budget.bound_grid, p.bound_grid);
    set(&mut budget.bound_refine_tol, p.bound_refine_tol);
    if let Some(g) = p.sweep_grid {
        budget.sweep_grid = match g {
            Grid::One(n) => vec![n],
            Grid::PerAxis(v) => v,
        };
    }
    set(&mut budget.t_final, p.t_final);
    set(&mut budget.escape_radius, p.escape_radius);
    set(&mut budget.integrator.rel_tol, p.rel_tol);
    set(&mut budget.integrator.abs_tol, p.abs_tol);
    set(&mut budget.loop_grid, p.loop_grid);
    set(&mut budget.image_depth, p.image_depth);
    set(&mut budget.fixed_grid, p.fixed_grid);
    set(&mut budget.fixed_tol, p.fixed_tol);
    set(&mut budget.dist_tol, p.dist_tol);
    set(&mut budget.path.depth, p.path_depth);
    set(&mut budget.path.branch_cap, p.branch_cap);
    set(&mut budget.path.tol, p.path_tol);
    set(&mut budget.path.converge_run, p.converge_run);
    set(&mut budget.path.max_period, p.max_period);
    set(&mut budget.monotone.samples, p.monotone_samples);
    set(&mut budget.monotone.t_final, p.monotone_t_final);
    set(&mut budget.monotone.seed, p.monotone_seed);
    set(&mut budget.characteristic.t_final, p.char_t_final);
    set(&mut budget.characteristic.tol, p.char_tol);
    budget.validate()?;
    Ok(())
}

/// Parses `GxH…` into per-axis counts.
pub fn parse_grid(s: &str) -> CliResult<Vec<usize>> {
    let v: Option<Vec<usize>> = s.split(['x', 'X']).map(|t| t.trim().parse().ok().filter(|n| *n > 0)).collect();
    v.filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::usage(format!("--grid expects positive counts like 5x5, got `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments() {
        let mut b = Budget::default();
        apply_fragment(&mut b, r#"{"t_final": 30, "sweep_grid": [3, 4], "branch_cap": 50, "rel_tol": 1e-8}"#).unwrap();
        assert_eq!((b.t_final, b.sweep_grid.clone(), b.path.branch_cap), (30.0, vec![3, 4], 50));
        assert_eq!(b.integrator.rel_tol, 1e-8);
        apply_fragment(&mut b, r#"{"sweep_grid": 2}"#).unwrap();
        assert_eq!(b.sweep_grid, [2]);
        assert!(apply_fragment(&mut b, r#"{"nonsense": 1}"#).is_err());
        assert!(apply_fragment(&mut b, r#"{"t_final": -1}"#).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("5x7").unwrap(), [5, 7]);
        assert_eq!(parse_grid("9").unwrap(), [9]);
        assert!(parse_grid("0x3").is_err() && parse_grid("ax3").is_err());
    }
}
