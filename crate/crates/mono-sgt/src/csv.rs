//! CSV writers and a minimal reader for the files this crate emits.

use mono_sgt_core::charmap::Profile;
use mono_sgt_core::dynsys::Trajectory;
use mono_sgt_core::inclusion::{PathClass, PathSet};

use crate::error::{CliError, CliResult};
use crate::json::fmt_f64;

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let mut first = true;
    for c in cells {
        if !first {
            out.push(',');
        }
        out.push_str(&c);
        first = false;
    }
    out.push('\n');
}

/// `t,x1..xn,u,y`, one row per stored time.
pub fn trajectory(tr: &Trajectory) -> String {
    let n = tr.states.first().map_or(0, Vec::len);
    let mut out = String::new();
    push_row(
        &mut out,
        ["t".to_string()].into_iter().chain((1..=n).map(|i| format!("x{i}"))).chain(["u".into(), "y".into()]),
    );
    for i in 0..tr.len() {
        let row = std::iter::once(tr.times[i])
            .chain(tr.states[i].iter().copied())
            .chain([tr.inputs[i], tr.outputs[i]])
            .map(fmt_f64);
        push_row(&mut out, row);
    }
    out
}

pub fn class_label(c: &PathClass) -> String {
    match c {
        PathClass::Converged { .. } => "converged".into(),
        PathClass::Periodic { period, .. } => format!("periodic-{period}"),
        PathClass::Divergent { .. } => "divergent".into(),
        PathClass::Undetermined { .. } => "undetermined".into(),
    }
}

/// `start,path,step,value,branch,class`; `branch` is empty at step 0.
pub fn paths(sets: &[PathSet]) -> String {
    let mut out = String::from("start,path,step,value,branch,class\n");
    for set in sets {
        for (pi, p) in set.paths.iter().enumerate() {
            let class = class_label(&p.class);
            for (k, v) in p.values.iter().enumerate() {
                let branch = if k == 0 { String::new() } else { p.branches[k - 1].to_string() };
                push_row(
                    &mut out,
                    [fmt_f64(set.start), pi.to_string(), k.to_string(), fmt_f64(*v), branch, class.clone()],
                );
            }
        }
    }
    out
}

/// `u,branch_index,value`, one row per branch value; inputs with an empty
/// value set produce no rows.
pub fn samples(profile: &Profile) -> String {
    let mut out = String::from("u,branch_index,value\n");
    for s in &profile.samples {
        for (i, v) in s.values.iter().enumerate() {
            push_row(&mut out, [fmt_f64(s.u), i.to_string(), fmt_f64(*v)]);
        }
    }
    out
}

/// A parsed CSV file: the header and the rows as strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::usage("empty CSV file"))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
            if row.len() != header.len() {
                return Err(CliError::usage(format!(
                    "CSV row {} has {} cells, header has {}",
                    i + 2,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn number(&self, row: usize, col: usize) -> CliResult<f64> {
        let cell = &self.rows[row][col];
        cell.parse().map_err(|_| CliError::usage(format!("CSV row {}: `{cell}` is not a number", row + 2)))
    }
}
