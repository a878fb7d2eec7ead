use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::expr::{Expr, Var};
use crate::order::OrderCone;
use crate::{Error, Result};

/// Closed interval with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const NONNEGATIVE: Interval = Interval::new(0.0, f64::INFINITY);
    pub const REAL: Interval = Interval::new(f64::NEG_INFINITY, f64::INFINITY);

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Finite sub-box used for sampling and root search: infinite ends are
    /// replaced by `span` past the finite end (or `±span/2` if both are
    /// infinite).
    pub fn finite_part(&self, span: f64) -> Interval {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => *self,
            (true, false) => Interval::new(self.lo, self.lo + span),
            (false, true) => Interval::new(self.hi - span, self.hi),
            (false, false) => Interval::new(-span / 2.0, span / 2.0),
        }
    }
}

/// A SISO system `ẋ = f(x, u)`, `y = h(x)` on a box-shaped state domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    pub name: String,
    pub rhs: Vec<Expr>,
    pub output: Expr,
    pub state_cone: OrderCone,
    pub input_cone: OrderCone,
    pub output_cone: OrderCone,
    pub state_domain: Vec<Interval>,
}

impl SystemDef {
    /// Builds a system with default cones (`+` orthant everywhere) and the
    /// nonnegative orthant as state domain.
    pub fn new(name: &str, rhs: Vec<Expr>, output: Expr) -> Result<Self> {
        let n = rhs.len();
        let sys = Self {
            name: name.to_owned(),
            state_cone: OrderCone::orthant(n)?,
            input_cone: OrderCone::standard(),
            output_cone: OrderCone::standard(),
            state_domain: vec![Interval::NONNEGATIVE; n],
            rhs,
            output,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Convenience constructor from expression strings.
    pub fn from_strs(name: &str, rhs: &[&str], output: &str) -> Result<Self> {
        let n = rhs.len();
        let rhs = rhs.iter().map(|s| Expr::parse(s, n)).collect::<Result<Vec<_>>>()?;
        Self::new(name, rhs, Expr::parse(output, n)?)
    }

    pub fn with_output_cone(mut self, cone: OrderCone) -> Result<Self> {
        self.output_cone = cone;
        self.validate()?;
        Ok(self)
    }

    pub fn with_input_cone(mut self, cone: OrderCone) -> Result<Self> {
        self.input_cone = cone;
        self.validate()?;
        Ok(self)
    }

    pub fn with_state_cone(mut self, cone: OrderCone) -> Result<Self> {
        self.state_cone = cone;
        self.validate()?;
        Ok(self)
    }

    pub fn with_domain(mut self, domain: Vec<Interval>) -> Result<Self> {
        self.state_domain = domain;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("system dimension must be positive".into()));
        }
        for e in self.rhs.iter().chain(core::iter::once(&self.output)) {
            if e.state_arity() > n {
                return Err(Error::UnknownVariable { name: format!("x{}", e.state_arity()), dim: n });
            }
        }
        if self.state_cone.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.state_cone.dim() });
        }
        if self.state_domain.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.state_domain.len() });
        }
        if self.input_cone.dim() != 1 || self.output_cone.dim() != 1 {
            return Err(Error::MalformedCone("input and output cones must be scalar".into()));
        }
        if self.state_domain.iter().any(|d| !(d.lo <= d.hi) || d.lo.is_nan()) {
            return Err(Error::InvalidArgument("empty state domain".into()));
        }
        Ok(())
    }

    pub fn eval_rhs(&self, x: &[f64], u: f64, out: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        for (o, e) in out.iter_mut().zip(&self.rhs) {
            *o = e.eval(x, u)?;
        }
        Ok(())
    }

    pub fn eval_output(&self, x: &[f64]) -> Result<f64> {
        self.output.eval(x, 0.0)
    }

    /// `f(x, u)` and `∂f/∂x` for scalar systems.
    pub fn scalar_rhs_dual(&self, x: f64, u: f64) -> Result<(f64, f64)> {
        if self.dim() != 1 {
            return Err(Error::UnsupportedDimension { dim: self.dim() });
        }
        self.rhs[0].eval_dual(&[x], u, Var::State(0))
    }

    /// Renders the system in the configuration grammar accepted by
    /// [`parse_system`].
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "system {}", self.name);
        let _ = writeln!(s, "dim {}", self.dim());
        s.push_str("state_domain");
        for d in &self.state_domain {
            let _ = write!(s, " {}..{}", fmt_bound(d.lo), fmt_bound(d.hi));
        }
        s.push('\n');
        for (i, e) in self.rhs.iter().enumerate() {
            let _ = writeln!(s, "rhs{} = {e}", i + 1);
        }
        let _ = writeln!(s, "output = {}", self.output);
        let _ = writeln!(
            s,
            "state_cone {}  input_cone {}  output_cone {}",
            self.state_cone, self.input_cone, self.output_cone
        );
        s
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn syntax(line: usize, column: usize, message: &str) -> Error {
    Error::Syntax { line, column, message: message.to_owned() }
}

fn parse_bound(tok: &str, line: usize, col: usize) -> Result<f64> {
    match tok {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| syntax(line, col, "malformed domain bound")),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

struct Pending<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

/// Parses a document containing exactly one `system` block.
pub fn parse_system(text: &str) -> Result<SystemDef> {
    let mut systems = parse_systems(text)?;
    match systems.len() {
        1 => Ok(systems.remove(0)),
        n => Err(syntax(1, 1, &format!("expected exactly one system block, found {n}"))),
    }
}

/// Parses a document with one or more `system` blocks, in order.
pub fn parse_systems(text: &str) -> Result<Vec<SystemDef>> {
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with("system") || blocks.is_empty() {
            blocks.push(Vec::new());
        }
        blocks.last_mut().expect("pushed above").push((i + 1, line));
    }
    if blocks.is_empty() {
        return Err(syntax(1, 1, "empty document"));
    }
    blocks.into_iter().map(|b| parse_block(&b)).collect()
}

fn parse_block(lines: &[(usize, &str)]) -> Result<SystemDef> {
    let mut name: Option<String> = None;
    let mut dim: Option<usize> = None;
    let mut domain: Option<(usize, Vec<Interval>)> = None;
    let mut rhs: Vec<(usize, Pending)> = Vec::new();
    let mut output: Option<Pending> = None;
    let mut cones: [Option<(usize, usize, &str)>; 3] = [None, None, None];

    for &(ln, line) in lines {
        let toks = tokens(line);
        let (c0, head) = toks[0];
        if let Some(eq) = line.find('=') {
            let lhs = line[..eq].trim();
            let body = &line[eq + 1..];
            let pending = Pending { line: ln, col: eq + 1, text: body };
            if lhs == "output" {
                if output.is_some() {
                    return Err(syntax(ln, c0, "duplicate output line"));
                }
                output = Some(pending);
            } else if let Some(idx) = lhs.strip_prefix("rhs") {
                let i: usize = idx.parse().map_err(|_| syntax(ln, c0, "expected rhs<i>"))?;
                if i == 0 {
                    return Err(syntax(ln, c0, "rhs indices start at 1"));
                }
                if rhs.iter().any(|(j, _)| *j == i) {
                    return Err(syntax(ln, c0, "duplicate rhs line"));
                }
                rhs.push((i, pending));
            } else {
                return Err(syntax(ln, c0, &format!("unknown assignment `{lhs}`")));
            }
            continue;
        }
        match head {
            "system" => {
                let (c, n) = toks.get(1).ok_or(syntax(ln, c0, "missing system name"))?;
                if toks.len() > 2 || !n.chars().all(|c| c.is_alphanumeric() || "_-.()".contains(c)) {
                    return Err(syntax(ln, *c, "system name must be one identifier"));
                }
                name = Some((*n).to_string());
            }
            "dim" => {
                let (c, n) = toks.get(1).ok_or(syntax(ln, c0, "missing dimension"))?;
                let n: usize = n.parse().map_err(|_| syntax(ln, *c, "dimension must be a positive integer"))?;
                if n == 0 || toks.len() > 2 {
                    return Err(syntax(ln, *c, "dimension must be a positive integer"));
                }
                dim = Some(n);
            }
            "state_domain" => {
                let mut d = Vec::new();
                for &(c, tok) in &toks[1..] {
                    let (lo, hi) = tok.split_once("..").ok_or(syntax(ln, c, "expected <lo>..<hi>"))?;
                    let lo = parse_bound(lo, ln, c)?;
                    let hi = parse_bound(hi, ln, c)?;
                    if !(lo <= hi) {
                        return Err(syntax(ln, c, "empty domain interval"));
                    }
                    d.push(Interval::new(lo, hi));
                }
                domain = Some((ln, d));
            }
            "state_cone" | "input_cone" | "output_cone" => {
                let mut k = 0;
                while k < toks.len() {
                    let (c, key) = toks[k];
                    let slot = match key {
                        "state_cone" => 0,
                        "input_cone" => 1,
                        "output_cone" => 2,
                        _ => return Err(syntax(ln, c, &format!("unexpected token `{key}`"))),
                    };
                    let (vc, val) = toks.get(k + 1).ok_or(syntax(ln, c, "missing cone value"))?;
                    cones[slot] = Some((ln, *vc, val));
                    k += 2;
                }
            }
            other => return Err(syntax(ln, c0, &format!("unknown directive `{other}`"))),
        }
    }

    let first = lines[0].0;
    let name = name.ok_or(syntax(first, 1, "missing `system <name>` line"))?;
    let n = dim.ok_or(syntax(first, 1, "missing `dim <n>` line"))?;
    rhs.sort_by_key(|(i, _)| *i);
    if rhs.len() != n || rhs.iter().enumerate().any(|(k, (i, _))| *i != k + 1) {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
    }
    let rhs = rhs.iter().map(|(_, p)| Expr::parse_at(p.text, n, p.line, p.col)).collect::<Result<Vec<_>>>()?;
    let out = output.ok_or(syntax(first, 1, "missing `output = ...` line"))?;
    let output = Expr::parse_at(out.text, n, out.line, out.col)?;

    let cone = |slot: usize, default: OrderCone, want: usize| -> Result<OrderCone> {
        match cones[slot] {
            None => Ok(default),
            Some((ln, c, s)) => {
                let k = OrderCone::parse(s).map_err(|_| syntax(ln, c, &format!("malformed cone `{s}`")))?;
                if k.dim() != want {
                    return Err(syntax(ln, c, &format!("cone `{s}` must have {want} sign(s)")));
                }
                Ok(k)
            }
        }
    };
    let state_cone = cone(0, OrderCone::orthant(n)?, n)?;
    let input_cone = cone(1, OrderCone::standard(), 1)?;
    let output_cone = cone(2, OrderCone::standard(), 1)?;
    let state_domain = match domain {
        None => vec![Interval::NONNEGATIVE; n],
        Some((ln, d)) if d.len() != n => {
            return Err(syntax(ln, 1, &format!("state_domain needs {n} intervals, got {}", d.len())))
        }
        Some((_, d)) => d,
    };
    let sys = SystemDef { name, rhs, output, state_cone, input_cone, output_cone, state_domain };
    sys.validate()?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z_SYS: &str = "\
# z-subsystem of the worked example
system sec5z
dim 1
state_domain 0..inf
rhs1 = -(x1*(2*x1^2 - 9*x1 + 12)) + u
output = 1/(1+x1^2)
state_cone +  input_cone +  output_cone -
";

    #[test]
    fn parses_worked_example_subsystems() {
        let x = parse_system("system sec5x\ndim 1\nrhs1 = -x1 + 5 + u\noutput = x1\n").unwrap();
        assert_eq!(x.dim(), 1);
        assert!(x.output_cone.is_standard_scalar());
        assert_eq!(x.state_domain, vec![Interval::NONNEGATIVE]);
        let mut f = [0.0];
        x.eval_rhs(&[5.0], 0.0, &mut f).unwrap();
        assert_eq!(f[0], 0.0);

        let z = parse_system(Z_SYS).unwrap();
        assert!(z.output_cone.is_opposite_scalar());
        z.eval_rhs(&[2.0], 4.0, &mut f).unwrap();
        assert_eq!(f[0], 0.0);
        assert_eq!(z.eval_output(&[2.0]).unwrap(), 0.2);
    }

    #[test]
    fn cones_may_be_on_separate_lines() {
        let s = parse_system(
            "system r\ndim 2\nstate_domain -inf..inf -inf..inf\nrhs1 = -x2\nrhs2 = x1\noutput = x1\nstate_cone ++\noutput_cone -\n",
        )
        .unwrap();
        assert_eq!(s.state_cone.to_string(), "++");
        assert!(s.output_cone.is_opposite_scalar());
        assert_eq!(s.state_domain[0], Interval::REAL);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            parse_system("system s\ndim 2\nrhs1 = x3\nrhs2 = x1\noutput = x1\n"),
            Err(Error::UnknownVariable { dim: 2, .. })
        ));
        assert!(matches!(
            parse_system("system s\ndim 2\nrhs1 = x1\noutput = x1\n"),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        match parse_system("system s\ndim 1\nrhs1 = x1 * * 2\noutput = x1\n") {
            Err(Error::Syntax { line: 3, column, .. }) => assert_eq!(column, 13),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_system("system s\ndim 1\nrhs1 = x1\noutput = x1\ninput_cone +-\n"),
            Err(Error::Syntax { line: 5, .. })
        ));
        assert!(matches!(
            parse_system("system s\ndim 1\nrhs1 = x1\noutput = x1\nstate_cone x\n"),
            Err(Error::Syntax { line: 5, .. })
        ));
        assert!(parse_system("dim 1\nrhs1 = x1\noutput = x1\n").is_err());
        assert!(parse_system("").is_err());
    }

    #[test]
    fn config_round_trip() {
        let z = parse_system(Z_SYS).unwrap();
        assert_eq!(parse_system(&z.to_config()).unwrap(), z);
        let two = alloc::format!("{}{}", z.to_config(), z.to_config());
        assert_eq!(parse_systems(&two).unwrap().len(), 2);
    }
}
