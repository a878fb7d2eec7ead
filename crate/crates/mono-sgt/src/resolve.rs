//! Turning a command-line target (a builtin name or a file) into something
//! the analyses can run on.
//!
//! Files come in two flavours. A polyline file starts with the keyword
//! `polyline` and lists one `x y` vertex per line. Anything else is read with
//! the system grammar: one block is a system, two blocks are an
//! interconnection whose first block is the x-subsystem. An interconnection
//! file may also carry a line
//!
//! ```text
//! loop w_range 0:1 y_range 0:12 box 0:10,0:5 x_bound 6
//! ```
//!
//! with any subset of the keys; command-line loop flags override it.

use std::path::Path;

use mono_sgt_core::charmap::MultiMap;
use mono_sgt_core::dynsys::{parse_systems, Interval, SystemDef};
use mono_sgt_core::inclusion::PiecewiseLinearMap;
use mono_sgt_core::smallgain::{registry, Example, Interconnection};
use mono_sgt_core::Error;

use crate::error::{CliError, CliResult};

/// Ranges and bounds for interconnections read from files; builtins carry
/// their own.
#[derive(Debug, Clone, Default)]
pub struct LoopFlags {
    pub w_range: Option<Interval>,
    pub y_range: Option<Interval>,
    pub state_box: Option<Vec<Interval>>,
    pub x_bound: Option<f64>,
}

impl LoopFlags {
    pub fn is_empty(&self) -> bool {
        self.w_range.is_none() && self.y_range.is_none() && self.state_box.is_none() && self.x_bound.is_none()
    }

    pub fn apply(&self, mut ic: Interconnection) -> CliResult<Interconnection> {
        if self.w_range.is_some() || self.y_range.is_some() {
            let (w, y) = (self.w_range.unwrap_or(ic.w_range), self.y_range.unwrap_or(ic.y_range));
            ic = ic.with_ranges(w, y)?;
        }
        if let Some(b) = &self.state_box {
            ic = ic.with_state_box(b.clone())?;
        }
        if let Some(off) = self.x_bound {
            ic = ic.with_x_bound(off);
        }
        Ok(ic)
    }
}

/// Parses `LO:HI`.
pub fn parse_range(s: &str) -> CliResult<Interval> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| CliError::usage(format!("expected LO:HI, got `{s}`")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad number `{t}` in `{s}`")));
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::usage(format!("range `{s}` must satisfy LO < HI with finite ends")));
    }
    Ok(Interval::new(lo, hi))
}

/// Parses a comma-separated list of `LO:HI` ranges.
pub fn parse_box(s: &str) -> CliResult<Vec<Interval>> {
    s.split(',').map(parse_range).collect()
}

/// Parses a polyline document.
pub fn parse_polyline(text: &str) -> CliResult<PiecewiseLinearMap> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "polyline")) => {}
        Some((n, _)) => return Err(CliError::usage(format!("line {n}: expected `polyline`"))),
        None => return Err(CliError::usage("empty polyline document")),
    }
    let mut vertices = Vec::new();
    for (n, l) in lines {
        let nums: Vec<&str> = l.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let parsed: Option<Vec<f64>> = nums.iter().map(|t| t.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[x, y]) => vertices.push((x, y)),
            _ => return Err(CliError::usage(format!("line {n}: expected a vertex `x y`"))),
        }
    }
    Ok(PiecewiseLinearMap::new(vertices)?)
}

/// Renders a polyline in the format read by [`parse_polyline`].
pub fn polyline_to_text(name: &str, map: &PiecewiseLinearMap) -> String {
    let mut s = format!("# {name}\npolyline\n");
    for (x, y) in map.vertices() {
        s.push_str(&format!("{x:?} {y:?}\n"));
    }
    s
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into())
}

fn parse_loop_line(line: &str, n: usize) -> CliResult<LoopFlags> {
    let bad = |m: String| CliError::usage(format!("line {n}: {m}"));
    let toks: Vec<&str> = line.split_whitespace().skip(1).collect();
    if !toks.len().is_multiple_of(2) {
        return Err(bad("`loop` expects key value pairs".into()));
    }
    let mut f = LoopFlags::default();
    for kv in toks.chunks(2) {
        let v = kv[1];
        match kv[0] {
            "w_range" => f.w_range = Some(parse_range(v).map_err(|e| bad(e.message))?),
            "y_range" => f.y_range = Some(parse_range(v).map_err(|e| bad(e.message))?),
            "box" => f.state_box = Some(parse_box(v).map_err(|e| bad(e.message))?),
            "x_bound" => f.x_bound = Some(v.parse().map_err(|_| bad(format!("bad x_bound `{v}`")))?),
            k => return Err(bad(format!("unknown loop key `{k}`"))),
        }
    }
    Ok(f)
}

/// Removes `loop` lines (keeping line numbers intact) and parses them.
fn split_loop_directives(text: &str) -> CliResult<(String, Option<LoopFlags>)> {
    let mut rest = String::with_capacity(text.len());
    let mut flags = None;
    for (i, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("").trim();
        if code == "loop" || code.starts_with("loop ") || code.starts_with("loop\t") {
            if flags.is_some() {
                return Err(CliError::usage(format!("line {}: duplicate `loop` line", i + 1)));
            }
            flags = Some(parse_loop_line(code, i + 1)?);
        } else {
            rest.push_str(raw);
        }
        rest.push('\n');
    }
    Ok((rest, flags))
}

/// Renders the `loop` line describing `ic`.
pub fn loop_line(ic: &Interconnection) -> String {
    let r = |i: &Interval| format!("{:?}:{:?}", i.lo, i.hi);
    let bx: Vec<String> = ic.state_box.iter().map(r).collect();
    let mut s = format!("loop w_range {} y_range {} box {}", r(&ic.w_range), r(&ic.y_range), bx.join(","));
    if let Some(c) = ic.x_bound_offset {
        s.push_str(&format!(" x_bound {c:?}"));
    }
    s
}

/// Parses the contents of a file target.
pub fn parse_document(name: &str, text: &str) -> CliResult<Example> {
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    if first == Some("polyline") {
        return Ok(Example::Map(MultiMap::piecewise_linear(parse_polyline(text)?).named(name)));
    }
    let (text, flags) = split_loop_directives(text)?;
    let mut systems = parse_systems(&text)?;
    match (systems.len(), flags) {
        (1, None) => Ok(Example::System(systems.remove(0))),
        (1, Some(_)) => Err(CliError::usage("a `loop` line needs two system blocks")),
        (2, flags) => {
            let z = systems.pop().expect("two systems");
            let x = systems.pop().expect("two systems");
            let ic = Interconnection::new(name, x, z)?;
            Ok(Example::Interconnection(flags.unwrap_or_default().apply(ic)?))
        }
        (n, _) => Err(CliError::usage(format!("expected one or two system blocks, found {n}"))),
    }
}

/// Text that [`parse_document`] reads back into `ex`, if it has one.
pub fn render_document(ex: &Example) -> Option<String> {
    match ex {
        Example::System(s) => Some(s.to_config()),
        Example::Interconnection(ic) => Some(format!(
            "# {}: x-subsystem first\n{}\n{}{}",
            ic.name,
            loop_line(ic),
            ic.sys_x.to_config(),
            ic.sys_z.to_config()
        )),
        Example::Map(m) => m.as_polyline().map(|p| polyline_to_text(m.name(), p)),
    }
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Resolves a builtin name first and a file path second.
pub fn resolve(target: &str, flags: &LoopFlags) -> CliResult<Example> {
    let ex = match registry::lookup(target) {
        Ok(ex) => ex,
        Err(Error::UnknownName { available, .. }) => {
            let path = Path::new(target);
            if !path.exists() {
                return Err(CliError::usage(format!(
                    "`{target}` is neither a builtin nor a file; builtins: {}",
                    available.join(", ")
                )));
            }
            let text = read_file(path)?;
            parse_document(&file_stem(path), &text).map_err(|e| e.context(&path.display().to_string()))?
        }
        Err(e) => return Err(e.into()),
    };
    match ex {
        Example::Interconnection(ic) => Ok(Example::Interconnection(flags.apply(ic)?)),
        other if !flags.is_empty() => {
            Err(CliError::usage(format!("loop flags only apply to interconnections, `{target}` is a {}", other.kind())))
        }
        other => Ok(other),
    }
}

/// The map a discrete-inclusion command iterates: a map as is, the w-loop of
/// an interconnection, or the characteristic of a scalar system on `domain`.
pub fn as_map(ex: Example, domain: Option<Interval>) -> CliResult<MultiMap> {
    let m = match ex {
        Example::Map(m) => m,
        Example::Interconnection(ic) => ic.w_loop()?,
        Example::System(sys) => {
            let name = sys.name.clone();
            MultiMap::characteristic(sys, domain.unwrap_or(Interval::new(0.0, 10.0)))?.named(&format!("k[{name}]"))
        }
    };
    match domain {
        Some(d) if d != m.domain() => Ok(m.with_domain(d)?),
        _ => Ok(m),
    }
}

pub fn as_system(ex: Example, target: &str) -> CliResult<SystemDef> {
    match ex {
        Example::System(s) => Ok(s),
        other => Err(CliError::usage(format!("`{target}` is a {}, expected a system", other.kind()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_round_trip() {
        let z = mono_sgt_core::inclusion::make_zorro(1.5).unwrap();
        let text = polyline_to_text("zorro", &z);
        assert_eq!(parse_polyline(&text).unwrap(), z);
        assert!(parse_polyline("polyline\n0 0\n1\n").is_err());
        assert!(parse_polyline("vertices\n0 0\n").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:2.5").unwrap(), Interval::new(0.0, 2.5));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("x").is_err());
        assert_eq!(parse_box("0:1,2:3").unwrap().len(), 2);
    }

    #[test]
    fn interconnection_round_trip() {
        let ic = registry::sec5_original().unwrap();
        let text = render_document(&Example::Interconnection(ic.clone())).unwrap();
        let Example::Interconnection(back) = parse_document("sec5-original", &text).unwrap() else { panic!() };
        assert_eq!((back.w_range, back.y_range, back.x_bound_offset), (ic.w_range, ic.y_range, ic.x_bound_offset));
        assert_eq!(back.state_box, ic.state_box);
        assert_eq!(render_document(&Example::Interconnection(back)).unwrap(), text);
    }

    #[test]
    fn loop_line_errors_keep_line_numbers() {
        let e = parse_document("x", "# c\nloop w_range 1:0\n").unwrap_err();
        assert!(e.message.starts_with("line 2:"), "{}", e.message);
        let sys = registry::sec5_x().unwrap().to_config();
        assert!(parse_document("x", &format!("loop x_bound 1\n{sys}")).is_err());
        let z = registry::sec5_z().unwrap().to_config();
        let e = parse_document("x", &format!("loop\n{sys}{z}dim two\n")).unwrap_err();
        let line = 1 + sys.lines().count() + z.lines().count() + 1;
        assert!(e.message.contains(&format!("at {line}:")), "{}", e.message);
    }

    #[test]
    fn unknown_target_is_a_usage_error() {
        let e = resolve("definitely-not-here", &LoopFlags::default()).unwrap_err();
        assert_eq!(e.code, crate::error::EXIT_USAGE);
        assert!(e.message.contains("sec5-original"));
    }
}
