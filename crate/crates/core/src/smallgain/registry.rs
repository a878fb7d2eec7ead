use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::interconnection::Interconnection;
use crate::charmap::{compose_maps, MultiMap};
use crate::dynsys::{Expr, Interval, SystemDef};
use crate::inclusion::{make_zorro, PiecewiseLinearMap};
use crate::order::OrderCone;
use crate::{Error, Result};

const CUBIC: &str = "x1*(2*x1^2 - 9*x1 + 12)";
const R_VERTICES: [(f64, f64); 4] = [(0.0, 5.0), (0.5, 4.5), (2.5, 4.5), (3.5, 3.0)];
/// Default slope perturbation of `zorro-eps`.
pub const ZORRO_EPS: f64 = 1.5;
/// Offset of the a-priori bound `|x(t)| <= |x(0)| + 6` of the cubic loop.
pub const SEC5_X_BOUND: f64 = 6.0;

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Example {
    Interconnection(Interconnection),
    System(SystemDef),
    Map(MultiMap),
}

impl Example {
    pub fn kind(&self) -> &'static str {
        match self {
            Example::Interconnection(_) => "interconnection",
            Example::System(_) => "system",
            Example::Map(_) => "map",
        }
    }
}

/// A named example together with a one-line description.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub summary: &'static str,
    pub example: Example,
}

fn r_expr() -> String {
    let pts: Vec<String> = R_VERTICES.iter().map(|(a, b)| format!("{a:?},{b:?}")).collect();
    format!("pwl(u; {})", pts.join("; "))
}

pub fn sec5_x() -> Result<SystemDef> {
    SystemDef::from_strs("sec5-x", &["-x1 + 5 + u"], "x1")
}

/// `ż = -P(z) + y` with the decreasing output `w = 1/(1+z²)`.
pub fn sec5_z() -> Result<SystemDef> {
    SystemDef::from_strs("sec5-z", &[&format!("-({CUBIC}) + u")], "1/(1+x1^2)")?.with_output_cone(OrderCone::opposite())
}

pub fn sec5_positive_x() -> Result<SystemDef> {
    SystemDef::from_strs("sec5-positive-x", &["-x1 + 5 + 1/(1+u^2)"], "x1")?.with_input_cone(OrderCone::opposite())
}

pub fn sec5_positive_z() -> Result<SystemDef> {
    SystemDef::from_strs("sec5-positive-z", &[&format!("-({CUBIC}) + u")], "x1")
}

pub fn multiequil_x() -> Result<SystemDef> {
    SystemDef::from_strs("multiequil-x", &[&format!("-x1 + {}", r_expr())], "x1")?
        .with_input_cone(OrderCone::opposite())
}

fn state_box() -> Vec<Interval> {
    vec![Interval::new(0.0, 10.0), Interval::new(0.0, 5.0)]
}

pub fn sec5_original() -> Result<Interconnection> {
    Ok(Interconnection::new("sec5-original", sec5_x()?, sec5_z()?)?
        .with_ranges(Interval::new(0.0, 1.0), Interval::new(0.0, 12.0))?
        .with_state_box(state_box())?
        .with_x_bound(SEC5_X_BOUND))
}

pub fn sec5_positive_form() -> Result<Interconnection> {
    Ok(Interconnection::new("sec5-positive-form", sec5_positive_x()?, sec5_positive_z()?)?
        .with_ranges(Interval::new(0.0, 8.0), Interval::new(0.0, 12.0))?
        .with_state_box(state_box())?
        .with_x_bound(SEC5_X_BOUND))
}

pub fn multiequil() -> Result<Interconnection> {
    Interconnection::new("multiequil", multiequil_x()?, sec5_positive_z()?)?
        .with_ranges(Interval::new(0.0, 4.0), Interval::new(0.0, 6.0))?
        .with_state_box(state_box())
}

/// `k₁(w) = 5 + 1/(1+w²)`.
pub fn k1() -> Result<MultiMap> {
    Ok(MultiMap::closed_form(Expr::parse("5 + 1/(1+x1^2)", 1)?, Interval::new(0.0, 100.0))?.named("k1"))
}

/// Characteristic of `ż = -P(z) + y`.
pub fn k2() -> Result<MultiMap> {
    Ok(MultiMap::characteristic(sec5_positive_z()?, Interval::new(0.0, 12.0))?.named("k2"))
}

pub fn r_map() -> Result<MultiMap> {
    Ok(MultiMap::piecewise_linear(PiecewiseLinearMap::new(R_VERTICES.to_vec())?).named("R"))
}

pub fn sec5_loop() -> Result<MultiMap> {
    Ok(compose_maps(k2()?, k1()?))
}

pub fn zorro_eps(eps: f64) -> Result<MultiMap> {
    Ok(MultiMap::piecewise_linear(make_zorro(eps)?).named(&format!("zorro-eps({eps})")))
}

type Builder = fn() -> Result<Example>;

const ENTRIES: [(&str, &str, Builder); 15] = [
    ("sec5-original", "cubic loop, w = 1/(1+z²) fed into ẋ = -x + 5 + w", || {
        sec5_original().map(Example::Interconnection)
    }),
    ("sec5-positive-form", "cubic loop with the output map moved into the x-subsystem", || {
        sec5_positive_form().map(Example::Interconnection)
    }),
    ("multiequil", "ẋ = -x + R(w) against the cubic z-subsystem, three loop equilibria", || {
        multiequil().map(Example::Interconnection)
    }),
    ("sec5-x", "ẋ = -x + 5 + u", || sec5_x().map(Example::System)),
    ("sec5-z", "ż = -P(z) + u, output 1/(1+z²)", || sec5_z().map(Example::System)),
    ("sec5-positive-x", "ẋ = -x + 5 + 1/(1+u²)", || sec5_positive_x().map(Example::System)),
    ("sec5-positive-z", "ż = -P(z) + u, output z", || sec5_positive_z().map(Example::System)),
    ("multiequil-x", "ẋ = -x + R(u)", || multiequil_x().map(Example::System)),
    ("zorro", "three-segment polyline with a slope -1 middle branch", || {
        zorro_eps(0.0).map(|m| Example::Map(m.named("zorro")))
    }),
    ("zorro-eps(ε)", "zorro with middle slope -1-ε (default ε = 1.5)", || zorro_eps(ZORRO_EPS).map(Example::Map)),
    ("k1", "5 + 1/(1+w²) on [0, 100]", || k1().map(Example::Map)),
    ("k2", "characteristic of ż = -P(z) + y on [0, 12]", || k2().map(Example::Map)),
    ("R", "polyline (0,5), (0.5,4.5), (2.5,4.5), (3.5,3)", || r_map().map(Example::Map)),
    ("sec5-loop", "k2∘k1", || sec5_loop().map(Example::Map)),
    ("sec5-loop-original", "k_w∘k_y of sec5-original", || {
        sec5_original()?.w_loop().map(|m| Example::Map(m.named("sec5-loop-original")))
    }),
];

/// Names and descriptions of every builtin example.
pub fn example_names() -> Vec<(&'static str, &'static str)> {
    ENTRIES.iter().map(|(n, s, _)| (*n, *s)).collect()
}

/// Every builtin example, fully constructed.
pub fn builtin_examples() -> Result<Vec<Entry>> {
    ENTRIES
        .iter()
        .map(|(name, summary, build)| Ok(Entry { name: (*name).into(), summary, example: build()? }))
        .collect()
}

/// Looks up a builtin by name. `zorro-eps(ε)` accepts any nonnegative `ε`
/// and `zorro-eps` alone uses the default.
pub fn lookup(name: &str) -> Result<Example> {
    if let Some(arg) = name.strip_prefix("zorro-eps(").and_then(|r| r.strip_suffix(')')) {
        let eps: f64 = arg.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad ε in `{name}`")))?;
        return zorro_eps(eps).map(Example::Map);
    }
    if name == "zorro-eps" {
        return zorro_eps(ZORRO_EPS).map(Example::Map);
    }
    match ENTRIES.iter().find(|(n, _, _)| *n == name) {
        Some((_, _, build)) => build(),
        None => Err(Error::UnknownName {
            name: name.to_string(),
            available: ENTRIES.iter().map(|(n, _, _)| n.to_string()).collect(),
        }),
    }
}
