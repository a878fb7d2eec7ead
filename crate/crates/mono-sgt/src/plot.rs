//! Gnuplot scripts with plain whitespace-separated data files.
//!
//! A [`Figure`] renders to a script plus `<stem>-<name>.dat` files, all
//! placed next to each other; the script refers to the data files by
//! relative name, so gnuplot has to be run from that directory.

use mono_sgt_core::charmap::{linspace, MultiMap};
use mono_sgt_core::inclusion::{InclusionPath, PathSet};
use mono_sgt_core::smallgain::registry;
use serde_json::Value;

use crate::csv::Table;
use crate::error::{CliError, CliResult};
use crate::json::fmt_f64;

/// One data file; rows are numbers, blank lines separate line segments.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub name: String,
    pub body: String,
}

impl Dataset {
    fn new(name: &str) -> Self {
        Self { name: name.into(), body: String::new() }
    }

    fn row(&mut self, cells: &[f64]) {
        let cells: Vec<String> = cells.iter().map(|v| fmt_f64(*v)).collect();
        self.body.push_str(&cells.join(" "));
        self.body.push('\n');
    }

    fn gap(&mut self) {
        self.body.push('\n');
    }
}

#[derive(Debug, Clone)]
struct Layer {
    data: String,
    using: String,
    style: String,
    title: String,
}

#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    datasets: Vec<Dataset>,
    layers: Vec<Layer>,
    /// Extra `set …` lines emitted before the plot command.
    extra: Vec<String>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl Figure {
    pub fn new(title: &str, xlabel: &str, ylabel: &str) -> Self {
        Self { title: title.into(), xlabel: xlabel.into(), ylabel: ylabel.into(), ..Self::default() }
    }

    fn add(&mut self, ds: Dataset) {
        if !self.datasets.iter().any(|d| d.name == ds.name) {
            self.datasets.push(ds);
        }
    }

    fn layer(&mut self, data: &str, using: &str, style: &str, title: &str) {
        self.layers.push(Layer { data: data.into(), using: using.into(), style: style.into(), title: title.into() });
    }

    fn set(&mut self, line: String) {
        self.extra.push(line);
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// The script text and the `(file name, contents)` of each data file.
    pub fn render(&self, stem: &str) -> (String, Vec<(String, String)>) {
        let file = |name: &str| format!("{stem}-{name}.dat");
        let mut s = String::new();
        s.push_str(&format!("# gnuplot {stem}.gp (run from this directory)\n"));
        s.push_str("set terminal svg size 800,600 dynamic\n");
        s.push_str(&format!("set output '{stem}.svg'\n"));
        s.push_str(&format!("set title {}\n", quote(&self.title)));
        s.push_str(&format!("set xlabel {}\n", quote(&self.xlabel)));
        s.push_str(&format!("set ylabel {}\n", quote(&self.ylabel)));
        s.push_str("set key outside right\nset grid\n");
        for e in &self.extra {
            s.push_str(e);
            s.push('\n');
        }
        let parts: Vec<String> = self
            .layers
            .iter()
            .map(|l| format!("'{}' using {} with {} title {}", file(&l.data), l.using, l.style, quote(&l.title)))
            .collect();
        if parts.is_empty() {
            s.push_str("# nothing to plot\n");
        } else {
            s.push_str("plot ");
            s.push_str(&parts.join(", \\\n     "));
            s.push('\n');
        }
        let data = self.datasets.iter().map(|d| (file(&d.name), d.body.clone())).collect();
        (s, data)
    }
}

fn diagonal(lo: f64, hi: f64) -> Dataset {
    let mut d = Dataset::new("diagonal");
    d.row(&[lo, lo]);
    d.row(&[hi, hi]);
    d
}

/// Graph of a map: the vertex chain for polylines, sampled points otherwise.
pub fn graph_dataset(map: &MultiMap, name: &str, samples: usize) -> CliResult<(Dataset, &'static str)> {
    let mut d = Dataset::new(name);
    if let Some(p) = map.as_polyline() {
        for (x, y) in p.vertices() {
            d.row(&[*x, *y]);
        }
        return Ok((d, "lines"));
    }
    let dom = map.domain();
    for w in linspace(dom.lo, dom.hi, samples) {
        for v in map.eval(w)? {
            d.row(&[w, v]);
        }
    }
    Ok((d, "points pt 7 ps 0.3"))
}

fn cobweb_rows(d: &mut Dataset, values: &[f64]) {
    let Some(&w0) = values.first() else { return };
    d.row(&[w0, w0]);
    for pair in values.windows(2) {
        d.row(&[pair[0], pair[1]]);
        d.row(&[pair[1], pair[1]]);
    }
    d.gap();
}

fn cobweb_figure(paths: &[Vec<f64>], map: Option<&MultiMap>) -> CliResult<Figure> {
    let mut fig = Figure::new("cobweb of w_{k+1} ∈ F(w_k)", "w_k", "w_{k+1}");
    let mut web = Dataset::new("cobweb");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in paths {
        cobweb_rows(&mut web, p);
        for v in p.iter().filter(|v| v.is_finite()) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if let Some(m) = map {
        let (g, style) = graph_dataset(m, "graph", 401)?;
        fig.add(g);
        fig.layer("graph", "1:2", style, m.name());
        lo = lo.min(m.domain().lo);
        hi = hi.max(m.domain().hi);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    fig.add(diagonal(lo, hi));
    fig.layer("diagonal", "1:2", "lines dt 2 lc rgb 'gray'", "w_{k+1} = w_k");
    fig.add(web);
    fig.layer("cobweb", "1:2", "lines lw 1.5", "paths");
    Ok(fig)
}

/// Cobweb figure for a set of enumerated paths.
pub fn paths_figure(sets: &[PathSet], map: Option<&MultiMap>) -> CliResult<Figure> {
    let values: Vec<Vec<f64>> =
        sets.iter().flat_map(|s| s.paths.iter().map(|p: &InclusionPath| p.values.clone())).collect();
    cobweb_figure(&values, map)
}

fn trajectory_figure(t: &Table) -> CliResult<Figure> {
    let mut fig = Figure::new("trajectory", "t", "value");
    let mut d = Dataset::new("trajectory");
    for r in 0..t.rows.len() {
        let row: Vec<f64> = (0..t.header.len()).map(|c| t.number(r, c)).collect::<CliResult<_>>()?;
        d.row(&row);
    }
    fig.add(d);
    for (i, h) in t.header.iter().enumerate().skip(1) {
        fig.layer("trajectory", &format!("1:{}", i + 1), "lines", h);
    }
    Ok(fig)
}

fn paths_csv_figure(t: &Table, map: Option<&MultiMap>) -> CliResult<Figure> {
    let (s, p, v) = (t.column("start"), t.column("path"), t.column("value"));
    let (Some(s), Some(p), Some(v)) = (s, p, v) else {
        return Err(CliError::usage("paths CSV needs start, path and value columns"));
    };
    let mut paths: Vec<Vec<f64>> = Vec::new();
    let mut key: Option<(String, String)> = None;
    for r in 0..t.rows.len() {
        let k = (t.rows[r][s].clone(), t.rows[r][p].clone());
        if key.as_ref() != Some(&k) {
            paths.push(Vec::new());
            key = Some(k);
        }
        paths.last_mut().expect("pushed").push(t.number(r, v)?);
    }
    cobweb_figure(&paths, map)
}

fn samples_csv_figure(t: &Table) -> CliResult<Figure> {
    let mut fig = Figure::new("characteristic samples", "u", "value");
    let mut d = Dataset::new("samples");
    for r in 0..t.rows.len() {
        d.row(&[t.number(r, 0)?, t.number(r, 1)?, t.number(r, 2)?]);
    }
    fig.add(d);
    fig.layer("samples", "1:3:2", "points pt 7 ps 0.4 lc variable", "branches");
    Ok(fig)
}

fn num(v: &Value) -> Option<f64> {
    v.as_f64()
}

fn nums(v: &Value) -> Vec<f64> {
    v.as_array().map(|a| a.iter().filter_map(num).collect()).unwrap_or_default()
}

fn field<'a>(v: &'a Value, path: &[&str]) -> CliResult<&'a Value> {
    let mut cur = v;
    for k in path {
        cur = cur.get(k).ok_or_else(|| CliError::usage(format!("JSON artifact lacks `{}`", path.join("."))))?;
    }
    Ok(cur)
}

fn sample_rows(d: &mut Dataset, samples: &Value) {
    for s in samples.as_array().into_iter().flatten() {
        let Some(u) = s.get("u").and_then(num) else { continue };
        for (i, v) in nums(&s["values"]).into_iter().enumerate() {
            d.row(&[u, v, i as f64]);
        }
    }
}

fn char_figure(v: &Value) -> CliResult<Figure> {
    let name = v.get("map").and_then(Value::as_str).unwrap_or("map");
    let mut fig = Figure::new(&format!("characteristic {name}"), "u", "equilibria");
    let mut d = Dataset::new("samples");
    sample_rows(&mut d, field(v, &["profile", "samples"])?);
    for f in nums(field(v, &["profile", "folds"])?) {
        fig.set(format!("set arrow from {0}, graph 0 to {0}, graph 1 nohead dt 3 lc rgb 'gray'", fmt_f64(f)));
    }
    fig.add(d);
    fig.layer("samples", "1:2:3", "points pt 7 ps 0.4 lc variable", "branch values");
    Ok(fig)
}

fn fixed_points_figure(v: &Value) -> CliResult<Figure> {
    let name = v.get("map").and_then(Value::as_str).unwrap_or("F");
    let mut fig = Figure::new(&format!("fixed points of {name}"), "w", "F(w)");
    let mut g = Dataset::new("graph");
    sample_rows(&mut g, field(v, &["graph"])?);
    let range = nums(field(v, &["range"])?);
    let (lo, hi) = match range.as_slice() {
        [lo, hi] => (*lo, *hi),
        _ => return Err(CliError::usage("fixed-points artifact needs a two-element range")),
    };
    let mut fp = Dataset::new("fixed");
    for w in nums(field(v, &["fixed_points"])?) {
        fp.row(&[w, w]);
    }
    fig.add(g);
    fig.add(diagonal(lo, hi));
    fig.add(fp);
    fig.layer("graph", "1:2", "points pt 7 ps 0.3", name);
    fig.layer("diagonal", "1:2", "lines dt 2 lc rgb 'gray'", "w");
    fig.layer("fixed", "1:2", "points pt 6 ps 1.5", "fixed points");
    Ok(fig)
}

fn verify_figure(v: &Value) -> CliResult<Figure> {
    let name = v.get("interconnection").and_then(Value::as_str).unwrap_or("loop");
    let verdict = v.get("verdict").and_then(Value::as_str).unwrap_or("?");
    let mut fig = Figure::new(&format!("{name}: verdict {verdict}"), "x_1", "z_1");
    let records = match v.get("convergence").filter(|c| !c.is_null()) {
        Some(c) => field(c, &["starts"])?,
        None => field(v, &["condition4", "sweep"])?,
    };
    let mut moves = Dataset::new("starts");
    for r in records.as_array().into_iter().flatten() {
        let (a, b) = (nums(&r["x0"]), nums(&r["terminal"]));
        if a.len() >= 2 && b.len() >= 2 {
            moves.row(&[a[0], a[1], b[0] - a[0], b[1] - a[1]]);
        }
    }
    let mut pairs = Dataset::new("attractive");
    for p in field(v, &["attractive_set"])?.as_array().into_iter().flatten() {
        let Some(x) = p.get("x").and_then(num) else { continue };
        for z in nums(&p["z_set"]) {
            pairs.row(&[x, z]);
        }
    }
    fig.add(moves);
    fig.add(pairs);
    fig.layer("starts", "1:2:3:4", "vectors head filled lc rgb 'gray'", "start to terminal state");
    fig.layer("attractive", "1:2", "points pt 7 ps 1.5 lc rgb 'red'", "attractive set");
    Ok(fig)
}

fn paths_json_figure(v: &Value, map: Option<&MultiMap>) -> CliResult<Figure> {
    let values: Vec<Vec<f64>> = field(v, &["sets"])?
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|s| s["paths"].as_array().into_iter().flatten().map(|p| nums(&p["values"])))
        .collect();
    cobweb_figure(&values, map)
}

/// Figure for any CSV or JSON artifact written by the CLI. `map` overlays a
/// graph on cobweb plots.
pub fn artifact_figure(file_name: &str, text: &str, map: Option<&MultiMap>) -> CliResult<Figure> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("{file_name}: invalid JSON: {e}")))?;
        return match v.get("artifact").and_then(Value::as_str) {
            Some("char") => char_figure(&v),
            Some("fixed-points") => fixed_points_figure(&v),
            Some("verify") => verify_figure(&v),
            Some("paths") => paths_json_figure(&v, map),
            Some(other) => Err(CliError::usage(format!("{file_name}: unknown artifact kind `{other}`"))),
            None => Err(CliError::usage(format!("{file_name}: JSON without an `artifact` field"))),
        };
    }
    let t = Table::parse(text).map_err(|e| e.context(file_name))?;
    let h: Vec<&str> = t.header.iter().map(String::as_str).collect();
    match h.as_slice() {
        ["t", .., "u", "y"] => trajectory_figure(&t),
        ["start", "path", "step", "value", "branch", "class"] => paths_csv_figure(&t, map),
        ["u", "branch_index", "value"] => samples_csv_figure(&t),
        _ => Err(CliError::usage(format!("{file_name}: unrecognised CSV header `{}`", t.header.join(",")))),
    }
}

pub const RECIPES: [&str; 2] = ["zorro", "characteristics"];

fn polyline_dataset(name: &str, map: &MultiMap) -> Dataset {
    let mut d = Dataset::new(name);
    for (x, y) in map.as_polyline().expect("polyline").vertices() {
        d.row(&[*x, *y]);
    }
    d
}

/// The Zorro map ABCD against its perturbation ABED with ε = 1.5.
fn zorro_recipe() -> CliResult<Figure> {
    let eps = registry::ZORRO_EPS;
    let zorro = registry::zorro_eps(0.0)?;
    let pert = registry::zorro_eps(eps)?;
    let mut fig = Figure::new(&format!("inverted Zorro map F (ABCD) and F_ε, ε = {eps} (ABED)"), "w", "F(w)");
    fig.set("set size square\nset xrange [0:1]\nset yrange [0:1]".into());
    let labels = [("A", 0.0, 0.0), ("B", 0.5, 0.25), ("C", 0.25, 0.5), ("D", 1.0, 1.0)];
    for (l, x, y) in labels {
        fig.set(format!("set label '{l}' at {}, {} offset 0.6, -0.6", fmt_f64(x), fmt_f64(y)));
    }
    let e = pert.as_polyline().expect("polyline").vertices()[2];
    fig.set(format!("set label 'E' at {}, {} offset 0.6, -0.6", fmt_f64(e.0), fmt_f64(e.1)));
    fig.add(polyline_dataset("abcd", &zorro));
    fig.add(polyline_dataset("abed", &pert));
    fig.add(diagonal(0.0, 1.0));
    fig.layer("abcd", "1:2", "linespoints lw 2 pt 7", "F (ABCD)");
    fig.layer("abed", "1:2", "linespoints lw 2 dt 2 pt 5", "F_ε (ABED)");
    fig.layer("diagonal", "1:2", "lines dt 3 lc rgb 'gray'", "identity");
    Ok(fig)
}

/// k₁(w) and R(w) against w, k₂(y) drawn transposed as the points (k₂(y), y)
/// so that intersections are loop equilibria.
fn characteristics_recipe() -> CliResult<Figure> {
    let mut fig = Figure::new("characteristics k_1(w), k_2(y) and R(w)", "w (k_2 values)", "y");
    fig.set("set xrange [0:3.5]\nset yrange [0:6]".into());
    let k1 = registry::k1()?;
    let mut d1 = Dataset::new("k1");
    for w in linspace(0.0, 3.5, 351) {
        for v in k1.eval(w)? {
            d1.row(&[w, v]);
        }
    }
    let k2 = registry::k2()?;
    let mut d2 = Dataset::new("k2");
    for y in linspace(0.0, 6.0, 601) {
        for v in k2.eval(y)? {
            d2.row(&[v, y]);
        }
    }
    fig.add(d1);
    fig.add(d2);
    fig.add(polyline_dataset("R", &registry::r_map()?));
    fig.layer("k1", "1:2", "lines lw 2", "k_1(w)");
    fig.layer("k2", "1:2", "points pt 7 ps 0.3", "k_2(y)");
    fig.layer("R", "1:2", "lines lw 2 dt 2", "R(w)");
    Ok(fig)
}

pub fn recipe(name: &str) -> CliResult<Figure> {
    match name {
        "zorro" => zorro_recipe(),
        "characteristics" => characteristics_recipe(),
        _ => Err(CliError::usage(format!("unknown recipe `{name}`; available: {}", RECIPES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zorro_recipe_contains_both_polylines() {
        let (script, data) = recipe("zorro").unwrap().render("fig1");
        assert!(script.contains("'fig1-abcd.dat'") && script.contains("'fig1-abed.dat'"));
        let abed = &data.iter().find(|(n, _)| n == "fig1-abed.dat").unwrap().1;
        // E = ((1+2ε)/(4+4ε), 1/2) with ε = 1.5.
        assert!(abed.contains(&format!("{} 0.5", fmt_f64(4.0 / 10.0))), "{abed}");
    }

    #[test]
    fn characteristics_recipe_k2_points_lie_on_the_cubic() {
        let (_, data) = recipe("characteristics").unwrap().render("f2");
        let k2 = &data.iter().find(|(n, _)| n == "f2-k2.dat").unwrap().1;
        let mut n = 0;
        for line in k2.lines() {
            let v: Vec<f64> = line.split(' ').map(|t| t.parse().unwrap()).collect();
            let z = v[0];
            assert!((z * (2.0 * z * z - 9.0 * z + 12.0) - v[1]).abs() < 1e-9);
            n += 1;
        }
        assert!(n > 601, "triple-valued stretch adds rows");
    }

    #[test]
    fn unknown_csv_is_rejected() {
        assert!(artifact_figure("x.csv", "a,b\n1,2\n", None).is_err());
        assert!(artifact_figure("x.json", "{\"artifact\": \"nope\"}", None).is_err());
    }
}
