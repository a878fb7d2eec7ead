//! The `mono-sgt` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mono_sgt_core::charmap::{cardinality_profile, linspace, BranchSample, MultiMap, Verdict};
use mono_sgt_core::dynsys::{integrate, integrate_field, InputSignal, IntegratorOptions, Interval, Trajectory};
use mono_sgt_core::exec::Executor;
use mono_sgt_core::inclusion::{find_fixed_points, iterate_paths, membership_residual, PathOptions, PathSet};
use mono_sgt_core::smallgain::{builtin_examples, verify_hypotheses, Budget, Example};
use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_USAGE};
use crate::exec::Parallel;
use crate::resolve::{self, LoopFlags};
use crate::{budget, csv, json, plot, report};

#[derive(Debug, Parser)]
#[command(
    name = "mono-sgt",
    version,
    about = "Characteristics, discrete inclusions and small-gain checks for monotone SISO loops"
)]
#[command(
    after_help = "Targets are builtin names (see `mono-sgt examples`) or files. MONO_SGT_THREADS caps worker threads (0 or unset: auto)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a system, interconnection or polyline file and print it normalised.
    Parse { file: PathBuf },
    /// Integrate a system under an input, or an interconnection in closed loop.
    Simulate(SimulateArgs),
    /// Cardinality profile and branch samples of a characteristic or map.
    Char(CharArgs),
    /// Enumerate solution paths of w_{k+1} ∈ F(w_k).
    Iterate(IterateArgs),
    /// Fixed points of a set-valued map.
    FixedPoints(FixedPointsArgs),
    /// Check the four small-gain hypotheses and validate the attractive set.
    Verify(VerifyArgs),
    /// List builtin examples.
    Examples(ExamplesArgs),
    /// Write a gnuplot script and data files for an artifact or a recipe.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct LoopArgs {
    /// Input range LO:HI of the x-subsystem (file interconnections).
    #[arg(long, value_name = "LO:HI")]
    pub w_range: Option<String>,
    /// Input range LO:HI of the z-subsystem (file interconnections).
    #[arg(long, value_name = "LO:HI")]
    pub y_range: Option<String>,
    /// Box of closed-loop starts, one LO:HI per state coordinate.
    #[arg(long = "box", value_name = "LO:HI,...")]
    pub state_box: Option<String>,
    /// Offset c of the a-priori bound |x(t)| <= |x(0)| + c.
    #[arg(long, value_name = "C")]
    pub x_bound: Option<f64>,
}

impl LoopArgs {
    fn flags(&self) -> CliResult<LoopFlags> {
        Ok(LoopFlags {
            w_range: self.w_range.as_deref().map(resolve::parse_range).transpose()?,
            y_range: self.y_range.as_deref().map(resolve::parse_range).transpose()?,
            state_box: self.state_box.as_deref().map(resolve::parse_box).transpose()?,
            x_bound: self.x_bound,
        })
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub target: String,
    /// Initial state, comma separated (default: the origin moved into the state domain).
    #[arg(long, value_name = "V,...", allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// `const:V` or `pwc:FILE` with `t v` lines starting at t = 0 (systems only; default const:0).
    #[arg(long, value_name = "SPEC")]
    pub input: Option<String>,
    #[arg(long, default_value_t = 10.0, value_name = "T")]
    pub t_final: f64,
    /// Relative and absolute tolerance.
    #[arg(long, default_value = "1e-9,1e-11", value_name = "R,A")]
    pub tol: String,
    /// Maximum state change between stored rows (default: accepted steps only).
    #[arg(long, value_name = "S")]
    pub stride: Option<f64>,
    #[arg(long, value_name = "FILE.csv")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub loop_args: LoopArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Kx,
    Ky,
    Kz,
    Kw,
    WLoop,
    VLoop,
}

#[derive(Debug, Args)]
pub struct CharArgs {
    pub target: String,
    /// Input grid.
    #[arg(long, default_value = "0:10:201", value_name = "LO:HI:N")]
    pub u: String,
    /// Output characteristic h∘k instead of the state characteristic (systems).
    #[arg(long)]
    pub io: bool,
    /// Which map of an interconnection to profile.
    #[arg(long, value_enum, default_value_t = Which::WLoop)]
    pub which: Which,
    #[arg(long, value_name = "FILE.json")]
    pub out: Option<PathBuf>,
    /// Also write `u,branch_index,value` rows.
    #[arg(long, value_name = "FILE.csv")]
    pub samples_csv: Option<PathBuf>,
    #[command(flatten)]
    pub loop_args: LoopArgs,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    pub target: String,
    /// Start value(s), comma separated.
    #[arg(long, value_name = "V,...", allow_hyphen_values = true)]
    pub w0: String,
    #[arg(long, default_value_t = PathOptions::default().depth)]
    pub depth: usize,
    /// Maximum number of paths per start.
    #[arg(long, default_value_t = PathOptions::default().branch_cap)]
    pub cap: usize,
    #[arg(long, default_value_t = PathOptions::default().tol)]
    pub tol: f64,
    #[arg(long, default_value_t = PathOptions::default().escape_radius)]
    pub escape_radius: f64,
    /// Keep extending paths after they are classified.
    #[arg(long)]
    pub no_prune: bool,
    /// Domain of a system's characteristic, or a restriction of a map's domain.
    #[arg(long, value_name = "LO:HI")]
    pub domain: Option<String>,
    #[arg(long, value_name = "FILE.csv")]
    pub out: Option<PathBuf>,
    /// Also write the full path sets as JSON.
    #[arg(long, value_name = "FILE.json")]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub loop_args: LoopArgs,
}

#[derive(Debug, Args)]
pub struct FixedPointsArgs {
    pub target: String,
    /// Search interval (default: the map's domain).
    #[arg(long, value_name = "LO:HI")]
    pub range: Option<String>,
    #[arg(long, default_value_t = 401)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_name = "FILE.json")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub loop_args: LoopArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub target: String,
    #[arg(long, value_name = "FILE.json")]
    pub report: Option<PathBuf>,
    /// Closed-loop starts per axis of the state box, e.g. 5x5.
    #[arg(long, value_name = "GxH")]
    pub grid: Option<String>,
    #[arg(long, value_name = "T")]
    pub t_final: Option<f64>,
    /// JSON object overriding budget fields, or @FILE.
    #[arg(long, value_name = "JSON")]
    pub budget: Option<String>,
    /// Also write a text rendering of the report (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub text: Option<PathBuf>,
    #[command(flatten)]
    pub loop_args: LoopArgs,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    /// Write every system, interconnection and polyline as a file into DIR.
    #[arg(long, value_name = "DIR")]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// A CSV or JSON file written by another subcommand.
    pub artifact: Option<PathBuf>,
    #[arg(long, value_name = "FILE.gp")]
    pub script: PathBuf,
    /// Named figure instead of an artifact.
    #[arg(long, value_parser = plot::RECIPES)]
    pub recipe: Option<String>,
    /// Overlay this map's graph on cobweb plots.
    #[arg(long, value_name = "NAME|FILE")]
    pub map: Option<String>,
}

fn write_out(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) if p.as_os_str() == "-" => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, content).map_err(|e| CliError::analysis(format!("cannot write {}: {e}", p.display())))
        }
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("{what}: bad number `{t}`"))))
        .collect()
}

fn parse_tol(s: &str) -> CliResult<(f64, f64)> {
    match parse_list(s, "--tol")?.as_slice() {
        [r, a] if *r > 0.0 && *a > 0.0 => Ok((*r, *a)),
        _ => Err(CliError::usage(format!("--tol expects two positive numbers R,A, got `{s}`"))),
    }
}

fn parse_input(spec: &str) -> CliResult<InputSignal> {
    if let Some(v) = spec.strip_prefix("const:") {
        let v: f64 = v.trim().parse().map_err(|_| CliError::usage(format!("bad constant input `{spec}`")))?;
        return Ok(InputSignal::Constant(v));
    }
    if let Some(file) = spec.strip_prefix("pwc:") {
        let text = resolve::read_file(Path::new(file))?;
        let (mut ts, mut vs) = (Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums = parse_list(&line.split_whitespace().collect::<Vec<_>>().join(","), file)
                .map_err(|e| e.context(&format!("line {}", i + 1)))?;
            let [t, v] = nums[..] else {
                return Err(CliError::usage(format!("{file}:{}: expected `t value`", i + 1)));
            };
            ts.push(t);
            vs.push(v);
        }
        if ts.first() != Some(&0.0) {
            return Err(CliError::usage(format!("{file}: the first segment must start at t = 0")));
        }
        return Ok(InputSignal::piecewise_constant(ts[1..].to_vec(), vs)?);
    }
    Err(CliError::usage(format!("--input expects const:V or pwc:FILE, got `{spec}`")))
}

fn default_start(domain: &[Interval]) -> Vec<f64> {
    domain.iter().map(|d| 0f64.clamp(d.lo, d.hi)).collect()
}

fn parse_ugrid(s: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::usage(format!("expected LO:HI:N with LO < HI and N >= 2, got `{s}`"));
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn cmd_parse(file: &Path) -> CliResult<u8> {
    let text = resolve::read_file(file)?;
    let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let doc = resolve::parse_document(&name, &text).map_err(|e| e.context(&file.display().to_string()))?;
    print!("{}", resolve::render_document(&doc).unwrap_or_default());
    Ok(0)
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<u8> {
    let ex = resolve::resolve(&a.target, &a.loop_args.flags()?)?;
    let (rel_tol, abs_tol) = parse_tol(&a.tol)?;
    if !(a.t_final > 0.0) {
        return Err(CliError::usage("--t-final must be positive"));
    }
    let opts = IntegratorOptions { rel_tol, abs_tol, output_stride: a.stride, ..IntegratorOptions::default() };
    let x0 = a.x0.as_deref().map(|s| parse_list(s, "--x0")).transpose()?;
    let tr = match ex {
        Example::System(sys) => {
            let u = a.input.as_deref().map(parse_input).transpose()?.unwrap_or(InputSignal::Constant(0.0));
            let x0 = x0.unwrap_or_else(|| default_start(&sys.state_domain));
            integrate(&sys, &x0, &u, a.t_final, &opts)?
        }
        Example::Interconnection(ic) => {
            if a.input.is_some() {
                return Err(CliError::usage("--input applies to open-loop systems only"));
            }
            let field = ic.closed_loop();
            let x0 = x0.unwrap_or_else(|| default_start(mono_sgt_core::dynsys::VectorField::domain(&field)));
            if x0.len() != ic.dim() {
                return Err(CliError::usage(format!("--x0 needs {} values", ic.dim())));
            }
            let (times, states) = integrate_field(&field, &x0, a.t_final, &opts, &[])?;
            let mut inputs = Vec::with_capacity(times.len());
            let mut outputs = Vec::with_capacity(times.len());
            for s in &states {
                let (x, z) = ic.split(s);
                inputs.push(ic.sys_z.eval_output(z)?);
                outputs.push(ic.sys_x.eval_output(x)?);
            }
            Trajectory { times, states, inputs, outputs }
        }
        Example::Map(m) => return Err(CliError::usage(format!("`{}` is a map and cannot be simulated", m.name()))),
    };
    write_out(a.out.as_deref(), &csv::trajectory(&tr))?;
    Ok(0)
}

#[derive(Serialize)]
struct CharArtifact<'a> {
    map: &'a str,
    u_range: [f64; 2],
    grid: usize,
    profile: &'a mono_sgt_core::charmap::Profile,
}

fn cmd_char(a: &CharArgs) -> CliResult<u8> {
    let (lo, hi, n) = parse_ugrid(&a.u)?;
    let ex = resolve::resolve(&a.target, &a.loop_args.flags()?)?;
    let dom = Interval::new(lo, hi);
    let map = match ex {
        Example::System(sys) if a.io => MultiMap::io_characteristic(sys, dom)?,
        Example::System(sys) => {
            let name = format!("k[{}]", sys.name);
            MultiMap::characteristic(sys, dom)?.named(&name)
        }
        Example::Map(m) => m,
        Example::Interconnection(ic) => match a.which {
            Which::Kx => ic.k_x()?,
            Which::Ky => ic.k_y()?,
            Which::Kz => ic.k_z()?,
            Which::Kw => ic.k_w()?,
            Which::WLoop => ic.w_loop()?,
            Which::VLoop => ic.v_loop()?,
        },
    };
    let profile = cardinality_profile(&map, lo, hi, n)?;
    let art = CharArtifact { map: map.name(), u_range: [lo, hi], grid: n, profile: &profile };
    write_out(a.out.as_deref(), &json::artifact("char", &art)?)?;
    if let Some(p) = &a.samples_csv {
        write_out(Some(p), &csv::samples(&profile))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct PathsArtifact<'a> {
    map: &'a str,
    options: PathOptions,
    sets: &'a [PathSet],
}

fn cmd_iterate(a: &IterateArgs) -> CliResult<u8> {
    let ex = resolve::resolve(&a.target, &a.loop_args.flags()?)?;
    let domain = a.domain.as_deref().map(resolve::parse_range).transpose()?;
    let map = resolve::as_map(ex, domain)?;
    let starts = parse_list(&a.w0, "--w0")?;
    let dom = map.domain();
    if let Some(w) = starts.iter().find(|w| !dom.contains(**w)) {
        return Err(CliError::usage(format!(
            "--w0 {w} lies outside the domain [{}, {}] of {}",
            dom.lo,
            dom.hi,
            map.name()
        )));
    }
    let opts = PathOptions {
        depth: a.depth,
        branch_cap: a.cap,
        tol: a.tol,
        escape_radius: a.escape_radius,
        prune: !a.no_prune,
        ..PathOptions::default()
    };
    let exec = executor()?;
    let sets: Vec<PathSet> =
        exec.run(starts.len(), |i| iterate_paths(&map, starts[i], &opts)).into_iter().collect::<Result<_, _>>()?;
    for s in sets.iter().filter(|s| s.truncated) {
        eprintln!("warning: paths from {} truncated at {} (raise --cap)", json::fmt_f64(s.start), s.paths.len());
    }
    write_out(a.out.as_deref(), &csv::paths(&sets))?;
    if let Some(p) = &a.json {
        let art = PathsArtifact { map: map.name(), options: opts, sets: &sets };
        write_out(Some(p), &json::artifact("paths", &art)?)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct FixedArtifact<'a> {
    map: &'a str,
    range: [f64; 2],
    grid: usize,
    tol: f64,
    fixed_points: &'a [f64],
    residuals: Vec<f64>,
    graph: Vec<BranchSample>,
}

const GRAPH_SAMPLES: usize = 201;

fn cmd_fixed_points(a: &FixedPointsArgs) -> CliResult<u8> {
    let ex = resolve::resolve(&a.target, &a.loop_args.flags()?)?;
    let range = a.range.as_deref().map(resolve::parse_range).transpose()?;
    let map = resolve::as_map(ex, range)?;
    let dom = range.unwrap_or(map.domain());
    let fps = find_fixed_points(&map, dom.lo, dom.hi, a.grid, a.tol)?;
    let residuals = fps.iter().map(|w| membership_residual(&map, *w)).collect::<Result<_, _>>()?;
    let graph = linspace(dom.lo, dom.hi, GRAPH_SAMPLES)
        .into_iter()
        .map(|u| Ok(BranchSample { u, values: map.eval(u)? }))
        .collect::<CliResult<_>>()?;
    let art = FixedArtifact {
        map: map.name(),
        range: [dom.lo, dom.hi],
        grid: a.grid,
        tol: a.tol,
        fixed_points: &fps,
        residuals,
        graph,
    };
    write_out(a.out.as_deref(), &json::artifact("fixed-points", &art)?)?;
    Ok(0)
}

fn executor() -> CliResult<Parallel> {
    Parallel::from_env().map_err(CliError::usage)
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<u8> {
    let ic = match resolve::resolve(&a.target, &a.loop_args.flags()?)? {
        Example::Interconnection(ic) => ic,
        other => {
            return Err(CliError::usage(format!(
                "verify needs an interconnection, `{}` is a {}",
                a.target,
                other.kind()
            )))
        }
    };
    let mut b = Budget::default();
    if let Some(f) = &a.budget {
        budget::apply_fragment(&mut b, f)?;
    }
    if let Some(g) = &a.grid {
        b.sweep_grid = budget::parse_grid(g)?;
    }
    if let Some(t) = a.t_final {
        b.t_final = t;
    }
    b.validate()?;
    b.sweep_shape(ic.dim())?;
    let r = verify_hypotheses(&ic, &b, &executor()?)?;
    write_out(a.report.as_deref(), &json::artifact("verify", &r)?)?;
    if let Some(t) = &a.text {
        write_out(Some(t), &report::render_text(&r))?;
    }
    if r.verdict == Verdict::Pass {
        Ok(0)
    } else {
        eprintln!("verdict {:?}: {}", r.verdict, r.blocking.as_deref().unwrap_or("see report"));
        Ok(crate::error::EXIT_ANALYSIS)
    }
}

fn file_name(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_').collect()
}

fn cmd_examples(a: &ExamplesArgs) -> CliResult<u8> {
    let entries = builtin_examples()?;
    let mut listing = String::new();
    for e in &entries {
        listing.push_str(&format!("{}\t{}\t{}\n", e.name, e.example.kind(), e.summary));
    }
    if let Some(dir) = &a.emit {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::analysis(format!("cannot create {}: {e}", dir.display())))?;
        for e in &entries {
            let stem = file_name(&e.name);
            let (doc, ext) = match &e.example {
                Example::Map(m) => (Example::Map(m.clone().named(&stem)), "pwl"),
                other => (other.clone(), "cfg"),
            };
            let Some(text) = resolve::render_document(&doc) else { continue };
            let path = dir.join(format!("{stem}.{ext}"));
            write_out(Some(&path), &text)?;
        }
    }
    print!("{listing}");
    Ok(0)
}

fn cmd_plot(a: &PlotArgs) -> CliResult<u8> {
    let fig = match (&a.artifact, &a.recipe) {
        (Some(_), Some(_)) => return Err(CliError::usage("give either an artifact or --recipe, not both")),
        (None, None) => return Err(CliError::usage("plot needs an artifact or --recipe")),
        (None, Some(r)) => plot::recipe(r)?,
        (Some(path), None) => {
            let text = resolve::read_file(path)?;
            let map = match &a.map {
                Some(m) => Some(resolve::as_map(resolve::resolve(m, &LoopFlags::default())?, None)?),
                None => None,
            };
            plot::artifact_figure(&path.display().to_string(), &text, map.as_ref())?
        }
    };
    let stem = a.script.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    let dir = a.script.parent().unwrap_or(Path::new(""));
    let (script, data) = fig.render(&stem);
    for (name, body) in &data {
        write_out(Some(&dir.join(name)), body)?;
    }
    write_out(Some(&a.script), &script)?;
    Ok(0)
}

fn dispatch(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Parse { file } => cmd_parse(file),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Char(a) => cmd_char(a),
        Command::Iterate(a) => cmd_iterate(a),
        Command::FixedPoints(a) => cmd_fixed_points(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Examples(a) => cmd_examples(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status: 0 on success, 1 on analysis failure, 2 on usage or parse errors.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
