//! Human-readable rendering of a [`VerificationReport`].

use std::fmt::Write;

use mono_sgt_core::charmap::Verdict;
use mono_sgt_core::smallgain::VerificationReport;

use crate::json::fmt_f64;

fn word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}

pub fn render_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "interconnection {}: {} ({} evidence)", r.interconnection, word(r.verdict), r.evidence);
    let _ = writeln!(s, "  condition1  {} is monotone: {}", r.condition1.subsystem, word(r.condition1.verdict));
    let _ = writeln!(s, "  condition2  {} is monotone: {}", r.condition2.subsystem, word(r.condition2.verdict));
    if let Some(o) = &r.condition2.orientation {
        let _ = writeln!(s, "              orientation: {o}");
    }
    let _ = writeln!(s, "  condition3  characteristics: {}", word(r.condition3.verdict));
    for e in &r.condition3.errors {
        let _ = writeln!(s, "              {e}");
    }
    let route = r.condition4.route.as_deref().unwrap_or("none");
    let _ = writeln!(s, "  condition4  loop (route {route}): {}", word(r.condition4.verdict));
    let _ =
        writeln!(s, "              {} closed-loop starts, bounded: {}", r.condition4.sweep.len(), r.condition4.bounded);
    for e in &r.condition4.errors {
        let _ = writeln!(s, "              {e}");
    }
    let _ = writeln!(s, "  loop equilibria: [{}]", list(&r.loop_equilibria));
    if !r.attractive_set.is_empty() {
        let _ = writeln!(s, "  attractive set:");
        for p in &r.attractive_set {
            let _ = writeln!(s, "    w = {}, x = {}, z in {{{}}}", fmt_f64(p.w), fmt_f64(p.x), list(&p.z_set));
        }
    }
    if let Some(c) = &r.convergence {
        let _ = writeln!(
            s,
            "  convergence: {} over {} starts, max distance {} (tolerance {}, t = {})",
            if c.pass { "pass" } else { "FAIL" },
            c.starts.len(),
            fmt_f64(c.max_distance),
            fmt_f64(c.dist_tol),
            fmt_f64(c.t_final)
        );
    }
    if let Some(b) = &r.blocking {
        let _ = writeln!(s, "  blocking: {b}");
    }
    s
}
