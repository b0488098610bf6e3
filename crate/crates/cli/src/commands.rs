//! Subcommand bodies. Each returns the report value, a text rendering and
//! the exit code.

use std::fmt::Write as _;

use casorati_core::catalog::{self, CatalogEntry, EntrySummary, GeometryFile};
use casorati_core::extremum::{solve_closed_form, solve_oracle, ExtremumProblem};
use casorati_core::verify::{
    self, holds_within, InequalityReport, InvariantsReport, SectionReport, SyntheticConfig, SyntheticSummary,
    TheoremId, HOLD_TOL,
};
use casorati_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exit::{self, Failure};
use crate::{Cli, Command, Global};

/// Agreement required between the closed-form and KKT minimizers.
const ORACLE_TOL: f64 = 1e-8;

pub struct Outcome {
    pub command: &'static str,
    pub code: u8,
    pub result: Value,
    pub text: String,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure {
        code: exit::INTERNAL,
        message: format!("serializing report: {e}"),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    if let Some(tol) = g.tolerance {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Failure::usage(format!(
                "--tolerance must be a finite non-negative number, got {tol}"
            )));
        }
    }
    match &cli.command {
        Command::Catalog { tag } => catalog_cmd(g, tag.as_deref()),
        Command::Invariants { geometry, point } => invariants_cmd(g, geometry, point.as_deref()),
        Command::Verify {
            theorem,
            geometry,
            trials,
        } => verify_cmd(g, theorem, geometry, *trials),
        Command::Extremum { r, lambda1, k } => extremum_cmd(*r, *lambda1, *k),
    }
}

fn load_file(g: &Global) -> Result<Option<CatalogEntry>, Failure> {
    let Some(path) = &g.geometry_file else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?;
    let file = GeometryFile::from_json(&text)?;
    let mut entry = file.instantiate()?;
    if file.tags.is_none() {
        entry.tags = verify::derive_tags(&entry)?;
    }
    Ok(Some(entry))
}

fn resolve(g: &Global, id: &str) -> Result<CatalogEntry, Failure> {
    match load_file(g)? {
        Some(entry) if entry.id == id => Ok(entry),
        _ => Ok(catalog::get(id)?),
    }
}

fn parse_point(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Failure::usage(format!("bad coordinate `{}`: {e}", s.trim())))
        })
        .collect()
}

fn catalog_cmd(g: &Global, tag: Option<&str>) -> Result<Outcome, Failure> {
    let mut list: Vec<EntrySummary> = catalog::list_entries();
    if let Some(entry) = load_file(g)? {
        list.push(entry.summary());
    }
    if let Some(tag) = tag {
        let theorem: TheoremId = tag.parse()?;
        list.retain(|e| e.tags.contains(&theorem));
    }
    let mut text = format!(
        "{:<34} {:<22} {:>3} {:>3} {:>3}  tags\n",
        "id", "kind", "src", "tgt", "r"
    );
    for e in &list {
        let tags = if e.computation_only {
            "(computation only)".to_string()
        } else {
            e.tags.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ")
        };
        let kind = serde_json::to_value(e.kind)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        let _ = writeln!(
            text,
            "{:<34} {:<22} {:>3} {:>3} {:>3}  {tags}",
            e.id, kind, e.source_dim, e.target_dim, e.r
        );
    }
    Ok(Outcome {
        command: "catalog",
        code: exit::OK,
        result: to_value(&list)?,
        text,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.10}"))
}

fn section_text(out: &mut String, s: &SectionReport) {
    let _ = writeln!(out, "[{:?}] r = {}", s.setting, s.r);
    if let Some(err) = &s.error {
        let _ = writeln!(out, "  error: {err}");
        return;
    }
    let _ = writeln!(out, "  |form|^2        {}", fmt_opt(s.norm_squared));
    let _ = writeln!(out, "  |trace|^2       {}", fmt_opt(s.trace_norm_squared));
    if let Some(sc) = &s.scalars {
        let _ = writeln!(out, "  2scal left      {:.10}", sc.left_2scal);
        let _ = writeln!(out, "  2scal right     {:.10}", sc.right_2scal);
    }
    let _ = writeln!(out, "  rho left        {}", fmt_opt(s.rho_left));
    let _ = writeln!(out, "  rho right       {}", fmt_opt(s.rho_right));
    if let Some(c) = &s.casorati {
        let _ = writeln!(out, "  C               {:.10}", c.c);
        let _ = writeln!(out, "  C_L inf / sup   {:.10} / {:.10}", c.c_l_inf, c.c_l_sup);
        let _ = writeln!(out, "  delta_C         {:.10}", c.delta_c);
        let _ = writeln!(out, "  delta_hat_C     {:.10}", c.delta_hat_c);
    }
    if let Some(eq) = &s.equality {
        let _ = writeln!(out, "  equality shape  {}", eq.is_equality_shape);
    }
    if let Some(st) = &s.structure {
        let _ = writeln!(
            out,
            "  |P|^2           {:.10} ({:?})",
            st.invariance.pnorm2, st.invariance.kind
        );
        match (&st.xi, &st.xi_error) {
            (Some(x), _) => {
                let _ = writeln!(out, "  xi              {:?}", x.position);
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "  xi              {e}");
            }
            (None, None) => {}
        }
    }
}

fn invariants_cmd(g: &Global, geometry: &str, point: Option<&str>) -> Result<Outcome, Failure> {
    let entry = resolve(g, geometry)?;
    let p = match point {
        Some(text) => parse_point(text)?,
        None => entry.base_point.clone(),
    };
    let report: InvariantsReport = verify::invariants(&entry, &p, g.seed)?;
    let mut text = format!(
        "{} at {:?}\n  rank {}, isometry defect {:.2e}\n",
        report.geometry, report.map.point, report.map.rank, report.map.isometry_defect
    );
    for s in &report.sections {
        section_text(&mut text, s);
    }
    Ok(Outcome {
        command: "invariants",
        code: exit::OK,
        result: to_value(&report)?,
        text,
    })
}

fn theorem_list(spec: &str, declared: Option<&[TheoremId]>) -> Result<Vec<TheoremId>, Failure> {
    match (spec, declared) {
        ("all", None) => Ok(TheoremId::ALL.to_vec()),
        ("all", Some(tags)) => Ok(tags.to_vec()),
        (id, _) => Ok(vec![id.parse()?]),
    }
}

fn verify_cmd(g: &Global, theorem: &str, geometry: &str, trials: u64) -> Result<Outcome, Failure> {
    let tol = g.tolerance.unwrap_or(HOLD_TOL);
    if geometry == "synthetic" {
        return verify_synthetic_cmd(g, theorem, trials, tol);
    }
    let entry = resolve(g, geometry)?;
    let theorems = theorem_list(theorem, Some(&entry.tags))?;
    if theorems.is_empty() {
        return Err(Error::HypothesisViolated(format!("no theorem applies to {}", entry.id)).into());
    }
    let mut points = vec![entry.base_point.clone()];
    points.extend(catalog::sample_points(&entry, g.samples as usize - 1, g.seed));
    let mut reports: Vec<InequalityReport> = Vec::new();
    for t in theorems {
        reports.extend(verify::verify_geometry(t, &entry, &points, g.seed)?);
    }
    for rep in &mut reports {
        rep.holds = holds_within(rep.residual, rep.rhs, tol);
    }
    let first = reports.iter().find(|r| !r.holds).cloned();
    let mut text = String::new();
    for rep in &reports {
        let _ = writeln!(
            text,
            "{:<24} {:<9} lhs {:>14.10} rhs {:>14.10} residual {:>14.6e} {}",
            rep.theorem.as_str(),
            format!("{:?}", rep.variant).to_lowercase(),
            rep.lhs,
            rep.rhs,
            rep.residual,
            if rep.holds { "holds" } else { "FAILS" }
        );
    }
    counterexample_text(&mut text, first.as_ref())?;
    Ok(Outcome {
        command: "verify",
        code: if first.is_some() {
            exit::COUNTEREXAMPLE
        } else {
            exit::OK
        },
        result: json!({
            "geometry": entry.id,
            "tolerance": tol,
            "points": points,
            "reports": to_value(&reports)?,
            "first_counterexample": to_value(&first)?,
        }),
        text,
    })
}

fn verify_synthetic_cmd(g: &Global, theorem: &str, trials: u64, tol: f64) -> Result<Outcome, Failure> {
    let theorems = theorem_list(theorem, None)?;
    let cfg = SyntheticConfig {
        hold_tol: tol,
        ..SyntheticConfig::new(trials, g.seed)
    };
    let summaries: Vec<SyntheticSummary> = theorems.iter().map(|&t| verify::verify_synthetic(t, &cfg)).collect();
    let first = summaries.iter().find_map(|s| s.first_counterexample.clone());
    let mut text = String::new();
    for s in &summaries {
        let _ = writeln!(
            text,
            "{:<24} trials {:>7} failures {:>7} strict {:>7} equality {:>5} min scaled residual {:>12.4e}",
            s.theorem.as_str(),
            s.trials,
            s.failures,
            s.strict,
            s.equality_hits,
            s.min_residual
        );
    }
    counterexample_text(&mut text, first.as_ref())?;
    Ok(Outcome {
        command: "verify",
        code: if first.is_some() {
            exit::COUNTEREXAMPLE
        } else {
            exit::OK
        },
        result: json!({
            "geometry": "synthetic",
            "tolerance": tol,
            "config": to_value(&cfg)?,
            "summaries": to_value(&summaries)?,
            "first_counterexample": to_value(&first)?,
        }),
        text,
    })
}

fn counterexample_text(text: &mut String, first: Option<&InequalityReport>) -> Result<(), Failure> {
    if let Some(rep) = first {
        let body = serde_json::to_string_pretty(rep).map_err(|e| Failure {
            code: exit::INTERNAL,
            message: e.to_string(),
        })?;
        let _ = writeln!(text, "first counterexample:\n{body}");
    }
    Ok(())
}

fn extremum_cmd(r: usize, lambda1: f64, k: f64) -> Result<Outcome, Failure> {
    let prob = ExtremumProblem::with_proviso(r, lambda1, k)?;
    let sol = solve_closed_form(&prob)?;
    let oracle = solve_oracle(&prob)?;
    let deviation = sol
        .minimizer
        .iter()
        .zip(&oracle.minimizer)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let agrees = deviation <= ORACLE_TOL;
    let text = format!(
        "lambda2 = {}\nminimizer = {:?}\nf_min = {:e}\noracle agrees: {agrees} (deviation {deviation:.2e})\n",
        prob.lambda2, sol.minimizer, sol.f_min
    );
    Ok(Outcome {
        command: "extremum",
        code: exit::OK,
        result: json!({
            "problem": to_value(&prob)?,
            "minimizer": sol.minimizer,
            "f_min": sol.f_min,
            "oracle_minimizer": oracle.minimizer,
            "oracle_f_min": oracle.f_min,
            "oracle_deviation": deviation,
            "oracle_agrees": agrees,
        }),
        text,
    })
}
