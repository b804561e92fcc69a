use serde_json::{json, Value};

use hpd_core::cech::{CechComplex, Settings};
use hpd_core::deformation::{infinitesimal_cocycle, ks_matrix, verify_cocycle_identities};
use hpd_core::expr::{parse_multivector, print_lpoly};
use hpd_core::family::{
    hirzebruch_nagata, hopf, p2, p2_full, torus, validate_all, validate_quotient, Family, FamilySpec, PoissonFamily,
    ValidationReport, P2_DIRECTIONS,
};
use hpd_core::mcsolver::{complete_family, solve_existence, verify_congruences};
use hpd_core::Rat;

use crate::{read_family, CliError, Command, Common, Report, REPORT_SCHEMA};

type Res<T> = Result<T, CliError>;

fn load(common: &Common) -> Res<(FamilySpec, Family)> {
    let path = common.family.as_ref().ok_or_else(|| CliError::Usage("--family is required".into()))?;
    load_path(path, common.order)
}

fn load_path(path: &std::path::Path, order: Option<u32>) -> Res<(FamilySpec, Family)> {
    let mut spec = read_family(path)?;
    if let Some(v) = order {
        spec.params.order = v;
    }
    let fam = spec.build()?;
    Ok((spec, fam))
}

fn atlas_family(f: Family, what: &str) -> Res<PoissonFamily> {
    match f {
        Family::Atlas(p) => Ok(p),
        Family::Quotient(_) => Err(CliError::Usage(format!("{what} needs an atlas family"))),
    }
}

fn complex(fam: &PoissonFamily, lambda0: Option<&str>) -> Res<CechComplex> {
    let (atlas, bivs) = fam.central()?;
    Ok(match lambda0 {
        Some(text) => {
            let l = parse_multivector(text, &atlas.charts[0].vars, atlas.dim(), 0)?;
            CechComplex::from_chart_bivector(&atlas, &l)?
        }
        None => CechComplex::new(&atlas, &bivs)?,
    })
}

fn chart_vars(fam: &PoissonFamily) -> Vec<Vec<String>> {
    fam.atlas.charts.iter().map(|c| c.vars.clone()).collect()
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn settings_value(common: &Common, s: &Settings, extra: Value) -> Value {
    let mut v = json!({ "window": s.window, "box": s.box_size });
    if let Some(o) = common.order {
        v["order"] = json!(o);
    }
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    v
}

fn report(cmd: &Command, settings: Value, passed: bool, results: Value, summary: Vec<String>) -> Report {
    Report { schema: REPORT_SCHEMA, command: cmd.name().into(), settings, passed, results, summary }
}

fn check_lines(rep: &ValidationReport) -> Vec<String> {
    rep.checks
        .iter()
        .map(|c| match &c.residual {
            None => format!("  ok    {}", c.name),
            Some(r) => format!("  FAIL  {}: {r}", c.name),
        })
        .collect()
}

fn parse_direction(text: &str, m: usize) -> Res<Vec<Rat>> {
    let v = text
        .split(',')
        .map(|s| s.trim().parse::<Rat>().map_err(|e| CliError::Usage(format!("bad direction entry '{}': {e}", s.trim()))))
        .collect::<Res<Vec<_>>>()?;
    if v.len() != m {
        return Err(CliError::Usage(format!("direction has {} entries, family has {m} parameters", v.len())));
    }
    Ok(v)
}

fn rats(v: &[Rat]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn execute(cmd: &Command) -> Res<Report> {
    let common = cmd.common();
    let s = common.settings();
    match cmd {
        Command::Validate { .. } => {
            let (spec, fam) = load(common)?;
            let (kind, rep) = match &fam {
                Family::Atlas(f) => ("atlas", validate_all(f)),
                Family::Quotient(q) => ("quotient", validate_quotient(q)),
            };
            let failures = rep.failures().count();
            let mut summary = vec![format!(
                "{} ({kind}): {} checks, {failures} failed",
                spec.name.clone().unwrap_or_default(),
                rep.checks.len()
            )];
            summary.extend(check_lines(&rep));
            let settings = json!({ "order": spec.params.order });
            let results = json!({ "kind": kind, "name": spec.name, "checks": to_value(&rep.checks), "failures": failures });
            Ok(report(cmd, settings, rep.passed(), results, summary))
        }
        Command::Cohomology { lambda0, k, .. } => {
            let (_, fam) = load(common)?;
            let fam = atlas_family(fam, "cohomology")?;
            let cx = complex(&fam, lambda0.as_deref())?;
            let h = cx.hypercohomology(*k, &s)?;
            let mut summary = vec![format!(
                "H^{k}: dimension {} ({})",
                h.dimension,
                if h.stable { "stable" } else { "not stable: enlarge --box" }
            )];
            for (w, d) in &h.by_weight {
                summary.push(format!("  weight {w}: {d}"));
            }
            for b in &h.basis {
                let cells: Vec<String> = b.terms.iter().map(|t| format!("{:?} {}", t.charts, t.value)).collect();
                summary.push(format!("  class {:?}: {}", b.slice, cells.join(", ")));
            }
            let settings = settings_value(common, &s, json!({ "k": k, "lambda0": lambda0 }));
            Ok(report(cmd, settings, true, to_value(&h), summary))
        }
        Command::Ks { .. } => {
            let (_, fam) = load(common)?;
            let fam = atlas_family(fam, "ks")?;
            let cx = complex(&fam, None)?;
            let h = cx.hypercohomology(1, &s)?;
            let ks = ks_matrix(&fam, &cx, &h)?;
            let iso = ks.rank == h.dimension && ks.rank == fam.param_count();
            let mut summary = vec![format!(
                "KS matrix: {} x {}, rank {}, dim H^1 = {}{}",
                ks.matrix.len(),
                fam.param_count(),
                ks.rank,
                h.dimension,
                if iso { " (isomorphism)" } else { "" }
            )];
            for row in &ks.matrix {
                summary.push(format!("  [{}]", rats(row).join(", ")));
            }
            let results = json!({
                "h1_dimension": h.dimension,
                "stable": h.stable,
                "matrix": to_value(&ks),
                "isomorphism": iso,
            });
            Ok(report(cmd, settings_value(common, &s, json!({})), true, results, summary))
        }
        Command::Infinitesimal { direction, .. } => {
            let (_, fam) = load(common)?;
            let fam = atlas_family(fam, "infinitesimal")?;
            let dir = parse_direction(direction, fam.param_count())?;
            let (atlas, bivs) = fam.central()?;
            let c = infinitesimal_cocycle(&fam, &dir)?;
            let checks = verify_cocycle_identities(&c, &atlas, &bivs);
            let cochain = c.to_cochain()?;
            let cx = complex(&fam, None)?;
            let h = cx.hypercohomology(1, &s)?;
            let coords = cx.project_to_basis(&cochain, &h)?;
            let mut summary = vec![format!("direction [{}]", rats(&dir).join(", "))];
            let terms = cochain.to_terms(&chart_vars(&fam));
            for t in &terms {
                summary.push(format!("  {:?} {}", t.charts, t.value));
            }
            summary.extend(check_lines(&checks));
            summary.push(format!("class in H^1 basis: [{}]", rats(&coords).join(", ")));
            let results = json!({
                "direction": rats(&dir),
                "cochain": to_value(&terms),
                "checks": to_value(&checks.checks),
                "class": rats(&coords),
            });
            let settings = settings_value(common, &s, json!({ "direction": direction }));
            Ok(report(cmd, settings, checks.passed(), results, summary))
        }
        Command::McExist { lambda0, .. } => {
            let (spec, fam) = load(common)?;
            let fam = atlas_family(fam, "mc-exist")?;
            let order = spec.params.order;
            let cx = complex(&fam, lambda0.as_deref())?;
            let h1 = cx.hypercohomology(1, &s)?;
            let h2 = cx.hypercohomology(2, &s)?;
            let sol = solve_existence(&cx, &h1, &h2, order)?;
            let verified = sol.verify(&cx)?;
            let names: Vec<String> = (1..=h1.basis.len()).map(|u| format!("t{u}")).collect();
            let mut summary = vec![format!(
                "dim H^1 = {}, dim H^2 = {}; solved to order {} of {order}",
                h1.dimension, h2.dimension, sol.order
            )];
            for e in &sol.ledger {
                summary.push(format!("  order {}: {}", e.order, if e.obstructed { "OBSTRUCTED" } else { "unobstructed" }));
            }
            summary.push(format!("Maurer-Cartan defect vanishes through order {}: {verified}", sol.order));
            let results = json!({
                "h1_dimension": h1.dimension,
                "h2_dimension": h2.dimension,
                "stable": h1.stable && h2.stable,
                "order_reached": sol.order,
                "ledger": to_value(&sol.ledger),
                "verified": verified,
                "residual_cells": sol.residual_cells,
                "beta": to_value(&sol.beta.to_terms(&names, &chart_vars(&fam))),
            });
            let settings = settings_value(common, &s, json!({ "order": order, "lambda0": lambda0 }));
            Ok(report(cmd, settings, sol.clean() && verified, results, summary))
        }
        Command::McComplete { test, .. } => {
            let (spec, target) = load(common)?;
            let target = atlas_family(target, "mc-complete")?;
            let (_, test_fam) = load_path(test, common.order)?;
            let test_fam = atlas_family(test_fam, "mc-complete")?;
            let order = spec.params.order.min(test_fam.order);
            let sol = complete_family(&target, &test_fam, order, &s)?;
            let ok = verify_congruences(&target, &test_fam, &sol)?;
            let h = sol.render_h(&test_fam.params);
            let n = target.atlas.dim();
            let g: Vec<Vec<String>> = target
                .atlas
                .charts
                .iter()
                .zip(&sol.g)
                .map(|(c, comps)| {
                    let vars: Vec<String> = c.vars.iter().chain(&test_fam.params).cloned().collect();
                    comps.iter().map(|j| print_lpoly(&j.flatten(n), &vars)).collect()
                })
                .collect();
            let mut summary = vec![format!("solved to order {}, gauge dimension {}", sol.order, sol.gauge_dim)];
            for (p, v) in target.params.iter().zip(&h) {
                summary.push(format!("  {p} = {v}"));
            }
            for (c, comps) in target.atlas.charts.iter().zip(&g) {
                summary.push(format!("  g_{} = ({})", c.name, comps.join(", ")));
            }
            summary.push(format!("congruences hold: {ok}"));
            let results = json!({
                "h": target.params.iter().zip(&h).map(|(p, v)| json!({ "param": p, "value": v })).collect::<Vec<_>>(),
                "g": target.atlas.charts.iter().zip(&g).map(|(c, v)| json!({ "chart": c.name, "components": v })).collect::<Vec<_>>(),
                "gauge_dim": sol.gauge_dim,
                "order": sol.order,
                "diagnostics": to_value(&sol.diagnostics),
                "congruences": ok,
            });
            let settings = settings_value(common, &s, json!({ "order": order }));
            Ok(report(cmd, settings, ok, results, summary))
        }
        Command::Example { name, m, k, n, .. } => {
            let order = common.order.unwrap_or(3);
            let spec = match name.as_str() {
                "p2" => p2("x", &P2_DIRECTIONS, order),
                "p2-full" => p2_full(order),
                "hopf" => hopf(*m, true),
                "hopf-free" => hopf(*m, false),
                "hirzebruch" => hirzebruch_nagata(*m, *k, order)?,
                "torus" => torus(*n),
                _ => return Err(CliError::Usage(format!("unknown example '{name}'"))),
            };
            Ok(report(cmd, json!({}), true, to_value(&spec), Vec::new()))
        }
    }
}
