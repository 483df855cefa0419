use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::structure::{edge_pairs, structure_polys, StructurePolyReport};
use super::verify::{verify_suite, SUITE_WALKS};
use super::{fmt_f64, Failure, Report, RunConfig};
use crate::error::{Error, Result};
use crate::exactnum::{rat_to_f64, Rational};
use crate::fispec::{instantiate, vertex_count_exact, FiGraphSpec};
use crate::hitting::{
    build_roofed_chain, default_sweep, greens_matrix_at, greens_oracle, greens_symbolic, hitting_oracle, hitting_symbolic, moments_oracle,
    moments_symbolic, simulate_moments, GreensNormalization, PatternRows, RoofedOrbitChain,
};
use crate::mixing::{
    adjacency_relation, cutoff_diagnostic, cutoff_from_profiles, laplacian_relation, profiles, rho_bound_check, spectrum_sweep,
    sweep_from_profiles, tv_full_state, Epsilon, MixingProfile, CLUSTER_TOL,
};
use crate::walks::{stationary, TransitionRelation, VirtualRelation, WalkKind};

/// Exact full-graph solves are skipped above this many vertices.
pub const ORACLE_LIMIT: usize = 20_000;
/// Dense Green's and TV checks are skipped above this many vertices.
pub const DENSE_LIMIT: usize = 1_500;

/// Whether `G_n` has at most `limit` vertices, decided from the orbit
/// counts without building it.
fn fits(spec: &FiGraphSpec, n: i64, limit: usize) -> bool {
    let total: num_bigint::BigInt = (0..spec.vertex_orbits.len()).map(|o| vertex_count_exact(spec, o, n)).sum();
    total <= num_bigint::BigInt::from(limit)
}

pub fn cmd_instantiate(cfg: &RunConfig, n: i64) -> Result<Report> {
    let spec = cfg.spec()?;
    let g = instantiate(&spec, n)?;
    let mut rows = Vec::new();
    let mut orbits = Vec::new();
    for (o, vo) in spec.vertex_orbits.iter().enumerate() {
        let k = g.orbit_vertices(o).len();
        orbits.push(json!({ "orbit": vo.name, "vertices": k }));
        rows.push(vec!["vertex".into(), vo.name.clone(), k.to_string()]);
    }
    // Each undirected edge is seen from both ends; a loop once.
    let mut twice: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..g.vertex_count() {
        for &(j, e) in g.neighbors(i) {
            *twice.entry(spec.edges[e as usize].class).or_default() += if j as usize == i { 2 } else { 1 };
        }
    }
    let mut classes = Vec::new();
    for (c, name) in spec.class_names.iter().enumerate() {
        let k = twice.get(&c).copied().unwrap_or(0) / 2;
        classes.push(json!({ "class": name, "edges": k }));
        rows.push(vec!["edge".into(), name.clone(), k.to_string()]);
    }
    let sample: Vec<_> = g
        .vertices
        .iter()
        .enumerate()
        .take(5)
        .map(|(i, v)| {
            let nb: Vec<_> = g.neighbors(i).iter().take(8).map(|&(j, _)| g.vertices[j as usize].labels.to_vec()).collect();
            json!({ "orbit": spec.vertex_orbits[v.orbit].name, "labels": v.labels.to_vec(), "neighbors": nb, "degree": g.neighbors(i).len() })
        })
        .collect();
    let summary = vec![format!("{} at n = {n}: {} vertices, {} edges", spec.name, g.vertex_count(), g.edge_count())];
    Ok(Report {
        command: "instantiate",
        json: json!({
            "family": spec.name,
            "n": n,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "connected": g.is_connected(),
            "vertex_orbits": orbits,
            "edge_classes": classes,
            "adjacency_sample": sample,
            "spec": spec.to_doc(),
        }),
        header: vec!["kind", "name", "count"],
        rows,
        summary,
        failures: Vec::new(),
    })
}

pub fn cmd_structure_polys(cfg: &RunConfig, first: Option<&str>, second: Option<&str>) -> Result<Report> {
    let spec = cfg.spec()?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 8)?;
    let pairs = match (first, second) {
        (Some(a), Some(b)) => vec![(spec.parse_pattern(a)?, spec.parse_pattern(b)?)],
        (None, None) => edge_pairs(&spec),
        _ => return Err(Error::Parse("--first and --second go together".into())),
    };
    let reports: Vec<StructurePolyReport> = pairs.iter().map(|(a, b)| structure_polys(&spec, a, b, &ns)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for r in &reports {
        let expr: Vec<String> = r.terms.iter().map(|t| format!("({}) r[{}]", t.poly, t.orbit)).collect();
        summary.push(format!("r[{}] * r[{}] = {}", r.first, r.second, if expr.is_empty() { "0".into() } else { expr.join(" + ") }));
        for t in &r.terms {
            for (n, v) in &t.values {
                rows.push(vec![r.first.clone(), r.second.clone(), t.orbit.clone(), t.poly.to_string(), n.to_string(), v.to_string()]);
            }
        }
    }
    Ok(Report {
        command: "structure-polys",
        json: json!({ "family": spec.name, "ns": ns, "products": reports }),
        header: vec!["first", "second", "orbit", "poly", "n", "value"],
        rows,
        summary,
        failures: Vec::new(),
    })
}

fn chains(spec: &FiGraphSpec, p: &TransitionRelation) -> Result<Vec<RoofedOrbitChain>> {
    let sweep = default_sweep(spec, p);
    (0..spec.vertex_orbits.len()).map(|r| build_roofed_chain(spec, p, r, &sweep)).collect()
}

/// Oracle values `[order][state]`, or `None` above the size limit.
type StateValues = Option<Vec<Vec<Rational>>>;

fn oracle_by_state(
    spec: &FiGraphSpec,
    p: &TransitionRelation,
    chain: &RoofedOrbitChain,
    n: i64,
    order: usize,
) -> Result<(StateValues, Vec<String>)> {
    // The second component lists states whose vertices disagree.
    if !fits(spec, n, ORACLE_LIMIT) {
        return Ok((None, Vec::new()));
    }
    let g = instantiate(spec, n)?;
    let rows = PatternRows::new(spec, p, &g)?;
    let target = g.orbit_vertices(chain.roof).start;
    let per_vertex = if order == 1 {
        vec![hitting_oracle(spec, &g, &rows, target)?]
    } else {
        moments_oracle(spec, &g, &rows, target, order)?
    };
    let y = &g.vertices[target];
    let mut out: Vec<Vec<Option<Rational>>> = vec![vec![None; chain.len()]; order];
    let mut conflicts = Vec::new();
    for (i, x) in g.vertices.iter().enumerate() {
        let s = chain.state_index(&spec.classify(x, y)).expect("roofed state");
        for k in 0..order {
            match &out[k][s] {
                None => out[k][s] = Some(per_vertex[k][i].clone()),
                Some(v) if *v != per_vertex[k][i] => conflicts.push(format!("n={n} state {} is not constant", spec.fmt_pattern(chain.states[s].clone()))),
                _ => {}
            }
        }
    }
    let vals = out.into_iter().map(|row| row.into_iter().map(|v| v.expect("every state is realized")).collect()).collect();
    Ok((Some(vals), conflicts))
}

#[derive(Serialize)]
struct StateRow {
    roof: String,
    state: String,
    symbolic: Vec<String>,
    /// `(n, values, oracle values or empty)`
    values: Vec<(i64, Vec<String>, Vec<String>)>,
    matches: usize,
    checked: usize,
}

/// Shared body of `hitting` and `moments`.
fn moment_report(cfg: &RunConfig, order: usize, command: &'static str) -> Result<Report> {
    let spec = cfg.spec()?;
    let p = cfg.walk(&spec)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 7)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for chain in chains(&spec, &p)? {
        let table = moments_symbolic(&chain, order)?;
        let oracles: Vec<(StateValues, Vec<String>)> = ns.par_iter().map(|&n| oracle_by_state(&spec, &p, &chain, n, order)).collect::<Result<_>>()?;
        let roof = spec.vertex_orbits[chain.roof].name.clone();
        for (s, state) in chain.states.iter().enumerate() {
            let mut symbolic: Vec<String> = table.raw.iter().map(|m| m[s].to_string()).collect();
            if order >= 2 {
                symbolic.extend(table.central[1..].iter().map(|m| format!("central: {}", m[s])));
                symbolic.extend(table.cumulants[1..].iter().map(|m| format!("cumulant: {}", m[s])));
            }
            let mut values = Vec::new();
            let (mut matches, mut checked) = (0, 0);
            for (&n, (oracle, _)) in ns.iter().zip(&oracles) {
                let sym: Vec<Rational> = table.raw.iter().map(|m| m[s].eval(n)).collect::<Result<_>>()?;
                let ora: Vec<String> = oracle.as_ref().map(|o| o.iter().map(|k| k[s].to_string()).collect()).unwrap_or_default();
                let ok = oracle.as_ref().map(|o| o.iter().zip(&sym).all(|(k, v)| &k[s] == v));
                if let Some(ok) = ok {
                    checked += 1;
                    if ok {
                        matches += 1;
                    } else {
                        failures.push(Failure::mismatch(format!("{roof} {} at n = {n}", spec.fmt_pattern(state.clone()))));
                    }
                }
                let sym_s: Vec<String> = sym.iter().map(|v| v.to_string()).collect();
                rows.push(vec![
                    roof.clone(),
                    spec.fmt_pattern(state.clone()),
                    symbolic[0].clone(),
                    n.to_string(),
                    sym_s.join(";"),
                    ora.join(";"),
                    ok.map_or("skipped".into(), |b| b.to_string()),
                ]);
                values.push((n, sym_s, ora));
            }
            if s != chain.diagonal {
                summary.push(format!(
                    "roof {roof}: Q({}) = {} ({matches}/{checked} oracle matches)",
                    spec.fmt_pattern(state.clone()),
                    symbolic[0]
                ));
            }
            json_rows.push(StateRow {
                roof: roof.clone(),
                state: spec.fmt_pattern(state.clone()),
                symbolic,
                values,
                matches,
                checked,
            });
        }
        for (_, conflicts) in &oracles {
            failures.extend(conflicts.iter().cloned().map(Failure::mismatch));
        }
    }
    let mut json = json!({ "family": spec.name, "walk": p.label(), "order": order, "ns": ns, "states": json_rows });
    if command == "moments" && cfg.simulate > 0 {
        json["simulation"] = simulation(cfg, &spec, &p, ns[0])?;
    }
    Ok(Report {
        command,
        json,
        header: vec!["roof", "state", "symbolic", "n", "value", "oracle", "match"],
        rows,
        summary,
        failures,
    })
}

/// Monte Carlo estimates from one vertex per state of the first roof.
fn simulation(cfg: &RunConfig, spec: &FiGraphSpec, p: &TransitionRelation, n: i64) -> Result<serde_json::Value> {
    if !fits(spec, n, ORACLE_LIMIT) {
        return Ok(json!({ "n": n, "skipped": format!("more than {ORACLE_LIMIT} vertices") }));
    }
    let g = instantiate(spec, n)?;
    let rows = PatternRows::new(spec, p, &g)?;
    let target = g.orbit_vertices(0).start;
    let y = &g.vertices[target];
    let mut seen = BTreeMap::new();
    for (i, x) in g.vertices.iter().enumerate() {
        seen.entry(spec.classify(x, y)).or_insert(i);
    }
    let out: Vec<_> = seen
        .into_iter()
        .filter(|(_, i)| *i != target)
        .map(|(s, i)| {
            let est = simulate_moments(&rows, i, target, cfg.simulate, cfg.order, cfg.seed);
            json!({
                "state": spec.fmt_pattern(s),
                "estimates": est.iter().map(|(m, se)| json!({ "mean": fmt_f64(*m), "stderr": fmt_f64(*se) })).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({ "n": n, "walks": cfg.simulate, "seed": cfg.seed, "states": out }))
}

pub fn cmd_hitting(cfg: &RunConfig) -> Result<Report> {
    moment_report(cfg, 1, "hitting")
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<Report> {
    moment_report(cfg, cfg.order.max(1), "moments")
}

pub fn cmd_greens(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let p = cfg.walk(&spec)?;
    let pi = stationary(&spec, &p)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 7)?;
    let tables = chains(&spec, &p)?.iter().map(hitting_symbolic).collect::<Result<Vec<_>>>()?;
    let norm = if p.kind == WalkKind::Simple { GreensNormalization::UnitWeights } else { GreensNormalization::Stationary };
    let table = greens_symbolic(&spec, &p, &pi, &tables, norm)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    for e in &table.entries {
        let pat = spec.fmt_pattern(e.pattern.clone());
        let mut values = Vec::new();
        for &n in &ns {
            let v = e.scaled.eval(n)?;
            let f = e.entry.eval_f64(n);
            rows.push(vec![pat.clone(), e.entry.to_string(), e.scaled.to_string(), n.to_string(), v.to_string(), fmt_f64(f)]);
            values.push(json!({ "n": n, "scaled": v.to_string(), "entry": fmt_f64(f) }));
        }
        summary.push(format!("G({pat}) = {}  [scaled: {}]", e.entry, e.scaled));
        entries.push(json!({ "pattern": pat, "entry": e.entry.to_string(), "scaled": e.scaled.to_string(), "values": values }));
    }
    let mut residuals = Vec::new();
    let mut failures = Vec::new();
    for &n in &ns {
        if !fits(&spec, n, DENSE_LIMIT) {
            continue;
        }
        let g = instantiate(&spec, n)?;
        let rows = PatternRows::new(&spec, &p, &g)?;
        let m = greens_matrix_at(&spec, &g, &table)?;
        let per = pi.per_vertex_at(n)?;
        let piv: Vec<f64> = g.vertices.iter().map(|v| rat_to_f64(&per[v.orbit])).collect();
        match greens_oracle(&rows, &piv, &m, 1e-9) {
            Ok(r) => residuals.push(json!({ "n": n, "residual": fmt_f64(r.max()) })),
            Err(Error::ToleranceExceeded { residual, .. }) => {
                residuals.push(json!({ "n": n, "residual": fmt_f64(residual) }));
                failures.push(Failure::mismatch(format!("Green's residual {residual:e} at n = {n}")));
            }
            Err(e) => return Err(e),
        }
    }
    let norm_s = match norm {
        GreensNormalization::UnitWeights => "unit_weights",
        GreensNormalization::Stationary => "stationary",
    };
    Ok(Report {
        command: "greens",
        json: json!({ "family": spec.name, "walk": p.label(), "normalization": norm_s, "ns": ns, "entries": entries, "oracle": residuals }),
        header: vec!["pattern", "entry", "scaled", "n", "scaled_value", "entry_value"],
        rows,
        summary,
        failures,
    })
}

fn lower_eps(eps: &[Epsilon]) -> Option<Epsilon> {
    let half = Rational::new(1.into(), 2.into());
    eps.iter().find(|e| e.value < half).cloned()
}

/// Exact `d(t)` for the first steps and on both sides of every threshold;
/// the whole profile can run to thousands of very long fractions.
fn compact_profile(pr: &MixingProfile, eps: &[Epsilon]) -> serde_json::Value {
    const HEAD: usize = 16;
    let head: Vec<String> = pr.d.iter().take(HEAD).map(|d| d.to_string()).collect();
    let crossings: Vec<_> = eps
        .iter()
        .map(|e| {
            let around: Vec<String> = pr.crossing(e).map(|(a, b)| vec![a.to_string(), b.to_string()]).unwrap_or_default();
            json!({ "eps": e.label, "t_mix": pr.t_mix(e), "d_before_and_at": around })
        })
        .collect();
    json!({ "n": pr.n, "steps": pr.steps(), "d_head": head, "thresholds": crossings })
}

pub fn cmd_mixing(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let p = cfg.walk(&spec)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 7)?;
    let mut eps = cfg.eps.clone();
    let lo = lower_eps(&eps);
    if let Some(lo) = &lo {
        let hi = lo.complement();
        if !eps.iter().any(|e| e.value == hi.value) {
            eps.push(hi);
        }
    }
    let profs = profiles(&spec, &p, &ns, &eps)?;
    let mut rows = Vec::new();
    let mut sweeps = Vec::new();
    let mut summary = Vec::new();
    for e in &cfg.eps {
        let sw = sweep_from_profiles(&spec, &p, &profs, e)?;
        for (pr, &(n, t)) in profs.iter().zip(&sw.points) {
            rows.push(vec![n.to_string(), e.label.clone(), e.value.to_string(), t.to_string(), pr.crossing(e).map(|c| c.1.to_string()).unwrap_or_default()]);
        }
        summary.push(format!(
            "t_mix({}) over n = {}..{}: {} ({})",
            e.label,
            ns[0],
            ns[ns.len() - 1],
            sw.trend.trend,
            if sw.trend.unambiguous { "unambiguous" } else { "ambiguous" }
        ));
        sweeps.push(sw);
    }
    let cutoff = match &lo {
        Some(lo) => {
            let c = cutoff_from_profiles(&spec, &p, &profs, lo)?;
            summary.push(format!("cutoff window ({}): {:?}, slope {}", lo.label, c.trend, fmt_f64(c.slope)).to_lowercase());
            Some(c)
        }
        None => None,
    };
    let mut failures = Vec::new();
    let mut equivariance = serde_json::Value::Null;
    if fits(&spec, ns[0], DENSE_LIMIT) {
        let pi = stationary(&spec, &p)?;
        let t_max = profs[0].steps();
        let full = tv_full_state(&spec, &p, &pi, ns[0], t_max)?;
        let worst = profs[0].d_f64().iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0f64, f64::max);
        if worst > 1e-12 {
            failures.push(Failure::mismatch(format!("orbit and full-state TV differ by {worst:e} at n = {}", ns[0])));
        }
        equivariance = json!({ "n": ns[0], "steps": t_max, "max_difference": fmt_f64(worst) });
    }
    Ok(Report {
        command: "mixing",
        json: json!({
            "family": spec.name,
            "walk": p.label(),
            "ns": ns,
            "profiles": profs.iter().map(|pr| compact_profile(pr, &eps)).collect::<Vec<_>>(),
            "sweeps": sweeps,
            "cutoff": cutoff,
            "equivariance": equivariance,
        }),
        header: vec!["n", "eps", "eps_value", "t_mix", "d_at_t_mix"],
        rows,
        summary,
        failures,
    })
}

pub fn cmd_rho(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let p = cfg.walk(&spec)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 9)?;
    let b = rho_bound_check(&spec, &p, &ns)?;
    let rows = b
        .rows
        .iter()
        .map(|(n, t, r)| vec![n.to_string(), t.to_string(), r.to_string(), (Rational::from_integer((*t as i64).into()) * r).to_string()])
        .collect();
    let decay = b.rho.fitted.decay_order();
    let mut failures = Vec::new();
    if !b.holds {
        failures.push(Failure::mismatch("no finite C bounds t_mix(1/4) by C / rho over the sweep".into()));
    }
    let summary = vec![
        format!("rho(n) = {} from n = {} (decay order {decay})", b.rho.fitted, b.rho.onset),
        format!("C = {} (upper half {}), bound holds: {}", b.c_min, b.c_upper_half, b.holds),
    ];
    Ok(Report {
        command: "rho",
        json: json!({
            "family": spec.name,
            "walk": p.label(),
            "ns": ns,
            "rho": b.rho.fitted.to_string(),
            "onset": b.rho.onset,
            "decay_order": decay,
            "witness": b.rho.witness,
            "per_edge": b.rho.per_edge.iter().map(|(e, r)| json!({ "edge": e, "ratio": r.to_string() })).collect::<Vec<_>>(),
            "bound": b,
        }),
        header: vec!["n", "t_mix", "rho", "t_mix_times_rho"],
        rows,
        summary,
        failures,
    })
}

/// `adjacency`, `laplacian` or `walk`.
fn relation(spec: &FiGraphSpec, cfg: &RunConfig, name: &str) -> Result<VirtualRelation> {
    match name {
        "adjacency" => Ok(adjacency_relation(spec)),
        "laplacian" => Ok(laplacian_relation(spec)),
        "walk" => Ok(cfg.walk(spec)?.relation),
        _ => Err(Error::Parse(format!("unknown relation `{name}`"))),
    }
}

pub fn cmd_spectrum(cfg: &RunConfig, rel: &str) -> Result<Report> {
    let spec = cfg.spec()?;
    let r = relation(&spec, cfg, rel)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 6)?;
    let rep = spectrum_sweep(&spec, &r, &ns, CLUSTER_TOL)?;
    let mut rows = Vec::new();
    for s in &rep.per_n {
        for (i, (v, m)) in s.clusters.iter().enumerate() {
            rows.push(vec![s.n.to_string(), i.to_string(), fmt_f64(*v), m.to_string()]);
        }
    }
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    match (&rep.distinct, &rep.multiplicities) {
        (None, _) => failures.push(Failure::unstable("distinct eigenvalue count changes over the sweep".into())),
        (Some(d), Some(m)) => {
            let ms: Vec<String> = m.iter().map(|p| p.to_string()).collect();
            summary.push(format!("{d} distinct eigenvalues; multiplicities [{}] validated on {:?}", ms.join(", "), rep.validated_on));
        }
        (Some(d), None) if ns.len() >= 5 => {
            summary.push(format!("{d} distinct eigenvalues"));
            failures.push(Failure::unstable("multiplicity polynomials did not validate".into()));
        }
        (Some(d), None) => summary.push(format!("{d} distinct eigenvalues; too few n to fit multiplicities")),
    }
    let per_n: Vec<_> = rep
        .per_n
        .iter()
        .map(|s| json!({ "n": s.n, "clusters": s.clusters.iter().map(|(v, m)| json!({ "value": fmt_f64(*v), "multiplicity": m })).collect::<Vec<_>>() }))
        .collect();
    Ok(Report {
        command: "spectrum",
        json: json!({
            "family": spec.name,
            "relation": rel,
            "ns": ns,
            "tolerance": fmt_f64(CLUSTER_TOL),
            "distinct": rep.distinct,
            "multiplicities": rep.multiplicities.as_ref().map(|m| m.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
            "validated_on": rep.validated_on,
            "per_n": per_n,
        }),
        header: vec!["n", "cluster", "eigenvalue", "multiplicity"],
        rows,
        summary,
        failures,
    })
}

pub fn cmd_cutoff(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let p = cfg.walk(&spec)?;
    let n0 = spec.stabilization_bound();
    let ns = cfg.ns_or(&spec, n0, n0 + 7)?;
    let eps = lower_eps(&cfg.eps).unwrap_or_else(|| cfg.eps[0].clone());
    let c = cutoff_diagnostic(&spec, &p, &ns, &eps)?;
    let rows = c.rows.iter().map(|r| vec![r.0.to_string(), r.1.to_string(), r.2.to_string(), r.3.to_string()]).collect();
    let summary = vec![format!("cutoff window ({}): {:?}, slope {}", c.eps, c.trend, fmt_f64(c.slope)).to_lowercase()];
    Ok(Report {
        command: "cutoff",
        json: serde_json::to_value(&c)?,
        header: vec!["n", "t_mix_eps", "t_mix_one_minus_eps", "width"],
        rows,
        summary,
        failures: Vec::new(),
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    let specs = if cfg.family.is_some() || cfg.spec_path.is_some() { vec![cfg.spec()?] } else { Vec::new() };
    let cells = verify_suite(&specs)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let width = cells.iter().map(|c| c.family.len()).max().unwrap_or(6).max(6);
    let mut summary = vec![format!("{:width$}  {}", "family", SUITE_WALKS.map(|w| format!("{w:>9}")).join(" "))];
    for chunk in cells.chunks(SUITE_WALKS.len()) {
        let marks: Vec<String> = chunk.iter().map(|c| format!("{:>9}", if c.pass { "pass" } else { "FAIL" })).collect();
        summary.push(format!("{:width$}  {}", chunk[0].family, marks.join(" ")));
    }
    for c in &cells {
        rows.push(vec![
            c.family.clone(),
            c.walk.clone(),
            format!("{}:{}", c.ns[0], c.ns[c.ns.len() - 1]),
            c.checked.to_string(),
            c.pass.to_string(),
        ]);
        failures.extend(c.mismatches.iter().map(|m| Failure::mismatch(format!("{} {}: {m}", c.family, c.walk))));
    }
    let passed = cells.iter().filter(|c| c.pass).count();
    summary.push(format!("{passed}/{} cells pass", cells.len()));
    Ok(Report {
        command: "verify",
        json: json!({ "cells": cells, "passed": passed, "total": cells.len() }),
        header: vec!["family", "walk", "n_range", "checked", "pass"],
        rows,
        summary,
        failures,
    })
}
