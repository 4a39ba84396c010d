// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Commands behind the `holoknot` binary. Each command writes one report
//! atomically into the output directory and returns its path.

pub mod render;

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use holoknot::circle_functions::{genericity_margins, random_trig, Tolerances};
use holoknot::diagram::{build_diagram, FramedDiagram};
use holoknot::error::Error;
use holoknot::invariants::{split_invariants, whitney_by_degree, whitney_by_minima, whitney_formula};
use holoknot::isotopy::{
    braid_normalize, check_split_via_braid, detect_events, generate_range, interpolate, invariant_trace, search_distinguishing_pair,
    LOCALIZATION,
};
use holoknot::knot::{identify, to_crossing_code, KnotTable};
use holoknot::legendrian::{braid_bound_check, build_front, front_census, front_invariants, genus_bound_check, Variant};
use holoknot::trig::TrigPolynomial;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_GENERICITY: i32 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub grid_size: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub out: PathBuf,
    pub render_scale: f64,
}

impl RunConfig {
    /// `tol` overrides the margin, value-gap and x2-gap thresholds.
    pub fn new(command: &str, grid: Option<usize>, tol: Option<f64>, seed: u64, out: PathBuf, render_scale: f64) -> Self {
        let mut tolerances = Tolerances::default();
        if let Some(g) = grid {
            tolerances.grid = g;
        }
        if let Some(t) = tol {
            tolerances.margin = t;
            tolerances.value_gap = t;
            tolerances.x2_gap = t;
        }
        RunConfig { command: command.into(), inputs: Vec::new(), grid_size: tolerances.grid, tolerances, seed, out, render_scale }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Genericity margins of the offending function, when known.
    pub diagnostics: Option<Value>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into(), diagnostics: None }
    }
}

/// Exit code of a library error: 2 for genericity failures and unresolved
/// events, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_genericity() || matches!(e, Error::UnresolvedEvent { .. }) {
        EXIT_GENERICITY
    } else {
        EXIT_INPUT
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string(), diagnostics: None }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

/// What a command left behind. `ok` is false when a check in the report
/// failed; the report is still written.
#[derive(Debug)]
pub struct Outcome {
    pub path: PathBuf,
    pub ok: bool,
}

fn with_margins(e: Error, f: &TrigPolynomial, cfg: &RunConfig) -> Failure {
    let mut failure = Failure::from(e);
    if failure.code == EXIT_GENERICITY {
        let grid = cfg.tolerances.grid_for(f);
        failure.diagnostics = Some(json!({ "grid": grid, "margins": genericity_margins(f, grid) }));
    }
    failure
}

fn diagram(f: &TrigPolynomial, cfg: &RunConfig) -> CmdResult<FramedDiagram> {
    build_diagram(f, &cfg.tolerances).map_err(|e| with_margins(e, f, cfg))
}

/// Reads a function file, or any report carrying a `function` member.
pub fn load_function(path: &Path) -> CmdResult<TrigPolynomial> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("function") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CmdResult<PathBuf> {
    let io = |e: std::io::Error| Failure::input(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

fn envelope(cfg: &RunConfig, body: Value) -> Value {
    let mut report = json!({
        "holoknot_version": VERSION,
        "config": cfg,
        "seed": cfg.seed,
        "tolerances": cfg.tolerances,
    });
    if let (Some(r), Value::Object(b)) = (report.as_object_mut(), body) {
        r.extend(b);
    }
    report
}

fn write_report(cfg: &RunConfig, name: &str, body: Value) -> CmdResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(&envelope(cfg, body)).expect("report serializes");
    text.push('\n');
    write_atomic(&cfg.out, name, text.as_bytes())
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

/// Invariants, front censuses, knot class and bound slacks of one diagram.
pub fn analyze(d: &FramedDiagram) -> CmdResult<Value> {
    let inv = split_invariants(d)?;
    let mut front = serde_json::Map::new();
    for (key, v) in [("plus", Variant::Plus), ("minus", Variant::Minus)] {
        let census = front_census(d, v);
        let (w_xy, s_xy) = front_invariants(&census)?;
        front.insert(key.into(), json!({ "census": census, "W_xy": w_xy, "S_xy": s_xy }));
    }
    let (knot, bounds) = match identify(&to_crossing_code(d)) {
        Ok(Some(id)) => {
            let genus = genus_bound_check(d, id.genus)?;
            let braid = braid_bound_check(d, id.braid_index)?;
            (json!(id), json!({ "genus": genus.entries, "braid": braid.entries }))
        }
        Ok(None) => (json!({ "name": null, "note": "Jones polynomial not in the table" }), Value::Null),
        Err(Error::TooManyCrossings(n)) => (json!({ "name": null, "note": format!("{n} crossings exceed the state-sum limit") }), Value::Null),
        Err(e) => return Err(e.into()),
    };
    Ok(json!({ "invariants": inv, "front": front, "knot": knot, "bounds": bounds, "crossings": d.crossings.len() }))
}

pub fn cmd_invariants(cfg: &RunConfig, file: &Path) -> CmdResult<Outcome> {
    let f = load_function(file)?;
    let d = diagram(&f, cfg)?;
    let body = analyze(&d)?;
    let path = write_report(cfg, &format!("{}.invariants.json", stem(file)), body)?;
    Ok(Outcome { path, ok: true })
}

/// Straight path between two functions: events and the invariant trace.
/// A jump-law violation fails with exit code 1 and no report.
pub fn cmd_path(cfg: &RunConfig, from: &Path, to: &Path) -> CmdResult<Outcome> {
    let f = load_function(from)?;
    let g = load_function(to)?;
    diagram(&f, cfg)?;
    diagram(&g, cfg)?;
    let p = interpolate(&f, &g);
    let events = detect_events(&p, LOCALIZATION, &cfg.tolerances)?;
    let trace = invariant_trace(&p, &events, &cfg.tolerances)?;
    let body = json!({ "events": events, "trace": trace });
    let path = write_report(cfg, &format!("{}__{}.trace.json", stem(from), stem(to)), body)?;
    Ok(Outcome { path, ok: true })
}

pub fn cmd_render(cfg: &RunConfig, file: &Path) -> CmdResult<Outcome> {
    let f = load_function(file)?;
    let d = diagram(&f, cfg)?;
    let meta = serde_json::to_string(&envelope(cfg, json!({}))).expect("config serializes");
    let svg = render::svg(&f, &d, cfg.render_scale, &meta);
    let path = write_atomic(&cfg.out, &format!("{}.svg", stem(file)), svg.as_bytes())?;
    Ok(Outcome { path, ok: true })
}

pub fn cmd_generate(cfg: &RunConfig, w: i64, s: i64) -> CmdResult<Outcome> {
    let f = generate_range(w, s, cfg.seed)?;
    let d = diagram(&f, cfg)?;
    let inv = split_invariants(&d)?;
    let ok = inv.w == w && inv.s == s;
    let body = json!({ "target": { "W": w, "S": s }, "function": f, "invariants": inv, "matches_target": ok });
    let path = write_report(cfg, &format!("generated_w{w}_s{s}.json"), body)?;
    Ok(Outcome { path, ok })
}

pub fn cmd_search_pair(cfg: &RunConfig, w: i64, s: i64, knot: Option<&str>, budget: usize) -> CmdResult<Outcome> {
    let cert = search_distinguishing_pair(w, s, knot, budget, cfg.seed)?;
    let body = json!({ "target": { "W": w, "S": s, "knot": knot, "budget": budget }, "certificate": cert });
    let path = write_report(cfg, &format!("pair_w{w}_s{s}.json"), body)?;
    Ok(Outcome { path, ok: true })
}

/// Braid normalization with its event trace and the split-identity check.
pub fn cmd_normalize(cfg: &RunConfig, file: &Path) -> CmdResult<Outcome> {
    let f = load_function(file)?;
    diagram(&f, cfg)?;
    let (p, g) = braid_normalize(&f, &cfg.tolerances)?;
    let events = detect_events(&p, LOCALIZATION, &cfg.tolerances)?;
    let check = check_split_via_braid(&f, &cfg.tolerances)?;
    let ok = check.passed();
    let body = json!({ "function": g, "events": events, "check": check, "passed": ok });
    let path = write_report(cfg, &format!("{}.normalized.json", stem(file)), body)?;
    Ok(Outcome { path, ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

const SINE: &str = include_str!("../../core/fixtures/sine.json");
const K1: &str = include_str!("../../core/fixtures/k1.json");
const SELFTEST_CORPUS: u64 = 64;

fn corpus_check(seed: u64, tol: &Tolerances) -> Option<std::result::Result<(), String>> {
    let f = random_trig(seed, 6);
    let d = build_diagram(&f, tol).ok()?;
    let run = || -> holoknot::error::Result<std::result::Result<(), String>> {
        let inv = split_invariants(&d)?;
        let wd = whitney_by_degree(&f, tol)?;
        let wm = whitney_by_minima(&d);
        let wf = whitney_formula(&d, &f, tol)?.w;
        if !(wd == wm && wm == wf && wf == inv.w) {
            return Ok(Err(format!("seed {seed}: W by degree {wd}, minima {wm}, formula {wf}")));
        }
        if inv.split_sum() != inv.s {
            return Ok(Err(format!("seed {seed}: split sum {} vs S {}", inv.split_sum(), inv.s)));
        }
        for v in [Variant::Plus, Variant::Minus] {
            let closed = front_census(&d, v);
            if build_front(&d, v)?.census() != closed {
                return Ok(Err(format!("seed {seed}: front census differs for {v:?}")));
            }
        }
        Ok(Ok(()))
    };
    Some(run().unwrap_or_else(|e| Err(format!("seed {seed}: {e}"))))
}

/// Fast consistency suites; the full acceptance criteria live in the test
/// targets.
pub fn cmd_selftest(cfg: &RunConfig) -> CmdResult<Outcome> {
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();

    let problems = KnotTable::builtin().self_test();
    checks.push(check("knot table", problems.is_empty(), problems.join("; ")));

    let sine: TrigPolynomial = serde_json::from_str(SINE).expect("fixture parses");
    let unknot = build_diagram(&sine, tol).and_then(|d| {
        let inv = split_invariants(&d)?;
        let census = front_census(&d, Variant::Plus);
        Ok(inv.w == -1 && inv.s == 0 && inv.s_k.is_empty() && census.as_array() == [1, 1, 1, 0, 0] && front_invariants(&census)? == (0, -1))
    });
    checks.push(check("unknot baseline", matches!(unknot, Ok(true)), format!("{unknot:?}")));

    let k1: TrigPolynomial = serde_json::from_str(K1).expect("fixture parses");
    let k1 = build_diagram(&k1, tol).and_then(|d| {
        let inv = split_invariants(&d)?;
        let id = identify(&to_crossing_code(&d))?;
        Ok((inv.w, inv.s, inv.s_k, id.map(|i| i.name)))
    });
    let k1_ok = matches!(&k1, Ok((-4, -1, sk, Some(name))) if sk == &[-2, 1] && name == "unknot");
    checks.push(check("K1 fixture", k1_ok, format!("{k1:?}")));

    let results: Vec<_> = (0..SELFTEST_CORPUS).into_par_iter().filter_map(|k| corpus_check(cfg.seed.wrapping_add(k), tol)).collect();
    let failures: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    checks.push(check(
        "corpus identities",
        failures.is_empty() && !results.is_empty(),
        format!("{} generic of {SELFTEST_CORPUS}; {}", results.len(), failures.join("; ")),
    ));

    let ok = checks.iter().all(|c| c.passed);
    let path = write_report(cfg, "selftest.json", json!({ "checks": checks, "passed": ok }))?;
    Ok(Outcome { path, ok })
}
