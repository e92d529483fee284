//! Scenario files: JSON input with a `kind` field, result JSON plus grid CSVs and an
//! optional heatmap as output.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::gridfn::{marginals, nesting_decompose, GridFunction, QuantileTransform, StepFunction1D};
use crate::io::{grid_to_csv, heatmap_svg, read_grid_csv, step_to_csv};
use crate::ppi::{pooling_implementation, solve_ppi_linear, solve_ppi_threshold, PpiObjective, DEFAULT_PROBES};
use crate::pubgood::{solve_public_good, verify_expost_ic, JointDensity, PublicGoodScenario, ValueModel};
use crate::rationalize::{
    detect_rectangle_structure, is_additive_set, is_rationalizable, monotone_rationalizer, unique_rationalization_check, CellBox,
};
use crate::rfauction::{
    best_symmetric_reserve, check_reduced_form, construct_implementation, extreme_reduced_form_check, solve_investment_auction,
    InvestmentSpec, ReducedForm,
};
use crate::socialchoice::{anti_equivalence_report, exposed_mechanism_check, normalize_mechanism, ScgScenario};
use crate::trade::{check_solution, flip_cost, seller_top_utility_from_surplus, solve_interim_efficient, TradeScenario};
use crate::gridfn::UpSet;

pub const SCHEMA_VERSION: u32 = 1;

pub const KINDS: [&str; 9] = [
    "public_good",
    "bilateral_trade",
    "reduced_form",
    "investment_auction",
    "ppi",
    "social_choice",
    "decompose",
    "rationalize",
    "check",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    StructureViolation,
    Infeasible,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::StructureViolation => 2,
            Status::Infeasible => 3,
        }
    }
}

/// Input that could not be turned into a scenario.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Solve(#[from] Error),
}

fn schema(path: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { path: path.to_string(), message: message.into() }
}

/// Converts a `serde_path_to_error` path like `a.b[2]` to the JSON pointer `/a/b/2`.
fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            serde_path_to_error::Segment::Seq { index } => out.push_str(&index.to_string()),
            serde_path_to_error::Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            serde_path_to_error::Segment::Enum { variant } => out.push_str(variant),
            serde_path_to_error::Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T, ScenarioError> {
    serde_path_to_error::deserialize(v).map_err(|e| schema(&pointer(e.path()), e.inner().to_string()))
}

/// A grid given inline (row-major values) or as a CSV path relative to the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSource {
    Inline(Vec<f64>),
    File(String),
}

impl GridSource {
    fn load(&self, dims: &[usize], base: &Path, at: &str) -> Result<GridFunction, ScenarioError> {
        match self {
            GridSource::Inline(v) => GridFunction::new(dims, v.clone()).map_err(|e| schema(at, e.to_string())),
            GridSource::File(p) => {
                let f = read_grid_csv(&base.join(p)).map_err(|e| schema(at, e.to_string()))?;
                if f.dims() != dims {
                    return Err(schema(at, format!("grid has dims {:?}, expected {dims:?}", f.dims())));
                }
                Ok(f)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PublicGoodInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    n: usize,
    grid: usize,
    domain: (f64, f64),
    density: JointDensity,
    values: ValueModel,
    cost: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TradeInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    grid_v: usize,
    grid_c: usize,
    /// Draw cell masses and weights from the seed instead of reading them.
    #[serde(default)]
    random: bool,
    #[serde(rename = "G_B")]
    g_b: Option<QuantileTransform>,
    #[serde(rename = "G_S")]
    g_s: Option<QuantileTransform>,
    /// Welfare weights as cell masses; omitted means total surplus.
    #[serde(rename = "weights_B")]
    weights_b: Option<Vec<f64>>,
    #[serde(rename = "weights_S")]
    weights_s: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedFormInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    q1: Vec<f64>,
    q2: Vec<f64>,
    #[serde(rename = "G1")]
    g1: Option<QuantileTransform>,
    #[serde(rename = "G2")]
    g2: Option<QuantileTransform>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvestmentInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    grid: usize,
    b: f64,
    #[serde(rename = "G1")]
    g1: QuantileTransform,
    #[serde(rename = "G2")]
    g2: Option<QuantileTransform>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PpiInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    n: usize,
    grid: usize,
    prior: f64,
    objective: PpiObjective,
    probes: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SocialChoiceInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    a: Vec<[f64; 2]>,
    c: Vec<[f64; 2]>,
    masses: Vec<Vec<f64>>,
    mechanism_a: GridSource,
    mechanism_b: Option<GridSource>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    dims: Vec<usize>,
    values: GridSource,
    #[serde(default = "yes")]
    among_monotone: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalizeInput {
    #[serde(default)]
    #[serde(rename = "kind")]
    _kind: String,
    #[serde(default)]
    seed: u64,
    q: Vec<Vec<f64>>,
}

/// Everything a run produces, before anything touches the filesystem.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub kind: String,
    pub status: Status,
    pub result: Value,
    /// Named grids written as `<stem>.<name>.csv`.
    pub grids: Vec<(String, GridFunction)>,
    /// Named step functions written as single-column CSVs.
    pub steps: Vec<(String, StepFunction1D)>,
    pub heatmap: Option<(GridFunction, Option<CellBox>)>,
}

impl RunOutcome {
    fn new(kind: &str, result: Value) -> Self {
        RunOutcome { kind: kind.into(), status: Status::Ok, result, grids: vec![], steps: vec![], heatmap: None }
    }
}

fn status_of(e: &Error) -> Option<Status> {
    match e {
        Error::StructureViolation(_)
        | Error::NotRectangle
        | Error::NotMarkupPooling(_)
        | Error::NotOfForm(_)
        | Error::TheoremViolation(_)
        | Error::NotMonotone(_) => Some(Status::StructureViolation),
        Error::Infeasible(_) | Error::NotRationalizable | Error::InfeasiblePoint(_) => Some(Status::Infeasible),
        _ => None,
    }
}

/// Parses and runs a scenario document. Structural and feasibility failures become
/// outcomes with the matching status; anything else is an error.
pub fn run_value(doc: &Value, base: &Path) -> Result<RunOutcome, ScenarioError> {
    let kind = doc
        .get("kind")
        .ok_or_else(|| schema("/kind", "missing field"))?
        .as_str()
        .ok_or_else(|| schema("/kind", "expected a string"))?
        .to_string();
    let solved = match kind.as_str() {
        "public_good" => run_public_good(parse(doc)?),
        "bilateral_trade" => run_trade(parse(doc)?),
        "reduced_form" => run_reduced_form(parse(doc)?),
        "investment_auction" => run_investment(parse(doc)?),
        "ppi" => run_ppi(parse(doc)?),
        "social_choice" => run_social_choice(parse(doc)?, base),
        "decompose" => run_decompose(parse(doc)?, base),
        "rationalize" => run_rationalize(parse(doc)?),
        "check" => run_check(parse(doc)?, base),
        other => return Err(schema("/kind", format!("unknown kind {other:?}; expected one of {KINDS:?}"))),
    };
    match solved {
        Ok(out) => Ok(out),
        Err(ScenarioError::Solve(e)) => match status_of(&e) {
            Some(status) => {
                let mut out = RunOutcome::new(&kind, json!({ "error": e.to_string() }));
                out.status = status;
                Ok(out)
            }
            None => Err(ScenarioError::Solve(e)),
        },
        Err(e) => Err(e),
    }
}

pub fn run_file(path: &Path) -> Result<RunOutcome, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| schema("/", format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    run_value(&doc, path.parent().unwrap_or(Path::new(".")))
}

/// Renders every output file in memory: `(file name, contents)`.
pub fn render(outcome: &RunOutcome, stem: &str, svg: bool) -> Result<Vec<(String, String)>, ScenarioError> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": outcome.kind,
        "status": outcome.status,
        "result": outcome.result,
    });
    let mut files = vec![(format!("{stem}.result.json"), serde_json::to_string_pretty(&doc).expect("serializable") + "\n")];
    for (name, g) in &outcome.grids {
        files.push((format!("{stem}.{name}.csv"), grid_to_csv(g)?));
    }
    for (name, q) in &outcome.steps {
        files.push((format!("{stem}.{name}.csv"), step_to_csv(q)));
    }
    if svg {
        if let Some((g, rect)) = &outcome.heatmap {
            files.push((format!("{stem}.svg"), heatmap_svg(g, *rect)?));
        }
    }
    Ok(files)
}

/// Writes all outputs into `out`, only after every file has been rendered.
pub fn write_outputs(outcome: &RunOutcome, out: &Path, stem: &str, svg: bool) -> Result<Vec<PathBuf>, ScenarioError> {
    let files = render(outcome, stem, svg)?;
    std::fs::create_dir_all(out).map_err(|e| ScenarioError::Io(format!("{}: {e}", out.display())))?;
    let mut written = Vec::new();
    for (name, body) in files {
        let p = out.join(name);
        std::fs::write(&p, body).map_err(|e| ScenarioError::Io(format!("{}: {e}", p.display())))?;
        written.push(p);
    }
    Ok(written)
}

fn rect_of(f: &GridFunction) -> Option<CellBox> {
    detect_rectangle_structure(f).ok().and_then(|r| r.rectangle)
}

fn run_public_good(inp: PublicGoodInput) -> Result<RunOutcome, ScenarioError> {
    let dims = vec![inp.grid; inp.n];
    let domain = vec![inp.domain; inp.n];
    let s = PublicGoodScenario::build(&dims, &domain, &inp.density, &inp.values, inp.cost)?;
    let res = solve_public_good(&s)?;
    let (ic_ok, ic_gain) = verify_expost_ic(&res.allocation, &res.transfers, &s, 1e-9);
    let levels = res.allocation.distinct_values(0.0);
    let interior: Vec<f64> = levels.iter().copied().filter(|&v| v > 0.0 && v < 1.0).collect();
    let mut out = RunOutcome::new(
        "public_good",
        json!({
            "parameters": { "n": inp.n, "grid": inp.grid, "domain": inp.domain, "cost": inp.cost, "seed": inp.seed },
            "objective": res.expected_surplus,
            "budget_slack": res.budget_slack,
            "levels": levels,
            "interior_level": interior.first(),
            "two_threshold": interior.len() <= 1,
            "expost_ic": ic_ok,
            "max_misreport_gain": ic_gain,
            "symmetric": s.symmetric,
            "lp_iterations": res.lp_iterations,
        }),
    );
    out.heatmap = Some((res.allocation.clone(), None));
    out.grids.push(("allocation".into(), res.allocation));
    Ok(out)
}

fn run_trade(inp: TradeInput) -> Result<RunOutcome, ScenarioError> {
    let s = if inp.random {
        TradeScenario::random(inp.seed, inp.grid_v, inp.grid_c)?
    } else {
        let gb = inp.g_b.ok_or_else(|| schema("/G_B", "required unless random is set"))?;
        let gs = inp.g_s.ok_or_else(|| schema("/G_S", "required unless random is set"))?;
        let lb = inp.weights_b.unwrap_or_else(|| gb.cell_masses(inp.grid_v));
        let ls = inp.weights_s.unwrap_or_else(|| gs.cell_masses(inp.grid_c));
        TradeScenario::from_distributions(inp.grid_v, inp.grid_c, &gb, &gs, lb, ls)?
    };
    let sol = solve_interim_efficient(&s)?;
    check_solution(&s, &sol)?;
    let flipped = flip_cost(&sol.p);
    let rect = detect_rectangle_structure(&flipped)?;
    let mut out = RunOutcome::new(
        "bilateral_trade",
        json!({
            "parameters": { "grid_v": inp.grid_v, "grid_c": inp.grid_c, "random": inp.random, "seed": inp.seed },
            "objective": sol.welfare,
            "broker_profit": sol.z,
            "seller_top_utility": sol.us_bar,
            "seller_top_utility_from_surplus": seller_top_utility_from_surplus(&s, &sol),
            "mechanism": sol.mechanism,
            "rectangle": rect.rectangle,
            "fractional_level": if rect.rectangle.is_some() { Some(rect.lambda) } else { None },
            "lp_iterations": sol.lp_iterations,
        }),
    );
    out.heatmap = Some((flipped, rect.rectangle));
    out.grids.push(("p".into(), sol.p));
    Ok(out)
}

fn run_reduced_form(inp: ReducedFormInput) -> Result<RunOutcome, ScenarioError> {
    let uniform = QuantileTransform::Uniform { lo: 0.0, hi: 1.0 };
    let g1 = inp.g1.unwrap_or_else(|| uniform.clone());
    let g2 = inp.g2.unwrap_or(uniform);
    let rf = ReducedForm::from_distributions(inp.q1, inp.q2, &g1, &g2)?;
    let report = check_reduced_form(&rf);
    let (extreme, thresholds) = extreme_reduced_form_check(&rf);
    let mut result = json!({
        "parameters": { "m1": rf.m1(), "m2": rf.m2(), "seed": inp.seed },
        "feasible": report.feasible,
        "feasible_swapped": report.swapped.holds,
        "extreme": extreme,
        "thresholds": thresholds,
    });
    if !report.feasible {
        let mut out = RunOutcome::new("reduced_form", result);
        out.status = Status::Infeasible;
        return Ok(out);
    }
    let imp = construct_implementation(&rf)?;
    result["closed_form"] = json!(imp.closed_form);
    result["residual"] = json!(imp.residual(&rf));
    let mut out = RunOutcome::new("reduced_form", result);
    out.heatmap = Some((imp.p1.clone(), None));
    out.grids.push(("p1".into(), imp.p1));
    out.grids.push(("p2".into(), imp.p2));
    Ok(out)
}

fn run_investment(inp: InvestmentInput) -> Result<RunOutcome, ScenarioError> {
    if inp.g2.as_ref().is_some_and(|g2| *g2 != inp.g1) {
        return Err(schema("/G2", "bidders must share one value distribution"));
    }
    inp.g1.validate()?;
    let g = inp.g1.cell_masses(inp.grid);
    let spec = InvestmentSpec::new(inp.b, &g, inp.g1.support())?;
    let res = solve_investment_auction(&spec, &g, inp.seed)?;
    let (reserve, sym) = best_symmetric_reserve(&spec, &g);
    let mut out = RunOutcome::new(
        "investment_auction",
        json!({
            "parameters": { "grid": inp.grid, "b": inp.b, "seed": inp.seed },
            "objective": res.objective,
            "symmetric_objective": sym,
            "symmetric_reserve_cell": reserve,
            "improvement": res.objective - sym,
            "extreme": res.extreme,
            "thresholds": res.thresholds,
            "q1": res.rf.q1,
            "q2": res.rf.q2,
            "probes": res.probes,
        }),
    );
    out.heatmap = Some((res.implementation.p1.clone(), None));
    out.grids.push(("p1".into(), res.implementation.p1));
    out.grids.push(("p2".into(), res.implementation.p2));
    Ok(out)
}

fn run_ppi(inp: PpiInput) -> Result<RunOutcome, ScenarioError> {
    let dims = vec![inp.grid; inp.n];
    let (signal, marg, value, probes) = match &inp.objective {
        PpiObjective::Linear(w) => {
            let sol = solve_ppi_linear(w, inp.prior, &dims)?;
            (sol.signal, sol.marginals, sol.value, None)
        }
        PpiObjective::Threshold { thresholds, weights } => {
            let sol = solve_ppi_threshold(thresholds, weights, inp.prior, &dims, inp.probes.unwrap_or(DEFAULT_PROBES), inp.seed)?;
            (sol.signal, sol.marginals, sol.value, Some(sol.probes))
        }
    };
    let pooling = if inp.n == 2 { pooling_implementation(&signal).ok() } else { None };
    let f = signal.signal();
    let mut out = RunOutcome::new(
        "ppi",
        json!({
            "parameters": { "n": inp.n, "grid": inp.grid, "prior": inp.prior, "seed": inp.seed },
            "objective": value,
            "mean": signal.mean(),
            "lambda": signal.lambda,
            "pooling": pooling,
            "probes": probes,
        }),
    );
    if inp.n <= 2 {
        out.heatmap = Some((f.clone(), if inp.n == 2 { rect_of(&f) } else { None }));
    }
    for (i, q) in marg.into_iter().enumerate() {
        out.steps.push((format!("q{}", i + 1), q));
    }
    out.grids.push(("signal".into(), f));
    Ok(out)
}

fn run_social_choice(inp: SocialChoiceInput, base: &Path) -> Result<RunOutcome, ScenarioError> {
    let s = ScgScenario::new(inp.a, inp.c, inp.masses)?;
    let dims = s.dims();
    let pa = inp.mechanism_a.load(&dims, base, "/mechanism_a")?;
    let mut result = json!({ "parameters": { "dims": dims, "seed": inp.seed } });
    let na = normalize_mechanism(&s, &pa)?;
    if na.is_deterministic() {
        let (exposed, cert) = exposed_mechanism_check(&na)?;
        result["exposed"] = json!(exposed);
        result["additive_certificate"] = json!(cert);
    }
    let mut out = RunOutcome::new("social_choice", Value::Null);
    if let Some(b) = &inp.mechanism_b {
        let pb = b.load(&dims, base, "/mechanism_b")?;
        let rep = anti_equivalence_report(&s, &pa, &pb)?;
        result["report"] = json!({
            "bic": rep.bic,
            "dic": rep.dic,
            "deterministic": rep.deterministic,
            "payoff_equivalent": rep.payoff_equivalent,
            "expost_equivalent": rep.expost_equivalent,
        });
        out.grids.push(("normalized_b".into(), rep.normalized[1].clone()));
    }
    if dims.len() <= 2 {
        out.heatmap = Some((na.p.clone(), None));
    }
    out.grids.insert(0, ("normalized_a".into(), na.p));
    out.result = result;
    Ok(out)
}

fn run_decompose(inp: GridInput, base: &Path) -> Result<RunOutcome, ScenarioError> {
    let f = inp.values.load(&inp.dims, base, "/values")?;
    let rep = nesting_decompose(&f)?;
    let additive: Vec<Option<bool>> = rep.sets.iter().map(|a| is_additive_set(a).ok().map(|c| c.additive)).collect();
    let mut out = RunOutcome::new(
        "decompose",
        json!({
            "parameters": { "dims": inp.dims, "seed": inp.seed },
            "levels": rep.levels,
            "weights": rep.weights,
            "residual": rep.residual,
            "nested": rep.is_nested(),
            "set_sizes": rep.sets.iter().map(UpSet::count).collect::<Vec<_>>(),
            "additive": additive,
        }),
    );
    for (k, a) in rep.sets.iter().enumerate() {
        out.grids.push((format!("set{k}"), GridFunction::indicator(a)));
    }
    if f.n() <= 2 {
        out.heatmap = Some((f.clone(), None));
    }
    Ok(out)
}

fn run_rationalize(inp: RationalizeInput) -> Result<RunOutcome, ScenarioError> {
    let q: Vec<StepFunction1D> = inp
        .q
        .iter()
        .enumerate()
        .map(|(i, v)| StepFunction1D::uniform(v.clone()).map_err(|e| schema(&format!("/q/{i}"), e.to_string())))
        .collect::<Result<_, _>>()?;
    let ok = is_rationalizable(&q)?;
    let mut out = RunOutcome::new("rationalize", json!({ "parameters": { "seed": inp.seed }, "rationalizable": ok }));
    if !ok {
        out.status = Status::Infeasible;
        return Ok(out);
    }
    let f = monotone_rationalizer(&q)?;
    let back = marginals(&f);
    let residual = back.iter().zip(&q).map(|(a, b)| crate::gridfn::sup_distance(a, b)).fold(0.0, f64::max);
    out.result["residual"] = json!(residual);
    if f.n() <= 2 {
        out.heatmap = Some((f.clone(), None));
    }
    out.grids.push(("rationalizer".into(), f));
    Ok(out)
}

fn run_check(inp: GridInput, base: &Path) -> Result<RunOutcome, ScenarioError> {
    let f = inp.values.load(&inp.dims, base, "/values")?;
    let uniq = unique_rationalization_check(&f, inp.among_monotone)?;
    let rect = if f.n() == 2 { detect_rectangle_structure(&f).ok() } else { None };
    let mut out = RunOutcome::new(
        "check",
        json!({
            "parameters": { "dims": inp.dims, "among_monotone": inp.among_monotone, "seed": inp.seed },
            "unique": uniq.unique,
            "degrees_of_freedom": uniq.degrees_of_freedom,
            "rectangle_structure": rect.as_ref().map(|r| r.valid),
            "rectangle": rect.as_ref().and_then(|r| r.rectangle),
        }),
    );
    if let Some(w) = uniq.witness {
        out.grids.push(("witness".into(), GridFunction::new(&inp.dims, w.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())?));
    }
    if f.n() <= 2 {
        out.heatmap = Some((f, rect.and_then(|r| r.rectangle)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(doc: Value) -> Result<RunOutcome, ScenarioError> {
        run_value(&doc, Path::new("."))
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let e = run(json!({ "kind": "ppi", "n": 2, "grid": "ten", "prior": 0.3, "objective": { "linear": [] } })).unwrap_err();
        assert!(matches!(&e, ScenarioError::Schema { path, .. } if path == "/grid"), "{e}");
        let e = run(json!({ "kind": "rationalize", "q": [[0.1, "x"]] })).unwrap_err();
        assert!(matches!(&e, ScenarioError::Schema { path, .. } if path == "/q/0/1"), "{e}");
        let e = run(json!({ "kind": "nope" })).unwrap_err();
        assert!(matches!(&e, ScenarioError::Schema { path, .. } if path == "/kind"));
        let e = run(json!({ "n": 2 })).unwrap_err();
        assert!(matches!(&e, ScenarioError::Schema { path, .. } if path == "/kind"));
    }

    #[test]
    fn statuses() {
        let out = run(json!({ "kind": "rationalize", "q": [[0.2, 0.4], [0.3, 0.3]] })).unwrap();
        assert_eq!(out.status, Status::Ok);
        let out = run(json!({ "kind": "rationalize", "q": [[0.5, 0.5], [0.0, 0.1]] })).unwrap();
        assert_eq!(out.status, Status::Infeasible);
        let out = run(json!({ "kind": "reduced_form", "q1": [1.0, 1.0], "q2": [1.0, 1.0] })).unwrap();
        assert_eq!(out.status.exit_code(), 3);
        let out = run(json!({ "kind": "decompose", "dims": [2, 2], "values": [0.0, 0.5, 0.5, 1.0] })).unwrap();
        assert_eq!(out.result["levels"], json!([0.5, 1.0]));
        let out = run(json!({ "kind": "decompose", "dims": [2, 2], "values": [1.0, 0.0, 0.0, 1.0] })).unwrap();
        assert_eq!(out.status, Status::StructureViolation);
    }

    #[test]
    fn rendering_is_deterministic() {
        let doc = json!({ "kind": "check", "dims": [3, 3], "values": [0, 0, 1, 0, 0.5, 1, 0.5, 1, 1] });
        let a = render(&run(doc.clone()).unwrap(), "x", true).unwrap();
        let b = render(&run(doc).unwrap(), "x", true).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().any(|(n, _)| n == "x.svg"));
    }
}
