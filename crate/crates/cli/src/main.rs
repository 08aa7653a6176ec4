//! Command-line front end: parse a config file, dispatch to the library,
//! emit a JSON report on standard output, and exit with a stable code:
//! 0 verdict pass, 1 verdict fail or admissibility violation, 2 config or
//! expression parse error, 3 numeric domain error.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use biwarp_core::classify::ClassifyError;
use biwarp_core::defaults::{
    CLASSIFY_SAMPLES, CROSS_CASES, FLOW_TIME, GEODESIC_SPEED, GEODESIC_TIME, PROBES, SEED,
    STEPS, TOL_CLASSIFY, TOL_CONSERVED, TOL_CROSS_PATH, TOL_FLOW, TOL_KILLING, TOL_LINK,
};
use biwarp_core::dynamics::{
    conserved_series, integrate_geodesic, isometry_defect, DynamicsError,
};
use biwarp_core::expr::Point;
use biwarp_core::families::{list_required_params, summary, warp_slots, FamilyError};
use biwarp_core::geometry::{GeometryError, MetricParseError, MetricSpec};
use biwarp_core::killing::{GridSpec, LieDerivComponents, Prop1Case, ResidualReport};
use biwarp_core::{
    applicable_families, build_family, check_prop1_structure, classify_warps,
    default_params, expr_agreement_sweep, is_killing, killing_two_path_sweep, parse_expr,
    ConditionEstimate, FamilyId, FamilyInstance, FrameField, KillingError, VarSet,
    WarpClassification, WarpSlots,
};

use config::{ConfigError, RunConfig};
use report::{report, Json};

#[derive(Parser)]
#[command(
    name = "biwarp",
    version,
    about = "Verification and exploration toolkit for Killing vector fields on R^3 \
             with a diagonal metric driven by two warps of x3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a field solves the Killing equation on a grid
    Verify(ConfigArg),
    /// Estimate the warp conditions and list admissible families
    Classify(ConfigArg),
    /// Inspect or build the catalogued solution families
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
    /// Integrate the field's flow and measure its isometry defect
    FlowCheck(ConfigArg),
    /// Integrate a geodesic and measure conservation drift
    GeodesicCheck(ConfigArg),
    /// Run the randomized agreement sweeps between evaluation routes
    CrossCheck(OptionalConfigArg),
}

#[derive(Subcommand)]
enum FamiliesAction {
    /// List every family with its parameter contract
    List,
    /// Build one family member from a config and verify it
    Build(ConfigArg),
}

#[derive(Args)]
struct ConfigArg {
    /// Path to the run configuration file
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct OptionalConfigArg {
    /// Path to the run configuration file (defaults apply without one)
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A run that ended without a result payload: carries the exit code, the
/// verdict string, and the message for standard error.
struct Failure {
    code: u8,
    verdict: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        let verdict = if code == 1 { "rejected" } else { "error" };
        Failure { code, verdict, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(2, e.to_string())
    }
}

impl From<MetricParseError> for Failure {
    fn from(e: MetricParseError) -> Self {
        let code = match &e {
            MetricParseError::Warp { .. } => 2,
            MetricParseError::Geometry(g) => geometry_code(g),
        };
        Failure::new(code, e.to_string())
    }
}

fn geometry_code(e: &GeometryError) -> u8 {
    match e {
        GeometryError::ZeroK3 => 2,
        GeometryError::ZeroWarp { .. } | GeometryError::Eval(_) => 3,
    }
}

fn classify_code(e: &ClassifyError) -> u8 {
    match e {
        ClassifyError::BadInterval(..) | ClassifyError::TooFewSamples(_) => 2,
        ClassifyError::ZeroWarpSample { .. } | ClassifyError::Eval(_) => 3,
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let code = match &e {
            FamilyError::UnknownId(_)
            | FamilyError::MissingParam { .. }
            | FamilyError::UnknownParam { .. }
            | FamilyError::NotFinite { .. }
            | FamilyError::UnsupportedWarp { .. }
            | FamilyError::BadExampleIndex(_) => 2,
            FamilyError::MustBeNonZero { .. }
            | FamilyError::SignViolation { .. }
            | FamilyError::ConstraintViolation { .. }
            | FamilyError::WarpMismatch { .. } => 1,
            FamilyError::Geometry(g) => geometry_code(g),
            FamilyError::Classify(c) => classify_code(c),
        };
        Failure::new(code, e.to_string())
    }
}

impl From<KillingError> for Failure {
    fn from(e: KillingError) -> Self {
        Failure::new(3, e.to_string())
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        let code = geometry_code(&e);
        Failure::new(code, e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::new(classify_code(&e), e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        Failure::new(3, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (command_name, outcome) = dispatch(&cli.command);
    let wall = started.elapsed().as_millis() as u64;
    match outcome {
        Ok(run) => {
            let rep = report(command_name, run.config_echo, run.result, run.verdict, wall);
            let text = rep.render();
            print!("{text}");
            if let Some(path) = &run.output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("cannot write report to {path:?}: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(run.exit)
        }
        Err((echo, failure)) => {
            let result = Json::obj(vec![("error", Json::str(&failure.message))]);
            let rep = report(command_name, echo, result, failure.verdict, wall);
            print!("{}", rep.render());
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Everything a successful run hands back to `main`.
struct RunOutput {
    config_echo: Json,
    result: Json,
    verdict: &'static str,
    exit: u8,
    output: Option<String>,
}

type Outcome = Result<RunOutput, (Json, Failure)>;

fn dispatch(command: &Command) -> (&'static str, Outcome) {
    match command {
        Command::Verify(arg) => ("verify", with_config(&arg.config, run_verify)),
        Command::Classify(arg) => ("classify", with_config(&arg.config, run_classify)),
        Command::Families { action: FamiliesAction::List } => {
            ("families list", run_families_list())
        }
        Command::Families { action: FamiliesAction::Build(arg) } => {
            ("families build", with_config(&arg.config, run_families_build))
        }
        Command::FlowCheck(arg) => ("flow-check", with_config(&arg.config, run_flow_check)),
        Command::GeodesicCheck(arg) => {
            ("geodesic-check", with_config(&arg.config, run_geodesic_check))
        }
        Command::CrossCheck(arg) => ("cross-check", match &arg.config {
            Some(path) => with_config(path, run_cross_check),
            None => {
                let cfg = RunConfig::default();
                let echo = echo_config(&cfg);
                run_cross_check(&cfg, echo.clone()).map_err(|f| (echo, f))
            }
        }),
    }
}

fn with_config(path: &Path, run: impl FnOnce(&RunConfig, Json) -> Result<RunOutput, Failure>) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return Err((
                Json::Null,
                Failure::new(2, format!("cannot read config {path:?}: {e}")),
            ))
        }
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return Err((Json::Null, e.into())),
    };
    let echo = echo_config(&cfg);
    run(&cfg, echo.clone()).map_err(|f| (echo, f))
}

// ---------------------------------------------------------------------------
// config echo

fn echo_config(cfg: &RunConfig) -> Json {
    let mut pairs: Vec<(&str, Json)> = Vec::new();
    if let Some(m) = &cfg.metric {
        pairs.push((
            "metric",
            Json::obj(vec![
                ("f1", Json::str(&m.f1)),
                ("f2", Json::str(&m.f2)),
                ("k3", Json::Float(m.k3)),
            ]),
        ));
    }
    if let Some(f) = &cfg.field {
        pairs.push((
            "field",
            Json::obj(vec![
                ("v1", Json::str(&f.v1)),
                ("v2", Json::str(&f.v2)),
                ("v3", Json::str(&f.v3)),
            ]),
        ));
    }
    if let Some(fam) = &cfg.family {
        let mut inner = vec![("id", Json::str(&fam.id))];
        inner.push((
            "params",
            Json::Obj(
                fam.params
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Float(*v)))
                    .collect(),
            ),
        ));
        if let Some(f1) = &fam.f1 {
            inner.push(("f1", Json::str(f1)));
        }
        if let Some(f2) = &fam.f2 {
            inner.push(("f2", Json::str(f2)));
        }
        pairs.push(("family", Json::obj(inner)));
    }
    if let Some(g) = &cfg.grid {
        pairs.push((
            "grid",
            Json::obj(vec![
                (
                    "bounds",
                    Json::Arr(g.bounds.iter().map(|b| Json::floats(*b)).collect()),
                ),
                (
                    "counts",
                    Json::Arr(g.counts.iter().map(|c| Json::UInt(*c as u64)).collect()),
                ),
            ]),
        ));
    }
    let o = &cfg.options;
    let mut opts: Vec<(&str, Json)> = Vec::new();
    if let Some(v) = o.tol {
        opts.push(("tol", Json::Float(v)));
    }
    if let Some(v) = o.steps {
        opts.push(("steps", Json::UInt(v as u64)));
    }
    if let Some(v) = o.t {
        opts.push(("t", Json::Float(v)));
    }
    if let Some((a, b)) = o.interval {
        opts.push(("interval", Json::floats([a, b])));
    }
    if let Some(v) = o.n_samples {
        opts.push(("n_samples", Json::UInt(v as u64)));
    }
    if let Some(v) = o.seed {
        opts.push(("seed", Json::UInt(v)));
    }
    if let Some(v) = o.probes {
        opts.push(("probes", Json::UInt(v as u64)));
    }
    if let Some(v) = o.cases {
        opts.push(("cases", Json::UInt(v as u64)));
    }
    if let Some(v) = o.x0 {
        opts.push(("x0", Json::floats(v)));
    }
    if let Some(v) = o.v0 {
        opts.push(("v0", Json::floats(v)));
    }
    if let Some(v) = &o.output {
        opts.push(("output", Json::str(v)));
    }
    if !opts.is_empty() {
        pairs.push(("options", Json::obj(opts)));
    }
    Json::obj(pairs)
}

// ---------------------------------------------------------------------------
// shared pieces

/// The metric and field a subcommand operates on: either spelled out in
/// [metric]/[field] or constructed from [family]. Exactly one route.
struct Subject {
    metric: MetricSpec,
    field: FrameField,
    /// Built instance when the family route was taken.
    instance: Option<FamilyInstance>,
}

fn build_subject(cfg: &RunConfig, command: &'static str) -> Result<Subject, Failure> {
    match (&cfg.field, &cfg.family) {
        (Some(_), Some(_)) => Err(Failure::new(
            2,
            format!("subcommand `{command}` takes either [field] or [family], not both"),
        )),
        (Some(field), None) => {
            let m = cfg.metric.as_ref().ok_or(ConfigError::MissingSection("metric"))?;
            let metric = MetricSpec::parse(&m.f1, &m.f2, m.k3)?;
            let field = FrameField::parse(&field.v1, &field.v2, &field.v3)
                .map_err(|e| Failure::new(2, e.to_string()))?;
            Ok(Subject { metric, field, instance: None })
        }
        (None, Some(fam)) => {
            if cfg.metric.is_some() {
                return Err(Failure::new(
                    2,
                    "[family] builds its own metric; drop the [metric] section",
                ));
            }
            let id: FamilyId = fam
                .id
                .parse()
                .map_err(|_| FamilyError::UnknownId(fam.id.clone()))?;
            // Defaults first, config overrides on top: `[family]` only needs
            // the parameters the run actually cares about.
            let mut params = default_params(id);
            for (name, value) in &fam.params {
                params = params.set(name, *value);
            }
            if let Some(src) = &fam.f1 {
                let warp = parse_expr(src, &VarSet::warp())
                    .map_err(|e| Failure::new(2, format!("family warp f1: {e}")))?;
                params = params.with_warp1(warp);
            }
            if let Some(src) = &fam.f2 {
                let warp = parse_expr(src, &VarSet::warp())
                    .map_err(|e| Failure::new(2, format!("family warp f2: {e}")))?;
                params = params.with_warp2(warp);
            }
            let instance = build_family(id, &params)?;
            Ok(Subject {
                metric: instance.metric.clone(),
                field: instance.field.clone(),
                instance: Some(instance),
            })
        }
        (None, None) => Err(Failure::new(
            2,
            format!("subcommand `{command}` needs a [field] or a [family] section"),
        )),
    }
}

fn grid_for(cfg: &RunConfig, subject: &Subject) -> Result<GridSpec, Failure> {
    match &cfg.grid {
        Some(g) => GridSpec::new(g.bounds, g.counts)
            .map_err(|e| Failure::new(2, e.to_string())),
        None => Ok(subject
            .instance
            .as_ref()
            .map(|i| i.validity)
            .unwrap_or_default()),
    }
}

fn json_residual(r: &ResidualReport) -> Json {
    let per: Vec<(String, Json)> = LieDerivComponents::NAMES
        .iter()
        .zip(r.per_component_max)
        .map(|(name, v)| (name.to_string(), Json::Float(v)))
        .collect();
    Json::obj(vec![
        ("max_abs", Json::Float(r.max_abs)),
        ("rms", Json::Float(r.rms)),
        ("per_component_max", Json::Obj(per)),
        ("worst_point", Json::floats(r.worst_point.to_array())),
        ("n_points", Json::UInt(r.n_points as u64)),
    ])
}

fn json_structure(case: &Prop1Case) -> Json {
    match case {
        Prop1Case::V3Constant => Json::obj(vec![("case", Json::str("v3_constant"))]),
        Prop1Case::V3OfX1 { cond_f1f2p } => Json::obj(vec![
            ("case", Json::str("v3_of_x1")),
            ("cond_f1f2p", Json::Float(*cond_f1f2p)),
        ]),
        Prop1Case::V3OfX2 { cond_f1pf2 } => Json::obj(vec![
            ("case", Json::str("v3_of_x2")),
            ("cond_f1pf2", Json::Float(*cond_f1pf2)),
        ]),
        Prop1Case::V3OfX1X2 { cond_f1f2p, cond_f1pf2 } => Json::obj(vec![
            ("case", Json::str("v3_of_x1_x2")),
            ("cond_f1f2p", Json::Float(*cond_f1f2p)),
            ("cond_f1pf2", Json::Float(*cond_f1pf2)),
        ]),
        Prop1Case::Violation { reason } => Json::obj(vec![
            ("case", Json::str("violation")),
            ("reason", Json::str(reason)),
        ]),
    }
}

fn json_instance(inst: &FamilyInstance) -> Json {
    Json::obj(vec![
        ("id", Json::str(inst.id.name())),
        ("f1", Json::str(inst.metric.f1().text_with_names(&["x3"]))),
        ("f2", Json::str(inst.metric.f2().text_with_names(&["x3"]))),
        ("k3", Json::Float(inst.metric.k3())),
        ("v1", Json::str(inst.field.v1().to_text())),
        ("v2", Json::str(inst.field.v2().to_text())),
        ("v3", Json::str(inst.field.v3().to_text())),
        (
            "validity",
            Json::obj(vec![
                (
                    "bounds",
                    Json::Arr(
                        inst.validity
                            .bounds()
                            .iter()
                            .map(|b| Json::floats(*b))
                            .collect(),
                    ),
                ),
                (
                    "counts",
                    Json::Arr(
                        inst.validity
                            .counts()
                            .iter()
                            .map(|c| Json::UInt(*c as u64))
                            .collect(),
                    ),
                ),
            ]),
        ),
        ("provenance", Json::str(&inst.provenance)),
    ])
}

fn json_estimate(e: &ConditionEstimate) -> Json {
    Json::obj(vec![
        ("is_constant", Json::Bool(e.is_constant)),
        ("value", Json::Float(e.value)),
        ("spread", Json::Float(e.spread)),
        ("n_samples", Json::UInt(e.n_samples as u64)),
    ])
}

fn json_classification(c: &WarpClassification) -> Json {
    Json::obj(vec![
        ("f1_const", json_estimate(&c.f1_const)),
        ("f2_const", json_estimate(&c.f2_const)),
        ("ratio_const", json_estimate(&c.ratio_const)),
        ("logder1_const", json_estimate(&c.logder1_const)),
        ("logder2_const", json_estimate(&c.logder2_const)),
        ("cond_f1f2p", json_estimate(&c.cond_f1f2p)),
        ("cond_f1pf2", json_estimate(&c.cond_f1pf2)),
        ("k1_const", json_estimate(&c.k1_const)),
        ("k2_const", json_estimate(&c.k2_const)),
    ])
}

fn slots_name(slots: WarpSlots) -> &'static str {
    match slots {
        WarpSlots::Both => "both",
        WarpSlots::Single => "single",
        WarpSlots::F1Only => "f1_only",
        WarpSlots::F2Only => "f2_only",
        WarpSlots::None => "none",
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn run_verify(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    let subject = build_subject(cfg, "verify")?;
    let grid = grid_for(cfg, &subject)?;
    let tol = cfg.options.tol.unwrap_or(TOL_KILLING);
    let verdict = is_killing(&subject.metric, &subject.field, &grid, tol)?;
    let structure = check_prop1_structure(&subject.metric, &subject.field, &grid, tol)?;
    let mut result = vec![
        ("tol", Json::Float(tol)),
        ("residual", json_residual(&verdict.report)),
        ("structure", json_structure(&structure)),
    ];
    if let Some(inst) = &subject.instance {
        result.push(("instance", json_instance(inst)));
    }
    Ok(RunOutput {
        config_echo: echo,
        result: Json::obj(result),
        verdict: if verdict.killing { "killing" } else { "not_killing" },
        exit: u8::from(!verdict.killing),
        output: cfg.options.output.clone(),
    })
}

fn run_classify(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    let m = cfg.metric.as_ref().ok_or(ConfigError::MissingSection("metric"))?;
    let metric = MetricSpec::parse(&m.f1, &m.f2, m.k3)?;
    let interval = cfg.options.interval.unwrap_or((-1.0, 1.0));
    let n = cfg.options.n_samples.unwrap_or(CLASSIFY_SAMPLES);
    let tol = cfg.options.tol.unwrap_or(TOL_CLASSIFY);
    let cls = classify_warps(metric.f1(), metric.f2(), interval, n, tol)?;
    let admitted: Vec<Json> = applicable_families(&cls, metric.k3())
        .into_iter()
        .map(|(id, note)| {
            Json::obj(vec![("id", Json::str(id.name())), ("note", Json::str(note))])
        })
        .collect();
    let result = Json::obj(vec![
        ("interval", Json::floats([interval.0, interval.1])),
        ("n_samples", Json::UInt(n as u64)),
        ("tol", Json::Float(tol)),
        ("estimates", json_classification(&cls)),
        ("applicable", Json::Arr(admitted)),
    ]);
    Ok(RunOutput {
        config_echo: echo,
        result,
        verdict: "ok",
        exit: 0,
        output: cfg.options.output.clone(),
    })
}

fn run_families_list() -> Outcome {
    let families: Vec<Json> = FamilyId::ALL
        .iter()
        .map(|id| {
            let params: Vec<Json> = list_required_params(*id)
                .iter()
                .map(|p| {
                    Json::obj(vec![
                        ("name", Json::str(p.name)),
                        ("requirement", Json::str(p.req.to_string())),
                        ("default", Json::Float(p.default)),
                        ("what", Json::str(p.what)),
                    ])
                })
                .collect();
            Json::obj(vec![
                ("id", Json::str(id.name())),
                ("summary", Json::str(summary(*id))),
                (
                    "mirror",
                    id.mirror().map_or(Json::Null, |m| Json::str(m.name())),
                ),
                ("warp_slots", Json::str(slots_name(warp_slots(*id)))),
                ("params", Json::Arr(params)),
            ])
        })
        .collect();
    let result = Json::obj(vec![
        ("count", Json::UInt(FamilyId::ALL.len() as u64)),
        ("families", Json::Arr(families)),
    ]);
    Ok(RunOutput {
        config_echo: Json::Null,
        result,
        verdict: "ok",
        exit: 0,
        output: None,
    })
}

fn run_families_build(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    if cfg.family.is_none() {
        return Err(ConfigError::MissingSection("family").into());
    }
    if cfg.field.is_some() {
        return Err(Failure::new(2, "families build takes only a [family] section"));
    }
    let subject = build_subject(cfg, "families build")?;
    let inst = subject.instance.as_ref().expect("family route builds an instance");
    let grid = grid_for(cfg, &subject)?;
    let tol = cfg.options.tol.unwrap_or(TOL_KILLING);
    let verdict = is_killing(&subject.metric, &subject.field, &grid, tol)?;
    let result = Json::obj(vec![
        ("instance", json_instance(inst)),
        ("tol", Json::Float(tol)),
        ("residual", json_residual(&verdict.report)),
    ]);
    Ok(RunOutput {
        config_echo: echo,
        result,
        verdict: if verdict.killing { "killing" } else { "not_killing" },
        exit: u8::from(!verdict.killing),
        output: cfg.options.output.clone(),
    })
}

fn run_flow_check(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    let subject = build_subject(cfg, "flow-check")?;
    let grid = grid_for(cfg, &subject)?;
    let x0 = cfg.options.x0.map(Point::from_array).unwrap_or_else(|| grid.center());
    let t_final = cfg.options.t.unwrap_or(FLOW_TIME);
    let steps = cfg.options.steps.unwrap_or(STEPS);
    let probes = cfg.options.probes.unwrap_or(PROBES);
    let seed = cfg.options.seed.unwrap_or(SEED);
    let tol = cfg.options.tol.unwrap_or(TOL_FLOW);
    let rep = isometry_defect(&subject.metric, &subject.field, x0, t_final, steps, probes, seed)?;
    let pass = rep.defect <= tol;
    let result = Json::obj(vec![
        ("x0", Json::floats(x0.to_array())),
        ("t_final", Json::Float(rep.t_final)),
        ("steps", Json::UInt(steps as u64)),
        ("probes", Json::UInt(rep.n_probes as u64)),
        ("seed", Json::UInt(seed)),
        ("tol", Json::Float(tol)),
        ("defect", Json::Float(rep.defect)),
    ]);
    Ok(RunOutput {
        config_echo: echo,
        result,
        verdict: if pass { "pass" } else { "fail" },
        exit: u8::from(!pass),
        output: cfg.options.output.clone(),
    })
}

fn run_geodesic_check(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    let subject = build_subject(cfg, "geodesic-check")?;
    let grid = grid_for(cfg, &subject)?;
    let x0 = cfg.options.x0.map(Point::from_array).unwrap_or_else(|| grid.center());
    let t_final = cfg.options.t.unwrap_or(GEODESIC_TIME);
    let steps = cfg.options.steps.unwrap_or(STEPS);
    let tol = cfg.options.tol.unwrap_or(TOL_CONSERVED);
    let v0 = match cfg.options.v0 {
        Some(v) => v,
        None => {
            // Launch along the diagonal of the orthonormal frame at the
            // default speed.
            let (w1, w2) = subject.metric.warp_jets(x0.x3)?;
            let c = GEODESIC_SPEED / 3.0f64.sqrt();
            [c * w1.value, c * w2.value, c * subject.metric.k3()]
        }
    };
    let traj = integrate_geodesic(&subject.metric, x0, v0, t_final, steps)?;
    let charge = conserved_series(&subject.metric, &subject.field, &traj)?;
    let speed = biwarp_core::dynamics::speed_series(&subject.metric, &traj)?;
    let pass = charge.drift <= tol && speed.drift <= tol;
    let series = |s: &biwarp_core::dynamics::ConservedSeries| {
        Json::obj(vec![
            ("first", Json::Float(*s.values.first().expect("nonempty series"))),
            ("last", Json::Float(*s.values.last().expect("nonempty series"))),
            ("drift", Json::Float(s.drift)),
        ])
    };
    let result = Json::obj(vec![
        ("x0", Json::floats(x0.to_array())),
        ("v0", Json::floats(v0)),
        ("t_final", Json::Float(t_final)),
        ("steps", Json::UInt(steps as u64)),
        ("tol", Json::Float(tol)),
        ("endpoint", Json::floats(traj.end_point().to_array())),
        ("charge", series(&charge)),
        ("speed", series(&speed)),
    ]);
    Ok(RunOutput {
        config_echo: echo,
        result,
        verdict: if pass { "pass" } else { "fail" },
        exit: u8::from(!pass),
        output: cfg.options.output.clone(),
    })
}

fn run_cross_check(cfg: &RunConfig, echo: Json) -> Result<RunOutput, Failure> {
    let cases = cfg.options.cases.unwrap_or(CROSS_CASES);
    let seed = cfg.options.seed.unwrap_or(SEED);
    let expr_rep = expr_agreement_sweep(cases, seed)
        .map_err(|e| Failure::new(3, e.to_string()))?;
    let kill_rep = killing_two_path_sweep(cases, seed)?;
    let pass = expr_rep.max_rel_dev_order1 <= TOL_CROSS_PATH
        && expr_rep.max_rel_dev_order2 <= TOL_CROSS_PATH
        && kill_rep.max_rel_dev <= TOL_CROSS_PATH
        && kill_rep.max_link_dev <= TOL_LINK;
    let result = Json::obj(vec![
        ("cases", Json::UInt(cases as u64)),
        ("seed", Json::UInt(seed)),
        (
            "expr",
            Json::obj(vec![
                ("max_rel_dev_order1", Json::Float(expr_rep.max_rel_dev_order1)),
                ("max_rel_dev_order2", Json::Float(expr_rep.max_rel_dev_order2)),
                ("bound", Json::Float(TOL_CROSS_PATH)),
            ]),
        ),
        (
            "killing_two_path",
            Json::obj(vec![
                ("max_rel_dev", Json::Float(kill_rep.max_rel_dev)),
                ("bound", Json::Float(TOL_CROSS_PATH)),
                ("max_link_dev", Json::Float(kill_rep.max_link_dev)),
                ("link_bound", Json::Float(TOL_LINK)),
            ]),
        ),
    ]);
    Ok(RunOutput {
        config_echo: echo,
        result,
        verdict: if pass { "pass" } else { "fail" },
        exit: u8::from(!pass),
        output: cfg.options.output.clone(),
    })
}
