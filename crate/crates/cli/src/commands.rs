use std::fs;

use nalgebra::{Matrix4, Vector4};
use serde_json::{json, Value};

use petrov_core::annihilator::{solve_lorentzian, solve_on_sphere, NormalFormParams, SolveOutcome, SolverConfig};
use petrov_core::bivector::{commutator_residual, hodge_matrix, Frame, MetricKind};
use petrov_core::chart::{bridge_matrix, eval_vector, parse_metric, Builtin, MetricChart};
use petrov_core::curvature::{curvature_at, orthonormal_frame, Curvature4, FrameBundle};
use petrov_core::operator::{annihilates, blocks, bridge_operator, build_operator, WeylOperator6};
use petrov_core::petrov::{classify_operator, normal_form_fixture, ClassifyOptions, FixtureParams, PetrovType};
use petrov_core::quadform::{
    berger_thorpe_normal_form, count_from_classification, critical_points_oracle, lorentz_weyl_via_riemann_bridge,
    BergerThorpeForm, OracleConfig,
};
use petrov_core::verify::{self, Suite, VerifyConfig};
use petrov_core::{Error, Execution, Result};

use crate::output::{arr4, complex, complex_json, emit, snap, vec4, vec_json, Report};
use crate::{RunArgs, Status, VerifyArgs};

/// Where the Weyl tensor comes from, with the frame it is read in.
struct Context {
    label: String,
    chart: Option<MetricChart>,
    kind: MetricKind,
    orientation: i8,
    /// Chart-component Weyl tensor.
    weyl: Curvature4,
    fb: FrameBundle,
}

impl Context {
    fn operator(&self) -> Result<WeylOperator6> {
        build_operator(&self.weyl, &self.fb, self.kind)
    }

    fn frame_tensor(&self) -> Curvature4 {
        self.weyl.in_frame(&self.fb.frame)
    }

    fn describe(&self, r: &mut Report) {
        r.value("source", "source", json!(self.label));
        r.value("signature", "signature", json!(self.kind.name()));
        if self.chart.is_some() {
            r.value("point", "point", vec_json(&self.fb.point));
        }
    }
}

fn parse_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Chart(format!("{what} must be {n} comma-separated numbers, got `{text}`")))?;
    if vals.len() != n {
        return Err(Error::Chart(format!("{what} must have {n} entries, got {}", vals.len())));
    }
    Ok(vals)
}

fn fixture_params(t: PetrovType) -> FixtureParams {
    match t {
        PetrovType::I => FixtureParams::Diagonal {
            lambda: [1.0, 2.0, -3.0],
            mu: [0.5, -0.25, -0.25],
        },
        PetrovType::D => FixtureParams::Diagonal {
            lambda: [2.0, -1.0, -1.0],
            mu: [0.4, -0.2, -0.2],
        },
        PetrovType::II => FixtureParams::Jordan { lambda: 0.25, mu: 0.0 },
        PetrovType::N => FixtureParams::Jordan { lambda: 0.0, mu: 0.0 },
        PetrovType::III | PetrovType::O => FixtureParams::None,
    }
}

fn standard_bundle(kind: MetricKind) -> FrameBundle {
    let sig = kind.vector_signature();
    FrameBundle {
        point: [0.0; 4],
        frame: Frame::standard(kind),
        g: Matrix4::from_diagonal(&Vector4::from(sig)),
    }
}

fn context(a: &RunArgs) -> Result<Context> {
    if let Some(name) = &a.fixture {
        let t = PetrovType::from_name(name).ok_or_else(|| Error::Chart(format!("unknown Petrov type `{name}`")))?;
        let op = normal_form_fixture(t, fixture_params(t))?;
        return Ok(Context {
            label: format!("fixture {t}"),
            chart: None,
            kind: MetricKind::Lorentzian,
            orientation: 1,
            weyl: op.tensor(),
            fb: standard_bundle(MetricKind::Lorentzian),
        });
    }
    if let Some(text) = &a.params {
        let v = parse_floats(text, 6, "--params")?;
        let p = NormalFormParams::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])?;
        return Ok(Context {
            label: format!("normal form λ = ({}, {}, {}), μ = ({}, {}, {})", v[0], v[1], v[2], v[3], v[4], v[5]),
            chart: None,
            kind: MetricKind::Riemannian,
            orientation: 1,
            weyl: p.tensor(),
            fb: standard_bundle(MetricKind::Riemannian),
        });
    }
    let chart = match (&a.chart, &a.builtin) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Chart(format!("cannot read {}: {e}", path.display())))?;
            parse_metric(&text)?
        }
        (None, Some(name)) => Builtin::parse(name)?.chart(),
        (None, None) => {
            return Err(Error::Chart(
                "one of --chart, --builtin, --fixture or --params is required".into(),
            ))
        }
    };
    let text = a
        .point
        .as_deref()
        .ok_or_else(|| Error::Chart("--point is required with a chart".into()))?;
    let v = parse_floats(text, 4, "--point")?;
    let p = [v[0], v[1], v[2], v[3]];
    let pc = curvature_at(&chart, &p)?;
    let fb = orthonormal_frame(&chart, &p)?;
    Ok(Context {
        label: chart.name().map(str::to_owned).unwrap_or_else(|| "chart".into()),
        kind: chart.kind(),
        orientation: chart.orientation(),
        weyl: pc.weyl,
        fb,
        chart: Some(chart),
    })
}

/// `--t` as a chart vector at the point, rescaled to unit length.
fn given_t(ctx: &Context, a: &RunArgs) -> Result<Option<Vector4<f64>>> {
    let Some(text) = &a.t else { return Ok(None) };
    let v = match &ctx.chart {
        Some(chart) => eval_vector(&chart.parse_vector(text)?, &ctx.fb.point)?,
        None => Vector4::from_iterator(parse_floats(text, 4, "--t")?),
    };
    let n = v.dot(&(ctx.fb.g * v));
    let expected = ctx.kind.vector_signature()[0];
    if n * expected <= 1e-14 * v.norm_squared().max(1e-300) {
        let want = if expected > 0.0 { "nonzero" } else { "timelike" };
        return Err(Error::Contract(format!("T must be {want} (⟨T,T⟩ = {n:e})")));
    }
    Ok(Some(v / n.abs().sqrt()))
}

fn solver(a: &RunArgs) -> SolverConfig {
    let _ = a.seed; // the multistart is quasi-random and needs no seed
    SolverConfig::default()
}

fn solve(ctx: &Context, cfg: &SolverConfig) -> Result<SolveOutcome> {
    match ctx.kind {
        MetricKind::Riemannian => Ok(solve_on_sphere(&ctx.frame_tensor(), cfg, false)),
        MetricKind::Lorentzian => solve_lorentzian(&ctx.operator()?, true, cfg),
    }
}

fn report_solutions(r: &mut Report, ctx: &Context, out: &SolveOutcome) {
    let summary = if out.continuum {
        "continuum"
    } else if out.solutions.is_empty() {
        "none"
    } else {
        "isolated"
    };
    r.value("annihilators", "annihilators", json!(summary));
    let mut list = Vec::new();
    for s in &out.solutions {
        let chart_vec = ctx.fb.frame.vector_from_components(&Vector4::from(s.c));
        r.line(format!(
            "  c = {}  T = {}  residual {:.2e}{}",
            arr4(&s.c),
            vec4(&chart_vec),
            s.residual,
            s.class.map(|c| format!("  {}", c.name())).unwrap_or_default()
        ));
        list.push(json!({
            "frame_components": s.c,
            "chart_components": [chart_vec[0], chart_vec[1], chart_vec[2], chart_vec[3]],
            "residual": s.residual,
            "class": s.class.map(|c| c.name()),
        }));
    }
    r.field("solutions", Value::Array(list));
}

pub fn weyl(a: &RunArgs) -> Result<Status> {
    let ctx = context(a)?;
    let op = ctx.operator()?;
    let mut r = Report::new("weyl");
    ctx.describe(&mut r);
    r.matrix4("frame", "frame (columns e1..e4, chart components)", &ctx.fb.frame.matrix());
    r.matrix6("operator", "Weyl operator on e1^e2, e1^e3, e1^e4, e3^e4, e4^e2, e2^e3", &op.mat);
    let (ab, bb) = blocks(&op);
    r.matrix3("a_block", "A block", &ab);
    r.matrix3("b_block", "B block", &bb);
    let wf = ctx.frame_tensor();
    let g_inv = ctx.fb.g.try_inverse().unwrap_or_else(Matrix4::identity);
    r.value("symmetry_residual", "symmetry/Bianchi residual", json!(ctx.weyl.symmetry_residual()));
    r.value("trace_residual", "trace residual", json!(ctx.weyl.trace_residual(&g_inv)));
    r.value("self_adjoint_residual", "self-adjointness residual", json!(op.self_adjoint_residual()));
    r.value(
        "star_commutator",
        "Hodge-star commutator",
        json!(commutator_residual(&op.mat, &hodge_matrix(op.kind))),
    );
    let flat = wf.max_abs() <= 1e-10;
    if flat {
        r.value("note", "note", json!("conformally flat (Type O)"));
        r.value("annihilators", "annihilators", json!("all (W = 0)"));
    } else {
        let out = solve(&ctx, &solver(a))?;
        report_solutions(&mut r, &ctx, &out);
    }
    r.print(a.format);
    Ok(Status::Ok)
}

fn normal_form_of(op: &WeylOperator6, tol: f64) -> Result<BergerThorpeForm> {
    berger_thorpe_normal_form(op, tol)
}

pub fn solve_t(a: &RunArgs) -> Result<Status> {
    let ctx = context(a)?;
    let op = ctx.operator()?;
    let mut r = Report::new("solve-t");
    ctx.describe(&mut r);
    if ctx.kind == MetricKind::Riemannian && op.mat.amax() > 1e-10 {
        let bt = normal_form_of(&op, a.tol.max(1e-8))?;
        r.value("lambda", "normal form λ", vec_json(&bt.params.lambda));
        r.value("mu", "normal form μ", vec_json(&bt.params.mu));
    }
    if op.mat.amax() <= 1e-10 {
        r.value("annihilators", "annihilators", json!("all (W = 0)"));
        r.print(a.format);
        return Ok(Status::Ok);
    }
    let out = solve(&ctx, &solver(a))?;
    report_solutions(&mut r, &ctx, &out);
    r.print(a.format);
    Ok(Status::Ok)
}

/// The Lorentzian operator to classify, with the annihilating vector used
/// (if any) and the bridged metric.
struct Lorentz {
    op: WeylOperator6,
    t: Option<Vector4<f64>>,
    metric: Matrix4<f64>,
}

fn lorentzian(ctx: &Context, a: &RunArgs) -> Result<Lorentz> {
    match ctx.kind {
        MetricKind::Lorentzian => {
            let op = match given_t(ctx, a)? {
                Some(t) => {
                    let frame = petrov_core::curvature::adapted_frame(&ctx.fb.g, ctx.kind, &t, ctx.orientation)?;
                    let fb = FrameBundle {
                        point: ctx.fb.point,
                        frame,
                        g: ctx.fb.g,
                    };
                    build_operator(&ctx.weyl, &fb, MetricKind::Lorentzian)?
                }
                None => ctx.operator()?,
            };
            Ok(Lorentz {
                op,
                t: None,
                metric: ctx.fb.g,
            })
        }
        MetricKind::Riemannian => {
            let t = match given_t(ctx, a)? {
                Some(t) => t,
                None => {
                    let out = solve(ctx, &solver(a))?;
                    let first = out.solutions.first().ok_or_else(|| {
                        Error::Contract("no annihilating T at this point; pass --t to choose one".into())
                    })?;
                    ctx.fb.frame.vector_from_components(&Vector4::from(first.c))
                }
            };
            let (_, residual) = annihilates(&ctx.weyl, &t, &ctx.fb, a.tol);
            if residual > a.tol {
                return Err(Error::AnnihilationViolated { residual });
            }
            let op = bridge_operator(&ctx.weyl, &ctx.fb.g, MetricKind::Riemannian, &t, ctx.fb.point, ctx.orientation)?;
            Ok(Lorentz {
                op,
                t: Some(t),
                metric: bridge_matrix(&ctx.fb.g, &t, MetricKind::Riemannian)?,
            })
        }
    }
}

pub fn classify(a: &RunArgs) -> Result<Status> {
    let ctx = context(a)?;
    let lor = lorentzian(&ctx, a)?;
    let mut r = Report::new("classify");
    ctx.describe(&mut r);
    if let Some(t) = lor.t {
        r.value("t", "T (chart components)", json!([t[0], t[1], t[2], t[3]]));
        r.matrix4("lorentz_metric", "bridged Lorentzian metric", &lor.metric);
    }
    r.matrix6("lorentz_operator", "Lorentzian Weyl operator", &lor.op.mat);
    let cw = classify_operator(&lor.op, a.tol, &ClassifyOptions::default())?;
    r.value("petrov", "Petrov type", json!(cw.petrov.name()));
    r.line(format!(
        "eigenvalues: {}",
        cw.eigenvalues.iter().map(|z| complex(*z)).collect::<Vec<_>>().join(", ")
    ));
    r.field("eigenvalues", json!(cw.eigenvalues.iter().map(|z| complex_json(*z)).collect::<Vec<_>>()));
    r.value("borderline", "borderline", json!(cw.borderline));
    let count = count_from_classification(&cw);
    r.value("critical_points", "spacelike critical points", json!(count.count.to_string()));
    if lor.t.is_some() {
        let ok = matches!(cw.petrov, PetrovType::I | PetrovType::D);
        r.value("type_in_i_or_d", "type in {I, D}", json!(ok));
    } else {
        let out = solve_lorentzian(&lor.op, true, &solver(a))?;
        if out.continuum && lor.op.mat.amax() <= 1e-12 {
            r.value("note", "note", json!("every timelike vector is annihilating (W = 0)"));
        } else if out.continuum {
            r.value("note", "note", json!("a continuum of timelike annihilators exists"));
        } else if out.is_empty() {
            r.value("note", "note", json!("no timelike annihilator exists"));
        } else {
            r.value(
                "note",
                "note",
                json!(format!("{} timelike annihilator(s) found", out.solutions.len())),
            );
        }
    }
    r.print(a.format);
    Ok(if cw.borderline { Status::Borderline } else { Status::Ok })
}

pub fn critical_points(a: &RunArgs) -> Result<Status> {
    let ctx = context(a)?;
    let lor = lorentzian(&ctx, a)?;
    let mut r = Report::new("critical-points");
    ctx.describe(&mut r);
    let cw = classify_operator(&lor.op, a.tol, &ClassifyOptions::default())?;
    let rep = count_from_classification(&cw);
    r.value("petrov", "Petrov type", json!(rep.petrov.name()));
    r.value("count", "spacelike critical points", json!(rep.count.to_string()));
    let mut list = Vec::new();
    for w in &rep.witnesses {
        r.line(format!(
            "  P = ({}) value {:.9} a = {:.9} b = {:.9} residual {:.2e}",
            w.plane.0.iter().map(|v| format!("{:.6}", snap(*v))).collect::<Vec<_>>().join(", "),
            snap(w.value),
            snap(w.lagrange.0),
            snap(w.lagrange.1),
            w.residual(&lor.op)
        ));
        list.push(json!({
            "plane": w.plane.0,
            "value": w.value,
            "lagrange": [w.lagrange.0, w.lagrange.1],
            "residual": w.residual(&lor.op),
        }));
    }
    r.field("witnesses", Value::Array(list));
    let mut agree = true;
    if a.oracle {
        let cfg = OracleConfig {
            seed: a.seed,
            ..OracleConfig::default()
        };
        let oracle = critical_points_oracle(&lor.op, a.tol, &cfg)?;
        agree = oracle.count == rep.count;
        r.value("oracle_count", "search oracle count", json!(oracle.count.to_string()));
        r.value("oracle_agrees", "oracle agrees", json!(agree));
    }
    r.value("borderline", "borderline", json!(rep.borderline));
    r.print(a.format);
    if rep.borderline || !agree {
        return Ok(Status::Borderline);
    }
    Ok(Status::Ok)
}

fn report_form(r: &mut Report, bt: &BergerThorpeForm) {
    r.matrix4("rotation", "frame rotation (columns are the new vectors)", &bt.rotation);
    r.value("lambda", "λ", vec_json(&bt.params.lambda));
    r.value("mu", "μ", vec_json(&bt.params.mu));
    r.value("alpha", "spectrum of W+", vec_json(&bt.alpha));
    r.value("beta", "spectrum of W-", vec_json(&bt.beta));
    r.value("pattern_residual", "pattern residual", json!(bt.pattern_residual));
    r.value("reconstruction_error", "reconstruction error", json!(bt.reconstruction_error));
}

pub fn normal_form(a: &RunArgs) -> Result<Status> {
    let ctx = context(a)?;
    let mut r = Report::new("normal-form");
    ctx.describe(&mut r);
    match (ctx.kind, a.t.is_some()) {
        (MetricKind::Riemannian, false) => {
            let bt = normal_form_of(&ctx.operator()?, a.tol.max(1e-8))?;
            report_form(&mut r, &bt);
        }
        _ => {
            let lor = lorentzian(&ctx, a)?;
            let rec = lorentz_weyl_via_riemann_bridge(&lor.op, a.tol.max(1e-8))?;
            r.matrix6("riemannian_reading", "Riemannian reading of the Lorentzian operator", &rec.riemannian);
            r.value("a_block", "A-block residual", json!(rec.a_block));
            report_form(&mut r, &rec.form);
        }
    }
    r.print(a.format);
    Ok(Status::Ok)
}

pub fn verify(a: &VerifyArgs) -> Result<Status> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&a.suite).map_err(|_| Error::Chart(format!("unknown suite `{}`", a.suite)))?]
    };
    let cfg = VerifyConfig {
        seed: a.seed,
        scale: a.scale,
        execution: if a.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let mut all_ok = true;
    let mut reports = Vec::new();
    for s in suites {
        let rep = verify::run(s, &cfg)?;
        all_ok &= rep.passed();
        if a.format == crate::Format::Human {
            let mut text = format!("suite {} (seed {}): {}", s.name(), rep.seed, if rep.passed() { "PASS" } else { "FAIL" });
            for c in &rep.checks {
                text.push_str(&format!("\n  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            emit(&text);
        }
        reports.push(json!({
            "suite": s.name(),
            "seed": rep.seed,
            "passed": rep.passed(),
            "checks": rep.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        }));
    }
    if a.format == crate::Format::Json {
        emit(&serde_json::to_string_pretty(&json!({"command": "verify", "suites": reports})).expect("json"));
    }
    Ok(if all_ok { Status::Ok } else { Status::Failed })
}
