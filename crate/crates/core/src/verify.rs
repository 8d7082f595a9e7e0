//! Deterministic verification suites behind `petrov verify`.

use std::time::Instant;

use nalgebra::{Matrix3, Vector4};
use rand::Rng;

use crate::annihilator::{
    exclusion_certificate, solve_lorentzian, solve_on_sphere, NormalFormParams, SolveOutcome, SolverConfig,
};
use crate::bivector::{commutator_residual, hodge_matrix, Frame, Mat6, MetricKind};
use crate::chart::Builtin;
use crate::curvature::{curvature_at, orthonormal_frame, FrameBundle};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operator::{
    annihilates, bridge_operator, build_operator, reinterpret, riemannian_block, WeylOperator6,
};
use crate::petrov::{classify_operator, normal_form_fixture, ClassifyOptions, FixtureParams, PetrovType};
use crate::quadform::{berger_thorpe_normal_form, count_spacelike_critical_points, lorentz_weyl_via_riemann_bridge, CriticalCount};
use crate::synthetic::{annihilating_weyl, lorentz4, riemannian_weyl, rotation4, seeded, traceless_symmetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    PaperExample,
    Corollary,
    Exclusion,
    Bridge,
    NormalForm,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::PaperExample,
        Suite::Corollary,
        Suite::Exclusion,
        Suite::Bridge,
        Suite::NormalForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::PaperExample => "paper-example",
            Suite::Corollary => "corollary",
            Suite::Exclusion => "exclusion",
            Suite::Bridge => "bridge",
            Suite::NormalForm => "normal-form",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Contract(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Check {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Fraction of the full sample sizes (1.0 runs the full suites).
    pub scale: f64,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            scale: 1.0,
            execution: Execution::default(),
        }
    }
}

impl VerifyConfig {
    fn n(&self, full: usize) -> usize {
        ((full as f64 * self.scale).ceil() as usize).max(1)
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            execution: self.execution,
            ..SolverConfig::default()
        }
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        Suite::PaperExample => example_suite(cfg)?,
        Suite::Corollary => corollary(cfg)?,
        Suite::Exclusion => exclusion(cfg)?,
        Suite::Bridge => bridge(cfg)?,
        Suite::NormalForm => normal_form(cfg)?,
    };
    Ok(SuiteReport {
        suite,
        seed: cfg.seed,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `(3/(2x²))·diag(0,−1,1,0,−1,1)`.
pub fn example_golden(x: f64) -> Mat6 {
    let k = 3.0 / (2.0 * x * x);
    Mat6::from_diagonal(&[0.0, -k, k, 0.0, -k, k].into())
}

/// Largest entrywise error relative to the golden matrix's largest entry.
pub fn example_golden_error(p: &[f64; 4]) -> Result<f64> {
    let chart = Builtin::PaperExample.chart();
    let pc = curvature_at(&chart, p)?;
    let fb = orthonormal_frame(&chart, p)?;
    let op = build_operator(&pc.weyl, &fb, MetricKind::Riemannian)?;
    let golden = example_golden(p[1]);
    Ok((op.mat - golden).amax() / golden.amax())
}

fn sign_pairs() -> [[f64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[s, s, 0.0, 0.0], [s, -s, 0.0, 0.0], [0.0, 0.0, s, s], [0.0, 0.0, s, -s]]
}

fn example_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = seeded(cfg.seed);
    let chart = Builtin::PaperExample.chart();
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = Builtin::PaperExample.sample_point(&mut rng);
        worst = worst.max(example_golden_error(&p)?);
    }
    checks.push(Check::new("golden-matrix", worst <= 1e-9, format!("max relative error {worst:.2e} over 50 points")));

    let p = Builtin::PaperExample.sample_point(&mut rng);
    let pc = curvature_at(&chart, &p)?;
    let fb = orthonormal_frame(&chart, &p)?;
    let wf = pc.weyl.in_frame(&fb.frame);
    let out = solve_on_sphere(&wf, &cfg.solver(), false);
    let found = sign_pairs().iter().all(|c| out.contains(c, 1e-8));
    checks.push(Check::new(
        "four-annihilators",
        found && out.solutions.len() == 4 && !out.continuum,
        format!("{} solutions at x = {:.3}", out.solutions.len(), p[1]),
    ));

    let mut worst_res: f64 = 0.0;
    let mut kinds = Vec::new();
    for c in sign_pairs() {
        let t = fb.frame.vector_from_components(&Vector4::from(c));
        let (_, r) = annihilates(&pc.weyl, &t, &fb, 1e-9);
        worst_res = worst_res.max(r);
        let op = bridge_operator(&pc.weyl, &fb.g, MetricKind::Riemannian, &t, p, chart.orientation())?;
        let cw = classify_operator(&op, 1e-9, &ClassifyOptions::default())?;
        let count = count_spacelike_critical_points(&op, 1e-9)?.count;
        kinds.push((cw.petrov, count, cw.borderline));
    }
    checks.push(Check::new("annihilation-residual", worst_res <= 1e-12, format!("max residual {worst_res:.2e}")));
    let ok = kinds.iter().all(|(t, n, b)| {
        !b && matches!(
            (t, n),
            (PetrovType::I, CriticalCount::Finite(3)) | (PetrovType::D, CriticalCount::Infinite)
        )
    });
    let listing: Vec<String> = kinds.iter().map(|(t, n, _)| format!("{t}/{n}")).collect();
    checks.push(Check::new("bridge-type", ok, format!("types/counts {}", listing.join(", "))));
    Ok(checks)
}

/// `λ₁ = −μ₁−2μ₂`, `λ₂ = 2μ₁+μ₂`.
pub fn corollary_family(mu1: f64, mu2: f64) -> NormalFormParams {
    let l1 = -mu1 - 2.0 * mu2;
    let l2 = 2.0 * mu1 + mu2;
    NormalFormParams::new([l1, l2, -l1 - l2], [mu1, mu2, -mu1 - mu2]).expect("sums vanish")
}

/// `μ₂ = μ₃`, `λ₂ = λ₃ = l`.
pub fn corollary_degenerate(mu2: f64, l: f64) -> NormalFormParams {
    NormalFormParams::new([-2.0 * l, l, l], [-2.0 * mu2, mu2, mu2]).expect("sums vanish")
}

pub fn corollary_vectors() -> [[f64; 4]; 4] {
    [
        [0.5, 0.5, 0.5, 0.5],
        [-0.5, -0.5, 0.5, 0.5],
        [-0.5, 0.5, -0.5, 0.5],
        [-0.5, 0.5, 0.5, -0.5],
    ]
}

fn corollary(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = seeded(cfg.seed);
    let solver = cfg.solver();
    let n = cfg.n(200);
    let mut missing = 0;
    for _ in 0..n {
        let p = corollary_family(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let out = crate::annihilator::solve_riemannian(&p, &solver);
        if !corollary_vectors().iter().all(|c| out.contains(c, 1e-6)) {
            missing += 1;
        }
    }
    let mut nonempty = 0;
    for _ in 0..n {
        let l = rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = corollary_degenerate(rng.gen_range(-1.0..1.0), l);
        if !crate::annihilator::solve_riemannian(&p, &solver).is_empty() {
            nonempty += 1;
        }
    }
    Ok(vec![
        Check::new("sign-flip-family", missing == 0, format!("{}/{n} draws contain all four vectors", n - missing)),
        Check::new("degenerate-empty", nonempty == 0, format!("{}/{n} draws have no solution", n - nonempty)),
    ])
}

/// A random Type II, N or III fixture in a random Lorentz frame.
pub fn random_jordan_fixture<R: Rng>(rng: &mut R, t: PetrovType) -> Result<WeylOperator6> {
    let params = match t {
        PetrovType::II => loop {
            let (l, m) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if f64::hypot(l, m) > 0.05 {
                break FixtureParams::Jordan { lambda: l, mu: m };
            }
        },
        PetrovType::N => FixtureParams::Jordan { lambda: 0.0, mu: 0.0 },
        _ => FixtureParams::None,
    };
    let op = normal_form_fixture(t, params)?;
    let scale = rng.gen_range(0.2..5.0);
    let op = WeylOperator6::from_matrix(op.mat * scale, MetricKind::Lorentzian);
    op.conjugated(&lorentz4(rng, 1.5))
}

pub fn timelike_solutions(op: &WeylOperator6, solver: &SolverConfig) -> Result<SolveOutcome> {
    solve_lorentzian(op, true, solver)
}

fn exclusion(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = seeded(cfg.seed);
    let solver = cfg.solver();
    let n = cfg.n(1000);
    let types = [PetrovType::II, PetrovType::N, PetrovType::III];
    let fixtures: Vec<WeylOperator6> = (0..n)
        .map(|i| random_jordan_fixture(&mut rng, types[i % 3]))
        .collect::<Result<_>>()?;
    let inner = SolverConfig {
        execution: Execution::Sequential,
        ..solver
    };
    let outcomes = cfg
        .execution
        .map(fixtures, |op| solve_lorentzian(&op, true, &inner).map(|o| o.is_empty()));
    let mut empty = 0;
    for o in outcomes {
        if o? {
            empty += 1;
        }
    }
    let mut checks = vec![Check::new(
        "no-timelike-annihilator",
        empty == n,
        format!("{empty}/{n} Type II/N/III fixtures have none"),
    )];
    for (t, p) in [
        (PetrovType::III, FixtureParams::None),
        (PetrovType::N, FixtureParams::Jordan { lambda: 0.0, mu: 0.0 }),
        (PetrovType::II, FixtureParams::Jordan { lambda: 0.25, mu: 0.0 }),
    ] {
        let cert = exclusion_certificate(t, p, 16, &solver)?;
        checks.push(Check::new(
            &format!("certificate-{t}"),
            cert.passed,
            format!(
                "identity error {:.1e}, {} near-solutions, min |<c,c>+1| {:.3}",
                cert.identity_error, cert.near_solutions, cert.min_timelike_gap
            ),
        ));
    }
    Ok(checks)
}

/// Whether `e₁` annihilates and whether the Lorentzian reading commutes
/// with `⋆`, for one Riemannian operator.
pub fn proposition_pair(op: &WeylOperator6, tol: f64) -> (bool, bool) {
    let w = op.tensor();
    let fb = FrameBundle {
        point: [0.0; 4],
        frame: Frame::standard(MetricKind::Riemannian),
        g: nalgebra::Matrix4::identity(),
    };
    let (ann, _) = annihilates(&w, &Vector4::new(1.0, 0.0, 0.0, 0.0), &fb, tol);
    let lor = reinterpret(op, MetricKind::Lorentzian);
    let comm = commutator_residual(&lor.mat, &hodge_matrix(MetricKind::Lorentzian)) <= tol;
    (ann, comm)
}

/// A random Riemannian operator: half annihilate `e₁` (possibly after a
/// rotation fixing `e₁`), half are generic or nearly annihilating.
pub fn proposition_sample<R: Rng>(rng: &mut R) -> WeylOperator6 {
    let base = match rng.gen_range(0..4) {
        0 => annihilating_weyl(rng, 1.0),
        1 => {
            let b = traceless_symmetric(rng, 1.0);
            let a = traceless_symmetric(rng, 1.0) * 1e-4;
            WeylOperator6::from_matrix(riemannian_block(&a, &b), MetricKind::Riemannian)
        }
        _ => riemannian_weyl(rng, 1.0),
    };
    let mut r = nalgebra::Matrix4::identity();
    r.fixed_view_mut::<3, 3>(1, 1).copy_from(&crate::synthetic::rotation3(rng));
    base.conjugated(&r).expect("rotations are invertible")
}

fn bridge(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = seeded(cfg.seed);
    let n = cfg.n(1000);
    let opts = ClassifyOptions::default();
    let mut bad = Vec::new();
    let mut flagged = 0;
    for _ in 0..n {
        let scale = rng.gen_range(0.2..5.0);
        let riem = annihilating_weyl(&mut rng, scale);
        let lor = reinterpret(&riem, MetricKind::Lorentzian).conjugated(&lorentz4(&mut rng, 1.5))?;
        let cw = classify_operator(&lor, 1e-9, &opts)?;
        if cw.borderline {
            flagged += 1;
        } else if !matches!(cw.petrov, PetrovType::I | PetrovType::D) {
            bad.push(cw.petrov);
        }
    }
    let mut checks = vec![Check::new(
        "types-I-or-D",
        bad.is_empty(),
        format!("{} of {n} outside I/D ({flagged} flagged borderline)", bad.len()),
    )];

    let m = cfg.n(10_000);
    let mut disagree = 0;
    for _ in 0..m {
        let op = proposition_sample(&mut rng);
        let (a, c) = proposition_pair(&op, 1e-9);
        if a != c {
            disagree += 1;
        }
    }
    checks.push(Check::new(
        "annihilation-iff-commuting",
        disagree == 0,
        format!("{disagree} disagreements in {m} samples"),
    ));

    let mut worst: f64 = 0.0;
    for _ in 0..cfg.n(200) {
        let riem = annihilating_weyl(&mut rng, 1.0);
        let rec = lorentz_weyl_via_riemann_bridge(&reinterpret(&riem, MetricKind::Lorentzian), 1e-9)?;
        worst = worst.max(rec.form.reconstruction_error);
    }
    checks.push(Check::new("bridge-recovery", worst <= 1e-8, format!("max reconstruction error {worst:.2e}")));
    Ok(checks)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Plants `[[O,B],[B,O]]`, conjugates by a random rotation and recovers
/// it; returns (multiset eigenvalue error, reconstruction error), both
/// relative to `‖B‖`.
pub fn plant_and_recover<R: Rng>(rng: &mut R) -> Result<(f64, f64)> {
    let scale = rng.gen_range(0.2..5.0);
    let b = traceless_symmetric(rng, scale);
    let op = WeylOperator6::from_matrix(riemannian_block(&Matrix3::zeros(), &b), MetricKind::Riemannian)
        .conjugated(&rotation4(rng))?;
    let bt = berger_thorpe_normal_form(&op, 1e-9)?;
    let eig = b.symmetric_eigenvalues();
    let planted = sorted(eig.iter().copied().chain(eig.iter().map(|v| -v)).collect());
    let got = sorted(bt.alpha.iter().chain(bt.beta.iter()).copied().collect());
    let scale = b.norm();
    let err = planted.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    Ok((err, bt.reconstruction_error))
}

fn normal_form(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = seeded(cfg.seed);
    let n = cfg.n(500);
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for _ in 0..n {
        let (a, b) = plant_and_recover(&mut rng)?;
        e1 = e1.max(a);
        e2 = e2.max(b);
    }
    let mut pattern: f64 = 0.0;
    for _ in 0..cfg.n(200) {
        let op = riemannian_weyl(&mut rng, 1.0).conjugated(&rotation4(&mut rng))?;
        pattern = pattern.max(berger_thorpe_normal_form(&op, 1e-9)?.pattern_residual);
    }
    Ok(vec![
        Check::new("planted-spectrum", e1 <= 1e-8, format!("max multiset error {e1:.2e} over {n}")),
        Check::new("planted-reconstruction", e2 <= 1e-8, format!("max reconstruction error {e2:.2e}")),
        Check::new("generic-pattern", pattern <= 1e-8, format!("max pattern residual {pattern:.2e}")),
    ])
}
