//! Acceptance criteria. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::Vector4;
use num_complex::Complex64;
use rand::Rng;

use petrov_core::annihilator::{solve_lorentzian, solve_on_sphere, solve_riemannian, NormalFormParams, SolverConfig};
use petrov_core::bivector::{Mat6, MetricKind};
use petrov_core::chart::{bridge_metric, Builtin, MetricChart};
use petrov_core::curvature::{curvature_at, orthonormal_frame};
use petrov_core::operator::{
    annihilates, build_operator, operator_from_tensor, reinterpret, weyl_from_curvature_operator, WeylOperator6,
};
use petrov_core::petrov::{classify_operator, normal_form_fixture, ClassifyOptions, FixtureParams, PetrovType};
use petrov_core::quadform::{count_spacelike_critical_points, critical_points_oracle, CriticalCount, OracleConfig};
use petrov_core::synthetic::{annihilating_weyl, lorentz4, seeded};
use petrov_core::verify::{
    corollary_degenerate, corollary_family, corollary_vectors, plant_and_recover, proposition_pair,
    proposition_sample, random_jordan_fixture,
};
use petrov_core::Result;

// Pinned tolerances.
const GOLDEN_REL: f64 = 1e-9;
const GOLDEN_SECS: f64 = 1.0;
const SOLVE_RESIDUAL: f64 = 1e-10;
const COROLLARY_SECS: f64 = 30.0;
const BRIDGE_SECS: f64 = 120.0;
const COMMUTE_TOL: f64 = 1e-9;
const NORMAL_FORM_ERR: f64 = 1e-8;
const CURVATURE_OP_TOL: f64 = 1e-9;
const CONFORMAL_REL: f64 = 1e-8;
const DIRECTION_DRIFT: f64 = 1e-6;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

/// Independent closed form of the example's Weyl operator.
fn golden(x: f64) -> Mat6 {
    let k = 3.0 / (2.0 * x * x);
    Mat6::from_diagonal(&[0.0, -k, k, 0.0, -k, k].into())
}

fn c1_golden_matrix() -> Result<Outcome> {
    let chart = Builtin::PaperExample.chart();
    let mut rng = seeded(101);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let x = 0.5 + 3.5 * i as f64 / 49.0;
        let p = [rng.gen_range(-2.0..2.0), x, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let pc = curvature_at(&chart, &p)?;
        let fb = orthonormal_frame(&chart, &p)?;
        let op = build_operator(&pc.weyl, &fb, MetricKind::Riemannian)?;
        let g = golden(x);
        worst = worst.max((op.mat - g).amax() / g.amax());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= GOLDEN_REL && secs < GOLDEN_SECS,
        format!("max relative error {worst:.2e} over 50 points in {secs:.3} s"),
    )
}

fn c2_example_solutions() -> Result<Outcome> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [[s, s, 0.0, 0.0], [s, -s, 0.0, 0.0], [0.0, 0.0, s, s], [0.0, 0.0, s, -s]];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for k in [0.1, 1.0, 1.5, 7.0] {
        let p = NormalFormParams::new([0.0, -k, k], [0.0; 3])?;
        let out = solve_riemannian(&p, &SolverConfig::default());
        ok &= !out.continuum && out.solutions.len() == 4 && expected.iter().all(|c| out.contains(c, 1e-8));
        worst = out.solutions.iter().fold(worst, |m, s| m.max(s.residual));
    }
    outcome(
        ok && worst <= SOLVE_RESIDUAL,
        format!("4 pairs for k in {{0.1, 1, 1.5, 7}}: {ok}, max residual {worst:.2e}"),
    )
}

fn c3_corollary() -> Result<Outcome> {
    let mut rng = seeded(303);
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let mut missing = 0;
    for _ in 0..200 {
        let p = corollary_family(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let out = solve_riemannian(&p, &cfg);
        if !corollary_vectors().iter().all(|c| out.contains(c, 1e-6)) {
            missing += 1;
        }
    }
    let mut nonempty = 0;
    for _ in 0..200 {
        let l = rng.gen_range(0.05..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if !solve_riemannian(&corollary_degenerate(rng.gen_range(-2.0..2.0), l), &cfg).is_empty() {
            nonempty += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        missing == 0 && nonempty == 0 && secs < COROLLARY_SECS,
        format!("{missing}/200 family draws missing a vector, {nonempty}/200 degenerate draws non-empty, {secs:.1} s"),
    )
}

fn c4_bridge() -> Result<Outcome> {
    let mut rng = seeded(404);
    let start = Instant::now();
    let mut outside = 0;
    for _ in 0..1000 {
        let scale = rng.gen_range(0.2..5.0);
        let riem = annihilating_weyl(&mut rng, scale);
        let lor = reinterpret(&riem, MetricKind::Lorentzian).conjugated(&lorentz4(&mut rng, 1.5))?;
        let cw = classify_operator(&lor, 1e-9, &ClassifyOptions::default())?;
        // borderline results count as failures unless they are flagged
        if !matches!(cw.petrov, PetrovType::I | PetrovType::D) && !cw.borderline {
            outside += 1;
        }
    }
    let types = [PetrovType::II, PetrovType::N, PetrovType::III];
    let cfg = SolverConfig::default();
    let mut found = 0;
    for i in 0..1000 {
        let op = random_jordan_fixture(&mut rng, types[i % 3])?;
        if !solve_lorentzian(&op, true, &cfg)?.is_empty() {
            found += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        outside == 0 && found == 0 && secs < BRIDGE_SECS,
        format!("{outside}/1000 A=O tensors outside I/D, {found}/1000 II/N/III fixtures with a timelike T, {secs:.1} s"),
    )
}

fn random_diagonal_fixture<R: Rng>(rng: &mut R, t: PetrovType) -> Result<WeylOperator6> {
    let z = |rng: &mut R| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let zs = match t {
        PetrovType::I => loop {
            let (a, b) = (z(rng), z(rng));
            let c = -a - b;
            if (a - b).norm() > 0.2 && (a - c).norm() > 0.2 && (b - c).norm() > 0.2 {
                break [a, b, c];
            }
        },
        _ => loop {
            let a = z(rng);
            if a.norm() > 0.2 {
                break [a, -a / 2.0, -a / 2.0];
            }
        },
    };
    let op = normal_form_fixture(
        t,
        FixtureParams::Diagonal {
            lambda: zs.map(|z| z.re),
            mu: zs.map(|z| z.im),
        },
    )?;
    op.conjugated(&lorentz4(rng, 1.5))
}

fn c5_critical_counts() -> Result<Outcome> {
    let mut rng = seeded(505);
    let expected = [
        (PetrovType::I, CriticalCount::Finite(3)),
        (PetrovType::D, CriticalCount::Infinite),
        (PetrovType::II, CriticalCount::Finite(1)),
        (PetrovType::N, CriticalCount::Infinite),
        (PetrovType::III, CriticalCount::Finite(0)),
    ];
    let mut structural_bad = 0;
    let mut oracle_bad = 0;
    for (t, want) in expected {
        for i in 0..100 {
            let op = match t {
                PetrovType::I | PetrovType::D => random_diagonal_fixture(&mut rng, t)?,
                _ => random_jordan_fixture(&mut rng, t)?,
            };
            let rep = count_spacelike_critical_points(&op, 1e-9)?;
            if rep.count != want || rep.petrov != t || rep.borderline {
                structural_bad += 1;
            }
            let cfg = OracleConfig {
                seed: i,
                ..OracleConfig::default()
            };
            if critical_points_oracle(&op, 1e-9, &cfg)?.count != want {
                oracle_bad += 1;
            }
        }
    }
    outcome(
        structural_bad == 0 && oracle_bad == 0,
        format!("500 fixtures: {structural_bad} structural and {oracle_bad} oracle disagreements"),
    )
}

fn c6_annihilation_iff_commuting() -> Result<Outcome> {
    let mut rng = seeded(606);
    let mut disagree = 0;
    let mut annihilating = 0;
    for _ in 0..10_000 {
        let op = proposition_sample(&mut rng);
        let (a, c) = proposition_pair(&op, COMMUTE_TOL);
        annihilating += usize::from(a);
        if a != c {
            disagree += 1;
        }
    }
    outcome(
        disagree == 0,
        format!("{disagree} disagreements in 10000 tensors ({annihilating} annihilate e1)"),
    )
}

fn c7_normal_form() -> Result<Outcome> {
    let mut rng = seeded(707);
    let (mut spec, mut recon): (f64, f64) = (0.0, 0.0);
    for _ in 0..500 {
        let (a, b) = plant_and_recover(&mut rng)?;
        spec = spec.max(a);
        recon = recon.max(b);
    }
    outcome(
        spec <= NORMAL_FORM_ERR && recon <= NORMAL_FORM_ERR,
        format!("max multiset error {spec:.2e}, max reconstruction error {recon:.2e}"),
    )
}

/// Bridged example metric: unit `(e1 + e2)/√2` annihilates everywhere.
fn lorentzian_example() -> Result<MetricChart> {
    let chart = Builtin::PaperExample.chart();
    let t = chart.parse_vector("(2*x)^(-1.5)/sqrt(2), 1/sqrt(2), 0, 0")?;
    Ok(bridge_metric(&chart, &t))
}

fn c8_curvature_operator() -> Result<Outcome> {
    let mut rng = seeded(808);
    let mut charts: Vec<(String, MetricChart, Builtin)> = Builtin::all_defaults()
        .into_iter()
        .map(|b| (b.name(), b.chart(), b))
        .collect();
    charts.push(("bridged example".into(), lorentzian_example()?, Builtin::PaperExample));
    let mut worst: f64 = 0.0;
    for (_, chart, sampler) in &charts {
        let kind = chart.kind();
        for _ in 0..100 {
            let p = sampler.sample_point(&mut rng);
            let pc = curvature_at(chart, &p)?;
            let fb = orthonormal_frame(chart, &p)?;
            let weyl = build_operator(&pc.weyl, &fb, kind)?;
            let r6 = operator_from_tensor(&pc.riemann.in_frame(&fb.frame), kind);
            let expect = weyl_from_curvature_operator(&r6, pc.scal, kind);
            let scale = r6.amax().max(1.0);
            worst = worst.max((weyl.mat - expect).amax() / scale);
        }
    }
    outcome(
        worst <= CURVATURE_OP_TOL,
        format!("max error {worst:.2e} over {} charts x 100 points", charts.len()),
    )
}

fn direction(v: Vector4<f64>) -> Vector4<f64> {
    let v = v.normalize();
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

fn c9_conformal() -> Result<Outcome> {
    let mut rng = seeded(909);
    let mut weyl_err: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut count_ok = true;
    for b in [Builtin::PaperExample, Builtin::Product(1.0, -0.5)] {
        let chart = b.chart();
        let f = chart.parse_expr(&chart.coords()[1])?;
        let scaled = chart.conformal_rescale(&f);
        for _ in 0..20 {
            let p = b.sample_point(&mut rng);
            let factor = (2.0 * p[1]).exp();
            let w0 = curvature_at(&chart, &p)?.weyl;
            let w1 = curvature_at(&scaled, &p)?.weyl;
            let target = w0.scaled(factor);
            weyl_err = weyl_err.max(w1.combine(1.0, &target, -1.0, w1.kind).max_abs() / target.max_abs());

            if b != Builtin::PaperExample {
                continue;
            }
            let cfg = SolverConfig::default();
            let fb0 = orthonormal_frame(&chart, &p)?;
            let fb1 = orthonormal_frame(&scaled, &p)?;
            let s0 = solve_on_sphere(&w0.in_frame(&fb0.frame), &cfg, false);
            let s1 = solve_on_sphere(&w1.in_frame(&fb1.frame), &cfg, false);
            count_ok &= s0.solutions.len() == 4 && s1.solutions.len() == 4;
            let dirs = |fb: &petrov_core::curvature::FrameBundle, out: &petrov_core::annihilator::SolveOutcome| {
                out.solutions
                    .iter()
                    .map(|s| direction(fb.frame.vector_from_components(&Vector4::from(s.c))))
                    .collect::<Vec<_>>()
            };
            let d1 = dirs(&fb1, &s1);
            for d in dirs(&fb0, &s0) {
                let best = d1.iter().map(|e| (d - e).norm()).fold(f64::INFINITY, f64::min);
                drift = drift.max(best);
                // the rescaled T is still annihilating for the rescaled tensor
                let (ok, _) = annihilates(&w1, &(d / fb1.g.quadratic_form(&d).sqrt()), &fb1, 1e-9);
                count_ok &= ok;
            }
        }
    }
    outcome(
        weyl_err <= CONFORMAL_REL && drift <= DIRECTION_DRIFT && count_ok,
        format!("max Weyl error {weyl_err:.2e}, max direction drift {drift:.2e}"),
    )
}

trait Quadratic {
    fn quadratic_form(&self, v: &Vector4<f64>) -> f64;
}

impl Quadratic for nalgebra::Matrix4<f64> {
    fn quadratic_form(&self, v: &Vector4<f64>) -> f64 {
        v.dot(&(self * v))
    }
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden Weyl matrix", c1_golden_matrix),
        ("normal-form annihilators", c2_example_solutions),
        ("sign-flip family", c3_corollary),
        ("bridge types and Jordan exclusion", c4_bridge),
        ("critical point counts", c5_critical_counts),
        ("annihilation iff star-commuting", c6_annihilation_iff_commuting),
        ("Berger-Thorpe recovery", c7_normal_form),
        ("Weyl from curvature operator", c8_curvature_operator),
        ("conformal invariance", c9_conformal),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {}: {name}: {detail} [{secs:.2} s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1
        );
        failed += usize::from(!passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
