//! Chart document corpus in `tests/charts`. Each file states the expected
//! outcome (`ok`, `parse` or `domain`) and an evaluation point in its
//! leading comments.

use std::fs;
use std::path::PathBuf;

use petrov_core::bivector::MetricKind;
use petrov_core::chart::parse_metric;
use petrov_core::curvature::{curvature_at, orthonormal_frame};
use petrov_core::operator::build_operator;
use petrov_core::petrov::{classify_operator, ClassifyOptions, PetrovType};
use petrov_core::{ErrorClass, Result};

struct Case {
    name: String,
    text: String,
    expect: String,
    point: [f64; 4],
}

fn corpus() -> Vec<Case> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/charts");
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let header = |key: &str| {
            text.lines()
                .find_map(|l| l.strip_prefix(&format!("# {key}: ")))
                .unwrap_or_else(|| panic!("{} lacks `# {key}:`", path.display()))
                .trim()
                .to_string()
        };
        let p: Vec<f64> = header("point").split(',').map(|s| s.trim().parse().unwrap()).collect();
        out.push(Case {
            name: path.file_name().unwrap().to_string_lossy().into_owned(),
            expect: header("expect"),
            point: [p[0], p[1], p[2], p[3]],
            text,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn evaluate(case: &Case) -> Result<()> {
    let chart = parse_metric(&case.text)?;
    let pc = curvature_at(&chart, &case.point)?;
    let fb = orthonormal_frame(&chart, &case.point)?;
    let op = build_operator(&pc.weyl, &fb, chart.kind())?;
    assert!(op.self_adjoint_residual() <= 1e-10, "{}", case.name);
    Ok(())
}

#[test]
fn corpus_outcomes() {
    let cases = corpus();
    assert!(cases.len() >= 8);
    for case in &cases {
        let got = match evaluate(case) {
            Ok(()) => "ok",
            Err(e) => match e.class() {
                ErrorClass::Parse => "parse",
                ErrorClass::Domain => "domain",
                ErrorClass::Contract => "contract",
                ErrorClass::Borderline => "borderline",
            },
        };
        assert_eq!(got, case.expect, "{}", case.name);
    }
}

#[test]
fn corpus_round_trips() {
    for case in corpus().iter().filter(|c| c.expect != "parse") {
        let chart = parse_metric(&case.text).unwrap();
        let again = parse_metric(&chart.to_document()).unwrap();
        assert_eq!(chart.kind(), again.kind());
        assert_eq!(chart.orientation(), again.orientation());
        if let (Ok(a), Ok(b)) = (chart.metric_at(&case.point), again.metric_at(&case.point)) {
            assert!((a - b).amax() <= 1e-15, "{}", case.name);
        }
    }
}

/// Outside the horizon Schwarzschild is Type D with complex Weyl
/// eigenvalues proportional to (2, −1, −1)·m/r³.
#[test]
fn schwarzschild_is_type_d() {
    let case = corpus().into_iter().find(|c| c.name == "schwarzschild.chart").unwrap();
    let chart = parse_metric(&case.text).unwrap();
    assert_eq!(chart.kind(), MetricKind::Lorentzian);
    for r in [2.5, 3.0, 5.0, 12.0] {
        let p = [0.0, r, 1.1, 0.3];
        let pc = curvature_at(&chart, &p).unwrap();
        assert!(pc.scal.abs() <= 1e-10 && pc.ricci.amax() <= 1e-10, "vacuum at r = {r}");
        let fb = orthonormal_frame(&chart, &p).unwrap();
        let op = build_operator(&pc.weyl, &fb, MetricKind::Lorentzian).unwrap();
        let cw = classify_operator(&op, 1e-9, &ClassifyOptions::default()).unwrap();
        assert_eq!(cw.petrov, PetrovType::D, "r = {r}");
        // a repeated root is only resolved to ~√ε; its cluster centroid is exact
        let mut clusters: Vec<(usize, f64)> = cw.clusters.iter().map(|c| (c.algebraic, c.value.norm())).collect();
        clusters.sort_by_key(|c| c.0);
        let m = 1.0 / (r * r * r);
        assert_eq!(clusters.len(), 2);
        assert!((clusters[0].1 - 2.0 * m).abs() <= 1e-12 * m, "r = {r}: {clusters:?}");
        assert!((clusters[1].1 - m).abs() <= 1e-12 * m, "r = {r}: {clusters:?}");
        assert!(cw.clusters.iter().all(|c| c.value.im.abs() <= 1e-9 * m));
    }
}

#[test]
fn reversed_orientation_flips_the_hodge_blocks() {
    let case = corpus().into_iter().find(|c| c.name == "paper_reversed.chart").unwrap();
    let chart = parse_metric(&case.text).unwrap();
    assert_eq!(chart.orientation(), -1);
    let fb = orthonormal_frame(&chart, &case.point).unwrap();
    assert!(fb.frame.matrix().determinant() < 0.0);
    evaluate(&case).unwrap();
}
