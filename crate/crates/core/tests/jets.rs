//! Finite-difference oracles for the metric jets and everything computed
//! from them.

#![allow(clippy::needless_range_loop)]

use nalgebra::Matrix4;

use petrov_core::bivector::MetricKind;
use petrov_core::chart::{Builtin, MetricChart};
use petrov_core::curvature::{curvature_at, kulkarni_nomizu, orthonormal_frame, riemann};
use petrov_core::operator::build_operator;
use petrov_core::synthetic::seeded;

const H: f64 = 1e-4;
const REL: f64 = 1e-5;

fn shifted(p: &[f64; 4], k: usize, h: f64) -> [f64; 4] {
    let mut q = *p;
    q[k] += h;
    q
}

type Dg = [[[f64; 4]; 4]; 4];
type Ddg = [[[[f64; 4]; 4]; 4]; 4];

fn fd_jets(chart: &MetricChart, p: &[f64; 4]) -> (Dg, Ddg) {
    let g = |q: &[f64; 4]| chart.metric_at(q).unwrap();
    let mut dg = [[[0.0; 4]; 4]; 4];
    let mut ddg = [[[[0.0; 4]; 4]; 4]; 4];
    for k in 0..4 {
        let d: Matrix4<f64> = (g(&shifted(p, k, H)) - g(&shifted(p, k, -H))) / (2.0 * H);
        for l in 0..4 {
            let dd: Matrix4<f64> = if k == l {
                (g(&shifted(p, k, H)) - g(p) * 2.0 + g(&shifted(p, k, -H))) / (H * H)
            } else {
                let pp = shifted(&shifted(p, k, H), l, H);
                let pm = shifted(&shifted(p, k, H), l, -H);
                let mp = shifted(&shifted(p, k, -H), l, H);
                let mm = shifted(&shifted(p, k, -H), l, -H);
                (g(&pp) - g(&pm) - g(&mp) + g(&mm)) / (4.0 * H * H)
            };
            for i in 0..4 {
                for j in 0..4 {
                    ddg[k][l][i][j] = dd[(i, j)];
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                dg[k][i][j] = d[(i, j)];
            }
        }
    }
    (dg, ddg)
}

fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (scale + b.abs())
}

#[test]
fn jets_match_finite_differences() {
    let mut rng = seeded(11);
    for b in Builtin::all_defaults() {
        let chart = b.chart();
        for _ in 0..100 {
            let p = b.sample_point(&mut rng);
            let jets = chart.metric_jets(&p).unwrap();
            let (dg, ddg) = fd_jets(&chart, &p);
            let scale = 1.0 + jets.g.amax();
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        let e = rel_err(jets.dg[k][i][j], dg[k][i][j], scale);
                        assert!(e <= REL, "{} dg at {p:?}: {e:e}", b.name());
                        for l in 0..4 {
                            // second differences lose about half the digits
                            let e = rel_err(jets.ddg[k][l][i][j], ddg[k][l][i][j], scale);
                            assert!(e <= 1e3 * REL, "{} ddg at {p:?}: {e:e}", b.name());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn riemann_matches_finite_difference_jets() {
    let mut rng = seeded(12);
    for b in Builtin::all_defaults() {
        let chart = b.chart();
        for _ in 0..20 {
            let p = b.sample_point(&mut rng);
            let pc = curvature_at(&chart, &p).unwrap();
            let (dg, ddg) = fd_jets(&chart, &p);
            let fd = riemann(pc.g(), &dg, &ddg).unwrap();
            let scale = 1.0 + pc.riemann.max_abs();
            let diff = pc.riemann.combine(1.0, &fd, -1.0, pc.riemann.kind).max_abs();
            assert!(diff / scale <= 1e-3, "{}: {diff:e}", b.name());
        }
    }
}

#[test]
fn space_forms_have_constant_curvature_and_no_weyl() {
    let mut rng = seeded(13);
    for k in [1.0, -1.0, 0.3] {
        let b = Builtin::SpaceForm(k);
        let chart = b.chart();
        for _ in 0..20 {
            let p = b.sample_point(&mut rng);
            let pc = curvature_at(&chart, &p).unwrap();
            let g = pc.g();
            // Rm = (k/2) g⊙g, up to the product's sign convention
            let model = kulkarni_nomizu(g, g).scaled(k / 2.0);
            let scale = pc.riemann.max_abs();
            let diff = pc.riemann.combine(1.0, &model, -1.0, pc.riemann.kind).max_abs();
            assert!(diff <= 1e-9 * scale, "space-form({k}): {diff:e}");
            assert!((pc.scal - 12.0 * k).abs() <= 1e-9 * (1.0 + 12.0 * k.abs()));
            assert!(pc.weyl.max_abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn product_weyl_matches_closed_form() {
    let mut rng = seeded(14);
    for (c1, c2) in [(1.0, 1.0), (1.0, -0.5), (-2.0, 0.7)] {
        let b = Builtin::Product(c1, c2);
        let chart = b.chart();
        for _ in 0..20 {
            let p = b.sample_point(&mut rng);
            let pc = curvature_at(&chart, &p).unwrap();
            let fb = orthonormal_frame(&chart, &p).unwrap();
            let op = build_operator(&pc.weyl, &fb, MetricKind::Riemannian).unwrap();
            // e1 is along the first factor; find its partner there
            let wf = pc.weyl.in_frame(&fb.frame);
            let partner = (1..4)
                .find(|&a| fb.frame.vector(a).rows(2, 2).norm() <= 1e-12)
                .expect("a second vector tangent to the first factor");
            let other = (1..4).find(|&a| a != partner).unwrap();
            // W(x2, x1, x1, x2) for unit x1, x2 tangent to different factors
            let mixed = wf.get(other, 0, 0, other);
            let expected = -(c1 + c2) / 6.0;
            assert!((mixed - expected).abs() <= 1e-9 * (1.0 + expected.abs()), "{mixed} vs {expected}");
            // trace-freeness then fixes the factor planes
            let factor = wf.get(partner, 0, 0, partner);
            let s = (c1 + c2) / 3.0;
            assert!((factor - s).abs() <= 1e-9 * (1.0 + s.abs()), "{factor} vs {s}");
            // the operator is diagonal: equal entries on the two factor planes,
            // half the opposite on the four mixed ones
            let factor_plane = match partner {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            let d = op.mat[(factor_plane, factor_plane)];
            assert!((d.abs() - s.abs()).abs() <= 1e-9 * (1.0 + s.abs()));
            for a in 0..6 {
                let e = if a % 3 == factor_plane { d } else { -d / 2.0 };
                assert!((op.mat[(a, a)] - e).abs() <= 1e-9 * (1.0 + s.abs()));
            }
            assert!((op.mat - nalgebra::SMatrix::<f64, 6, 6>::from_diagonal(&op.mat.diagonal())).amax() <= 1e-9);
        }
    }
}

#[test]
fn random_points_stay_in_the_domain() {
    let mut rng = seeded(15);
    for b in Builtin::all_defaults() {
        let chart = b.chart();
        for _ in 0..200 {
            let p = b.sample_point(&mut rng);
            let g = chart.metric_at(&p).unwrap();
            assert!(g.iter().all(|v| v.is_finite()));
        }
    }
}
