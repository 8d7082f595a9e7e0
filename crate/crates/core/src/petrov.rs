//! Petrov classification of the complex 3×3 Weyl map, canonical eigen
//! 2-planes, and the Jordan normal-form fixtures.

use std::fmt;

use nalgebra::linalg::SVD;
use num_complex::Complex64;

use crate::bivector::{
    complexify, from_complex, ggl_complex, Bivector, CMat3, CVec3, Mat6, MetricKind, PlaneSign,
};
use crate::error::{Error, Result};
use crate::operator::WeylOperator6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PetrovType {
    I,
    D,
    II,
    N,
    III,
    O,
}

impl PetrovType {
    pub const ALL: [PetrovType; 6] = [
        PetrovType::I,
        PetrovType::D,
        PetrovType::II,
        PetrovType::N,
        PetrovType::III,
        PetrovType::O,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PetrovType::I => "I",
            PetrovType::D => "D",
            PetrovType::II => "II",
            PetrovType::N => "N",
            PetrovType::III => "III",
            PetrovType::O => "O",
        }
    }

    pub fn from_name(s: &str) -> Option<PetrovType> {
        PetrovType::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for PetrovType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Thresholds for the eigenstructure decisions, all relative to the
/// spectral norm `‖M‖` unless noted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Absolute floor of the clustering radius.
    pub cluster_abs: f64,
    pub cluster_rel: f64,
    /// Singular values below `rank_rel · ‖M‖` count as zero.
    pub rank_rel: f64,
    /// `‖M‖` at or below this (absolute) is Type O.
    pub zero_abs: f64,
    /// Largest eigenvalue spread that may still come from one Jordan block.
    pub merge_rel: f64,
    pub trace_rel: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            cluster_abs: 1e-8,
            cluster_rel: 1e-6,
            rank_rel: 1e-7,
            zero_abs: 1e-12,
            merge_rel: 1e-2,
            trace_rel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub value: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
}

/// The complex Weyl map with its eigenstructure summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWeyl3 {
    pub mat: CMat3,
    pub eigenvalues: [Complex64; 3],
    /// Cluster index of each eigenvalue.
    pub labels: [usize; 3],
    pub clusters: Vec<Cluster>,
    pub petrov: PetrovType,
    pub borderline: bool,
    pub norm: f64,
}

impl ComplexWeyl3 {
    /// `(λ, μ)` pairs, one per eigenvalue `λ + iμ`.
    pub fn invariants(&self) -> Vec<(f64, f64)> {
        self.eigenvalues.iter().map(|z| (z.re, z.im)).collect()
    }

    pub fn eigenvalue_sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn spectral_norm(m: &CMat3) -> f64 {
    SVD::new(*m, false, false).singular_values.max()
}

/// Singular values ascending with the matching right singular vectors.
fn sorted_svd(m: &CMat3) -> Vec<(f64, CVec3)> {
    let svd = SVD::new(*m, false, true);
    let vt = svd.v_t.expect("requested");
    let mut out: Vec<(f64, CVec3)> = (0..3)
        .map(|i| (svd.singular_values[i], vt.row(i).adjoint()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Eigenvalues from the complex Schur form. Going through the
/// characteristic polynomial would resolve a repeated eigenvalue of a
/// diagonalisable map only to ~√ε.
pub fn eigenvalues(m: &CMat3) -> [Complex64; 3] {
    let finite = m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if finite {
        if let Some(ev) = m.schur().eigenvalues() {
            return [ev[0], ev[1], ev[2]];
        }
    }
    cardano(m)
}

/// Roots of the characteristic polynomial, Cardano then Newton-polished.
fn cardano(m: &CMat3) -> [Complex64; 3] {
    let tr = m.trace();
    let tr2 = (m * m).trace();
    let a = -tr;
    let b = (tr * tr - tr2) * 0.5;
    let c = -m.determinant();
    let poly = |z: Complex64| ((z + a) * z + b) * z + c;
    let dpoly = |z: Complex64| (z * 3.0 + a * 2.0) * z + b;

    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3 = {
        let plus = -q / 2.0 + disc;
        let minus = -q / 2.0 - disc;
        if plus.norm() >= minus.norm() {
            plus
        } else {
            minus
        }
    };
    let mut roots = [shift; 3];
    if u3.norm() > 0.0 {
        let u = u3.cbrt();
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut uk = u;
        for r in roots.iter_mut() {
            *r = shift + uk - p / (uk * 3.0);
            uk *= omega;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = poly(*r);
            let df = dpoly(*r);
            if df.norm() == 0.0 {
                break;
            }
            let next = *r - f / df;
            if poly(next).norm() < f.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots
}

fn shifted(m: &CMat3, c: Complex64) -> CMat3 {
    m - CMat3::identity() * c
}

/// Classifies `M` by (independent eigenvectors, distinct eigenvalues).
pub fn classify(m: &CMat3, opts: &ClassifyOptions) -> Result<ComplexWeyl3> {
    let n = spectral_norm(m);
    if !n.is_finite() {
        return Err(Error::Contract("matrix has non-finite entries".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if n <= opts.zero_abs {
        return Ok(ComplexWeyl3 {
            mat: *m,
            eigenvalues: [zero; 3],
            labels: [0; 3],
            clusters: vec![Cluster {
                value: zero,
                algebraic: 3,
                geometric: 3,
            }],
            petrov: PetrovType::O,
            borderline: false,
            norm: n,
        });
    }
    let tr = m.trace().norm();
    if tr > opts.trace_rel * n {
        return Err(Error::Contract(format!(
            "complex Weyl map is not trace-free (|tr| = {tr:e}, ‖M‖ = {n:e})"
        )));
    }

    let ev = eigenvalues(m);
    let eps = opts.cluster_abs.max(opts.cluster_rel * n);
    let rank_tol = opts.rank_rel * n;
    let mut borderline = false;

    // single-linkage clustering at radius eps
    let mut labels = [0usize, 1, 2];
    let mut ambiguous = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = (ev[i] - ev[j]).norm();
            if d > eps / 10.0 && d < eps * 10.0 {
                ambiguous.push((i, j));
            }
            if d <= eps {
                let (from, to) = (labels[j].max(labels[i]), labels[j].min(labels[i]));
                for l in labels.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }

    // A perturbed Jordan block splits its eigenvalue by ~ε^(1/k); merge
    // nearby clusters when their centroid is still numerically an eigenvalue.
    let centroid = |labels: &[usize; 3], set: &[usize]| -> Complex64 {
        let members: Vec<Complex64> = (0..3).filter(|&i| set.contains(&labels[i])).map(|i| ev[i]).collect();
        members.iter().sum::<Complex64>() / members.len() as f64
    };
    let distinct = |labels: &[usize; 3]| -> Vec<usize> {
        let mut d: Vec<usize> = labels.to_vec();
        d.sort();
        d.dedup();
        d
    };
    let spread = |labels: &[usize; 3], set: &[usize]| -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if set.contains(&labels[i]) && set.contains(&labels[j]) {
                    s = s.max((ev[i] - ev[j]).norm());
                }
            }
        }
        s
    };
    let mut try_merge = |labels: &mut [usize; 3], set: &[usize]| -> bool {
        if spread(labels, set) > opts.merge_rel * n {
            return false;
        }
        let c = centroid(labels, set);
        let smin = sorted_svd(&shifted(m, c))[0].0;
        if smin > rank_tol / 10.0 && smin < rank_tol * 10.0 {
            borderline = true;
        }
        if smin <= rank_tol {
            let to = *set.iter().min().expect("nonempty");
            for l in labels.iter_mut() {
                if set.contains(l) {
                    *l = to;
                }
            }
            true
        } else {
            false
        }
    };
    let d = distinct(&labels);
    if d.len() == 3 && !try_merge(&mut labels, &d) {
        let mut pairs: Vec<(f64, usize, usize)> = vec![(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .map(|(i, j)| ((ev[i] - ev[j]).norm(), labels[i], labels[j]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, a, b) in pairs {
            if try_merge(&mut labels, &[a, b]) {
                break;
            }
        }
    } else if d.len() == 2 {
        try_merge(&mut labels, &d);
    }

    // Pairs near the clustering radius are only a doubtful call if they
    // stay apart; merged pairs face the rank checks below.
    if ambiguous.iter().any(|&(i, j)| labels[i] != labels[j]) {
        borderline = true;
    }

    // relabel 0.. in order of first appearance
    let mut order: Vec<usize> = Vec::new();
    for &l in &labels {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    let labels = labels.map(|l| order.iter().position(|&o| o == l).expect("present"));
    let mut clusters = Vec::new();
    for k in 0..order.len() {
        let members: Vec<usize> = (0..3).filter(|&i| labels[i] == k).collect();
        let value = members.iter().map(|&i| ev[i]).sum::<Complex64>() / members.len() as f64;
        let svals = sorted_svd(&shifted(m, value));
        let raw = svals.iter().filter(|s| s.0 <= rank_tol).count();
        if svals.iter().any(|s| s.0 > rank_tol / 10.0 && s.0 < rank_tol * 10.0) {
            borderline = true;
        }
        let algebraic = members.len();
        if raw == 0 || raw > algebraic {
            borderline = true;
        }
        clusters.push(Cluster {
            value,
            algebraic,
            geometric: raw.clamp(1, algebraic),
        });
    }
    let geo: usize = clusters.iter().map(|c| c.geometric).sum();
    let petrov = match (geo, clusters.len()) {
        (3, 3) => PetrovType::I,
        (3, 2) => PetrovType::D,
        (2, 2) => PetrovType::II,
        (2, 1) => PetrovType::N,
        (1, 1) => PetrovType::III,
        (3, 1) => {
            borderline = true;
            PetrovType::O
        }
        _ => {
            borderline = true;
            PetrovType::I
        }
    };
    Ok(ComplexWeyl3 {
        mat: *m,
        eigenvalues: ev,
        labels,
        clusters,
        petrov,
        borderline,
        norm: n,
    })
}

/// Classifies a Lorentzian operator through its complex form.
pub fn classify_operator(op: &WeylOperator6, tol: f64, opts: &ClassifyOptions) -> Result<ComplexWeyl3> {
    if op.kind != MetricKind::Lorentzian {
        return Err(Error::KindMismatch {
            expected: MetricKind::Lorentzian,
            found: op.kind,
        });
    }
    classify(&complexify(&op.mat, tol)?, opts)
}

/// A canonical eigenvector of the complex Weyl map as a real 2-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPlane {
    pub cluster: usize,
    pub eigenvalue: Complex64,
    pub eigenspace_dim: usize,
    pub complex: CVec3,
    pub plane: Bivector,
    pub class: PlaneSign,
}

fn fix_phase(v: CVec3, allow_any_phase: bool) -> CVec3 {
    let (k, _) = v
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 + 1e-12 { (i, z.norm()) } else { acc });
    let z = v[k];
    if allow_any_phase {
        v * (z.conj() / z.norm())
    } else if z.re < 0.0 || (z.re.abs() <= 1e-12 * z.norm() && z.im < 0.0) {
        -v
    } else {
        v
    }
}

/// Eigenvectors of each cluster, `ggL`-orthogonalised within the
/// eigenspace; non-null ones scaled to `ggL(ξ,ξ) = +1` (spacelike planes),
/// null ones normalised to unit Euclidean length (lightlike planes).
pub fn canonical_eigenplanes(cw: &ComplexWeyl3) -> Vec<EigenPlane> {
    let mut out = Vec::new();
    for (ci, cluster) in cw.clusters.iter().enumerate() {
        let basis: Vec<CVec3> = sorted_svd(&shifted(&cw.mat, cluster.value))
            .into_iter()
            .take(cluster.geometric)
            .map(|(_, v)| v)
            .collect();
        let mut remaining = basis;
        while !remaining.is_empty() {
            let (k, q) = remaining
                .iter()
                .enumerate()
                .map(|(i, v)| (i, ggl_complex(v, v).norm() / v.norm_squared()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if q > 1e-6 {
                let v = remaining.remove(k);
                let alpha = Complex64::new(1.0, 0.0) / ggl_complex(&v, &v).sqrt();
                let xi = fix_phase(v * alpha, false);
                for w in remaining.iter_mut() {
                    let proj = ggl_complex(w, &xi);
                    *w -= xi * proj;
                }
                out.push(EigenPlane {
                    cluster: ci,
                    eigenvalue: cluster.value,
                    eigenspace_dim: cluster.geometric,
                    complex: xi,
                    plane: from_complex(&xi),
                    class: PlaneSign::Spacelike,
                });
            } else {
                for v in remaining.drain(..) {
                    let n = v.norm();
                    if n <= 1e-12 {
                        continue;
                    }
                    let xi = fix_phase(v / Complex64::new(n, 0.0), true);
                    out.push(EigenPlane {
                        cluster: ci,
                        eigenvalue: cluster.value,
                        eigenspace_dim: cluster.geometric,
                        complex: xi,
                        plane: from_complex(&xi),
                        class: PlaneSign::Degenerate,
                    });
                }
            }
        }
    }
    out
}

/// Which Jordan normal form to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixtureParams {
    /// Types I and D: `λ_k + iμ_k` on the diagonal.
    Diagonal { lambda: [f64; 3], mu: [f64; 3] },
    /// Types II and N.
    Jordan { lambda: f64, mu: f64 },
    /// Types III and O.
    None,
}

/// The Lorentzian normal-form matrices of the three Jordan families.
pub fn normal_form_fixture(t: PetrovType, params: FixtureParams) -> Result<WeylOperator6> {
    let mut m = Mat6::zeros();
    match (t, params) {
        (PetrovType::I | PetrovType::D, FixtureParams::Diagonal { lambda, mu }) => {
            let scale = lambda.iter().chain(mu.iter()).fold(1.0f64, |s, v| s.max(v.abs()));
            let (sl, sm) = (lambda.iter().sum::<f64>(), mu.iter().sum::<f64>());
            if sl.abs() > 1e-12 * scale || sm.abs() > 1e-12 * scale {
                return Err(Error::Contract(format!(
                    "normal form needs Σλ = Σμ = 0 (got {sl:e}, {sm:e})"
                )));
            }
            let z = |k: usize| Complex64::new(lambda[k], mu[k]);
            let close = |i: usize, j: usize| (z(i) - z(j)).norm() <= 1e-9 * scale;
            match t {
                PetrovType::D if !(close(1, 2) && !close(0, 1)) => {
                    return Err(Error::Contract(
                        "Type D needs λ₂ + iμ₂ = λ₃ + iμ₃ ≠ λ₁ + iμ₁".into(),
                    ))
                }
                PetrovType::I if close(0, 1) || close(0, 2) || close(1, 2) => {
                    return Err(Error::Contract("Type I needs three distinct λ_k + iμ_k".into()))
                }
                _ => {}
            }
            for k in 0..3 {
                m[(k, k)] = lambda[k];
                m[(k + 3, k + 3)] = lambda[k];
                m[(k, k + 3)] = mu[k];
                m[(k + 3, k)] = -mu[k];
            }
        }
        (PetrovType::II | PetrovType::N, FixtureParams::Jordan { lambda: l, mu }) => {
            let zero = l == 0.0 && mu == 0.0;
            if t == PetrovType::N && !zero {
                return Err(Error::Contract("Type N needs λ = μ = 0".into()));
            }
            if t == PetrovType::II && zero {
                return Err(Error::Contract("Type II needs (λ, μ) ≠ (0, 0)".into()));
            }
            let rows: [[f64; 6]; 6] = [
                [-2.0 * l, 0.0, 0.0, -2.0 * mu, 0.0, 0.0],
                [0.0, l - 0.5, 0.0, 0.0, mu, -0.5],
                [0.0, 0.0, l + 0.5, 0.0, -0.5, mu],
                [2.0 * mu, 0.0, 0.0, -2.0 * l, 0.0, 0.0],
                [0.0, -mu, 0.5, 0.0, l - 0.5, 0.0],
                [0.0, 0.5, -mu, 0.0, 0.0, l + 0.5],
            ];
            for r in 0..6 {
                for c in 0..6 {
                    m[(r, c)] = rows[r][c];
                }
            }
        }
        (PetrovType::III, FixtureParams::None) => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let rows: [[f64; 6]; 6] = [
                [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            ];
            for r in 0..6 {
                for c in 0..6 {
                    m[(r, c)] = s * rows[r][c];
                }
            }
        }
        (PetrovType::O, FixtureParams::None) => {}
        (t, p) => {
            return Err(Error::Contract(format!(
                "parameters {p:?} do not fit a Type {t} normal form"
            )))
        }
    }
    Ok(WeylOperator6::from_matrix(m, MetricKind::Lorentzian))
}
