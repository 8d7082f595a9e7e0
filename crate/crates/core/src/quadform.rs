//! Quadratic forms of the Weyl operator on 2-planes, their critical points,
//! and the Berger–Thorpe normal form.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::Rng;

use crate::annihilator::NormalFormParams;
use crate::bivector::{
    commutator_residual, complexify, from_complex, hodge, hodge_matrix, ip_lambda2, plane_sign,
    self_dual_basis, Bivector, CMat3, CVec3, Mat6, MetricKind, PlaneSign,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operator::{lambda2_matrix, reinterpret, riemannian_block, wplus_wminus, WeylOperator6};
use crate::petrov::{canonical_eigenplanes, classify_operator, ClassifyOptions, ComplexWeyl3, PetrovType};
use crate::synthetic::seeded;

const PLANE_TOL: f64 = 1e-9;

fn require_kind(op: &WeylOperator6, kind: MetricKind) -> Result<()> {
    if op.kind != kind {
        return Err(Error::KindMismatch {
            expected: kind,
            found: op.kind,
        });
    }
    Ok(())
}

/// `P ↦ ⟨ŴP, P⟩` on unit decomposable 2-vectors.
pub fn riemannian_form(op: &WeylOperator6, p: &Bivector) -> Result<f64> {
    require_kind(op, MetricKind::Riemannian)?;
    plane_sign(p, MetricKind::Riemannian, PLANE_TOL)?;
    let n = ip_lambda2(p, p, MetricKind::Riemannian);
    if (n - 1.0).abs() > PLANE_TOL {
        return Err(Error::Contract(format!("plane is not unit: ⟨P,P⟩ = {n}")));
    }
    Ok(ip_lambda2(&Bivector::apply(&op.mat, p), p, MetricKind::Riemannian))
}

/// `P ↦ ε(P)⟨ŴP, P⟩` with `P` rescaled to `|⟨P,P⟩| = 1`; lightlike planes
/// are rejected.
pub fn lorentz_form(op: &WeylOperator6, p: &Bivector) -> Result<f64> {
    require_kind(op, MetricKind::Lorentzian)?;
    let sign = plane_sign(p, MetricKind::Lorentzian, PLANE_TOL)?;
    let Some(eps) = sign.epsilon() else {
        return Err(Error::DegeneratePlane);
    };
    let n = ip_lambda2(p, p, MetricKind::Lorentzian).abs();
    let q = p.scale(1.0 / n.sqrt());
    Ok(eps * ip_lambda2(&Bivector::apply(&op.mat, &q), &q, MetricKind::Lorentzian))
}

/// A plane with `ŴP = aP + b⋆P`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub plane: Bivector,
    pub value: f64,
    pub lagrange: (f64, f64),
    pub class: PlaneSign,
}

impl CriticalPoint {
    /// `‖ŴP − aP − b⋆P‖ / ‖Ŵ‖`.
    pub fn residual(&self, op: &WeylOperator6) -> f64 {
        let n = op.mat.norm();
        if n == 0.0 {
            return 0.0;
        }
        let (a, b) = self.lagrange;
        let wp = op.mat * self.plane.to_vec();
        let star = hodge(&self.plane, op.kind).to_vec();
        (wp - self.plane.to_vec() * a - star * b).norm() / n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalCount {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for CriticalCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriticalCount::Finite(n) => write!(f, "{n}"),
            CriticalCount::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalReport {
    pub count: CriticalCount,
    pub petrov: PetrovType,
    /// One spacelike witness per counted eigenline (or per spacelike
    /// representative of a continuum).
    pub witnesses: Vec<CriticalPoint>,
    pub borderline: bool,
}

/// Spacelike critical planes counted as complex eigenlines with a spacelike
/// representative; an eigenspace of dimension two or more containing one
/// gives a continuum.
pub fn count_spacelike_critical_points(op: &WeylOperator6, tol: f64) -> Result<CriticalReport> {
    require_kind(op, MetricKind::Lorentzian)?;
    let cw = classify_operator(op, tol, &ClassifyOptions::default())?;
    Ok(count_from_classification(&cw))
}

pub fn count_from_classification(cw: &ComplexWeyl3) -> CriticalReport {
    if cw.petrov == PetrovType::O {
        // every plane is critical
        return CriticalReport {
            count: CriticalCount::Infinite,
            petrov: cw.petrov,
            witnesses: vec![witness(&from_complex(&CVec3::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0),
            )), Complex64::new(0.0, 0.0))],
            borderline: cw.borderline,
        };
    }
    let planes = canonical_eigenplanes(cw);
    let mut infinite = false;
    let mut witnesses = Vec::new();
    for ep in planes.iter().filter(|p| p.class == PlaneSign::Spacelike) {
        if ep.eigenspace_dim >= 2 {
            infinite = true;
        }
        witnesses.push(witness(&ep.plane, ep.eigenvalue));
    }
    CriticalReport {
        count: if infinite {
            CriticalCount::Infinite
        } else {
            CriticalCount::Finite(witnesses.len())
        },
        petrov: cw.petrov,
        witnesses,
        borderline: cw.borderline,
    }
}

/// A spacelike eigenplane with eigenvalue `a + ib` is critical with value `a`.
fn witness(plane: &Bivector, z: Complex64) -> CriticalPoint {
    CriticalPoint {
        plane: *plane,
        value: z.re,
        lagrange: (z.re, z.im),
        class: PlaneSign::Spacelike,
    }
}

/// Settings of the search oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub starts: usize,
    pub seed: u64,
    /// Euclidean bound on the search domain. Minimisers beyond a tenth of
    /// it are treated as escaping towards a lightlike limit: near a null
    /// eigenline the residual decays polynomially in `|x|` without vanishing.
    pub bound: f64,
    pub accept: f64,
    pub execution: Execution,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            starts: 96,
            seed: 0,
            bound: 1e3,
            accept: 1e-9,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub count: CriticalCount,
    /// Distinct eigenlines found (capped by the starts).
    pub lines: Vec<CVec3>,
    pub converged: usize,
}

/// Spacelike unit `z = x − iy`: `|y|² − |x|² = 1`, `x·y = 0`. The
/// parameters are a free `x` (projected onto `v⊥`) and the direction `v` of
/// `y`, which keeps the chart smooth wherever `v ≠ 0`.
fn spacelike_point(p: &[f64; 6], bound: f64) -> CVec3 {
    let v = Vector3::new(p[3], p[4], p[5]);
    let u = v.try_normalize(1e-300).unwrap_or(Vector3::z());
    let w = Vector3::new(p[0], p[1], p[2]);
    let mut x = w - u * u.dot(&w);
    if x.norm() > bound {
        x *= bound / x.norm();
    }
    let y = u * (1.0 + x.norm_squared()).sqrt();
    CVec3::new(
        Complex64::new(x[0], -y[0]),
        Complex64::new(x[1], -y[1]),
        Complex64::new(x[2], -y[2]),
    )
}

/// Distance of `Cz` from the complex line of `z`, relative to `‖C‖`.
fn eigen_residual(c: &CMat3, cn: f64, z: &CVec3) -> nalgebra::SVector<f64, 6> {
    let cz = c * z;
    let zz = z.norm_squared();
    let a = z.dotc(&cz) / Complex64::new(zz, 0.0);
    let r = (cz - z * a) / Complex64::new(cn * zz.sqrt(), 0.0);
    nalgebra::SVector::<f64, 6>::new(r[0].re, r[1].re, r[2].re, r[0].im, r[1].im, r[2].im)
}

fn polish_oracle(c: &CMat3, cn: f64, start: [f64; 6], bound: f64) -> ([f64; 6], f64) {
    use nalgebra::{SMatrix, SVector};
    let f = |p: &[f64; 6]| eigen_residual(c, cn, &spacelike_point(p, bound));
    let mut p = start;
    let mut r = f(&p);
    let mut cost = r.norm_squared();
    let mut damping = 1e-3;
    for _ in 0..200 {
        if cost < 1e-30 {
            break;
        }
        let mut j = SMatrix::<f64, 6, 6>::zeros();
        for k in 0..6 {
            let h = 1e-7 * (1.0 + p[k].abs());
            let mut q = p;
            q[k] += h;
            let mut m = p;
            m[k] -= h;
            j.set_column(k, &((f(&q) - f(&m)) / (2.0 * h)));
        }
        let h = j.transpose() * j;
        let g = j.transpose() * r;
        let mut improved = false;
        for _ in 0..10 {
            let a = h + SMatrix::<f64, 6, 6>::identity() * damping;
            let Some(step) = a.cholesky().map(|ch| ch.solve(&(-g))) else {
                damping *= 10.0;
                continue;
            };
            let step: SVector<f64, 6> = step;
            let mut trial = p;
            for k in 0..6 {
                trial[k] += step[k];
            }
            let rt = f(&trial);
            let ct = rt.norm_squared();
            if ct < cost {
                p = trial;
                r = rt;
                cost = ct;
                damping = (damping * 0.3).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (p, r.amax())
}

/// Independent count by multistart search for spacelike planes satisfying
/// `ŴP = aP + b⋆P` within a Euclidean ball.
pub fn critical_points_oracle(op: &WeylOperator6, tol: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    require_kind(op, MetricKind::Lorentzian)?;
    let c = complexify(&op.mat, tol)?;
    let cn = crate::petrov::spectral_norm(&c);
    if cn <= 1e-12 {
        return Ok(OracleReport {
            count: CriticalCount::Infinite,
            lines: Vec::new(),
            converged: cfg.starts,
        });
    }
    let mut rng = seeded(cfg.seed);
    let starts: Vec<[f64; 6]> = (0..cfg.starts)
        .map(|_| {
            let s = 10f64.powf(rng.gen_range(-1.0..1.5));
            std::array::from_fn(|k| rng.gen_range(-1.0..1.0) * if k < 3 { s } else { 1.0 })
        })
        .collect();
    let results = cfg
        .execution
        .map(starts, |s| polish_oracle(&c, cn, s, cfg.bound));
    let mut lines: Vec<CVec3> = Vec::new();
    let mut converged = 0;
    for (p, r) in results {
        let z = spacelike_point(&p, cfg.bound);
        let x = CVec3::from_fn(|k, _| Complex64::new(z[k].re, 0.0)).norm();
        // Acceptance uses the residual at ggL(z,z) = 1 rather than at |z| = 1:
        // along a sequence escaping towards a null eigenline the normalised
        // residual decays while this one does not.
        if r * z.norm() > cfg.accept || x > 0.1 * cfg.bound {
            continue;
        }
        converged += 1;
        let zn = z / Complex64::new(z.norm(), 0.0);
        let seen = lines.iter().any(|w| 1.0 - w.dotc(&zn).norm() <= 1e-7);
        if !seen {
            lines.push(zn);
        }
    }
    let count = if lines.len() > 3 {
        CriticalCount::Infinite
    } else {
        CriticalCount::Finite(lines.len())
    };
    Ok(OracleReport { count, lines, converged })
}

/// How the sorted spectra of `W⁺` and `W⁻` are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Both descending.
    #[default]
    Descending,
    /// `W⁺` descending, `W⁻` ascending.
    Opposite,
}

/// A frame in which the operator reads `[[diag λ, diag μ], [diag μ, diag λ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BergerThorpeForm {
    /// Columns are the new frame vectors in the old frame.
    pub rotation: Matrix4<f64>,
    pub params: NormalFormParams,
    /// Spectra of `W⁺` and `W⁻` in the order used.
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    /// Distance of the conjugated operator from the normal-form pattern,
    /// relative to `‖Ŵ‖`.
    pub pattern_residual: f64,
    /// `‖Λ²(Q)·N·Λ²(Q)ᵀ − Ŵ‖ / ‖Ŵ‖` with `N` the normal form.
    pub reconstruction_error: f64,
}

impl BergerThorpeForm {
    /// The operator rebuilt on the original frame.
    pub fn reconstruct(&self) -> Mat6 {
        let lam = lambda2_matrix(&self.rotation);
        lam * self.params.operator().mat * lam.transpose()
    }
}

/// Eigen-decomposition with sorted eigenvalues and a rotation (det +1)
/// of eigenvectors.
fn sorted_rotation(m: &Matrix3<f64>, descending: bool) -> ([f64; 3], Matrix3<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| {
        let o = eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]);
        if descending { o } else { o.reverse() }
    });
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let mut r = Matrix3::from_fn(|row, col| eig.eigenvectors[(row, idx[col])]);
    if r.determinant() < 0.0 {
        r.set_column(2, &(-r.column(2)));
    }
    (vals, r)
}

/// `Q ∈ SO(4)` with `Λ²(Q) = S`, for `S` in the image of `Λ²`.
fn lift_to_so4(s: &Mat6) -> Result<Matrix4<f64>> {
    let omega = |b: usize| Bivector::from_vec(&s.column(b).into_owned()).to_antisymmetric();
    let proj: Matrix4<f64> = (0..3).map(|b| -(omega(b) * omega(b))).sum();
    let eig = SymmetricEigen::new(proj);
    let k = eig.eigenvalues.imax();
    let e1 = eig.eigenvectors.column(k).into_owned();
    let mut q = Matrix4::zeros();
    q.set_column(0, &e1);
    for j in 1..4 {
        q.set_column(j, &(omega(j - 1).transpose() * e1));
    }
    let err = (lambda2_matrix(&q) - s).norm();
    if err > 1e-8 * 6f64.sqrt() {
        return Err(Error::Contract(format!("bivector rotation does not lift (error {err:e})")));
    }
    Ok(q)
}

/// Normal form of a Riemannian operator commuting with `⋆`.
pub fn berger_thorpe_normal_form(op: &WeylOperator6, tol: f64) -> Result<BergerThorpeForm> {
    berger_thorpe_with(op, tol, Pairing::Descending)
}

pub fn berger_thorpe_with(op: &WeylOperator6, tol: f64, pairing: Pairing) -> Result<BergerThorpeForm> {
    require_kind(op, MetricKind::Riemannian)?;
    let residual = commutator_residual(&op.mat, &hodge_matrix(MetricKind::Riemannian));
    if residual > tol {
        return Err(Error::NotCommuting { residual });
    }
    let (wp, wm) = wplus_wminus(op)?;
    let (alpha, rp) = sorted_rotation(&wp, true);
    let (beta, rm) = sorted_rotation(&wm, pairing == Pairing::Descending);
    let lambda = std::array::from_fn(|i| (alpha[i] + beta[i]) / 2.0);
    let mu = std::array::from_fn(|i| (alpha[i] - beta[i]) / 2.0);
    // trace-freeness is exact only up to the input's rounding
    let params = NormalFormParams::new(lambda, mu).or_else(|_| {
        let (sl, sm) = (lambda.iter().sum::<f64>() / 3.0, mu.iter().sum::<f64>() / 3.0);
        let scale = op.mat.norm().max(1e-300);
        if sl.abs() > 1e-8 * scale || sm.abs() > 1e-8 * scale {
            return Err(Error::Contract(format!("operator is not trace-free ({sl:e}, {sm:e})")));
        }
        NormalFormParams::new(lambda.map(|v| v - sl), mu.map(|v| v - sm))
    })?;
    let mut blocks = Mat6::zeros();
    blocks.fixed_view_mut::<3, 3>(0, 0).copy_from(&rp);
    blocks.fixed_view_mut::<3, 3>(3, 3).copy_from(&rm);
    let phi = self_dual_basis();
    let s = phi * blocks * phi.transpose();
    let rotation = lift_to_so4(&s)?;
    let scale = op.mat.norm().max(1e-300);
    let conj = op.conjugated(&rotation)?.mat;
    let target = params.operator().mat;
    let pattern_residual = (conj - target).norm() / scale;
    let form = BergerThorpeForm {
        rotation,
        params,
        alpha,
        beta,
        pattern_residual,
        reconstruction_error: 0.0,
    };
    let reconstruction_error = (form.reconstruct() - op.mat).norm() / scale;
    Ok(BergerThorpeForm {
        reconstruction_error,
        ..form
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeRecovery {
    /// The Riemannian reading `[[A, B], [B, −A]]` of the Lorentzian operator.
    pub riemannian: Mat6,
    /// `‖A‖ / ‖Ŵ‖` of the input.
    pub a_block: f64,
    pub form: BergerThorpeForm,
}

/// Recovers a Lorentzian Weyl operator, given on a frame whose timelike
/// vector annihilates it, from the Riemannian normal form of its reading
/// under the bridge metric. Pairs the spectra oppositely so that the
/// normal form keeps `A = O`.
pub fn lorentz_weyl_via_riemann_bridge(op: &WeylOperator6, tol: f64) -> Result<BridgeRecovery> {
    require_kind(op, MetricKind::Lorentzian)?;
    let riem = reinterpret(op, MetricKind::Riemannian);
    let scale = riem.mat.norm();
    let a_block = if scale == 0.0 {
        0.0
    } else {
        riem.mat.fixed_view::<3, 3>(0, 0).norm() / scale
    };
    if a_block > tol {
        return Err(Error::AnnihilationViolated { residual: a_block });
    }
    let form = berger_thorpe_with(&riem, tol.max(1e-9), Pairing::Opposite)?;
    let lam_max = form.params.lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if lam_max > 1e-8 * scale.max(1e-300) {
        return Err(Error::Contract(format!("normal form has a nonzero A-block ({lam_max:e})")));
    }
    Ok(BridgeRecovery {
        riemannian: riem.mat,
        a_block,
        form,
    })
}

/// `[[O, B], [B, O]]` for a symmetric trace-free `B`.
pub fn annihilated_operator(b: &Matrix3<f64>) -> Mat6 {
    riemannian_block(&Matrix3::zeros(), b)
}
