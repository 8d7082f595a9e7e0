//! The annihilation condition `W(T,·,·,T) = 0`.
//!
//! With `T = Σ c_i e_i` in an orthonormal frame the condition is the system
//! of ten quadrics `F_jk(c) = Σ c_i c_l W_ijkl = 0`, `j ≤ k`, listed in the
//! order 11, 12, 13, 14, 22, 23, 24, 33, 34, 44. Frame components are all
//! lower-index, so no raising is needed in either signature.

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector4};

use crate::bivector::MetricKind;
use crate::curvature::Curvature4;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::operator::{annihilation_residual, riemannian_block, WeylOperator6};
use crate::petrov::{normal_form_fixture, FixtureParams, PetrovType};

pub const EQUATION_PAIRS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// Berger–Thorpe invariants `λ`, `μ` with `Σλ = Σμ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormParams {
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
}

impl NormalFormParams {
    pub fn new(lambda: [f64; 3], mu: [f64; 3]) -> Result<NormalFormParams> {
        let scale = lambda.iter().chain(mu.iter()).fold(1.0f64, |s, v| s.max(v.abs()));
        let (sl, sm) = (lambda.iter().sum::<f64>(), mu.iter().sum::<f64>());
        if sl.abs() > 1e-12 * scale || sm.abs() > 1e-12 * scale {
            return Err(Error::Contract(format!(
                "normal-form parameters need Σλ = Σμ = 0 (got {sl:e}, {sm:e})"
            )));
        }
        Ok(NormalFormParams { lambda, mu })
    }

    /// `[[diag λ, diag μ], [diag μ, diag λ]]`.
    pub fn operator(&self) -> WeylOperator6 {
        let l = Matrix3::from_diagonal(&self.lambda.into());
        let m = Matrix3::from_diagonal(&self.mu.into());
        WeylOperator6::from_matrix(riemannian_block(&l, &m), MetricKind::Riemannian)
    }

    pub fn tensor(&self) -> Curvature4 {
        self.operator().tensor()
    }
}

/// The ten equations in closed form.
pub fn ten_equation_residual(p: &NormalFormParams, c: &[f64; 4]) -> [f64; 10] {
    let [l1, l2, l3] = p.lambda;
    let [m1, m2, m3] = p.mu;
    let [c1, c2, c3, c4] = *c;
    [
        -(c2 * c2 * l1 + c3 * c3 * l2 + c4 * c4 * l3),
        c1 * c2 * l1 + c3 * c4 * (m2 - m3),
        c1 * c3 * l2 + c2 * c4 * (m3 - m1),
        c1 * c4 * l3 + c2 * c3 * (m1 - m2),
        -(c1 * c1 * l1 + c4 * c4 * l2 + c3 * c3 * l3),
        c2 * c3 * l3 + c1 * c4 * (m1 - m2),
        c2 * c4 * l2 + c1 * c3 * (m3 - m1),
        -(c4 * c4 * l1 + c1 * c1 * l2 + c2 * c2 * l3),
        c3 * c4 * l1 + c1 * c2 * (m2 - m3),
        -(c3 * c3 * l1 + c2 * c2 * l2 + c1 * c1 * l3),
    ]
}

/// The ten equations by direct contraction of frame components.
pub fn contract_ten(w: &Curvature4, c: &[f64; 4]) -> [f64; 10] {
    EQUATION_PAIRS.map(|(j, k)| {
        let mut s = 0.0;
        for i in 0..4 {
            for l in 0..4 {
                s += c[i] * c[l] * w.c[i][j][k][l];
            }
        }
        s
    })
}

/// `F_m(c) = cᵀ Q_m c` with symmetric `Q_m`.
#[derive(Debug, Clone)]
pub struct QuadSystem {
    q: [Matrix4<f64>; 10],
    norm: f64,
}

type Jac = SMatrix<f64, 10, 4>;
type Res = SVector<f64, 10>;

impl QuadSystem {
    pub fn from_tensor(w: &Curvature4) -> QuadSystem {
        let q = EQUATION_PAIRS.map(|(j, k)| {
            Matrix4::from_fn(|i, l| 0.5 * (w.c[i][j][k][l] + w.c[l][j][k][i]))
        });
        QuadSystem { q, norm: w.norm() }
    }

    pub fn eval(&self, c: &Vector4<f64>) -> Res {
        Res::from_fn(|m, _| c.dot(&(self.q[m] * c)))
    }

    fn jacobian(&self, c: &Vector4<f64>) -> Jac {
        let mut j = Jac::zeros();
        for m in 0..10 {
            let g = self.q[m] * c * 2.0;
            for i in 0..4 {
                j[(m, i)] = g[i];
            }
        }
        j
    }

    /// `max |F| / (‖W‖ |c|²)`; infinite at `c = 0`, which is never a solution.
    pub fn residual(&self, c: &Vector4<f64>) -> f64 {
        let c2 = c.norm_squared();
        if self.norm == 0.0 {
            return 0.0;
        }
        if c2 == 0.0 {
            return f64::INFINITY;
        }
        self.eval(c).amax() / (self.norm * c2)
    }

    pub fn is_trivial(&self) -> bool {
        self.norm == 0.0
    }
}

/// Causal character of a vector under the frame's Lorentzian metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorClass {
    Timelike,
    Spacelike,
    Null,
}

impl VectorClass {
    pub fn of(c: &[f64; 4]) -> VectorClass {
        let n2: f64 = c.iter().map(|v| v * v).sum();
        let q = -c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
        if q.abs() <= 1e-9 * n2 {
            VectorClass::Null
        } else if q < 0.0 {
            VectorClass::Timelike
        } else {
            VectorClass::Spacelike
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VectorClass::Timelike => "timelike",
            VectorClass::Spacelike => "spacelike",
            VectorClass::Null => "null",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilatorSolution {
    /// Frame coefficients of `T`: unit Euclidean length, or `⟨T,T⟩ = −1`
    /// for timelike searches.
    pub c: [f64; 4],
    pub residual: f64,
    pub class: Option<VectorClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solutions: Vec<AnnihilatorSolution>,
    /// At least `continuum_threshold` distinct converged points were found.
    pub continuum: bool,
    /// Starts whose polish reached the acceptance tolerance.
    pub converged: usize,
    pub starts: usize,
}

impl SolveOutcome {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty() && !self.continuum
    }

    /// Whether some returned solution equals `c` up to sign.
    pub fn contains(&self, c: &[f64; 4], tol: f64) -> bool {
        let v = Vector4::from(*c).normalize();
        self.solutions.iter().any(|s| {
            let w = Vector4::from(s.c).normalize();
            (v - w).norm().min((v + w).norm()) <= tol
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub starts: usize,
    pub max_iterations: usize,
    /// Acceptance threshold on the normalised residual.
    pub accept: f64,
    pub dedup: f64,
    pub continuum_threshold: usize,
    /// Hyperboloid bound for timelike searches.
    pub max_rapidity: f64,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 512,
            max_iterations: 80,
            accept: 1e-10,
            dedup: 1e-4,
            continuum_threshold: 32,
            max_rapidity: 6.0,
            execution: Execution::default(),
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Point `i` of the Halton sequence in bases 2, 3, 5.
pub fn halton3(i: usize) -> [f64; 3] {
    let k = i as u64 + 1;
    [radical_inverse(k, 2), radical_inverse(k, 3), radical_inverse(k, 5)]
}

/// Area-uniform map from the unit cube to S³.
pub fn sphere_point(u: [f64; 3]) -> Vector4<f64> {
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    Vector4::new(
        a * (tau * u[1]).sin(),
        a * (tau * u[1]).cos(),
        b * (tau * u[2]).sin(),
        b * (tau * u[2]).cos(),
    )
}

fn solve4(h: &Matrix4<f64>, g: &Vector4<f64>) -> Option<Vector4<f64>> {
    h.cholesky().map(|ch| ch.solve(g)).or_else(|| h.lu().solve(g))
}

/// Levenberg–Marquardt on S³ with renormalising retraction.
pub fn polish_on_sphere(sys: &QuadSystem, start: &Vector4<f64>, iterations: usize) -> (Vector4<f64>, f64) {
    let mut c = start.normalize();
    let mut f = sys.eval(&c);
    let mut cost = f.norm_squared();
    let mut damping = 1e-3 * sys.norm.max(1e-300).powi(2);
    let floor = 1e-15 * sys.norm.max(1e-300).powi(2);
    for _ in 0..iterations {
        if cost == 0.0 {
            break;
        }
        let p = Matrix4::identity() - c * c.transpose();
        let j = sys.jacobian(&c) * p;
        let h = j.transpose() * j;
        let g = j.transpose() * f;
        let mut improved = false;
        for _ in 0..12 {
            let Some(step) = solve4(&(h + Matrix4::identity() * damping), &(-g)) else {
                damping *= 10.0;
                continue;
            };
            let step = p * step;
            let moved_to = c + step;
            let n = moved_to.norm();
            // an overflowing step would normalise to the zero vector
            if !n.is_finite() || n < 1e-8 {
                damping *= 10.0;
                continue;
            }
            let trial = moved_to / n;
            let ft = sys.eval(&trial);
            let ct = ft.norm_squared();
            if ct < cost {
                let moved = (trial - c).norm();
                c = trial;
                f = ft;
                cost = ct;
                damping = (damping * 0.2).max(floor);
                improved = moved > 1e-15;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let r = sys.residual(&c);
    (c, r)
}

fn hyperboloid(w: &nalgebra::Vector3<f64>) -> Vector4<f64> {
    Vector4::new((1.0 + w.norm_squared()).sqrt(), w[0], w[1], w[2])
}

/// Levenberg–Marquardt over timelike unit vectors `(√(1+|w|²), w)` with
/// `|w| ≤ sinh(max_rapidity)`. The residual is measured at `⟨T,T⟩ = −1`,
/// so points drifting towards a null annihilator are not mistaken for
/// timelike ones.
pub fn polish_on_hyperboloid(
    sys: &QuadSystem,
    start: &nalgebra::Vector3<f64>,
    iterations: usize,
    max_rapidity: f64,
) -> (Vector4<f64>, f64) {
    use nalgebra::{Matrix3 as M3, Vector3};
    let bound = max_rapidity.sinh();
    let clamp = |w: Vector3<f64>| if w.norm() > bound { w * (bound / w.norm()) } else { w };
    let mut w = clamp(*start);
    let mut f = sys.eval(&hyperboloid(&w));
    let mut cost = f.norm_squared();
    let mut damping = 1e-3 * sys.norm.max(1e-300).powi(2);
    let floor = 1e-15 * sys.norm.max(1e-300).powi(2);
    for _ in 0..iterations {
        if cost == 0.0 {
            break;
        }
        let t = hyperboloid(&w);
        let mut dt = SMatrix::<f64, 4, 3>::zeros();
        for i in 0..3 {
            dt[(0, i)] = w[i] / t[0];
            dt[(i + 1, i)] = 1.0;
        }
        let j = sys.jacobian(&t) * dt;
        let h = j.transpose() * j;
        let g = j.transpose() * f;
        let mut improved = false;
        for _ in 0..12 {
            let Some(step) = (h + M3::identity() * damping).cholesky().map(|c| c.solve(&(-g))) else {
                damping *= 10.0;
                continue;
            };
            if !step.iter().all(|v| v.is_finite()) {
                damping *= 10.0;
                continue;
            }
            let trial = clamp(w + step);
            let ft = sys.eval(&hyperboloid(&trial));
            let ct = ft.norm_squared();
            if ct < cost {
                let moved = (trial - w).norm();
                w = trial;
                f = ft;
                cost = ct;
                damping = (damping * 0.2).max(floor);
                improved = moved > 1e-15 * (1.0 + w.norm());
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let r = if sys.norm == 0.0 { 0.0 } else { f.amax() / sys.norm };
    (hyperboloid(&w), r)
}

/// Sign convention for a `±` pair: first clearly nonzero entry positive.
fn canonical_sign(c: Vector4<f64>) -> Vector4<f64> {
    for i in 0..4 {
        if c[i].abs() > 1e-6 {
            return if c[i] < 0.0 { -c } else { c };
        }
    }
    c
}

fn dedup(points: Vec<(Vector4<f64>, f64)>, radius: f64, up_to_sign: bool) -> Vec<(Vector4<f64>, f64)> {
    let mut out: Vec<(Vector4<f64>, f64)> = Vec::new();
    for (c, r) in points {
        let cn = c.normalize();
        let dup = out.iter_mut().find(|(d, _)| {
            let dn = d.normalize();
            let dist = if up_to_sign { (cn - dn).norm().min((cn + dn).norm()) } else { (cn - dn).norm() };
            dist <= radius
        });
        match dup {
            Some(existing) => {
                if r < existing.1 {
                    *existing = (c, r);
                }
            }
            None => out.push((c, r)),
        }
    }
    out
}

fn finish(
    converged: Vec<(Vector4<f64>, f64)>,
    starts: usize,
    cfg: &SolverConfig,
    timelike: bool,
    classify: bool,
) -> SolveOutcome {
    let count = converged.len();
    let mut distinct = dedup(converged, cfg.dedup, !timelike);
    for (c, _) in distinct.iter_mut() {
        if !timelike {
            *c = canonical_sign(*c);
        }
    }
    distinct.sort_by(|a, b| {
        let (x, y) = (a.0, b.0);
        (0..4)
            .map(|i| y[i].total_cmp(&x[i]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let continuum = distinct.len() >= cfg.continuum_threshold;
    let solutions = distinct
        .into_iter()
        .map(|(c, r)| {
            let arr = [c[0], c[1], c[2], c[3]];
            AnnihilatorSolution {
                c: arr,
                residual: r,
                class: classify.then(|| VectorClass::of(&arr)),
            }
        })
        .collect();
    SolveOutcome {
        solutions,
        continuum,
        converged: count,
        starts,
    }
}

/// Multistart search over the unit sphere of frame coefficients.
pub fn solve_on_sphere(w: &Curvature4, cfg: &SolverConfig, classify: bool) -> SolveOutcome {
    let sys = QuadSystem::from_tensor(w);
    if sys.is_trivial() {
        return SolveOutcome {
            solutions: Vec::new(),
            continuum: true,
            converged: cfg.starts,
            starts: cfg.starts,
        };
    }
    let results = cfg.execution.map_range(cfg.starts, |i| {
        polish_on_sphere(&sys, &sphere_point(halton3(i)), cfg.max_iterations)
    });
    let converged = results.into_iter().filter(|(_, r)| *r <= cfg.accept).collect();
    finish(converged, cfg.starts, cfg, false, classify)
}

/// All unit solutions for a Berger–Thorpe normal form.
pub fn solve_riemannian(p: &NormalFormParams, cfg: &SolverConfig) -> SolveOutcome {
    solve_on_sphere(&p.tensor(), cfg, false)
}

/// Annihilators of a Lorentzian operator (frame with `e₁` timelike).
pub fn solve_lorentzian(op: &WeylOperator6, require_timelike: bool, cfg: &SolverConfig) -> Result<SolveOutcome> {
    if op.kind != MetricKind::Lorentzian {
        return Err(Error::KindMismatch {
            expected: MetricKind::Lorentzian,
            found: op.kind,
        });
    }
    let w = op.tensor();
    if !require_timelike {
        return Ok(solve_on_sphere(&w, cfg, true));
    }
    let sys = QuadSystem::from_tensor(&w);
    if sys.is_trivial() {
        return Ok(SolveOutcome {
            solutions: Vec::new(),
            continuum: true,
            converged: cfg.starts,
            starts: cfg.starts,
        });
    }
    let tau = std::f64::consts::TAU;
    let results = cfg.execution.map_range(cfg.starts, |i| {
        let u = halton3(i);
        let rho = cfg.max_rapidity * u[0];
        let z = 2.0 * u[1] - 1.0;
        let s = (1.0 - z * z).sqrt();
        let omega = nalgebra::Vector3::new(s * (tau * u[2]).cos(), s * (tau * u[2]).sin(), z);
        polish_on_hyperboloid(&sys, &(omega * rho.sinh()), cfg.max_iterations, cfg.max_rapidity)
    });
    let converged = results.into_iter().filter(|(_, r)| *r <= cfg.accept).collect();
    Ok(finish(converged, cfg.starts, cfg, true, true))
}

/// Re-checks a solution against the frame tensor through the generic
/// annihilation predicate.
pub fn verify_solution(w: &Curvature4, s: &AnnihilatorSolution) -> f64 {
    annihilation_residual(w, &s.c)
}

/// Machine-checkable companion to the timelike emptiness results for the
/// Jordan families II, N and III.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionCertificate {
    pub petrov: PetrovType,
    /// The equation chain, one step per line.
    pub trace: Vec<String>,
    /// Largest disagreement between the chain's closed forms and direct
    /// contraction over the grid.
    pub identity_error: f64,
    pub grid_points: usize,
    /// Polished residual minimisers on the Euclidean sphere that solve the
    /// system (residual ≤ 1e-8).
    pub near_solutions: usize,
    /// `min |⟨c,c⟩ + 1|` over those minimisers; a timelike unit solution
    /// would make this 0.
    pub min_timelike_gap: f64,
    /// `min ⟨c,c⟩` over those minimisers (non-negative: none is timelike).
    pub min_lorentz_norm: f64,
    pub timelike_solutions: usize,
    pub passed: bool,
}

type Identity = (String, Box<dyn Fn(&[f64; 10], &[f64; 4]) -> f64>);

/// Evaluates the proof chain for a Jordan-family fixture on a dense grid and
/// searches the Euclidean sphere for near-solutions.
pub fn exclusion_certificate(
    t: PetrovType,
    params: FixtureParams,
    grid: usize,
    cfg: &SolverConfig,
) -> Result<ExclusionCertificate> {
    let op = normal_form_fixture(t, params)?;
    let w = op.tensor();
    let s2 = std::f64::consts::SQRT_2;
    let mut trace: Vec<String> = Vec::new();
    // Each identity returns (closed form − direct contraction).
    let mut identities: Vec<Identity> = Vec::new();
    match (t, params) {
        (PetrovType::III, _) => {
            trace.push("W(T,e1,e2,T) = -(c3^2 + c1 c3 - c4^2)/sqrt2".into());
            trace.push("W(T,e2,e3,T) = (c1^2 + c1 c3 + c4^2)/sqrt2".into());
            trace.push("sqrt2 [W(T,e2,e3,T) - W(T,e1,e2,T)] = (c1 + c3)^2 = 0, hence c1 = -c3".into());
            trace.push("c1 = -c3 gives <T,T> = c2^2 + c4^2 >= 0: T is not timelike".into());
            identities.push((
                "e1e2".into(),
                Box::new(move |f, c| -(c[2] * c[2] + c[0] * c[2] - c[3] * c[3]) / s2 - f[1]),
            ));
            identities.push((
                "e2e3".into(),
                Box::new(move |f, c| (c[0] * c[0] + c[0] * c[2] + c[3] * c[3]) / s2 - f[5]),
            ));
            identities.push((
                "chain".into(),
                Box::new(move |f, c| (c[0] + c[2]).powi(2) - s2 * (f[5] - f[1])),
            ));
        }
        (PetrovType::N, _) => {
            trace.push("W(T,e3,e4,T) = -2 lambda c3 c4 = 0 holds identically (lambda = 0)".into());
            trace.push("W(T,e3,e3,T) with lambda = 0 gives -(c1 + c2)^2/2 = 0, hence c1 = -c2".into());
            trace.push("c1 = -c2 gives <T,T> = c3^2 + c4^2 >= 0: T is not timelike".into());
            identities.push((
                "e3e3".into(),
                Box::new(|f, c| -(c[0] + c[1]).powi(2) / 2.0 - f[7]),
            ));
        }
        (PetrovType::II, FixtureParams::Jordan { lambda: 0.0, .. }) => {
            trace.push("W(T,e3,e4,T) = -2 lambda c3 c4 = 0 holds identically (lambda = 0)".into());
            trace.push("W(T,e3,e3,T) with lambda = 0 gives -(c1 + c2)^2/2 = 0, hence c1 = -c2".into());
            trace.push("c1 = -c2 gives <T,T> = c3^2 + c4^2 >= 0: T is not timelike".into());
            identities.push(("e3e3".into(), Box::new(|f, c| -(c[0] + c[1]).powi(2) / 2.0 - f[7])));
        }
        (PetrovType::II, FixtureParams::Jordan { lambda: l, .. }) => {
            trace.push(format!("W(T,e3,e4,T) = -2 lambda c3 c4 = 0 with lambda = {l}: c3 = 0 or c4 = 0"));
            trace.push("timelike T has c1^2 > c2^2, so c1 + c2 != 0 and c1 != 0".into());
            trace.push("branch c3 = 0: W(T,e4,e4,T) = (c1 + c2)((2 lambda + 1) c1 + (1 - 2 lambda) c2)/2 = 0".into());
            trace.push("  so (1 - 2 lambda) c2 = -(2 lambda + 1) c1; W(T,e2,e4,T) = -c4 (c1 + (1 - 2 lambda) c2)/2 = lambda c1 c4 = 0, hence c4 = 0".into());
            trace.push("  then W(T,e2,e2,T) = -2 lambda c1^2 != 0: impasse".into());
            trace.push("branch c4 = 0: W(T,e3,e3,T) = (c1 + c2)((2 lambda - 1) c1 - (2 lambda + 1) c2)/2 = 0".into());
            trace.push("  so (2 lambda + 1) c2 = (2 lambda - 1) c1; W(T,e2,e3,T) = c3 (c1 + (2 lambda + 1) c2)/2 = lambda c1 c3 = 0, hence c3 = 0".into());
            trace.push("  then W(T,e2,e2,T) = -2 lambda c1^2 != 0: impasse".into());
            identities.push(("e3e4".into(), Box::new(move |f, c| -2.0 * l * c[2] * c[3] - f[8])));
            // the branch identities hold on the slices c3 = 0 and c4 = 0
            identities.push((
                "e4e4|c3=0".into(),
                Box::new(move |_, c| {
                    let cc = [c[0], c[1], 0.0, c[3]];
                    let f = contract_ten(&normal_form_fixture(PetrovType::II, params).expect("built").tensor(), &cc);
                    (cc[0] + cc[1]) * ((2.0 * l + 1.0) * cc[0] + (1.0 - 2.0 * l) * cc[1]) / 2.0 - f[9]
                }),
            ));
            identities.push((
                "e2e4|c3=0".into(),
                Box::new(move |_, c| {
                    let cc = [c[0], c[1], 0.0, c[3]];
                    let f = contract_ten(&normal_form_fixture(PetrovType::II, params).expect("built").tensor(), &cc);
                    -cc[3] * (cc[0] + (1.0 - 2.0 * l) * cc[1]) / 2.0 - f[6]
                }),
            ));
            identities.push((
                "e3e3|c4=0".into(),
                Box::new(move |_, c| {
                    let cc = [c[0], c[1], c[2], 0.0];
                    let f = contract_ten(&normal_form_fixture(PetrovType::II, params).expect("built").tensor(), &cc);
                    (cc[0] + cc[1]) * ((2.0 * l - 1.0) * cc[0] - (2.0 * l + 1.0) * cc[1]) / 2.0 - f[7]
                }),
            ));
            identities.push((
                "e2e3|c4=0".into(),
                Box::new(move |_, c| {
                    let cc = [c[0], c[1], c[2], 0.0];
                    let f = contract_ten(&normal_form_fixture(PetrovType::II, params).expect("built").tensor(), &cc);
                    cc[2] * (cc[0] + (2.0 * l + 1.0) * cc[1]) / 2.0 - f[5]
                }),
            ));
            identities.push((
                "e2e2|c3=c4=0".into(),
                Box::new(move |_, c| {
                    let cc = [c[0], c[1], 0.0, 0.0];
                    let f = contract_ten(&normal_form_fixture(PetrovType::II, params).expect("built").tensor(), &cc);
                    -2.0 * l * cc[0] * cc[0] - f[4]
                }),
            ));
        }
        _ => {
            return Err(Error::Contract(format!(
                "exclusion certificates exist for Types II, N and III, not {t}"
            )))
        }
    }

    // dense hyperspherical grid on S³
    let mut identity_error: f64 = 0.0;
    let mut grid_points = 0;
    let mut seeds: Vec<(Vector4<f64>, f64)> = Vec::new();
    let sys = QuadSystem::from_tensor(&w);
    let n = grid.max(4);
    let pi = std::f64::consts::PI;
    for a in 0..n {
        let psi = pi * (a as f64 + 0.5) / n as f64;
        for b in 0..n {
            let theta = pi * (b as f64 + 0.5) / n as f64;
            for k in 0..(2 * n) {
                let phi = pi * (k as f64 + 0.5) / n as f64;
                let c = Vector4::new(
                    psi.cos(),
                    psi.sin() * theta.cos(),
                    psi.sin() * theta.sin() * phi.cos(),
                    psi.sin() * theta.sin() * phi.sin(),
                );
                let arr = [c[0], c[1], c[2], c[3]];
                let f = contract_ten(&w, &arr);
                for (_, id) in &identities {
                    identity_error = identity_error.max(id(&f, &arr).abs());
                }
                grid_points += 1;
                seeds.push((c, sys.residual(&c)));
            }
        }
    }
    // polish the best grid points together with the solver's own starts
    seeds.sort_by(|x, y| x.1.total_cmp(&y.1));
    let polished: Vec<(Vector4<f64>, f64)> = seeds
        .iter()
        .take(64)
        .map(|(c, _)| polish_on_sphere(&sys, c, cfg.max_iterations))
        .chain((0..cfg.starts.min(128)).map(|i| polish_on_sphere(&sys, &sphere_point(halton3(i)), cfg.max_iterations)))
        .filter(|(_, r)| *r <= 1e-8)
        .collect();
    let lorentz = |c: &Vector4<f64>| -c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
    let min_timelike_gap = polished
        .iter()
        .map(|(c, _)| (lorentz(c) + 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let min_lorentz_norm = polished.iter().map(|(c, _)| lorentz(c)).fold(f64::INFINITY, f64::min);
    let timelike = solve_lorentzian(&op, true, cfg)?;
    trace.push(format!(
        "grid: {grid_points} points, chain identities hold to {identity_error:.1e}; {} sphere minimisers solve the system, min <c,c> = {:.3e}",
        polished.len(),
        if polished.is_empty() { f64::NAN } else { min_lorentz_norm }
    ));
    let passed = identity_error <= 1e-12
        && timelike.is_empty()
        && (polished.is_empty() || (min_timelike_gap >= 0.5 && min_lorentz_norm >= -1e-6));
    Ok(ExclusionCertificate {
        petrov: t,
        trace,
        identity_error,
        grid_points,
        near_solutions: polished.len(),
        min_timelike_gap,
        min_lorentz_norm,
        timelike_solutions: timelike.solutions.len(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivector::Mat6;

    fn example_params(k: f64) -> NormalFormParams {
        NormalFormParams::new([0.0, -k, k], [0.0; 3]).unwrap()
    }

    #[test]
    fn closed_form_matches_contraction() {
        let p = NormalFormParams::new([0.3, -1.1, 0.8], [0.25, 0.5, -0.75]).unwrap();
        let w = p.tensor();
        for c in [[1.0, 0.2, -0.3, 0.5], [0.0, 1.0, 2.0, -1.0], [0.7, -0.7, 0.1, 0.0]] {
            let a = ten_equation_residual(&p, &c);
            let b = contract_ten(&w, &c);
            for m in 0..10 {
                assert!((a[m] - b[m]).abs() < 1e-14, "equation {m}: {} vs {}", a[m], b[m]);
            }
        }
    }

    #[test]
    fn example_solutions() {
        let k = 1.5;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = ten_equation_residual(&example_params(k), &[s, s, 0.0, 0.0]);
        assert!(r.iter().all(|v| v.abs() < 1e-15));
        let r = ten_equation_residual(&example_params(k), &[1.0, 0.0, 0.0, 0.0]);
        // W(v,e3,e3,v) = −c1² λ₂
        assert_eq!(r[7], k);
        let out = solve_riemannian(&example_params(k), &SolverConfig::default());
        assert!(!out.continuum);
        assert_eq!(out.solutions.len(), 4, "{:?}", out.solutions);
        for c in [[s, s, 0.0, 0.0], [s, -s, 0.0, 0.0], [0.0, 0.0, s, s], [0.0, 0.0, s, -s]] {
            assert!(out.contains(&c, 1e-8));
        }
    }

    #[test]
    fn timelike_search_finds_e1_for_a_zero_block() {
        // [[O,−B],[B,O]] annihilates e₁
        let lorentz = |b: [f64; 3]| {
            let b = Matrix3::from_diagonal(&b.into());
            let mut m = Mat6::zeros();
            m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-b));
            m.fixed_view_mut::<3, 3>(3, 0).copy_from(&b);
            WeylOperator6::from_matrix(m, MetricKind::Lorentzian)
        };
        let cfg = SolverConfig::default();
        let out = solve_lorentzian(&lorentz([1.0, -3.0, 2.0]), true, &cfg).unwrap();
        assert!(!out.continuum);
        assert_eq!(out.solutions.len(), 1, "{out:?}");
        assert!(out.contains(&[1.0, 0.0, 0.0, 0.0], 1e-6));
        assert_eq!(out.solutions[0].class, Some(VectorClass::Timelike));
        // a repeated eigenvalue makes the boosts in the e₁e₃ plane symmetries
        let out = solve_lorentzian(&lorentz([1.0, -2.0, 1.0]), true, &cfg).unwrap();
        assert!(out.continuum);
    }

    #[test]
    fn jordan_families_have_no_timelike_annihilator() {
        let cfg = SolverConfig::default();
        for (t, p) in [
            (PetrovType::III, FixtureParams::None),
            (PetrovType::N, FixtureParams::Jordan { lambda: 0.0, mu: 0.0 }),
            (PetrovType::II, FixtureParams::Jordan { lambda: 0.25, mu: 0.0 }),
            (PetrovType::II, FixtureParams::Jordan { lambda: -0.4, mu: 0.7 }),
            (PetrovType::II, FixtureParams::Jordan { lambda: 0.0, mu: 0.7 }),
        ] {
            let cert = exclusion_certificate(t, p, 12, &cfg).unwrap();
            assert!(cert.passed, "{t}: {cert:#?}");
        }
    }
}
