//! Linear algebra of the 6-dimensional space of 2-vectors of a 4-dimensional
//! inner-product space.
//!
//! Every 6-vector and 6×6 matrix in this crate is written on the ordered basis
//!
//! ```text
//! E1 = e1∧e2, E2 = e1∧e3, E3 = e1∧e4, E4 = e3∧e4, E5 = e4∧e2, E6 = e2∧e3
//! ```
//!
//! of an oriented orthonormal frame `{e1, e2, e3, e4}` (indices 0..=3 in code).
//! In the Lorentzian case `e1` is the timelike vector. A 6×6 matrix `M` acts on
//! column vectors, so column `b` holds the image of `E_b`.
//!
//! Complex coordinates. When a real operator commutes with the Lorentzian
//! star, `Λ²` becomes a complex 3-space with `i·ξ := ⋆ξ`. We write
//! `ξ = Σ a_k E_k + Σ b_k ⋆E_k` (k = 1..3) and use `z_k = a_k + i b_k`. Because
//! `⋆E_k = −E_{k+3}`, a bivector with real coordinates `(x, y)` (first and
//! second triple) has `z = x − i y`, and a commuting operator `[[P, Q], [−Q, P]]`
//! becomes the complex matrix `P + iQ`.

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Vec6 = SVector<f64, 6>;
pub type CMat3 = Matrix3<Complex64>;
pub type CVec3 = Vector3<Complex64>;

/// Default relative tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Index pairs `(i, j)` of the ordered basis, `E_a = e_i ∧ e_j`.
pub const BASIS_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Signature of the metric a frame is orthonormal for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Riemannian,
    Lorentzian,
}

impl MetricKind {
    /// Diagonal of the frame metric, `g(e_a, e_a)`.
    pub fn vector_signature(self) -> [f64; 4] {
        match self {
            MetricKind::Riemannian => [1.0, 1.0, 1.0, 1.0],
            MetricKind::Lorentzian => [-1.0, 1.0, 1.0, 1.0],
        }
    }

    /// Diagonal of the induced product on the ordered basis.
    pub fn signature(self) -> [f64; 6] {
        match self {
            MetricKind::Riemannian => [1.0; 6],
            MetricKind::Lorentzian => [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
        }
    }

    pub fn flipped(self) -> MetricKind {
        match self {
            MetricKind::Riemannian => MetricKind::Lorentzian,
            MetricKind::Lorentzian => MetricKind::Riemannian,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Riemannian => "riemannian",
            MetricKind::Lorentzian => "lorentzian",
        }
    }
}

/// An oriented orthonormal frame, vectors given by their chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: [Vector4<f64>; 4],
    kind: MetricKind,
}

impl Frame {
    /// Validates orthonormality against `g` and orientation against the
    /// chart orientation sign.
    pub fn new(
        vectors: [Vector4<f64>; 4],
        kind: MetricKind,
        g: &Matrix4<f64>,
        orientation: i8,
        tol: f64,
    ) -> Result<Frame> {
        let frame = Frame { vectors, kind };
        let gram = frame.gram(g);
        let sig = kind.vector_signature();
        for a in 0..4 {
            for b in 0..4 {
                let target = if a == b { sig[a] } else { 0.0 };
                if (gram[(a, b)] - target).abs() > tol {
                    return Err(Error::Contract(format!(
                        "frame is not orthonormal: gram[{a}][{b}] = {}",
                        gram[(a, b)]
                    )));
                }
            }
        }
        let det = frame.matrix().determinant();
        if det * f64::from(orientation) <= 0.0 {
            return Err(Error::Contract("frame is not oriented".into()));
        }
        Ok(frame)
    }

    /// A frame that is taken as given (used for synthetic inputs whose chart
    /// metric is the frame metric itself).
    pub fn standard(kind: MetricKind) -> Frame {
        Frame {
            vectors: [
                Vector4::new(1.0, 0.0, 0.0, 0.0),
                Vector4::new(0.0, 1.0, 0.0, 0.0),
                Vector4::new(0.0, 0.0, 1.0, 0.0),
                Vector4::new(0.0, 0.0, 0.0, 1.0),
            ],
            kind,
        }
    }

    pub(crate) fn from_parts_unchecked(vectors: [Vector4<f64>; 4], kind: MetricKind) -> Frame {
        Frame { vectors, kind }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn timelike_index(&self) -> Option<usize> {
        match self.kind {
            MetricKind::Riemannian => None,
            MetricKind::Lorentzian => Some(0),
        }
    }

    pub fn vectors(&self) -> &[Vector4<f64>; 4] {
        &self.vectors
    }

    pub fn vector(&self, a: usize) -> &Vector4<f64> {
        &self.vectors[a]
    }

    /// Matrix whose columns are the frame vectors.
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&self.vectors)
    }

    pub fn gram(&self, g: &Matrix4<f64>) -> Matrix4<f64> {
        let f = self.matrix();
        f.transpose() * g * f
    }

    /// Frame components `c` of a chart vector `v = Σ c_a e_a`.
    pub fn components_of(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.matrix()
            .try_inverse()
            .map(|inv| inv * v)
            .unwrap_or_else(Vector4::zeros)
    }

    /// Chart vector with the given frame components.
    pub fn vector_from_components(&self, c: &Vector4<f64>) -> Vector4<f64> {
        self.matrix() * c
    }

    /// New frame `e'_a = Σ_b L[b][a] e_b`.
    pub fn transformed(&self, l: &Matrix4<f64>, kind: MetricKind) -> Frame {
        let m = self.matrix() * l;
        Frame {
            vectors: [
                m.column(0).into_owned(),
                m.column(1).into_owned(),
                m.column(2).into_owned(),
                m.column(3).into_owned(),
            ],
            kind,
        }
    }
}

/// A 2-vector on the ordered basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector(pub [f64; 6]);

impl Bivector {
    pub const ZERO: Bivector = Bivector([0.0; 6]);

    pub fn basis(a: usize) -> Bivector {
        let mut c = [0.0; 6];
        c[a] = 1.0;
        Bivector(c)
    }

    pub fn from_vec(v: &Vec6) -> Bivector {
        let mut c = [0.0; 6];
        c.copy_from_slice(v.as_slice());
        Bivector(c)
    }

    pub fn to_vec(&self) -> Vec6 {
        Vec6::from_column_slice(&self.0)
    }

    /// `u ∧ v` for vectors given by frame components.
    pub fn wedge(u: &Vector4<f64>, v: &Vector4<f64>) -> Bivector {
        let mut c = [0.0; 6];
        for (a, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
            c[a] = u[i] * v[j] - u[j] * v[i];
        }
        Bivector(c)
    }

    /// The antisymmetric 4×4 matrix `Ω_ij` with `ξ = Σ_{i<j} Ω_ij e_i∧e_j`.
    pub fn to_antisymmetric(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (a, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
            m[(i, j)] = self.0[a];
            m[(j, i)] = -self.0[a];
        }
        m
    }

    /// Plücker quadric `ξ1ξ4 + ξ2ξ5 + ξ3ξ6`; zero iff decomposable.
    pub fn plucker(&self) -> f64 {
        let c = &self.0;
        c[0] * c[3] + c[1] * c[4] + c[2] * c[5]
    }

    pub fn is_decomposable(&self, tol: f64) -> bool {
        self.plucker().abs() <= tol * self.norm_sq().max(f64::MIN_POSITIVE)
    }

    /// Euclidean coefficient norm squared.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Bivector {
        Bivector(self.0.map(|x| x * s))
    }

    pub fn add(&self, other: &Bivector) -> Bivector {
        let mut c = self.0;
        for (ci, oi) in c.iter_mut().zip(other.0.iter()) {
            *ci += oi;
        }
        Bivector(c)
    }

    pub fn sub(&self, other: &Bivector) -> Bivector {
        self.add(&other.scale(-1.0))
    }

    pub fn apply(m: &Mat6, xi: &Bivector) -> Bivector {
        Bivector::from_vec(&(m * xi.to_vec()))
    }
}

/// The induced product on `Λ²` of a given kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lambda2Metric {
    pub kind: MetricKind,
}

impl Lambda2Metric {
    pub const RIEMANNIAN: Lambda2Metric = Lambda2Metric {
        kind: MetricKind::Riemannian,
    };
    pub const LORENTZIAN: Lambda2Metric = Lambda2Metric {
        kind: MetricKind::Lorentzian,
    };

    pub fn new(kind: MetricKind) -> Lambda2Metric {
        Lambda2Metric { kind }
    }

    pub fn signature(&self) -> [f64; 6] {
        self.kind.signature()
    }

    pub fn gram_matrix(&self) -> Mat6 {
        Mat6::from_diagonal(&Vec6::from_column_slice(&self.signature()))
    }

    pub fn ip(&self, xi: &Bivector, eta: &Bivector) -> f64 {
        ip_lambda2(xi, eta, self.kind)
    }

    pub fn hodge(&self, xi: &Bivector) -> Bivector {
        hodge(xi, self.kind)
    }

    pub fn star_matrix(&self) -> Mat6 {
        hodge_matrix(self.kind)
    }
}

/// `⟨ξ, η⟩ = Σ σ_k ξ_k η_k` for the induced product of the given kind.
pub fn ip_lambda2(xi: &Bivector, eta: &Bivector, kind: MetricKind) -> f64 {
    kind.signature()
        .iter()
        .zip(xi.0.iter().zip(eta.0.iter()))
        .map(|(s, (a, b))| s * a * b)
        .sum()
}

/// The Hodge star as a 6×6 matrix: `[[O, I], [I, O]]` (Riemannian) or
/// `[[O, I], [−I, O]]` (Lorentzian).
pub fn hodge_matrix(kind: MetricKind) -> Mat6 {
    let lower = match kind {
        MetricKind::Riemannian => 1.0,
        MetricKind::Lorentzian => -1.0,
    };
    let mut m = Mat6::zeros();
    for k in 0..3 {
        m[(k, k + 3)] = 1.0;
        m[(k + 3, k)] = lower;
    }
    m
}

pub fn hodge(xi: &Bivector, kind: MetricKind) -> Bivector {
    Bivector::apply(&hodge_matrix(kind), xi)
}

/// Self-dual and anti-self-dual parts `(id ± ⋆)ξ / 2` for the Riemannian star.
pub fn sd_split(xi: &Bivector) -> (Bivector, Bivector) {
    let star = hodge(xi, MetricKind::Riemannian);
    (xi.add(&star).scale(0.5), xi.sub(&star).scale(0.5))
}

/// Orthonormal basis of `Λ+` (columns 0..3) followed by `Λ−` (columns 3..6).
pub fn self_dual_basis() -> Mat6 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Mat6::zeros();
    for k in 0..3 {
        m[(k, k)] = s;
        m[(k + 3, k)] = s;
        m[(k, k + 3)] = s;
        m[(k + 3, k + 3)] = -s;
    }
    m
}

/// Complex coordinates `z = x − i y` of a bivector with real triples `(x, y)`.
pub fn to_complex(xi: &Bivector) -> CVec3 {
    let c = &xi.0;
    CVec3::new(
        Complex64::new(c[0], -c[3]),
        Complex64::new(c[1], -c[4]),
        Complex64::new(c[2], -c[5]),
    )
}

pub fn from_complex(z: &CVec3) -> Bivector {
    Bivector([z[0].re, z[1].re, z[2].re, -z[0].im, -z[1].im, -z[2].im])
}

/// Complex bilinear form `⟨ξ,η⟩L − i⟨ξ,⋆Lη⟩L`.
pub fn ggl(xi: &Bivector, eta: &Bivector) -> Complex64 {
    let star_eta = hodge(eta, MetricKind::Lorentzian);
    Complex64::new(
        ip_lambda2(xi, eta, MetricKind::Lorentzian),
        -ip_lambda2(xi, &star_eta, MetricKind::Lorentzian),
    )
}

/// `ggL` in complex coordinates: `−Σ z_k w_k`.
pub fn ggl_complex(z: &CVec3, w: &CVec3) -> Complex64 {
    -(z[0] * w[0] + z[1] * w[1] + z[2] * w[2])
}

/// Relative commutator residual `‖MS − SM‖ / ‖M‖` (zero for `M = 0`).
pub fn commutator_residual(m: &Mat6, star: &Mat6) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m * star - star * m).norm() / norm
}

/// Complex 3×3 matrix of a real operator commuting with `⋆L`.
pub fn complexify(m: &Mat6, tol: f64) -> Result<CMat3> {
    let residual = commutator_residual(m, &hodge_matrix(MetricKind::Lorentzian));
    if residual > tol {
        return Err(Error::NotCommuting { residual });
    }
    Ok(CMat3::from_fn(|r, c| {
        Complex64::new(m[(r, c)], m[(r, c + 3)])
    }))
}

/// Inverse of [`complexify`]: `P + iQ ↦ [[P, Q], [−Q, P]]`.
pub fn realify(c: &CMat3) -> Mat6 {
    let mut m = Mat6::zeros();
    for r in 0..3 {
        for k in 0..3 {
            let z = c[(r, k)];
            m[(r, k)] = z.re;
            m[(r + 3, k + 3)] = z.re;
            m[(r, k + 3)] = z.im;
            m[(r + 3, k)] = -z.im;
        }
    }
    m
}

/// Causal character of a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneSign {
    /// Positive-definite restriction, sign +1.
    Spacelike,
    /// Lorentzian restriction, sign −1.
    Timelike,
    /// Degenerate (lightlike) restriction.
    Degenerate,
}

impl PlaneSign {
    pub fn epsilon(self) -> Option<f64> {
        match self {
            PlaneSign::Spacelike => Some(1.0),
            PlaneSign::Timelike => Some(-1.0),
            PlaneSign::Degenerate => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlaneSign::Spacelike => "spacelike",
            PlaneSign::Timelike => "timelike",
            PlaneSign::Degenerate => "lightlike",
        }
    }
}

/// Sign of a decomposable bivector under the induced product. Both
/// `⟨P,P⟩` and `⟨P,⋆P⟩` are consulted in the Lorentzian case.
pub fn plane_sign(p: &Bivector, kind: MetricKind, tol: f64) -> Result<PlaneSign> {
    let n2 = p.norm_sq();
    if n2 == 0.0 {
        return Err(Error::Contract("zero bivector is not a plane".into()));
    }
    if !p.is_decomposable(tol) {
        return Err(Error::NotDecomposable {
            residual: p.plucker().abs() / n2,
        });
    }
    let pp = ip_lambda2(p, p, kind) / n2;
    match kind {
        MetricKind::Riemannian => Ok(PlaneSign::Spacelike),
        MetricKind::Lorentzian => {
            let star = hodge(p, kind);
            let ps = ip_lambda2(p, &star, kind) / n2;
            if pp.abs() <= tol && ps.abs() <= tol {
                Ok(PlaneSign::Degenerate)
            } else if pp > 0.0 {
                Ok(PlaneSign::Spacelike)
            } else {
                Ok(PlaneSign::Timelike)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(a: usize) -> Bivector {
        Bivector::basis(a)
    }

    fn bv() -> impl Strategy<Value = Bivector> {
        proptest::array::uniform6(-3.0..3.0f64).prop_map(Bivector)
    }

    #[test]
    fn ip_examples() {
        assert_eq!(ip_lambda2(&e(0), &e(0), MetricKind::Riemannian), 1.0);
        assert_eq!(ip_lambda2(&e(0), &e(0), MetricKind::Lorentzian), -1.0);
        for kind in [MetricKind::Riemannian, MetricKind::Lorentzian] {
            assert_eq!(ip_lambda2(&e(0), &e(3), kind), 0.0);
        }
    }

    #[test]
    fn hodge_tables() {
        assert_eq!(hodge(&e(0), MetricKind::Riemannian), e(3));
        assert_eq!(hodge(&e(1), MetricKind::Riemannian), e(4));
        assert_eq!(hodge(&e(5), MetricKind::Riemannian), e(2));
        assert_eq!(hodge(&e(0), MetricKind::Lorentzian), e(3).scale(-1.0));
        assert_eq!(hodge(&e(2), MetricKind::Lorentzian), e(5).scale(-1.0));
        assert_eq!(hodge(&e(4), MetricKind::Lorentzian), e(1));
    }

    #[test]
    fn star_squares_are_exact() {
        let r = hodge_matrix(MetricKind::Riemannian);
        let l = hodge_matrix(MetricKind::Lorentzian);
        assert_eq!(r * r, Mat6::identity());
        assert_eq!(l * l, -Mat6::identity());
    }

    #[test]
    fn wedge_matches_basis() {
        let u = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let v = Vector4::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(Bivector::wedge(&u, &v), e(0));
        let w = Vector4::new(0.0, 0.0, 0.0, 1.0);
        // e4 ∧ e2 is E5
        assert_eq!(Bivector::wedge(&w, &v), e(4));
        assert!(Bivector::wedge(&(u + v), &w).is_decomposable(1e-12));
    }

    #[test]
    fn sd_split_examples() {
        let (p, m) = sd_split(&e(0));
        assert_eq!(p, Bivector([0.5, 0.0, 0.0, 0.5, 0.0, 0.0]));
        assert_eq!(m, Bivector([0.5, 0.0, 0.0, -0.5, 0.0, 0.0]));
        let plus = e(1).add(&e(4));
        let (p, m) = sd_split(&plus);
        assert_eq!(p, plus);
        assert_eq!(m, Bivector::ZERO);
    }

    #[test]
    fn self_dual_basis_is_orthonormal_eigenbasis() {
        let b = self_dual_basis();
        assert!((b.transpose() * b - Mat6::identity()).norm() < 1e-15);
        let star = hodge_matrix(MetricKind::Riemannian);
        let d = b.transpose() * star * b;
        for k in 0..6 {
            let expect = if k < 3 { 1.0 } else { -1.0 };
            assert!((d[(k, k)] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn ggl_examples() {
        assert_eq!(ggl(&e(0), &e(0)), Complex64::new(-1.0, 0.0));
        assert_eq!(ggl(&e(5), &e(5)), Complex64::new(1.0, 0.0));
        // (e1+e2)∧e3 is lightlike
        let u = Vector4::new(1.0, 1.0, 0.0, 0.0);
        let v = Vector4::new(0.0, 0.0, 1.0, 0.0);
        let p = Bivector::wedge(&u, &v);
        assert_eq!(ggl(&p, &p), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ggl_unit_iff_nondegenerate_plane() {
        // a boosted spacelike plane stays spacelike with ggL = +1
        let (ch, sh) = (0.7f64.cosh(), 0.7f64.sinh());
        let e1 = Vector4::new(ch, sh, 0.0, 0.0);
        let e2 = Vector4::new(sh, ch, 0.0, 0.0);
        let e3 = Vector4::new(0.0, 0.0, 1.0, 0.0);
        let e4 = Vector4::new(0.0, 0.0, 0.0, 1.0);
        for (u, v, expect) in [(&e3, &e4, 1.0), (&e2, &e3, 1.0), (&e1, &e3, -1.0)] {
            let p = Bivector::wedge(u, v);
            let z = ggl(&p, &p);
            assert!((z.re - expect).abs() < 1e-12 && z.im.abs() < 1e-12);
            let star = hodge(&p, MetricKind::Lorentzian);
            assert!(ip_lambda2(&p, &star, MetricKind::Lorentzian).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_coordinates_match_ggl() {
        let xi = Bivector([0.3, -1.0, 2.0, 0.5, 0.25, -0.75]);
        let eta = Bivector([1.5, 0.1, -0.2, 0.9, -1.1, 0.4]);
        let a = ggl(&xi, &eta);
        let b = ggl_complex(&to_complex(&xi), &to_complex(&eta));
        assert!((a - b).norm() < 1e-14);
        assert_eq!(from_complex(&to_complex(&xi)), xi);
        // i·z corresponds to ⋆L ξ
        let iz = to_complex(&xi) * Complex64::i();
        let star = hodge(&xi, MetricKind::Lorentzian);
        assert!((from_complex(&iz).to_vec() - star.to_vec()).norm() < 1e-15);
    }

    #[test]
    fn complexify_examples() {
        let star = hodge_matrix(MetricKind::Lorentzian);
        let c = complexify(&star, 1e-12).unwrap();
        assert_eq!(c, CMat3::identity() * Complex64::i());

        let b = [2.0, -0.5, 3.0];
        let mut m = Mat6::zeros();
        for k in 0..3 {
            m[(k, k + 3)] = -b[k];
            m[(k + 3, k)] = b[k];
        }
        let c = complexify(&m, 1e-12).unwrap();
        for k in 0..3 {
            assert_eq!(c[(k, k)], Complex64::new(0.0, -b[k]));
        }
    }

    #[test]
    fn complexify_rejects_noncommuting() {
        let mut m = Mat6::zeros();
        m[(0, 0)] = 1.0;
        match complexify(&m, 1e-9) {
            Err(Error::NotCommuting { residual }) => assert!(residual > 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plane_sign_examples() {
        let l = MetricKind::Lorentzian;
        assert_eq!(plane_sign(&e(5), l, 1e-9).unwrap(), PlaneSign::Spacelike);
        assert_eq!(plane_sign(&e(0), l, 1e-9).unwrap(), PlaneSign::Timelike);
        let u = Vector4::new(1.0, 1.0, 0.0, 0.0);
        let v = Vector4::new(0.0, 0.0, 1.0, 0.0);
        let p = Bivector::wedge(&u, &v);
        assert_eq!(plane_sign(&p, l, 1e-9).unwrap(), PlaneSign::Degenerate);
        assert!(matches!(
            plane_sign(&e(0).add(&e(3)), l, 1e-9),
            Err(Error::NotDecomposable { .. })
        ));
    }

    fn random_commuting(xs: &[f64; 18]) -> Mat6 {
        let c = CMat3::from_fn(|r, k| Complex64::new(xs[3 * r + k], xs[9 + 3 * r + k]));
        realify(&c)
    }

    proptest! {
        #[test]
        fn stars_are_self_adjoint(xi in bv(), eta in bv()) {
            for kind in [MetricKind::Riemannian, MetricKind::Lorentzian] {
                let a = ip_lambda2(&hodge(&xi, kind), &eta, kind);
                let b = ip_lambda2(&xi, &hodge(&eta, kind), kind);
                prop_assert!((a - b).abs() < 1e-12);
            }
            let ls = hodge(&hodge(&xi, MetricKind::Lorentzian), MetricKind::Lorentzian);
            prop_assert_eq!(ls, xi.scale(-1.0));
        }

        #[test]
        fn split_parts_are_orthogonal(xi in bv()) {
            let (p, m) = sd_split(&xi);
            prop_assert!(ip_lambda2(&p, &m, MetricKind::Riemannian).abs() < 1e-12);
            prop_assert!((p.add(&m).to_vec() - xi.to_vec()).norm() < 1e-14);
            prop_assert!((hodge(&p, MetricKind::Riemannian).to_vec() - p.to_vec()).norm() < 1e-14);
            prop_assert!((hodge(&m, MetricKind::Riemannian).to_vec() + m.to_vec()).norm() < 1e-14);
        }

        #[test]
        fn unit_planes_split_into_halves(u in proptest::array::uniform4(-2.0..2.0f64),
                                         v in proptest::array::uniform4(-2.0..2.0f64)) {
            let p = Bivector::wedge(&Vector4::from(u), &Vector4::from(v));
            let n = ip_lambda2(&p, &p, MetricKind::Riemannian).sqrt();
            prop_assume!(n > 1e-3);
            let p = p.scale(1.0 / n);
            let (a, b) = sd_split(&p);
            prop_assert!((ip_lambda2(&a, &a, MetricKind::Riemannian) - 0.5).abs() < 1e-12);
            prop_assert!((ip_lambda2(&b, &b, MetricKind::Riemannian) - 0.5).abs() < 1e-12);
        }

        #[test]
        fn ggl_is_symmetric_and_complex_linear(xi in bv(), eta in bv()) {
            prop_assert!((ggl(&xi, &eta) - ggl(&eta, &xi)).norm() < 1e-12);
            let ixi = hodge(&xi, MetricKind::Lorentzian);
            prop_assert!((ggl(&ixi, &eta) - Complex64::i() * ggl(&xi, &eta)).norm() < 1e-12);
        }

        #[test]
        fn complexify_round_trip_and_product(xs in proptest::array::uniform18(-2.0..2.0f64),
                                             ys in proptest::array::uniform18(-2.0..2.0f64)) {
            let m = random_commuting(&xs);
            let n = random_commuting(&ys);
            let cm = complexify(&m, 1e-12).unwrap();
            prop_assert!((realify(&cm) - m).norm() < 1e-12);
            let cn = complexify(&n, 1e-12).unwrap();
            let cmn = complexify(&(m * n), 1e-12).unwrap();
            prop_assert!((cmn - cm * cn).norm() < 1e-10);
        }
    }
}
