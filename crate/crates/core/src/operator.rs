//! The Weyl endomorphism of Λ² under either induced inner product.
//!
//! For an operator `M` with column `b` the image of `E_b`, the defining
//! relation `⟨Ŵ E_b, E_a⟩ = W(E_b, E_a)` gives `M[a][b] = σ_a W(E_b, E_a)`
//! with `σ` the signature of the inducing product. Riemannian operators
//! therefore read `[[A, B], [B, A]]` and the Lorentzian operator of the same
//! tensor reads `[[−A, −B], [B, A]]`.

use nalgebra::{Matrix3, Matrix4};

use crate::bivector::{
    commutator_residual, hodge_matrix, self_dual_basis, Frame, Mat6, MetricKind, BASIS_PAIRS,
};
use crate::curvature::{Curvature4, FrameBundle, TensorKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeylOperator6 {
    pub mat: Mat6,
    pub kind: MetricKind,
    pub frame: Frame,
    pub point: Option<[f64; 4]>,
}

impl WeylOperator6 {
    /// An operator given directly on the standard orthonormal frame.
    pub fn from_matrix(mat: Mat6, kind: MetricKind) -> WeylOperator6 {
        WeylOperator6 {
            mat,
            kind,
            frame: Frame::standard(kind),
            point: None,
        }
    }

    /// The frame-component tensor this operator encodes.
    pub fn tensor(&self) -> Curvature4 {
        tensor_from_operator(&self.mat, self.kind)
    }

    /// `Σ M` must be symmetric for a self-adjoint operator.
    pub fn self_adjoint_residual(&self) -> f64 {
        let n = self.mat.norm();
        if n == 0.0 {
            return 0.0;
        }
        let s = Mat6::from_diagonal(&self.kind.signature().into());
        let sm = s * self.mat;
        (sm - sm.transpose()).norm() / n
    }

    /// Same operator expressed on the frame `e'_a = Σ_b L[b][a] e_b`.
    pub fn conjugated(&self, l: &Matrix4<f64>) -> Result<WeylOperator6> {
        let lam = lambda2_matrix(l);
        let inv = lam
            .try_inverse()
            .ok_or_else(|| Error::Contract("frame change is singular".into()))?;
        Ok(WeylOperator6 {
            mat: inv * self.mat * lam,
            kind: self.kind,
            frame: self.frame.transformed(l, self.kind),
            point: self.point,
        })
    }
}

/// Operator matrix of a frame-component tensor.
pub fn operator_from_tensor(w: &Curvature4, kind: MetricKind) -> Mat6 {
    let sig = kind.signature();
    Mat6::from_fn(|a, b| {
        let (ia, ja) = BASIS_PAIRS[a];
        let (ib, jb) = BASIS_PAIRS[b];
        sig[a] * w.c[ib][jb][ia][ja]
    })
}

/// Inverse of [`operator_from_tensor`]: frame components `W(E_b, E_a) = σ_a M[a][b]`.
pub fn tensor_from_operator(m: &Mat6, kind: MetricKind) -> Curvature4 {
    let sig = kind.signature();
    let mut w = Curvature4::zero(TensorKind::Weyl);
    for a in 0..6 {
        for b in 0..6 {
            let v = sig[a] * m[(a, b)];
            let (ia, ja) = BASIS_PAIRS[a];
            let (ib, jb) = BASIS_PAIRS[b];
            w.c[ib][jb][ia][ja] = v;
            w.c[jb][ib][ia][ja] = -v;
            w.c[ib][jb][ja][ia] = -v;
            w.c[jb][ib][ja][ia] = v;
        }
    }
    w
}

/// Operator of a chart-component tensor on the frame of `fb`.
pub fn build_operator(w: &Curvature4, fb: &FrameBundle, kind: MetricKind) -> Result<WeylOperator6> {
    if fb.frame.kind() != kind {
        return Err(Error::KindMismatch {
            expected: kind,
            found: fb.frame.kind(),
        });
    }
    let wf = w.in_frame(&fb.frame);
    Ok(WeylOperator6 {
        mat: operator_from_tensor(&wf, kind),
        kind,
        frame: fb.frame.clone(),
        point: Some(fb.point),
    })
}

/// Operator of a Weyl tensor under the bridge of a unit vector `t`: the
/// frame starts with `t` and is orthonormal for the metric of the other
/// kind, on which the operator is built.
pub fn bridge_operator(
    w: &Curvature4,
    g: &nalgebra::Matrix4<f64>,
    kind: MetricKind,
    t: &nalgebra::Vector4<f64>,
    point: [f64; 4],
    orientation: i8,
) -> Result<WeylOperator6> {
    let flipped = crate::chart::bridge_matrix(g, t, kind)?;
    let frame = crate::curvature::bridge_frame(g, kind, t, orientation)?;
    let fb = FrameBundle {
        point,
        frame,
        g: flipped,
    };
    build_operator(w, &fb, kind.flipped())
}

/// `(A, B)` per the block convention of the operator's kind.
pub fn blocks(op: &WeylOperator6) -> (Matrix3<f64>, Matrix3<f64>) {
    let m = &op.mat;
    match op.kind {
        MetricKind::Riemannian => (
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 3>(0, 3).into_owned(),
        ),
        MetricKind::Lorentzian => (
            m.fixed_view::<3, 3>(3, 3).into_owned(),
            m.fixed_view::<3, 3>(3, 0).into_owned(),
        ),
    }
}

/// `max_jk |W(T, e_j, e_k, T)| / (‖W‖ |c|²)` for frame components `w` and
/// frame coefficients `c` of `T`.
pub fn annihilation_residual(w: &Curvature4, c: &[f64; 4]) -> f64 {
    let norm = w.norm();
    let c2: f64 = c.iter().map(|v| v * v).sum();
    if norm == 0.0 || c2 == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for j in 0..4 {
        for k in j..4 {
            let mut s = 0.0;
            for i in 0..4 {
                for l in 0..4 {
                    s += c[i] * c[l] * w.c[i][j][k][l];
                }
            }
            worst = worst.max(s.abs());
        }
    }
    worst / (norm * c2)
}

/// Whether `W(T,·,·,T)` vanishes, for a chart tensor and chart vector.
pub fn annihilates(w: &Curvature4, t: &nalgebra::Vector4<f64>, fb: &FrameBundle, tol: f64) -> (bool, f64) {
    let wf = w.in_frame(&fb.frame);
    let c = fb.frame.components_of(t);
    let r = annihilation_residual(&wf, &[c[0], c[1], c[2], c[3]]);
    (r <= tol, r)
}

/// Commutation with the Hodge star of the operator's kind.
pub fn commutes_with_star(op: &WeylOperator6, tol: f64) -> (bool, f64) {
    let r = commutator_residual(&op.mat, &hodge_matrix(op.kind));
    (r <= tol, r)
}

/// `(W⁺, W⁻) = (A + B, A − B)` on the Λ± bases.
pub fn wplus_wminus(op: &WeylOperator6) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    if op.kind != MetricKind::Riemannian {
        return Err(Error::KindMismatch {
            expected: MetricKind::Riemannian,
            found: op.kind,
        });
    }
    let phi = self_dual_basis();
    let d = phi.transpose() * op.mat * phi;
    Ok((
        d.fixed_view::<3, 3>(0, 0).into_owned(),
        d.fixed_view::<3, 3>(3, 3).into_owned(),
    ))
}

/// Weyl operator from the curvature operator: `½(ℛ + ⋆ℛ⋆) + (scal/12) I`
/// for a Riemannian frame. With the Lorentzian star `⋆² = −I`, so the
/// conjugated term enters with the opposite sign.
pub fn weyl_from_curvature_operator(r6: &Mat6, scal: f64, kind: MetricKind) -> Mat6 {
    let star = hodge_matrix(kind);
    let s = match kind {
        MetricKind::Riemannian => 1.0,
        MetricKind::Lorentzian => -1.0,
    };
    (r6 + star * r6 * star * s) * 0.5 + Mat6::identity() * (scal / 12.0)
}

/// Re-reads an operator of one kind as the operator of the same tensor under
/// the other induced product: the first three rows change sign.
pub fn reinterpret(op: &WeylOperator6, kind: MetricKind) -> WeylOperator6 {
    if op.kind == kind {
        return op.clone();
    }
    let mut mat = op.mat;
    for r in 0..3 {
        for c in 0..6 {
            mat[(r, c)] = -mat[(r, c)];
        }
    }
    WeylOperator6 {
        mat,
        kind,
        frame: Frame::from_parts_unchecked(*op.frame.vectors(), kind),
        point: op.point,
    }
}

/// Matrix of `Λ²L`: `E_b = e_i∧e_j ↦ Le_i∧Le_j`.
pub fn lambda2_matrix(l: &Matrix4<f64>) -> Mat6 {
    Mat6::from_fn(|a, b| {
        let (k, m) = BASIS_PAIRS[a];
        let (i, j) = BASIS_PAIRS[b];
        l[(k, i)] * l[(m, j)] - l[(m, i)] * l[(k, j)]
    })
}

/// `[[A, B], [B, A]]`.
pub fn riemannian_block(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Mat6 {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(a);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivector::hodge_matrix;

    #[test]
    fn tensor_operator_round_trip() {
        let a = Matrix3::new(1.0, 2.0, 0.5, 2.0, -3.0, 0.25, 0.5, 0.25, 2.0);
        let b = Matrix3::new(0.0, 1.0, -1.0, 1.0, 2.0, 0.0, -1.0, 0.0, -2.0);
        let m = riemannian_block(&a, &b);
        for kind in [MetricKind::Riemannian, MetricKind::Lorentzian] {
            let w = tensor_from_operator(&m, kind);
            assert_eq!(operator_from_tensor(&w, kind), m);
        }
        let w = tensor_from_operator(&m, MetricKind::Riemannian);
        assert!(w.symmetry_residual() < 1e-14);
    }

    #[test]
    fn lorentz_reading_negates_first_rows() {
        let a = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -2.0, 1.0));
        let op = WeylOperator6::from_matrix(riemannian_block(&a, &Matrix3::zeros()), MetricKind::Riemannian);
        let l = reinterpret(&op, MetricKind::Lorentzian);
        let w = op.tensor();
        assert_eq!(l.tensor(), w);
        let (la, lb) = blocks(&l);
        assert_eq!(la, a);
        assert_eq!(lb, Matrix3::zeros());
    }

    #[test]
    fn sphere_curvature_operator_gives_zero_weyl() {
        let r6 = -Mat6::identity();
        assert_eq!(weyl_from_curvature_operator(&r6, 12.0, MetricKind::Riemannian), Mat6::zeros());
    }

    #[test]
    fn lambda2_of_rotation_commutes_with_star() {
        let (s, c) = 0.3f64.sin_cos();
        let mut l = Matrix4::identity();
        l[(0, 0)] = c;
        l[(0, 2)] = -s;
        l[(2, 0)] = s;
        l[(2, 2)] = c;
        let lam = lambda2_matrix(&l);
        let star = hodge_matrix(MetricKind::Riemannian);
        assert!((lam * star - star * lam).norm() < 1e-14);
        assert!((lam.transpose() * lam - Mat6::identity()).norm() < 1e-14);
    }
}
