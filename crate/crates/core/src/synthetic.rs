//! Random inputs for property tests, verification suites and benches.
//!
//! A Riemannian Weyl operator is `[[A, B], [B, A]]` with `A`, `B` symmetric
//! and trace-free; those two trace conditions are exactly trace-freeness
//! plus the first Bianchi identity, so every such matrix is the operator of
//! a genuine Weyl tensor.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bivector::{Mat6, MetricKind};
use crate::operator::{riemannian_block, WeylOperator6};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric, trace-free, entries of order `scale`.
pub fn traceless_symmetric<R: Rng>(rng: &mut R, scale: f64) -> Matrix3<f64> {
    let mut m = Matrix3::from_fn(|_, _| rng.gen_range(-scale..scale));
    m = (m + m.transpose()) * 0.5;
    let t = m.trace() / 3.0;
    m - Matrix3::identity() * t
}

pub fn riemannian_weyl<R: Rng>(rng: &mut R, scale: f64) -> WeylOperator6 {
    let a = traceless_symmetric(rng, scale);
    let b = traceless_symmetric(rng, scale);
    WeylOperator6::from_matrix(riemannian_block(&a, &b), MetricKind::Riemannian)
}

/// Riemannian operator with `A = O`, so `W(e₁,·,·,e₁) = 0`.
pub fn annihilating_weyl<R: Rng>(rng: &mut R, scale: f64) -> WeylOperator6 {
    let b = traceless_symmetric(rng, scale);
    WeylOperator6::from_matrix(riemannian_block(&Matrix3::zeros(), &b), MetricKind::Riemannian)
}

/// A self-dual (`sign = 1`, `A = B`) or anti-self-dual (`sign = −1`) operator.
pub fn half_flat_weyl<R: Rng>(rng: &mut R, scale: f64, sign: f64) -> WeylOperator6 {
    let a = traceless_symmetric(rng, scale);
    WeylOperator6::from_matrix(riemannian_block(&a, &(a * sign)), MetricKind::Riemannian)
}

pub fn unit_vector4<R: Rng>(rng: &mut R) -> Vector4<f64> {
    loop {
        let v = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn unit_vector3<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Rotation in SO(3) from a random axis and angle.
pub fn rotation3<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let axis = nalgebra::Unit::new_normalize(unit_vector3(rng));
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    *nalgebra::Rotation3::from_axis_angle(&axis, angle).matrix()
}

/// Rotation in SO(4) from the QR factor of a random matrix.
pub fn rotation4<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    loop {
        let m: Matrix4<f64> = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if m.determinant().abs() < 1e-3 {
            continue;
        }
        let qr = m.qr();
        let mut q = qr.q();
        let r = qr.r();
        for i in 0..4 {
            if r[(i, i)] < 0.0 {
                for k in 0..4 {
                    q[(k, i)] = -q[(k, i)];
                }
            }
        }
        if q.determinant() < 0.0 {
            for k in 0..4 {
                q[(k, 3)] = -q[(k, 3)];
            }
        }
        return q;
    }
}

/// Proper orthochronous Lorentz transformation: a boost of rapidity at most
/// `max_rapidity` along a random direction composed with a spatial rotation.
/// Index 0 is the timelike direction.
pub fn lorentz4<R: Rng>(rng: &mut R, max_rapidity: f64) -> Matrix4<f64> {
    let n = unit_vector3(rng);
    let phi = rng.gen_range(0.0..max_rapidity);
    let (ch, sh) = (phi.cosh(), phi.sinh());
    let mut boost = Matrix4::identity();
    boost[(0, 0)] = ch;
    for i in 0..3 {
        boost[(0, i + 1)] = sh * n[i];
        boost[(i + 1, 0)] = sh * n[i];
        for j in 0..3 {
            boost[(i + 1, j + 1)] += (ch - 1.0) * n[i] * n[j];
        }
    }
    let mut rot = Matrix4::identity();
    rot.fixed_view_mut::<3, 3>(1, 1).copy_from(&rotation3(rng));
    boost * rot
}

/// Frame change preserving the orthonormality type of `kind`.
pub fn frame_change<R: Rng>(rng: &mut R, kind: MetricKind) -> Matrix4<f64> {
    match kind {
        MetricKind::Riemannian => rotation4(rng),
        MetricKind::Lorentzian => lorentz4(rng, 1.5),
    }
}

/// Relative perturbation of every entry by at most `eps · ‖M‖`.
pub fn perturb<R: Rng>(rng: &mut R, m: &Mat6, eps: f64) -> Mat6 {
    let n = m.norm();
    m + Mat6::from_fn(|_, _| rng.gen_range(-1.0..1.0) * eps * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::lambda2_matrix;

    #[test]
    fn generators_preserve_their_groups() {
        let mut rng = seeded(7);
        let eta = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        for _ in 0..20 {
            let q = rotation4(&mut rng);
            assert!((q.transpose() * q - Matrix4::identity()).norm() < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
            let l = lorentz4(&mut rng, 2.0);
            assert!((l.transpose() * eta * l - eta).norm() < 1e-10);
            assert!(l[(0, 0)] >= 1.0);
            assert!((l.determinant() - 1.0).abs() < 1e-9);
            let lam = lambda2_matrix(&l);
            assert!((lam.determinant() - 1.0).abs() < 1e-8);
        }
    }
}
