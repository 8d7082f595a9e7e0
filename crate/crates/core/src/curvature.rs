//! Pointwise curvature: Christoffel symbols, Riemann, Ricci, scalar
//! curvature, Kulkarni–Nomizu products, the Weyl tensor and orthonormal
//! frames.
//!
//! Conventions: `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`,
//! `Rm_ijkl = g_lm R^m_ijk`, so `Rm(v,w,w,v)` is the sectional curvature of
//! an orthonormal pair. `Ric_jk = g^il Rm_ijkl`.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::bivector::{Frame, MetricKind};
use crate::chart::{check_signature, MetricChart, MetricJets};
use crate::error::{Error, Result};

pub type Christoffel = [[[f64; 4]; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    Riemann,
    Weyl,
    KnProduct,
}

/// A (0,4) tensor with algebraic curvature symmetries, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature4 {
    pub c: [[[[f64; 4]; 4]; 4]; 4],
    pub kind: TensorKind,
}

impl Curvature4 {
    pub fn zero(kind: TensorKind) -> Curvature4 {
        Curvature4 {
            c: [[[[0.0; 4]; 4]; 4]; 4],
            kind,
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[i][j][k][l]
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().flatten().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Curvature4 {
        let mut out = self.clone();
        out.c.iter_mut().flatten().flatten().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn combine(&self, a: f64, other: &Curvature4, b: f64, kind: TensorKind) -> Curvature4 {
        let mut out = Curvature4::zero(kind);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        out.c[i][j][k][l] = a * self.c[i][j][k][l] + b * other.c[i][j][k][l];
                    }
                }
            }
        }
        out
    }

    /// `W(u, v, x, y)` for chart (or frame) component vectors.
    pub fn eval(&self, u: &Vector4<f64>, v: &Vector4<f64>, x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    for l in 0..4 {
                        s += uv * x[k] * y[l] * self.c[i][j][k][l];
                    }
                }
            }
        }
        s
    }

    /// Components on a new basis: `T'_abcd = T(f_a, f_b, f_c, f_d)` where the
    /// columns of `f` are the new basis vectors.
    pub fn transform(&self, f: &Matrix4<f64>) -> Curvature4 {
        let mut a = self.c;
        // contract one slot at a time
        for slot in 0..4 {
            let mut b = [[[[0.0; 4]; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let idx = [i, j, k, l];
                            let mut s = 0.0;
                            for m in 0..4 {
                                let mut src = idx;
                                src[slot] = m;
                                s += f[(m, idx[slot])] * a[src[0]][src[1]][src[2]][src[3]];
                            }
                            b[i][j][k][l] = s;
                        }
                    }
                }
            }
            a = b;
        }
        Curvature4 { c: a, kind: self.kind }
    }

    pub fn in_frame(&self, frame: &Frame) -> Curvature4 {
        self.transform(&frame.matrix())
    }

    /// Largest violation of the algebraic curvature symmetries, relative to
    /// the largest component.
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let t = &self.c;
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = t[i][j][k][l];
                        worst = worst
                            .max((v + t[j][i][k][l]).abs())
                            .max((v + t[i][j][l][k]).abs())
                            .max((v - t[k][l][i][j]).abs())
                            .max((v + t[j][k][i][l] + t[k][i][j][l]).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest metric trace `g^ik T_ijkl` relative to the tensor norm.
    pub fn trace_residual(&self, g_inv: &Matrix4<f64>) -> f64 {
        let scale = self.norm();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for j in 0..4 {
            for l in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    for k in 0..4 {
                        s += g_inv[(i, k)] * self.c[i][j][k][l];
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        worst / scale
    }
}

fn inverse(g: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let det = g.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::SingularMetric { det });
    }
    g.try_inverse().ok_or(Error::SingularMetric { det })
}

/// `Γ[k][i][j] = Γ^k_ij`.
pub fn christoffel(g: &Matrix4<f64>, dg: &[[[f64; 4]; 4]; 4]) -> Result<Christoffel> {
    let gi = inverse(g)?;
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += gi[(k, l)] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
                gamma[k][j][i] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Riemann (0,4) tensor from the metric jets.
pub fn riemann(g: &Matrix4<f64>, dg: &[[[f64; 4]; 4]; 4], ddg: &[[[[f64; 4]; 4]; 4]; 4]) -> Result<Curvature4> {
    let gi = inverse(g)?;
    let gamma = christoffel(g, dg)?;
    // ∂_m g^kl = −g^ka ∂_m g_ab g^bl
    let mut dgi = [[[0.0; 4]; 4]; 4];
    for m in 0..4 {
        let d = Matrix4::from_fn(|a, b| dg[m][a][b]);
        let prod = -(gi * d * gi);
        for k in 0..4 {
            for l in 0..4 {
                dgi[m][k][l] = prod[(k, l)];
            }
        }
    }
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for m in 0..4 {
        for k in 0..4 {
            for i in 0..4 {
                for j in i..4 {
                    let mut s = 0.0;
                    for l in 0..4 {
                        let bracket = dg[i][l][j] + dg[j][l][i] - dg[l][i][j];
                        let dbracket = ddg[m][i][l][j] + ddg[m][j][l][i] - ddg[m][l][i][j];
                        s += dgi[m][k][l] * bracket + gi[(k, l)] * dbracket;
                    }
                    dgamma[m][k][i][j] = 0.5 * s;
                    dgamma[m][k][j][i] = 0.5 * s;
                }
            }
        }
    }
    // R^l_ijk
    let mut r_up = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut s = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..4 {
                        s += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    r_up[l][i][j][k] = s;
                }
            }
        }
    }
    let mut rm = Curvature4::zero(TensorKind::Riemann);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut s = 0.0;
                    for m in 0..4 {
                        s += g[(l, m)] * r_up[m][i][j][k];
                    }
                    rm.c[i][j][k][l] = s;
                }
            }
        }
    }
    Ok(rm)
}

/// Ricci tensor and scalar curvature.
pub fn ricci_scalar(rm: &Curvature4, g: &Matrix4<f64>) -> Result<(Matrix4<f64>, f64)> {
    let gi = inverse(g)?;
    let mut ric = Matrix4::zeros();
    for j in 0..4 {
        for k in 0..4 {
            let mut s = 0.0;
            for i in 0..4 {
                for l in 0..4 {
                    s += gi[(i, l)] * rm.c[i][j][k][l];
                }
            }
            ric[(j, k)] = s;
        }
    }
    let ric = (ric + ric.transpose()) * 0.5;
    let scal = (gi.component_mul(&ric)).sum();
    Ok((ric, scal))
}

/// `(h⊙k)_ijkl = h_il k_jk + h_jk k_il − h_ik k_jl − h_jl k_ik`.
pub fn kulkarni_nomizu(h: &Matrix4<f64>, k: &Matrix4<f64>) -> Curvature4 {
    let mut out = Curvature4::zero(TensorKind::KnProduct);
    for i in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                for l in 0..4 {
                    out.c[i][j][a][l] = h[(i, l)] * k[(j, a)] + h[(j, a)] * k[(i, l)]
                        - h[(i, a)] * k[(j, l)]
                        - h[(j, l)] * k[(i, a)];
                }
            }
        }
    }
    out
}

/// `W = Rm − ½ Ric⊙g + (scal/12) g⊙g`.
pub fn weyl(rm: &Curvature4, ric: &Matrix4<f64>, scal: f64, g: &Matrix4<f64>) -> Curvature4 {
    let ricg = kulkarni_nomizu(ric, g);
    let gg = kulkarni_nomizu(g, g);
    rm.combine(1.0, &ricg, -0.5, TensorKind::Weyl)
        .combine(1.0, &gg, scal / 12.0, TensorKind::Weyl)
}

/// Everything the pipeline needs at one point of a chart.
#[derive(Debug, Clone)]
pub struct PointCurvature {
    pub point: [f64; 4],
    pub jets: MetricJets,
    pub christoffel: Christoffel,
    pub riemann: Curvature4,
    pub ricci: Matrix4<f64>,
    pub scal: f64,
    pub weyl: Curvature4,
}

impl PointCurvature {
    pub fn g(&self) -> &Matrix4<f64> {
        &self.jets.g
    }
}

pub fn curvature_at(chart: &MetricChart, p: &[f64; 4]) -> Result<PointCurvature> {
    let jets = chart.metric_jets(p)?;
    let christoffel = christoffel(&jets.g, &jets.dg)?;
    let riemann = riemann(&jets.g, &jets.dg, &jets.ddg)?;
    let (ricci, scal) = ricci_scalar(&riemann, &jets.g)?;
    let weyl = weyl(&riemann, &ricci, scal, &jets.g);
    Ok(PointCurvature {
        point: *p,
        jets,
        christoffel,
        riemann,
        ricci,
        scal,
        weyl,
    })
}

/// An orthonormal frame at a point together with the metric it is
/// orthonormal for.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBundle {
    pub point: [f64; 4],
    pub frame: Frame,
    pub g: Matrix4<f64>,
}

const FRAME_TOL: f64 = 1e-10;

fn ip(g: &Matrix4<f64>, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    u.dot(&(g * v))
}

/// Completes `first` (already unit, with `⟨first,first⟩ = s₀`) to an
/// orthonormal frame by projecting the coordinate basis vectors in order.
fn complete_frame(g: &Matrix4<f64>, kind: MetricKind, first: Vector4<f64>, orientation: i8) -> Result<Frame> {
    let sig = kind.vector_signature();
    let mut vectors = vec![first];
    let mut candidates: Vec<Vector4<f64>> = (0..4)
        .map(|i| {
            let mut v = Vector4::zeros();
            v[i] = 1.0;
            v
        })
        .collect();
    for _ in 1..4 {
        let projected: Vec<(Vector4<f64>, f64)> = candidates
            .iter()
            .map(|c| {
                let mut w = *c;
                for (a, e) in vectors.iter().enumerate() {
                    w -= e * (ip(g, &w, e) * sig[a]);
                }
                (w, ip(g, &w, &w))
            })
            .collect();
        let max = projected.iter().fold(0.0f64, |m, p| m.max(p.1));
        // coordinate order, skipping nearly dependent candidates
        let ci = projected
            .iter()
            .position(|p| p.1 >= 0.1 * max)
            .expect("candidates remain");
        let (w, n) = projected[ci];
        if n <= 1e-14 {
            return Err(Error::SignatureMismatch { expected: kind });
        }
        vectors.push(w / n.sqrt());
        candidates.remove(ci);
    }
    let mut arr: [Vector4<f64>; 4] = [vectors[0], vectors[1], vectors[2], vectors[3]];
    if Matrix4::from_columns(&arr).determinant() * f64::from(orientation) < 0.0 {
        arr.swap(2, 3);
    }
    Frame::new(arr, kind, g, orientation, FRAME_TOL)
}

/// Gram–Schmidt orthonormal frame of `g` at a point. In the Lorentzian
/// case the first vector is timelike; it is the coordinate vector with the
/// most negative `g_ii` or, if no coordinate vector is timelike, the
/// negative eigenvector of `g`.
pub fn orthonormal_frame_at(g: &Matrix4<f64>, kind: MetricKind, orientation: i8) -> Result<Frame> {
    check_signature(g, kind)?;
    let first = match kind {
        MetricKind::Riemannian => {
            let n = g[(0, 0)];
            Vector4::new(1.0, 0.0, 0.0, 0.0) / n.sqrt()
        }
        MetricKind::Lorentzian => {
            let (idx, min) = (0..4)
                .map(|i| (i, g[(i, i)]))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            let v = if min < -1e-8 {
                let mut v = Vector4::zeros();
                v[idx] = 1.0;
                v
            } else {
                let eig = SymmetricEigen::new(*g);
                let (i, _) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
                eig.eigenvectors.column(i).into_owned()
            };
            let n = ip(g, &v, &v);
            v / (-n).sqrt()
        }
    };
    complete_frame(g, kind, first, orientation)
}

/// Orthonormal frame whose first vector is the unit vector `t`.
///
/// `frame_metric` is the metric the frame is orthonormal for and `kind` its
/// signature; `t` must satisfy `⟨t,t⟩ = ±1` accordingly.
pub fn adapted_frame(
    frame_metric: &Matrix4<f64>,
    kind: MetricKind,
    t: &Vector4<f64>,
    orientation: i8,
) -> Result<Frame> {
    let expected = kind.vector_signature()[0];
    let norm = ip(frame_metric, t, t);
    if (norm - expected).abs() > 1e-9 {
        return Err(Error::NonUnitVector { norm });
    }
    complete_frame(frame_metric, kind, *t, orientation)
}

/// Frame of `g` that is also orthonormal for the bridged metric with unit
/// vector `t`: `e₁ = t`, remaining vectors `g`-orthogonal to `t`.
pub fn bridge_frame(g: &Matrix4<f64>, kind: MetricKind, t: &Vector4<f64>, orientation: i8) -> Result<Frame> {
    let base = adapted_frame(g, kind, t, orientation)?;
    let flipped = crate::chart::bridge_matrix(g, t, kind)?;
    let vectors = *base.vectors();
    let target = kind.flipped();
    // the bridged frame must list its timelike vector first
    Frame::new(vectors, target, &flipped, orientation, 1e-9)
}

pub fn orthonormal_frame(chart: &MetricChart, p: &[f64; 4]) -> Result<FrameBundle> {
    let g = chart.metric_at(p)?;
    let frame = orthonormal_frame_at(&g, chart.kind(), chart.orientation())?;
    Ok(FrameBundle { point: *p, frame, g })
}
