//! Second-order forward-mode jets in four variables.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar function of four variables.
///
/// The Hessian is kept exactly symmetric: every update writes `(k, l)` and
/// `(l, k)` from the same expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [[f64; 4]; 4],
}

impl Jet2 {
    pub fn constant(value: f64) -> Jet2 {
        Jet2 {
            value,
            grad: [0.0; 4],
            hess: [[0.0; 4]; 4],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(index: usize, value: f64) -> Jet2 {
        let mut j = Jet2::constant(value);
        j.grad[index] = 1.0;
        j
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }

    /// `f ∘ self` given `f`, `f'` and `f''` at `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet2 {
        let mut out = Jet2::constant(f);
        for k in 0..4 {
            out.grad[k] = df * self.grad[k];
        }
        for k in 0..4 {
            for l in k..4 {
                let h = df * self.hess[k][l] + d2f * self.grad[k] * self.grad[l];
                out.hess[k][l] = h;
                out.hess[l][k] = h;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        self.chain(s * self.value, s, 0.0)
    }

    pub fn recip(&self) -> Result<Jet2> {
        let v = self.value;
        if v == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
    }

    pub fn div(&self, other: &Jet2) -> Result<Jet2> {
        Ok(*self * other.recip()?)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: i64) -> Result<Jet2> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Jet2::constant(1.0);
        let mut base = *self;
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(result)
    }

    /// Real power with a constant exponent; requires a positive base.
    pub fn powf(&self, b: f64) -> Result<Jet2> {
        let a = self.value;
        if a <= 0.0 {
            return Err(Error::Domain(format!(
                "non-integer power {b} of non-positive base {a}"
            )));
        }
        Ok(self.chain(a.powf(b), b * a.powf(b - 1.0), b * (b - 1.0) * a.powf(b - 2.0)))
    }

    /// `self^other` for a non-constant exponent: `exp(other · ln self)`.
    pub fn pow(&self, other: &Jet2) -> Result<Jet2> {
        if self.value <= 0.0 {
            return Err(Error::Domain(format!(
                "variable power of non-positive base {}",
                self.value
            )));
        }
        Ok((*other * self.ln()?).exp())
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Jet2> {
        let v = self.value;
        if v <= 0.0 {
            return Err(Error::Domain(format!("log of non-positive value {v}")));
        }
        Ok(self.chain(v.ln(), 1.0 / v, -1.0 / (v * v)))
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        let v = self.value;
        if v <= 0.0 {
            return Err(Error::Domain(format!("sqrt of non-positive value {v}")));
        }
        let s = v.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * v)))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Result<Jet2> {
        let c = self.value.cos();
        if c.abs() < 1e-300 {
            return Err(Error::Domain("tan at a pole".into()));
        }
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        Ok(self.chain(t, sec2, 2.0 * t * sec2))
    }

    pub fn sinh(&self) -> Jet2 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Jet2 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(&self) -> Jet2 {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut out = self;
        out.value += o.value;
        for k in 0..4 {
            out.grad[k] += o.grad[k];
            for l in 0..4 {
                out.hess[k][l] += o.hess[k][l];
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.value * o.value);
        for k in 0..4 {
            out.grad[k] = self.value * o.grad[k] + o.value * self.grad[k];
        }
        for k in 0..4 {
            for l in k..4 {
                let h = self.value * o.hess[k][l]
                    + o.value * self.hess[k][l]
                    + self.grad[k] * o.grad[l]
                    + o.grad[k] * self.grad[l];
                out.hess[k][l] = h;
                out.hess[l][k] = h;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(p: [f64; 4]) -> [Jet2; 4] {
        [0, 1, 2, 3].map(|i| Jet2::variable(i, p[i]))
    }

    #[test]
    fn product_rule_by_hand() {
        // f = x0^2 * x1 at (3, 2): grad (12, 9), hess [[4, 6], [6, 0]]
        let [a, b, _, _] = vars([3.0, 2.0, 0.0, 0.0]);
        let f = a * a * b;
        assert_eq!(f.value, 18.0);
        assert_eq!(f.grad[..2], [12.0, 9.0]);
        assert_eq!(f.hess[0][0], 4.0);
        assert_eq!(f.hess[0][1], 6.0);
        assert_eq!(f.hess[1][0], 6.0);
        assert_eq!(f.hess[1][1], 0.0);
    }

    #[test]
    fn integer_powers_are_exact() {
        let [_, x, _, _] = vars([0.0, 1.0, 0.0, 0.0]);
        let two_x = x.scale(2.0);
        let cube = two_x.powi(3).unwrap();
        assert_eq!(cube.value, 8.0);
        assert_eq!(cube.grad[1], 24.0);
        assert_eq!(cube.hess[1][1], 48.0);
        let inv = two_x.powi(-3).unwrap();
        assert_eq!(inv.value, 0.125);
        // d/dx (2x)^-3 = -6 (2x)^-4 = -0.375 at x = 1
        assert_eq!(inv.grad[1], -0.375);
    }

    #[test]
    fn domain_errors() {
        let z = Jet2::constant(0.0);
        assert!(z.recip().is_err());
        assert!(Jet2::constant(-1.0).ln().is_err());
        assert!(Jet2::constant(-1.0).sqrt().is_err());
        assert!(Jet2::constant(-2.0).powf(0.5).is_err());
        assert!(Jet2::constant(-2.0).powi(3).is_ok());
    }
}
