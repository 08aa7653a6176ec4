//! Forward-mode jets. `FieldJet` carries a value and its gradient with
//! respect to the coordinates (x¹, x², x³); `WarpJet` carries a value and
//! its first two derivatives in the single warp variable. Both propagate
//! derivatives exactly through arithmetic and the supported transcendental
//! functions; the value channel applies exactly the same IEEE operations as
//! plain `f64` evaluation, so values agree bit for bit across all three
//! evaluation modes.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value plus gradient (∂/∂x¹, ∂/∂x², ∂/∂x³).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub grad: [f64; 3],
}

impl FieldJet {
    pub const fn constant(value: f64) -> Self {
        FieldJet { value, grad: [0.0; 3] }
    }

    /// A coordinate value seeded as the variable along `axis` (0 → x¹,
    /// 1 → x², 2 → x³).
    pub fn variable(value: f64, axis: usize) -> Self {
        let mut grad = [0.0; 3];
        grad[axis] = 1.0;
        FieldJet { value, grad }
    }

    fn chain(self, value: f64, slope: f64) -> Self {
        FieldJet {
            value,
            grad: [
                slope * self.grad[0],
                slope * self.grad[1],
                slope * self.grad[2],
            ],
        }
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        self.chain(v, v)
    }

    pub fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, 1.0 + t * t)
    }

    pub fn sinh(self) -> Self {
        self.chain(self.value.sinh(), self.value.cosh())
    }

    pub fn cosh(self) -> Self {
        self.chain(self.value.cosh(), self.value.sinh())
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.chain(t, 1.0 - t * t)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
}

impl Add for FieldJet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        FieldJet {
            value: self.value + o.value,
            grad: [
                self.grad[0] + o.grad[0],
                self.grad[1] + o.grad[1],
                self.grad[2] + o.grad[2],
            ],
        }
    }
}

impl Sub for FieldJet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        FieldJet {
            value: self.value - o.value,
            grad: [
                self.grad[0] - o.grad[0],
                self.grad[1] - o.grad[1],
                self.grad[2] - o.grad[2],
            ],
        }
    }
}

impl Mul for FieldJet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        FieldJet {
            value: self.value * o.value,
            grad: [
                self.grad[0] * o.value + self.value * o.grad[0],
                self.grad[1] * o.value + self.value * o.grad[1],
                self.grad[2] * o.value + self.value * o.grad[2],
            ],
        }
    }
}

impl Div for FieldJet {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        FieldJet {
            value: q,
            grad: [
                (self.grad[0] - q * o.grad[0]) / o.value,
                (self.grad[1] - q * o.grad[1]) / o.value,
                (self.grad[2] - q * o.grad[2]) / o.value,
            ],
        }
    }
}

impl Neg for FieldJet {
    type Output = Self;
    fn neg(self) -> Self {
        FieldJet {
            value: -self.value,
            grad: [-self.grad[0], -self.grad[1], -self.grad[2]],
        }
    }
}

/// Value plus first and second derivative in one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl WarpJet {
    pub const fn constant(value: f64) -> Self {
        WarpJet { value, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(value: f64) -> Self {
        WarpJet { value, d1: 1.0, d2: 0.0 }
    }

    /// Composition with f: carries f(v), f′(v), f″(v) through the chain rule
    /// (f∘u)″ = f′(u)·u″ + f″(u)·u′².
    fn chain(self, value: f64, df: f64, d2f: f64) -> Self {
        WarpJet {
            value,
            d1: df * self.d1,
            d2: df * self.d2 + d2f * self.d1 * self.d1,
        }
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        self.chain(v, v, v)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn sinh(self) -> Self {
        let s = self.value.sinh();
        let c = self.value.cosh();
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let s = self.value.sinh();
        let c = self.value.cosh();
        self.chain(c, s, c)
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d1 = self.d1 / (2.0 * s);
        WarpJet {
            value: s,
            d1,
            d2: (self.d2 - 2.0 * d1 * d1) / (2.0 * s),
        }
    }
}

impl Add for WarpJet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        WarpJet {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for WarpJet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        WarpJet {
            value: self.value - o.value,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Mul for WarpJet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        WarpJet {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        }
    }
}

impl Div for WarpJet {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        let d1 = (self.d1 - q * o.d1) / o.value;
        WarpJet {
            value: q,
            d1,
            d2: (self.d2 - 2.0 * d1 * o.d1 - q * o.d2) / o.value,
        }
    }
}

impl Neg for WarpJet {
    type Output = Self;
    fn neg(self) -> Self {
        WarpJet { value: -self.value, d1: -self.d1, d2: -self.d2 }
    }
}

/// Uniform arithmetic over `f64`, `FieldJet`, and `WarpJet` so the evaluator
/// is written once. The value channel of every operation is the plain `f64`
/// operation.
pub(crate) trait Scalar: Copy {
    fn lift(v: f64) -> Self;
    fn value(self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn lift(v: f64) -> Self {
        v
    }
    fn value(self) -> f64 {
        self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

macro_rules! scalar_for_jet {
    ($ty:ty) => {
        impl Scalar for $ty {
            fn lift(v: f64) -> Self {
                <$ty>::constant(v)
            }
            fn value(self) -> f64 {
                self.value
            }
            fn add(self, o: Self) -> Self {
                self + o
            }
            fn sub(self, o: Self) -> Self {
                self - o
            }
            fn mul(self, o: Self) -> Self {
                self * o
            }
            fn div(self, o: Self) -> Self {
                self / o
            }
            fn neg(self) -> Self {
                -self
            }
            fn exp(self) -> Self {
                <$ty>::exp(self)
            }
            fn ln(self) -> Self {
                <$ty>::ln(self)
            }
            fn sin(self) -> Self {
                <$ty>::sin(self)
            }
            fn cos(self) -> Self {
                <$ty>::cos(self)
            }
            fn tan(self) -> Self {
                <$ty>::tan(self)
            }
            fn sinh(self) -> Self {
                <$ty>::sinh(self)
            }
            fn cosh(self) -> Self {
                <$ty>::cosh(self)
            }
            fn tanh(self) -> Self {
                <$ty>::tanh(self)
            }
            fn sqrt(self) -> Self {
                <$ty>::sqrt(self)
            }
        }
    };
}

scalar_for_jet!(FieldJet);
scalar_for_jet!(WarpJet);
