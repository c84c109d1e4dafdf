//! Forward-mode Taylor numbers in two variables.
//!
//! Closed-form flows are written once, generic over [`Scalar`], and evaluated
//! with [`Taylor1`] (value and gradient) or [`Taylor2`] (value, gradient and
//! Hessian) to obtain exact coordinate derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the closed-form velocity fields.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn recip(self) -> Self;

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
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
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// Value and gradient with respect to two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Taylor1 {
    pub v: f64,
    pub d: [f64; 2],
}

impl Taylor1 {
    pub const fn new(v: f64, d: [f64; 2]) -> Self {
        Self { v, d }
    }

    /// The coordinate `index` itself, evaluated at `v`.
    pub fn var(v: f64, index: usize) -> Self {
        let mut d = [0.0; 2];
        d[index] = 1.0;
        Self { v, d }
    }

    fn chain(self, f: f64, df: f64) -> Self {
        Self { v: f, d: [df * self.d[0], df * self.d[1]] }
    }
}

/// Value, gradient and Hessian with respect to two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Taylor2 {
    pub v: f64,
    pub d: [f64; 2],
    pub h: [[f64; 2]; 2],
}

impl Taylor2 {
    pub fn var(v: f64, index: usize) -> Self {
        let mut d = [0.0; 2];
        d[index] = 1.0;
        Self { v, d, h: [[0.0; 2]; 2] }
    }

    /// Drops the second-order part.
    pub fn first(self) -> Taylor1 {
        Taylor1 { v: self.v, d: self.d }
    }

    /// The coordinate derivative along `index`, with its own gradient.
    pub fn partial(self, index: usize) -> Taylor1 {
        Taylor1 { v: self.d[index], d: self.h[index] }
    }

    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        let mut h = [[0.0; 2]; 2];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij = ddf * self.d[i] * self.d[j] + df * self.h[i][j];
            }
        }
        Self { v: f, d: [df * self.d[0], df * self.d[1]], h }
    }
}

impl Add for Taylor1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1]] }
    }
}

impl Sub for Taylor1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1]] }
    }
}

impl Mul for Taylor1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: [self.d[0] * o.v + self.v * o.d[0], self.d[1] * o.v + self.v * o.d[1]],
        }
    }
}

impl Div for Taylor1 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Taylor1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: [-self.d[0], -self.d[1]] }
    }
}

impl Add<f64> for Taylor1 {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Self { v: self.v + c, d: self.d }
    }
}

impl Sub<f64> for Taylor1 {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        Self { v: self.v - c, d: self.d }
    }
}

impl Mul<f64> for Taylor1 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self { v: self.v * c, d: [self.d[0] * c, self.d[1] * c] }
    }
}

impl Div<f64> for Taylor1 {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self * (1.0 / c)
    }
}

impl Scalar for Taylor1 {
    fn constant(c: f64) -> Self {
        Self { v: c, d: [0.0; 2] }
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r)
    }
}

impl Add for Taylor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut h = self.h;
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] += o.h[i][j];
            }
        }
        Self { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1]], h }
    }
}

impl Sub for Taylor2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Taylor2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut h = [[0.0; 2]; 2];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij = self.h[i][j] * o.v
                    + self.d[i] * o.d[j]
                    + self.d[j] * o.d[i]
                    + self.v * o.h[i][j];
            }
        }
        Self {
            v: self.v * o.v,
            d: [self.d[0] * o.v + self.v * o.d[0], self.d[1] * o.v + self.v * o.d[1]],
            h,
        }
    }
}

impl Div for Taylor2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Taylor2 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Add<f64> for Taylor2 {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Self { v: self.v + c, ..self }
    }
}

impl Sub<f64> for Taylor2 {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        Self { v: self.v - c, ..self }
    }
}

impl Mul<f64> for Taylor2 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        let mut h = self.h;
        for row in h.iter_mut() {
            for hij in row.iter_mut() {
                *hij *= c;
            }
        }
        Self { v: self.v * c, d: [self.d[0] * c, self.d[1] * c], h }
    }
}

impl Div<f64> for Taylor2 {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self * (1.0 / c)
    }
}

impl Scalar for Taylor2 {
    fn constant(c: f64) -> Self {
        Self { v: c, d: [0.0; 2], h: [[0.0; 2]; 2] }
    }
    fn value(self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}
