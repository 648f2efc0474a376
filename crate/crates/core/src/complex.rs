//! Complex pairs over any [`Real`] ring.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::jet::{Jet2, NumError, Real};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

/// Complex number whose parts are jets.
pub type ComplexJet = Cx<Jet2>;

impl<T: Real> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }
    pub fn real(re: T) -> Self {
        Cx { re, im: T::zero() }
    }
    pub fn cst(re: f64, im: f64) -> Self {
        Cx { re: T::cst(re), im: T::cst(im) }
    }
    pub fn zero() -> Self {
        Self::cst(0.0, 0.0)
    }
    pub fn one() -> Self {
        Self::cst(1.0, 0.0)
    }
    pub fn i() -> Self {
        Self::cst(0.0, 1.0)
    }
    pub fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }
    pub fn abs2(self) -> T {
        self.re * self.re + self.im * self.im
    }
    pub fn scale(self, s: T) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    pub fn scalef(self, s: f64) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    pub fn mul_i(self) -> Self {
        Cx { re: -self.im, im: self.re }
    }
    pub fn recip(self) -> Self {
        let n = self.abs2().recip();
        Cx { re: self.re * n, im: -self.im * n }
    }
    pub fn checked_recip(self) -> Result<Self, NumError> {
        let n = self.abs2().checked_recip()?;
        Ok(Cx { re: self.re * n, im: -self.im * n })
    }
    pub fn checked_div(self, o: Self) -> Result<Self, NumError> {
        Ok(self * o.checked_recip()?)
    }
    pub fn exp(self) -> Self {
        let e = self.re.exp();
        Cx { re: e * self.im.cos(), im: e * self.im.sin() }
    }
    /// `e^{i t}` for real `t`.
    pub fn expi(t: T) -> Self {
        Cx { re: t.cos(), im: t.sin() }
    }
    pub fn sin(self) -> Self {
        // sin(a+ib) = sin a cosh b + i cos a sinh b
        let (eb, emb) = (self.im.exp(), (-self.im).exp());
        let ch = (eb + emb) * 0.5;
        let sh = (eb - emb) * 0.5;
        Cx { re: self.re.sin() * ch, im: self.re.cos() * sh }
    }
    pub fn cos(self) -> Self {
        let (eb, emb) = (self.im.exp(), (-self.im).exp());
        let ch = (eb + emb) * 0.5;
        let sh = (eb - emb) * 0.5;
        Cx { re: self.re.cos() * ch, im: -(self.re.sin() * sh) }
    }
    pub fn powi(self, n: i32) -> Self {
        let mut acc = Self::one();
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
    /// Order-0 parts.
    pub fn value(&self) -> (f64, f64) {
        (self.re.val(), self.im.val())
    }
    pub fn modulus(&self) -> f64 {
        let (a, b) = self.value();
        a.hypot(b)
    }
}

impl<T: Real> Add for Cx<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Real> Sub for Cx<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Real> Mul for Cx<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cx { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl<T: Real> Div for Cx<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> Neg for Cx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx { re: -self.re, im: -self.im }
    }
}

impl<T: Real> Add<T> for Cx<T> {
    type Output = Self;
    fn add(self, o: T) -> Self {
        Cx { re: self.re + o, im: self.im }
    }
}

impl<T: Real> Mul<T> for Cx<T> {
    type Output = Self;
    fn mul(self, o: T) -> Self {
        self.scale(o)
    }
}

/// Wirtinger derivatives of a complex jet in the complex pair `(k = 0: x0 + i x1, k = 1: x2 + i x3)`.
///
/// `d_k f = (f_{x} - i f_{y}) / 2`, `dbar_k f = (f_{x} + i f_{y}) / 2`.
pub fn wirtinger(f: &ComplexJet, k: usize) -> (Cx<f64>, Cx<f64>) {
    let (ix, iy) = (2 * k, 2 * k + 1);
    let fx = Cx::<f64>::new(f.re.grad[ix], f.im.grad[ix]);
    let fy = Cx::<f64>::new(f.re.grad[iy], f.im.grad[iy]);
    let d = (fx - fy.mul_i()).scalef(0.5);
    let db = (fx + fy.mul_i()).scalef(0.5);
    (d, db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed_point;

    #[test]
    fn conjugation_is_multiplicative() {
        let x = seed_point([0.3, -0.2, 0.7, 1.1]);
        let a = Cx::new(x[0] * x[1], x[2].sin());
        let b = Cx::new(x[3].exp(), x[0] - x[2]);
        let l = (a * b).conj();
        let r = a.conj() * b.conj();
        assert_eq!(l, r);
    }

    #[test]
    fn holomorphic_square_wirtinger() {
        // f = z^2 with z = x0 + i x1: df = 2z, dbar f = 0
        let x = seed_point([0.3, 0.4, 0.0, 0.0]);
        let z = Cx::new(x[0], x[1]);
        let (d, db) = wirtinger(&(z * z), 0);
        assert!((d.re - 0.6).abs() < 1e-15 && (d.im - 0.8).abs() < 1e-15);
        assert!(db.re.abs() < 1e-15 && db.im.abs() < 1e-15);
    }

    #[test]
    fn trig_identity_complex() {
        let z = Cx::<f64>::new(0.4, -0.9);
        let s = z.sin();
        let c = z.cos();
        let one = s * s + c * c;
        assert!((one.re - 1.0).abs() < 1e-14 && one.im.abs() < 1e-14);
    }
}
