//! Forward-mode jets.
//!
//! [`Jet2`] carries a value, gradient and Hessian with respect to the four
//! chart coordinates. [`Tangent`] is a first-order dual that nests over any
//! [`Real`], so `Tangent<Jet2>` gives directional derivatives of a program
//! together with their own second-order jets.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Smallest denominator magnitude accepted by checked division.
pub const DIV_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("division by zero (denominator value {0:e})")]
    DivisionByZero(f64),
    #[error("domain error: {op} of {value:e}")]
    Domain { op: &'static str, value: f64 },
    #[error("singular matrix (|det| = {0:e})")]
    SingularMatrix(f64),
}

/// Scalar ring used by every geometric program.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn cst(v: f64) -> Self;
    /// Order-0 part.
    fn val(&self) -> f64;

    fn recip(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan(self) -> Self;

    /// True when every stored coefficient is exactly zero.
    fn is_exact_zero(&self) -> bool;
    /// True when all derivative parts are exactly zero.
    fn is_constant(&self) -> bool;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }

    fn sq(self) -> Self {
        self * self
    }

    fn powi(self, n: i32) -> Self {
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

    /// Angle of `(x, self)`, evaluated as a base angle plus a small
    /// correction so that every ring gets exact derivatives.
    fn atan2(self, x: Self) -> Self {
        let (y0, x0) = (self.val(), x.val());
        let t = y0.atan2(x0);
        let num = x * (-y0) + self * x0;
        let den = x * x0 + self * y0;
        (num / den).atan() + t
    }

    fn checked_div(self, d: Self) -> Result<Self, NumError> {
        if d.val().abs() < DIV_EPS || !d.val().is_finite() {
            return Err(NumError::DivisionByZero(d.val()));
        }
        Ok(self * d.recip())
    }

    fn checked_recip(self) -> Result<Self, NumError> {
        Self::one().checked_div(self)
    }

    fn checked_sqrt(self) -> Result<Self, NumError> {
        if self.val() <= 0.0 {
            return Err(NumError::Domain { op: "sqrt", value: self.val() });
        }
        Ok(self.sqrt())
    }

    fn checked_ln(self) -> Result<Self, NumError> {
        if self.val() <= 0.0 {
            return Err(NumError::Domain { op: "log", value: self.val() });
        }
        Ok(self.ln())
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn recip(self) -> Self {
        1.0 / self
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
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Value, gradient and Hessian in four variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [[f64; 4]; 4],
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Jet2 { value, grad: [0.0; 4], hess: [[0.0; 4]; 4] }
    }

    pub fn variable(value: f64, axis: usize) -> Self {
        let mut j = Jet2::constant(value);
        j.grad[axis] = 1.0;
        j
    }

    /// `f(self)` given `f`, `f'`, `f''` at the value.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet2::constant(f0);
        for i in 0..4 {
            out.grad[i] = f1 * self.grad[i];
            for j in 0..4 {
                out.hess[i][j] = f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    fn zip(&self, o: &Self, a: f64, b: f64) -> Self {
        let mut out = Jet2::constant(a * self.value + b * o.value);
        for i in 0..4 {
            out.grad[i] = a * self.grad[i] + b * o.grad[i];
            for j in 0..4 {
                out.hess[i][j] = a * self.hess[i][j] + b * o.hess[i][j];
            }
        }
        out
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        self.zip(&o, 1.0, 1.0)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self.zip(&o, 1.0, -1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let (a, b) = (&self, &o);
        let mut out = Jet2::constant(a.value * b.value);
        for i in 0..4 {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
            for j in 0..4 {
                out.hess[i][j] = a.value * b.hess[i][j] + b.value * a.hess[i][j] + a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, c: f64) -> Jet2 {
        self.value += c;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, c: f64) -> Jet2 {
        self.value -= c;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.zip(&self, c, 0.0)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, c: f64) -> Jet2 {
        self * (1.0 / c)
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, o: Jet2) {
        *self = *self + o;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, o: Jet2) {
        *self = *self - o;
    }
}

impl Real for Jet2 {
    fn cst(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn val(&self) -> f64 {
        self.value
    }
    fn is_exact_zero(&self) -> bool {
        self.value == 0.0 && self.is_constant()
    }
    fn is_constant(&self) -> bool {
        self.grad.iter().all(|&g| g == 0.0) && self.hess.iter().flatten().all(|&h| h == 0.0)
    }
    fn recip(self) -> Self {
        let x = self.value;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn atan(self) -> Self {
        let x = self.value;
        let d = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), d, -2.0 * x * d * d)
    }
}

/// First-order dual `v + d·ε` over a base ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent<T> {
    pub v: T,
    pub d: T,
}

impl<T: Real> Tangent<T> {
    pub fn new(v: T, d: T) -> Self {
        Tangent { v, d }
    }
    pub fn constant(v: T) -> Self {
        Tangent { v, d: T::zero() }
    }
}

impl<T: Real> Add for Tangent<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Tangent { v: self.v + o.v, d: self.d + o.d }
    }
}

impl<T: Real> Sub for Tangent<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Tangent { v: self.v - o.v, d: self.d - o.d }
    }
}

impl<T: Real> Mul for Tangent<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Tangent { v: self.v * o.v, d: self.v * o.d + self.d * o.v }
    }
}

impl<T: Real> Div for Tangent<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> Neg for Tangent<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Tangent { v: -self.v, d: -self.d }
    }
}

impl<T: Real> Add<f64> for Tangent<T> {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Tangent { v: self.v + c, d: self.d }
    }
}

impl<T: Real> Sub<f64> for Tangent<T> {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        Tangent { v: self.v - c, d: self.d }
    }
}

impl<T: Real> Mul<f64> for Tangent<T> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Tangent { v: self.v * c, d: self.d * c }
    }
}

impl<T: Real> Div<f64> for Tangent<T> {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self * (1.0 / c)
    }
}

impl<T: Real> AddAssign for Tangent<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Tangent<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Real for Tangent<T> {
    fn cst(v: f64) -> Self {
        Tangent::constant(T::cst(v))
    }
    fn val(&self) -> f64 {
        self.v.val()
    }
    fn is_exact_zero(&self) -> bool {
        self.v.is_exact_zero() && self.d.is_exact_zero()
    }
    fn is_constant(&self) -> bool {
        self.v.is_constant() && self.d.is_exact_zero()
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        Tangent { v: r, d: -(self.d * r * r) }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Tangent { v: s, d: self.d * (s * 2.0).recip() }
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Tangent { v: e, d: self.d * e }
    }
    fn ln(self) -> Self {
        Tangent { v: self.v.ln(), d: self.d * self.v.recip() }
    }
    fn sin(self) -> Self {
        Tangent { v: self.v.sin(), d: self.d * self.v.cos() }
    }
    fn cos(self) -> Self {
        Tangent { v: self.v.cos(), d: -(self.d * self.v.sin()) }
    }
    fn atan(self) -> Self {
        Tangent { v: self.v.atan(), d: self.d * (self.v * self.v + 1.0).recip() }
    }
}

/// Jet of coordinate `axis` at `point`.
pub fn jet_seed(point: [f64; 4], axis: usize) -> Jet2 {
    assert!(axis < 4, "axis must be 0..4");
    Jet2::variable(point[axis], axis)
}

/// All four coordinate jets at `point`.
pub fn seed_point(point: [f64; 4]) -> [Jet2; 4] {
    std::array::from_fn(|a| jet_seed(point, a))
}

/// A scalar field in four variables, evaluable over any ring.
pub trait ScalarProgram {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError>;
}

/// Exact order-2 Taylor data of `f` at `point`.
pub fn jet_apply<F: ScalarProgram + ?Sized>(f: &F, point: [f64; 4]) -> Result<Jet2, NumError> {
    f.eval(&seed_point(point))
}

/// Default central-difference steps.
pub const FD_GRAD_STEP: f64 = 1e-5;
pub const FD_HESS_STEP: f64 = 1e-4;

/// Central-difference gradient and Hessian with a single step.
pub fn fd_oracle<F: ScalarProgram + ?Sized>(f: &F, point: [f64; 4], step: f64) -> Result<([f64; 4], [[f64; 4]; 4]), NumError> {
    Ok((fd_grad(f, point, step)?, fd_hess(f, point, step)?))
}

/// Gradient at step 1e-5, Hessian at step 1e-4.
pub fn fd_default<F: ScalarProgram + ?Sized>(f: &F, point: [f64; 4]) -> Result<([f64; 4], [[f64; 4]; 4]), NumError> {
    Ok((fd_grad(f, point, FD_GRAD_STEP)?, fd_hess(f, point, FD_HESS_STEP)?))
}

fn shifted(point: [f64; 4], moves: &[(usize, f64)]) -> [f64; 4] {
    let mut p = point;
    for &(a, h) in moves {
        p[a] += h;
    }
    p
}

pub fn fd_grad<F: ScalarProgram + ?Sized>(f: &F, point: [f64; 4], h: f64) -> Result<[f64; 4], NumError> {
    let mut g = [0.0; 4];
    for (i, gi) in g.iter_mut().enumerate() {
        let fp = f.eval(&shifted(point, &[(i, h)]))?;
        let fm = f.eval(&shifted(point, &[(i, -h)]))?;
        *gi = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

pub fn fd_hess<F: ScalarProgram + ?Sized>(f: &F, point: [f64; 4], h: f64) -> Result<[[f64; 4]; 4], NumError> {
    let mut out = [[0.0; 4]; 4];
    let f0: f64 = f.eval(&point)?;
    for i in 0..4 {
        let fp = f.eval(&shifted(point, &[(i, h)]))?;
        let fm = f.eval(&shifted(point, &[(i, -h)]))?;
        out[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let pp = f.eval(&shifted(point, &[(i, h), (j, h)]))?;
            let pm = f.eval(&shifted(point, &[(i, h), (j, -h)]))?;
            let mp = f.eval(&shifted(point, &[(i, -h), (j, h)]))?;
            let mm = f.eval(&shifted(point, &[(i, -h), (j, -h)]))?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct SinProd;
    impl ScalarProgram for SinProd {
        fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError> {
            Ok((x[0] * x[1]).sin())
        }
    }

    struct Mix;
    impl ScalarProgram for Mix {
        fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError> {
            let r = (x[0].sq() + x[1].sq() + 1.0).sqrt();
            let a = x[2].atan2(x[3] + 2.0);
            Ok(r.ln() * a.cos() + x[3].exp() / (x[0] + 3.0) + x[1].powi(-2))
        }
    }

    #[test]
    fn seed_and_square() {
        let j = jet_seed([1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(j.value, 3.0);
        assert_eq!(j.grad, [0.0, 0.0, 1.0, 0.0]);
        let s = j * j;
        assert_eq!(s.value, 9.0);
        assert_eq!(s.grad, [0.0, 0.0, 6.0, 0.0]);
        assert_eq!(s.hess[2][2], 2.0);
        assert_eq!(s.hess[0][0], 0.0);
    }

    #[test]
    fn sin_product_matches_differences() {
        let p = [0.7, 0.3, 0.0, 0.0];
        let j = jet_apply(&SinProd, p).unwrap();
        let (g, h) = fd_default(&SinProd, p).unwrap();
        for i in 0..4 {
            assert!((j.grad[i] - g[i]).abs() < 1e-6);
            for k in 0..4 {
                assert!((j.hess[i][k] - h[i][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn mixed_program_matches_differences() {
        let p = [0.4, -0.8, 0.3, 0.2];
        let j = jet_apply(&Mix, p).unwrap();
        let (g, h) = fd_default(&Mix, p).unwrap();
        for i in 0..4 {
            assert!((j.grad[i] - g[i]).abs() < 1e-6, "grad {i}");
            for k in 0..4 {
                assert!((j.hess[i][k] - h[i][k]).abs() < 1e-5, "hess {i}{k}");
            }
        }
    }

    #[test]
    fn oracle_on_monomials() {
        struct Sq;
        impl ScalarProgram for Sq {
            fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError> {
                Ok(x[0] * x[0])
            }
        }
        struct Bil;
        impl ScalarProgram for Bil {
            fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError> {
                Ok(x[0] * x[1])
            }
        }
        let (g, _) = fd_oracle(&Sq, [3.0, 0.0, 0.0, 0.0], 1e-4).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-7);
        let (_, h) = fd_oracle(&Bil, [0.2, 0.5, 0.0, 0.0], 1e-4).unwrap();
        assert!((h[0][1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn constant_program() {
        struct Five;
        impl ScalarProgram for Five {
            fn eval<T: Real>(&self, _x: &[T; 4]) -> Result<T, NumError> {
                Ok(T::cst(5.0))
            }
        }
        let j = jet_apply(&Five, [0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(j, Jet2::constant(5.0));
    }

    #[test]
    fn checked_ops_report_errors() {
        let z = Jet2::constant(0.0);
        assert!(matches!(Jet2::one().checked_div(z), Err(NumError::DivisionByZero(_))));
        assert!(matches!(Jet2::constant(-1.0).checked_sqrt(), Err(NumError::Domain { .. })));
        assert!(matches!(Jet2::constant(0.0).checked_ln(), Err(NumError::Domain { .. })));
        assert!(Jet2::constant(1e-15).checked_recip().is_err());
    }

    #[test]
    fn tangent_over_jet_gives_directional_jets() {
        // d/dx0 of x0^3 * x1 is 3 x0^2 x1; its jet is checked against direct construction.
        let p = [0.5, 2.0, 0.0, 0.0];
        let x = seed_point(p);
        let t0 = Tangent::new(x[0], Jet2::one());
        let t1 = Tangent::constant(x[1]);
        let f = t0.powi(3) * t1;
        let expect = x[0] * x[0] * x[1] * 3.0;
        assert!((f.d.value - expect.value).abs() < 1e-14);
        for i in 0..4 {
            assert!((f.d.grad[i] - expect.grad[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn atan2_all_quadrants() {
        for &(y, x) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-0.5, 0.2)] {
            let jy = Jet2::variable(y, 0);
            let jx = Jet2::variable(x, 1);
            let a = jy.atan2(jx);
            assert!((a.value - f64::atan2(y, x)).abs() < 1e-15);
            let r2 = x * x + y * y;
            assert!((a.grad[0] - x / r2).abs() < 1e-14);
            assert!((a.grad[1] + y / r2).abs() < 1e-14);
        }
    }
}
