//! The space of oriented lines in Euclidean 3-space.
//!
//! Chart `(x0, x1, x2, x3) = (Re ξ, Im ξ, Re η, Im η)`: ξ is the stereographic
//! direction (from the south pole) and η the orthogonal displacement.
//! Conformal chart `(x0, x1, x2, x3) = (Re Z1, Im Z1, Re Z2, Im Z2)`.

use crate::complex::Cx;
use crate::error::{GeomError, Result};
use crate::expr::ChartBinding;
use crate::jet::{seed_point, Real};
use crate::linalg::{self, M4};
use crate::tensor::{AssociatedProgram, Chart, MapFn, MatrixFn, MetricField, ProductProgram, PullbackProgram, Signature, StructureField};

pub const CONFORMAL_FACTOR: &str = "(1+abs2(Z1-Z2)/4)^(-0.5)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    pub xi: Cx<f64>,
    pub eta: Cx<f64>,
}

impl LinePoint {
    pub fn new(xi: (f64, f64), eta: (f64, f64)) -> Self {
        LinePoint { xi: Cx::new(xi.0, xi.1), eta: Cx::new(eta.0, eta.1) }
    }
    pub fn from_chart(x: &[f64; 4]) -> Self {
        LinePoint { xi: Cx::new(x[0], x[1]), eta: Cx::new(x[2], x[3]) }
    }
    pub fn chart(&self) -> [f64; 4] {
        [self.xi.re, self.xi.im, self.eta.re, self.eta.im]
    }
    /// Unit direction of the line.
    pub fn direction(&self) -> [f64; 3] {
        let r2 = self.xi.abs2();
        let s = 1.0 + r2;
        [2.0 * self.xi.re / s, 2.0 * self.xi.im / s, (1.0 - r2) / s]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalPoint {
    pub z1: Cx<f64>,
    pub z2: Cx<f64>,
}

impl ConformalPoint {
    pub fn from_chart(x: &[f64; 4]) -> Self {
        ConformalPoint { z1: Cx::new(x[0], x[1]), z2: Cx::new(x[2], x[3]) }
    }
    /// `(X1, X2, X3, X4)`.
    pub fn chart(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }
}

pub fn line_chart() -> Chart {
    Chart::new("xi-eta", ChartBinding::complex(["xi", "eta"]), |_| true)
}

/// Conformal chart; the inverse transform is defined everywhere on it.
pub fn conformal_chart() -> Chart {
    Chart::new("conformal", ChartBinding::complex(["Z1", "Z2"]), |_| true)
}

/// Components of `4(1+ξξ̄)⁻² Im(dη̄ dξ + 2ξ̄η(1+ξξ̄)⁻¹ dξ dξ̄)`.
#[derive(Debug, Clone, Copy)]
pub struct LineMetric;

impl MatrixFn for LineMetric {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let s = x[0] * x[0] + x[1] * x[1] + 1.0;
        let c = s.recip().sq() * 4.0;
        // Im(2 ξ̄ η / s) = 2 (x0 x3 − x1 x2) / s
        let k = c * (x[0] * x[3] - x[1] * x[2]) * 2.0 / s;
        let h = c * 0.5;
        let z = T::zero();
        Ok([[k, z, z, -h], [z, k, h, z], [z, h, z, z], [-h, z, z, z]])
    }
}

pub fn metric_g() -> MetricField {
    MetricField::new("linespace-G", line_chart(), Signature::NEUTRAL, LineMetric)
}

/// `J0`: multiplication by `i` on `(dξ, dη)`.
#[derive(Debug, Clone, Copy)]
pub struct J0Program;

impl MatrixFn for J0Program {
    fn eval<T: Real>(&self, _x: &[T; 4]) -> Result<M4<T>> {
        let (o, z) = (T::one(), T::zero());
        Ok([[z, -o, z, z], [o, z, z, z], [z, z, z, -o], [z, z, o, z]])
    }
}

/// `J1`: `(dξ, dη) ↦ (dξ, c dξ − dη)` with `c = 4ξ̄η / (1+ξξ̄)`.
#[derive(Debug, Clone, Copy)]
pub struct J1Program;

impl MatrixFn for J1Program {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let s = x[0] * x[0] + x[1] * x[1] + 1.0;
        let f = s.recip() * 4.0;
        let cr = (x[0] * x[2] + x[1] * x[3]) * f;
        let ci = (x[0] * x[3] - x[1] * x[2]) * f;
        let (o, z) = (T::one(), T::zero());
        Ok([[o, z, z, z], [z, o, z, z], [cr, -ci, -o, z], [ci, cr, z, -o]])
    }
}

pub fn structures_j012() -> (StructureField, StructureField, StructureField) {
    let j0 = StructureField::new("J0", line_chart(), -1.0, J0Program);
    let j1 = StructureField::new("J1", line_chart(), 1.0, J1Program);
    let j2 = StructureField::new("J2", line_chart(), -1.0, ProductProgram { a: j0.program(), b: j1.program() });
    (j0, j1, j2)
}

/// `G̃ = G(J2·,·)`.
pub fn metric_g_tilde() -> MetricField {
    let (_, _, j2) = structures_j012();
    MetricField::new("linespace-G-tilde", line_chart(), Signature::NEUTRAL, AssociatedProgram { g: metric_g().program(), j: j2.program() })
}

/// The 2-forms `Ω0 = G(J0·,·)` and `Ω1 = G(J1·,·)` as matrix fields.
pub fn kahler_forms() -> (AssociatedProgram, AssociatedProgram) {
    let (j0, j1, _) = structures_j012();
    let g = metric_g().program();
    (AssociatedProgram { g: g.clone(), j: j0.program() }, AssociatedProgram { g, j: j1.program() })
}

/// `(ξ, η) ↦ (ξ, iη)`.
#[derive(Debug, Clone, Copy)]
pub struct EtaRotation;

impl MapFn for EtaRotation {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<[T; 4]> {
        Ok([x[0], x[1], -x[3], x[2]])
    }
}

/// The point at signed distance `r` from the closest point, generic over the ring.
pub fn phi_t<T: Real>(x: &[T; 4], r: T) -> [T; 3] {
    let xi = Cx::new(x[0], x[1]);
    let eta = Cx::new(x[2], x[3]);
    let s = xi.abs2() + 1.0;
    let inv = s.recip();
    let inv2 = inv * inv;
    let z = (eta - xi * xi * eta.conj()).scale(inv2 * 2.0) + xi.scale(inv * r * 2.0);
    let cross = (xi.conj() * eta).re * 2.0; // ξ̄η + ξη̄
    let x3 = -(cross * inv2 * 2.0) + (T::one() - xi.abs2()) * inv * r;
    [z.re, z.im, x3]
}

pub fn phi(line: &LinePoint, r: f64) -> [f64; 3] {
    phi_t(&line.chart(), r)
}

/// Frame along a line: `e0` real unit direction and the null vectors `e±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFrame {
    pub e0: [f64; 3],
    pub e_plus: [Cx<f64>; 3],
    pub e_minus: [Cx<f64>; 3],
}

/// Frame with `e+ = √2/(1+ξξ̄) (∂z − ξ̄² ∂z̄ − ξ̄ ∂x3)`, `e− = conj(e+)`.
pub fn line_frame(line: &LinePoint) -> LineFrame {
    let xi = line.xi;
    let s = 1.0 + xi.abs2();
    let a = Cx::new(2f64.sqrt() / s, 0.0);
    let b = (xi.conj() * xi.conj()).scalef(-(2f64.sqrt()) / s);
    let c = xi.conj().scalef(-(2f64.sqrt()) / s);
    // ∂z = (∂1 − i∂2)/2, ∂z̄ = (∂1 + i∂2)/2
    let e_plus = [(a + b).scalef(0.5), (a - b).mul_i().scalef(-0.5), c];
    LineFrame { e0: line.direction(), e_plus, e_minus: e_plus.map(|v| v.conj()) }
}

/// Coefficients of a complex 3-vector in the frame `(e0, e+, e−)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameComponents {
    pub c0: Cx<f64>,
    pub c_plus: Cx<f64>,
    pub c_minus: Cx<f64>,
}

fn cdot(a: &[Cx<f64>; 3], b: &[Cx<f64>; 3]) -> Cx<f64> {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl LineFrame {
    /// Decompose `v = c0 e0 + c+ e+ + c− e−` using `e±·e∓ = 1`, `e±·e± = 0`, `e±·e0 = 0`.
    pub fn decompose(&self, v: &[Cx<f64>; 3]) -> FrameComponents {
        let e0 = self.e0.map(|t| Cx::new(t, 0.0));
        let norm = cdot(&self.e_plus, &self.e_minus);
        FrameComponents { c0: cdot(v, &e0), c_plus: cdot(v, &self.e_minus) / norm, c_minus: cdot(v, &self.e_plus) / norm }
    }

    pub fn compose(&self, c: &FrameComponents) -> [Cx<f64>; 3] {
        std::array::from_fn(|k| Cx::new(self.e0[k], 0.0) * c.c0 + self.e_plus[k] * c.c_plus + self.e_minus[k] * c.c_minus)
    }
}

/// `DΦ(∂ξ)` and `DΦ(∂η)` in the frame, from the closed form.
pub fn phi_pushforward(line: &LinePoint, r: f64) -> (FrameComponents, FrameComponents) {
    let xi = line.xi;
    let eta = line.eta;
    let s = 1.0 + xi.abs2();
    let rt2 = 2f64.sqrt();
    let shift = Cx::new(r, 0.0) - (xi.conj() * eta).scalef(2.0 / s);
    let d_xi = FrameComponents { c0: eta.conj().scalef(-2.0 / (s * s)), c_plus: shift.scalef(rt2 / s), c_minus: Cx::zero() };
    let d_eta = FrameComponents { c0: Cx::zero(), c_plus: Cx::new(rt2 / s, 0.0), c_minus: Cx::zero() };
    (d_xi, d_eta)
}

/// `∂Φ/∂ξ` and `∂Φ/∂η` as complex 3-vectors, differentiated with jets.
pub fn phi_pushforward_jets(line: &LinePoint, r: f64) -> ([Cx<f64>; 3], [Cx<f64>; 3]) {
    let x = seed_point(line.chart());
    let y = phi_t(&x, crate::jet::Jet2::constant(r));
    let w = |k: usize| -> [Cx<f64>; 3] {
        // ∂ = (∂_x − i ∂_y) / 2
        std::array::from_fn(|c| Cx::new(0.5 * y[c].grad[2 * k], -0.5 * y[c].grad[2 * k + 1]))
    };
    (w(0), w(1))
}

/// Reflection in the x3-axis: `(ξ, η) ↦ (1/ξ̄, η̄/ξ̄²)`.
pub fn reflect_line(line: &LinePoint) -> Result<LinePoint> {
    if line.xi.abs2() == 0.0 {
        return Err(GeomError::PoleOfChart);
    }
    let xb = line.xi.conj();
    Ok(LinePoint { xi: xb.recip(), eta: line.eta.conj() / (xb * xb) })
}

/// The same line with the opposite orientation: `(ξ, η) ↦ (−1/ξ̄, −η̄/ξ̄²)`.
pub fn reverse_orientation(line: &LinePoint) -> Result<LinePoint> {
    if line.xi.abs2() == 0.0 {
        return Err(GeomError::PoleOfChart);
    }
    let xb = line.xi.conj();
    Ok(LinePoint { xi: -xb.recip(), eta: -line.eta.conj() / (xb * xb) })
}

/// Conformal coordinates over the ring; requires `|ξ| < 1`.
pub fn to_conformal_t<T: Real>(x: &[T; 4]) -> [T; 4] {
    let xi = Cx::new(x[0], x[1]);
    let eta = Cx::new(x[2], x[3]);
    let r2 = xi.abs2();
    let f = (T::one() - r2 * r2).recip() * 2.0;
    let a = eta + xi * xi * eta.conj();
    let b = xi.scale(r2 + 1.0).mul_i();
    let z1 = (a - b).scale(f);
    let z2 = (a + b).scale(f);
    [z1.re, z1.im, z2.re, z2.im]
}

/// Inverse of [`to_conformal_t`] on the `|ξ| < 1` branch.
pub fn from_conformal_t<T: Real>(x: &[T; 4]) -> [T; 4] {
    let z1 = Cx::new(x[0], x[1]);
    let z2 = Cx::new(x[2], x[3]);
    let d = z1 - z2;
    let den = (d.abs2() + 4.0).sqrt() + 2.0;
    let inv = den.recip();
    let xi = d.mul_i().scale(inv);
    let eta = (z1 + z2).scale(inv) + d.scale((z1.abs2() - z2.abs2()) * inv * inv * 0.5);
    [xi.re, xi.im, eta.re, eta.im]
}

pub fn to_conformal(line: &LinePoint) -> Result<ConformalPoint> {
    let m = line.xi.modulus();
    if m >= 1.0 {
        return Err(GeomError::OutsideHemisphere(m));
    }
    Ok(ConformalPoint::from_chart(&to_conformal_t(&line.chart())))
}

pub fn from_conformal(cp: &ConformalPoint) -> LinePoint {
    LinePoint::from_chart(&from_conformal_t(&cp.chart()))
}

#[derive(Debug, Clone, Copy)]
pub struct ToConformal;

impl MapFn for ToConformal {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<[T; 4]> {
        let m = x[0].val().hypot(x[1].val());
        if m >= 1.0 {
            return Err(GeomError::OutsideHemisphere(m));
        }
        Ok(to_conformal_t(x))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FromConformal;

impl MapFn for FromConformal {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<[T; 4]> {
        Ok(from_conformal_t(x))
    }
}

/// `scale · (1 + ¼|Z1−Z2|²)⁻¹ (dX1² + dX2² − dX3² − dX4²)` on the conformal chart.
#[derive(Debug, Clone, Copy)]
pub struct ConformalFlat {
    pub scale: f64,
}

impl MatrixFn for ConformalFlat {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let d2 = (x[0] - x[2]).sq() + (x[1] - x[3]).sq();
        let f = (d2 * 0.25 + 1.0).recip() * self.scale;
        let z = T::zero();
        Ok([[f, z, z, z], [z, f, z, z], [z, z, -f, z], [z, z, z, -f]])
    }
}

/// [`ConformalFlat`] as a metric field.
pub fn conformal_flat_metric(scale: f64) -> MetricField {
    MetricField::new("conformal-flat", conformal_chart(), Signature::NEUTRAL, ConformalFlat { scale })
}

/// `G` expressed in the conformal chart by pulling back through the inverse transform.
pub fn metric_g_conformal() -> MetricField {
    MetricField::new(
        "linespace-G-conformal",
        conformal_chart(),
        Signature::NEUTRAL,
        PullbackProgram { map: FromConformal, target: metric_g() },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlueckerSextet {
    pub p: [f64; 3],
    pub q: [f64; 3],
}

impl PlueckerSextet {
    /// `p · q`, zero for sextets coming from two points.
    pub fn relation(&self) -> f64 {
        self.p[0] * self.q[0] + self.p[1] * self.q[1] + self.p[2] * self.q[2]
    }
}

/// `p = s × t`, `q = s − t`.
pub fn pluecker(s: [f64; 3], t: [f64; 3]) -> Result<PlueckerSextet> {
    let q = [s[0] - t[0], s[1] - t[1], s[2] - t[2]];
    if q.iter().all(|&v| v == 0.0) {
        return Err(GeomError::DegenerateLine);
    }
    let p = [s[1] * t[2] - t[1] * s[2], s[2] * t[0] - t[2] * s[0], s[0] * t[1] - t[0] * s[1]];
    Ok(PlueckerSextet { p, q })
}

/// `X = ((p2+q2)/q3, (−p1−q1)/q3, (p2−q2)/q3, (−p1+q1)/q3)`.
pub fn conformal_from_pluecker(px: &PlueckerSextet) -> Result<[f64; 4]> {
    let (p, q) = (px.p, px.q);
    if q[2] == 0.0 {
        return Err(GeomError::HorizontalLine);
    }
    Ok([(p[1] + q[1]) / q[2], (-p[0] - q[0]) / q[2], (p[1] - q[1]) / q[2], (-p[0] + q[0]) / q[2]])
}

/// The line through `s` and `t`, oriented along `s − t`.
pub fn line_through_points(s: [f64; 3], t: [f64; 3]) -> Result<LinePoint> {
    let q = [s[0] - t[0], s[1] - t[1], s[2] - t[2]];
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
    if n == 0.0 {
        return Err(GeomError::DegenerateLine);
    }
    let d = q.map(|v| v / n);
    if 1.0 + d[2] <= 1e-15 {
        return Err(GeomError::PoleOfChart);
    }
    let xi = Cx::new(d[0] / (1.0 + d[2]), d[1] / (1.0 + d[2]));
    let sd = s[0] * d[0] + s[1] * d[1] + s[2] * d[2];
    let c = [s[0] - sd * d[0], s[1] - sd * d[1], s[2] - sd * d[2]];
    let z = Cx::new(c[0], c[1]);
    let eta = (z - xi.scalef(2.0 * c[2]) - z.conj() * xi * xi).scalef(0.5);
    Ok(LinePoint { xi, eta })
}

/// The ultrahyperbolic conformal factor `(1 + ¼|Z1−Z2|²)^(−1/2)` over the ring.
pub fn conformal_factor_t<T: Real>(x: &[T; 4]) -> T {
    let d2 = (x[0] - x[2]).sq() + (x[1] - x[3]).sq();
    (d2 * 0.25 + 1.0).sqrt().recip()
}

/// Max residual of `g(j·,j·) − sign·g` at a point.
pub fn isometry_residual(g: &M4<f64>, j: &M4<f64>, sign: f64) -> f64 {
    let gj = linalg::matmul(&linalg::matmul(&linalg::transpose(j), g), j);
    linalg::max_abs_diff(&gj, &linalg::scale(g, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{fd_default, jet_apply, NumError, ScalarProgram};
    use crate::sampling;
    use crate::tensor::pullback_metric;

    #[test]
    fn metric_at_origin_is_off_diagonal() {
        let g = metric_g().at(&[0.0, 0.0, 0.3, -0.2]).unwrap();
        // 4 Im(dη̄ dξ) = 4 (v1 v2 − v0 v3)
        assert_eq!(g[1][2], 2.0);
        assert_eq!(g[0][3], -2.0);
        assert_eq!(g[0][0], 0.0);
        assert_eq!(g[2][2], 0.0);
    }

    #[test]
    fn structures_square_and_commute() {
        let (j0, j1, j2) = structures_j012();
        for p in sampling::line_points(&mut sampling::rng(3), 10, 2.0, 2.0) {
            assert!(j0.square_residual(&p).unwrap() < 1e-12);
            assert!(j1.square_residual(&p).unwrap() < 1e-12);
            assert!(j2.square_residual(&p).unwrap() < 1e-12);
            let (a, b) = (j0.at(&p).unwrap(), j1.at(&p).unwrap());
            let comm = linalg::sub(&linalg::matmul(&a, &b), &linalg::matmul(&b, &a));
            assert!(linalg::max_abs(&comm) < 1e-12);
        }
    }

    #[test]
    fn j1_at_zero_displacement_is_block_diagonal() {
        let (_, j1, _) = structures_j012();
        let m = j1.at(&[0.4, -0.3, 0.0, 0.0]).unwrap();
        assert_eq!(m, linalg::diag::<f64>([1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn phi_examples() {
        let axis = phi(&LinePoint::new((0.0, 0.0), (0.0, 0.0)), 2.5);
        assert_eq!(axis, [0.0, 0.0, 2.5]);
        let eq = phi(&LinePoint::new((1.0, 0.0), (0.0, 0.0)), 0.0);
        assert_eq!(eq, [0.0, 0.0, 0.0]);
        let l = LinePoint::new((0.3, -0.2), (0.5, 0.1));
        let (a, b) = (phi(&l, 0.4), phi(&l, 1.9));
        let d = l.direction();
        let diff = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        for k in 0..3 {
            assert!((diff[k] - 1.5 * d[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn pushforward_closed_form_matches_jets() {
        for p in sampling::line_points(&mut sampling::rng(11), 10, 1.5, 1.5) {
            let l = LinePoint::from_chart(&p);
            let f = line_frame(&l);
            let (cxi, ceta) = phi_pushforward(&l, 0.7);
            let (nxi, neta) = phi_pushforward_jets(&l, 0.7);
            let (a, b) = (f.compose(&cxi), f.compose(&ceta));
            for k in 0..3 {
                assert!((a[k] - nxi[k]).modulus() < 1e-12);
                assert!((b[k] - neta[k]).modulus() < 1e-12);
            }
            assert_eq!(ceta.c0, Cx::zero());
        }
        let (_, d_eta) = phi_pushforward(&LinePoint::new((0.0, 0.0), (0.2, 0.1)), 1.0);
        assert!((d_eta.c_plus.re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frame_is_null_and_orthogonal() {
        let f = line_frame(&LinePoint::new((0.6, -0.8), (0.0, 0.0)));
        let e0 = f.e0.map(|v| Cx::new(v, 0.0));
        assert!(cdot(&f.e_plus, &f.e_plus).modulus() < 1e-15);
        assert!(cdot(&f.e_plus, &e0).modulus() < 1e-15);
        assert!((cdot(&f.e_plus, &f.e_minus).re - 1.0).abs() < 1e-15);
        assert!((f.e0.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_behaviour() {
        let l = LinePoint::new((0.5, 0.0), (0.2, 0.1));
        let r = reflect_line(&l).unwrap();
        assert!((r.xi - Cx::new(2.0, 0.0)).modulus() < 1e-15);
        assert!((r.eta - Cx::new(0.8, -0.4)).modulus() < 1e-15);
        let back = reflect_line(&r).unwrap();
        assert!((back.xi - l.xi).modulus() < 1e-15 && (back.eta - l.eta).modulus() < 1e-15);
        assert!(matches!(reflect_line(&LinePoint::new((0.0, 0.0), (1.0, 0.0))), Err(GeomError::PoleOfChart)));
        for t in [-1.0, 0.3, 2.0] {
            let a = phi(&l, t);
            let b = phi(&r, -t);
            assert!((b[0] + a[0]).abs() < 1e-14 && (b[1] + a[1]).abs() < 1e-14 && (b[2] - a[2]).abs() < 1e-14);
        }
    }

    #[test]
    fn conformal_roundtrip_and_origin() {
        let o = to_conformal(&LinePoint::new((0.0, 0.0), (0.0, 0.0))).unwrap();
        assert_eq!(o.chart(), [0.0; 4]);
        for p in sampling::line_points(&mut sampling::rng(5), 100, 0.9, 2.0) {
            let l = LinePoint::from_chart(&p);
            let back = from_conformal(&to_conformal(&l).unwrap());
            assert!((back.xi - l.xi).modulus() < 1e-10 && (back.eta - l.eta).modulus() < 1e-10);
        }
        assert!(matches!(to_conformal(&LinePoint::new((1.2, 0.0), (0.0, 0.0))), Err(GeomError::OutsideHemisphere(_))));
    }

    #[test]
    fn reflection_is_point_reflection_in_conformal_chart() {
        let l = LinePoint::new((0.3, 0.2), (0.4, -0.7));
        let flipped = reverse_orientation(&reflect_line(&l).unwrap()).unwrap();
        let a = to_conformal(&l).unwrap().chart();
        let b = to_conformal(&flipped).unwrap().chart();
        for k in 0..4 {
            assert!((a[k] + b[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn pluecker_routes_agree() {
        let axis = pluecker([0.0, 0.0, 0.0], [0.0, 0.0, -1.0]).unwrap();
        assert_eq!(axis.p, [0.0, 0.0, 0.0]);
        assert_eq!(conformal_from_pluecker(&axis).unwrap(), [0.0; 4]);
        let mut rng = sampling::rng(9);
        let mut done = 0;
        while done < 50 {
            let pts = sampling::box_points(&mut rng, 2, -2.0, 2.0);
            let (s, t) = ([pts[0][0], pts[0][1], pts[0][2]], [pts[1][0], pts[1][1], pts[1][2]]);
            if s[2] - t[2] < 0.2 {
                continue;
            }
            let px = pluecker(s, t).unwrap();
            assert!(px.relation().abs() < 1e-12);
            let x1 = conformal_from_pluecker(&px).unwrap();
            let x2 = to_conformal(&line_through_points(s, t).unwrap()).unwrap().chart();
            for k in 0..4 {
                assert!((x1[k] - x2[k]).abs() < 1e-9);
            }
            let scaled = PlueckerSextet { p: px.p.map(|v| 2.5 * v), q: px.q.map(|v| 2.5 * v) };
            let x3 = conformal_from_pluecker(&scaled).unwrap();
            assert!((0..4).all(|k| (x3[k] - x1[k]).abs() < 1e-14));
            done += 1;
        }
        assert!(matches!(pluecker([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]), Err(GeomError::DegenerateLine)));
        let flat = pluecker([0.0, 0.0, 1.0], [1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(conformal_from_pluecker(&flat), Err(GeomError::HorizontalLine)));
    }

    #[test]
    fn conformal_pullback_is_four_times_g() {
        let flat = conformal_flat_metric(1.0);
        let g = metric_g();
        for p in sampling::line_points(&mut sampling::rng(2), 10, 0.85, 1.5) {
            let pb = pullback_metric(&ToConformal, &flat, &p).unwrap();
            let gp = g.at(&p).unwrap();
            assert!(linalg::max_abs_diff(&pb, &linalg::scale(&gp, 4.0)) < 1e-9);
            let quarter = pullback_metric(&ToConformal, &conformal_flat_metric(0.25), &p).unwrap();
            assert!(linalg::max_abs_diff(&quarter, &gp) < 1e-9);
        }
    }

    #[test]
    fn eta_rotation_pulls_tilde_back_to_g() {
        let gt = metric_g_tilde();
        let g = metric_g();
        for p in sampling::line_points(&mut sampling::rng(4), 10, 2.0, 2.0) {
            let pb = pullback_metric(&EtaRotation, &gt, &p).unwrap();
            assert!(linalg::max_abs_diff(&pb, &g.at(&p).unwrap()) < 1e-10);
        }
    }

    struct Factor;
    impl ScalarProgram for Factor {
        fn eval<T: Real>(&self, x: &[T; 4]) -> std::result::Result<T, NumError> {
            Ok(conformal_factor_t(x))
        }
    }

    #[test]
    fn conformal_factor_jets() {
        let p = [0.3, 0.1, -0.2, 0.4];
        let j = jet_apply(&Factor, p).unwrap();
        let d2: f64 = 0.25 + 0.09;
        assert!((j.value - (1.0 + d2 / 4.0).powf(-0.5)).abs() < 1e-14);
        let (_, h) = fd_default(&Factor, p).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!((h[a][b] - j.hess[a][b]).abs() < 1e-5);
            }
        }
    }
}
