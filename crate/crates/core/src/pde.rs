//! Parallel-structure systems on conformally flat neutral charts.
//!
//! Chart `(Z1, Z2)` with `Z1 = x0 + i x1`, `Z2 = x2 + i x3` and
//! `g = Ω²(dZ1 dZ̄1 − dZ2 dZ̄2)`. Wirtinger derivatives are `∂k`, `∂̄k`.

use serde::Serialize;

use crate::complex::Cx;
use crate::error::{GeomError, Result};
use crate::expr::{ChartBinding, ExprField};
use crate::jet::{seed_point, Jet2, Real};
use crate::linalg::{self, M4};
use crate::structures::parallel_residual;
use crate::tensor::{Chart, MatrixFn, MetricField, Signature, StructureField};

pub const OMEGA_MIN: f64 = 1e-8;
pub const DELTA_MIN: f64 = 1e-8;
pub const TRANSVERSE_MIN: f64 = 1e-8;
pub const POLAR_MIN: f64 = 1e-8;

/// Source of the line-space conformal factor.
pub const LINE_SPACE_OMEGA: &str = "(1 + abs2(Z1 - Z2)/4)^(-0.5)";

fn binding() -> ChartBinding {
    ChartBinding::complex(["Z1", "Z2"])
}

pub fn conformal_chart() -> Chart {
    Chart::new("(Z1,Z2)", binding(), |_| true)
}

/// First Wirtinger derivatives of a complex function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wirtinger {
    pub value: Cx<f64>,
    pub d1: Cx<f64>,
    pub d1b: Cx<f64>,
    pub d2: Cx<f64>,
    pub d2b: Cx<f64>,
}

fn wirtinger(z: Cx<Jet2>) -> Wirtinger {
    let part = |k: usize| Cx::new(z.re.grad[k], z.im.grad[k]);
    let d = |a: usize, b: usize, s: f64| (part(a) + part(b).mul_i().scalef(s)).scalef(0.5);
    Wirtinger { value: Cx::new(z.re.value, z.im.value), d1: d(0, 1, -1.0), d1b: d(0, 1, 1.0), d2: d(2, 3, -1.0), d2b: d(2, 3, 1.0) }
}

/// A complex scalar field given by an expression in `Z1`, `Z2`.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub src: String,
    field: ExprField,
}

impl ComplexField {
    pub fn new(src: &str) -> Result<Self> {
        Ok(ComplexField { src: src.to_string(), field: ExprField::new(src, binding())? })
    }

    pub fn eval<T: Real>(&self, x: &[T; 4]) -> Result<Cx<T>> {
        Ok(self.field.eval_complex(x)?)
    }

    pub fn wirtinger(&self, p: &[f64; 4]) -> Result<Wirtinger> {
        Ok(wirtinger(self.eval(&seed_point(*p))?))
    }

    /// `v0 + Σ c·(Z − z) + c̄-terms`: the affine field with prescribed value and derivatives at `p`.
    pub fn affine(p: &[f64; 4], w: &Wirtinger) -> Result<Self> {
        let c = |z: Cx<f64>| format!("({:?} + {:?}*i())", z.re, z.im);
        let z1 = c(Cx::new(p[0], p[1]));
        let z2 = c(Cx::new(p[2], p[3]));
        let src = format!(
            "{} + {}*(Z1 - {z1}) + {}*conj(Z1 - {z1}) + {}*(Z2 - {z2}) + {}*conj(Z2 - {z2})",
            c(w.value),
            c(w.d1),
            c(w.d1b),
            c(w.d2),
            c(w.d2b)
        );
        Self::new(&src)
    }
}

/// The real, nonvanishing conformal factor `Ω`.
#[derive(Debug, Clone)]
pub struct ConformalFactor(pub ComplexField);

/// `Ω`, its Wirtinger derivatives, and `∂1∂̄1 Ω`, `∂2∂̄2 Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorJet {
    pub value: f64,
    pub d1: Cx<f64>,
    pub d1b: Cx<f64>,
    pub d2: Cx<f64>,
    pub d2b: Cx<f64>,
    pub d11b: f64,
    pub d22b: f64,
}

impl ConformalFactor {
    pub fn new(src: &str) -> Result<Self> {
        Ok(ConformalFactor(ComplexField::new(src)?))
    }

    pub fn line_space() -> Self {
        Self::new(LINE_SPACE_OMEGA).expect("built-in factor parses")
    }

    pub fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T> {
        let v = self.0.field.eval_real(x)?;
        if v.val().abs() <= OMEGA_MIN {
            return Err(GeomError::SingularMetric(v.val().abs()));
        }
        Ok(v)
    }

    pub fn jet(&self, p: &[f64; 4]) -> Result<FactorJet> {
        let o = self.eval(&seed_point(*p))?;
        let w = wirtinger(Cx::real(o));
        let h = o.hess;
        Ok(FactorJet {
            value: o.value,
            d1: w.d1,
            d1b: w.d1b,
            d2: w.d2,
            d2b: w.d2b,
            d11b: 0.25 * (h[0][0] + h[1][1]),
            d22b: 0.25 * (h[2][2] + h[3][3]),
        })
    }
}

#[derive(Debug, Clone)]
struct ConformalMetric(ConformalFactor);

impl MatrixFn for ConformalMetric {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let o = self.0.eval(x)?;
        let o2 = o * o;
        let z = T::zero();
        Ok([[o2, z, z, z], [z, o2, z, z], [z, z, -o2, z], [z, z, z, -o2]])
    }
}

/// `Ω²(dZ1 dZ̄1 − dZ2 dZ̄2)`.
pub fn conformal_metric(omega: &ConformalFactor) -> MetricField {
    MetricField::new(&format!("Ω = {}", omega.0.src), conformal_chart(), Signature::NEUTRAL, ConformalMetric(omega.clone()))
}

/// `|(∂1∂̄1 − ∂2∂̄2) Ω|`.
pub fn ultrahyperbolic_residual(omega: &ConformalFactor, p: &[f64; 4]) -> Result<f64> {
    let j = omega.jet(p)?;
    Ok((j.d11b - j.d22b).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationResidual {
    pub label: &'static str,
    pub modulus: f64,
}

/// Per-equation moduli of `lhs − rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemResidual {
    pub equations: Vec<EquationResidual>,
    pub max: f64,
}

impl SystemResidual {
    fn from_pairs(rows: Vec<(&'static str, Cx<f64>)>) -> Self {
        let equations: Vec<_> = rows.into_iter().map(|(label, r)| EquationResidual { label, modulus: r.abs2().sqrt() }).collect();
        let max = equations.iter().map(|e| e.modulus).fold(0.0, f64::max);
        SystemResidual { equations, max }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.equations.iter().map(|e| e.modulus).collect()
    }
}

/// Real matrix of the structure with `+1` eigenvectors `v, v̄` and `−1` eigenvectors `w, w̄`.
/// Vectors are given in the real coordinate basis with complex coefficients.
fn structure_from_eigenvectors<T: Real>(v: [Cx<T>; 4], w: [Cx<T>; 4]) -> Result<M4<T>> {
    let b: M4<T> = std::array::from_fn(|i| [v[i].re, v[i].im, w[i].re, w[i].im]);
    let binv = linalg::inverse(&b)?;
    let d = linalg::matmul(&b, &linalg::diag([1.0, 1.0, -1.0, -1.0]));
    Ok(linalg::matmul(&d, &binv))
}

/// `a ∂Z1 + b ∂Z2 + c ∂Z̄2` in the real basis.
fn vector<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>) -> [Cx<T>; 4] {
    let h = 0.5;
    [a.scalef(h), a.mul_i().scalef(-h), (b + c).scalef(h), (c - b).mul_i().scalef(h)]
}

/// The two families of totally null planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NullFamily {
    /// spanned by `∂Z1 + e^{iφ} ∂Z2`
    Alpha,
    /// spanned by `∂Z1 + e^{iφ} ∂Z̄2`
    Beta,
}

/// An anti-isometric structure from two angle fields.
#[derive(Debug, Clone)]
pub struct AntiData {
    pub family: NullFamily,
    pub phi1: ComplexField,
    pub phi2: ComplexField,
}

impl AntiData {
    pub fn new(family: NullFamily, phi1: &str, phi2: &str) -> Result<Self> {
        Ok(AntiData { family, phi1: ComplexField::new(phi1)?, phi2: ComplexField::new(phi2)? })
    }

    fn angles<T: Real>(&self, x: &[T; 4]) -> Result<(T, T)> {
        let (a, b) = (self.phi1.eval(x)?, self.phi2.eval(x)?);
        let gap = (Cx::<f64>::expi(a.re.val()) - Cx::expi(b.re.val())).abs2().sqrt();
        if gap <= TRANSVERSE_MIN {
            return Err(GeomError::CoincidentPlanes);
        }
        Ok((a.re, b.re))
    }
}

impl MatrixFn for AntiData {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let (p1, p2) = self.angles(x)?;
        let one = Cx::<T>::one();
        let z = Cx::<T>::zero();
        let mk = |p: T| match self.family {
            NullFamily::Alpha => vector(one, Cx::expi(p), z),
            NullFamily::Beta => vector(one, z, Cx::expi(p)),
        };
        structure_from_eigenvectors(mk(p1), mk(p2))
    }
}

pub fn anti_structure(data: &AntiData) -> StructureField {
    let name = format!("{:?}(φ1 = {}, φ2 = {})", data.family, data.phi1.src, data.phi2.src);
    StructureField::new(&name, conformal_chart(), 1.0, data.clone())
}

/// Residuals of `∂1(Ω e^{−iφ}) = −∂2 Ω`, `∂̄2(Ω e^{−iφ}) = −∂̄1 Ω` (alpha) or
/// `∂1(Ω e^{−iφ}) = −∂̄2 Ω`, `∂2(Ω e^{−iφ}) = −∂̄1 Ω` (beta), for both angles.
pub fn anti_parallel_residual(omega: &ConformalFactor, data: &AntiData, p: &[f64; 4]) -> Result<SystemResidual> {
    data.angles(p)?;
    let o = omega.jet(p)?;
    let mut rows = Vec::with_capacity(4);
    for (k, phi) in [&data.phi1, &data.phi2].into_iter().enumerate() {
        let f = phi.wirtinger(p)?;
        let e = Cx::<f64>::expi(-f.value.re);
        // ∂(Ω e^{−iφ}) = e^{−iφ}(∂Ω − iΩ ∂φ)
        let d = |dom: Cx<f64>, dphi: Cx<f64>| e * (dom - dphi.mul_i().scalef(o.value));
        let (l1, l2) = (
            if k == 0 { "first angle, d1" } else { "second angle, d1" },
            if k == 0 { "first angle, second" } else { "second angle, second" },
        );
        match data.family {
            NullFamily::Alpha => {
                rows.push((l1, d(o.d1, f.d1) + o.d2));
                rows.push((l2, d(o.d2b, f.d2b) + o.d1b));
            }
            NullFamily::Beta => {
                rows.push((l1, d(o.d1, f.d1) + o.d2b));
                rows.push((l2, d(o.d2, f.d2) + o.d1b));
            }
        }
    }
    Ok(SystemResidual::from_pairs(rows))
}

pub fn alpha_parallel_residual(omega: &ConformalFactor, phi1: &str, phi2: &str, p: &[f64; 4]) -> Result<SystemResidual> {
    anti_parallel_residual(omega, &AntiData::new(NullFamily::Alpha, phi1, phi2)?, p)
}

pub fn beta_parallel_residual(omega: &ConformalFactor, phi1: &str, phi2: &str, p: &[f64; 4]) -> Result<SystemResidual> {
    anti_parallel_residual(omega, &AntiData::new(NullFamily::Beta, phi1, phi2)?, p)
}

/// Angle data whose derivatives at `p` solve the anti-isometric system there.
pub fn first_order_anti(omega: &ConformalFactor, family: NullFamily, phi1: f64, phi2: f64, p: &[f64; 4]) -> Result<AntiData> {
    let o = omega.jet(p)?;
    let solve = |phi: f64| -> Result<ComplexField> {
        let e = Cx::<f64>::expi(phi);
        let inv = Cx::new(0.0, -1.0 / o.value);
        let (d1, d2) = match family {
            NullFamily::Alpha => {
                let d1 = (o.d1 + e * o.d2) * inv;
                let d2b = (o.d2b + e * o.d1b) * inv;
                (d1, d2b.conj())
            }
            NullFamily::Beta => ((o.d1 + e * o.d2b) * inv, (o.d2 + e * o.d1b) * inv),
        };
        let w = Wirtinger { value: Cx::real(phi), d1, d1b: d1.conj(), d2, d2b: d2.conj() };
        ComplexField::affine(p, &w)
    };
    let wrap = |f: ComplexField| ComplexField::new(&format!("re({})", f.src));
    Ok(AntiData { family, phi1: wrap(solve(phi1)?)?, phi2: wrap(solve(phi2)?)? })
}

/// Isometric data: `P = span(∂Z1 + α ∂Z2 + β̄ ∂Z̄2)`.
#[derive(Debug, Clone)]
pub struct IsometricData {
    pub alpha: ComplexField,
    pub beta: ComplexField,
}

/// `Δ1 = |α|² − |β|²`, `Δ2 = |α|²(1 − Δ1⁻¹)² − |β|²(1 + Δ1⁻¹)²`.
pub fn deltas(alpha: Cx<f64>, beta: Cx<f64>) -> (f64, f64) {
    let (aa, bb) = (alpha.abs2(), beta.abs2());
    let d1 = aa - bb;
    let r = 1.0 / d1;
    (d1, aa * (1.0 - r).powi(2) - bb * (1.0 + r).powi(2))
}

impl IsometricData {
    pub fn new(alpha: &str, beta: &str) -> Result<Self> {
        Ok(IsometricData { alpha: ComplexField::new(alpha)?, beta: ComplexField::new(beta)? })
    }

    /// From polar data `α = a e^{iθ}`, `β = b e^{iφ}`.
    pub fn from_polar(d: &PolarData) -> Result<Self> {
        Self::new(&format!("({})*exp(i()*({}))", d.a.src, d.theta.src), &format!("({})*exp(i()*({}))", d.b.src, d.phi.src))
    }

    fn check(&self, p: &[f64; 4]) -> Result<(f64, f64)> {
        let (a, b) = (self.alpha.eval(p)?, self.beta.eval(p)?);
        let (d1, d2) = deltas(a, b);
        if d1.abs() <= DELTA_MIN || d2.abs() <= DELTA_MIN {
            return Err(GeomError::DegenerateStructure(format!("Δ1 = {d1:e}, Δ2 = {d2:e}")));
        }
        Ok((d1, d2))
    }
}

impl MatrixFn for IsometricData {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let (a, b) = (self.alpha.eval(x)?, self.beta.eval(x)?);
        let d1 = a.abs2() - b.abs2();
        if d1.val().abs() <= DELTA_MIN {
            return Err(GeomError::DegenerateStructure(format!("Δ1 = {:e}", d1.val())));
        }
        let r = d1.checked_recip()?;
        let one = Cx::<T>::one();
        let v = vector(one, a, b.conj());
        let w = vector(one, a.scale(r), -b.conj().scale(r));
        structure_from_eigenvectors(v, w)
    }
}

pub fn isometric_structure(data: &IsometricData) -> StructureField {
    let name = format!("J(α = {}, β = {})", data.alpha.src, data.beta.src);
    StructureField::new(&name, conformal_chart(), 1.0, data.clone())
}

const ISO_LABELS: [&str; 8] =
    ["d1 alpha", "d1 conj(alpha)", "d2 alpha", "d2 conj(alpha)", "d1 beta", "d1 conj(beta)", "d2 beta", "d2 conj(beta)"];

/// Derivatives of `α` and `β` at `p` forced by the isometric system.
fn isometric_solution(o: &FactorJet, al: Cx<f64>, be: Cx<f64>) -> (Wirtinger, Wirtinger) {
    let (ab, bb) = (al.conj(), be.conj());
    let r = |z: Cx<f64>| z.scalef(1.0 / o.value);
    let (aa, bbb) = (Cx::real(al.abs2()), Cx::real(be.abs2()));
    let one = Cx::<f64>::one();
    let a1 = r(al * o.d1 + al * (al * o.d2 + bb * o.d2b));
    let a1bar = r((bbb - one) * o.d2 + ab * bb * o.d2b - ab * o.d1);
    let a2 = r((bbb - one) * o.d1 + al * bb * o.d1b - al * o.d2);
    let a2bar = r(ab * o.d2 + ab * (ab * o.d1 + bb * o.d1b));
    let b1 = r(al * be * o.d2 + (aa - one) * o.d2b - be * o.d1);
    let b1bar = r(bb * o.d1 + bb * (al * o.d2 + bb * o.d2b));
    let b2 = r(ab * be * o.d1 + (aa - one) * o.d1b - be * o.d2);
    let b2bar = r(bb * o.d2 + bb * (ab * o.d1 + bb * o.d1b));
    (
        Wirtinger { value: al, d1: a1, d1b: a1bar.conj(), d2: a2, d2b: a2bar.conj() },
        Wirtinger { value: be, d1: b1, d1b: b1bar.conj(), d2: b2, d2b: b2bar.conj() },
    )
}

/// Moduli of the eight first-order equations for `(α, β)`.
pub fn isometric_parallel_residual(omega: &ConformalFactor, data: &IsometricData, p: &[f64; 4]) -> Result<SystemResidual> {
    data.check(p)?;
    let o = omega.jet(p)?;
    let (a, b) = (data.alpha.wirtinger(p)?, data.beta.wirtinger(p)?);
    let (sa, sb) = isometric_solution(&o, a.value, b.value);
    let om = o.value;
    // each equation is Ω(∂f − ∂f*) = 0 once solved for the derivative
    let rows = vec![
        (a.d1, sa.d1),
        (a.d1b.conj(), sa.d1b.conj()),
        (a.d2, sa.d2),
        (a.d2b.conj(), sa.d2b.conj()),
        (b.d1, sb.d1),
        (b.d1b.conj(), sb.d1b.conj()),
        (b.d2, sb.d2),
        (b.d2b.conj(), sb.d2b.conj()),
    ];
    Ok(SystemResidual::from_pairs(rows.into_iter().zip(ISO_LABELS).map(|((x, y), l)| (l, (x - y).scalef(om))).collect()))
}

/// Affine `(α, β)` whose derivatives at `p` solve the isometric system there.
pub fn first_order_isometric(omega: &ConformalFactor, alpha: Cx<f64>, beta: Cx<f64>, p: &[f64; 4]) -> Result<IsometricData> {
    let o = omega.jet(p)?;
    let (a, b) = isometric_solution(&o, alpha, beta);
    let d = IsometricData { alpha: ComplexField::affine(p, &a)?, beta: ComplexField::affine(p, &b)? };
    d.check(p)?;
    Ok(d)
}

/// `α = a e^{iθ}`, `β = b e^{iφ}` with real `a, b, θ, φ`.
#[derive(Debug, Clone)]
pub struct PolarData {
    pub a: ComplexField,
    pub b: ComplexField,
    pub theta: ComplexField,
    pub phi: ComplexField,
}

impl PolarData {
    pub fn new(a: &str, b: &str, theta: &str, phi: &str) -> Result<Self> {
        Ok(PolarData { a: ComplexField::new(a)?, b: ComplexField::new(b)?, theta: ComplexField::new(theta)?, phi: ComplexField::new(phi)? })
    }
}

/// Which form of the last angle equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolarForm {
    /// `2biΩ ∂2φ = (a² − b² − 1) e^{−iφ} ∂̄1Ω − 2b ∂2Ω`, equivalent to the complex system
    Corrected,
    /// the same with `(a² − b² + 1)`
    Printed,
}

const POLAR_LABELS: [&str; 8] = ["d1 a", "d1 b", "d2 a", "d2 b", "d1 theta", "d1 phi", "d2 theta", "d2 phi"];

/// Moduli of the eight polar-form equations.
pub fn polar_parallel_residual(omega: &ConformalFactor, data: &PolarData, p: &[f64; 4], form: PolarForm) -> Result<SystemResidual> {
    let o = omega.jet(p)?;
    let (a, b, t, f) = (data.a.wirtinger(p)?, data.b.wirtinger(p)?, data.theta.wirtinger(p)?, data.phi.wirtinger(p)?);
    let (av, bv) = (a.value.re, b.value.re);
    if av <= POLAR_MIN || bv <= POLAR_MIN {
        return Err(GeomError::PolarDegeneracy);
    }
    let (et, ef) = (Cx::<f64>::expi(t.value.re), Cx::<f64>::expi(f.value.re));
    let (emt, emf) = (et.conj(), ef.conj());
    let om = o.value;
    let c = |x: f64| Cx::<f64>::real(x);
    let s = c(av * av + bv * bv - 1.0);
    let ab2 = c(2.0 * av * bv);
    let last = match form {
        PolarForm::Corrected => c(av * av - bv * bv - 1.0),
        PolarForm::Printed => c(av * av - bv * bv + 1.0),
    };
    let two_i = |x: f64, d: Cx<f64>| d.mul_i().scalef(2.0 * x * om);
    let rows = vec![
        a.d1.scalef(2.0 * om) - (s * et * o.d2 + ab2 * emf * o.d2b),
        b.d1.scalef(2.0 * om) - (ab2 * et * o.d2 + s * emf * o.d2b),
        a.d2.scalef(2.0 * om) - (s * emt * o.d1 + ab2 * emf * o.d1b),
        b.d2.scalef(2.0 * om) - (ab2 * emt * o.d1 + s * emf * o.d1b),
        two_i(av, t.d1) - (o.d1.scalef(2.0 * av) + c(av * av - bv * bv + 1.0) * et * o.d2),
        two_i(bv, f.d1) - (o.d1.scalef(-2.0 * bv) + c(av * av - bv * bv - 1.0) * emf * o.d2b),
        two_i(av, t.d2) - (-(c(av * av - bv * bv + 1.0) * emt * o.d1) - o.d2.scalef(2.0 * av)),
        two_i(bv, f.d2) - (last * emf * o.d1b - o.d2.scalef(2.0 * bv)),
    ];
    Ok(SystemResidual::from_pairs(POLAR_LABELS.into_iter().zip(rows).collect()))
}

/// Both routes to "j is parallel" at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteComparison {
    pub system: SystemResidual,
    pub covariant: f64,
}

impl RouteComparison {
    /// Both small or both large.
    pub fn agree(&self, tol: f64) -> bool {
        (self.system.max < tol) == (self.covariant < tol)
    }
}

pub fn isometric_routes(omega: &ConformalFactor, data: &IsometricData, p: &[f64; 4]) -> Result<RouteComparison> {
    let system = isometric_parallel_residual(omega, data, p)?;
    let covariant = parallel_residual(&conformal_metric(omega), &isometric_structure(data), &[*p])?;
    Ok(RouteComparison { system, covariant })
}

pub fn anti_routes(omega: &ConformalFactor, data: &AntiData, p: &[f64; 4]) -> Result<RouteComparison> {
    let system = anti_parallel_residual(omega, data, p)?;
    let covariant = parallel_residual(&conformal_metric(omega), &anti_structure(data), &[*p])?;
    Ok(RouteComparison { system, covariant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::structures::{classify, StructureKind};
    use crate::tensor::curvature;

    fn pts(seed: u64, n: usize) -> Vec<[f64; 4]> {
        sampling::box_points(&mut sampling::rng(seed), n, -0.8, 0.8)
    }

    #[test]
    fn ultrahyperbolic_examples() {
        let one = ConformalFactor::new("1").unwrap();
        assert_eq!(ultrahyperbolic_residual(&one, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 0.0);
        let ls = ConformalFactor::line_space();
        for p in pts(1, 50) {
            assert!(ultrahyperbolic_residual(&ls, &p).unwrap() < 1e-10);
        }
        let q = ConformalFactor::new("1 + abs2(Z1)").unwrap();
        for p in pts(2, 5) {
            assert!((ultrahyperbolic_residual(&q, &p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_curvature_is_the_ultrahyperbolic_operator() {
        // S = −6 Ω⁻³ □Ω with □ = 4(∂1∂̄1 − ∂2∂̄2)
        for src in ["1 + abs2(Z1)", "exp(re(Z1*Z2)/3)", LINE_SPACE_OMEGA, "2 + sin(re(Z1)) + im(Z2)^2/4"] {
            let om = ConformalFactor::new(src).unwrap();
            let g = conformal_metric(&om);
            for p in pts(3, 3) {
                let j = om.jet(&p).unwrap();
                let s = curvature(&g, &p).unwrap().scalar;
                let want = -24.0 * (j.d11b - j.d22b) / j.value.powi(3);
                assert!((s - want).abs() < 1e-9 * (1.0 + want.abs()), "{src}: {s} vs {want}");
            }
        }
    }

    #[test]
    fn anti_structures_are_anti_isometric() {
        let om = ConformalFactor::line_space();
        let g = conformal_metric(&om);
        for fam in [NullFamily::Alpha, NullFamily::Beta] {
            let d = AntiData::new(fam, "re(Z1)", "2 + im(Z2)").unwrap();
            let j = anti_structure(&d);
            for p in pts(4, 4) {
                let m = j.at(&p).unwrap();
                assert!(j.square_residual(&p).unwrap() < 1e-12);
                assert_eq!(classify(&g.at(&p).unwrap(), &m).unwrap().kind, StructureKind::AntiIsometric);
            }
        }
        let d = AntiData::new(NullFamily::Alpha, "1", "1").unwrap();
        assert!(matches!(anti_structure(&d).at(&[0.0; 4]), Err(GeomError::CoincidentPlanes)));
    }

    #[test]
    fn flat_constant_anti_structure_is_parallel() {
        let om = ConformalFactor::new("1").unwrap();
        let d = AntiData::new(NullFamily::Alpha, "0", "3.141592653589793").unwrap();
        let r = anti_routes(&om, &d, &[0.2, -0.1, 0.3, 0.5]).unwrap();
        assert!(r.system.max == 0.0 && r.covariant < 1e-15);
    }

    #[test]
    fn varying_angle_is_detected_both_ways() {
        let om = ConformalFactor::new("1").unwrap();
        let d = AntiData::new(NullFamily::Alpha, "re(Z1)", "3.141592653589793").unwrap();
        let r = anti_routes(&om, &d, &[0.2, -0.1, 0.3, 0.5]).unwrap();
        // |∂1 e^{−iφ1}| = |φ1_x0| / 2
        assert!((r.system.equations[0].modulus - 0.5).abs() < 1e-14);
        assert!(r.covariant > 1e-3);
        let ls = ConformalFactor::line_space();
        for fam in [NullFamily::Alpha, NullFamily::Beta] {
            let d = AntiData::new(fam, "0.3", "2.0").unwrap();
            for p in pts(5, 3) {
                let r = anti_routes(&ls, &d, &p).unwrap();
                assert!(r.system.max > 1e-3 && r.covariant > 1e-3);
            }
        }
    }

    #[test]
    fn first_order_anti_solutions_are_parallel_at_the_base_point() {
        let factors = [ConformalFactor::line_space(), ConformalFactor::new("exp(re(Z1*conj(Z2))/2)").unwrap()];
        for om in &factors {
            for fam in [NullFamily::Alpha, NullFamily::Beta] {
                for p in pts(6, 3) {
                    let d = first_order_anti(om, fam, 0.4, 2.5, &p).unwrap();
                    let r = anti_routes(om, &d, &p).unwrap();
                    assert!(r.system.max < 1e-12, "{:?}", r.system);
                    assert!(r.covariant < 1e-9, "{fam:?} {}", r.covariant);
                }
            }
        }
    }

    #[test]
    fn isometric_structure_is_isometric() {
        let om = ConformalFactor::line_space();
        let g = conformal_metric(&om);
        let d = IsometricData::new("2 + 0.3*Z1", "0.5*i() + 0.1*conj(Z2)").unwrap();
        let j = isometric_structure(&d);
        for p in pts(7, 4) {
            assert!(j.square_residual(&p).unwrap() < 1e-12);
            assert_eq!(classify(&g.at(&p).unwrap(), &j.at(&p).unwrap()).unwrap().kind, StructureKind::Isometric);
        }
    }

    #[test]
    fn flat_constant_isometric_is_parallel() {
        let om = ConformalFactor::new("1").unwrap();
        let d = IsometricData::new("2 + i()", "0.5").unwrap();
        let r = isometric_routes(&om, &d, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert!(r.system.max == 0.0 && r.covariant < 1e-15);
    }

    #[test]
    fn line_space_constant_data_is_not_parallel() {
        let om = ConformalFactor::line_space();
        let d = IsometricData::new("2", "0").unwrap();
        let p = [0.3, 0.1, -0.2, 0.4];
        let r = isometric_routes(&om, &d, &p).unwrap();
        assert_eq!(r.system.equations.len(), 8);
        assert!(r.system.max > 1e-3 && r.covariant > 1e-3);
        // with β = 0 and constant α, the d1 conj(alpha) row is |ᾱ∂1Ω + ∂2Ω|
        let o = om.jet(&p).unwrap();
        let want = (o.d1.scalef(2.0) + o.d2).abs2().sqrt();
        assert!((r.system.equations[1].modulus - want).abs() < 1e-14);
    }

    #[test]
    fn route_equivalence_on_zero_and_nonzero_fixtures() {
        let om = ConformalFactor::line_space();
        let mut rng = sampling::rng(8);
        let base = sampling::box_points(&mut rng, 5, -0.6, 0.6);
        let vals = sampling::box_points(&mut rng, 5, -1.0, 1.0);
        for (p, v) in base.iter().zip(&vals) {
            let (al, be) = (Cx::new(1.5 + v[0], v[1]), Cx::new(0.5 * v[2], 0.5 * v[3]));
            let zero = first_order_isometric(&om, al, be, p).unwrap();
            let r = isometric_routes(&om, &zero, p).unwrap();
            assert!(r.system.max < 1e-12 && r.covariant < 1e-9, "{r:?}");
            let off = IsometricData::new(&format!("({}) + 0.2*Z2", zero.alpha.src), &zero.beta.src).unwrap();
            let r = isometric_routes(&om, &off, p).unwrap();
            assert!(r.system.max > 1e-3 && r.covariant > 1e-3, "{r:?}");
        }
    }

    #[test]
    fn polar_form_matches_complex_form() {
        let om = ConformalFactor::new("exp(re(Z1*conj(Z2))/2) + abs2(Z1)/5").unwrap();
        let d = PolarData::new("1.3 + 0.2*re(Z1)", "0.4 + 0.1*im(Z2)^2", "0.5*re(Z2) + im(Z1)", "1 - 0.3*re(Z1*Z2)").unwrap();
        let c = IsometricData::from_polar(&d).unwrap();
        for p in pts(9, 5) {
            let pol = polar_parallel_residual(&om, &d, &p, PolarForm::Corrected).unwrap();
            let cx = isometric_parallel_residual(&om, &c, &p).unwrap();
            // each polar pair is a unitary rotation of a complex pair, scaled by √2
            let n2 = |v: Vec<f64>| v.iter().map(|x| x * x).sum::<f64>();
            assert!((n2(pol.moduli()) - 2.0 * n2(cx.moduli())).abs() < 1e-10 * (1.0 + n2(cx.moduli())));
        }
    }

    #[test]
    fn printed_last_angle_equation_differs() {
        let om = ConformalFactor::line_space();
        for p in pts(10, 3) {
            let zero = first_order_isometric(&om, Cx::new(1.1, 0.7), Cx::new(0.3, -0.4), &p).unwrap();
            let w = |f: &ComplexField| f.wirtinger(&p).unwrap().value;
            let (al, be) = (w(&zero.alpha), w(&zero.beta));
            let polar = PolarData::new(
                &format!("sqrt(abs2({}))", zero.alpha.src),
                &format!("sqrt(abs2({}))", zero.beta.src),
                &format!("{:?} + im(log(({})/({:?} + {:?}*i())))", al.im.atan2(al.re), zero.alpha.src, al.re, al.im),
                &format!("{:?} + im(log(({})/({:?} + {:?}*i())))", be.im.atan2(be.re), zero.beta.src, be.re, be.im),
            )
            .unwrap();
            let good = polar_parallel_residual(&om, &polar, &p, PolarForm::Corrected).unwrap();
            let bad = polar_parallel_residual(&om, &polar, &p, PolarForm::Printed).unwrap();
            assert!(good.max < 1e-12, "{good:?}");
            assert!(bad.equations[7].modulus > 1e-3);
            assert!(bad.equations[..7].iter().all(|e| e.modulus < 1e-12));
        }
    }

    #[test]
    fn polar_rejects_vanishing_modulus() {
        let om = ConformalFactor::new("1").unwrap();
        let d = PolarData::new("0", "1", "0", "0").unwrap();
        assert!(matches!(polar_parallel_residual(&om, &d, &[0.0; 4], PolarForm::Corrected), Err(GeomError::PolarDegeneracy)));
        let d = PolarData::new("2", "0.5", "0.1", "0.3").unwrap();
        assert_eq!(polar_parallel_residual(&om, &d, &[0.1; 4], PolarForm::Corrected).unwrap().max, 0.0);
    }
}
