//! Products of Riemannian surfaces with `G± = g1 ± g2`.
//!
//! Product chart `(u1, v1, u2, v2)`; every factor is conformal, `λ(u,v)(du² + dv²)`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::{ChartBinding, ExprField};
use crate::jet::{Jet2, Real};
use crate::linalg::M4;
use crate::tensor::{curvature, Chart, MatrixFn, MetricField, Signature, StructureField};

#[derive(Debug, Clone)]
pub enum FactorKind {
    /// `4 (1 + κ(u²+v²))⁻² (du² + dv²)`, Gauss curvature `κ`
    Constant(f64),
    /// `exp(2φ(u,v)) (du² + dv²)`
    Warped(ExprField),
}

#[derive(Debug, Clone)]
pub struct SurfaceFactor {
    pub name: String,
    pub kind: FactorKind,
}

impl SurfaceFactor {
    pub fn constant(kappa: f64) -> Self {
        let name = if kappa > 0.0 {
            format!("sphere(k={kappa})")
        } else if kappa < 0.0 {
            format!("hyperbolic(k={kappa})")
        } else {
            "flat".to_string()
        };
        SurfaceFactor { name, kind: FactorKind::Constant(kappa) }
    }

    pub fn flat() -> Self {
        Self::constant(0.0)
    }

    /// Conformal factor `exp(2φ)` with `φ` an expression in `u`, `v`.
    pub fn warped(phi: &str) -> Result<Self> {
        let f = ExprField::new(phi, ChartBinding::real(["u", "v", "_u2", "_v2"]))?;
        Ok(SurfaceFactor { name: format!("warped({phi})"), kind: FactorKind::Warped(f) })
    }

    /// The constant curvature, if the factor is a constant-curvature fixture.
    pub fn declared_curvature(&self) -> Option<f64> {
        match self.kind {
            FactorKind::Constant(k) => Some(k),
            FactorKind::Warped(_) => None,
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        match self.kind {
            FactorKind::Constant(k) => 1.0 + k * (u * u + v * v) > 0.05,
            FactorKind::Warped(_) => true,
        }
    }

    pub fn lambda<T: Real>(&self, u: T, v: T) -> Result<T> {
        match &self.kind {
            FactorKind::Constant(k) => {
                let d = (u * u + v * v) * *k + 1.0;
                Ok(d.sq().checked_recip()? * 4.0)
            }
            FactorKind::Warped(f) => {
                let z = T::zero();
                Ok((f.eval_real(&[u, v, z, z])? * 2.0).exp())
            }
        }
    }

    /// Gauss curvature from the metric alone, `K = −Δ ln λ / (2λ)`.
    pub fn gauss_curvature(&self, u: f64, v: f64) -> Result<f64> {
        let l = self.lambda(Jet2::variable(u, 0), Jet2::variable(v, 1))?;
        let lap = l.hess[0][0] + l.hess[1][1];
        let grad2 = l.grad[0] * l.grad[0] + l.grad[1] * l.grad[1];
        let lap_ln = lap / l.value - grad2 / (l.value * l.value);
        Ok(-lap_ln / (2.0 * l.value))
    }
}

#[derive(Debug, Clone)]
struct ProductMetric {
    f1: SurfaceFactor,
    f2: SurfaceFactor,
    epsilon: f64,
}

impl MatrixFn for ProductMetric {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let a = self.f1.lambda(x[0], x[1])?;
        let b = self.f2.lambda(x[2], x[3])? * self.epsilon;
        let z = T::zero();
        Ok([[a, z, z, z], [z, a, z, z], [z, z, b, z], [z, z, z, b]])
    }
}

/// `s1 j ⊕ s2 j` with `j` the rotation `∂u ↦ ∂v`, `∂v ↦ −∂u`.
#[derive(Debug, Clone, Copy)]
struct BlockRotation {
    s1: f64,
    s2: f64,
}

impl MatrixFn for BlockRotation {
    fn eval<T: Real>(&self, _x: &[T; 4]) -> Result<M4<T>> {
        let z = T::zero();
        let (a, b) = (T::cst(self.s1), T::cst(self.s2));
        Ok([[z, -a, z, z], [a, z, z, z], [z, z, z, -b], [z, z, b, z]])
    }
}

/// `J = J1 J2 = (−id) ⊕ id`.
#[derive(Debug, Clone, Copy)]
struct SplitStructure;

impl MatrixFn for SplitStructure {
    fn eval<T: Real>(&self, _x: &[T; 4]) -> Result<M4<T>> {
        Ok(crate::linalg::diag([-1.0, -1.0, 1.0, 1.0]))
    }
}

#[derive(Debug, Clone)]
pub struct ProductGeometry {
    pub factors: (SurfaceFactor, SurfaceFactor),
    pub epsilon: f64,
    pub metric: MetricField,
    /// `j1 ⊕ (−j2)`
    pub j1: StructureField,
    /// `j1 ⊕ j2`
    pub j2: StructureField,
    /// `J1 J2`
    pub j: StructureField,
}

pub fn product_chart(f1: &SurfaceFactor, f2: &SurfaceFactor) -> Chart {
    let (a, b) = (f1.clone(), f2.clone());
    Chart::new(&format!("{} x {}", f1.name, f2.name), ChartBinding::real(["u1", "v1", "u2", "v2"]), move |x| {
        a.contains(x[0], x[1]) && b.contains(x[2], x[3])
    })
}

pub fn build_product(f1: SurfaceFactor, f2: SurfaceFactor, epsilon: f64) -> Result<ProductGeometry> {
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(GeomError::Config(format!("epsilon must be +1 or -1, got {epsilon}")));
    }
    let chart = product_chart(&f1, &f2);
    let sig = if epsilon > 0.0 { Signature::RIEMANNIAN } else { Signature::NEUTRAL };
    let tag = if epsilon > 0.0 { "G+" } else { "G-" };
    let metric = MetricField::new(
        &format!("{tag} {} x {}", f1.name, f2.name),
        chart.clone(),
        sig,
        ProductMetric { f1: f1.clone(), f2: f2.clone(), epsilon },
    );
    Ok(ProductGeometry {
        factors: (f1, f2),
        epsilon,
        metric,
        j1: StructureField::new("J1", chart.clone(), -1.0, BlockRotation { s1: 1.0, s2: -1.0 }),
        j2: StructureField::new("J2", chart.clone(), -1.0, BlockRotation { s1: 1.0, s2: 1.0 }),
        j: StructureField::new("J", chart, 1.0, SplitStructure),
    })
}

/// Closed-form curvature scalars of `G_ε` over constant-curvature factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormCurvature {
    pub scalar: f64,
    pub ricci_sq: f64,
    pub einstein_sq: f64,
    /// `(κ1 + εκ2)²`; the Weyl norm is a fixed multiple of this
    pub weyl_shape: f64,
    /// the multiple under the full-contraction norm
    pub weyl_factor: f64,
    /// the often-quoted multiple, which disagrees with the full-contraction norm
    pub weyl_factor_printed: f64,
}

pub const WEYL_FACTOR: f64 = 4.0 / 3.0;
pub const WEYL_FACTOR_PRINTED: f64 = 2.0 / 3.0;

pub fn closed_form_curvature(k1: f64, k2: f64, epsilon: f64) -> ClosedFormCurvature {
    let s = k1 + epsilon * k2;
    let d = k1 - epsilon * k2;
    ClosedFormCurvature {
        scalar: 2.0 * s,
        ricci_sq: 2.0 * (k1 * k1 + k2 * k2),
        einstein_sq: d * d,
        weyl_shape: s * s,
        weyl_factor: WEYL_FACTOR,
        weyl_factor_printed: WEYL_FACTOR_PRINTED,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeWayReport {
    pub epsilon: f64,
    /// statement 1: constant curvatures with `κ1 = −ε κ2`
    pub constant_relation: bool,
    /// statement 2: `G_ε` conformally flat and scalar flat
    pub conformally_scalar_flat: bool,
    /// statement 3: `G_{−ε}` Einstein
    pub opposite_einstein: bool,
    pub curvature_spread: f64,
    pub relation_residual: f64,
    pub weyl_scalar_residual: f64,
    pub einstein_residual: f64,
    pub agree: bool,
}

/// Evaluate the three equivalent statements at sample points and compare them.
pub fn three_way_check(f1: &SurfaceFactor, f2: &SurfaceFactor, epsilon: f64, points: &[[f64; 4]], tol: f64) -> Result<ThreeWayReport> {
    let g = build_product(f1.clone(), f2.clone(), epsilon)?;
    let h = build_product(f1.clone(), f2.clone(), -epsilon)?;
    let (mut k1s, mut k2s) = (Vec::new(), Vec::new());
    let (mut ws, mut e) = (0.0_f64, 0.0_f64);
    for p in points {
        k1s.push(f1.gauss_curvature(p[0], p[1])?);
        k2s.push(f2.gauss_curvature(p[2], p[3])?);
        let c = curvature(&g.metric, p)?;
        ws = ws.max(c.weyl_sq.abs()).max(c.scalar.abs());
        e = e.max(curvature(&h.metric, p)?.einstein_max());
    }
    let spread = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        hi - lo
    };
    let curvature_spread = spread(&k1s).max(spread(&k2s));
    let relation_residual = k1s.iter().zip(&k2s).map(|(a, b)| (a + epsilon * b).abs()).fold(0.0_f64, f64::max);
    let s1 = curvature_spread < tol && relation_residual < tol;
    let s2 = ws < tol;
    let s3 = e < tol;
    Ok(ThreeWayReport {
        epsilon,
        constant_relation: s1,
        conformally_scalar_flat: s2,
        opposite_einstein: s3,
        curvature_spread,
        relation_residual,
        weyl_scalar_residual: ws,
        einstein_residual: e,
        agree: s1 == s2 && s2 == s3,
    })
}
