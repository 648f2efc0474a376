//! First-order invariants of definite 2-plane fields.
//!
//! A plane field is given by two spanning vector fields, evaluated over any
//! [`Real`] ring so the adapted frame can be differentiated.

use std::sync::Arc;

use serde::Serialize;

use crate::complex::Cx;
use crate::error::{GeomError, Result};
use crate::jet::{seed_point, Jet2, Real};
use crate::linalg::{self, M4};
use crate::structures::{classify, parallel_residual, StructureKind};
use crate::tensor::{curvature, MatrixProgram, MetricField, MetricJet, StructureField};

/// Relative Gram determinant below which a span is treated as degenerate.
pub const SPAN_TOL: f64 = 1e-10;

pub type V4<T> = [T; 4];

/// Two spanning vector fields, generic over the ring.
pub trait PlaneFn: Send + Sync {
    fn span<T: Real>(&self, x: &[T; 4]) -> Result<[V4<T>; 2]>;
}

/// Object-safe view of a plane field.
pub trait PlaneProgram: Send + Sync {
    fn span_f64(&self, x: &[f64; 4]) -> Result<[V4<f64>; 2]>;
    fn span_jet(&self, x: &[Jet2; 4]) -> Result<[V4<Jet2>; 2]>;
}

impl<P: PlaneFn> PlaneProgram for P {
    fn span_f64(&self, x: &[f64; 4]) -> Result<[V4<f64>; 2]> {
        self.span(x)
    }
    fn span_jet(&self, x: &[Jet2; 4]) -> Result<[V4<Jet2>; 2]> {
        self.span(x)
    }
}

fn ip<T: Real>(g: &M4<T>, u: &V4<T>, v: &V4<T>) -> T {
    let mut s = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            s += g[i][j] * u[i] * v[j];
        }
    }
    s
}

fn axpy<T: Real>(v: &V4<T>, c: T, e: &V4<T>) -> V4<T> {
    std::array::from_fn(|k| v[k] - c * e[k])
}

fn unit<T: Real>(v: &V4<T>, n: T, sign: f64) -> Result<V4<T>> {
    let r = (n * sign).sqrt().checked_recip()?;
    Ok(std::array::from_fn(|k| v[k] * r))
}

/// Orthonormal pair spanning `span(v1, v2)`, with the sign of the induced metric.
fn orthonormal_pair<T: Real>(g: &M4<T>, v1: &V4<T>, v2: &V4<T>) -> Result<(V4<T>, V4<T>, f64)> {
    let e = |u: &V4<T>, w: &V4<T>| (0..4).map(|k| u[k].val() * w[k].val()).sum::<f64>();
    let (n1, n2, n12) = (e(v1, v1), e(v2, v2), e(v1, v2));
    let euclid = if n1 * n2 > 0.0 { (n1 * n2 - n12 * n12) / (n1 * n2) } else { 0.0 };
    if euclid <= SPAN_TOL {
        return Err(GeomError::DegenerateSpan(euclid));
    }
    let (a, b, c) = (ip(g, v1, v1), ip(g, v1, v2), ip(g, v2, v2));
    let det = (a.val() * c.val() - b.val() * b.val()) / (n1 * n2);
    if det <= SPAN_TOL {
        return Err(GeomError::IndefinitePlane(det));
    }
    let s = a.val().signum();
    let e1 = unit(v1, a, s)?;
    let w = axpy(v2, ip(g, v2, &e1) * s, &e1);
    let e2 = unit(&w, ip(g, &w, &w), s)?;
    Ok((e1, e2, s))
}

/// Frame over a ring: rows `e1, e2, ê1, ê2`.
#[derive(Debug, Clone, Copy)]
struct FrameT<T> {
    e: [V4<T>; 4],
    plane_sign: f64,
    normal_sign: f64,
}

fn frame_t<T: Real>(g: &M4<T>, span: &[V4<T>; 2]) -> Result<FrameT<T>> {
    let (e1, e2, s) = orthonormal_pair(g, &span[0], &span[1])?;
    let project = |k: usize| {
        let d: V4<T> = std::array::from_fn(|i| T::cst(if i == k { 1.0 } else { 0.0 }));
        let w = axpy(&d, ip(g, &d, &e1) * s, &e1);
        axpy(&w, ip(g, &d, &e2) * s, &e2)
    };
    let w: [V4<T>; 4] = std::array::from_fn(project);
    let mut best = (0, 1, 0.0_f64);
    for k in 0..4 {
        for l in k + 1..4 {
            let d = ip(g, &w[k], &w[k]).val() * ip(g, &w[l], &w[l]).val() - ip(g, &w[k], &w[l]).val().powi(2);
            if d.abs() > best.2.abs() {
                best = (k, l, d);
            }
        }
    }
    let (f1, f2, sn) = orthonormal_pair(g, &w[best.0], &w[best.1])?;
    Ok(FrameT { e: [e1, e2, f1, f2], plane_sign: s, normal_sign: sn })
}

/// `{e1, e2}` spans `P`, `{ê1, ê2}` spans its orthogonal complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptedFrame {
    pub e1: [f64; 4],
    pub e2: [f64; 4],
    pub e1_hat: [f64; 4],
    pub e2_hat: [f64; 4],
    /// sign of the metric induced on `P`
    pub plane_sign: f64,
    pub normal_sign: f64,
    /// `max |g(e_μ, e_ν) − η_μν|`
    pub orthonormality_residual: f64,
}

impl AdaptedFrame {
    pub fn vectors(&self) -> [[f64; 4]; 4] {
        [self.e1, self.e2, self.e1_hat, self.e2_hat]
    }
}

fn frame_values(g: &M4<f64>, f: &FrameT<Jet2>) -> AdaptedFrame {
    let v: [V4<f64>; 4] = std::array::from_fn(|m| std::array::from_fn(|k| f.e[m][k].value));
    let signs = [f.plane_sign, f.plane_sign, f.normal_sign, f.normal_sign];
    let mut res = 0.0_f64;
    for m in 0..4 {
        for n in 0..4 {
            let want = if m == n { signs[m] } else { 0.0 };
            res = res.max((ip(g, &v[m], &v[n]) - want).abs());
        }
    }
    AdaptedFrame {
        e1: v[0],
        e2: v[1],
        e1_hat: v[2],
        e2_hat: v[3],
        plane_sign: f.plane_sign,
        normal_sign: f.normal_sign,
        orthonormality_residual: res,
    }
}

pub fn adapted_frame(g: &MetricField, plane: &dyn PlaneProgram, p: &[f64; 4]) -> Result<AdaptedFrame> {
    let gv = g.at(p)?;
    let span = plane.span_f64(p)?;
    let f = frame_t(&gv, &span)?;
    let fj = FrameT { e: f.e.map(|v| v.map(Jet2::constant)), plane_sign: f.plane_sign, normal_sign: f.normal_sign };
    Ok(frame_values(&gv, &fj))
}

/// Second fundamental form of `P` in the real frame: `h[â][a][b] = g(∇_a e_b, e_â) η_ââ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondFundamentalForm {
    pub h: [[[f64; 2]; 2]; 2],
    /// `max |h(e1,e2) − h(e2,e1)|`, zero exactly when `P` is integrable
    pub symmetry_residual: f64,
    /// trace over `P`, chart components
    pub mean_curvature: [f64; 4],
    pub mean_curvature_sq: f64,
}

/// Leaf Gauss curvature computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeafCurvature {
    /// ambient sectional curvature of `P`
    pub ambient_sectional: f64,
    /// Gauss equation: ambient sectional plus the extrinsic term
    pub gauss_equation: f64,
    /// `½|ρ|² − |σ₊|² − |σ₋|²`, the extrinsic term alone
    pub from_invariants: f64,
    /// `|ρ|² − |σ₊|² − |σ₋|²`
    pub printed_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NPInvariants {
    pub lambda: Cx<f64>,
    pub rho: Cx<f64>,
    pub sigma_plus: Cx<f64>,
    pub sigma_minus: Cx<f64>,
    pub lambda_hat: Cx<f64>,
    pub rho_hat: Cx<f64>,
    pub sigma_plus_hat: Cx<f64>,
    pub sigma_minus_hat: Cx<f64>,
    /// `max |Γ_μνα + Γ_μαν|`
    pub antisymmetry_residual: f64,
    pub frame: AdaptedFrame,
    pub second_fundamental_form: SecondFundamentalForm,
    pub leaf_curvature: LeafCurvature,
}

fn cabs(z: Cx<f64>) -> f64 {
    z.abs2().sqrt()
}

impl NPInvariants {
    /// Largest of `|λ|, |ρ|, |σ±|`.
    pub fn max_abs(&self) -> f64 {
        [self.lambda, self.rho, self.sigma_plus, self.sigma_minus].into_iter().map(cabs).fold(0.0, f64::max)
    }

    pub fn max_abs_hat(&self) -> f64 {
        [self.lambda_hat, self.rho_hat, self.sigma_plus_hat, self.sigma_minus_hat].into_iter().map(cabs).fold(0.0, f64::max)
    }
}

/// Real connection coefficients `Γ[μ][ν][α] = g(∇_{e_μ} e_ν, e_α)`.
fn frame_connection(g: &M4<f64>, gam: &crate::tensor::T3, f: &FrameT<Jet2>) -> [[[f64; 4]; 4]; 4] {
    let mut out = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut d = [0.0; 4];
            for k in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    let x = f.e[mu][i].value;
                    s += x * f.e[nu][k].grad[i];
                    for j in 0..4 {
                        s += gam[k][i][j] * x * f.e[nu][j].value;
                    }
                }
                d[k] = s;
            }
            for al in 0..4 {
                let ea: V4<f64> = std::array::from_fn(|k| f.e[al][k].value);
                out[mu][nu][al] = ip(g, &d, &ea);
            }
        }
    }
    out
}

pub fn np_invariants(g: &MetricField, plane: &dyn PlaneProgram, p: &[f64; 4]) -> Result<NPInvariants> {
    let gj = g.jet(p)?;
    let mj = MetricJet::from_jets(&gj)?;
    let gv = mj.g;
    let span = plane.span_jet(&seed_point(*p))?;
    let f = frame_t(&gj, &span)?;
    let r = frame_connection(&gv, &mj.christoffels(), &f);

    let mut antisym = 0.0_f64;
    for m in 0..4 {
        for n in 0..4 {
            for a in 0..4 {
                antisym = antisym.max((r[m][n][a] + r[m][a][n]).abs());
            }
        }
    }

    // rows: +, −, +̂, −̂ with e± = (e1 ∓ i e2)/√2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Cx::<f64>::zero();
    let c: [[Cx<f64>; 4]; 4] = [
        [Cx::cst(h, 0.0), Cx::cst(0.0, -h), z, z],
        [Cx::cst(h, 0.0), Cx::cst(0.0, h), z, z],
        [z, z, Cx::cst(h, 0.0), Cx::cst(0.0, -h)],
        [z, z, Cx::cst(h, 0.0), Cx::cst(0.0, h)],
    ];
    let gc = |m: usize, n: usize, a: usize| {
        let mut s = Cx::<f64>::zero();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    s = s + c[m][i] * c[n][j] * c[a][k] * Cx::real(r[i][j][k]);
                }
            }
        }
        s
    };
    let (pl, mi, ph, mh) = (0, 1, 2, 3);
    let lambda = gc(pl, ph, mi) - gc(mi, ph, pl);
    let rho = gc(pl, ph, mi) + gc(mi, ph, pl);
    let sigma_plus = gc(pl, ph, pl);
    let sigma_minus = gc(mi, ph, mi);
    let lambda_hat = gc(ph, pl, mh) - gc(mh, pl, ph);
    let rho_hat = gc(ph, pl, mh) + gc(mh, pl, ph);
    let sigma_plus_hat = gc(ph, pl, ph);
    let sigma_minus_hat = gc(mh, pl, mh);

    let (sp, sn) = (f.plane_sign, f.normal_sign);
    let mut hh = [[[0.0; 2]; 2]; 2];
    for n in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                hh[n][a][b] = sn * r[a][b][2 + n];
            }
        }
    }
    let symmetry_residual = (0..2).map(|n| (hh[n][0][1] - hh[n][1][0]).abs()).fold(0.0, f64::max);
    let trace: [f64; 2] = std::array::from_fn(|n| sp * (hh[n][0][0] + hh[n][1][1]));
    let mean_curvature = std::array::from_fn(|k| trace[0] * f.e[2][k].value + trace[1] * f.e[3][k].value);
    let mean_curvature_sq = sn * (trace[0] * trace[0] + trace[1] * trace[1]);

    // g(A(e1,e1), A(e2,e2)) − g(A12, A12) with A12 symmetrised
    let mut extrinsic = 0.0;
    for n in 0..2 {
        let h12 = 0.5 * (hh[n][0][1] + hh[n][1][0]);
        extrinsic += sn * (hh[n][0][0] * hh[n][1][1] - h12 * h12);
    }
    let riem = curvature(g, p)?.riemann;
    let (e1, e2) = (f.e[0].map(|x| x.value), f.e[1].map(|x| x.value));
    let mut sect = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    sect += riem[a][b][cc][d] * e1[a] * e2[b] * e1[cc] * e2[d];
                }
            }
        }
    }
    let s2 = cabs(sigma_plus).powi(2) + cabs(sigma_minus).powi(2);
    let leaf_curvature = LeafCurvature {
        ambient_sectional: sect,
        gauss_equation: sect + extrinsic,
        from_invariants: 0.5 * rho.abs2() - s2,
        printed_form: rho.abs2() - s2,
    };

    Ok(NPInvariants {
        lambda,
        rho,
        sigma_plus,
        sigma_minus,
        lambda_hat,
        rho_hat,
        sigma_plus_hat,
        sigma_minus_hat,
        antisymmetry_residual: antisym,
        frame: frame_values(&gv, &f),
        second_fundamental_form: SecondFundamentalForm { h: hh, symmetry_residual, mean_curvature, mean_curvature_sq },
        leaf_curvature,
    })
}

/// The `±1` eigenplane of a structure, spanned by two columns of `I ± J`.
pub struct EigenplaneField {
    j: Arc<dyn MatrixProgram>,
    sign: f64,
    cols: (usize, usize),
}

impl EigenplaneField {
    /// Picks the best-conditioned pair of columns at `p`.
    pub fn at(j: &StructureField, sign: f64, p: &[f64; 4]) -> Result<Self> {
        let m = linalg::add(&linalg::identity(), &linalg::scale(&j.at(p)?, sign));
        let col = |k: usize| -> [f64; 4] { std::array::from_fn(|i| m[i][k]) };
        let mut best = (0, 1, 0.0);
        for k in 0..4 {
            for l in k + 1..4 {
                let (a, b) = (col(k), col(l));
                let dot = |u: &[f64; 4], v: &[f64; 4]| (0..4).map(|i| u[i] * v[i]).sum::<f64>();
                let d = dot(&a, &a) * dot(&b, &b) - dot(&a, &b).powi(2);
                if d > best.2 {
                    best = (k, l, d);
                }
            }
        }
        if best.2 <= SPAN_TOL {
            return Err(GeomError::DegenerateSpan(best.2));
        }
        Ok(EigenplaneField { j: j.program(), sign, cols: (best.0, best.1) })
    }

    fn columns<T: Real>(&self, m: M4<T>) -> [V4<T>; 2] {
        let s = self.sign;
        let col = |k: usize| -> V4<T> { std::array::from_fn(|i| m[i][k] * s + if i == k { 1.0 } else { 0.0 }) };
        [col(self.cols.0), col(self.cols.1)]
    }
}

impl PlaneProgram for EigenplaneField {
    fn span_f64(&self, x: &[f64; 4]) -> Result<[V4<f64>; 2]> {
        Ok(self.columns(self.j.at_f64(x)?))
    }
    fn span_jet(&self, x: &[Jet2; 4]) -> Result<[V4<Jet2>; 2]> {
        Ok(self.columns(self.j.at_jet(x)?))
    }
}

/// The isometric paracomplex structure with `+1` eigenplane `P` and `−1` eigenplane `P⊥`.
pub struct PlaneStructure {
    metric: Arc<dyn MatrixProgram>,
    plane: Arc<dyn PlaneProgram>,
}

impl PlaneStructure {
    pub fn new(g: &MetricField, plane: Arc<dyn PlaneProgram>) -> Self {
        PlaneStructure { metric: g.program(), plane }
    }

    fn build<T: Real>(g: &M4<T>, span: &[V4<T>; 2]) -> Result<M4<T>> {
        let (e1, e2, s) = orthonormal_pair(g, &span[0], &span[1])?;
        let ge = |e: &V4<T>| -> V4<T> { std::array::from_fn(|k| (0..4).fold(T::zero(), |a, i| a + g[k][i] * e[i])) };
        let (f1, f2) = (ge(&e1), ge(&e2));
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                let p = (e1[i] * f1[k] + e2[i] * f2[k]) * (2.0 * s);
                if i == k {
                    p - 1.0
                } else {
                    p
                }
            })
        }))
    }
}

impl MatrixProgram for PlaneStructure {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>> {
        Self::build(&self.metric.at_f64(x)?, &self.plane.span_f64(x)?)
    }
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>> {
        Self::build(&self.metric.at_jet(x)?, &self.plane.span_jet(x)?)
    }
}

pub fn plane_structure(g: &MetricField, plane: Arc<dyn PlaneProgram>) -> StructureField {
    StructureField::from_arc("J(P)", g.chart.clone(), 1.0, Arc::new(PlaneStructure::new(g, plane)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub point: [f64; 4],
    /// invariants of both eigenplanes, hatted sets included
    pub invariant_max: f64,
    pub parallel_residual: f64,
    pub invariants_vanish: bool,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub tolerance: f64,
    pub rows: Vec<EquivalenceRow>,
    pub invariant_max: f64,
    pub parallel_max: f64,
    /// both sides vanish or both sides are nonzero at every point
    pub equivalent: bool,
}

/// Compare vanishing invariants of both eigenplanes with `∇J = 0` at each point.
pub fn parallel_equivalence_check(g: &MetricField, j: &StructureField, points: &[[f64; 4]], tol: f64) -> Result<EquivalenceReport> {
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let c = classify(&g.at(p)?, &j.at(p)?)?;
        if c.kind != StructureKind::Isometric {
            return Err(GeomError::NotIsometric(format!("{} at {:?} is {:?}", j.name, p, c.kind)));
        }
        let mut inv = 0.0_f64;
        for sign in [1.0, -1.0] {
            let e = EigenplaneField::at(j, sign, p)?;
            let np = np_invariants(g, &e, p)?;
            inv = inv.max(np.max_abs()).max(np.max_abs_hat());
        }
        let par = parallel_residual(g, j, &[*p])?;
        rows.push(EquivalenceRow {
            point: *p,
            invariant_max: inv,
            parallel_residual: par,
            invariants_vanish: inv < tol,
            parallel: par < tol,
        });
    }
    let invariant_max = rows.iter().map(|r| r.invariant_max).fold(0.0, f64::max);
    let parallel_max = rows.iter().map(|r| r.parallel_residual).fold(0.0, f64::max);
    let equivalent = rows.iter().all(|r| r.invariants_vanish == r.parallel);
    Ok(EquivalenceReport { tolerance: tol, rows, invariant_max, parallel_max, equivalent })
}

/// `span(∂a, ∂b)`.
#[derive(Debug, Clone, Copy)]
pub struct CoordinatePlane(pub usize, pub usize);

impl PlaneFn for CoordinatePlane {
    fn span<T: Real>(&self, _x: &[T; 4]) -> Result<[V4<T>; 2]> {
        let d = |k: usize| std::array::from_fn(|i| T::cst(if i == k { 1.0 } else { 0.0 }));
        Ok([d(self.0), d(self.1)])
    }
}

/// Constant plane `span(v1, v2)`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPlane(pub [f64; 4], pub [f64; 4]);

impl PlaneFn for ConstantPlane {
    fn span<T: Real>(&self, _x: &[T; 4]) -> Result<[V4<T>; 2]> {
        Ok([self.0.map(T::cst), self.1.map(T::cst)])
    }
}

/// Tangent planes of the round spheres centred on the `x3` axis inside each slice `x3 = const`.
#[derive(Debug, Clone, Copy)]
pub struct SphereSlicePlane;

impl PlaneFn for SphereSlicePlane {
    fn span<T: Real>(&self, x: &[T; 4]) -> Result<[V4<T>; 2]> {
        let (a, b, c) = (x[0], x[1], x[2]);
        let z = T::zero();
        Ok([[b, -a, z, z], [a * c, b * c, -(a * a + b * b), z]])
    }
}

/// Tangent planes of the cylinders `x0² + x1² = r²` inside each slice `x3 = const`.
#[derive(Debug, Clone, Copy)]
pub struct CylinderPlane;

impl PlaneFn for CylinderPlane {
    fn span<T: Real>(&self, x: &[T; 4]) -> Result<[V4<T>; 2]> {
        let z = T::zero();
        Ok([[-x[1], x[0], z, z], [z, z, T::one(), z]])
    }
}

/// `span(cos θ ∂0 + sin θ ∂2, ∂1)` with `θ = rate · x0`.
#[derive(Debug, Clone, Copy)]
pub struct RotatingPlane {
    pub rate: f64,
}

impl PlaneFn for RotatingPlane {
    fn span<T: Real>(&self, x: &[T; 4]) -> Result<[V4<T>; 2]> {
        let t = x[0] * self.rate;
        let z = T::zero();
        Ok([[t.cos(), z, t.sin(), z], [z, T::one(), z, z]])
    }
}

/// `span(∂0, ∂1 + x0 ∂2)`, which is not integrable.
#[derive(Debug, Clone, Copy)]
pub struct TwistedPlane;

impl PlaneFn for TwistedPlane {
    fn span<T: Real>(&self, x: &[T; 4]) -> Result<[V4<T>; 2]> {
        let (z, o) = (T::zero(), T::one());
        Ok([[o, z, z, z], [z, o, x[0], z]])
    }
}
