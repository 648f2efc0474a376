//! Chart-based tensor calculus.
//!
//! Index conventions: `christoffel[k][i][j] = Γ^k_ij`,
//! `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`,
//! `riemann[a][b][c][d] = R_abcd = g_ae R^e_bcd`, `Ric_bd = R^a_bad`.
//! A unit sphere has `R_abcd = g_ac g_bd − g_ad g_bc`, so scalar curvature is positive.
//! Structure matrices are `j[row = upper][col = lower]`.

use std::fmt;
use std::sync::Arc;

use nalgebra::SMatrix;

use crate::error::{GeomError, Result};
use crate::jet::{seed_point, Jet2, Real, Tangent};
use crate::linalg::{self, M4};

pub type T3 = [[[f64; 4]; 4]; 4];
pub type T4 = [[[[f64; 4]; 4]; 4]; 4];
pub type Mat6 = SMatrix<f64, 6, 6>;

/// Bivector basis order.
pub const BIVECTOR_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A 4x4 matrix field generic over the scalar ring.
pub trait MatrixFn: Send + Sync {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>>;
}

/// Object-safe view of a matrix field at the two rings the engine needs.
pub trait MatrixProgram: Send + Sync {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>>;
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>>;
}

impl<F: MatrixFn> MatrixProgram for F {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>> {
        self.eval(x)
    }
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>> {
        self.eval(x)
    }
}

/// A map between 4-charts, generic over the ring.
pub trait MapFn: Send + Sync {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<[T; 4]>;
}

/// Image point and Jacobian `jac[a][mu] = ∂_mu φ^a`.
pub fn jacobian<M: MapFn + ?Sized, T: Real>(map: &M, x: &[T; 4]) -> Result<([T; 4], M4<T>)> {
    let mut jac = linalg::zeros::<T>();
    let mut image = [T::zero(); 4];
    for mu in 0..4 {
        let tx: [Tangent<T>; 4] = std::array::from_fn(|k| Tangent::new(x[k], T::cst(if k == mu { 1.0 } else { 0.0 })));
        let y = map.eval(&tx)?;
        for a in 0..4 {
            jac[a][mu] = y[a].d;
            image[a] = y[a].v;
        }
    }
    Ok((image, jac))
}

type Validity = Arc<dyn Fn(&[f64; 4]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Chart {
    pub name: String,
    pub binding: crate::expr::ChartBinding,
    validity: Validity,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart").field("name", &self.name).field("binding", &self.binding).finish()
    }
}

impl Chart {
    pub fn new(name: &str, binding: crate::expr::ChartBinding, validity: impl Fn(&[f64; 4]) -> bool + Send + Sync + 'static) -> Self {
        Chart { name: name.to_string(), binding, validity: Arc::new(validity) }
    }

    /// Chart valid everywhere, with real names `x0..x3`.
    pub fn euclidean(name: &str) -> Self {
        Chart::new(name, crate::expr::ChartBinding::real(["x0", "x1", "x2", "x3"]), |_| true)
    }

    pub fn contains(&self, p: &[f64; 4]) -> bool {
        p.iter().all(|v| v.is_finite()) && (self.validity)(p)
    }

    pub fn check(&self, p: &[f64; 4]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::OutsideChart(*p, self.name.clone()))
        }
    }
}

/// Eigenvalue sign counts of a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

impl Signature {
    pub const RIEMANNIAN: Signature = Signature { pos: 4, neg: 0 };
    pub const NEUTRAL: Signature = Signature { pos: 2, neg: 2 };
    pub const LORENTZ: Signature = Signature { pos: 3, neg: 1 };

    pub fn of(g: &M4<f64>) -> Signature {
        let (pos, neg) = linalg::inertia(g, 1e-12);
        Signature { pos, neg }
    }
    pub fn is_definite(&self) -> bool {
        self.pos == 4 || self.neg == 4
    }
    pub fn is_neutral(&self) -> bool {
        self.pos == 2 && self.neg == 2
    }
    pub fn is_lorentz(&self) -> bool {
        (self.pos == 3 && self.neg == 1) || (self.pos == 1 && self.neg == 3)
    }
    /// `+1` for definite, `−1` for neutral metrics.
    pub fn cgb_sign(&self) -> Result<f64> {
        if self.is_definite() {
            Ok(1.0)
        } else if self.is_neutral() {
            Ok(-1.0)
        } else {
            Err(GeomError::UnsupportedSignature(self.to_string()))
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.is_definite() {
            "riemannian"
        } else if self.is_neutral() {
            "neutral"
        } else if self.is_lorentz() {
            "lorentz"
        } else {
            "degenerate"
        };
        write!(f, "{tag}({},{})", self.pos, self.neg)
    }
}

#[derive(Clone)]
pub struct MetricField {
    pub name: String,
    pub chart: Chart,
    pub signature: Signature,
    /// `+1` when the chart order is the orientation.
    pub orientation: f64,
    program: Arc<dyn MatrixProgram>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("name", &self.name)
            .field("chart", &self.chart.name)
            .field("signature", &self.signature)
            .finish()
    }
}

impl MetricField {
    pub fn new(name: &str, chart: Chart, signature: Signature, program: impl MatrixProgram + 'static) -> Self {
        MetricField { name: name.to_string(), chart, signature, orientation: 1.0, program: Arc::new(program) }
    }

    pub fn from_arc(name: &str, chart: Chart, signature: Signature, program: Arc<dyn MatrixProgram>) -> Self {
        MetricField { name: name.to_string(), chart, signature, orientation: 1.0, program }
    }

    pub fn program(&self) -> Arc<dyn MatrixProgram> {
        self.program.clone()
    }

    /// Components at `p`, symmetrised, with chart and determinant checks.
    pub fn at(&self, p: &[f64; 4]) -> Result<M4<f64>> {
        self.chart.check(p)?;
        let g = self.program.at_f64(p)?;
        let d = linalg::det_value(&g);
        if d.abs() <= linalg::SINGULAR_DET || !d.is_finite() {
            return Err(GeomError::SingularMetric(d.abs()));
        }
        Ok(g)
    }

    /// Order-2 jets of the components at `p`.
    pub fn jet(&self, p: &[f64; 4]) -> Result<M4<Jet2>> {
        self.chart.check(p)?;
        let g = self.program.at_jet(&seed_point(*p))?;
        let d = linalg::det_value(&linalg::values(&g));
        if d.abs() <= linalg::SINGULAR_DET || !d.is_finite() {
            return Err(GeomError::SingularMetric(d.abs()));
        }
        Ok(g)
    }

    /// Observed signature at `p`.
    pub fn signature_at(&self, p: &[f64; 4]) -> Result<Signature> {
        Ok(Signature::of(&self.at(p)?))
    }
}

#[derive(Clone)]
pub struct StructureField {
    pub name: String,
    pub chart: Chart,
    /// `+1` for paracomplex candidates, `−1` for complex ones.
    pub square: f64,
    program: Arc<dyn MatrixProgram>,
}

impl fmt::Debug for StructureField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StructureField").field("name", &self.name).field("square", &self.square).finish()
    }
}

impl StructureField {
    pub fn new(name: &str, chart: Chart, square: f64, program: impl MatrixProgram + 'static) -> Self {
        StructureField { name: name.to_string(), chart, square, program: Arc::new(program) }
    }

    pub fn from_arc(name: &str, chart: Chart, square: f64, program: Arc<dyn MatrixProgram>) -> Self {
        StructureField { name: name.to_string(), chart, square, program }
    }

    pub fn program(&self) -> Arc<dyn MatrixProgram> {
        self.program.clone()
    }

    pub fn at(&self, p: &[f64; 4]) -> Result<M4<f64>> {
        self.chart.check(p)?;
        self.program.at_f64(p)
    }

    pub fn jet(&self, p: &[f64; 4]) -> Result<M4<Jet2>> {
        self.chart.check(p)?;
        self.program.at_jet(&seed_point(*p))
    }

    /// `max |j² − square·id|` at `p`.
    pub fn square_residual(&self, p: &[f64; 4]) -> Result<f64> {
        let j = self.at(p)?;
        let target = linalg::scale(&linalg::identity::<f64>(), self.square);
        Ok(linalg::max_abs_diff(&linalg::matmul(&j, &j), &target))
    }
}

/// Product of two structure programs, `(a b)(x) = a(x) b(x)`.
pub struct ProductProgram {
    pub a: Arc<dyn MatrixProgram>,
    pub b: Arc<dyn MatrixProgram>,
}

impl MatrixProgram for ProductProgram {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>> {
        Ok(linalg::matmul(&self.a.at_f64(x)?, &self.b.at_f64(x)?))
    }
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>> {
        Ok(linalg::matmul(&self.a.at_jet(x)?, &self.b.at_jet(x)?))
    }
}

/// Associated bilinear form `g(j·,·)`, components `g_{μα} j^α_ν`.
pub struct AssociatedProgram {
    pub g: Arc<dyn MatrixProgram>,
    pub j: Arc<dyn MatrixProgram>,
}

impl MatrixProgram for AssociatedProgram {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>> {
        Ok(linalg::matmul(&self.g.at_f64(x)?, &self.j.at_f64(x)?))
    }
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>> {
        Ok(linalg::matmul(&self.g.at_jet(x)?, &self.j.at_jet(x)?))
    }
}

/// Pullback of a target metric through a map.
pub struct PullbackProgram<M> {
    pub map: M,
    pub target: MetricField,
}

impl<M: MapFn> PullbackProgram<M> {
    fn assemble<T: Real>(jac: &M4<T>, g: &M4<T>) -> M4<T> {
        // (φ*g)_{μν} = ∂_μ φ^a ∂_ν φ^b g_ab
        let gj = linalg::matmul(g, jac);
        linalg::matmul(&linalg::transpose(jac), &gj)
    }
}

impl<M: MapFn> MatrixProgram for PullbackProgram<M> {
    fn at_f64(&self, x: &[f64; 4]) -> Result<M4<f64>> {
        let (y, jac) = jacobian(&self.map, x)?;
        if !self.target.chart.contains(&y) {
            return Err(GeomError::TargetOutsideChart(self.target.chart.name.clone()));
        }
        let g = self.target.program.at_f64(&y)?;
        Ok(Self::assemble(&jac, &g))
    }
    fn at_jet(&self, x: &[Jet2; 4]) -> Result<M4<Jet2>> {
        let (y, jac) = jacobian(&self.map, x)?;
        let yv = y.map(|v| v.value);
        if !self.target.chart.contains(&yv) {
            return Err(GeomError::TargetOutsideChart(self.target.chart.name.clone()));
        }
        let g = self.target.program.at_jet(&y)?;
        Ok(Self::assemble(&jac, &g))
    }
}

/// `(φ*g)_{μν}` at a point.
pub fn pullback_metric<M: MapFn>(map: &M, g: &MetricField, p: &[f64; 4]) -> Result<M4<f64>> {
    let (y, jac) = jacobian(map, p)?;
    if !g.chart.contains(&y) {
        return Err(GeomError::TargetOutsideChart(g.chart.name.clone()));
    }
    let gy = g.program.at_f64(&y)?;
    Ok(PullbackProgram::<M>::assemble(&jac, &gy))
}

/// Metric with its first and second derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: M4<f64>,
    pub ginv: M4<f64>,
    /// `dg[l][i][j] = ∂_l g_ij`
    pub dg: T3,
    /// `ddg[l][m][i][j] = ∂_l ∂_m g_ij`
    pub ddg: T4,
}

impl MetricJet {
    pub fn from_jets(gj: &M4<Jet2>) -> Result<Self> {
        let g = linalg::values(gj);
        let ginv = linalg::inverse(&g).map_err(|_| GeomError::SingularMetric(linalg::det_value(&g).abs()))?;
        let mut dg = [[[0.0; 4]; 4]; 4];
        let mut ddg = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                // symmetrise so that roundoff in the program never breaks Γ symmetry
                let (a, b) = (&gj[i][j], &gj[j][i]);
                for l in 0..4 {
                    dg[l][i][j] = 0.5 * (a.grad[l] + b.grad[l]);
                    for m in 0..4 {
                        ddg[l][m][i][j] = 0.5 * (a.hess[l][m] + b.hess[l][m]);
                    }
                }
            }
        }
        let g = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (g[i][j] + g[j][i])));
        Ok(MetricJet { g, ginv, dg, ddg })
    }

    pub fn at(g: &MetricField, p: &[f64; 4]) -> Result<Self> {
        Self::from_jets(&g.jet(p)?)
    }

    /// Christoffel symbols of the first kind `Γ_{m,ij}`.
    fn gamma_low(&self) -> T3 {
        let mut out = [[[0.0; 4]; 4]; 4];
        for m in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    out[m][i][j] = 0.5 * (self.dg[i][m][j] + self.dg[j][m][i] - self.dg[m][i][j]);
                }
            }
        }
        out
    }

    pub fn christoffels(&self) -> T3 {
        let low = self.gamma_low();
        let mut out = [[[0.0; 4]; 4]; 4];
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    out[k][i][j] = (0..4).map(|m| self.ginv[k][m] * low[m][i][j]).sum();
                }
            }
        }
        out
    }

    /// `d[l][k][i][j] = ∂_l Γ^k_ij`.
    pub fn christoffel_derivatives(&self) -> T4 {
        let low = self.gamma_low();
        let mut dginv = [[[0.0; 4]; 4]; 4];
        for l in 0..4 {
            let t = linalg::matmul(&linalg::matmul(&self.ginv, &self.dg[l]), &self.ginv);
            dginv[l] = linalg::scale(&t, -1.0);
        }
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for l in 0..4 {
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        let mut s = 0.0;
                        for m in 0..4 {
                            let dlow = 0.5 * (self.ddg[l][i][m][j] + self.ddg[l][j][m][i] - self.ddg[l][m][i][j]);
                            s += dginv[l][k][m] * low[m][i][j] + self.ginv[k][m] * dlow;
                        }
                        out[l][k][i][j] = s;
                    }
                }
            }
        }
        out
    }
}

/// Levi-Civita Christoffel symbols at `p`.
pub fn christoffels(g: &MetricField, p: &[f64; 4]) -> Result<T3> {
    Ok(MetricJet::at(g, p)?.christoffels())
}

/// Curvature data at one point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CurvaturePackage {
    pub metric: M4<f64>,
    pub inverse: M4<f64>,
    pub signature: Signature,
    pub christoffel: T3,
    pub riemann: T4,
    pub ricci: M4<f64>,
    pub scalar: f64,
    pub einstein: M4<f64>,
    pub weyl: T4,
    pub weyl_sq: f64,
    pub weyl_plus_sq: Option<f64>,
    pub weyl_minus_sq: Option<f64>,
    pub ricci_sq: f64,
    pub einstein_sq: f64,
    pub riemann_sq: f64,
}

/// `(h ⊙ k)_abcd = h_ac k_bd + h_bd k_ac − h_ad k_bc − h_bc k_ad`.
pub fn kulkarni_nomizu(h: &M4<f64>, k: &M4<f64>) -> T4 {
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    out[a][b][c][d] = h[a][c] * k[b][d] + h[b][d] * k[a][c] - h[a][d] * k[b][c] - h[b][c] * k[a][d];
                }
            }
        }
    }
    out
}

/// Raise all four indices of a covariant 4-tensor.
pub fn raise_all(t: &T4, ginv: &M4<f64>) -> T4 {
    let mut cur = *t;
    for slot in 0..4 {
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        let mut s = 0.0;
                        for e in 0..4 {
                            let mut src = idx;
                            src[slot] = e;
                            s += ginv[idx[slot]][e] * cur[src[0]][src[1]][src[2]][src[3]];
                        }
                        next[a][b][c][d] = s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Full contraction `T_abcd T^abcd`.
pub fn norm_sq4(t: &T4, ginv: &M4<f64>) -> f64 {
    let up = raise_all(t, ginv);
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    s += t[a][b][c][d] * up[a][b][c][d];
                }
            }
        }
    }
    s
}

/// Full contraction `h_ab h^ab`.
pub fn norm_sq2(h: &M4<f64>, ginv: &M4<f64>) -> f64 {
    let up = linalg::matmul(&linalg::matmul(ginv, h), ginv);
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            s += h[a][b] * up[a][b];
        }
    }
    s
}

fn perm_sign(p: [usize; 4]) -> f64 {
    let mut s = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Hodge star on contravariant bivector components, in [`BIVECTOR_BASIS`] order:
/// `(∗B)^{ab} = ½ ε^{ab}_{cd} B^{cd}` with `ε_{0123} = orientation·√|det g|`.
pub fn hodge_matrix(g: &M4<f64>, orientation: f64) -> Result<Mat6> {
    let d = linalg::det_value(g);
    if d.abs() <= linalg::SINGULAR_DET {
        return Err(GeomError::SingularMetric(d.abs()));
    }
    let ginv = linalg::inverse(g)?;
    let vol = orientation * d.abs().sqrt();
    let mut h = Mat6::zeros();
    for (row, &(a, b)) in BIVECTOR_BASIS.iter().enumerate() {
        for (col, &(c, dd)) in BIVECTOR_BASIS.iter().enumerate() {
            // coefficient of B^{cd} (c<d) in (∗B)^{ab}: ε^{ab}_{cd}
            let mut s = 0.0;
            for e in 0..4 {
                for f in 0..4 {
                    s += ginv[a][e] * ginv[b][f] * perm_sign([e, f, c, dd]);
                }
            }
            h[(row, col)] = vol * s;
        }
    }
    Ok(h)
}

pub fn hodge_star(g: &MetricField, p: &[f64; 4]) -> Result<Mat6> {
    hodge_matrix(&g.at(p)?, g.orientation)
}

/// Bivector inner product `⟨⟨u∧v, w∧z⟩⟩ = g(u,w)g(v,z) − g(u,z)g(v,w)` on basis elements.
pub fn bivector_gram(g: &M4<f64>) -> Mat6 {
    let mut out = Mat6::zeros();
    for (r, &(a, b)) in BIVECTOR_BASIS.iter().enumerate() {
        for (c, &(e, f)) in BIVECTOR_BASIS.iter().enumerate() {
            out[(r, c)] = g[a][e] * g[b][f] - g[a][f] * g[b][e];
        }
    }
    out
}

/// Curvature operator `W^{ab}_{cd}` on bivectors (rows `[ab]`, columns `[cd]`).
pub fn weyl_operator(weyl: &T4, ginv: &M4<f64>) -> Mat6 {
    let mut m = Mat6::zeros();
    for (r, &(a, b)) in BIVECTOR_BASIS.iter().enumerate() {
        for (c, &(cc, dd)) in BIVECTOR_BASIS.iter().enumerate() {
            let mut s = 0.0;
            for e in 0..4 {
                for f in 0..4 {
                    s += ginv[a][e] * ginv[b][f] * weyl[e][f][cc][dd];
                }
            }
            m[(r, c)] = s;
        }
    }
    m
}

/// `(|W⁺|², |W⁻|²)` from the Weyl tensor; `|W|² = 4 tr(𝒲²)`.
pub fn weyl_split(weyl: &T4, g: &M4<f64>, orientation: f64) -> Result<(f64, f64)> {
    let sig = Signature::of(g);
    if sig.is_lorentz() || !(sig.is_definite() || sig.is_neutral()) {
        return Err(GeomError::UnsupportedSignature(sig.to_string()));
    }
    let ginv = linalg::inverse(g)?;
    let h = hodge_matrix(g, orientation)?;
    let w = weyl_operator(weyl, &ginv);
    let id = Mat6::identity();
    let pp = (id + h) * 0.5;
    let pm = (id - h) * 0.5;
    let plus = 4.0 * (pp * w * pp * w).trace();
    let minus = 4.0 * (pm * w * pm * w).trace();
    Ok((plus, minus))
}

pub fn weyl_pm_norms(g: &MetricField, p: &[f64; 4]) -> Result<(f64, f64)> {
    let pkg = curvature(g, p)?;
    match (pkg.weyl_plus_sq, pkg.weyl_minus_sq) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(GeomError::UnsupportedSignature(pkg.signature.to_string())),
    }
}

/// Full curvature package from metric jets.
pub fn curvature_from_jet(mj: &MetricJet, orientation: f64) -> Result<CurvaturePackage> {
    let gam = mj.christoffels();
    let dgam = mj.christoffel_derivatives();
    let mut rup = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..4 {
                        s += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    rup[a][b][c][d] = s;
                }
            }
        }
    }
    let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    riemann[a][b][c][d] = (0..4).map(|e| mj.g[a][e] * rup[e][b][c][d]).sum();
                }
            }
        }
    }
    let mut ricci = [[0.0; 4]; 4];
    for b in 0..4 {
        for d in 0..4 {
            ricci[b][d] = (0..4).map(|a| rup[a][b][a][d]).sum();
        }
    }
    let ricci = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (ricci[i][j] + ricci[j][i])));
    let mut scalar = 0.0;
    for b in 0..4 {
        for d in 0..4 {
            scalar += mj.ginv[b][d] * ricci[b][d];
        }
    }
    let einstein = linalg::sub(&ricci, &linalg::scale(&mj.g, scalar / 4.0));
    let eg = kulkarni_nomizu(&einstein, &mj.g);
    let gg = kulkarni_nomizu(&mj.g, &mj.g);
    let mut weyl = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    weyl[a][b][c][d] = riemann[a][b][c][d] - 0.5 * eg[a][b][c][d] - scalar / 24.0 * gg[a][b][c][d];
                }
            }
        }
    }
    let signature = Signature::of(&mj.g);
    let (wp, wm) = match weyl_split(&weyl, &mj.g, orientation) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(GeomError::UnsupportedSignature(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(CurvaturePackage {
        metric: mj.g,
        inverse: mj.ginv,
        signature,
        christoffel: gam,
        weyl_sq: norm_sq4(&weyl, &mj.ginv),
        riemann_sq: norm_sq4(&riemann, &mj.ginv),
        ricci_sq: norm_sq2(&ricci, &mj.ginv),
        einstein_sq: norm_sq2(&einstein, &mj.ginv),
        riemann,
        ricci,
        scalar,
        einstein,
        weyl,
        weyl_plus_sq: wp,
        weyl_minus_sq: wm,
    })
}

pub fn curvature(g: &MetricField, p: &[f64; 4]) -> Result<CurvaturePackage> {
    curvature_from_jet(&MetricJet::at(g, p)?, g.orientation)
}

impl CurvaturePackage {
    /// Max of pair antisymmetries, pair symmetry and first Bianchi residuals.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.riemann;
        let mut m = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        m = m
                            .max((r[a][b][c][d] + r[b][a][c][d]).abs())
                            .max((r[a][b][c][d] + r[a][b][d][c]).abs())
                            .max((r[a][b][c][d] - r[c][d][a][b]).abs())
                            .max((r[a][b][c][d] + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        m
    }

    /// Max over contractions of the Weyl tensor on each index pair.
    pub fn weyl_trace_residual(&self) -> f64 {
        let (w, gi) = (&self.weyl, &self.inverse);
        let mut m = 0.0_f64;
        for x in 0..4 {
            for y in 0..4 {
                let mut t = [0.0; 6];
                for a in 0..4 {
                    for b in 0..4 {
                        let g = gi[a][b];
                        t[0] += g * w[a][b][x][y];
                        t[1] += g * w[a][x][b][y];
                        t[2] += g * w[a][x][y][b];
                        t[3] += g * w[x][a][b][y];
                        t[4] += g * w[x][a][y][b];
                        t[5] += g * w[x][y][a][b];
                    }
                }
                m = t.iter().fold(m, |acc, v| acc.max(v.abs()));
            }
        }
        m
    }

    pub fn einstein_max(&self) -> f64 {
        linalg::max_abs(&self.einstein)
    }

    pub fn weyl_max(&self) -> f64 {
        self.weyl.iter().flatten().flatten().flatten().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }
}

/// `nabla[l][n][m] = ∇_l j^n_m = ∂_l j^n_m − j^n_k Γ^k_ml + j^k_m Γ^n_kl`.
pub fn covariant_derivative_endomorphism(g: &MetricField, j: &StructureField, p: &[f64; 4]) -> Result<T3> {
    let gam = christoffels(g, p)?;
    let jj = j.jet(p)?;
    Ok(nabla_from(&gam, &jj))
}

pub fn nabla_from(gam: &T3, jj: &M4<Jet2>) -> T3 {
    let mut out = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for n in 0..4 {
            for m in 0..4 {
                let mut s = jj[n][m].grad[l];
                for k in 0..4 {
                    s += -jj[n][k].value * gam[k][m][l] + jj[k][m].value * gam[n][k][l];
                }
                out[l][n][m] = s;
            }
        }
    }
    out
}

/// `n[k][i][j] = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i − J^k_l (∂_i J^l_j − ∂_j J^l_i)`.
pub fn nijenhuis(j: &StructureField, p: &[f64; 4]) -> Result<T3> {
    Ok(nijenhuis_from(&j.jet(p)?))
}

pub fn nijenhuis_from(jj: &M4<Jet2>) -> T3 {
    let mut out = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for jx in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += jj[l][i].value * jj[k][jx].grad[l] - jj[l][jx].value * jj[k][i].grad[l];
                    s -= jj[k][l].value * (jj[l][jx].grad[i] - jj[l][i].grad[jx]);
                }
                out[k][i][jx] = s;
            }
        }
    }
    out
}

pub fn max_abs3(t: &T3) -> f64 {
    t.iter().flatten().flatten().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

/// Constant matrix field.
#[derive(Debug, Clone)]
pub struct ConstMatrix(pub M4<f64>);

impl MatrixFn for ConstMatrix {
    fn eval<T: Real>(&self, _x: &[T; 4]) -> Result<M4<T>> {
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| T::cst(self.0[i][j]))))
    }
}

/// Flat metric `diag(d)` on all of R⁴.
pub fn flat_metric(name: &str, d: [f64; 4]) -> MetricField {
    MetricField::new(name, Chart::euclidean("R4"), Signature::of(&linalg::diag(d)), ConstMatrix(linalg::diag(d)))
}

/// Identity map for pullback checks.
pub struct IdentityMap;

impl MapFn for IdentityMap {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<[T; 4]> {
        Ok(*x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{fd_default, NumError, ScalarProgram};

    /// Round-sphere block 4(1+u²+v²)⁻²(du²+dv²) on (x0,x1), flat on (x2,x3).
    struct SphereBlock;
    impl MatrixFn for SphereBlock {
        fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
            let f = (x[0] * x[0] + x[1] * x[1] + 1.0).powi(-2) * 4.0;
            let mut m = linalg::zeros::<T>();
            m[0][0] = f;
            m[1][1] = f;
            m[2][2] = T::one();
            m[3][3] = T::one();
            Ok(m)
        }
    }

    fn sphere_block() -> MetricField {
        MetricField::new("sphere-block", Chart::euclidean("R4"), Signature::RIEMANNIAN, SphereBlock)
    }

    #[test]
    fn flat_has_no_curvature() {
        for d in [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0]] {
            let g = flat_metric("flat", d);
            let p = [0.3, 0.1, -0.2, 0.5];
            let c = curvature(&g, &p).unwrap();
            assert!(max_abs3(&c.christoffel) == 0.0);
            assert_eq!(c.scalar, 0.0);
            assert_eq!(c.weyl_sq, 0.0);
            assert_eq!(weyl_pm_norms(&g, &p).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn sphere_block_christoffels() {
        let g = sphere_block();
        let c0 = christoffels(&g, &[0.0; 4]).unwrap();
        assert!(max_abs3(&c0) < 1e-15);
        let c1 = christoffels(&g, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((c1[0][0][0] + 1.0).abs() < 1e-14);
        // closed form for conformal metrics e^{2f}δ: Γ^u_uu = f_u with f = ln 2 − ln(1+u²+v²)
        assert!((c1[0][0][0] - (-2.0 / 2.0)).abs() < 1e-14);
    }

    /// Entry (i,j) of a metric as a scalar program, for the difference oracle.
    struct Entry<'a>(&'a dyn MatrixProgram, usize, usize);
    impl ScalarProgram for Entry<'_> {
        fn eval<T: Real>(&self, x: &[T; 4]) -> std::result::Result<T, NumError> {
            // evaluate through f64 only; the oracle never needs jets
            let p: [f64; 4] = x.map(|v| v.val());
            let m = self.0.at_f64(&p).map_err(|_| NumError::Domain { op: "metric", value: 0.0 })?;
            Ok(T::cst(m[self.1][self.2]))
        }
    }

    #[test]
    fn christoffels_against_differences() {
        let g = sphere_block();
        let p = [0.4, -0.3, 0.2, 0.1];
        let mut dg = [[[0.0; 4]; 4]; 4];
        let prog = g.program();
        for i in 0..4 {
            for j in 0..4 {
                let (gr, _) = fd_default(&Entry(prog.as_ref(), i, j), p).unwrap();
                for l in 0..4 {
                    dg[l][i][j] = gr[l];
                }
            }
        }
        let gi = linalg::inverse(&g.at(&p).unwrap()).unwrap();
        let gam = christoffels(&g, &p).unwrap();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let fd: f64 = (0..4).map(|l| 0.5 * gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j])).sum();
                    assert!((fd - gam[k][i][j]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn sphere_block_curvature() {
        let g = sphere_block();
        let c = curvature(&g, &[0.3, 0.7, 0.0, 0.0]).unwrap();
        // Gauss curvature 1 on the block: S = 2
        assert!((c.scalar - 2.0).abs() < 1e-12);
        assert!(c.symmetry_residual() < 1e-12);
        assert!(c.weyl_trace_residual() < 1e-12);
        let (wp, wm) = (c.weyl_plus_sq.unwrap(), c.weyl_minus_sq.unwrap());
        assert!((wp + wm - c.weyl_sq).abs() < 1e-12);
    }

    #[test]
    fn hodge_conventions() {
        let e = hodge_matrix(&linalg::diag([1.0; 4]), 1.0).unwrap();
        // ∗(e1∧e2) = e3∧e4: column 0 maps to row 5
        assert_eq!(e[(5, 0)], 1.0);
        assert!((e * e - Mat6::identity()).abs().max() < 1e-15);
        let n = hodge_matrix(&linalg::diag([1.0, 1.0, -1.0, -1.0]), 1.0).unwrap();
        assert!((n * n - Mat6::identity()).abs().max() < 1e-15);
        let l = hodge_matrix(&linalg::diag([1.0, 1.0, 1.0, -1.0]), 1.0).unwrap();
        assert!((l * l + Mat6::identity()).abs().max() < 1e-15);
        let gram = bivector_gram(&linalg::diag([1.0, 1.0, -1.0, -1.0]));
        assert_eq!(gram[(1, 1)], -1.0);
    }

    #[test]
    fn lorentz_split_unsupported() {
        let g = flat_metric("mink", [1.0, 1.0, 1.0, -1.0]);
        assert!(matches!(weyl_pm_norms(&g, &[0.0; 4]), Err(GeomError::UnsupportedSignature(_))));
    }

    #[test]
    fn identity_structure_is_parallel() {
        let g = sphere_block();
        let j = StructureField::new("id", Chart::euclidean("R4"), 1.0, ConstMatrix(linalg::identity()));
        let n = covariant_derivative_endomorphism(&g, &j, &[0.2, 0.4, 0.0, 0.0]).unwrap();
        assert!(max_abs3(&n) < 1e-15);
        assert!(max_abs3(&nijenhuis(&j, &[0.1; 4]).unwrap()) == 0.0);
    }

    #[test]
    fn identity_pullback() {
        let g = sphere_block();
        let p = [0.2, -0.1, 0.3, 0.0];
        let pb = pullback_metric(&IdentityMap, &g, &p).unwrap();
        assert!(linalg::max_abs_diff(&pb, &g.at(&p).unwrap()) < 1e-15);
    }

    #[test]
    fn singular_metric_rejected() {
        let g = flat_metric("deg", [1.0, 1.0, 1.0, 0.0]);
        assert!(matches!(curvature(&g, &[0.0; 4]), Err(GeomError::SingularMetric(_))));
    }
}
