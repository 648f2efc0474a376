//! Spaces of oriented geodesics of the quadrics `S³_p ⊂ R⁴_p`, as oriented planes `x ∧ y`.
//!
//! Chart: the plane spanned by the columns of `[[1,0],[0,1],[u1,u2],[u3,u4]]`.
//! Bivectors use the basis `e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::ChartBinding;
use crate::jet::{Real, Tangent};
use crate::linalg::{self, M4};
use crate::structures::{self, StructureKind};
use crate::tensor::{AssociatedProgram, Chart, MatrixFn, MetricField, Signature, StructureField};

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Pivot below which the chart or frame is considered degenerate.
pub const PIVOT_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmbientSignature {
    /// number of negative directions of `⟨,⟩_p`
    pub p: u8,
    /// `g_p(y, y)`
    pub epsilon: i8,
}

impl AmbientSignature {
    pub const ROWS: [AmbientSignature; 6] = [
        AmbientSignature { p: 0, epsilon: 1 },
        AmbientSignature { p: 1, epsilon: 1 },
        AmbientSignature { p: 1, epsilon: -1 },
        AmbientSignature { p: 2, epsilon: 1 },
        AmbientSignature { p: 2, epsilon: -1 },
        AmbientSignature { p: 3, epsilon: -1 },
    ];

    pub fn new(p: u8, epsilon: i8) -> Result<Self> {
        if p > 3 || (epsilon != 1 && epsilon != -1) {
            return Err(GeomError::UnsupportedSignature(format!("(p, epsilon) = ({p}, {epsilon})")));
        }
        Ok(AmbientSignature { p, epsilon })
    }

    pub fn eta(&self) -> [f64; 4] {
        std::array::from_fn(|k| if k < self.p as usize { -1.0 } else { 1.0 })
    }

    pub fn eps(&self) -> f64 {
        self.epsilon as f64
    }

    pub fn is_admissible(&self) -> bool {
        Self::ROWS.contains(self)
    }

    fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(GeomError::UnsupportedSignature(format!("{self} has no oriented geodesics of this type")))
        }
    }

    /// A chart point where the frame is well conditioned for this row.
    pub fn sample_center(&self) -> [f64; 4] {
        match (self.p, self.epsilon) {
            (0, _) => [0.1, -0.2, 0.15, 0.05],
            (1, 1) => [1.5, 0.1, 0.1, 0.1],
            (1, _) => [1.5, 1.5, 0.1, 0.0],
            (2, 1) => [1.5, 0.1, 0.1, 1.5],
            (2, _) => [1.5, 0.1, 0.1, 0.05],
            _ => [0.1, 0.1, 1.5, 0.1],
        }
    }

    /// `n` chart points within `±radius` of the row's center.
    pub fn sample_points(&self, rng: &mut rand_chacha::ChaCha8Rng, n: usize, radius: f64) -> Vec<[f64; 4]> {
        let c = self.sample_center();
        crate::sampling::box_points(rng, n, -radius, radius).into_iter().map(|d| std::array::from_fn(|k| c[k] + d[k])).collect()
    }
}

impl fmt::Display for AmbientSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.epsilon > 0 { '+' } else { '-' };
        write!(f, "L{s}(S3_{})", self.p)
    }
}

fn ip<T: Real>(eta: &[f64; 4], a: &[T; 4], b: &[T; 4]) -> T {
    let mut s = a[0] * b[0] * eta[0];
    for k in 1..4 {
        s += a[k] * b[k] * eta[k];
    }
    s
}

fn axpy<T: Real>(a: &[T; 4], s: T, b: &[T; 4]) -> [T; 4] {
    std::array::from_fn(|k| a[k] + s * b[k])
}

/// Orthonormal pair `(x, y)` with `⟨x,x⟩ = 1`, `⟨y,y⟩ = ε`, `⟨x,y⟩ = 0`.
pub fn frame_t<T: Real>(sig: AmbientSignature, u: &[T; 4]) -> Result<([T; 4], [T; 4])> {
    let eta = sig.eta();
    let (o, z) = (T::one(), T::zero());
    let c1 = [o, z, u[0], u[2]];
    let c2 = [z, o, u[1], u[3]];
    let n = ip(&eta, &c1, &c1);
    if n.val().abs() < PIVOT_MIN {
        return Err(GeomError::ChartDegeneracy(n.val()));
    }
    if n.val() < 0.0 {
        return Err(GeomError::NormalizationImpossible(format!("<x,x> = {:e} for {sig}", n.val())));
    }
    let x = c1.map(|v| v / n.sqrt());
    let y0 = axpy(&c2, -ip(&eta, &c2, &x), &x);
    let m = ip(&eta, &y0, &y0) * sig.eps();
    if m.val().abs() < PIVOT_MIN {
        return Err(GeomError::ChartDegeneracy(m.val()));
    }
    if m.val() < 0.0 {
        return Err(GeomError::NormalizationImpossible(format!("<y,y> has the wrong sign for {sig}")));
    }
    Ok((x, y0.map(|v| v / m.sqrt())))
}

pub fn bivector_t<T: Real>(x: &[T; 4], y: &[T; 4]) -> [T; 6] {
    PAIRS.map(|(i, j)| x[i] * y[j] - x[j] * y[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrientedPlanePoint {
    pub u: [f64; 4],
    pub x: [f64; 4],
    pub y: [f64; 4],
}

impl OrientedPlanePoint {
    pub fn bivector(&self) -> [f64; 6] {
        bivector_t(&self.x, &self.y)
    }

    /// Max of `|⟨x,x⟩ − 1|`, `|⟨y,y⟩ − ε|`, `|⟨x,y⟩|`.
    pub fn normalization_residual(&self, sig: AmbientSignature) -> f64 {
        let eta = sig.eta();
        (ip(&eta, &self.x, &self.x) - 1.0).abs().max((ip(&eta, &self.y, &self.y) - sig.eps()).abs()).max(ip(&eta, &self.x, &self.y).abs())
    }
}

pub fn chart_to_plane(sig: AmbientSignature, u: &[f64; 4]) -> Result<OrientedPlanePoint> {
    let (x, y) = frame_t(sig, u)?;
    Ok(OrientedPlanePoint { u: *u, x, y })
}

/// `b ∧ b` coefficient divided by 2; zero exactly on decomposable bivectors.
pub fn decomposability(b: &[f64; 6]) -> f64 {
    b[0] * b[5] - b[1] * b[4] + b[2] * b[3]
}

/// Frame, bivector and their chart derivatives `dx[mu]`, `dy[mu]`, `db[mu]`.
struct FrameJet<T> {
    x: [T; 4],
    y: [T; 4],
    dx: [[T; 4]; 4],
    dy: [[T; 4]; 4],
}

fn frame_jet<T: Real>(sig: AmbientSignature, u: &[T; 4]) -> Result<FrameJet<T>> {
    let mut out = FrameJet { x: [T::zero(); 4], y: [T::zero(); 4], dx: [[T::zero(); 4]; 4], dy: [[T::zero(); 4]; 4] };
    for mu in 0..4 {
        let tu: [Tangent<T>; 4] = std::array::from_fn(|k| Tangent::new(u[k], T::cst(if k == mu { 1.0 } else { 0.0 })));
        let (x, y) = frame_t(sig, &tu)?;
        out.x = x.map(|v| v.v);
        out.y = y.map(|v| v.v);
        out.dx[mu] = x.map(|v| v.d);
        out.dy[mu] = y.map(|v| v.d);
    }
    Ok(out)
}

fn chart(sig: AmbientSignature) -> Chart {
    Chart::new(&format!("grassmannian {sig}"), ChartBinding::real(["u1", "u2", "u3", "u4"]), move |u| normal_frame(sig, u).is_ok())
}

/// `G_p`: pullback of `⟨⟨,⟩⟩_p` through `u ↦ x(u) ∧ y(u)`.
#[derive(Debug, Clone, Copy)]
pub struct GpProgram(pub AmbientSignature);

impl MatrixFn for GpProgram {
    fn eval<T: Real>(&self, u: &[T; 4]) -> Result<M4<T>> {
        let eta = self.0.eta();
        let w = PAIRS.map(|(i, j)| eta[i] * eta[j]);
        let fj = frame_jet(self.0, u)?;
        // d(x∧y) = dx∧y + x∧dy
        let db: [[T; 6]; 4] = std::array::from_fn(|mu| {
            let a = bivector_t(&fj.dx[mu], &fj.y);
            let b = bivector_t(&fj.x, &fj.dy[mu]);
            std::array::from_fn(|k| a[k] + b[k])
        });
        Ok(std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                let mut s = T::zero();
                for k in 0..6 {
                    s += db[m][k] * db[n][k] * w[k];
                }
                s
            })
        }))
    }
}

pub fn metric_gp(sig: AmbientSignature) -> Result<MetricField> {
    sig.require_admissible()?;
    let c = sig.sample_center();
    let g = GpProgram(sig).eval(&c)?;
    let (pos, neg) = linalg::inertia(&g, 1e-12);
    Ok(MetricField::new(&format!("G_p {sig}"), chart(sig), Signature { pos, neg }, GpProgram(sig)))
}

/// Normals `n1, n2` spanning `(x∧y)^⊥`, with signs `s_i = ⟨n_i,n_i⟩` and `(x,y,n1,n2)` oriented.
fn normal_frame<T: Real>(sig: AmbientSignature, u: &[T; 4]) -> Result<([T; 4], [T; 4], f64, f64)> {
    let (x, y) = frame_t(sig, u)?;
    normals(sig, &x, &y)
}

fn normals<T: Real>(sig: AmbientSignature, x: &[T; 4], y: &[T; 4]) -> Result<([T; 4], [T; 4], f64, f64)> {
    let eta = sig.eta();
    let proj = |v: [T; 4]| -> [T; 4] {
        let v1 = axpy(&v, -ip(&eta, &v, x), x);
        axpy(&v1, -(ip(&eta, &v, y) * sig.eps()), y)
    };
    let unit = |k: usize| -> [T; 4] { std::array::from_fn(|i| T::cst(if i == k { 1.0 } else { 0.0 })) };
    let n1 = proj(unit(2));
    let q1 = ip(&eta, &n1, &n1);
    if q1.val().abs() < PIVOT_MIN {
        return Err(GeomError::FrameDegeneracy(q1.val()));
    }
    let s1 = q1.val().signum();
    let n1 = n1.map(|v| v / (q1 * s1).sqrt());
    let n2 = proj(unit(3));
    let n2 = axpy(&n2, -(ip(&eta, &n2, &n1) * s1), &n1);
    let q2 = ip(&eta, &n2, &n2);
    if q2.val().abs() < PIVOT_MIN {
        return Err(GeomError::FrameDegeneracy(q2.val()));
    }
    let s2 = q2.val().signum();
    let mut n2 = n2.map(|v| v / (q2 * s2).sqrt());
    let d = linalg::det(&[*x, *y, n1, n2]).val();
    if d.abs() < PIVOT_MIN {
        return Err(GeomError::FrameDegeneracy(d));
    }
    if d < 0.0 {
        n2 = n2.map(|v| -v);
    }
    Ok((n1, n2, s1, s2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeodesicStructureKind {
    J,
    JPrime,
    JStar,
}

/// `J`, `J′` or `J* = −J′J` in chart components.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicStructure {
    pub sig: AmbientSignature,
    pub kind: GeodesicStructureKind,
}

impl MatrixFn for GeodesicStructure {
    fn eval<T: Real>(&self, u: &[T; 4]) -> Result<M4<T>> {
        let eta = self.sig.eta();
        let fj = frame_jet(self.sig, u)?;
        let (n1, n2, s1, s2) = normals(self.sig, &fj.x, &fj.y)?;
        // tangent vector ∂_mu ↔ x∧X + y∧Y with X = P dy, Y = −P dx; coordinates in (n1, n2)
        let mut a = linalg::zeros::<T>();
        for mu in 0..4 {
            a[0][mu] = ip(&eta, &fj.dy[mu], &n1) * s1;
            a[1][mu] = ip(&eta, &fj.dy[mu], &n2) * s2;
            a[2][mu] = -(ip(&eta, &fj.dx[mu], &n1) * s1);
            a[3][mu] = -(ip(&eta, &fj.dx[mu], &n2) * s2);
        }
        let ai = linalg::inverse(&a).map_err(|_| GeomError::FrameDegeneracy(linalg::det(&a).val()))?;
        let (o, z) = (T::one(), T::zero());
        let r = T::cst(-s1 * s2);
        // J n1 = n2, J n2 = −(s2/s1) n1 on both X and Y
        let jm = [[z, r, z, z], [o, z, z, z], [z, z, z, r], [z, z, o, z]];
        // J′: (X, Y) ↦ (∓Y, X)
        let e = T::cst(-self.sig.eps());
        let jp = [[z, z, e, z], [z, z, z, e], [o, z, z, z], [z, o, z, z]];
        let inner = match self.kind {
            GeodesicStructureKind::J => jm,
            GeodesicStructureKind::JPrime => jp,
            GeodesicStructureKind::JStar => linalg::scale(&linalg::matmul(&jp, &jm), -1.0),
        };
        Ok(linalg::matmul(&ai, &linalg::matmul(&inner, &a)))
    }
}

/// Expected `J²` sign per structure.
fn squares(sig: AmbientSignature) -> [f64; 3] {
    let pm = sig.eps();
    let sign_p = if sig.p.is_multiple_of(2) { 1.0 } else { -1.0 };
    let j = if sig.p == 1 || sig.p == 2 { -pm * sign_p } else { -1.0 };
    [j, -pm, sign_p]
}

pub fn structures_jjp_jstar(sig: AmbientSignature) -> Result<(StructureField, StructureField, StructureField)> {
    sig.require_admissible()?;
    let sq = squares(sig);
    let mk = |name: &str, kind, s| StructureField::new(name, chart(sig), s, GeodesicStructure { sig, kind });
    Ok((
        mk("J", GeodesicStructureKind::J, sq[0]),
        mk("J'", GeodesicStructureKind::JPrime, sq[1]),
        mk("J*", GeodesicStructureKind::JStar, sq[2]),
    ))
}

/// Hodge star on `Λ²(R⁴_p)`: `∗(u∧v) ∧ u∧v = ⟨⟨u∧v, u∧v⟩⟩ e1∧e2∧e3∧e4`.
pub fn star_matrix(sig: AmbientSignature) -> [[f64; 6]; 6] {
    let eta = sig.eta();
    let mut s = [[0.0; 6]; 6];
    for (i_idx, &(i, j)) in PAIRS.iter().enumerate() {
        let rest: Vec<usize> = (0..4).filter(|&m| m != i && m != j).collect();
        let (k, l) = (rest[0], rest[1]);
        let perm = [i, j, k, l];
        let mut sgn = 1.0;
        for a in 0..4 {
            for b in a + 1..4 {
                if perm[a] > perm[b] {
                    sgn = -sgn;
                }
            }
        }
        let k_idx = PAIRS.iter().position(|&q| q == (k, l)).unwrap_or(0);
        s[k_idx][i_idx] = eta[i] * eta[j] * sgn;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HodgeCheck {
    /// max |∗ dB + dB J*|
    pub minus_residual: f64,
    /// max |∗ dB − dB J*|
    pub plus_residual: f64,
    /// `σ` with `∗|_T = −σ J*`, when one of the residuals vanishes
    pub sigma: Option<i8>,
}

/// Compare the ambient Hodge star on the embedded tangent space with `J*`.
pub fn hodge_check(sig: AmbientSignature, u: &[f64; 4], tol: f64) -> Result<HodgeCheck> {
    sig.require_admissible()?;
    let fj = frame_jet(sig, u)?;
    let db: [[f64; 6]; 4] = std::array::from_fn(|mu| {
        let a = bivector_t(&fj.dx[mu], &fj.y);
        let b = bivector_t(&fj.x, &fj.dy[mu]);
        std::array::from_fn(|k| a[k] + b[k])
    });
    let js = GeodesicStructure { sig, kind: GeodesicStructureKind::JStar }.eval(u)?;
    let star = star_matrix(sig);
    let (mut minus, mut plus) = (0.0_f64, 0.0_f64);
    for mu in 0..4 {
        for k in 0..6 {
            let s: f64 = (0..6).map(|l| star[k][l] * db[mu][l]).sum();
            let t: f64 = (0..4).map(|n| db[n][k] * js[n][mu]).sum();
            minus = minus.max((s + t).abs());
            plus = plus.max((s - t).abs());
        }
    }
    let sigma = if minus < tol {
        Some(1)
    } else if plus < tol {
        Some(-1)
    } else {
        None
    };
    Ok(HodgeCheck { minus_residual: minus, plus_residual: plus, sigma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareType {
    Complex,
    Para,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureType {
    pub square: SquareType,
    pub isometry: StructureKind,
}

impl fmt::Display for StructureType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.square {
            SquareType::Complex => "complex",
            SquareType::Para => "para",
            SquareType::Other => "other",
        };
        let i = match self.isometry {
            StructureKind::Isometric => "isometric",
            StructureKind::AntiIsometric => "anti",
            StructureKind::Neither => "neither",
        };
        write!(f, "{s}/{i}")
    }
}

/// Rows of the classification table for `(J, J′, J*)`.
pub fn structure_table_expected(sig: AmbientSignature) -> Option<[StructureType; 3]> {
    use SquareType::*;
    use StructureKind::*;
    let t = |square, isometry| StructureType { square, isometry };
    Some(match (sig.p, sig.epsilon) {
        (0, 1) => [t(Complex, Isometric), t(Complex, Isometric), t(Para, Isometric)],
        (1, 1) => [t(Para, AntiIsometric), t(Complex, Isometric), t(Complex, AntiIsometric)],
        (1, -1) => [t(Complex, Isometric), t(Para, AntiIsometric), t(Complex, AntiIsometric)],
        (2, 1) => [t(Complex, Isometric), t(Complex, Isometric), t(Para, Isometric)],
        (2, -1) => [t(Para, AntiIsometric), t(Para, AntiIsometric), t(Para, Isometric)],
        (3, -1) => [t(Complex, Isometric), t(Para, AntiIsometric), t(Complex, AntiIsometric)],
        _ => return None,
    })
}

/// Squared sign and isometry type of `j` against `g`.
pub fn structure_type(g: &M4<f64>, j: &M4<f64>) -> Result<StructureType> {
    let sq = linalg::matmul(j, j);
    let id = linalg::identity::<f64>();
    let tol = 1e-8;
    if linalg::max_abs_diff(&sq, &id) < tol {
        let c = structures::classify(g, j)?;
        Ok(StructureType { square: SquareType::Para, isometry: c.kind })
    } else if linalg::max_abs(&linalg::add(&sq, &id)) < tol {
        Ok(StructureType { square: SquareType::Complex, isometry: structures::classify_complex(g, j)? })
    } else {
        Ok(StructureType { square: SquareType::Other, isometry: StructureKind::Neither })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureTableRow {
    pub label: String,
    pub p: u8,
    pub epsilon: i8,
    pub point: [f64; 4],
    pub expected: [String; 3],
    pub computed: [String; 3],
    pub matches: bool,
}

pub fn structure_table_verify(sig: AmbientSignature, u: &[f64; 4]) -> Result<StructureTableRow> {
    let expected = structure_table_expected(sig).ok_or_else(|| GeomError::UnsupportedSignature(format!("{sig} is not a table row")))?;
    let g = metric_gp(sig)?.at(u)?;
    let (j, jp, js) = structures_jjp_jstar(sig)?;
    let computed = [structure_type(&g, &j.at(u)?)?, structure_type(&g, &jp.at(u)?)?, structure_type(&g, &js.at(u)?)?];
    Ok(StructureTableRow {
        label: sig.to_string(),
        p: sig.p,
        epsilon: sig.epsilon,
        point: *u,
        expected: expected.map(|t| t.to_string()),
        computed: computed.map(|t| t.to_string()),
        matches: computed == expected,
    })
}

/// `G′_p = G_p(J*·,·)`; only defined when `J*` is an isometric paracomplex structure.
pub fn metric_gp_prime(sig: AmbientSignature) -> Result<MetricField> {
    let expected = structure_table_expected(sig).ok_or_else(|| GeomError::UnsupportedSignature(format!("{sig} is not a table row")))?;
    let c = sig.sample_center();
    let g = metric_gp(sig)?;
    let (_, _, js) = structures_jjp_jstar(sig)?;
    let t = structure_type(&g.at(&c)?, &js.at(&c)?)?;
    let want = StructureType { square: SquareType::Para, isometry: StructureKind::Isometric };
    if t != want || expected[2] != want {
        return Err(GeomError::NotIsometric(format!("J* is {t} on {sig}")));
    }
    let gp = linalg::matmul(&g.at(&c)?, &js.at(&c)?);
    let (pos, neg) = linalg::inertia(&gp, 1e-12);
    Ok(MetricField::new(&format!("G'_p {sig}"), chart(sig), Signature { pos, neg }, AssociatedProgram { g: g.program(), j: js.program() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::structures::parallel_residual;
    use crate::tensor::curvature;

    #[test]
    fn origin_plane_is_coordinate_plane() {
        let sig = AmbientSignature::new(0, 1).unwrap();
        let pt = chart_to_plane(sig, &[0.0; 4]).unwrap();
        assert_eq!(pt.x, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(pt.y, [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn normalization_and_decomposability() {
        let mut rng = sampling::rng(1);
        for sig in AmbientSignature::ROWS {
            for u in sig.sample_points(&mut rng, 10, 0.05) {
                let pt = chart_to_plane(sig, &u).unwrap();
                assert!(pt.normalization_residual(sig) < 1e-10);
                assert!(decomposability(&pt.bivector()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hyperbolic_has_no_spacelike_geodesic_space() {
        let sig = AmbientSignature::new(3, 1).unwrap();
        let mut rng = sampling::rng(2);
        for u in sampling::box_points(&mut rng, 20, -3.0, 3.0) {
            assert!(matches!(chart_to_plane(sig, &u), Err(GeomError::NormalizationImpossible(_))));
        }
        assert!(metric_gp(sig).is_err());
    }

    #[test]
    fn sphere_row_is_riemannian_einstein() {
        let sig = AmbientSignature::new(0, 1).unwrap();
        let g = metric_gp(sig).unwrap();
        assert_eq!(g.signature, Signature::RIEMANNIAN);
        for u in sig.sample_points(&mut sampling::rng(3), 3, 0.05) {
            let c = curvature(&g, &u).unwrap();
            assert!(c.einstein_max() < 1e-8);
            assert_eq!(c.signature, Signature::RIEMANNIAN);
        }
    }

    #[test]
    fn table_rows_match() {
        for sig in AmbientSignature::ROWS {
            let row = structure_table_verify(sig, &sig.sample_center()).unwrap();
            assert!(row.matches, "{row:?}");
        }
    }

    #[test]
    fn squares_agree_with_structure_fields() {
        for sig in AmbientSignature::ROWS {
            let (j, jp, js) = structures_jjp_jstar(sig).unwrap();
            let u = sig.sample_center();
            for s in [&j, &jp, &js] {
                assert!(s.square_residual(&u).unwrap() < 1e-10, "{sig} {}", s.name);
            }
            let sign = if sig.p % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(js.square, sign);
        }
    }

    #[test]
    fn structures_commute_and_are_parallel() {
        let mut rng = sampling::rng(4);
        for sig in AmbientSignature::ROWS {
            let g = metric_gp(sig).unwrap();
            let (j, jp, js) = structures_jjp_jstar(sig).unwrap();
            let pts = sig.sample_points(&mut rng, 3, 0.05);
            for u in &pts {
                let (a, b, c) = (j.at(u).unwrap(), jp.at(u).unwrap(), js.at(u).unwrap());
                for (x, y) in [(a, b), (a, c), (b, c)] {
                    let comm = linalg::sub(&linalg::matmul(&x, &y), &linalg::matmul(&y, &x));
                    assert!(linalg::max_abs(&comm) < 1e-10);
                }
            }
            for s in [&j, &jp, &js] {
                assert!(parallel_residual(&g, s, &pts).unwrap() < 1e-8, "{sig} {}", s.name);
            }
        }
    }

    #[test]
    fn hodge_star_is_j_star_up_to_sign() {
        for sig in AmbientSignature::ROWS {
            let h = hodge_check(sig, &sig.sample_center(), 1e-9).unwrap();
            assert!(h.sigma.is_some(), "{sig} {h:?}");
        }
    }

    #[test]
    fn gp_prime_rows() {
        for sig in AmbientSignature::ROWS {
            let r = metric_gp_prime(sig);
            if structure_table_expected(sig).unwrap()[2].square == SquareType::Para {
                let g = r.unwrap();
                assert_eq!(g.signature, Signature::NEUTRAL);
                let c = curvature(&g, &sig.sample_center()).unwrap();
                assert!(c.scalar.abs() < 1e-8 && c.weyl_sq.abs() < 1e-8, "{sig}");
            } else {
                assert!(matches!(r, Err(GeomError::NotIsometric(_))));
            }
        }
    }

    #[test]
    fn star_matrix_is_an_involution_up_to_sign() {
        for sig in AmbientSignature::ROWS {
            let s = star_matrix(sig);
            let sign = if sig.p % 2 == 0 { 1.0 } else { -1.0 };
            for a in 0..6 {
                for b in 0..6 {
                    let v: f64 = (0..6).map(|k| s[a][k] * s[k][b]).sum();
                    assert_eq!(v, if a == b { sign } else { 0.0 });
                }
            }
        }
    }
}
