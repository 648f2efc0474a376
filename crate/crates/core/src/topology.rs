//! Euler characteristic and signature: closed-form arithmetic and curvature quadrature.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::ChartBinding;
use crate::jet::Real;
use crate::linalg::{self, M4};
use crate::tensor::{curvature, Chart, MatrixFn, MetricField, Signature};

/// Relative tolerance on the grid's total measure.
pub const VOLUME_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologicalProfile {
    pub name: String,
    pub chi: i64,
    pub tau: i64,
}

impl TopologicalProfile {
    pub fn new(name: &str, chi: i64, tau: i64) -> Self {
        TopologicalProfile { name: name.to_string(), chi, tau }
    }
    pub fn k3() -> Self {
        Self::new("K3", 24, 16)
    }
    pub fn s2xs2() -> Self {
        Self::new("S2xS2", 4, 0)
    }
    pub fn t4() -> Self {
        Self::new("T4", 0, 0)
    }
    pub fn s4() -> Self {
        Self::new("S4", 2, 0)
    }
    pub fn cp2() -> Self {
        Self::new("CP2", 3, 1)
    }
    /// `CP² # k CP̄²`.
    pub fn cp2_blowup(k: u32) -> Self {
        let k = i64::from(k);
        Self::new(&format!("CP2#{k}CP2bar"), 3 + k, 1 - k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `χ < 3|τ|/2`: no Einstein metric
    NoEinsteinMetric,
    /// the mod-4 conditions fail: no neutral metric, so no oriented plane field
    NoPlaneField,
    /// `τ ≠ 0`: an isometric structure for an Einstein metric is never parallel
    CannotBeParallel,
    NoObstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub profile: TopologicalProfile,
    /// `χ ≥ 3|τ|/2`
    pub hitchin_thorpe: bool,
    pub chi_plus_tau: i64,
    pub chi_minus_tau: i64,
    /// `χ ± τ ≡ 0 mod 4`
    pub neutral_conditions: bool,
    /// `τ = 0`, needed for a parallel isometric structure over an Einstein metric
    pub signature_vanishes: bool,
    /// `τ = 0` and `χ ≥ 0`, needed for a closed conformally flat scalar flat neutral
    /// metric with a parallel isometric structure
    pub neutral_flat_allowed: bool,
    pub verdict: Verdict,
}

pub fn obstruction_report(profile: &TopologicalProfile) -> ObstructionReport {
    let (chi, tau) = (profile.chi, profile.tau);
    let hitchin_thorpe = 2 * chi >= 3 * tau.abs();
    let (cp, cm) = (chi + tau, chi - tau);
    let neutral_conditions = cp.rem_euclid(4) == 0 && cm.rem_euclid(4) == 0;
    let signature_vanishes = tau == 0;
    let verdict = if !hitchin_thorpe {
        Verdict::NoEinsteinMetric
    } else if !neutral_conditions {
        Verdict::NoPlaneField
    } else if !signature_vanishes {
        Verdict::CannotBeParallel
    } else {
        Verdict::NoObstruction
    };
    ObstructionReport {
        profile: profile.clone(),
        hitchin_thorpe,
        chi_plus_tau: cp,
        chi_minus_tau: cm,
        neutral_conditions,
        signature_vanishes,
        neutral_flat_allowed: signature_vanishes && chi >= 0,
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupRow {
    pub k: u32,
    pub report: ObstructionReport,
    /// Einstein metrics are known to exist for `k ≤ 8`
    pub einstein_known: bool,
}

/// `CP² # k CP̄²` for `k = 0..=kmax`.
pub fn blowup_table(kmax: u32) -> Vec<BlowupRow> {
    (0..=kmax).map(|k| BlowupRow { k, report: obstruction_report(&TopologicalProfile::cp2_blowup(k)), einstein_known: k <= 8 }).collect()
}

/// A closed surface in a chart `(s, ϕ)` covering it up to measure zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ClosedSurface {
    /// `(1 + warp·s²)/κ · (ds²/(1 − s²) + (1 − s²) dϕ²)` with `s = cos θ`
    Sphere { kappa: f64, warp: f64 },
    /// `ds² + dϕ²` on `[0, 2π)²`
    FlatTorus,
}

impl ClosedSurface {
    pub fn round(kappa: f64) -> Self {
        ClosedSurface::Sphere { kappa, warp: 0.0 }
    }

    pub fn euler_characteristic(&self) -> i64 {
        match self {
            ClosedSurface::Sphere { .. } => 2,
            ClosedSurface::FlatTorus => 0,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            ClosedSurface::Sphere { kappa, warp } => 2.0 * PI * (2.0 + 2.0 * warp / 3.0) / kappa,
            ClosedSurface::FlatTorus => 4.0 * PI * PI,
        }
    }

    fn contains(&self, s: f64) -> bool {
        match self {
            ClosedSurface::Sphere { .. } => s.abs() < 1.0,
            ClosedSurface::FlatTorus => true,
        }
    }

    fn diag<T: Real>(&self, s: T) -> Result<(T, T)> {
        match *self {
            ClosedSurface::Sphere { kappa, warp } => {
                let c = (s * s * warp + 1.0) / kappa;
                let q = -(s * s) + 1.0;
                Ok((c * q.checked_recip()?, c * q))
            }
            ClosedSurface::FlatTorus => Ok((T::one(), T::one())),
        }
    }

    /// Nodes and weights along `s`.
    fn s_rule(&self, n: usize) -> Vec<(f64, f64)> {
        match self {
            ClosedSurface::Sphere { .. } => gauss_legendre(n),
            ClosedSurface::FlatTorus => periodic(n),
        }
    }
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

fn periodic(n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let h = 2.0 * PI / n as f64;
    (0..n).map(|k| (k as f64 * h, h)).collect()
}

/// `g1 + ε g2` on a product of closed surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedProduct {
    pub first: ClosedSurface,
    pub second: ClosedSurface,
    pub epsilon: f64,
}

impl ClosedProduct {
    pub fn new(first: ClosedSurface, second: ClosedSurface, epsilon: f64) -> Self {
        ClosedProduct { first, second, epsilon }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.first.euler_characteristic() * self.second.euler_characteristic()
    }

    pub fn volume(&self) -> f64 {
        self.first.area() * self.second.area()
    }

    pub fn metric(&self) -> MetricField {
        let (a, b) = (self.first, self.second);
        let chart = Chart::new("(s1,phi1,s2,phi2)", ChartBinding::real(["s1", "phi1", "s2", "phi2"]), move |x| {
            a.contains(x[0]) && b.contains(x[2])
        });
        let sig = if self.epsilon > 0.0 { Signature::RIEMANNIAN } else { Signature::NEUTRAL };
        MetricField::new(&format!("{a:?} x {b:?}, eps = {}", self.epsilon), chart, sig, *self)
    }
}

impl MatrixFn for ClosedProduct {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let (a0, a1) = self.first.diag(x[0])?;
        let (b0, b1) = self.second.diag(x[2])?;
        let e = self.epsilon;
        let z = T::zero();
        Ok([[a0, z, z, z], [z, a1, z, z], [z, z, b0 * e, z], [z, z, z, b1 * e]])
    }
}

/// Tensor-product rule on a closed product chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<([f64; 4], f64)>,
    pub expected_volume: f64,
    pub per_axis: usize,
    /// true when the rotation angles were integrated out exactly
    pub collapsed: bool,
}

impl QuadratureGrid {
    /// `n` nodes per axis. With `collapse`, each `ϕ` axis (and the `s` axis of a flat
    /// torus) is replaced by one node carrying the full period, which is exact
    /// because every [`ClosedSurface`] metric is invariant along those axes.
    pub fn product(p: &ClosedProduct, n: usize, collapse: bool) -> Self {
        type Nodes = Vec<(f64, f64)>;
        let axis = |f: &ClosedSurface| -> (Nodes, Nodes) {
            let full = 2.0 * PI;
            let phi = if collapse { vec![(0.0, full)] } else { periodic(n) };
            let s = match (f, collapse) {
                (ClosedSurface::FlatTorus, true) => vec![(0.0, full)],
                _ => f.s_rule(n),
            };
            (s, phi)
        };
        let (s1, p1) = axis(&p.first);
        let (s2, p2) = axis(&p.second);
        let mut nodes = Vec::with_capacity(s1.len() * p1.len() * s2.len() * p2.len());
        for &(a, wa) in &s1 {
            for &(b, wb) in &p1 {
                for &(c, wc) in &s2 {
                    for &(d, wd) in &p2 {
                        nodes.push(([a, b, c, d], wa * wb * wc * wd));
                    }
                }
            }
        }
        QuadratureGrid { nodes, expected_volume: p.volume(), per_axis: n, collapsed: collapse }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub measure: f64,
    pub expected_volume: f64,
    pub nodes: usize,
}

fn integrate(g: &MetricField, grid: &QuadratureGrid, f: impl Fn(&crate::tensor::CurvaturePackage) -> Result<f64>) -> Result<Estimate> {
    let mut measure = 0.0;
    let mut terms = Vec::with_capacity(grid.nodes.len());
    for (x, w) in &grid.nodes {
        let c = curvature(g, x)?;
        let dv = linalg::det_value(&c.metric).abs().sqrt() * w;
        measure += dv;
        terms.push(f(&c)? * dv);
    }
    if ((measure - grid.expected_volume) / grid.expected_volume).abs() > VOLUME_TOL {
        return Err(GeomError::GridTooCoarse { measure, expected: grid.expected_volume });
    }
    Ok(Estimate { value: pairwise_sum(&terms), measure, expected_volume: grid.expected_volume, nodes: grid.nodes.len() })
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `ε/(32π²) ∫ |W|² − 2|Ric|² + ⅔ S² dV`, with `ε = −1` for neutral metrics.
pub fn cgb_estimate(g: &MetricField, grid: &QuadratureGrid) -> Result<Estimate> {
    let eps = g.signature.cgb_sign()?;
    let mut e = integrate(g, grid, |c| Ok(c.weyl_sq - 2.0 * c.ricci_sq + 2.0 / 3.0 * c.scalar * c.scalar))?;
    e.value *= eps / (32.0 * PI * PI);
    Ok(e)
}

/// `1/(48π²) ∫ |W⁺|² − |W⁻|² dV`.
pub fn signature_estimate(g: &MetricField, grid: &QuadratureGrid) -> Result<Estimate> {
    let mut e = integrate(g, grid, |c| match (c.weyl_plus_sq, c.weyl_minus_sq) {
        (Some(p), Some(m)) => Ok(p - m),
        _ => Err(GeomError::UnsupportedSignature(c.signature.to_string())),
    })?;
    e.value /= 48.0 * PI * PI;
    Ok(e)
}

/// `1/(16π²) ∫ |Ric|² dV`.
pub fn ricci_only_estimate(g: &MetricField, grid: &QuadratureGrid) -> Result<Estimate> {
    let mut e = integrate(g, grid, |c| Ok(c.ricci_sq))?;
    e.value /= 16.0 * PI * PI;
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub per_axis: usize,
    pub chi: f64,
    pub tau: f64,
    pub chi_error: f64,
    pub tau_error: f64,
}

/// Estimates against the exact `χ` and `τ = 0` of a product of closed surfaces.
pub fn convergence_table(p: &ClosedProduct, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let g = p.metric();
    let chi_exact = p.euler_characteristic() as f64;
    sizes
        .iter()
        .map(|&n| {
            let grid = QuadratureGrid::product(p, n, true);
            let chi = cgb_estimate(&g, &grid)?.value;
            let tau = signature_estimate(&g, &grid)?.value;
            Ok(ConvergenceRow { per_axis: n, chi, tau, chi_error: (chi - chi_exact).abs(), tau_error: tau.abs() })
        })
        .collect()
}

/// Fubini–Study on the affine chart `(z1, z2)` of `CP²`, holomorphic sectional curvature 4.
#[derive(Debug, Clone, Copy)]
pub struct FubiniStudy;

impl MatrixFn for FubiniStudy {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let r = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + 1.0;
        let inv = (r * r).checked_recip()?;
        // h_ij̄ = (r δ_ij − z̄_i z_j)/r²
        let z = [(x[0], x[1]), (x[2], x[3])];
        let mut g = linalg::zeros::<T>();
        for i in 0..2 {
            for j in 0..2 {
                // z̄_i z_j
                let (a, b) = z[i];
                let (c, d) = z[j];
                let (pr, pi) = (a * c + b * d, a * d - b * c);
                let re = (if i == j { r } else { T::zero() } - pr) * inv;
                let im = -pi * inv;
                g[2 * i][2 * j] = re;
                g[2 * i + 1][2 * j + 1] = re;
                g[2 * i][2 * j + 1] = im;
                g[2 * i + 1][2 * j] = -im;
            }
        }
        Ok(g)
    }
}

pub fn fubini_study() -> MetricField {
    MetricField::new("Fubini-Study", Chart::euclidean("(z1,z2)"), Signature::RIEMANNIAN, FubiniStudy)
}

pub const FUBINI_STUDY_VOLUME: f64 = PI * PI / 2.0;

/// `(χ, τ)` of a homogeneous closed manifold: integrands at one point times the volume.
pub fn homogeneous_invariants(g: &MetricField, p: &[f64; 4], volume: f64) -> Result<(f64, f64)> {
    let c = curvature(g, p)?;
    let eps = g.signature.cgb_sign()?;
    let chi = eps / (32.0 * PI * PI) * (c.weyl_sq - 2.0 * c.ricci_sq + 2.0 / 3.0 * c.scalar * c.scalar) * volume;
    let (wp, wm) = c.weyl_plus_sq.zip(c.weyl_minus_sq).ok_or_else(|| GeomError::UnsupportedSignature(c.signature.to_string()))?;
    Ok((chi, (wp - wm) * volume / (48.0 * PI * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_spheres(eps: f64) -> ClosedProduct {
        ClosedProduct::new(ClosedSurface::round(1.0), ClosedSurface::round(1.0), eps)
    }

    #[test]
    fn sphere_product_riemannian() {
        let p = unit_spheres(1.0);
        let grid = QuadratureGrid::product(&p, 64, true);
        let g = p.metric();
        assert!((cgb_estimate(&g, &grid).unwrap().value - 4.0).abs() < 1e-3);
        assert!(signature_estimate(&g, &grid).unwrap().value.abs() < 1e-3);
    }

    #[test]
    fn sphere_product_neutral() {
        let p = unit_spheres(-1.0);
        let grid = QuadratureGrid::product(&p, 32, true);
        let g = p.metric();
        let chi = cgb_estimate(&g, &grid).unwrap().value;
        let ric = ricci_only_estimate(&g, &grid).unwrap().value;
        assert!((chi - 4.0).abs() < 1e-3, "{chi}");
        assert!((ric - chi).abs() < 1e-9);
        assert!(signature_estimate(&g, &grid).unwrap().value.abs() < 1e-3);
    }

    #[test]
    fn flat_torus() {
        let p = ClosedProduct::new(ClosedSurface::FlatTorus, ClosedSurface::FlatTorus, 1.0);
        let grid = QuadratureGrid::product(&p, 8, false);
        let g = p.metric();
        assert_eq!(cgb_estimate(&g, &grid).unwrap().value, 0.0);
        assert_eq!(signature_estimate(&g, &grid).unwrap().value, 0.0);
    }

    #[test]
    fn sphere_torus_product() {
        let p = ClosedProduct::new(ClosedSurface::round(2.0), ClosedSurface::FlatTorus, 1.0);
        let grid = QuadratureGrid::product(&p, 16, true);
        assert!(cgb_estimate(&p.metric(), &grid).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn collapsed_grid_matches_full_grid() {
        let p = ClosedProduct::new(ClosedSurface::Sphere { kappa: 1.0, warp: 0.3 }, ClosedSurface::round(1.0), 1.0);
        let g = p.metric();
        let a = cgb_estimate(&g, &QuadratureGrid::product(&p, 6, true)).unwrap();
        let b = cgb_estimate(&g, &QuadratureGrid::product(&p, 6, false)).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
        assert_eq!(b.nodes, 6usize.pow(4));
    }

    #[test]
    fn warped_sphere_converges() {
        let p = ClosedProduct::new(ClosedSurface::Sphere { kappa: 1.0, warp: 0.3 }, ClosedSurface::round(1.0), 1.0);
        let rows = convergence_table(&p, &[16, 32, 64]).unwrap();
        assert!(rows[2].chi_error < 1e-3);
        assert!(rows[2].chi_error <= (rows[1].chi_error / 4.0).max(1e-10));
        assert!(rows.iter().all(|r| r.tau_error < 1e-2));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = ClosedProduct::new(ClosedSurface::Sphere { kappa: 1.0, warp: 0.3 }, ClosedSurface::round(1.0), 1.0);
        let r = cgb_estimate(&p.metric(), &QuadratureGrid::product(&p, 1, true));
        assert!(matches!(r, Err(GeomError::GridTooCoarse { .. })));
    }

    #[test]
    fn fubini_study_invariants() {
        let g = fubini_study();
        for p in [[0.0; 4], [0.3, -0.2, 0.5, 0.1]] {
            let c = curvature(&g, &p).unwrap();
            assert!((c.scalar - 24.0).abs() < 1e-9);
            assert!(c.einstein_max() < 1e-9);
            assert!(c.weyl_minus_sq.unwrap().abs() < 1e-9);
            let (chi, tau) = homogeneous_invariants(&g, &p, FUBINI_STUDY_VOLUME).unwrap();
            assert!((chi - 3.0).abs() < 1e-9 && (tau - 1.0).abs() < 1e-9, "{chi} {tau}");
        }
    }

    #[test]
    fn obstruction_examples() {
        let k3 = obstruction_report(&TopologicalProfile::k3());
        assert!(k3.hitchin_thorpe && k3.neutral_conditions && !k3.signature_vanishes);
        assert_eq!((k3.chi_plus_tau, k3.chi_minus_tau), (40, 8));
        assert_eq!(k3.verdict, Verdict::CannotBeParallel);
        let m = obstruction_report(&TopologicalProfile::cp2_blowup(3));
        assert_eq!((m.profile.chi, m.profile.tau), (6, -2));
        assert_eq!(m.verdict, Verdict::CannotBeParallel);
        assert_eq!(obstruction_report(&TopologicalProfile::s2xs2()).verdict, Verdict::NoObstruction);
        assert_eq!(obstruction_report(&TopologicalProfile::s4()).verdict, Verdict::NoPlaneField);
        assert_eq!(obstruction_report(&TopologicalProfile::cp2()).verdict, Verdict::NoPlaneField);
        assert!(obstruction_report(&TopologicalProfile::t4()).neutral_flat_allowed);
    }

    #[test]
    fn blowup_family() {
        let rows = blowup_table(12);
        for r in &rows {
            let k = i64::from(r.k);
            assert_eq!(r.report.chi_plus_tau, 4);
            assert_eq!(r.report.chi_minus_tau, 2 + 2 * k);
            assert_eq!(r.report.hitchin_thorpe, k <= 9);
            assert_eq!(r.report.neutral_conditions, k % 2 == 1);
        }
        let blocked: Vec<u32> =
            rows.iter().filter(|r| r.einstein_known && r.report.verdict == Verdict::CannotBeParallel).map(|r| r.k).collect();
        assert_eq!(blocked, vec![3, 5, 7]);
    }
}
