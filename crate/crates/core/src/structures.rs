//! Eigenplanes, classification and parallelism of almost (para)complex structures.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jet::seed_point;
use crate::linalg::{self, M4};
use crate::tensor::{
    covariant_derivative_endomorphism, max_abs3, nijenhuis, AssociatedProgram, MatrixProgram, MetricField, Signature, StructureField, T3,
};

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-8;
/// Tolerance for vanishing differential residuals.
pub const PARALLEL_TOL: f64 = 1e-9;
/// Lower bound for a residual to count as nonzero.
pub const NONZERO_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenplanePair {
    pub plus: [[f64; 4]; 2],
    pub minus: [[f64; 4]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Isometric,
    AntiIsometric,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenplaneGeometry {
    Orthogonal,
    TotallyNull,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureClassification {
    pub kind: StructureKind,
    pub eigenplane_geometry: EigenplaneGeometry,
    /// max |g(P+, P-)| over the four basis pairings
    pub cross_residual: f64,
    /// max |g| restricted to each eigenplane, six products
    pub null_residual: f64,
    /// max |g(j·,j·) − g|
    pub isometric_residual: f64,
    /// max |g(j·,j·) + g|
    pub anti_residual: f64,
    /// eigenplane verdict agrees with the direct residuals
    pub consistent: bool,
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gform(g: &M4<f64>, a: &[f64; 4], b: &[f64; 4]) -> f64 {
    dot(a, &linalg::matvec(g, b))
}

/// Column basis of the image of `m`, modified Gram-Schmidt in the Euclidean product.
fn column_basis(m: &M4<f64>, tol: f64) -> Vec<[f64; 4]> {
    let mut out: Vec<[f64; 4]> = Vec::new();
    for c in 0..4 {
        let mut v: [f64; 4] = std::array::from_fn(|r| m[r][c]);
        for b in &out {
            let d = dot(&v, b);
            for k in 0..4 {
                v[k] -= d * b[k];
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > tol {
            out.push(v.map(|x| x / n));
        }
    }
    out
}

/// Bases of the `±1` eigenspaces of an almost paracomplex structure.
pub fn eigenplanes(j: &M4<f64>) -> Result<EigenplanePair> {
    let sq = linalg::matmul(j, j);
    let r = linalg::max_abs_diff(&sq, &linalg::identity());
    if r > ALGEBRAIC_TOL {
        return Err(GeomError::NotParacomplex(format!("|j² − id| = {r:e}")));
    }
    let id = linalg::identity::<f64>();
    let p_plus = linalg::scale(&linalg::add(&id, j), 0.5);
    let p_minus = linalg::scale(&linalg::sub(&id, j), 0.5);
    let scale = linalg::max_abs(j).max(1.0);
    let plus = column_basis(&p_plus, 1e-8 * scale);
    let minus = column_basis(&p_minus, 1e-8 * scale);
    if plus.len() != 2 || minus.len() != 2 {
        return Err(GeomError::NotParacomplex(format!("eigenspace ranks ({}, {})", plus.len(), minus.len())));
    }
    Ok(EigenplanePair { plus: [plus[0], plus[1]], minus: [minus[0], minus[1]] })
}

fn direct_residuals(g: &M4<f64>, j: &M4<f64>) -> (f64, f64) {
    let gjj = linalg::matmul(&linalg::transpose(j), &linalg::matmul(g, j));
    (linalg::max_abs_diff(&gjj, g), linalg::max_abs(&linalg::add(&gjj, g)))
}

/// Classify an almost paracomplex structure against a metric at one point.
pub fn classify(g: &M4<f64>, j: &M4<f64>) -> Result<StructureClassification> {
    let ep = eigenplanes(j)?;
    let mut cross = 0.0_f64;
    for a in &ep.plus {
        for b in &ep.minus {
            cross = cross.max(gform(g, a, b).abs());
        }
    }
    let mut null = 0.0_f64;
    for plane in [&ep.plus, &ep.minus] {
        for (x, y) in [(0, 0), (0, 1), (1, 1)] {
            null = null.max(gform(g, &plane[x], &plane[y]).abs());
        }
    }
    let (iso, anti) = direct_residuals(g, j);
    let geometry = if cross < ALGEBRAIC_TOL {
        EigenplaneGeometry::Orthogonal
    } else if null < ALGEBRAIC_TOL {
        EigenplaneGeometry::TotallyNull
    } else {
        EigenplaneGeometry::Generic
    };
    let kind = match geometry {
        EigenplaneGeometry::Orthogonal => StructureKind::Isometric,
        EigenplaneGeometry::TotallyNull => StructureKind::AntiIsometric,
        EigenplaneGeometry::Generic => StructureKind::Neither,
    };
    let tol = ALGEBRAIC_TOL * linalg::max_abs(g).max(1.0) * linalg::max_abs(j).max(1.0).powi(2);
    let consistent = match kind {
        StructureKind::Isometric => iso < tol,
        StructureKind::AntiIsometric => anti < tol,
        StructureKind::Neither => iso >= tol && anti >= tol,
    };
    Ok(StructureClassification {
        kind,
        eigenplane_geometry: geometry,
        cross_residual: cross,
        null_residual: null,
        isometric_residual: iso,
        anti_residual: anti,
        consistent,
    })
}

/// Classification of an almost complex structure from direct residuals only.
pub fn classify_complex(g: &M4<f64>, j: &M4<f64>) -> Result<StructureKind> {
    let r = linalg::max_abs(&linalg::add(&linalg::matmul(j, j), &linalg::identity()));
    if r > ALGEBRAIC_TOL {
        return Err(GeomError::DegenerateStructure(format!("|j² + id| = {r:e}")));
    }
    let (iso, anti) = direct_residuals(g, j);
    Ok(if iso < ALGEBRAIC_TOL {
        StructureKind::Isometric
    } else if anti < ALGEBRAIC_TOL {
        StructureKind::AntiIsometric
    } else {
        StructureKind::Neither
    })
}

/// `g′(·,·) = g(j·,·)` as a metric field; `probe` is where symmetry and signature are checked.
pub fn associated_metric(g: &MetricField, j: &StructureField, probe: &[f64; 4]) -> Result<MetricField> {
    let gp = linalg::matmul(&g.at(probe)?, &j.at(probe)?);
    let asym = linalg::max_abs_diff(&gp, &linalg::transpose(&gp));
    if asym > 1e-9 {
        return Err(GeomError::NotIsometric(format!("g(j·,·) asymmetric by {asym:e}")));
    }
    let (pos, neg) = linalg::inertia(&gp, 1e-12);
    let program = AssociatedProgram { g: g.program(), j: j.program() };
    Ok(MetricField::new(&format!("{}({}·,·)", g.name, j.name), g.chart.clone(), Signature { pos, neg }, program))
}

/// Max over points of the largest component of `∇j`.
pub fn parallel_residual(g: &MetricField, j: &StructureField, points: &[[f64; 4]]) -> Result<f64> {
    let mut m = 0.0_f64;
    for p in points {
        m = m.max(max_abs3(&covariant_derivative_endomorphism(g, j, p)?));
    }
    Ok(m)
}

/// Max over points of the largest Nijenhuis component.
pub fn nijenhuis_residual(j: &StructureField, points: &[[f64; 4]]) -> Result<f64> {
    let mut m = 0.0_f64;
    for p in points {
        m = m.max(max_abs3(&nijenhuis(j, p)?));
    }
    Ok(m)
}

/// `dω_{λμν} = ∂_λ ω_{μν} + ∂_μ ω_{νλ} + ∂_ν ω_{λμ}` from jets.
pub fn exterior_derivative(omega: &dyn MatrixProgram, p: &[f64; 4]) -> Result<T3> {
    let w = omega.at_jet(&seed_point(*p))?;
    let mut out = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                out[l][m][n] = w[m][n].grad[l] + w[n][l].grad[m] + w[l][m].grad[n];
            }
        }
    }
    Ok(out)
}

/// Max of `|ω + ωᵀ|`.
pub fn antisymmetry_residual(omega: &M4<f64>) -> f64 {
    linalg::max_abs(&linalg::add(omega, &linalg::transpose(omega)))
}

/// The 2-form `g(j·,·)` as a matrix program.
pub fn two_form(g: &MetricField, j: &StructureField) -> Arc<dyn MatrixProgram> {
    Arc::new(AssociatedProgram { g: g.program(), j: j.program() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linespace::{kahler_forms, metric_g, metric_g_tilde, structures_j012};
    use crate::sampling;
    use crate::tensor::{flat_metric, ConstMatrix};

    fn d(v: [f64; 4]) -> M4<f64> {
        linalg::diag(v)
    }

    #[test]
    fn diagonal_eigenplanes() {
        let ep = eigenplanes(&d([1.0, 1.0, -1.0, -1.0])).unwrap();
        assert_eq!(ep.plus, [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(ep.minus, [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        assert!(matches!(eigenplanes(&linalg::identity()), Err(GeomError::NotParacomplex(_))));
        assert!(matches!(eigenplanes(&d([2.0, 1.0, -1.0, -1.0])), Err(GeomError::NotParacomplex(_))));
    }

    #[test]
    fn j1_eigenplanes_have_rank_two_and_are_null() {
        let (_, j1, _) = structures_j012();
        let p = [0.5, 0.0, 0.2, 0.1];
        let jv = j1.at(&p).unwrap();
        let ep = eigenplanes(&jv).unwrap();
        for v in ep.plus {
            let jv_v = linalg::matvec(&jv, &v);
            assert!((0..4).all(|k| (jv_v[k] - v[k]).abs() < 1e-10));
        }
        let c = classify(&metric_g().at(&p).unwrap(), &jv).unwrap();
        assert_eq!(c.kind, StructureKind::AntiIsometric);
        assert!(c.consistent);
    }

    #[test]
    fn diagonal_structure_on_diagonal_metric_is_isometric() {
        // a diagonal metric makes the coordinate eigenplanes orthogonal
        let c = classify(&d([1.0, 1.0, 1.0, -1.0]), &d([1.0, 1.0, -1.0, -1.0])).unwrap();
        assert_eq!(c.kind, StructureKind::Isometric);
        assert!(c.consistent);
    }

    #[test]
    fn generic_pair_is_neither() {
        let mut g = d([1.0, 1.0, 1.0, -1.0]);
        g[0][2] = 0.5;
        g[2][0] = 0.5;
        let c = classify(&g, &d([1.0, 1.0, -1.0, -1.0])).unwrap();
        assert_eq!(c.kind, StructureKind::Neither);
        assert_eq!(c.eigenplane_geometry, EigenplaneGeometry::Generic);
        assert!(c.consistent);
        // by direct evaluation: g(j·,j·) flips the sign of the (0,2) entry only
        assert!((c.isometric_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn definite_metrics_never_give_anti_isometric() {
        let mut rng = sampling::rng(17);
        for _ in 0..50 {
            let q = sampling::box_points(&mut rng, 4, -1.0, 1.0);
            // j = A diag(1,1,-1,-1) A⁻¹
            let a: M4<f64> = std::array::from_fn(|i| std::array::from_fn(|k| q[i][k] + if i == k { 2.0 } else { 0.0 }));
            let ai = linalg::inverse(&a).unwrap();
            let j = linalg::matmul(&a, &linalg::matmul(&d([1.0, 1.0, -1.0, -1.0]), &ai));
            let c = classify(&linalg::identity(), &j).unwrap();
            assert_ne!(c.kind, StructureKind::AntiIsometric);
            assert!(c.consistent);
        }
    }

    #[test]
    fn associated_metric_of_diagonal_pair() {
        let g = flat_metric("E4", [1.0; 4]);
        let j = StructureField::new("j", g.chart.clone(), 1.0, ConstMatrix(d([1.0, 1.0, -1.0, -1.0])));
        let gp = associated_metric(&g, &j, &[0.0; 4]).unwrap();
        assert_eq!(gp.at(&[0.3, 0.0, 0.0, 1.0]).unwrap(), d([1.0, 1.0, -1.0, -1.0]));
        assert_eq!(gp.signature, Signature::NEUTRAL);
    }

    #[test]
    fn anti_isometric_input_is_rejected() {
        let (_, j1, _) = structures_j012();
        let r = associated_metric(&metric_g(), &j1, &[0.3, 0.1, 0.2, -0.4]);
        assert!(matches!(r, Err(GeomError::NotIsometric(_))));
    }

    #[test]
    fn line_space_parallelism() {
        let pts = sampling::line_points(&mut sampling::rng(21), 20, 1.5, 1.5);
        let (j0, j1, j2) = structures_j012();
        for g in [metric_g(), metric_g_tilde()] {
            assert!(parallel_residual(&g, &j0, &pts).unwrap() < PARALLEL_TOL);
            assert!(parallel_residual(&g, &j1, &pts).unwrap() > NONZERO_MIN);
            assert!(parallel_residual(&g, &j2, &pts).unwrap() > NONZERO_MIN);
        }
        assert!(nijenhuis_residual(&j0, &pts).unwrap() < PARALLEL_TOL);
        assert!(nijenhuis_residual(&j1, &pts).unwrap() > NONZERO_MIN);
        // (1,0)-forms of J2 are dξ and dη̄ − 2ξη̄/(1+ξξ̄) dξ̄, whose exterior derivatives
        // lie in the ideal they generate, so J2 is integrable
        assert!(nijenhuis_residual(&j2, &pts).unwrap() < PARALLEL_TOL);
    }

    #[test]
    fn kahler_forms_are_closed() {
        let (o0, o1) = kahler_forms();
        for p in sampling::line_points(&mut sampling::rng(8), 10, 1.5, 1.5) {
            for o in [&o0, &o1] {
                assert!(antisymmetry_residual(&o.at_f64(&p).unwrap()) < 1e-12);
                assert!(max_abs3(&exterior_derivative(o, &p).unwrap()) < PARALLEL_TOL);
            }
        }
    }

    #[test]
    fn line_space_isometry_types() {
        let (j0, j1, j2) = structures_j012();
        let g = metric_g();
        for p in sampling::line_points(&mut sampling::rng(13), 10, 2.0, 2.0) {
            let gv = g.at(&p).unwrap();
            assert_eq!(classify_complex(&gv, &j0.at(&p).unwrap()).unwrap(), StructureKind::Isometric);
            assert_eq!(classify_complex(&gv, &j2.at(&p).unwrap()).unwrap(), StructureKind::AntiIsometric);
            assert_eq!(classify(&gv, &j1.at(&p).unwrap()).unwrap().kind, StructureKind::AntiIsometric);
        }
    }
}
