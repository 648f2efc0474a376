//! Named verification suites. Each suite runs a seeded battery of checks and returns a
//! [`VerificationReport`] with ids prefixed by the suite name.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::complex::Cx;
use crate::error::Result;
use crate::linalg;
use crate::linespace::{self, LinePoint, PlueckerSextet};
use crate::pde::{self, ConformalFactor, IsometricData, NullFamily, PolarData, PolarForm};
use crate::planefields::{self, CoordinatePlane, CylinderPlane, EigenplaneField, RotatingPlane, SphereSlicePlane};
use crate::products::{self, build_product, SurfaceFactor};
use crate::report::{ReportBuilder, VerificationReport};
use crate::sampling;
use crate::selfcheck::engine_residuals;
use crate::spaceforms::{self, AmbientSignature, SquareType};
use crate::structures::{self, classify, classify_complex, StructureKind};
use crate::tensor::{curvature, flat_metric, max_abs3, pullback_metric, ConstMatrix, Signature, StructureField};
use crate::topology::{self, ClosedProduct, ClosedSurface, QuadratureGrid, TopologicalProfile, Verdict};

pub const SUITES: [&str; 6] = ["linespace", "geodesic-spaces", "products", "planefields", "pde", "topology"];

#[derive(Debug, Error, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite `{0}` (expected one of linespace, geodesic-spaces, products, planefields, pde, topology, all)")]
    UnknownSuite(String),
    #[error("tolerance scale must be positive and finite, got {0}")]
    BadScale(f64),
}

/// Run a named suite. `all` runs every suite and merges the checks.
pub fn run_suite(name: &str, seed: u64, tolerance_scale: f64) -> std::result::Result<VerificationReport, SuiteError> {
    if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
        return Err(SuiteError::BadScale(tolerance_scale));
    }
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        n => return Err(SuiteError::UnknownSuite(n.to_string())),
    };
    let start = Instant::now();
    let mut b = ReportBuilder::new(tolerance_scale);
    for n in names {
        let battery: fn(&mut ReportBuilder, u64) = match n {
            "linespace" => linespace_suite,
            "geodesic-spaces" => geodesic_suite,
            "products" => products_suite,
            "planefields" => planefields_suite,
            "pde" => pde_suite,
            _ => topology_suite,
        };
        battery(&mut b, seed);
    }
    Ok(b.finish(name, seed, start.elapsed().as_secs_f64()))
}

/// Run `f`; an error becomes a failing check named `id`.
fn group(b: &mut ReportBuilder, id: &str, anchor: &str, f: impl FnOnce(&mut ReportBuilder) -> Result<()>) {
    let mut inner = ReportBuilder::new(b.scale());
    match f(&mut inner) {
        Ok(()) => b.extend(inner),
        Err(e) => b.errored(id, anchor, &e),
    }
}

fn fold_max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn fold_min(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::INFINITY, f64::min)
}

fn try_max(pts: &[[f64; 4]], f: impl Fn(&[f64; 4]) -> Result<f64>) -> Result<f64> {
    pts.iter().try_fold(0.0_f64, |m, p| Ok(m.max(f(p)?)))
}

fn try_min(pts: &[[f64; 4]], f: impl Fn(&[f64; 4]) -> Result<f64>) -> Result<f64> {
    pts.iter().try_fold(f64::INFINITY, |m, p| Ok(m.min(f(p)?)))
}

fn commutator(a: &linalg::M4<f64>, b: &linalg::M4<f64>) -> f64 {
    linalg::max_abs(&linalg::sub(&linalg::matmul(a, b), &linalg::matmul(b, a)))
}

fn linespace_suite(b: &mut ReportBuilder, seed: u64) {
    let mut rng = sampling::rng(seed);
    let pts = sampling::line_points(&mut rng, 20, 0.9, 2.0);
    let g = linespace::metric_g();

    group(b, "linespace.battery", "line-space metric", |b| {
        let cs = pts.iter().map(|p| curvature(&g, p)).collect::<Result<Vec<_>>>()?;
        let wrong = cs.iter().filter(|c| c.signature != Signature::NEUTRAL).count();
        b.at_most("linespace.battery.signature", "neutral", "points where the signature is not (2,2)", wrong as f64, 0.0);
        b.at_most("linespace.battery.scalar", "scalar flat", "max |S|", fold_max(cs.iter().map(|c| c.scalar.abs())), 1e-8);
        b.at_most("linespace.battery.weyl", "conformally flat", "max ||W|^2|", fold_max(cs.iter().map(|c| c.weyl_sq.abs())), 1e-8);
        b.at_least(
            "linespace.battery.einstein",
            "not Einstein",
            "min over points of the largest traceless Ricci component",
            fold_min(cs.iter().map(|c| c.einstein_max())),
            1e-3,
        );
        Ok(())
    });

    group(b, "linespace.structures", "commuting triple", |b| {
        let (j0, j1, j2) = linespace::structures_j012();
        for (j, want) in [(&j0, -1.0), (&j1, 1.0), (&j2, -1.0)] {
            let id = format!("linespace.structures.square.{}", j.name.to_lowercase());
            let r = try_max(&pts, |p| j.square_residual(p))?;
            b.at_most(&id, "squares", &format!("max |{}^2 - ({want}) id|", j.name), r.max((j.square - want).abs()), 1e-10);
        }
        let comm = try_max(&pts, |p| {
            let (a, c, d) = (j0.at(p)?, j1.at(p)?, j2.at(p)?);
            Ok(commutator(&a, &c).max(commutator(&a, &d)).max(commutator(&c, &d)))
        })?;
        b.at_most("linespace.structures.commute", "commuting triple", "max pairwise commutator", comm, 1e-10);

        let mut mismatches = 0;
        for p in &pts {
            let gm = g.at(p)?;
            mismatches += usize::from(classify_complex(&gm, &j0.at(p)?)? != StructureKind::Isometric);
            mismatches += usize::from(classify(&gm, &j1.at(p)?)?.kind != StructureKind::AntiIsometric);
            mismatches += usize::from(classify_complex(&gm, &j2.at(p)?)? != StructureKind::AntiIsometric);
        }
        b.holds(
            "linespace.structures.pattern",
            "isometry pattern (+,-,-)",
            "J0 isometric, J1 and J2 anti-isometric at every point",
            mismatches == 0,
        );

        let par = |j: &StructureField, p: &[f64; 4]| structures::parallel_residual(&g, j, &[*p]);
        b.at_most("linespace.structures.parallel.j0", "J0 Kaehler", "max |nabla J0|", try_max(&pts, |p| par(&j0, p))?, 1e-9);
        b.at_least("linespace.structures.parallel.j1", "J1 not parallel", "min |nabla J1|", try_min(&pts, |p| par(&j1, p))?, 1e-3);
        b.at_least("linespace.structures.parallel.j2", "J2 not parallel", "min |nabla J2|", try_min(&pts, |p| par(&j2, p))?, 1e-3);

        let nij = |j: &StructureField, p: &[f64; 4]| structures::nijenhuis_residual(j, &[*p]);
        b.at_most("linespace.structures.nijenhuis.j0", "J0 integrable", "max |N(J0)|", try_max(&pts, |p| nij(&j0, p))?, 1e-9);
        b.at_least("linespace.structures.nijenhuis.j1", "J1 not integrable", "min |N(J1)|", try_min(&pts, |p| nij(&j1, p))?, 1e-3);
        b.at_least("linespace.structures.nijenhuis.j2", "J2 not integrable", "min |N(J2)|", try_min(&pts, |p| nij(&j2, p))?, 1e-3);

        let (w0, w1) = linespace::kahler_forms();
        let d0 = try_max(&pts, |p| Ok(max_abs3(&structures::exterior_derivative(&w0, p)?)))?;
        let d1 = try_max(&pts, |p| Ok(max_abs3(&structures::exterior_derivative(&w1, p)?)))?;
        b.at_most("linespace.structures.closed.omega0", "symplectic forms", "max |d Omega0|", d0, 1e-9);
        b.at_most("linespace.structures.closed.omega1", "symplectic forms", "max |d Omega1|", d1, 1e-9);

        let gt = linespace::metric_g_tilde();
        let pb = try_max(&pts, |p| Ok(linalg::max_abs_diff(&pullback_metric(&linespace::EtaRotation, &gt, p)?, &g.at(p)?)))?;
        b.at_most("linespace.structures.eta_rotation", "G-tilde pullback", "max |(xi, i eta)^* G~ - G|", pb, 1e-10);
        Ok(())
    });

    group(b, "linespace.conformal", "conformal coordinates", |b| {
        let many = sampling::line_points(&mut rng, 100, 0.9, 2.0);
        let rt = try_max(&many, |p| {
            let l = LinePoint::from_chart(p);
            let back = linespace::from_conformal(&linespace::to_conformal(&l)?);
            Ok((back.xi - l.xi).modulus().max((back.eta - l.eta).modulus()))
        })?;
        b.at_most("linespace.conformal.roundtrip", "conformal coordinates", "max roundtrip error on 100 points", rt, 1e-10);

        let flat = linespace::conformal_flat_metric(1.0);
        let quarter = linespace::conformal_flat_metric(0.25);
        let lit = try_max(&pts, |p| Ok(linalg::max_abs_diff(&pullback_metric(&linespace::ToConformal, &flat, p)?, &g.at(p)?)))?;
        b.at_most("linespace.conformal.pullback", "conformal form", "max |pullback of (1 + |Z1-Z2|^2/4)^-1 flat - G|", lit, 1e-9);
        let q = try_max(&pts, |p| Ok(linalg::max_abs_diff(&pullback_metric(&linespace::ToConformal, &quarter, p)?, &g.at(p)?)))?;
        b.at_most(
            "linespace.conformal.pullback_quarter",
            "conformal form",
            "max |pullback of (1/4)(1 + |Z1-Z2|^2/4)^-1 flat - G|",
            q,
            1e-9,
        );

        let axis = linespace::pluecker([0.0, 0.0, 0.0], [0.0, 0.0, -1.0])?;
        let x_axis = linespace::conformal_from_pluecker(&axis)?;
        let x_origin = linespace::to_conformal(&LinePoint::new((0.0, 0.0), (0.0, 0.0)))?.chart();
        let mut fixed = x_axis.iter().chain(&x_origin).fold(0.0_f64, |m, v| m.max(v.abs()));
        for p in pts.iter().filter(|p| p[0].hypot(p[1]) > 0.1) {
            let l = LinePoint::from_chart(p);
            let r = linespace::reverse_orientation(&linespace::reflect_line(&l)?)?;
            let (a, c) = (linespace::to_conformal(&l)?.chart(), linespace::to_conformal(&r)?.chart());
            fixed = (0..4).fold(fixed, |m, k| m.max((a[k] + c[k]).abs()));
        }
        b.at_most(
            "linespace.conformal.reflection",
            "reflection in the origin",
            "x3-axis lands on X = 0 and the reflected line on -X",
            fixed,
            1e-12,
        );

        let (mut route, mut relation, mut done) = (0.0_f64, 0.0_f64, 0);
        while done < 50 {
            let two = sampling::box_points(&mut rng, 2, -2.0, 2.0);
            let (s, t) = ([two[0][0], two[0][1], two[0][2]], [two[1][0], two[1][1], two[1][2]]);
            if s[2] - t[2] < 0.2 {
                continue;
            }
            let px: PlueckerSextet = linespace::pluecker(s, t)?;
            relation = relation.max(px.relation().abs());
            let x1 = linespace::conformal_from_pluecker(&px)?;
            let x2 = linespace::to_conformal(&linespace::line_through_points(s, t)?)?.chart();
            route = (0..4).fold(route, |m, k| m.max((x1[k] - x2[k]).abs()));
            done += 1;
        }
        b.at_most("linespace.conformal.pluecker_relation", "Pluecker sextet", "max |p.q|", relation, 1e-12);
        b.at_most("linespace.conformal.pluecker_route", "Pluecker sextet", "max |Pluecker route - holomorphic route|", route, 1e-9);
        Ok(())
    });

    group(b, "linespace.engine", "engine", |b| {
        let e = engine_residuals(&g, &pts[..5])?;
        b.at_most("linespace.engine.jet_fd", "engine", "jets vs central differences on G", e.jet_fd, 1e-5);
        b.at_most("linespace.engine.symmetries", "engine", "Riemann symmetries and Bianchi on G", e.symmetries, 1e-9);
        b.at_most("linespace.engine.weyl_split", "engine", "||W+|^2 + |W-|^2 - |W|^2| on G", e.weyl_split, 1e-8);
        let gc = linespace::metric_g_conformal();
        let ec = engine_residuals(&gc, &[[0.2, -0.1, 0.4, 0.3]])?;
        b.at_most(
            "linespace.engine.jet_fd_conformal",
            "engine",
            "jets vs central differences on G in the conformal chart",
            ec.jet_fd,
            1e-5,
        );
        let (mut ds, mut de) = (0.0_f64, 0.0_f64);
        for p in &pts[..5] {
            let x = linespace::to_conformal(&LinePoint::from_chart(p))?.chart();
            let (c1, c2) = (curvature(&g, p)?, curvature(&gc, &x)?);
            ds = ds.max((c1.scalar - c2.scalar).abs());
            de = de.max((c1.einstein_sq - c2.einstein_sq).abs() / c1.einstein_sq.abs().max(1.0));
        }
        b.at_most("linespace.engine.chart_scalar", "engine", "S in the line chart vs the conformal chart", ds, 1e-9);
        b.at_most("linespace.engine.chart_einstein", "engine", "|E|^2 in the line chart vs the conformal chart, relative", de, 1e-8);
        Ok(())
    });
}

#[derive(Serialize)]
struct HodgeRow {
    row: String,
    sigma: Option<i8>,
    minus_residual: f64,
    plus_residual: f64,
}

fn geodesic_suite(b: &mut ReportBuilder, seed: u64) {
    let mut rng = sampling::rng(seed);
    let mut rows = Vec::new();
    let mut hodge_rows = Vec::new();
    for sig in AmbientSignature::ROWS {
        let tag = format!("p{}{}", sig.p, if sig.epsilon > 0 { "+" } else { "-" });
        let pts = sig.sample_points(&mut rng, 3, 0.05);
        let id = |s: &str| format!("geodesic-spaces.{s}.{tag}");
        group(b, &id("error"), "geodesic space", |b| {
            let c = sig.sample_center();
            let row = spaceforms::structure_table_verify(sig, &c)?;
            b.holds(&id("table"), "structure table", "squared sign and isometry type of J, J', J*", row.matches);
            rows.push(row);

            let g = spaceforms::metric_gp(sig)?;
            let (j, jp, js) = spaceforms::structures_jjp_jstar(sig)?;
            let par = [&j, &jp, &js]
                .iter()
                .try_fold(0.0_f64, |m, s| Ok::<_, crate::GeomError>(m.max(structures::parallel_residual(&g, s, &pts)?)))?;
            b.at_most(&id("parallel"), "parallel structures", "max |nabla J|, |nabla J'|, |nabla J*|", par, 1e-8);

            let h = spaceforms::hodge_check(sig, &c, 1e-9)?;
            b.at_most(&id("hodge"), "Hodge star", "min over signs of |star|_T + sigma J*|", h.minus_residual.min(h.plus_residual), 1e-9);
            hodge_rows.push(HodgeRow {
                row: tag.clone(),
                sigma: h.sigma,
                minus_residual: h.minus_residual,
                plus_residual: h.plus_residual,
            });

            let e = try_max(&pts, |p| Ok(curvature(&g, p)?.einstein_max()))?;
            b.at_most(&id("einstein"), "G_p Einstein", "max traceless Ricci component of G_p", e, 1e-8);

            if spaceforms::structure_table_expected(sig).is_some_and(|t| t[2].square == SquareType::Para) {
                let gp = spaceforms::metric_gp_prime(sig)?;
                b.holds(&id("prime_neutral"), "G'_p neutral", "G'_p has signature (2,2)", gp.signature == Signature::NEUTRAL);
                let r = try_max(&pts, |p| {
                    let c = curvature(&gp, p)?;
                    Ok(c.scalar.abs().max(c.weyl_sq.abs()))
                })?;
                b.at_most(&id("prime_flat"), "G'_p scalar and conformally flat", "max |S|, ||W|^2| of G'_p", r, 1e-8);
            }

            let en = engine_residuals(&g, &pts[..1])?;
            b.at_most(&format!("geodesic-spaces.engine.jet_fd.{tag}"), "engine", "jets vs central differences on G_p", en.jet_fd, 1e-5);
            b.at_most(&format!("geodesic-spaces.engine.symmetries.{tag}"), "engine", "Riemann symmetries on G_p", en.symmetries, 1e-9);
            b.at_most(&format!("geodesic-spaces.engine.weyl_split.{tag}"), "engine", "Weyl split on G_p", en.weyl_split, 1e-8);
            Ok(())
        });
    }
    b.table("structure_table", &rows);
    b.table("hodge_signs", &hodge_rows);
}

#[derive(Serialize)]
struct ProductRow {
    kappa1: f64,
    kappa2: f64,
    epsilon: f64,
    scalar: f64,
    scalar_expected: f64,
    ricci_sq: f64,
    ricci_sq_expected: f64,
    einstein_sq: f64,
    einstein_sq_expected: f64,
    weyl_sq: f64,
    weyl_shape: f64,
    weyl_factor: Option<f64>,
}

fn products_suite(b: &mut ReportBuilder, seed: u64) {
    let pts = sampling::box_points(&mut sampling::rng(seed), 3, -0.5, 0.5);
    let s = SurfaceFactor::constant;
    group(b, "products.closed", "product curvature", |b| {
        let mut rows = Vec::new();
        let (mut ds, mut dr, mut de) = (0.0_f64, 0.0_f64, 0.0_f64);
        for (k1, k2) in [(1.0, 1.0), (1.0, 0.0), (1.0, 2.0), (1.0, -1.0)] {
            for eps in [1.0, -1.0] {
                let g = build_product(s(k1), s(k2), eps)?;
                let cf = products::closed_form_curvature(k1, k2, eps);
                for p in &pts {
                    let c = curvature(&g.metric, p)?;
                    ds = ds.max((c.scalar - cf.scalar).abs());
                    dr = dr.max((c.ricci_sq - cf.ricci_sq).abs());
                    de = de.max((c.einstein_sq - cf.einstein_sq).abs());
                }
                let c = curvature(&g.metric, &pts[0])?;
                rows.push(ProductRow {
                    kappa1: k1,
                    kappa2: k2,
                    epsilon: eps,
                    scalar: c.scalar,
                    scalar_expected: cf.scalar,
                    ricci_sq: c.ricci_sq,
                    ricci_sq_expected: cf.ricci_sq,
                    einstein_sq: c.einstein_sq,
                    einstein_sq_expected: cf.einstein_sq,
                    weyl_sq: c.weyl_sq,
                    weyl_shape: cf.weyl_shape,
                    weyl_factor: (cf.weyl_shape.abs() > 1e-9).then(|| c.weyl_sq / cf.weyl_shape),
                });
            }
        }
        b.at_most("products.closed.scalar", "S = 2(k1 + eps k2)", "max |S - closed form| over 8 fixtures", ds, 1e-7);
        b.at_most("products.closed.ricci", "|Ric|^2 closed form", "max ||Ric|^2 - closed form|", dr, 1e-7);
        b.at_most("products.closed.einstein", "|E|^2 closed form", "max ||E|^2 - closed form|", de, 1e-7);

        let factors: Vec<f64> = rows.iter().filter_map(|r| r.weyl_factor).collect();
        let (lo, hi) = factors.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), &x| (a.min(x), c.max(x)));
        b.at_most(
            "products.closed.weyl_factor_spread",
            "|W|^2 proportional to (k1 + eps k2)^2",
            "spread of |W|^2 / (k1 + eps k2)^2",
            hi - lo,
            1e-7,
        );
        let shape0 = fold_max(rows.iter().filter(|r| r.weyl_factor.is_none()).map(|r| r.weyl_sq.abs()));
        b.at_most("products.closed.weyl_zero", "|W|^2 proportional to (k1 + eps k2)^2", "|W|^2 where k1 + eps k2 = 0", shape0, 1e-7);
        b.table("closed_forms", &rows);
        b.table(
            "weyl_factor",
            serde_json::json!({
                "measured": lo,
                "full_contraction": products::WEYL_FACTOR,
                "printed": products::WEYL_FACTOR_PRINTED,
                "measured_over_printed": lo / products::WEYL_FACTOR_PRINTED,
            }),
        );
        Ok(())
    });

    group(b, "products.ricci_sign", "Ric(G+) = Ric(G-)", |b| {
        let gp = build_product(s(1.0), s(2.0), 1.0)?;
        let gm = build_product(s(1.0), s(2.0), -1.0)?;
        let r = try_max(&pts, |p| Ok(linalg::max_abs_diff(&curvature(&gp.metric, p)?.ricci, &curvature(&gm.metric, p)?.ricci)))?;
        b.at_most("products.ricci_sign", "Ric(G+) = Ric(G-)", "max |Ric(G+) - Ric(G-)| with k1 = 1, k2 = 2", r, 1e-8);
        Ok(())
    });

    group(b, "products.three_way", "constant curvature equivalence", |b| {
        let mut reports = Vec::new();
        for (k1, k2, eps, name) in [(1.0, 1.0, -1.0, "s2xs2_minus"), (1.0, 2.0, -1.0, "k1_k2_minus"), (1.0, -1.0, 1.0, "s2xh2_plus")] {
            let r = products::three_way_check(&s(k1), &s(k2), eps, &pts, 1e-8)?;
            b.holds(&format!("products.three_way.{name}"), "three-way equivalence", "the three statements agree", r.agree);
            reports.push(r);
        }
        b.table("three_way", &reports);
        Ok(())
    });

    group(b, "products.split", "split structure", |b| {
        let mut par = 0.0_f64;
        let mut iso = true;
        for eps in [1.0, -1.0] {
            let g = build_product(s(1.0), SurfaceFactor::warped("0.3*sin(u)*cos(v)")?, eps)?;
            par = par.max(structures::parallel_residual(&g.metric, &g.j, &pts)?);
            for p in &pts {
                iso &= classify(&g.metric.at(p)?, &g.j.at(p)?)?.kind == StructureKind::Isometric;
            }
        }
        b.at_most("products.split.parallel", "J = J1 J2 parallel", "max |nabla J| on warped products", par, 1e-8);
        b.holds("products.split.isometric", "J = J1 J2 isometric", "J classified isometric at every point", iso);
        Ok(())
    });

    group(b, "products.engine", "engine", |b| {
        let g = build_product(s(1.0), SurfaceFactor::warped("0.3*sin(u)*cos(v)")?, -1.0)?;
        let e = engine_residuals(&g.metric, &pts)?;
        b.at_most("products.engine.jet_fd", "engine", "jets vs central differences on a warped product", e.jet_fd, 1e-5);
        b.at_most("products.engine.symmetries", "engine", "Riemann symmetries on a warped product", e.symmetries, 1e-9);
        b.at_most("products.engine.weyl_split", "engine", "Weyl split on a warped product", e.weyl_split, 1e-8);
        Ok(())
    });
}

#[derive(Serialize)]
struct SliceRow {
    radius: f64,
    expected: f64,
    from_invariants: f64,
    gauss_equation: f64,
    printed_form: f64,
}

#[derive(Serialize)]
struct EquivalenceSummary {
    fixture: &'static str,
    invariant_min: f64,
    invariant_max: f64,
    parallel_min: f64,
    parallel_max: f64,
    equivalent: bool,
}

fn planefields_suite(b: &mut ReportBuilder, seed: u64) {
    let mut rng = sampling::rng(seed);
    let box_pts = sampling::box_points(&mut rng, 4, -0.5, 0.5);
    let off_axis = sampling::ranged_points(&mut rng, 4, [(0.4, 1.2), (-1.0, -0.3), (0.3, 0.9), (-1.0, 1.0)]);
    let s = SurfaceFactor::constant;

    group(b, "planefields.product", "product eigenplanes", |b| {
        let mut m = 0.0_f64;
        for (k1, k2, eps) in [(1.0, 1.0, 1.0), (1.0, 2.0, -1.0), (-1.0, 0.5, 1.0)] {
            let g = build_product(s(k1), s(k2), eps)?;
            for p in &box_pts {
                for sign in [1.0, -1.0] {
                    let np = planefields::np_invariants(&g.metric, &EigenplaneField::at(&g.j, sign, p)?, p)?;
                    m = m.max(np.max_abs()).max(np.max_abs_hat());
                }
            }
        }
        b.at_most(
            "planefields.product.invariants",
            "product eigenplanes totally geodesic",
            "max |lambda|, |rho|, |sigma+-| and hatted",
            m,
            1e-9,
        );
        Ok(())
    });

    group(b, "planefields.sphere_slice", "leaf curvature", |b| {
        let euclid = flat_metric("R4", [1.0; 4]);
        let mut rows = Vec::new();
        let (mut d, mut dg) = (0.0_f64, 0.0_f64);
        for r in [1.0, 2.0] {
            for q in &off_axis {
                let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
                let p = [r * q[0] / n, r * q[1] / n, r * q[2] / n, q[3]];
                let lc = planefields::np_invariants(&euclid, &SphereSlicePlane, &p)?.leaf_curvature;
                let want = 1.0 / (r * r);
                d = d.max((lc.from_invariants - want).abs());
                dg = dg.max((lc.gauss_equation - want).abs());
                rows.push(SliceRow {
                    radius: r,
                    expected: want,
                    from_invariants: lc.from_invariants,
                    gauss_equation: lc.gauss_equation,
                    printed_form: lc.printed_form,
                });
            }
        }
        b.at_most(
            "planefields.sphere_slice.invariants",
            "leaf curvature 1/r^2",
            "max |curvature from invariants - 1/r^2|, r in {1, 2}",
            d,
            1e-6,
        );
        b.at_most("planefields.sphere_slice.gauss", "leaf curvature 1/r^2", "max |Gauss equation - 1/r^2|, r in {1, 2}", dg, 1e-6);
        b.table("sphere_slices", &rows);
        Ok(())
    });

    group(b, "planefields.equivalence", "parallel iff invariants vanish", |b| {
        let euclid = flat_metric("R4", [1.0; 4]);
        let gp = build_product(s(1.0), s(1.0), 1.0)?;
        let gm = build_product(s(1.0), s(2.0), -1.0)?;
        let split = StructureField::new("split", euclid.chart.clone(), 1.0, ConstMatrix(linalg::diag([1.0, 1.0, -1.0, -1.0])));
        let fixtures = vec![
            ("product_plus", true, gp.metric.clone(), gp.j.clone(), &box_pts[..]),
            ("product_minus", true, gm.metric.clone(), gm.j.clone(), &box_pts[..]),
            ("flat_split", true, euclid.clone(), split, &box_pts[..]),
            ("rotating", false, euclid.clone(), planefields::plane_structure(&euclid, Arc::new(RotatingPlane { rate: 0.1 })), &box_pts[..]),
            ("sphere_slices", false, euclid.clone(), planefields::plane_structure(&euclid, Arc::new(SphereSlicePlane)), &off_axis[..]),
            ("cylinders", false, euclid.clone(), planefields::plane_structure(&euclid, Arc::new(CylinderPlane)), &off_axis[..]),
        ];
        let mut summary = Vec::new();
        for (name, zero, g, j, p) in fixtures {
            let r = planefields::parallel_equivalence_check(&g, &j, p, 1e-8)?;
            let inv_min = fold_min(r.rows.iter().map(|x| x.invariant_max));
            let par_min = fold_min(r.rows.iter().map(|x| x.parallel_residual));
            let id = format!("planefields.equivalence.{name}");
            if zero {
                b.at_most(
                    &id,
                    "parallel iff invariants vanish",
                    "max of invariants and |nabla J| on a parallel fixture",
                    r.invariant_max.max(r.parallel_max),
                    1e-9,
                );
            } else {
                b.at_least(
                    &id,
                    "parallel iff invariants vanish",
                    "min over points of invariants and |nabla J| on a non-parallel fixture",
                    inv_min.min(par_min),
                    1e-3,
                );
            }
            summary.push(EquivalenceSummary {
                fixture: name,
                invariant_min: inv_min,
                invariant_max: r.invariant_max,
                parallel_min: par_min,
                parallel_max: r.parallel_max,
                equivalent: r.equivalent,
            });
        }
        b.table("equivalence", &summary);
        Ok(())
    });

    group(b, "planefields.engine", "engine", |b| {
        let g = build_product(s(1.0), s(2.0), -1.0)?;
        let f = planefields::adapted_frame(&g.metric, &CoordinatePlane(0, 1), &box_pts[0])?;
        b.at_most("planefields.engine.frame", "engine", "adapted frame orthonormality", f.orthonormality_residual, 1e-12);
        let e = engine_residuals(&g.metric, &box_pts[..2])?;
        b.at_most("planefields.engine.jet_fd", "engine", "jets vs central differences on a neutral product", e.jet_fd, 1e-5);
        b.at_most("planefields.engine.symmetries", "engine", "Riemann symmetries on a neutral product", e.symmetries, 1e-9);
        Ok(())
    });
}

#[derive(Serialize)]
struct RouteRow {
    fixture: String,
    point: [f64; 4],
    system: f64,
    covariant: f64,
}

fn pde_suite(b: &mut ReportBuilder, seed: u64) {
    let mut rng = sampling::rng(seed);
    let base = sampling::box_points(&mut rng, 5, -0.6, 0.6);
    let vals = sampling::box_points(&mut rng, 5, -1.0, 1.0);
    let om = ConformalFactor::line_space();

    group(b, "pde.routes", "route equivalence", |b| {
        let mut rows = Vec::new();
        let (mut zero, mut nonzero) = (0.0_f64, f64::INFINITY);
        let mut push = |rows: &mut Vec<RouteRow>, name: &str, p: &[f64; 4], r: &pde::RouteComparison, is_zero: bool| {
            if is_zero {
                zero = zero.max(r.system.max).max(r.covariant);
            } else {
                nonzero = nonzero.min(r.system.max).min(r.covariant);
            }
            rows.push(RouteRow { fixture: name.to_string(), point: *p, system: r.system.max, covariant: r.covariant });
        };
        for (p, v) in base.iter().zip(&vals) {
            let (al, be) = (Cx::new(1.5 + v[0], v[1]), Cx::new(0.5 * v[2], 0.5 * v[3]));
            let z = pde::first_order_isometric(&om, al, be, p)?;
            push(&mut rows, "isometric_first_order", p, &pde::isometric_routes(&om, &z, p)?, true);
            let off = IsometricData::new(&format!("({}) + 0.2*Z2", z.alpha.src), &z.beta.src)?;
            push(&mut rows, "isometric_perturbed", p, &pde::isometric_routes(&om, &off, p)?, false);
        }
        for fam in [NullFamily::Alpha, NullFamily::Beta] {
            let name = format!("{fam:?}").to_lowercase();
            for p in &base[..3] {
                let z = pde::first_order_anti(&om, fam, 0.4, 2.5, p)?;
                push(&mut rows, &format!("{name}_first_order"), p, &pde::anti_routes(&om, &z, p)?, true);
                let c = pde::AntiData::new(fam, "0.3", "2.0")?;
                push(&mut rows, &format!("{name}_constant"), p, &pde::anti_routes(&om, &c, p)?, false);
            }
        }
        b.at_most("pde.routes.zero", "parallel systems", "max of system residual and |nabla j| on first-order solutions", zero, 1e-9);
        b.at_least("pde.routes.nonzero", "parallel systems", "min of system residual and |nabla j| on perturbed data", nonzero, 1e-3);
        b.table("routes", &rows);
        Ok(())
    });

    group(b, "pde.ultrahyperbolic", "ultrahyperbolic equation", |b| {
        let pts = sampling::box_points(&mut rng, 50, -0.8, 0.8);
        let r = try_max(&pts, |p| pde::ultrahyperbolic_residual(&om, p))?;
        b.at_most("pde.ultrahyperbolic.line_space", "ultrahyperbolic equation", "max |(d1 d1b - d2 d2b) Omega| on 50 points", r, 1e-10);
        let mut ds = 0.0_f64;
        for src in ["1 + abs2(Z1)", "exp(re(Z1*Z2)/3)", pde::LINE_SPACE_OMEGA] {
            let f = ConformalFactor::new(src)?;
            let g = pde::conformal_metric(&f);
            for p in &pts[..3] {
                let j = f.jet(p)?;
                let want = -24.0 * (j.d11b - j.d22b) / j.value.powi(3);
                ds = ds.max((curvature(&g, p)?.scalar - want).abs() / (1.0 + want.abs()));
            }
        }
        b.at_most(
            "pde.ultrahyperbolic.scalar",
            "scalar flat iff ultrahyperbolic",
            "S vs -24 (d1 d1b - d2 d2b) Omega / Omega^3, relative",
            ds,
            1e-9,
        );
        Ok(())
    });

    group(b, "pde.polar", "polar system", |b| {
        let f = ConformalFactor::new("exp(re(Z1*conj(Z2))/2) + abs2(Z1)/5")?;
        let d = PolarData::new("1.3 + 0.2*re(Z1)", "0.4 + 0.1*im(Z2)^2", "0.5*re(Z2) + im(Z1)", "1 - 0.3*re(Z1*Z2)")?;
        let c = IsometricData::from_polar(&d)?;
        let n2 = |v: Vec<f64>| v.iter().map(|x| x * x).sum::<f64>();
        let pts = sampling::box_points(&mut rng, 5, -0.8, 0.8);
        let r = try_max(&pts, |p| {
            let pol = pde::polar_parallel_residual(&f, &d, p, PolarForm::Corrected)?;
            let cx = pde::isometric_parallel_residual(&f, &c, p)?;
            Ok((n2(pol.moduli()) - 2.0 * n2(cx.moduli())).abs() / (1.0 + n2(cx.moduli())))
        })?;
        b.at_most("pde.polar.equivalent", "polar form", "| |polar|^2 - 2 |complex|^2 |, relative", r, 1e-10);

        let p = base[0];
        let z = pde::first_order_isometric(&om, Cx::new(1.1, 0.7), Cx::new(0.3, -0.4), &p)?;
        let w = |f: &pde::ComplexField| f.wirtinger(&p).map(|x| x.value);
        let (al, be) = (w(&z.alpha)?, w(&z.beta)?);
        let polar = PolarData::new(
            &format!("sqrt(abs2({}))", z.alpha.src),
            &format!("sqrt(abs2({}))", z.beta.src),
            &format!("{:?} + im(log(({})/({:?} + {:?}*i())))", al.im.atan2(al.re), z.alpha.src, al.re, al.im),
            &format!("{:?} + im(log(({})/({:?} + {:?}*i())))", be.im.atan2(be.re), z.beta.src, be.re, be.im),
        )?;
        let good = pde::polar_parallel_residual(&om, &polar, &p, PolarForm::Corrected)?;
        let printed = pde::polar_parallel_residual(&om, &polar, &p, PolarForm::Printed)?;
        b.at_most("pde.polar.first_order", "polar form", "polar residual of a first-order solution", good.max, 1e-10);
        b.table("polar_first_order", serde_json::json!({ "corrected": good, "printed": printed }));
        Ok(())
    });

    group(b, "pde.engine", "engine", |b| {
        let g = pde::conformal_metric(&om);
        let e = engine_residuals(&g, &base[..2])?;
        b.at_most("pde.engine.jet_fd", "engine", "jets vs central differences on the conformal metric", e.jet_fd, 1e-5);
        b.at_most("pde.engine.symmetries", "engine", "Riemann symmetries on the conformal metric", e.symmetries, 1e-9);
        b.at_most("pde.engine.weyl_split", "engine", "Weyl split on the conformal metric", e.weyl_split, 1e-8);
        Ok(())
    });
}

#[derive(Serialize)]
struct GridRow {
    fixture: &'static str,
    per_axis: usize,
    nodes: usize,
    measure: f64,
    expected_volume: f64,
}

fn topology_suite(b: &mut ReportBuilder, _seed: u64) {
    let mut grids = Vec::new();
    let sphere = ClosedSurface::round(1.0);

    group(b, "topology.quadrature", "Euler characteristic and signature", |b| {
        let mut run = |name: &'static str, p: &ClosedProduct, n: usize| -> Result<(f64, f64)> {
            let g = p.metric();
            let grid = QuadratureGrid::product(p, n, true);
            let chi = topology::cgb_estimate(&g, &grid)?;
            let tau = topology::signature_estimate(&g, &grid)?;
            grids.push(GridRow {
                fixture: name,
                per_axis: n,
                nodes: chi.nodes,
                measure: chi.measure,
                expected_volume: chi.expected_volume,
            });
            Ok((chi.value, tau.value))
        };
        let (chi, tau) = run("s2xs2_plus", &ClosedProduct::new(sphere, sphere, 1.0), 64)?;
        b.at_most("topology.s2xs2_plus.chi", "Chern-Gauss-Bonnet", "|chi estimate - 4| for S2xS2 with G+", (chi - 4.0).abs(), 1e-3);
        b.at_most("topology.s2xs2_plus.tau", "signature integral", "|tau estimate| for S2xS2 with G+", tau.abs(), 1e-3);

        let torus = ClosedSurface::FlatTorus;
        let (chi, tau) = run("t4", &ClosedProduct::new(torus, torus, 1.0), 8)?;
        b.at_most("topology.t4.chi", "Chern-Gauss-Bonnet", "|chi estimate| for the flat torus", chi.abs(), 1e-12);
        b.at_most("topology.t4.tau", "signature integral", "|tau estimate| for the flat torus", tau.abs(), 1e-12);

        let minus = ClosedProduct::new(sphere, sphere, -1.0);
        let (chi, tau) = run("s2xs2_minus", &minus, 32)?;
        let ric = topology::ricci_only_estimate(&minus.metric(), &QuadratureGrid::product(&minus, 32, true))?.value;
        b.at_most(
            "topology.s2xs2_minus.chi",
            "Chern-Gauss-Bonnet, neutral",
            "|chi estimate - 4| for S2xS2 with G-",
            (chi - 4.0).abs(),
            1e-3,
        );
        b.at_most(
            "topology.s2xs2_minus.ricci_only",
            "Chern-Gauss-Bonnet, neutral",
            "|chi - (1/16 pi^2) int |Ric|^2| for G-",
            (chi - ric).abs(),
            1e-9,
        );
        b.at_most("topology.s2xs2_minus.tau", "signature integral", "|tau estimate| for S2xS2 with G-", tau.abs(), 1e-3);
        Ok(())
    });

    group(b, "topology.convergence", "quadrature convergence", |b| {
        let warped = ClosedProduct::new(ClosedSurface::Sphere { kappa: 1.0, warp: 0.3 }, sphere, 1.0);
        let rows = topology::convergence_table(&warped, &[4, 8, 16, 32, 64])?;
        let (e32, e64) = (rows[3].chi_error, rows[4].chi_error);
        b.at_most("topology.convergence.chi", "Chern-Gauss-Bonnet", "|chi - 4| on the warped sphere x sphere at 64 nodes", e64, 1e-3);
        b.holds(
            "topology.convergence.order",
            "quadrature convergence",
            "error at 64 nodes <= max(error at 32 / 4, 1e-10)",
            e64 <= (e32 / 4.0).max(1e-10),
        );
        b.at_most(
            "topology.convergence.tau",
            "signature integral",
            "max |tau| on the warped sphere x sphere",
            fold_max(rows.iter().map(|r| r.tau_error)),
            1e-2,
        );
        b.table("convergence", &rows);
        Ok(())
    });

    group(b, "topology.fubini_study", "homogeneous check", |b| {
        let (chi, tau) =
            topology::homogeneous_invariants(&topology::fubini_study(), &[0.3, -0.2, 0.5, 0.1], topology::FUBINI_STUDY_VOLUME)?;
        b.at_most("topology.fubini_study.chi", "Chern-Gauss-Bonnet", "|chi - 3| for Fubini-Study", (chi - 3.0).abs(), 1e-9);
        b.at_most("topology.fubini_study.tau", "signature integral", "|tau - 1| for Fubini-Study", (tau - 1.0).abs(), 1e-9);
        Ok(())
    });

    let k3 = topology::obstruction_report(&TopologicalProfile::k3());
    b.holds("topology.k3.profile", "K3 invariants", "K3 has (chi, tau) = (24, 16)", (k3.profile.chi, k3.profile.tau) == (24, 16));
    b.holds(
        "topology.k3.mod4",
        "neutral existence",
        "chi + tau = 40 and chi - tau = 8 are divisible by 4",
        k3.neutral_conditions && (k3.chi_plus_tau, k3.chi_minus_tau) == (40, 8),
    );
    b.holds(
        "topology.k3.obstruction",
        "no parallel structure",
        "tau != 0 rules out a parallel structure",
        k3.verdict == Verdict::CannotBeParallel,
    );
    b.holds(
        "topology.s2xs2.no_obstruction",
        "no parallel structure",
        "S2xS2 has no obstruction",
        topology::obstruction_report(&TopologicalProfile::s2xs2()).verdict == Verdict::NoObstruction,
    );

    let table = topology::blowup_table(9);
    let mut ok = [true; 4];
    for r in &table {
        let k = i64::from(r.k);
        ok[0] &= (r.report.profile.chi, r.report.profile.tau) == (3 + k, 1 - k);
        ok[1] &= r.report.hitchin_thorpe == (k <= 9);
        ok[2] &= r.report.neutral_conditions == (k % 2 == 1);
    }
    let blocked: Vec<u32> =
        table.iter().filter(|r| r.einstein_known && r.report.verdict == Verdict::CannotBeParallel).map(|r| r.k).collect();
    ok[3] = blocked == [3, 5, 7];
    b.holds("topology.blowups.invariants", "blow-up invariants", "chi = 3 + k and tau = 1 - k for k = 0..9", ok[0]);
    b.holds("topology.blowups.hitchin_thorpe", "Hitchin-Thorpe", "Hitchin-Thorpe holds exactly for k <= 9", ok[1]);
    b.holds("topology.blowups.neutral", "neutral existence", "mod-4 conditions hold exactly for odd k", ok[2]);
    b.holds("topology.blowups.obstruction", "no parallel structure", "obstruction flagged exactly for k = 3, 5, 7", ok[3]);
    b.table("blowups", &table);
    b.table("grids", &grids);
}
