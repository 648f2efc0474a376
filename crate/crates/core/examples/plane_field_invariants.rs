//! Invariants of 2-plane fields: sphere slices in R^4 and eigenplanes of a product.

use std::sync::Arc;

use paraplex::planefields::{self, EigenplaneField, RotatingPlane, SphereSlicePlane};
use paraplex::products::{build_product, SurfaceFactor};
use paraplex::tensor::flat_metric;

fn main() -> paraplex::Result<()> {
    let euclid = flat_metric("R4", [1.0; 4]);
    for r in [1.0, 2.0, 3.0] {
        let p = [r * 0.6, -r * 0.8, 0.0, 0.25];
        let np = planefields::np_invariants(&euclid, &SphereSlicePlane, &p)?;
        println!(
            "sphere slice r = {r}: leaf curvature {:.6} (1/r^2 = {:.6}), Gauss equation {:.6}",
            np.leaf_curvature.from_invariants,
            1.0 / (r * r),
            np.leaf_curvature.gauss_equation
        );
    }

    let g = build_product(SurfaceFactor::constant(1.0), SurfaceFactor::constant(2.0), -1.0)?;
    let p = [0.1, 0.2, -0.3, 0.05];
    for sign in [1.0, -1.0] {
        let np = planefields::np_invariants(&g.metric, &EigenplaneField::at(&g.j, sign, &p)?, &p)?;
        println!("product eigenplane {sign:+}: max invariant {:.2e}", np.max_abs().max(np.max_abs_hat()));
    }

    let pts = [[0.1, 0.2, 0.3, 0.4], [0.5, -0.2, 0.1, 0.0]];
    for (name, j) in [
        ("rotating", planefields::plane_structure(&euclid, Arc::new(RotatingPlane { rate: 0.1 }))),
        ("sphere slices", planefields::plane_structure(&euclid, Arc::new(SphereSlicePlane))),
    ] {
        let r = planefields::parallel_equivalence_check(&euclid, &j, &pts, 1e-8)?;
        println!("{name}: invariants up to {:.3e}, |nabla J| up to {:.3e}, equivalent = {}", r.invariant_max, r.parallel_max, r.equivalent);
    }
    Ok(())
}
