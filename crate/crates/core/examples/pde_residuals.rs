//! Parallel-structure systems for conformally flat neutral metrics.

use paraplex::pde::{self, ConformalFactor, IsometricData, NullFamily};
use paraplex::tensor::curvature;
use paraplex::Cx;

fn main() -> paraplex::Result<()> {
    let om = ConformalFactor::line_space();
    let p = [0.2, -0.3, 0.4, 0.1];
    println!("ultrahyperbolic residual of the line-space factor: {:.2e}", pde::ultrahyperbolic_residual(&om, &p)?);

    let bump = ConformalFactor::new("1 + abs2(Z1)")?;
    let j = bump.jet(&p)?;
    let s = curvature(&pde::conformal_metric(&bump), &p)?.scalar;
    println!("1 + |Z1|^2: S = {s:.6}, from the factor {:.6}", -24.0 * (j.d11b - j.d22b) / j.value.powi(3));

    let z = pde::first_order_isometric(&om, Cx::new(1.2, 0.3), Cx::new(0.1, -0.2), &p)?;
    let r = pde::isometric_routes(&om, &z, &p)?;
    println!("first-order isometric data: system {:.2e}, |nabla j| {:.2e}", r.system.max, r.covariant);
    let off = IsometricData::new(&format!("({}) + 0.2*Z2", z.alpha.src), &z.beta.src)?;
    let r = pde::isometric_routes(&om, &off, &p)?;
    println!("perturbed:                  system {:.2e}, |nabla j| {:.2e}", r.system.max, r.covariant);

    for fam in [NullFamily::Alpha, NullFamily::Beta] {
        let d = pde::first_order_anti(&om, fam, 0.4, 2.5, &p)?;
        let r = pde::anti_routes(&om, &d, &p)?;
        println!("{fam:?} anti-isometric: system {:.2e}, |nabla j| {:.2e}", r.system.max, r.covariant);
    }
    Ok(())
}
