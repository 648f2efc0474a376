//! Curvature of product metrics G+ and G- over two surfaces, against the closed forms.

use paraplex::products::{self, build_product, SurfaceFactor};
use paraplex::tensor::curvature;

fn main() -> paraplex::Result<()> {
    let p = [0.2, -0.1, 0.3, 0.15];
    println!("{:>5} {:>5} {:>4} {:>9} {:>9} {:>9} {:>9} {:>9}", "k1", "k2", "eps", "S", "S form", "|E|^2", "|E|^2 form", "|W|^2");
    for (k1, k2) in [(1.0, 1.0), (1.0, -1.0), (1.0, 2.0), (-0.5, 0.0)] {
        for eps in [1.0, -1.0] {
            let g = build_product(SurfaceFactor::constant(k1), SurfaceFactor::constant(k2), eps)?;
            let c = curvature(&g.metric, &p)?;
            let f = products::closed_form_curvature(k1, k2, eps);
            println!(
                "{k1:>5} {k2:>5} {eps:>4} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
                c.scalar, f.scalar, c.einstein_sq, f.einstein_sq, c.weyl_sq
            );
        }
    }
    let g = build_product(SurfaceFactor::constant(1.0), SurfaceFactor::constant(2.0), 1.0)?;
    let c = curvature(&g.metric, &p)?;
    println!("|W|^2 / (k1 + k2)^2 = {:.12}", c.weyl_sq / 9.0);

    // a non-constant factor: curvature is read off the metric
    let w = SurfaceFactor::warped("0.3*sin(u)*cos(v)")?;
    println!("{} at (0.2, -0.1): K = {:.6}", w.name, w.gauss_curvature(0.2, -0.1)?);
    Ok(())
}
