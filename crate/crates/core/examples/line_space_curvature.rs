//! Curvature of the neutral metric on the space of oriented lines, at a few sampled lines.

use paraplex::linespace;
use paraplex::sampling;
use paraplex::tensor::curvature;

fn main() -> paraplex::Result<()> {
    let g = linespace::metric_g();
    let mut rng = sampling::rng(42);
    println!("{:>28}  {:>9}  {:>10}  {:>10}  {:>10}", "point (xi, eta)", "signature", "S", "|W|^2", "max|E|");
    for p in sampling::line_points(&mut rng, 5, 0.9, 2.0) {
        let c = curvature(&g, &p)?;
        println!(
            "{:>28}  {:>9}  {:>10.2e}  {:>10.2e}  {:>10.4}",
            format!("{:.2?}", p),
            c.signature.to_string(),
            c.scalar,
            c.weyl_sq,
            c.einstein_max()
        );
    }
    Ok(())
}
