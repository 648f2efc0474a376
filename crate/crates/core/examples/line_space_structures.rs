//! The three structures J0, J1 and J2 on the space of lines: type, parallelism, integrability.

use paraplex::linespace;
use paraplex::sampling;
use paraplex::structures::{self, classify, classify_complex};

fn main() -> paraplex::Result<()> {
    let g = linespace::metric_g();
    let (j0, j1, j2) = linespace::structures_j012();
    let pts = sampling::line_points(&mut sampling::rng(7), 4, 0.8, 1.5);
    let p = pts[0];
    let gp = g.at(&p)?;

    println!("{:<4} {:>6} {:<15} {:>12} {:>12}", "", "J^2", "type", "|nabla J|", "|N_J|");
    for j in [&j0, &j1, &j2] {
        let m = j.at(&p)?;
        let kind = if j.square < 0.0 { classify_complex(&gp, &m)? } else { classify(&gp, &m)?.kind };
        println!(
            "{:<4} {:>6} {:<15} {:>12.3e} {:>12.3e}",
            j.name,
            j.square,
            format!("{kind:?}"),
            structures::parallel_residual(&g, j, &pts)?,
            structures::nijenhuis_residual(j, &pts)?,
        );
    }

    let c = classify(&gp, &j1.at(&p)?)?;
    println!("J1 eigenplanes: {:?}, consistent = {}", c.eigenplane_geometry, c.consistent);
    Ok(())
}
