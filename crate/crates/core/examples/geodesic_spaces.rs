//! Oriented geodesic planes of the 4-dimensional space forms: structure table and Hodge signs.

use paraplex::spaceforms::{self, AmbientSignature};
use paraplex::tensor::curvature;

fn main() -> paraplex::Result<()> {
    println!("{:<10} {:<54} {:>6} {:>10}", "row", "J, J', J*", "sigma", "max|E|");
    for sig in AmbientSignature::ROWS {
        let c = sig.sample_center();
        let row = spaceforms::structure_table_verify(sig, &c)?;
        let h = spaceforms::hodge_check(sig, &c, 1e-9)?;
        let e = curvature(&spaceforms::metric_gp(sig)?, &c)?.einstein_max();
        let sigma = h.sigma.map_or("-".to_string(), |s| s.to_string());
        println!("{:<10} {:<54} {:>6} {:>10.2e}", row.label, row.computed.join(", "), sigma, e);
        if !row.matches {
            println!("           expected {}", row.expected.join(", "));
        }
    }
    Ok(())
}
