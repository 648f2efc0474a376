//! Load a geometry from JSON and query its curvature, or use a builtin.
//!
//! cargo run --example geometry_config -- crates/core/data/bump.json

use paraplex::config::{self, GeometryConfig};
use paraplex::report::to_json_17;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let geo = match std::env::args().nth(1) {
        Some(path) => GeometryConfig::load(path.as_ref())?.build()?,
        None => {
            let text = r#"{
                "name": "bump",
                "chart": { "complex": ["Z1", "Z2"] },
                "signature": "neutral",
                "conformal_factor": "1 + abs2(Z1)",
                "points": [[0.1, 0.2, 0.3, 0.4]]
            }"#;
            GeometryConfig::from_json(text)?.build()?
        }
    };
    let p = geo.points.first().copied().unwrap_or([0.1, 0.2, 0.3, 0.4]);
    let q = config::curvature_query(&geo, &p)?;
    println!("{}: S = {:.6}, |W|^2 = {:.3e}, |E|^2 = {:.6}", q.geometry, q.curvature.scalar, q.curvature.weyl_sq, q.curvature.einstein_sq);

    println!("builtins: {}", config::BUILTINS.join(", "));
    let q = config::curvature_query(&config::builtin("linespace-G")?, &[0.3, -0.1, 0.5, 0.2])?;
    for s in &q.structures {
        println!("  {} {:?}: parallel {:.2e}, Nijenhuis {:.2e}", s.name, s.kind, s.parallel_residual, s.nijenhuis_residual);
    }
    let diag: Vec<f64> = (0..4).map(|k| q.curvature.ricci[k][k]).collect();
    println!("Ricci diagonal of G: {}", to_json_17(&diag));
    Ok(())
}
