//! Euler characteristic and signature of closed products by Gauss-Legendre quadrature.

use paraplex::topology::{self, ClosedProduct, ClosedSurface, QuadratureGrid};

fn main() -> paraplex::Result<()> {
    let s = ClosedSurface::round(1.0);
    for (name, p, n) in [
        ("S2 x S2, G+", ClosedProduct::new(s, s, 1.0), 32),
        ("S2 x S2, G-", ClosedProduct::new(s, s, -1.0), 32),
        ("T4", ClosedProduct::new(ClosedSurface::FlatTorus, ClosedSurface::FlatTorus, 1.0), 4),
    ] {
        let g = p.metric();
        let grid = QuadratureGrid::product(&p, n, true);
        let chi = topology::cgb_estimate(&g, &grid)?;
        let tau = topology::signature_estimate(&g, &grid)?;
        println!(
            "{name:<12} chi = {:.10} (exact {}), tau = {:.2e}, volume {:.6} of {:.6}",
            chi.value,
            p.euler_characteristic(),
            tau.value,
            chi.measure,
            chi.expected_volume
        );
    }

    let warped = ClosedProduct::new(ClosedSurface::Sphere { kappa: 1.0, warp: 0.3 }, s, 1.0);
    println!("\nwarped sphere x sphere");
    for row in topology::convergence_table(&warped, &[4, 8, 16, 32])? {
        println!("  n = {:>3}: chi error {:.3e}, tau error {:.3e}", row.per_axis, row.chi_error, row.tau_error);
    }

    let (chi, tau) = topology::homogeneous_invariants(&topology::fubini_study(), &[0.1, 0.2, 0.3, 0.4], topology::FUBINI_STUDY_VOLUME)?;
    println!("\nFubini-Study on CP2: chi = {chi:.12}, tau = {tau:.12}");
    Ok(())
}
