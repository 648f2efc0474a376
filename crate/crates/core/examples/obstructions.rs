//! Topological obstructions to neutral metrics and parallel structures.

use paraplex::topology::{self, TopologicalProfile};

fn main() {
    for p in [
        TopologicalProfile::k3(),
        TopologicalProfile::s2xs2(),
        TopologicalProfile::t4(),
        TopologicalProfile::s4(),
        TopologicalProfile::cp2(),
    ] {
        let r = topology::obstruction_report(&p);
        println!(
            "{:<8} chi {:>3} tau {:>3}  Hitchin-Thorpe {:<5}  mod 4 {:<5}  {:?}",
            p.name, p.chi, p.tau, r.hitchin_thorpe, r.neutral_conditions, r.verdict
        );
    }
    println!("\nCP2 # k CP2-bar");
    for row in topology::blowup_table(10) {
        let r = &row.report;
        println!(
            "k = {:>2}  chi {:>2} tau {:>3}  Einstein known {:<5}  {:?}",
            row.k, r.profile.chi, r.profile.tau, row.einstein_known, r.verdict
        );
    }
}
