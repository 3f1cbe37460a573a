//! Full hyperbolicity certification on both sides of the bifurcation, plus
//! the refusal at the bifurcation parameter itself.
//!
//! ```bash
//! cargo run -p horseshoe --example certify_hyperbolicity
//! ```

use horseshoe::hyperbolicity::{certify, VerifyOptions};
use horseshoe::RunConfig;

fn main() {
    let h = RunConfig::default().build_horseshoe().unwrap();
    let opts = VerifyOptions {
        depth: 10,
        ..VerifyOptions::default()
    };

    for &mu in &[0.01, -0.01] {
        let cert = certify(&h, mu, &opts).unwrap();
        println!("mu = {mu}: certified");
        println!("  boxes {}  (basin-tagged {})", cert.boxes_total, cert.basin_boxes);
        println!("  n1 = {}  zeta0 = {:.4}  xi = {:.4}", cert.n1, cert.zeta0, cert.xi);
        println!("  m = {}  n_bar = {}  worst dip = {:.4e}", cert.m_chain, cert.n_bar, cert.dip);
        println!("  uniform constants: C = {:.6e}, zeta = {:.8}", cert.c_const, cert.zeta);
        println!(
            "  cone margins: slope {:.4}, contraction {:.4}, expansion {:.4e} (eps = {:.4e})",
            cert.cone_margins.worst_slope_margin,
            cert.cone_margins.stable_contraction_margin,
            cert.cone_margins.worst_expansion_margin,
            cert.epsilon
        );
        println!(
            "  empirical check: {} orbits, {} violations",
            cert.validation_samples, cert.validation_violations
        );
        if let Some(a) = cert.attracting {
            println!(
                "  attracting point ({:.4}, {:.6}) with eigenvalues ({:.4}, {:.6})",
                a.x, a.y, a.eigen_horizontal, a.eigen_vertical
            );
        }
        println!();
    }

    match certify(&h, 0.0, &opts) {
        Err(e) => println!("mu = 0: refused -- {e}"),
        Ok(_) => unreachable!("the bifurcation parameter must be refused"),
    }
}
