//! Build the 1D arc and the planar family with the default configuration and
//! print every derived constant together with the validation verdicts.
//!
//! ```bash
//! cargo run -p horseshoe --example construct_and_validate
//! ```

use horseshoe::escape::compute_constants;
use horseshoe::horseshoe::HorseshoeMap2D;
use horseshoe::RunConfig;

fn main() {
    let cfg = RunConfig::default();
    let core = cfg.normal_form().unwrap();
    let mut map =
        horseshoe::GlobalMap1D::build_unchecked(core, cfg.extension.clone()).unwrap();
    let report = map.validate(cfg.mu_grid_points.0, cfg.validation_grid.0);

    println!("validation over a {} x {} (mu, y) grid:", cfg.mu_grid_points.0, cfg.validation_grid.0);
    for e in &report.entries {
        println!("  [{}] {}", if e.pass { "pass" } else { "FAIL" }, e.name);
    }
    println!("\nderivative bounds earned from the grid:");
    println!("  c1 = {:.6}  (grid min near p: {:.6})", map.c1, report.c1_grid_min);
    println!("  c2 = {:.6}  (grid min on J:   {:.6})", map.c2, report.c2_grid_min);

    let consts = compute_constants(&map).unwrap();
    println!("\nescape constants:");
    println!("  sigma0 = {:.6}   sigma1 = {:.6}", consts.sigma0, consts.sigma1);
    println!("  r  = {:.6}  m_cap = {}   sigma2 = {:.6e}", consts.r, consts.m_cap, consts.sigma2);
    println!("  r~ = {:.6}  m~cap = {}   sigma3 = {:.6e}", consts.r_tilde, consts.m_tilde_cap, consts.sigma3);

    let h = HorseshoeMap2D::solve_constants(map, cfg.horseshoe_params()).unwrap();
    let (r_lo, r_hi) = h.rectangle();
    println!("\nplanar family:");
    println!("  rectangle R = [{r_lo:.4}, {r_hi:.4}]^2");
    println!("  lambda = {:.6}   sigma_tilde = {:.4e}   zeta = {}", h.lambda, h.sigma_tilde, h.zeta);
    println!("  H_tilde strip: [{:.12}, {:.12}] (width {:.3e})", h.l, h.l_tilde, h.l_tilde - h.l);
    println!(
        "  expansion budget sigma_tilde*sigma1*sigma2*sigma3 = {:.4} >= zeta",
        h.sigma_tilde * h.constants.sigma1 * h.constants.sigma2 * h.constants.sigma3
    );
}
