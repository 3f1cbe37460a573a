//! The saddle-node field and its exact time-one maps in all three parameter
//! regimes: drift-through (mu > 0), the degenerate rest point (mu = 0), and
//! the newborn pair of rest points (mu < 0).
//!
//! ```bash
//! cargo run -p horseshoe --example normal_form_flow
//! ```

use horseshoe::SaddleNodeNormalForm;

fn main() {
    let nf = SaddleNodeNormalForm::new(1.0, 1.0, 0.5, 0.05, 0.05).unwrap();

    println!("field Y_mu(y) = y^2 + mu on the core (-0.5, 0.5)\n");

    for &mu in &[0.01, 0.0, -0.01] {
        println!("mu = {mu}:");
        match nf.field_zeros(mu) {
            Some((s, q)) => println!("  rest points: s = {s:.6} (attracting), q = {q:.6} (repelling)"),
            None => println!("  no rest points; every orbit drifts upward"),
        }
        for &y0 in &[-0.3, -0.05, 0.05, 0.3] {
            match nf.time_one_map(mu, y0) {
                Ok(y1) => {
                    let d = nf.time_one_derivative(mu, y0).unwrap();
                    println!("  f({y0:+.2}) = {y1:+.6}   f'({y0:+.2}) = {d:.6}");
                }
                Err(e) => println!("  f({y0:+.2}) -> {e}"),
            }
        }
        println!();
    }

    // the flow-time integral and the semigroup property
    let mu = 1e-4;
    let t = nf.flow_time_between(mu, -0.25, 0.25).unwrap();
    println!("passage time -0.25 -> 0.25 at mu = 1e-4: {t:.4} time units");
    println!("(closed form: 2 arctan(25)/sqrt(mu) = {:.4})", 200.0 * (25.0f64).atan() / 0.02);

    let y0 = -0.3;
    let two_steps = nf.time_one_map(mu, nf.time_one_map(mu, y0).unwrap()).unwrap();
    let direct = nf.flow_at(mu, y0, 2.0).unwrap();
    println!("\nsemigroup check at y0 = {y0}: f(f(y0)) = {two_steps:.12}, flow_2(y0) = {direct:.12}");
}
