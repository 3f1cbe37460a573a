//! Orbit itineraries of the planar family: the saddle stays put, strip
//! orbits bounce between `H` and the flip, and gap orbits fall through the
//! arch into the sink.
//!
//! ```bash
//! cargo run -p horseshoe --example horseshoe_orbit
//! ```

use horseshoe::RunConfig;

fn main() {
    let h = RunConfig::default().build_horseshoe().unwrap();
    let mu = 0.01;
    let p = h.base.spec.p;

    let starts = [
        ("saddle (p, p)", p, p),
        ("strip point", 0.1, 0.2),
        ("gap point", 0.0, 0.5 * (h.base.spec.p_tilde + h.l)),
    ];

    for (label, x0, y0) in starts {
        println!("start: {label} = ({x0:.4}, {y0:.4})");
        let (mut x, mut y) = (x0, y0);
        for step in 0..8 {
            let region = h.classify(mu, x, y);
            println!("  step {step}: {:8}  ({x:+.6}, {y:+.6})", region.as_str());
            match h.apply(mu, x, y) {
                Ok((nx, ny)) => {
                    x = nx;
                    y = ny;
                }
                Err(_) => {
                    println!("  step {}: escaped D", step + 1);
                    break;
                }
            }
        }
        println!();
    }

    // inverse branch: pull the saddle's box back through the contraction
    let (bx, by) = h.apply_inverse(mu, p, 0.0).unwrap();
    println!("apply_inverse(p, 0) = ({bx:.6}, {by:.6}) -- the H-column preimage");
}
