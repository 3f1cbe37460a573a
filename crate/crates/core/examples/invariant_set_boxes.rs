//! Outer approximation of the maximal invariant set by box subdivision, and
//! how the covered area shrinks with depth.  After the bifurcation the cover
//! keeps the attracting point's basin, tagged as its own component.
//!
//! ```bash
//! cargo run -p horseshoe --example invariant_set_boxes
//! ```

use horseshoe::cover::{build_cover, Component};
use horseshoe::RunConfig;

fn main() {
    let h = RunConfig::default().build_horseshoe().unwrap();

    println!("mu = +0.02 (before the bifurcation):");
    println!("{:>6} {:>8} {:>14}", "depth", "boxes", "total area");
    for depth in [4, 6, 8, 10, 12] {
        let cover = build_cover(&h, 0.02, depth, 1_000_000).unwrap();
        println!(
            "{depth:>6} {:>8} {:>14.6e}",
            cover.boxes.len(),
            cover.total_area()
        );
    }

    let mu = -0.02;
    let cover = build_cover(&h, mu, 10, 1_000_000).unwrap();
    let basin = cover
        .boxes
        .iter()
        .filter(|b| b.component == Component::AttractingBasin)
        .count();
    let saddle = cover
        .boxes
        .iter()
        .filter(|b| b.component == Component::SaddleP)
        .count();
    println!("\nmu = {mu} (after the bifurcation), depth 10:");
    println!(
        "  {} boxes: {} nontrivial, {} basin-tagged, {} holding the saddle",
        cover.boxes.len(),
        cover.boxes.len() - basin - saddle,
        basin,
        saddle
    );
    let (s, q) = h.base.core.field_zeros(mu).unwrap();
    let p = h.base.spec.p;
    println!("  (p, p)     covered: {}", cover.box_containing(p, p).is_some());
    println!("  (p, q_mu)  covered: {}", cover.box_containing(p, q).is_some());
    println!("  (p, s_mu)  covered: {}", cover.box_containing(p, s).is_some());
}
