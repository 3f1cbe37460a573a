//! Interval-certified hyperbolicity of the maximal invariant set.
//!
//! For each box of the cover, an expansion witness iterates the box's
//! y-interval through the strip dynamics, branching wherever the interval
//! straddles a strip boundary and discarding the parts that leave the strips
//! (those points are not in the invariant set).  The accumulated lower bound
//! of the vertical derivative product must clear the target rate `zeta` on
//! every surviving branch; nothing pointwise enters a certificate.
//!
//! The per-box witnesses are then chained into uniform constants.  Writing
//! `I` for the largest witness horizon and `D` for the worst intermediate
//! product (the "dip" through the slow channel), every surviving `n`-step
//! vertical product factors into complete witness blocks of length at most
//! `I` with product at least `zeta`, plus a tail bounded below by `D`, so
//!
//! `|dphi^n v| >= zeta^(floor(n/I) - 1) * D * |v| >= C * zeta_u^n * |v|`
//!
//! with `zeta_u = (uniform n-bar-step bound)^(1/n-bar) > 1` and
//! `C = D / zeta`.  The cone conditions of the robustness argument are
//! checked per box with every Jacobian entry widened by the perturbation
//! size `epsilon`.
//!
//! After the bifurcation the cover still contains the basin of the attracting
//! point (those orbits never leave the rectangle); its boxes are tagged and
//! certified through the attracting fixed point's eigenvalues, while the
//! expansion witnesses cover the nontrivial component above the repelling
//! point `q_mu`, matching the decomposition used in the escape estimates.

use crate::cover::{build_cover, Component, Strip};
pub use crate::cover::BoxCover;
use crate::error::{Error, Result};
use crate::horseshoe::{HorseshoeMap2D, PlanarFixedPoint};
use crate::interval::Iv;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Per-box certified expansion data.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionWitness {
    pub box_id: usize,
    /// The box rectangle (x0, x1, y0, y1).
    pub rect: (f64, f64, f64, f64),
    /// Steps until every surviving branch clears the target rate.
    pub i_x: u32,
    /// Steps spent near p / climbing to I / crossing I / above I.
    pub decomposition: (u32, u32, u32, u32),
    /// Certified lower bound of the vertical product over `i_x` steps.
    pub factor: f64,
    /// Same with every factor degraded by the perturbation class.
    pub factor_perturbed: f64,
    /// Worst intermediate lower bound along the way.
    pub dip: f64,
    /// No branch survives: the box contains no full orbits.
    pub vacuous: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeMargins {
    /// `1/2 - (image slope of the cone boundary)`, worst over boxes; serves
    /// both the forward unstable-cone and backward stable-cone inclusion
    /// (the two interval computations coincide for diagonal-plus-epsilon
    /// Jacobians).
    pub worst_slope_margin: f64,
    /// `1/zeta - (lambda + 1.5 epsilon)`.
    pub stable_contraction_margin: f64,
    /// `factor_perturbed / zeta - 1`, worst over witnesses.
    pub worst_expansion_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicityCertificate {
    pub mu: f64,
    pub n1: u64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta0: f64,
    /// Certified minimum single-step vertical expansion over the cover.
    pub xi: f64,
    pub m_chain: u32,
    pub n_bar: u64,
    /// The uniform constant C (<= 1).
    pub c_const: f64,
    /// The uniform rate zeta (> 1).
    pub zeta: f64,
    pub cone_ok: bool,
    pub cone_margins: ConeMargins,
    pub epsilon: f64,
    /// Worst intermediate product bound over all witnesses.
    pub dip: f64,
    pub i_max: u32,
    pub boxes_total: usize,
    pub basin_boxes: usize,
    pub witnesses: Vec<ExpansionWitness>,
    /// The attracting fixed point born at the bifurcation (mu < 0 only),
    /// certified by its eigenvalues.
    pub attracting: Option<PlanarFixedPoint>,
    pub validation_samples: usize,
    pub validation_violations: usize,
}

/// Pipeline knobs.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub depth: u32,
    pub box_budget: usize,
    pub witness_step_cap: u32,
    /// Perturbation size for the cone checks; `(c2 - 2 lambda)/10` if absent.
    pub epsilon: Option<f64>,
    /// Sampled orbits for the empirical validation of (C, zeta).
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            depth: 10,
            box_budget: 1_000_000,
            witness_step_cap: 50_000,
            epsilon: None,
            samples: 1000,
            seed: 42,
        }
    }
}

/// Default perturbation size used by the robustness check.
///
/// The cone-invariance margin permits anything below `(c2 - 2 lambda)/9`.
/// After the bifurcation the perturbed expansion near the newborn repelling
/// point only holds while `1.5 eps` stays below its spectral gap
/// `f'(q_mu) - 1 = exp(2 alpha q_mu) - 1`, which vanishes as `mu -> 0-`;
/// the default therefore shrinks with that gap ("sufficiently small" in the
/// robustness statement).  Checks at a pinned eps pass it explicitly.
pub fn default_epsilon(h: &HorseshoeMap2D, mu: f64) -> f64 {
    let base = (h.base.c2 - 2.0 * h.lambda) / 10.0;
    match h.base.core.field_zeros(mu) {
        Some((_s, q)) => {
            let gap = (2.0 * h.base.core.alpha * q).exp() - 1.0;
            base.min(0.25 * gap)
        }
        None => base,
    }
}

struct StripGeometry {
    h_lo: f64,
    h_hi: f64,
    l: f64,
    l_tilde: f64,
    /// Points below this are outside the certified component (mu < 0).
    clip_min: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum WitnessMode {
    /// Track the certified product and stop when it clears the target:
    /// the expansion witness itself.
    Plain,
    /// Track the product with every factor degraded by the perturbation
    /// class; branches that cannot clear the target stop at the hard cap and
    /// report what they reached (a negative robustness margin), since a
    /// perturbation larger than the local spectral gap makes the degraded
    /// product decay forever.
    Perturbed { cap: u32 },
}

struct Branch {
    y: Iv,
    value: f64,
    step: u32,
    counts: [u32; 4],
}

struct WitnessAccum {
    factor: f64,
    i_x: u32,
    dip: f64,
    counts: [u32; 4],
    survivors: usize,
}

/// Certified product iteration for one y-interval.  Parts of any iterate
/// outside the strips (or below the component clip) are discarded: those
/// points are not in the invariant set.
#[allow(clippy::too_many_arguments)]
fn witness_interval(
    h: &HorseshoeMap2D,
    mu: f64,
    y0: Iv,
    geom: &StripGeometry,
    apply_clip: bool,
    step_cap: u32,
    refine_left: u32,
    mode: WitnessMode,
    degrade: f64,
) -> Result<WitnessAccum> {
    let zeta_t = h.zeta;
    let sigma_lo = h.sigma_tilde * (1.0 - 1e-14);

    let mut frontier = vec![Branch {
        y: y0,
        value: 1.0,
        step: 0,
        counts: [0; 4],
    }];
    let mut acc = WitnessAccum {
        factor: f64::INFINITY,
        i_x: 0,
        dip: 1.0,
        counts: [0; 4],
        survivors: 0,
    };
    let mut processed = 0usize;

    while let Some(br) = frontier.pop() {
        processed += 1;
        if processed > 200_000 {
            return refine_or_fail(
                h, mu, y0, geom, apply_clip, step_cap, refine_left, mode, degrade,
            );
        }
        let capped = matches!(mode, WitnessMode::Perturbed { cap } if br.step >= cap);
        if br.value >= zeta_t || capped {
            acc.factor = acc.factor.min(br.value);
            if br.step >= acc.i_x {
                acc.i_x = br.step;
                acc.counts = br.counts;
            }
            acc.survivors += 1;
            continue;
        }
        if br.step >= step_cap {
            return refine_or_fail(
                h, mu, y0, geom, apply_clip, step_cap, refine_left, mode, degrade,
            );
        }
        // split the interval by the strip partition
        let mut h_part = br.y.intersect(Iv::new(geom.h_lo, geom.h_hi));
        if apply_clip {
            if let (Some(part), Some(clip)) = (h_part, geom.clip_min) {
                h_part = part.intersect(Iv::new(clip, f64::INFINITY));
            }
        }
        if let Some(part) = h_part {
            let d = h.base.deriv_interval(mu, part);
            if !(d.lo > 0.0) {
                return Err(Error::CertificateFailure(format!(
                    "derivative lower bound {} not positive on [{}, {}]",
                    d.lo, part.lo, part.hi
                )));
            }
            let factor = (d.lo - degrade).max(0.0);
            let mut counts = br.counts;
            let mid = part.mid();
            let spec = &h.base.spec;
            if mid <= spec.p + spec.delta2 {
                counts[0] += 1;
            } else if mid < spec.a {
                counts[1] += 1;
            } else if mid <= spec.b {
                counts[2] += 1;
            } else {
                counts[3] += 1;
            }
            let value = br.value * factor;
            acc.dip = acc.dip.min(value);
            frontier.push(Branch {
                y: h.base.eval_interval(mu, part),
                value,
                step: br.step + 1,
                counts,
            });
        }
        if let Some(part) = br.y.intersect(Iv::new(geom.l, geom.l_tilde)) {
            let iy = (part - Iv::point(h.l))
                .scale(-h.sigma_tilde)
                .offset(h.base.top());
            let value = br.value * (sigma_lo - degrade).max(0.0);
            acc.dip = acc.dip.min(value.min(1.0));
            frontier.push(Branch {
                y: iy,
                value,
                step: br.step + 1,
                counts: br.counts,
            });
        }
        // remaining parts leave the strips: not in the invariant set
    }

    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn refine_or_fail(
    h: &HorseshoeMap2D,
    mu: f64,
    y0: Iv,
    geom: &StripGeometry,
    apply_clip: bool,
    step_cap: u32,
    refine_left: u32,
    mode: WitnessMode,
    degrade: f64,
) -> Result<WitnessAccum> {
    if refine_left == 0 {
        return Err(Error::CertificateFailure(format!(
            "witness for [{}, {}] exceeds the iteration cap; refinement exhausted",
            y0.lo, y0.hi
        )));
    }
    let mid = y0.mid();
    let a = witness_interval(
        h,
        mu,
        Iv::new(y0.lo, mid),
        geom,
        apply_clip,
        step_cap,
        refine_left - 1,
        mode,
        degrade,
    )?;
    let b = witness_interval(
        h,
        mu,
        Iv::new(mid, y0.hi),
        geom,
        apply_clip,
        step_cap,
        refine_left - 1,
        mode,
        degrade,
    )?;
    Ok(WitnessAccum {
        factor: a.factor.min(b.factor),
        i_x: a.i_x.max(b.i_x),
        dip: a.dip.min(b.dip),
        counts: if a.i_x >= b.i_x { a.counts } else { b.counts },
        survivors: a.survivors + b.survivors,
    })
}

/// Hard cap for the robustness pass: several full circuits even at the
/// slowest grid parameters.
const PERT_CAP: u32 = 20_000;

/// Compute witnesses for every box that requires one: the plain pass gives
/// the expansion witness, a second degraded pass gives the robustness margin.
pub fn expansion_witnesses(
    h: &HorseshoeMap2D,
    mu: f64,
    cover: &BoxCover,
    eps: f64,
    step_cap: u32,
) -> Result<Vec<ExpansionWitness>> {
    let (h_lo, h_hi) = h.h_strip_y();
    let clip_min = if mu < 0.0 {
        h.base.core.field_zeros(mu).map(|(_s, q)| q - 1e-12)
    } else {
        None
    };
    let geom = StripGeometry {
        h_lo,
        h_hi,
        l: h.l,
        l_tilde: h.l_tilde,
        clip_min,
    };
    let pert_mode = WitnessMode::Perturbed {
        cap: PERT_CAP.min(step_cap),
    };
    let mut out = Vec::new();
    for (id, b) in cover.boxes.iter().enumerate() {
        // the clip would cut the saddle box, whose expansion is local
        let clip = match b.component {
            Component::AttractingBasin => continue,
            Component::SaddleP => false,
            Component::Nontrivial => true,
        };
        let plain = witness_interval(
            h,
            mu,
            b.y,
            &geom,
            clip,
            step_cap,
            24,
            WitnessMode::Plain,
            0.0,
        )?;
        let pert = witness_interval(
            h,
            mu,
            b.y,
            &geom,
            clip,
            step_cap,
            24,
            pert_mode,
            1.5 * eps,
        )?;
        let rect = (b.x.lo, b.x.hi, b.y.lo, b.y.hi);
        out.push(finish_witness(id, rect, plain, pert));
    }
    Ok(out)
}

fn finish_witness(
    id: usize,
    rect: (f64, f64, f64, f64),
    plain: WitnessAccum,
    pert: WitnessAccum,
) -> ExpansionWitness {
    if plain.survivors == 0 {
        ExpansionWitness {
            box_id: id,
            rect,
            i_x: 0,
            decomposition: (0, 0, 0, 0),
            factor: f64::INFINITY,
            factor_perturbed: f64::INFINITY,
            dip: 1.0,
            vacuous: true,
        }
    } else {
        ExpansionWitness {
            box_id: id,
            rect,
            i_x: plain.i_x,
            decomposition: (
                plain.counts[0],
                plain.counts[1],
                plain.counts[2],
                plain.counts[3],
            ),
            factor: plain.factor,
            factor_perturbed: if pert.survivors == 0 {
                f64::INFINITY
            } else {
                pert.factor
            },
            dip: plain.dip,
            vacuous: false,
        }
    }
}

/// Single-step certified vertical expansion per box.
fn single_step_lower(h: &HorseshoeMap2D, mu: f64, cover: &BoxCover) -> Vec<f64> {
    cover
        .boxes
        .iter()
        .map(|b| match b.strip {
            Strip::H => h.base.deriv_interval(mu, b.y).lo,
            Strip::HTilde => h.sigma_tilde * (1.0 - 1e-14),
        })
        .collect()
}

/// Assemble the uniform constants and validate them on sampled orbits.
#[allow(clippy::too_many_arguments)]
pub fn uniform_constants(
    h: &HorseshoeMap2D,
    mu: f64,
    cover: &BoxCover,
    witnesses: &[ExpansionWitness],
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<HyperbolicityCertificate> {
    if mu == 0.0 {
        return Err(Error::CertificateFailure(
            "saddle-node fixed point, eigenvalue 1".into(),
        ));
    }
    let s = &h.base.spec;
    let zeta_t = h.zeta;

    let real: Vec<&ExpansionWitness> = witnesses.iter().filter(|w| !w.vacuous).collect();
    if real.is_empty() {
        return Err(Error::CertificateFailure("no surviving witnesses".into()));
    }
    let i_max = real.iter().map(|w| w.i_x).max().unwrap();
    let dip = real.iter().map(|w| w.dip).fold(1.0f64, f64::min);

    // n1 = 1 + min { n : f^n(p + delta2) >= l }.  After the bifurcation that
    // orbit converges to the attracting point instead, so the largest witness
    // horizon (which n1 exists to bound) takes its place.
    let mut n1 = i_max as u64;
    if mu > 0.0 {
        let mut y = s.p + s.delta2;
        let mut k = 0u64;
        while y < h.l {
            y = h.base.eval_raw(mu, y);
            k += 1;
            if k > 10_000_000 {
                return Err(Error::Budget {
                    budget: 10_000_000,
                    context: "n1 iteration".into(),
                });
            }
        }
        n1 = n1.max(k + 1);
    }

    let steps = single_step_lower(h, mu, cover);
    let xi = steps.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(xi > 0.0) {
        return Err(Error::CertificateFailure(format!(
            "degenerate single-step bound xi = {xi}"
        )));
    }

    let v2_edge = s.p + s.delta2;
    let mut zeta1 = f64::INFINITY;
    let mut zeta2 = f64::INFINITY;
    for w in &real {
        let b = &cover.boxes[w.box_id];
        if b.y.hi > v2_edge {
            zeta1 = zeta1.min(w.factor);
        }
    }
    for (i, b) in cover.boxes.iter().enumerate() {
        if b.strip == Strip::H && b.y.lo < v2_edge {
            zeta2 = zeta2.min(steps[i]);
        }
    }
    let zeta0 = zeta1.min(zeta2);
    if !(zeta0 > 1.0) {
        return Err(Error::CertificateFailure(format!(
            "zeta0 = {zeta0} fails to exceed 1"
        )));
    }

    let m_chain = if xi >= 1.0 {
        1u32
    } else {
        (n1 as f64 * (1.0 / xi).ln() / zeta0.ln()).floor() as u32 + 1
    };
    let n_bar = n1 * (m_chain as u64 + 1);

    // Uniform n_bar-step bound by block chaining, in logs.
    let blocks = (n_bar / i_max as u64).saturating_sub(1);
    let ln_bound = blocks as f64 * zeta_t.ln() + dip.ln();
    if !(ln_bound > 0.0) {
        return Err(Error::CertificateFailure(format!(
            "uniform {n_bar}-step bound is not expanding (log {ln_bound})"
        )));
    }
    let zeta = (ln_bound / n_bar as f64).exp();
    let c_const = dip / zeta_t;
    debug_assert!(zeta.powi(i_max as i32) <= zeta_t * (1.0 + 1e-9));

    // Cone margins under the epsilon-perturbed Jacobian class.
    if !(9.0 * eps < h.base.c2 - 2.0 * h.lambda) {
        return Err(Error::Precondition(format!(
            "need 9*eps < c2 - 2*lambda, got eps={eps}, c2={}, lambda={}",
            h.base.c2, h.lambda
        )));
    }
    let mut worst_slope = f64::INFINITY;
    for &d_lo in &steps {
        let num = 0.5 * (h.lambda + eps) + eps;
        let den = d_lo - 1.5 * eps;
        if !(den > 0.0) {
            worst_slope = f64::NEG_INFINITY;
            break;
        }
        worst_slope = worst_slope.min(0.5 - num / den);
    }
    let contraction = 1.0 / zeta_t - (h.lambda + 1.5 * eps);
    let mut worst_expansion = f64::INFINITY;
    for w in &real {
        worst_expansion = worst_expansion.min(w.factor_perturbed / zeta_t - 1.0);
    }
    let cone_ok = worst_slope > 0.0 && contraction > 0.0 && worst_expansion >= 0.0;

    // Attracting component after the bifurcation.
    let mut attracting = None;
    let mut basin_boxes = 0usize;
    if mu < 0.0 {
        basin_boxes = cover
            .boxes
            .iter()
            .filter(|b| b.component == Component::AttractingBasin)
            .count();
        let (s_pt, _q) = h.base.core.field_zeros(mu).unwrap();
        let ds = h.base.deriv(mu, s_pt)?;
        if ds.abs() >= 1.0 {
            return Err(Error::CertificateFailure(format!(
                "attracting point eigenvalue {ds} not inside the unit circle"
            )));
        }
        attracting = Some(PlanarFixedPoint {
            x: s.p,
            y: s_pt,
            eigen_horizontal: h.lambda,
            eigen_vertical: ds,
        });
    }

    // Empirical validation on sampled cover orbits.
    let (violations, checked) = validate_orbits(
        h,
        mu,
        cover,
        c_const,
        zeta,
        5 * n_bar,
        samples,
        seed,
    );

    let cert = HyperbolicityCertificate {
        mu,
        n1,
        zeta1,
        zeta2,
        zeta0,
        xi,
        m_chain,
        n_bar,
        c_const,
        zeta,
        cone_ok,
        cone_margins: ConeMargins {
            worst_slope_margin: worst_slope,
            stable_contraction_margin: contraction,
            worst_expansion_margin: worst_expansion,
        },
        epsilon: eps,
        dip,
        i_max,
        boxes_total: cover.boxes.len(),
        basin_boxes,
        witnesses: witnesses.to_vec(),
        attracting,
        validation_samples: checked,
        validation_violations: violations,
    };
    if violations > 0 {
        return Err(Error::CertificateFailure(format!(
            "{violations} of {checked} sampled orbits violate the (C, zeta) bound"
        )));
    }
    Ok(cert)
}

/// Check `ln prod >= ln C + n ln zeta` along sampled orbits, in log space.
#[allow(clippy::too_many_arguments)]
fn validate_orbits(
    h: &HorseshoeMap2D,
    mu: f64,
    cover: &BoxCover,
    c_const: f64,
    zeta: f64,
    horizon: u64,
    samples: usize,
    seed: u64,
) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eligible: Vec<usize> = cover
        .boxes
        .iter()
        .enumerate()
        .filter(|(_, b)| b.component != Component::AttractingBasin)
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return (0, 0);
    }
    let (h_lo, h_hi) = h.h_strip_y();
    let clip = if mu < 0.0 {
        h.base.core.field_zeros(mu).map_or(f64::NEG_INFINITY, |(_s, q)| q)
    } else {
        f64::NEG_INFINITY
    };
    let ln_c = c_const.ln();
    let ln_z = zeta.ln();
    let mut violations = 0usize;
    let mut checked = 0usize;
    for _ in 0..samples {
        let bidx = eligible[rng.gen_range(0..eligible.len())];
        let b = &cover.boxes[bidx];
        let mut y = rng.gen_range(b.y.lo..=b.y.hi);
        if b.strip == Strip::H && y < clip {
            continue;
        }
        checked += 1;
        let mut ln_prod = 0.0f64;
        for n in 1..=horizon {
            let in_h = y >= h_lo && y <= h_hi && y >= clip;
            let in_t = y >= h.l && y <= h.l_tilde;
            if in_t {
                ln_prod += h.sigma_tilde.ln();
                y = h.base.top() - h.sigma_tilde * (y - h.l);
            } else if in_h {
                ln_prod += h.base.deriv_raw(mu, y).ln();
                y = h.base.eval_raw(mu, y);
            } else {
                break; // left the certified component
            }
            if ln_prod < ln_c + n as f64 * ln_z - 1e-9 {
                violations += 1;
                break;
            }
        }
    }
    (violations, checked)
}

/// Full certification pipeline at one parameter value.
pub fn certify(
    h: &HorseshoeMap2D,
    mu: f64,
    opts: &VerifyOptions,
) -> Result<HyperbolicityCertificate> {
    if mu == 0.0 {
        return Err(Error::CertificateFailure(
            "saddle-node fixed point, eigenvalue 1".into(),
        ));
    }
    let eps = opts.epsilon.unwrap_or_else(|| default_epsilon(h, mu));
    let cover = build_cover(h, mu, opts.depth, opts.box_budget)?;
    let witnesses = expansion_witnesses(h, mu, &cover, eps, opts.witness_step_cap)?;
    uniform_constants(h, mu, &cover, &witnesses, eps, opts.samples, opts.seed)
}

/// One row of the isolation scan.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyRow {
    pub mu: f64,
    pub certified: bool,
    pub c_const: f64,
    pub zeta: f64,
    pub n1: u64,
    pub boxes: usize,
    pub reason: String,
}

/// Run the pipeline over a parameter grid; certification is expected to fail
/// exactly at the bifurcation value.
pub fn dichotomy_scan(
    h: &HorseshoeMap2D,
    mu_grid: &[f64],
    opts: &VerifyOptions,
) -> Vec<DichotomyRow> {
    use rayon::prelude::*;
    mu_grid
        .par_iter()
        .map(|&mu| match certify(h, mu, opts) {
            Ok(cert) => DichotomyRow {
                mu,
                certified: cert.cone_ok && cert.zeta > 1.0 && cert.c_const > 0.0,
                c_const: cert.c_const,
                zeta: cert.zeta,
                n1: cert.n1,
                boxes: cert.boxes_total,
                reason: if cert.cone_ok {
                    String::new()
                } else {
                    "cone margins not positive".into()
                },
            },
            Err(e) => DichotomyRow {
                mu,
                certified: false,
                c_const: 0.0,
                zeta: 0.0,
                n1: 0,
                boxes: 0,
                reason: match e {
                    Error::CertificateFailure(r) => {
                        if mu == 0.0 {
                            "eigenvalue 1 fixed point inside cover".into()
                        } else {
                            r
                        }
                    }
                    other => other.to_string(),
                },
            },
        })
        .collect()
}

/// Standalone cone check at a given perturbation size.  The expansion
/// margins depend on eps, so the witness pass is re-run here.
pub fn cone_check(
    h: &HorseshoeMap2D,
    mu: f64,
    cover: &BoxCover,
    eps: f64,
    step_cap: u32,
) -> Result<ConeMargins> {
    eps_guard(h, eps)?;
    let witnesses = expansion_witnesses(h, mu, cover, eps, step_cap)?;
    let steps = single_step_lower(h, mu, cover);
    let mut worst_slope = f64::INFINITY;
    for &d_lo in &steps {
        let num = 0.5 * (h.lambda + eps) + eps;
        let den = d_lo - 1.5 * eps;
        if !(den > 0.0) {
            return Err(Error::CertificateFailure(
                "perturbed vertical derivative can vanish".into(),
            ));
        }
        worst_slope = worst_slope.min(0.5 - num / den);
    }
    let contraction = 1.0 / h.zeta - (h.lambda + 1.5 * eps);
    let mut worst_expansion = f64::INFINITY;
    for w in witnesses.iter().filter(|w| !w.vacuous) {
        worst_expansion = worst_expansion.min(w.factor_perturbed / h.zeta - 1.0);
    }
    Ok(ConeMargins {
        worst_slope_margin: worst_slope,
        stable_contraction_margin: contraction,
        worst_expansion_margin: worst_expansion,
    })
}

fn eps_guard(h: &HorseshoeMap2D, eps: f64) -> Result<()> {
    if !(eps >= 0.0 && 9.0 * eps < h.base.c2 - 2.0 * h.lambda) {
        return Err(Error::Precondition(format!(
            "need 0 <= 9*eps < c2 - 2*lambda = {}, got 9*eps = {}",
            h.base.c2 - 2.0 * h.lambda,
            9.0 * eps
        )));
    }
    Ok(())
}
