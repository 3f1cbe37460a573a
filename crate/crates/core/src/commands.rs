//! Command implementations shared by the CLI binary and the tests.
//!
//! Every command returns its rendered output plus a process exit code:
//! 0 success, 1 usage/parse problems, 2 construction-invariant failure,
//! 3 certification refused, 4 budget exhausted.  File output is atomic
//! (write to a temporary sibling, then rename).

use crate::config::RunConfig;
use crate::cover::build_cover;
use crate::error::Error;
use crate::escape::{compute_constants, intermittency_scaling};
use crate::horseshoe::Region;
use crate::hyperbolicity::{certify, dichotomy_scan};
use crate::json::{format_float, to_canonical_json};
use serde::Serialize;
use serde_json::json;
use std::path::Path;

pub struct CmdOutput {
    pub text: String,
    pub exit: i32,
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => 4,
        Error::CertificateFailure(_) => 3,
        Error::Construction(_) | Error::Geometry(_) | Error::DegenerateGap { .. } => 2,
        _ => 1,
    }
}

/// Build everything, print every computed constant and a pass/fail line per
/// invariant; exit 0 iff the construction validates.
pub fn cmd_construct(cfg: &RunConfig) -> CmdOutput {
    let core = match cfg.normal_form() {
        Ok(c) => c,
        Err(e) => return failure_report(&e),
    };
    let mut map = match crate::global_map::GlobalMap1D::build_unchecked(core, cfg.extension.clone())
    {
        Ok(m) => m,
        Err(e) => return failure_report(&e),
    };
    let report = map.validate(cfg.mu_grid_points.0, cfg.validation_grid.0);
    let mut pass = report.all_pass();
    let mut constants = json!({
        "c1": map.c1,
        "c2": map.c2,
        "c1_grid_min": report.c1_grid_min,
        "c2_grid_min": report.c2_grid_min,
        "deriv_grid_max": report.deriv_grid_max,
    });
    let mut extra_failures: Vec<String> = Vec::new();

    if pass {
        match compute_constants(&map) {
            Ok(c) => {
                constants["sigma0"] = json!(c.sigma0);
                constants["sigma1"] = json!(c.sigma1);
                constants["sigma2"] = json!(c.sigma2);
                constants["sigma3"] = json!(c.sigma3);
                constants["r"] = json!(c.r);
                constants["r_tilde"] = json!(c.r_tilde);
                constants["m_cap"] = json!(c.m_cap);
                constants["m_tilde_cap"] = json!(c.m_tilde_cap);
            }
            Err(e) => {
                pass = false;
                extra_failures.push(e.to_string());
            }
        }
    }
    if pass {
        match cfg.build_horseshoe() {
            Ok(h) => {
                constants["sigma_tilde"] = json!(h.sigma_tilde);
                constants["lambda"] = json!(h.lambda);
                constants["zeta_target"] = json!(h.zeta);
                constants["l"] = json!(h.l);
                constants["l_tilde"] = json!(h.l_tilde);
                constants["geometry"] = geometry_json(&h);
            }
            Err(e) => {
                pass = false;
                extra_failures.push(e.to_string());
            }
        }
    }

    let mut invariants: Vec<serde_json::Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "pass": e.pass,
                "worst": e.worst,
                "witness_mu": e.witness_mu,
                "witness_y": e.witness_y,
                "note": e.note,
            })
        })
        .collect();
    for f in &extra_failures {
        invariants.push(json!({"name": f, "pass": false}));
    }

    let doc = json!({
        "pass": pass,
        "constants": constants,
        "invariants": invariants,
    });
    CmdOutput {
        text: to_canonical_json(&doc),
        exit: if pass { 0 } else { 2 },
    }
}

fn failure_report(e: &Error) -> CmdOutput {
    let doc = json!({
        "pass": false,
        "invariants": [{"name": e.to_string(), "pass": false}],
    });
    CmdOutput {
        text: to_canonical_json(&doc),
        exit: exit_for(e).max(2),
    }
}

fn geometry_json(h: &crate::horseshoe::HorseshoeMap2D) -> serde_json::Value {
    let (r_lo, r_hi) = h.rectangle();
    let (h_lo, h_hi) = h.h_strip_y();
    json!({
        "rectangle": {"lo": r_lo, "hi": r_hi},
        "h_strip_y": {"lo": h_lo, "hi": h_hi},
        "h_tilde_strip_y": {"lo": h.l, "hi": h.l_tilde},
        "flip_x_anchor": h.flip_x_anchor,
        "sink": {"x": h.sink().0, "y": h.sink().1},
    })
}

/// Full certification at one parameter value.
pub fn cmd_verify(cfg: &RunConfig, mu: f64, depth: Option<u32>, seed: Option<u64>) -> CmdOutput {
    let h = match cfg.build_horseshoe() {
        Ok(h) => h,
        Err(e) => return failure_report(&e),
    };
    if mu <= -h.base.core.t2 || mu >= h.base.core.t1 {
        return CmdOutput {
            text: to_canonical_json(&json!({
                "mu": mu, "certified": false,
                "reason": "mu outside parameter window",
            })),
            exit: 1,
        };
    }
    let opts = cfg.verify_options(depth, seed);
    match certify(&h, mu, &opts) {
        Ok(cert) => {
            let certified = cert.cone_ok && cert.zeta > 1.0 && cert.c_const > 0.0;
            let doc = certificate_json(&cert, certified);
            CmdOutput {
                text: to_canonical_json(&doc),
                exit: if certified { 0 } else { 3 },
            }
        }
        Err(e) => {
            let exit = exit_for(&e);
            CmdOutput {
                text: to_canonical_json(&json!({
                    "mu": mu,
                    "certified": false,
                    "reason": e.to_string(),
                })),
                exit: if exit == 3 || exit == 4 { exit } else { 3 },
            }
        }
    }
}

fn certificate_json(
    cert: &crate::hyperbolicity::HyperbolicityCertificate,
    certified: bool,
) -> serde_json::Value {
    let boxes: Vec<serde_json::Value> = cert
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "id": w.box_id,
                "rect": [w.rect.0, w.rect.1, w.rect.2, w.rect.3],
                "i": w.i_x,
                "factor": w.factor,
                "decomposition": [
                    w.decomposition.0,
                    w.decomposition.1,
                    w.decomposition.2,
                    w.decomposition.3
                ],
                "vacuous": w.vacuous,
            })
        })
        .collect();
    json!({
        "mu": cert.mu,
        "certified": certified,
        "n1": cert.n1,
        "zeta0": cert.zeta0,
        "zeta1": cert.zeta1,
        "zeta2": cert.zeta2,
        "xi": cert.xi,
        "m": cert.m_chain,
        "n_bar": cert.n_bar,
        "C": cert.c_const,
        "zeta": cert.zeta,
        "cone_ok": cert.cone_ok,
        "cone_margins": {
            "slope": cert.cone_margins.worst_slope_margin,
            "stable_contraction": cert.cone_margins.stable_contraction_margin,
            "expansion": cert.cone_margins.worst_expansion_margin,
        },
        "epsilon": cert.epsilon,
        "dip": cert.dip,
        "i_max": cert.i_max,
        "boxes_total": cert.boxes_total,
        "basin_boxes": cert.basin_boxes,
        "attracting": cert.attracting.map(|a| json!({
            "x": a.x, "y": a.y,
            "eigen_horizontal": a.eigen_horizontal,
            "eigen_vertical": a.eigen_vertical,
        })),
        "validation": {
            "samples": cert.validation_samples,
            "violations": cert.validation_violations,
        },
        "boxes": boxes,
    })
}

/// Certification sweep over an inclusive parameter range.
pub fn cmd_sweep(
    cfg: &RunConfig,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    depth: Option<u32>,
    seed: Option<u64>,
) -> CmdOutput {
    let h = match cfg.build_horseshoe() {
        Ok(h) => h,
        Err(e) => return failure_report(&e),
    };
    if steps < 2 || mu_min >= mu_max {
        return CmdOutput {
            text: "sweep needs mu_min < mu_max and steps >= 2\n".into(),
            exit: 1,
        };
    }
    let grid: Vec<f64> = (0..steps)
        .map(|i| mu_min + (mu_max - mu_min) * i as f64 / (steps - 1) as f64)
        .collect();
    let opts = cfg.verify_options(depth, seed);
    let rows = dichotomy_scan(&h, &grid, &opts);
    let mut out = String::from("mu,certified,C,zeta,n1,boxes,reason\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_float(r.mu),
            if r.certified { "yes" } else { "no" },
            format_float(r.c_const),
            format_float(r.zeta),
            r.n1,
            r.boxes,
            r.reason.replace(',', ";"),
        ));
    }
    CmdOutput { text: out, exit: 0 }
}

/// Passage-count scaling table.
pub fn cmd_intermittency(cfg: &RunConfig, mu_list: &[f64]) -> CmdOutput {
    let map = match cfg.build_map() {
        Ok(m) => m,
        Err(e) => return failure_report(&e),
    };
    match intermittency_scaling(&map, mu_list, cfg.verify.orbit_budget) {
        Ok(rows) => {
            let mut out = String::from("mu,n_mu,n_mu_sqrt_mu\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_float(r.mu),
                    r.n_mu,
                    format_float(r.scaled)
                ));
            }
            CmdOutput { text: out, exit: 0 }
        }
        Err(e) => CmdOutput {
            text: format!("{e}\n"),
            exit: exit_for(&e),
        },
    }
}

/// Orbit export with region itinerary; emits a terminal `escaped` row when
/// the trajectory leaves `D_mu`.
pub fn cmd_orbit(cfg: &RunConfig, mu: f64, x: f64, y: f64, steps: usize) -> CmdOutput {
    let h = match cfg.build_horseshoe() {
        Ok(h) => h,
        Err(e) => return failure_report(&e),
    };
    let mut out = String::from("step,region,x,y\n");
    let (mut px, mut py) = (x, y);
    for step in 0..=steps {
        let region = h.classify(mu, px, py);
        if region == Region::Outside {
            out.push_str(&format!(
                "{step},escaped,{},{}\n",
                format_float(px),
                format_float(py)
            ));
            break;
        }
        out.push_str(&format!(
            "{step},{},{},{}\n",
            region.as_str(),
            format_float(px),
            format_float(py)
        ));
        if step == steps {
            break;
        }
        match h.apply(mu, px, py) {
            Ok((nx, ny)) => {
                px = nx;
                py = ny;
            }
            Err(_) => {
                out.push_str(&format!(
                    "{},escaped,{},{}\n",
                    step + 1,
                    format_float(px),
                    format_float(py)
                ));
                break;
            }
        }
    }
    CmdOutput { text: out, exit: 0 }
}

/// Box-cover export.
pub fn cmd_invariant_set(cfg: &RunConfig, mu: f64, depth: Option<u32>) -> CmdOutput {
    let h = match cfg.build_horseshoe() {
        Ok(h) => h,
        Err(e) => return failure_report(&e),
    };
    let depth = depth.unwrap_or(cfg.verify.depth).min(cfg.verify.max_depth);
    match build_cover(&h, mu, depth, cfg.verify.box_budget) {
        Ok(cover) => {
            #[derive(Serialize)]
            struct BoxRow {
                x0: f64,
                x1: f64,
                y0: f64,
                y1: f64,
                strip: String,
                component: String,
            }
            let boxes: Vec<BoxRow> = cover
                .boxes
                .iter()
                .map(|b| BoxRow {
                    x0: b.x.lo,
                    x1: b.x.hi,
                    y0: b.y.lo,
                    y1: b.y.hi,
                    strip: format!("{:?}", b.strip),
                    component: format!("{:?}", b.component),
                })
                .collect();
            let doc = json!({
                "mu": mu,
                "depth": depth,
                "count": boxes.len(),
                "total_area": cover.total_area(),
                "geometry": geometry_json(&h),
                "boxes": boxes,
            });
            CmdOutput {
                text: to_canonical_json(&doc),
                exit: 0,
            }
        }
        Err(e) => CmdOutput {
            text: format!("{e}\n"),
            exit: exit_for(&e),
        },
    }
}

/// Atomic file write: temp sibling plus rename, so failures leave no partial
/// output behind.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}
