//! Run configuration: a single JSON file describing the normal form, the
//! global-map extension, the horseshoe constants, and the pipeline knobs.
//! Every command validates the full model before doing anything else.

use crate::error::{Error, Result};
use crate::global_map::{GlobalMap1D, GlobalMapSpec};
use crate::horseshoe::{HorseshoeMap2D, HorseshoeParams};
use crate::hyperbolicity::VerifyOptions;
use crate::normal_form::SaddleNodeNormalForm;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NormalFormConfig {
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        NormalFormConfig {
            alpha: 1.0,
            beta: 0.2,
            delta1: 0.5,
            t1: 0.05,
            t2: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HorseshoeConfig {
    pub zeta: f64,
    pub sigma_tilde_headroom: f64,
    pub lambda_fraction: f64,
    pub strip_center_frac: f64,
    pub flip_x_anchor_frac: f64,
    /// Direct override of lambda; must still satisfy the constraints.
    pub lambda_override: Option<f64>,
}

impl Default for HorseshoeConfig {
    fn default() -> Self {
        HorseshoeConfig {
            zeta: 2.0,
            sigma_tilde_headroom: 1.25,
            lambda_fraction: 0.5,
            strip_center_frac: 0.5,
            flip_x_anchor_frac: 0.8,
            lambda_override: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub depth: u32,
    pub max_depth: u32,
    pub box_budget: usize,
    pub witness_step_cap: u32,
    pub samples: usize,
    pub orbit_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            depth: 10,
            max_depth: 14,
            box_budget: 1_000_000,
            witness_step_cap: 50_000,
            samples: 1000,
            orbit_budget: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub normal_form: NormalFormConfig,
    pub extension: GlobalMapSpec,
    pub horseshoe: HorseshoeConfig,
    pub verify: VerifyConfig,
    pub mu_grid_points: MuGridPoints,
    pub validation_grid: ValidationGrid,
    pub seed: Seed,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MuGridPoints(pub usize);
impl Default for MuGridPoints {
    fn default() -> Self {
        MuGridPoints(50)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ValidationGrid(pub usize);
impl Default for ValidationGrid {
    fn default() -> Self {
        ValidationGrid(10_000)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Seed(pub u64);
impl Default for Seed {
    fn default() -> Self {
        Seed(42)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn normal_form(&self) -> Result<SaddleNodeNormalForm> {
        let n = &self.normal_form;
        SaddleNodeNormalForm::new(n.alpha, n.beta, n.delta1, n.t1, n.t2)
    }

    /// Build the validated 1D map.
    pub fn build_map(&self) -> Result<GlobalMap1D> {
        let core = self.normal_form()?;
        let mut map = GlobalMap1D::build_unchecked(core, self.extension.clone())?;
        let report = map.validate(self.mu_grid_points.0, self.validation_grid.0);
        if let Some(bad) = report.entries.iter().find(|e| !e.pass) {
            return Err(Error::Construction(format!(
                "{} violated (worst {:e} at mu={}, y={})",
                bad.name, bad.worst, bad.witness_mu, bad.witness_y
            )));
        }
        Ok(map)
    }

    pub fn horseshoe_params(&self) -> HorseshoeParams {
        HorseshoeParams {
            zeta: self.horseshoe.zeta,
            sigma_tilde_headroom: self.horseshoe.sigma_tilde_headroom,
            lambda_fraction: self.horseshoe.lambda_fraction,
            strip_center_frac: self.horseshoe.strip_center_frac,
            flip_x_anchor_frac: self.horseshoe.flip_x_anchor_frac,
        }
    }

    /// Build the fully-validated planar family.
    pub fn build_horseshoe(&self) -> Result<HorseshoeMap2D> {
        let map = self.build_map()?;
        let mut h = HorseshoeMap2D::solve_constants(map, self.horseshoe_params())?;
        if let Some(lam) = self.horseshoe.lambda_override {
            let limit = (h.base.c2 / 2.0).min(1.0 / h.zeta);
            if !(lam > 0.0 && lam < limit) {
                return Err(Error::Construction(format!(
                    "lambda < min{{c2/2, 1/zeta}} violated: lambda={lam}, limit={limit}"
                )));
            }
            h.lambda = lam;
        }
        Ok(h)
    }

    pub fn verify_options(&self, depth: Option<u32>, seed: Option<u64>) -> VerifyOptions {
        VerifyOptions {
            depth: depth.unwrap_or(self.verify.depth).min(self.verify.max_depth),
            box_budget: self.verify.box_budget,
            witness_step_cap: self.verify.witness_step_cap,
            epsilon: None,
            samples: self.verify.samples,
            seed: seed.unwrap_or(self.seed.0),
        }
    }
}
