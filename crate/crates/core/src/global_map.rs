//! The full 1D diffeomorphism `f_mu` on `J_mu = [p - delta2, f_mu(p_tilde)]`.
//!
//! Five pieces, strictly increasing and C^1 across seams:
//!
//! * an affine repelling piece `y -> p + slope*(y - p)` on the
//!   `delta2`-neighborhood of the repelling fixed point `p`;
//! * a monotone quintic blend up to the left edge of the flow piece;
//! * the exact time-one flow of the saddle-node field on
//!   `[flow_left, flow_right]` (this piece carries the fundamental interval
//!   `I = [a, b]` and, after the bifurcation, the fixed points `s_mu`, `q_mu`);
//! * a second blend from the flow edge up to `p_tilde`;
//! * an affine tail with slope >= 1 above `p_tilde`, pinned so that
//!   `f_mu(p_tilde)` is the same for every `mu`.
//!
//! The blends match value and one-sided derivative at both ends (the integral
//! of a quartic derivative profile), so the derivative is continuous and the
//! escape estimates see no seam artifacts.

use crate::error::{Error, Result};
use crate::interval::{horner, monotone_image, Iv};
use crate::normal_form::SaddleNodeNormalForm;
use serde::{Deserialize, Serialize};

/// Extension parameters for the construction of the global map.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GlobalMapSpec {
    /// Repelling fixed point location (mu-independent).
    pub p: f64,
    /// Radius of the affine repelling neighborhood.
    pub delta2: f64,
    /// Upper reference point; `f_mu(p_tilde) > p_tilde` for all mu.
    pub p_tilde: f64,
    /// Affine slope at `p`; must exceed 1.
    pub slope_at_p: f64,
    /// Fundamental interval `I = [a, b]`.
    pub a: f64,
    pub b: f64,
    /// The flow piece occupies `[flow_left, flow_right]` inside the core.
    pub flow_left: f64,
    pub flow_right: f64,
    /// Slope of the affine tail above `p_tilde` (>= 1).
    pub upper_slope: f64,
    /// Pinned value of `f_mu(p_tilde)`, the top of `J_mu`.
    pub top_value: f64,
    /// Declared lower bound `c1 > 1` for the derivative near `p`;
    /// derived from the grid minimum when absent.
    pub c1_declared: Option<f64>,
    /// Declared global lower bound `c2 < 1`; derived when absent.
    pub c2_declared: Option<f64>,
}

impl Default for GlobalMapSpec {
    fn default() -> Self {
        GlobalMapSpec {
            p: -0.65,
            delta2: 0.1,
            p_tilde: 0.55,
            slope_at_p: 1.5,
            a: -0.2,
            b: 0.2,
            flow_left: -0.22,
            flow_right: 0.30,
            upper_slope: 1.05,
            top_value: 0.85,
            c1_declared: None,
            c2_declared: None,
        }
    }
}

/// Which analytic piece of the map a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Affine,
    LeftBlend,
    Flow,
    RightBlend,
    UpperAffine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    Attracting,
    Repelling,
    SaddleNode,
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPoint {
    pub location: f64,
    pub kind: FixedPointKind,
    pub derivative: f64,
}

/// One validated invariant in a construction report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    pub witness_mu: f64,
    pub witness_y: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
    /// Grid minimum of the derivative on the delta2-neighborhood of p.
    pub c1_grid_min: f64,
    /// Grid minimum of the derivative on all of J.
    pub c2_grid_min: f64,
    /// Grid maximum of the derivative on J (recorded; nothing consumes it).
    pub deriv_grid_max: f64,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Safety margin subtracted from grid minima before they are declared.
pub const BOUND_MARGIN: f64 = 1e-3;

/// The constructed global 1D map.
#[derive(Debug, Clone)]
pub struct GlobalMap1D {
    pub core: SaddleNodeNormalForm,
    pub spec: GlobalMapSpec,
    /// Validated derivative bound near p (> 1).
    pub c1: f64,
    /// Validated global derivative lower bound on J (in (0,1)).
    pub c2: f64,
}

struct Blend {
    y0: f64,
    len: f64,
    v0: f64,
    d0: f64,
    d1: f64,
    kappa: f64,
}

impl Blend {
    fn new(y0: f64, y1: f64, v0: f64, d0: f64, v1: f64, d1: f64) -> Blend {
        let len = y1 - y0;
        let kappa = (v1 - v0) / len - 0.5 * (d0 + d1);
        Blend {
            y0,
            len,
            v0,
            d0,
            d1,
            kappa,
        }
    }

    fn value(&self, y: f64) -> f64 {
        let t = (y - self.y0) / self.len;
        let dd = self.d1 - self.d0;
        let ih = t * t * t - 0.5 * t * t * t * t;
        let iw = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        self.v0 + self.len * (self.d0 * t + dd * ih + self.kappa * iw)
    }

    fn deriv(&self, y: f64) -> f64 {
        let t = (y - self.y0) / self.len;
        self.deriv_t(t)
    }

    fn deriv_t(&self, t: f64) -> f64 {
        let dd = self.d1 - self.d0;
        let h = t * t * (3.0 - 2.0 * t);
        let w = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        self.d0 + dd * h + self.kappa * w
    }

    /// Interval enclosure of the derivative over a y-range.
    ///
    /// `g(t) = d0 + c2 t^2 + c3 t^3 + c4 t^4` has no linear term, so its
    /// interior extrema solve the quadratic `4 c4 t^2 + 3 c3 t + 2 c2 = 0`;
    /// evaluating there and at the endpoints gives the exact range up to
    /// rounding, which a point-interval Horner pass absorbs.
    fn deriv_interval(&self, lo: f64, hi: f64) -> Iv {
        let t0 = ((lo - self.y0) / self.len).clamp(0.0, 1.0);
        let t1 = ((hi - self.y0) / self.len).clamp(0.0, 1.0);
        let dd = self.d1 - self.d0;
        let c2 = 3.0 * dd + 30.0 * self.kappa;
        let c3 = -2.0 * dd - 60.0 * self.kappa;
        let c4 = 30.0 * self.kappa;
        let coeffs = [self.d0, 0.0, c2, c3, c4];
        let mut out = horner(&coeffs, Iv::point(t0)).hull(horner(&coeffs, Iv::point(t1)));
        let mut visit = |t: f64| {
            if t > t0 && t < t1 {
                out = out.hull(horner(&coeffs, Iv::point(t)));
            }
        };
        let (qa, qb, qc) = (4.0 * c4, 3.0 * c3, 2.0 * c2);
        if qa.abs() < 1e-300 {
            if qb.abs() > 1e-300 {
                visit(-qc / qb);
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                visit((-qb + s) / (2.0 * qa));
                visit((-qb - s) / (2.0 * qa));
            }
        }
        out
    }
}

impl GlobalMap1D {
    /// Assemble without grid validation; structural invariants only.
    pub fn build_unchecked(core: SaddleNodeNormalForm, spec: GlobalMapSpec) -> Result<Self> {
        let s = &spec;
        let d1 = core.delta1;
        if !(s.p + s.delta2 < -d1) {
            return Err(Error::Construction(
                "repelling neighborhood overlaps core: need p + delta2 < -delta1".into(),
            ));
        }
        if !(-d1 < s.a && s.a < 0.0 && 0.0 < s.b && s.b < d1) {
            return Err(Error::Construction(
                "fundamental interval must lie in core: need -delta1 < a < 0 < b < delta1".into(),
            ));
        }
        if !(s.flow_left < s.flow_right
            && -d1 < s.flow_left
            && s.flow_right < d1
            && s.flow_left <= s.a
            && s.b <= s.flow_right)
        {
            return Err(Error::Construction(
                "flow piece must satisfy -delta1 < flow_left <= a < b <= flow_right < delta1"
                    .into(),
            ));
        }
        if !(s.p + s.delta2 < s.flow_left) {
            return Err(Error::Construction(
                "left blend band is empty: need p + delta2 < flow_left".into(),
            ));
        }
        if !(d1 < s.p_tilde) {
            return Err(Error::Construction("need delta1 < p_tilde".into()));
        }
        if !(s.flow_right < s.p_tilde) {
            return Err(Error::Construction(
                "right blend band is empty: need flow_right < p_tilde".into(),
            ));
        }
        if !(s.top_value > s.p_tilde) {
            return Err(Error::Construction(
                "need f(p_tilde) = top_value > p_tilde".into(),
            ));
        }
        if !(s.slope_at_p > 1.0) {
            return Err(Error::Construction("need slope_at_p > 1".into()));
        }
        if !(s.upper_slope >= 1.0) {
            return Err(Error::Construction(
                "upper extension must be non-contracting: need upper_slope >= 1".into(),
            ));
        }
        // Post-bifurcation fixed points of the worst admissible mu sit in I.
        let q_worst = (core.beta * core.t2 / core.alpha).sqrt();
        if !(q_worst < s.b && -q_worst > s.a) {
            return Err(Error::Construction(format!(
                "field zeros +-{q_worst} at mu=-t2 must lie inside (a, b)"
            )));
        }
        Ok(GlobalMap1D {
            core,
            spec,
            c1: f64::NAN,
            c2: f64::NAN,
        })
    }

    /// Build and validate on dense grids; fails listing the first violated
    /// invariant.
    pub fn build(core: SaddleNodeNormalForm, spec: GlobalMapSpec) -> Result<Self> {
        let mut map = Self::build_unchecked(core, spec)?;
        let report = map.validate(50, 10_000);
        if let Some(bad) = report.entries.iter().find(|e| !e.pass) {
            return Err(Error::Construction(format!(
                "{} (worst {:e} at mu={}, y={})",
                bad.name, bad.worst, bad.witness_mu, bad.witness_y
            )));
        }
        Ok(map)
    }

    /// Top of `J_mu` (mu-independent by construction).
    pub fn top(&self) -> f64 {
        self.spec.top_value
    }

    /// `J_mu = [p - delta2, f(p_tilde)]`.
    pub fn j_interval(&self) -> (f64, f64) {
        (self.spec.p - self.spec.delta2, self.spec.top_value)
    }

    pub fn piece(&self, y: f64) -> Piece {
        let s = &self.spec;
        if y <= s.p + s.delta2 {
            Piece::Affine
        } else if y < s.flow_left {
            Piece::LeftBlend
        } else if y <= s.flow_right {
            Piece::Flow
        } else if y < s.p_tilde {
            Piece::RightBlend
        } else {
            Piece::UpperAffine
        }
    }

    fn left_blend(&self, mu: f64) -> Blend {
        let s = &self.spec;
        let y0 = s.p + s.delta2;
        let y1 = s.flow_left;
        let v0 = s.p + s.slope_at_p * s.delta2;
        let v1 = self.core.flow_raw(mu, y1, 1.0);
        let d1 = self.flow_deriv(mu, y1);
        Blend::new(y0, y1, v0, s.slope_at_p, v1, d1)
    }

    fn right_blend(&self, mu: f64) -> Blend {
        let s = &self.spec;
        let y0 = s.flow_right;
        let y1 = s.p_tilde;
        let v0 = self.core.flow_raw(mu, y0, 1.0);
        let d0 = self.flow_deriv(mu, y0);
        Blend::new(y0, y1, v0, d0, s.top_value, s.upper_slope)
    }

    /// Flow-piece derivative with the rest-point linearization guard.
    fn flow_deriv(&self, mu: f64, y: f64) -> f64 {
        let fy = self.core.field_raw(mu, y);
        let scale = self.core.alpha * y * y + (self.core.beta * mu).abs();
        if fy.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return self.core.field_dy(y).exp();
        }
        let y1 = self.core.flow_raw(mu, y, 1.0);
        self.core.field_raw(mu, y1) / fy
    }

    fn check_mu(&self, mu: f64) -> Result<()> {
        if mu <= -self.core.t2 || mu >= self.core.t1 {
            return Err(Error::Domain(format!(
                "mu={mu} outside ({}, {})",
                -self.core.t2, self.core.t1
            )));
        }
        Ok(())
    }

    /// `f_mu(y)`; defined for `y >= p - delta2` (the affine tail extends the
    /// map above `J_mu` so that long sweeps stay well-defined).
    pub fn eval(&self, mu: f64, y: f64) -> Result<f64> {
        self.check_mu(mu)?;
        if y < self.spec.p - self.spec.delta2 {
            return Err(Error::Domain(format!(
                "y={y} below J (left end {})",
                self.spec.p - self.spec.delta2
            )));
        }
        Ok(self.eval_raw(mu, y))
    }

    pub(crate) fn eval_raw(&self, mu: f64, y: f64) -> f64 {
        let s = &self.spec;
        match self.piece(y) {
            Piece::Affine => s.p + s.slope_at_p * (y - s.p),
            Piece::LeftBlend => self.left_blend(mu).value(y),
            Piece::Flow => self.core.flow_raw(mu, y, 1.0),
            Piece::RightBlend => self.right_blend(mu).value(y),
            Piece::UpperAffine => s.top_value + s.upper_slope * (y - s.p_tilde),
        }
    }

    /// `df_mu/dy`: exact on the affine and flow pieces, analytic on blends.
    pub fn deriv(&self, mu: f64, y: f64) -> Result<f64> {
        self.check_mu(mu)?;
        if y < self.spec.p - self.spec.delta2 {
            return Err(Error::Domain(format!("y={y} below J")));
        }
        Ok(self.deriv_raw(mu, y))
    }

    pub(crate) fn deriv_raw(&self, mu: f64, y: f64) -> f64 {
        match self.piece(y) {
            Piece::Affine => self.spec.slope_at_p,
            Piece::LeftBlend => self.left_blend(mu).deriv(y),
            Piece::Flow => self.flow_deriv(mu, y),
            Piece::RightBlend => self.right_blend(mu).deriv(y),
            Piece::UpperAffine => self.spec.upper_slope,
        }
    }

    /// Image of a y-interval; exact up to outward rounding since f is monotone.
    pub fn eval_interval(&self, mu: f64, y: Iv) -> Iv {
        monotone_image(self.eval_raw(mu, y.lo), self.eval_raw(mu, y.hi))
    }

    /// Certified enclosure of the derivative over a y-interval, split at
    /// piece seams.
    pub fn deriv_interval(&self, mu: f64, y: Iv) -> Iv {
        let s = &self.spec;
        let seams = [s.p + s.delta2, s.flow_left, s.flow_right, s.p_tilde];
        let mut cuts = vec![y.lo];
        for &c in &seams {
            if c > y.lo && c < y.hi {
                cuts.push(c);
            }
        }
        cuts.push(y.hi);
        let mut out: Option<Iv> = None;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let piece_iv = match self.piece(mid) {
                Piece::Affine => Iv::point(s.slope_at_p),
                Piece::LeftBlend => self.left_blend(mu).deriv_interval(lo, hi),
                Piece::Flow => self
                    .core
                    .time_one_derivative_interval(mu, Iv::new(lo, hi)),
                Piece::RightBlend => self.right_blend(mu).deriv_interval(lo, hi),
                Piece::UpperAffine => Iv::point(s.upper_slope),
            };
            out = Some(match out {
                None => piece_iv,
                Some(acc) => acc.hull(piece_iv),
            });
        }
        out.unwrap()
    }

    /// Inverse map by piecewise closed forms and bracketed Newton on blends.
    pub fn inverse(&self, mu: f64, v: f64) -> Result<f64> {
        self.check_mu(mu)?;
        let s = &self.spec;
        let v_affine_end = s.p + s.slope_at_p * s.delta2;
        if v <= v_affine_end {
            let y = s.p + (v - s.p) / s.slope_at_p;
            if y < s.p - s.delta2 - 1e-12 {
                return Err(Error::Domain(format!("value {v} below f(J)")));
            }
            return Ok(y);
        }
        let lb = self.left_blend(mu);
        let v_el = self.core.flow_raw(mu, s.flow_left, 1.0);
        if v <= v_el {
            return invert_monotone(|y| lb.value(y), s.p + s.delta2, s.flow_left, v);
        }
        let v_er = self.core.flow_raw(mu, s.flow_right, 1.0);
        if v <= v_er {
            return Ok(self.core.flow_raw(mu, v, -1.0));
        }
        if v <= s.top_value {
            let rb = self.right_blend(mu);
            return invert_monotone(|y| rb.value(y), s.flow_right, s.p_tilde, v);
        }
        Ok(s.p_tilde + (v - s.top_value) / s.upper_slope)
    }

    /// All fixed points in `J_mu`, bisection-bracketed and Newton-polished.
    pub fn fixed_points(&self, mu: f64) -> Result<Vec<FixedPoint>> {
        self.check_mu(mu)?;
        let (j_lo, j_hi) = self.j_interval();
        let mut out = vec![FixedPoint {
            location: self.spec.p,
            kind: FixedPointKind::Repelling,
            derivative: self.spec.slope_at_p,
        }];
        if mu == 0.0 {
            // Tangential; no sign change to bracket.
            out.push(FixedPoint {
                location: 0.0,
                kind: FixedPointKind::SaddleNode,
                derivative: self.deriv_raw(mu, 0.0),
            });
            return Ok(out);
        }
        let n = 4000;
        let g = |y: f64| self.eval_raw(mu, y) - y;
        let mut prev_y = j_lo;
        let mut prev_g = g(prev_y);
        for i in 1..=n {
            let y = j_lo + (j_hi - j_lo) * i as f64 / n as f64;
            let gy = g(y);
            if prev_g == 0.0 || prev_g * gy < 0.0 {
                let root = self.polish_root(mu, prev_y, y)?;
                if (root - self.spec.p).abs() > 1e-6 {
                    let d = self.deriv_raw(mu, root);
                    let kind = if (d - 1.0).abs() <= 1e-9 {
                        FixedPointKind::SaddleNode
                    } else if d > 1.0 {
                        FixedPointKind::Repelling
                    } else {
                        FixedPointKind::Attracting
                    };
                    out.push(FixedPoint {
                        location: root,
                        kind,
                        derivative: d,
                    });
                }
            }
            prev_y = y;
            prev_g = gy;
        }
        out.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
        Ok(out)
    }

    fn polish_root(&self, mu: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        let g = |y: f64| self.eval_raw(mu, y) - y;
        let mut glo = g(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid);
            if gm == 0.0 || hi - lo < 1e-15 {
                lo = mid;
                break;
            }
            if glo * gm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        // Newton polish
        let mut y = 0.5 * (lo + hi);
        for _ in 0..200 {
            let gy = g(y);
            if gy.abs() < 1e-13 {
                return Ok(y);
            }
            let dp = self.deriv_raw(mu, y) - 1.0;
            if dp.abs() < 1e-300 {
                break;
            }
            y -= gy / dp;
        }
        if g(y).abs() < 1e-12 {
            Ok(y)
        } else {
            Err(Error::Numeric(format!(
                "fixed point search did not converge near y={y}"
            )))
        }
    }

    /// Grid validation of every construction invariant.  Also records the
    /// grid extrema of the derivative and, in auto mode, derives c1/c2
    /// (grid minimum minus a safety margin).
    pub fn validate(&mut self, mu_points: usize, y_points: usize) -> ValidationReport {
        let s = self.spec.clone();
        let core = self.core;
        let (j_lo, j_hi) = self.j_interval();
        let mus: Vec<f64> = (0..mu_points)
            .map(|i| {
                let t = (i as f64 + 0.5) / mu_points as f64;
                -core.t2 + (core.t1 + core.t2) * t
            })
            .collect();

        let mut entries = Vec::new();
        let mut c1_min = f64::INFINITY;
        let mut c2_min = f64::INFINITY;
        let mut d_max = f64::NEG_INFINITY;
        let mut c1_wit = (0.0, 0.0);
        let mut c2_wit = (0.0, 0.0);
        let mut mono_ok = true;
        let mut mono_wit = (0.0, 0.0);
        let mut fa_lt_b = f64::NEG_INFINITY;
        let mut fa_wit = 0.0;
        let mut fp_err = f64::NEG_INFINITY;
        let mut blow_margin = f64::INFINITY;
        let mut seam_val = f64::NEG_INFINITY;
        let mut seam_der = f64::NEG_INFINITY;
        let mut right_min = f64::INFINITY;
        let mut fb_in_flow = f64::NEG_INFINITY;
        let mut no_fix_min = f64::INFINITY;

        for &mu in &mus {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..y_points {
                let y = j_lo + (j_hi - j_lo) * i as f64 / (y_points - 1) as f64;
                let v = self.eval_raw(mu, y);
                let d = self.deriv_raw(mu, y);
                if v <= prev {
                    mono_ok = false;
                    mono_wit = (mu, y);
                }
                prev = v;
                if d < c2_min {
                    c2_min = d;
                    c2_wit = (mu, y);
                }
                if d > d_max {
                    d_max = d;
                }
                if (y - s.p).abs() <= s.delta2 && d < c1_min {
                    c1_min = d;
                    c1_wit = (mu, y);
                }
                // derivative >= 1 to the right of b (keeps long compositions
                // from dipping below sigma1 once the channel is crossed)
                if y > s.b && d < right_min {
                    right_min = d;
                }
                // no fixed points in [p - delta2, -delta1] except p itself
                if y <= -core.delta1 && (y - s.p).abs() > 1e-6 {
                    no_fix_min = no_fix_min.min((v - y).abs());
                }
            }
            let fa = self.eval_raw(mu, s.a);
            if fa - s.b > fa_lt_b {
                fa_lt_b = fa - s.b;
                fa_wit = mu;
            }
            fp_err = fp_err.max((self.eval_raw(mu, s.p) - s.p).abs());
            let fb = self.eval_raw(mu, s.b);
            fb_in_flow = fb_in_flow.max(fb - s.flow_right);
            // finite-time blow-up margin of the flow piece
            let t_inf = core
                .flow_time_to_infinity(mu, s.flow_right)
                .unwrap_or(f64::INFINITY);
            blow_margin = blow_margin.min(t_inf);
            // seam continuity (value to 1e-12, derivative to 1e-9)
            for &seam in &[s.p + s.delta2, s.flow_left, s.flow_right, s.p_tilde] {
                let eps = 1e-9 * seam.abs().max(1.0);
                let below = seam - eps;
                let above = seam + eps;
                let dv = (self.eval_raw(mu, above) - self.eval_raw(mu, below)).abs();
                seam_val = seam_val.max(dv - 2.0 * eps * d_max.max(2.0));
                let dd = (self.deriv_raw(mu, above) - self.deriv_raw(mu, below)).abs();
                seam_der = seam_der.max(dd - 1e-4);
            }
        }

        let c1 = match s.c1_declared {
            Some(v) => v,
            None => c1_min - BOUND_MARGIN,
        };
        let c2 = match s.c2_declared {
            Some(v) => v,
            None => c2_min - BOUND_MARGIN,
        };
        self.c1 = c1;
        self.c2 = c2;

        let mut push = |name: &str, pass: bool, worst: f64, wit: (f64, f64), note: String| {
            entries.push(CheckEntry {
                name: name.into(),
                pass,
                worst,
                witness_mu: wit.0,
                witness_y: wit.1,
                note,
            });
        };

        push(
            "strictly increasing on J",
            mono_ok,
            0.0,
            mono_wit,
            "f(y_{i+1}) > f(y_i) on the validation grid".into(),
        );
        push(
            "c1 bound on delta2-neighborhood",
            c1_min >= c1 + BOUND_MARGIN - 1e-12 && c1 > 1.0,
            c1_min,
            c1_wit,
            format!("declared c1={c1}, grid min {c1_min}"),
        );
        push(
            "c2 bound on J",
            c2_min >= c2 + BOUND_MARGIN - 1e-12 && c2 > 0.0 && c2 < 1.0,
            c2_min,
            c2_wit,
            format!("declared c2={c2}, grid min {c2_min}"),
        );
        push(
            "p is fixed for all mu",
            fp_err < 1e-12,
            fp_err,
            (0.0, s.p),
            "|f(p) - p| < 1e-12".into(),
        );
        push(
            "f(a) < b for all mu",
            fa_lt_b < 0.0,
            fa_lt_b,
            (fa_wit, s.a),
            "max over mu of f(a) - b".into(),
        );
        push(
            "no fixed points left of core except p",
            no_fix_min > 1e-6,
            no_fix_min,
            (0.0, 0.0),
            "min |f(y) - y| on [p - delta2, -delta1] off p".into(),
        );
        push(
            "I-orbit stays in the flow piece",
            fb_in_flow < 0.0,
            fb_in_flow,
            (0.0, s.b),
            "max over mu of f(b) - flow_right".into(),
        );
        push(
            "flow piece clear of finite-time blow-up",
            blow_margin > 1.05,
            blow_margin,
            (0.0, s.flow_right),
            "min over mu of time-to-infinity from flow_right".into(),
        );
        push(
            "value continuity at seams",
            seam_val < 1e-10,
            seam_val,
            (0.0, 0.0),
            "two-sided evaluation gap".into(),
        );
        push(
            "derivative continuity at seams",
            seam_der < 1e-10,
            seam_der,
            (0.0, 0.0),
            "two-sided derivative gap".into(),
        );
        push(
            "non-contracting right of b",
            right_min >= 1.0 - 1e-9,
            right_min,
            (0.0, 0.0),
            "min derivative on (b, top]".into(),
        );

        ValidationReport {
            entries,
            c1_grid_min: c1_min,
            c2_grid_min: c2_min,
            deriv_grid_max: d_max,
        }
    }
}

fn invert_monotone(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, v: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            return Ok(mid);
        }
        if f(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl SaddleNodeNormalForm {
    /// Time for the forward flow from `y` to reach +infinity, if it does.
    pub(crate) fn flow_time_to_infinity(&self, mu: f64, y: f64) -> Option<f64> {
        if mu > 0.0 {
            let omega = (self.alpha * self.beta * mu).sqrt();
            let r = (self.beta * mu / self.alpha).sqrt();
            Some((std::f64::consts::FRAC_PI_2 - (y / r).atan()) / omega)
        } else if mu == 0.0 {
            if y > 0.0 {
                Some(1.0 / (self.alpha * y))
            } else {
                None
            }
        } else {
            let q = (-self.beta * mu / self.alpha).sqrt();
            if y > q {
                // u crosses 0 at blow-up
                let u0 = (-q / y).atanh();
                Some(-u0 / (self.alpha * q))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn default_map() -> GlobalMap1D {
        let core = SaddleNodeNormalForm::new(1.0, 0.2, 0.5, 0.05, 0.05).unwrap();
        GlobalMap1D::build(core, GlobalMapSpec::default()).unwrap()
    }

    #[test]
    fn default_spec_validates() {
        let core = SaddleNodeNormalForm::new(1.0, 0.2, 0.5, 0.05, 0.05).unwrap();
        let mut map = GlobalMap1D::build_unchecked(core, GlobalMapSpec::default()).unwrap();
        let report = map.validate(50, 10_000);
        for e in &report.entries {
            assert!(e.pass, "{} failed: worst {:e}", e.name, e.worst);
        }
        assert!(map.c1 > 1.0);
        assert!(map.c2 > 0.0 && map.c2 < 1.0);
    }

    #[test]
    fn p_is_fixed_across_mu_grid() {
        let map = default_map();
        for i in 0..50 {
            let mu = -0.049 + 0.098 * i as f64 / 49.0;
            let v = map.eval(mu, map.spec.p).unwrap();
            assert!((v - map.spec.p).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_on_grid() {
        let map = default_map();
        let (lo, hi) = map.j_interval();
        for &mu in &[-0.04, 0.0, 0.03] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..10_000 {
                let y = lo + (hi - lo) * i as f64 / 9999.0;
                let v = map.eval(mu, y).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn saddle_node_point_of_the_map() {
        let map = default_map();
        // f(0,0) = 0 and f'(0,0) = 1
        assert_eq!(map.eval(0.0, 0.0).unwrap(), 0.0);
        assert!((map.deriv(0.0, 0.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn derivative_bounds_hold() {
        let map = default_map();
        for i in 0..50 {
            let mu = -0.049 + 0.098 * i as f64 / 49.0;
            let d = map.deriv(mu, map.spec.p).unwrap();
            assert!(d >= map.c1);
        }
        let (lo, hi) = map.j_interval();
        for &mu in &[-0.045, -0.01, 0.0, 0.02, 0.045] {
            for i in 0..2000 {
                let y = lo + (hi - lo) * i as f64 / 1999.0;
                assert!(map.deriv(mu, y).unwrap() >= map.c2);
            }
        }
    }

    #[test]
    fn fixed_points_by_regime() {
        let map = default_map();
        // mu > 0: only p
        let fps = map.fixed_points(0.01).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].kind, FixedPointKind::Repelling);

        // mu < 0: p, s, q with s = -q = -sqrt(-beta*mu/alpha)
        let fps = map.fixed_points(-0.02).unwrap();
        assert_eq!(fps.len(), 3);
        let q_expect = (0.2f64 * 0.02).sqrt();
        assert!((fps[0].location - map.spec.p).abs() < 1e-9);
        assert!((fps[1].location + q_expect).abs() < 1e-7);
        assert_eq!(fps[1].kind, FixedPointKind::Attracting);
        assert!((fps[2].location - q_expect).abs() < 1e-7);
        assert_eq!(fps[2].kind, FixedPointKind::Repelling);

        // mu = 0: saddle-node at the origin with unit derivative
        let fps = map.fixed_points(0.0).unwrap();
        assert_eq!(fps.len(), 2);
        assert_eq!(fps[1].kind, FixedPointKind::SaddleNode);
        assert!((fps[1].derivative - 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_sign_changes_after_bifurcation() {
        let map = default_map();
        let (lo, hi) = map.j_interval();
        let mut changes = 0;
        let mut prev = map.eval(-0.02, lo).unwrap() - lo;
        for i in 1..20_000 {
            let y = lo + (hi - lo) * i as f64 / 19_999.0;
            let g = map.eval(-0.02, y).unwrap() - y;
            if prev * g < 0.0 {
                changes += 1;
            }
            prev = g;
        }
        assert_eq!(changes, 3);
    }

    #[test]
    fn declared_c2_above_truth_fails_with_witness() {
        let core = SaddleNodeNormalForm::new(1.0, 0.2, 0.5, 0.05, 0.05).unwrap();
        let spec = GlobalMapSpec {
            c2_declared: Some(0.9),
            ..GlobalMapSpec::default()
        };
        let mut map = GlobalMap1D::build_unchecked(core, spec).unwrap();
        let report = map.validate(20, 2000);
        let entry = report
            .entries
            .iter()
            .find(|e| e.name.starts_with("c2"))
            .unwrap();
        assert!(!entry.pass);
        assert!(entry.worst < 0.9);
    }

    #[test]
    fn overlapping_neighborhood_rejected() {
        let core = SaddleNodeNormalForm::new(1.0, 0.2, 0.5, 0.05, 0.05).unwrap();
        let spec = GlobalMapSpec {
            p: -0.55,
            ..GlobalMapSpec::default()
        };
        match GlobalMap1D::build_unchecked(core, spec) {
            Err(Error::Construction(msg)) => assert!(msg.contains("overlaps core")),
            other => panic!("expected construction error, got {other:?}"),
        }
    }

    #[test]
    fn flow_ratio_exact_on_flow_piece() {
        let map = default_map();
        for &mu in &[-0.03, 0.0, 0.01, 0.04] {
            for i in 0..200 {
                let y = -0.21 + 0.5 * i as f64 / 199.0;
                if map.piece(y) != Piece::Flow {
                    continue;
                }
                let d = map.deriv(mu, y).unwrap();
                let fy = map.core.field_raw(mu, y);
                if fy.abs() < 1e-8 {
                    continue;
                }
                let ratio = map.core.field_raw(mu, map.eval(mu, y).unwrap()) / fy;
                assert!(((d - ratio) / ratio).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let map = default_map();
        let n = 50;
        let h = 1e-7;
        for &(mu, y0) in &[(0.01, -0.5), (0.02, -0.3), (-0.01, 0.11)] {
            let mut prod = 1.0;
            let mut y = y0;
            let mut reached = 0;
            for _ in 0..n {
                if y > map.spec.p_tilde + 2.0 {
                    break;
                }
                prod *= map.deriv(mu, y).unwrap();
                y = map.eval(mu, y).unwrap();
                reached += 1;
            }
            let compose = |start: f64| {
                let mut z = start;
                for _ in 0..reached {
                    z = map.eval(mu, z).unwrap();
                }
                z
            };
            let fd = (compose(y0 + h) - compose(y0 - h)) / (2.0 * h);
            assert!(
                ((prod - fd) / prod).abs() < 1e-5,
                "mu={mu} y0={y0}: chain {prod} vs fd {fd}"
            );
        }
    }

    #[test]
    fn inverse_round_trip() {
        let map = default_map();
        let (lo, hi) = map.j_interval();
        for &mu in &[-0.02, 0.0, 0.03] {
            for i in 0..500 {
                let y = lo + (hi - lo) * i as f64 / 499.0;
                let v = map.eval(mu, y).unwrap();
                let back = map.inverse(mu, v).unwrap();
                assert!(
                    (back - y).abs() < 1e-9 * y.abs().max(1.0),
                    "mu={mu} y={y} back={back}"
                );
            }
        }
    }

    #[test]
    fn deriv_interval_encloses_grid() {
        let map = default_map();
        for &mu in &[-0.02, 0.01] {
            for &(lo, hi) in &[(-0.74, -0.6), (-0.5, -0.2), (0.1, 0.4), (0.5, 0.8)] {
                let enc = map.deriv_interval(mu, Iv::new(lo, hi));
                for i in 0..200 {
                    let y = lo + (hi - lo) * i as f64 / 199.0;
                    let d = map.deriv_raw(mu, y);
                    assert!(enc.lo <= d && d <= enc.hi, "mu={mu} y={y}");
                }
            }
        }
    }
}
