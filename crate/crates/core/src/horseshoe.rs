//! The planar family `phi_mu` on `D_mu = S1 u R_mu u S2`.
//!
//! Inside the square `R_mu` the certified dynamics lives on two horizontal
//! strips:
//!
//! * on `H` the map is the skew product
//!   `(x, y) -> (lambda*(x - p) + p, f_mu(y))`;
//! * on `H_tilde` it is the orientation-reversing linear map with
//!   `dphi = diag(-lambda, -sigma_tilde)`, pinned so the strip's bottom edge
//!   maps to the top of `R_mu` and its top edge to the bottom.
//!
//! `sigma_tilde` is solved from `sigma_tilde * sigma1 * sigma2 * sigma3 >= zeta`
//! together with the strip-width condition, and
//! `lambda = 0.5 * min(c2/2, 1/zeta)`.  The gap between the strips, and the
//! two semidisks glued below and above `R_mu`, carry visualization-grade
//! dynamics only: the gap arches into `S2`, and both semidisks contract into
//! a sink inside `S1`.

use crate::error::{Error, Result};
use crate::escape::{compute_constants, EscapeConstants};
use crate::global_map::GlobalMap1D;
use serde::Serialize;

/// Where a point sits in `D_mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    H,
    HTilde,
    Gap,
    S1,
    S2,
    Outside,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::H => "H",
            Region::HTilde => "H_tilde",
            Region::Gap => "GAP",
            Region::S1 => "S1",
            Region::S2 => "S2",
            Region::Outside => "OUTSIDE",
        }
    }
}

/// A 2D fixed point with its vertical eigenvalue (the horizontal one is
/// `+-lambda`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PlanarFixedPoint {
    pub x: f64,
    pub y: f64,
    pub eigen_horizontal: f64,
    pub eigen_vertical: f64,
}

/// The planar horseshoe family.
#[derive(Debug, Clone)]
pub struct HorseshoeMap2D {
    pub base: GlobalMap1D,
    pub constants: EscapeConstants,
    /// Horizontal contraction factor.
    pub lambda: f64,
    /// Vertical expansion on `H_tilde`.
    pub sigma_tilde: f64,
    /// Target uniform expansion rate (> 1).
    pub zeta: f64,
    /// Bottom and top of the `H_tilde` strip.
    pub l: f64,
    pub l_tilde: f64,
    /// x-anchor of the flipped image column.
    pub flip_x_anchor: f64,
}

/// Tunables for `solve_constants`.
#[derive(Debug, Clone, Copy)]
pub struct HorseshoeParams {
    pub zeta: f64,
    /// Multiplicative headroom applied to the solved sigma_tilde.
    pub sigma_tilde_headroom: f64,
    /// lambda = lambda_fraction * min(c2/2, 1/zeta).
    pub lambda_fraction: f64,
    /// Fraction of the admissible gap used to center the H_tilde strip.
    pub strip_center_frac: f64,
    /// Fraction of the rectangle width where the flipped column is anchored.
    pub flip_x_anchor_frac: f64,
}

impl Default for HorseshoeParams {
    fn default() -> Self {
        HorseshoeParams {
            zeta: 2.0,
            sigma_tilde_headroom: 1.25,
            lambda_fraction: 0.5,
            strip_center_frac: 0.5,
            flip_x_anchor_frac: 0.8,
        }
    }
}

impl HorseshoeMap2D {
    /// Solve for `(lambda, sigma_tilde)` and the strip placement, then verify
    /// every geometric invariant.
    pub fn solve_constants(base: GlobalMap1D, params: HorseshoeParams) -> Result<Self> {
        let constants = compute_constants(&base)?;
        let zeta = params.zeta;
        if !(zeta > 1.0) {
            return Err(Error::Construction(format!("zeta must exceed 1, got {zeta}")));
        }
        let (r_lo, r_hi) = base.j_interval();
        let width = r_hi - r_lo;
        let gap_len = base.top() - base.spec.p_tilde;

        // Expansion requirement and strip-width requirement on sigma_tilde.
        let s_expand = zeta / (constants.sigma1 * constants.sigma2 * constants.sigma3);
        let s_strip = width / gap_len;
        let sigma_tilde = s_expand.max(s_strip) * params.sigma_tilde_headroom;
        if !sigma_tilde.is_finite() {
            return Err(Error::Geometry(
                "sigma_tilde is not finite; escape constants degenerate".into(),
            ));
        }
        let strip_width = width / sigma_tilde;
        if !(strip_width < gap_len) {
            return Err(Error::Geometry(format!(
                "strip width {strip_width} does not fit in (p_tilde, f(p_tilde)) of length {gap_len}"
            )));
        }
        if strip_width < 1e-13 {
            return Err(Error::Geometry(format!(
                "strip width {strip_width:e} below f64 resolution; enlarge f(p_tilde) - p_tilde \
                 or improve the sigma constants"
            )));
        }

        let lambda = params.lambda_fraction * (base.c2 / 2.0).min(1.0 / zeta);
        if !(lambda > 0.0 && lambda < (base.c2 / 2.0).min(1.0 / zeta)) {
            return Err(Error::Construction(format!(
                "lambda < min{{c2/2, 1/zeta}} violated: lambda={lambda}, c2={}, zeta={zeta}",
                base.c2
            )));
        }

        // Center the strip in the admissible slack.
        let slack = gap_len - strip_width;
        let l = base.spec.p_tilde + slack * params.strip_center_frac;
        let l_tilde = l + strip_width;

        let flip_x_anchor = r_lo + params.flip_x_anchor_frac * width;

        let h = HorseshoeMap2D {
            base,
            constants,
            lambda,
            sigma_tilde,
            zeta,
            l,
            l_tilde,
            flip_x_anchor,
        };
        h.verify_invariants()?;
        Ok(h)
    }

    fn verify_invariants(&self) -> Result<()> {
        let c = &self.constants;
        let product = self.sigma_tilde * c.sigma1 * c.sigma2 * c.sigma3;
        if !(product >= self.zeta) {
            return Err(Error::Geometry(format!(
                "sigma_tilde*sigma1*sigma2*sigma3 = {product} < zeta = {}",
                self.zeta
            )));
        }
        let (r_lo, r_hi) = self.base.j_interval();
        let width = r_hi - r_lo;
        if !(width / self.sigma_tilde < self.base.top() - self.base.spec.p_tilde) {
            return Err(Error::Geometry("strip-width condition fails".into()));
        }
        if !(self.base.spec.p_tilde < self.l
            && self.l < self.l_tilde
            && self.l_tilde < self.base.top())
        {
            return Err(Error::Geometry("strip must sit inside the gap".into()));
        }
        let wdiff = (self.l_tilde - self.l) - width / self.sigma_tilde;
        if wdiff.abs() > 1e-12 * width {
            return Err(Error::Geometry("strip width mismatch".into()));
        }
        // (p, p) is fixed with vertical eigenvalue >= c1.
        if !(self.base.spec.slope_at_p >= self.base.c1) {
            return Err(Error::Geometry("saddle eigenvalue below c1".into()));
        }
        // Image columns disjoint inside R.
        let (h_col, t_col) = self.image_columns();
        if !(h_col.1 < t_col.0 || t_col.1 < h_col.0) {
            return Err(Error::Geometry(format!(
                "image columns overlap: H -> [{}, {}], H_tilde -> [{}, {}]",
                h_col.0, h_col.1, t_col.0, t_col.1
            )));
        }
        if h_col.0 < r_lo || h_col.1 > r_hi || t_col.0 < r_lo || t_col.1 > r_hi {
            return Err(Error::Geometry("image columns leave the rectangle".into()));
        }
        Ok(())
    }

    /// `R_mu = [p - delta2, f(p_tilde)]^2` (mu-independent by construction).
    pub fn rectangle(&self) -> (f64, f64) {
        self.base.j_interval()
    }

    /// y-range of `H`: `[f^{-1}(p - delta2), p_tilde]`.  The lower edge is on
    /// the affine piece, so it does not depend on mu.
    pub fn h_strip_y(&self) -> (f64, f64) {
        let s = &self.base.spec;
        let lower = s.p + (s.p - s.delta2 - s.p) / s.slope_at_p;
        (lower, s.p_tilde)
    }

    /// y-range of `H_tilde`: `[l, l_tilde]`.
    pub fn h_tilde_strip_y(&self) -> (f64, f64) {
        (self.l, self.l_tilde)
    }

    /// x-extents of the two image columns.
    pub fn image_columns(&self) -> ((f64, f64), (f64, f64)) {
        let (r_lo, r_hi) = self.rectangle();
        let p = self.base.spec.p;
        let h_col = (
            p + self.lambda * (r_lo - p),
            p + self.lambda * (r_hi - p),
        );
        let t_col = (
            self.flip_x_anchor - self.lambda * (r_hi - p),
            self.flip_x_anchor - self.lambda * (r_lo - p),
        );
        (h_col, t_col)
    }

    fn semidisk_radius(&self) -> f64 {
        let (r_lo, r_hi) = self.rectangle();
        0.5 * (r_hi - r_lo)
    }

    fn center_x(&self) -> f64 {
        let (r_lo, r_hi) = self.rectangle();
        0.5 * (r_lo + r_hi)
    }

    /// Sink of the semidisk dynamics, inside `S1`.
    pub fn sink(&self) -> (f64, f64) {
        let (r_lo, _) = self.rectangle();
        (self.center_x(), r_lo - 0.5 * self.semidisk_radius())
    }

    /// Exact half-open partition of `D_mu`.
    pub fn classify(&self, _mu: f64, x: f64, y: f64) -> Region {
        let (r_lo, r_hi) = self.rectangle();
        let cx = self.center_x();
        let rad = self.semidisk_radius();
        if x >= r_lo && x <= r_hi && y >= r_lo && y <= r_hi {
            let (h_lo, h_hi) = self.h_strip_y();
            if y >= h_lo && y <= h_hi {
                return Region::H;
            }
            if y >= self.l && y <= self.l_tilde {
                return Region::HTilde;
            }
            return Region::Gap;
        }
        if y < r_lo {
            let d2 = (x - cx) * (x - cx) + (y - r_lo) * (y - r_lo);
            if d2 <= rad * rad {
                return Region::S1;
            }
        }
        if y > r_hi {
            let d2 = (x - cx) * (x - cx) + (y - r_hi) * (y - r_hi);
            if d2 <= rad * rad {
                return Region::S2;
            }
        }
        Region::Outside
    }

    /// Apply `phi_mu`.  Certified formulas on the strips; a C0 arch on the
    /// gap and an affine contraction on the semidisks for visualization.
    pub fn apply(&self, mu: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let p = self.base.spec.p;
        match self.classify(mu, x, y) {
            Region::H => Ok((
                self.lambda * (x - p) + p,
                self.base.eval(mu, y)?,
            )),
            Region::HTilde => Ok(self.apply_flip(x, y)),
            Region::Gap => {
                let (h_lo, _h_hi) = self.h_strip_y();
                if y < h_lo {
                    // bottom margin of R: the skew product already lands in S1
                    Ok((self.lambda * (x - p) + p, self.base.eval(mu, y)?))
                } else if y > self.l_tilde {
                    // top margin: continue the flip linearly down into S1
                    Ok(self.apply_flip(x, y))
                } else {
                    // the strip between H and H_tilde arches into S2
                    let (r_lo, r_hi) = self.rectangle();
                    let t = (y - self.base.spec.p_tilde) / (self.l - self.base.spec.p_tilde);
                    let x_h = self.lambda * (x - p) + p;
                    let x_t = self.flip_x_anchor - self.lambda * (x - p);
                    let arch_h = 0.25 * (r_hi - r_lo);
                    Ok((
                        x_h + (x_t - x_h) * t,
                        r_hi + arch_h * (std::f64::consts::PI * t).sin(),
                    ))
                }
            }
            Region::S1 | Region::S2 => {
                let (sx, sy) = self.sink();
                Ok((sx + 0.1 * (x - sx), sy + 0.1 * (y - sy)))
            }
            Region::Outside => Err(Error::Domain(format!("({x}, {y}) outside D"))),
        }
    }

    #[inline]
    pub(crate) fn apply_flip(&self, x: f64, y: f64) -> (f64, f64) {
        let p = self.base.spec.p;
        (
            self.flip_x_anchor - self.lambda * (x - p),
            self.base.top() - self.sigma_tilde * (y - self.l),
        )
    }

    /// Jacobian on the strips: `diag(lambda, f')` on `H`,
    /// `diag(-lambda, -sigma_tilde)` on `H_tilde`.
    pub fn jacobian(&self, mu: f64, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        match self.classify(mu, x, y) {
            Region::H => Ok([[self.lambda, 0.0], [0.0, self.base.deriv(mu, y)?]]),
            Region::HTilde => Ok([[-self.lambda, 0.0], [0.0, -self.sigma_tilde]]),
            _ => Err(Error::NoCertifiedJacobian),
        }
    }

    /// Exact inverse on the two image columns.
    pub fn apply_inverse(&self, mu: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let p = self.base.spec.p;
        let (r_lo, r_hi) = self.rectangle();
        if y < r_lo || y > r_hi {
            return Err(Error::NoPreimageInR);
        }
        let (h_col, t_col) = self.image_columns();
        let tol = 1e-12;
        if x >= h_col.0 - tol && x <= h_col.1 + tol {
            let x0 = p + (x - p) / self.lambda;
            let y0 = self.base.inverse(mu, y)?;
            let (h_lo, h_hi) = self.h_strip_y();
            if y0 >= h_lo - tol && y0 <= h_hi + tol {
                return Ok((x0, y0));
            }
        }
        if x >= t_col.0 - tol && x <= t_col.1 + tol {
            let x0 = p + (self.flip_x_anchor - x) / self.lambda;
            let y0 = self.l + (self.base.top() - y) / self.sigma_tilde;
            return Ok((x0, y0));
        }
        Err(Error::NoPreimageInR)
    }

    /// All fixed points of the strip dynamics with their eigenvalues: the
    /// lifts of the 1D fixed points on the `x = p` column, plus the flip's
    /// own fixed point in `H_tilde`.
    pub fn planar_fixed_points(&self, mu: f64) -> Result<Vec<PlanarFixedPoint>> {
        let p = self.base.spec.p;
        let mut out = Vec::new();
        for fp in self.base.fixed_points(mu)? {
            let (h_lo, h_hi) = self.h_strip_y();
            if fp.location >= h_lo && fp.location <= h_hi {
                out.push(PlanarFixedPoint {
                    x: p,
                    y: fp.location,
                    eigen_horizontal: self.lambda,
                    eigen_vertical: fp.derivative,
                });
            }
        }
        // Flip branch: x = anchor - lambda(x - p), y = top - sigma(y - l).
        let x_star = (self.flip_x_anchor + self.lambda * p) / (1.0 + self.lambda);
        let y_star = (self.base.top() + self.sigma_tilde * self.l) / (1.0 + self.sigma_tilde);
        if y_star >= self.l && y_star <= self.l_tilde {
            out.push(PlanarFixedPoint {
                x: x_star,
                y: y_star,
                eigen_horizontal: -self.lambda,
                eigen_vertical: -self.sigma_tilde,
            });
        }
        Ok(out)
    }

    /// The attracting saddle-node `chi = (p, 0)` with eigenvalues
    /// `(lambda, 1)`; only defined at `mu = 0`.
    pub fn saddle_node_point(&self, mu: f64) -> Result<((f64, f64), (f64, f64))> {
        if mu != 0.0 {
            return Err(Error::WrongParameter(mu));
        }
        let p = self.base.spec.p;
        let chi = (p, 0.0);
        let eig = (self.lambda, self.base.deriv(0.0, 0.0)?);
        Ok((chi, eig))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global_map::GlobalMapSpec;
    use crate::normal_form::SaddleNodeNormalForm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn default_horseshoe() -> HorseshoeMap2D {
        let core = SaddleNodeNormalForm::new(1.0, 0.2, 0.5, 0.05, 0.05).unwrap();
        let map = GlobalMap1D::build(core, GlobalMapSpec::default()).unwrap();
        HorseshoeMap2D::solve_constants(map, HorseshoeParams::default()).unwrap()
    }

    #[test]
    fn constants_satisfy_constraints() {
        let h = default_horseshoe();
        let c = &h.constants;
        assert!(h.sigma_tilde * c.sigma1 * c.sigma2 * c.sigma3 >= h.zeta);
        assert!(h.lambda > 0.0 && h.lambda < (h.base.c2 / 2.0).min(1.0 / h.zeta));
        let lam_expect = 0.5 * (h.base.c2 / 2.0).min(1.0 / h.zeta);
        assert!((h.lambda - lam_expect).abs() < 1e-15);
        let (r_lo, r_hi) = h.rectangle();
        let width = r_hi - r_lo;
        assert!(width / h.sigma_tilde < h.base.top() - h.base.spec.p_tilde);
        assert!(h.base.spec.p_tilde < h.l && h.l_tilde < h.base.top());
        assert!((h.l_tilde - h.l - width / h.sigma_tilde).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        let h = default_horseshoe();
        let p = h.base.spec.p;
        assert_eq!(h.classify(0.01, p, p), Region::H);
        assert_eq!(
            h.classify(0.01, p, 0.5 * (h.l + h.l_tilde)),
            Region::HTilde
        );
        assert_eq!(
            h.classify(0.01, p, h.base.spec.p_tilde + 1e-9),
            Region::Gap
        );
    }

    #[test]
    fn saddle_is_fixed() {
        let h = default_horseshoe();
        let p = h.base.spec.p;
        for &mu in &[-0.03, 0.0, 0.02] {
            let (x1, y1) = h.apply(mu, p, p).unwrap();
            assert!((x1 - p).abs() < 1e-12 && (y1 - p).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_edges_pinned() {
        let h = default_horseshoe();
        let (r_lo, _) = h.rectangle();
        for &x in &[-0.7, 0.0, 0.8] {
            let (_, y_top) = h.apply(0.01, x, h.l).unwrap();
            assert!((y_top - h.base.top()).abs() < 1e-12);
            let (_, y_bot) = h.apply(0.01, x, h.l_tilde).unwrap();
            assert!((y_bot - r_lo).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobians_are_diagonal() {
        let h = default_horseshoe();
        let p = h.base.spec.p;
        let j = h.jacobian(0.01, p, p).unwrap();
        assert_eq!(j[0][0], h.lambda);
        assert!(j[1][1] >= h.base.c1);
        assert_eq!(j[0][1], 0.0);
        assert_eq!(j[1][0], 0.0);
        let j = h.jacobian(0.01, 0.3, 0.5 * (h.l + h.l_tilde)).unwrap();
        assert_eq!(j[0][0], -h.lambda);
        assert_eq!(j[1][1], -h.sigma_tilde);
        // determinants: orientation products
        assert!(h.lambda * h.base.c1 > 0.0);
        assert!(h.lambda * h.sigma_tilde > 0.0);
        // no certified jacobian off the strips
        assert!(h
            .jacobian(0.01, 0.0, h.base.spec.p_tilde + 1e-6)
            .is_err());
    }

    #[test]
    fn skew_product_split() {
        let h = default_horseshoe();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (h_lo, h_hi) = h.h_strip_y();
        let (r_lo, r_hi) = h.rectangle();
        for _ in 0..200 {
            let x1 = rng.gen_range(r_lo..r_hi);
            let x2 = rng.gen_range(r_lo..r_hi);
            let y1 = rng.gen_range(h_lo..h_hi);
            let y2 = rng.gen_range(h_lo..h_hi);
            let (ax, ay) = h.apply(0.01, x1, y1).unwrap();
            let (bx, by) = h.apply(0.01, x1, y2).unwrap();
            let (cx, cy) = h.apply(0.01, x2, y1).unwrap();
            assert_eq!(ax, bx, "x-image depends only on x");
            assert_eq!(ay, cy, "y-image depends only on y");
            let _ = (by, cx);
        }
    }

    #[test]
    fn strip_images_are_disjoint_columns() {
        let h = default_horseshoe();
        let ((h0, h1), (t0, t1)) = h.image_columns();
        assert!(h1 < t0 || t1 < h0);
        let (r_lo, r_hi) = h.rectangle();
        let width = r_hi - r_lo;
        assert!((h1 - h0 - h.lambda * width).abs() < 1e-12);
        assert!((t1 - t0 - h.lambda * width).abs() < 1e-12);
        // the H-image column contains x = p
        let p = h.base.spec.p;
        assert!(h0 <= p && p <= h1);
    }

    #[test]
    fn inverse_round_trip_on_strips() {
        let h = default_horseshoe();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (r_lo, r_hi) = h.rectangle();
        let (h_lo, h_hi) = h.h_strip_y();
        for &mu in &[-0.02, 0.01] {
            for _ in 0..500 {
                let x = rng.gen_range(r_lo..r_hi);
                let in_h = rng.gen_bool(0.5);
                let y = if in_h {
                    rng.gen_range(h_lo..h_hi)
                } else {
                    rng.gen_range(h.l..h.l_tilde)
                };
                let (x1, y1) = h.apply(mu, x, y).unwrap();
                let (x0, y0) = h.apply_inverse(mu, x1, y1).unwrap();
                assert!(
                    (x0 - x).abs() < 1e-10 && (y0 - y).abs() < 1e-10,
                    "mu={mu} ({x}, {y}) -> ({x1}, {y1}) -> ({x0}, {y0})"
                );
            }
        }
    }

    #[test]
    fn no_preimage_outside_columns() {
        let h = default_horseshoe();
        let ((_, h1), (t0, _)) = h.image_columns();
        let x_mid = 0.5 * (h1 + t0);
        assert!(matches!(
            h.apply_inverse(0.01, x_mid, 0.0),
            Err(Error::NoPreimageInR)
        ));
        // a point in S1 has no preimage in R
        let (sx, sy) = h.sink();
        assert!(matches!(
            h.apply_inverse(0.01, sx, sy),
            Err(Error::NoPreimageInR)
        ));
    }

    #[test]
    fn saddle_node_point_at_zero() {
        let h = default_horseshoe();
        let ((x, y), (e1, e2)) = h.saddle_node_point(0.0).unwrap();
        assert_eq!(x, h.base.spec.p);
        assert_eq!(y, 0.0);
        assert!(e1 < 1.0);
        assert!((e2 - 1.0).abs() < 1e-10);
        let (fx, fy) = h.apply(0.0, x, y).unwrap();
        assert!((fx - x).abs() < 1e-12 && (fy - y).abs() < 1e-12);
        assert!(matches!(
            h.saddle_node_point(0.01),
            Err(Error::WrongParameter(_))
        ));
    }

    #[test]
    fn no_unit_eigenvalue_off_bifurcation() {
        let h = default_horseshoe();
        for &mu in &[1e-3, -1e-3] {
            for fp in h.planar_fixed_points(mu).unwrap() {
                assert!(
                    (fp.eigen_vertical.abs() - 1.0).abs() > 1e-3,
                    "mu={mu}: vertical eigenvalue {} too close to 1",
                    fp.eigen_vertical
                );
            }
        }
    }

    #[test]
    fn attracting_point_after_bifurcation() {
        let h = default_horseshoe();
        let fps = h.planar_fixed_points(-0.02).unwrap();
        let attracting: Vec<_> = fps
            .iter()
            .filter(|f| f.eigen_vertical.abs() < 1.0 && f.eigen_horizontal.abs() < 1.0)
            .collect();
        assert_eq!(attracting.len(), 1);
        let s_expect = -(0.2f64 * 0.02).sqrt();
        assert!((attracting[0].y - s_expect).abs() < 1e-6);
    }

    #[test]
    fn gap_orbit_reaches_the_sink_region() {
        let h = default_horseshoe();
        // start in the gap between the strips
        let mut pt = (0.0, 0.5 * (h.base.spec.p_tilde + h.l));
        assert_eq!(h.classify(0.01, pt.0, pt.1), Region::Gap);
        pt = h.apply(0.01, pt.0, pt.1).unwrap();
        assert_eq!(h.classify(0.01, pt.0, pt.1), Region::S2);
        pt = h.apply(0.01, pt.0, pt.1).unwrap();
        assert_eq!(h.classify(0.01, pt.0, pt.1), Region::S1);
        for _ in 0..10 {
            pt = h.apply(0.01, pt.0, pt.1).unwrap();
            assert_eq!(h.classify(0.01, pt.0, pt.1), Region::S1);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = default_horseshoe();
        let eps = 1e-6;
        let (h_lo, h_hi) = h.h_strip_y();
        let probes = [
            (0.2, 0.5 * (h_lo + h_hi)),
            (-0.5, 0.3),
            (0.1, 0.5 * (h.l + h.l_tilde)),
        ];
        for &(x, y) in &probes {
            let j = match h.jacobian(0.01, x, y) {
                Ok(j) => j,
                Err(_) => continue,
            };
            let (fx, fy) = h.apply(0.01, x, y).unwrap();
            let (fxp, fyp) = h.apply(0.01, x + eps, y).unwrap();
            let (fxq, fyq) = h.apply(0.01, x, y + eps).unwrap();
            assert!(((fxp - fx) / eps - j[0][0]).abs() < 1e-5 * j[0][0].abs().max(1.0));
            assert!(((fyq - fy) / eps - j[1][1]).abs() < 1e-4 * j[1][1].abs().max(1.0));
            assert!(((fyp - fy) / eps - j[1][0]).abs() < 1e-6);
            assert!(((fxq - fx) / eps - j[0][1]).abs() < 1e-5 * h.sigma_tilde.max(1.0) * eps + 1e-6);
        }
    }
}
