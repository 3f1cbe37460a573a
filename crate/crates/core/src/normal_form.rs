//! The saddle-node vector field `Y_mu(y) = alpha*y^2 + beta*mu` and its exact
//! time-t maps on the core interval `(-delta1, delta1)`.
//!
//! The field is the truncated saddle-node normal form, so the flow has closed
//! forms in each parameter regime:
//!
//! * `mu > 0` : tangent form, no rest points, everything drifts upward;
//! * `mu = 0` : rational form `y/(1 - alpha*t*y)` with a degenerate rest
//!   point at the origin;
//! * `mu < 0` : hyperbolic forms around the rest points `±sqrt(-beta*mu/alpha)`
//!   (attracting below, repelling above).
//!
//! Flow times between states are the antiderivative of `1/Y_mu` (arctangent /
//! logarithm), and the derivative of any in-core composition telescopes to the
//! flow ratio `Y_mu(f^n(y)) / Y_mu(y)`.

use crate::error::{Error, Result};
use crate::interval::Iv;
use serde::{Deserialize, Serialize};

/// Parameters of the truncated saddle-node field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SaddleNodeNormalForm {
    /// Quadratic coefficient, `alpha > 0`.
    pub alpha: f64,
    /// Unfolding coefficient, `beta > 0`.
    pub beta: f64,
    /// Core half-width `delta1 > 0`.
    pub delta1: f64,
    /// Right parameter bound, `mu < t1`.
    pub t1: f64,
    /// Left parameter bound, `mu > -t2`, with `0 < t2 <= t1`.
    pub t2: f64,
}

/// Relative threshold below which a field value is treated as a rest point.
const REST_TOL: f64 = 1e-12;

impl SaddleNodeNormalForm {
    pub fn new(alpha: f64, beta: f64, delta1: f64, t1: f64, t2: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Construction(format!("alpha must be > 0, got {alpha}")));
        }
        if !(beta > 0.0) {
            return Err(Error::Construction(format!("beta must be > 0, got {beta}")));
        }
        if !(delta1 > 0.0) {
            return Err(Error::Construction(format!(
                "delta1 must be > 0, got {delta1}"
            )));
        }
        if !(0.0 < t2 && t2 <= t1) {
            return Err(Error::Construction(format!(
                "need 0 < t2 <= t1, got t1={t1}, t2={t2}"
            )));
        }
        let nf = SaddleNodeNormalForm {
            alpha,
            beta,
            delta1,
            t1,
            t2,
        };
        // Both rest points of the most negative admissible mu must fit in the core.
        let worst = (beta * t2 / alpha).sqrt();
        if worst >= delta1 {
            return Err(Error::Construction(format!(
                "field zeros +-{worst} at mu=-t2 leave the core (-{delta1}, {delta1})"
            )));
        }
        Ok(nf)
    }

    fn check_mu(&self, mu: f64) -> Result<()> {
        if mu <= -self.t2 || mu >= self.t1 {
            return Err(Error::Domain(format!(
                "mu={mu} outside ({}, {})",
                -self.t2, self.t1
            )));
        }
        Ok(())
    }

    fn check_core(&self, y: f64) -> Result<()> {
        if y <= -self.delta1 || y >= self.delta1 {
            return Err(Error::Domain(format!(
                "y={y} outside core ({}, {})",
                -self.delta1, self.delta1
            )));
        }
        Ok(())
    }

    /// `Y_mu(y) = alpha*y^2 + beta*mu`.
    pub fn eval_field(&self, mu: f64, y: f64) -> Result<f64> {
        self.check_mu(mu)?;
        self.check_core(y)?;
        Ok(self.field_raw(mu, y))
    }

    #[inline]
    pub(crate) fn field_raw(&self, mu: f64, y: f64) -> f64 {
        self.alpha * y * y + self.beta * mu
    }

    /// `dY/dy = 2*alpha*y`.
    #[inline]
    pub fn field_dy(&self, y: f64) -> f64 {
        2.0 * self.alpha * y
    }

    /// The unique zero of `dY/dy`; identically 0 for the truncated form.
    pub fn critical_point(&self, _mu: f64) -> f64 {
        0.0
    }

    /// Rest points `(s_mu, q_mu) = (-sqrt(-beta*mu/alpha), +sqrt(...))` for
    /// `mu < 0`, none otherwise.
    pub fn field_zeros(&self, mu: f64) -> Option<(f64, f64)> {
        if mu < 0.0 {
            let q = (-self.beta * mu / self.alpha).sqrt();
            Some((-q, q))
        } else {
            None
        }
    }

    /// Signed flow time from `y_from` to `y_to`: the integral of `1/Y_mu`.
    ///
    /// Defined whenever the closed interval spanned by the two states contains
    /// no zero of the field.  Negative when the flow runs from `y_to` to
    /// `y_from`.
    pub fn flow_time_between(&self, mu: f64, y_from: f64, y_to: f64) -> Result<f64> {
        self.check_mu(mu)?;
        self.check_core(y_from)?;
        self.check_core(y_to)?;
        let (lo, hi) = (y_from.min(y_to), y_from.max(y_to));
        if mu == 0.0 {
            if lo <= 0.0 && hi >= 0.0 && !(lo == 0.0 && hi == 0.0) {
                return Err(Error::SingularIntegral { from: lo, to: hi });
            }
        } else if mu < 0.0 {
            let (s, q) = self.field_zeros(mu).unwrap();
            if (lo <= s && hi >= s) || (lo <= q && hi >= q) {
                return Err(Error::SingularIntegral { from: lo, to: hi });
            }
        }
        Ok(self.antiderivative(mu, y_to) - self.antiderivative(mu, y_from))
    }

    /// Antiderivative of `1/Y_mu`, valid within one zero-free sign region.
    fn antiderivative(&self, mu: f64, y: f64) -> f64 {
        let a = self.alpha;
        let b = self.beta;
        if mu > 0.0 {
            let omega = (a * b * mu).sqrt();
            (y * (a / (b * mu)).sqrt()).atan() / omega
        } else if mu == 0.0 {
            -1.0 / (a * y)
        } else {
            let q = (-b * mu / a).sqrt();
            if y.abs() < q {
                -(y / q).atanh() / (a * q)
            } else {
                // arcoth(y/q) = artanh(q/y) for |y| > q
                -(q / y).atanh() / (a * q)
            }
        }
    }

    /// Exact flow map at time `t` (any sign), restricted to the core interval.
    ///
    /// Errors with the escape time if the trajectory leaves
    /// `(-delta1, delta1)` strictly before time `t`.
    pub fn flow_at(&self, mu: f64, y0: f64, t: f64) -> Result<f64> {
        self.check_mu(mu)?;
        self.check_core(y0)?;
        // Escape is only possible in the direction of motion and only when no
        // rest point blocks the path to the core boundary.
        if t > 0.0 {
            if self.upward_unblocked(mu, y0) {
                let t_esc = self.antiderivative(mu, self.delta1) - self.antiderivative(mu, y0);
                if t_esc <= t {
                    return Err(Error::Escape { escape_time: t_esc });
                }
            }
        } else if t < 0.0 && self.downward_unblocked_backward(mu, y0) {
            let t_esc = self.antiderivative(mu, -self.delta1) - self.antiderivative(mu, y0);
            if t_esc >= t {
                return Err(Error::Escape { escape_time: t_esc });
            }
        }
        Ok(self.flow_raw(mu, y0, t))
    }

    /// Forward flow from `y0` reaches `+delta1` without hitting a rest point.
    fn upward_unblocked(&self, mu: f64, y0: f64) -> bool {
        match self.field_zeros(mu) {
            None => {
                // mu = 0: rest at the origin blocks anything starting below it.
                !(mu == 0.0 && y0 <= 0.0)
            }
            Some((_s, q)) => y0 > q,
        }
    }

    /// Backward flow from `y0` reaches `-delta1` (the field pushes up there).
    fn downward_unblocked_backward(&self, mu: f64, y0: f64) -> bool {
        match self.field_zeros(mu) {
            None => !(mu == 0.0 && y0 >= 0.0),
            Some((s, _q)) => y0 < s,
        }
    }

    /// Flow without core-domain or escape checks; used by the global map whose
    /// flow piece takes values outside the core.
    pub(crate) fn flow_raw(&self, mu: f64, y0: f64, t: f64) -> f64 {
        let a = self.alpha;
        let b = self.beta;
        if mu > 0.0 {
            let omega = (a * b * mu).sqrt();
            let r = (b * mu / a).sqrt();
            let theta = (y0 / r).atan() + omega * t;
            r * theta.tan()
        } else if mu == 0.0 {
            y0 / (1.0 - a * y0 * t)
        } else {
            let q = (-b * mu / a).sqrt();
            let aq = a * q;
            if y0.abs() < q {
                let u0 = (-y0 / q).atanh();
                -q * (u0 + aq * t).tanh()
            } else if y0.abs() == q {
                y0
            } else {
                let u0 = (-q / y0).atanh();
                let u = u0 + aq * t;
                // coth(u) = 1/tanh(u)
                -q / u.tanh()
            }
        }
    }

    /// Time-one map of the field on the core interval.
    pub fn time_one_map(&self, mu: f64, y0: f64) -> Result<f64> {
        self.flow_at(mu, y0, 1.0)
    }

    /// Derivative of the time-one map: the flow ratio `Y(f(y))/Y(y)`, with the
    /// linearization `exp(dY/dy)` at rest points.
    pub fn time_one_derivative(&self, mu: f64, y0: f64) -> Result<f64> {
        self.check_mu(mu)?;
        self.check_core(y0)?;
        let fy = self.field_raw(mu, y0);
        let scale = self.alpha * y0 * y0 + (self.beta * mu).abs();
        if fy.abs() <= REST_TOL * scale.max(f64::MIN_POSITIVE) {
            return Ok(self.field_dy(y0).exp());
        }
        let y1 = self.flow_raw(mu, y0, 1.0);
        Ok(self.field_raw(mu, y1) / fy)
    }

    /// Interval enclosure of the time-one derivative over a state interval.
    ///
    /// Uses `f'(y) = exp(2*alpha * \int_0^1 y(s) ds)`: since the path is
    /// monotone in time, the path average lies in the hull of `{y, f(y)}`,
    /// which is valid across rest points where the flow-ratio form degenerates.
    /// Away from zeros of the field the exact ratio form is intersected in.
    pub(crate) fn time_one_derivative_interval(&self, mu: f64, y: Iv) -> Iv {
        let f_lo = self.flow_raw(mu, y.lo, 1.0);
        let f_hi = self.flow_raw(mu, y.hi, 1.0);
        let path = Iv::hull_of(y.lo, f_lo).hull(Iv::hull_of(y.hi, f_hi));
        let mut enc = path.scale(2.0 * self.alpha).exp();
        // Tighten with the ratio form when Y is bounded away from zero.
        let yy = Iv::new(y.lo, y.hi);
        let field_y = yy
            .square()
            .scale(self.alpha)
            .offset(self.beta * mu);
        if field_y.lo > 0.0 || field_y.hi < 0.0 {
            let img = crate::interval::monotone_image(f_lo, f_hi);
            let field_f = img.square().scale(self.alpha).offset(self.beta * mu);
            if field_f.lo > 0.0 || field_f.hi < 0.0 {
                let ratio = field_f / field_y;
                if let Some(t) = enc.intersect(ratio) {
                    enc = t;
                }
            }
        }
        enc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(alpha: f64, beta: f64) -> SaddleNodeNormalForm {
        SaddleNodeNormalForm::new(alpha, beta, 0.5, 0.05, 0.05).unwrap()
    }

    /// Independent oracle: classical RK4 on dy/dt = alpha y^2 + beta mu.
    fn rk4_flow(alpha: f64, beta: f64, mu: f64, y0: f64, t: f64, steps: usize) -> f64 {
        let h = t / steps as f64;
        let f = |y: f64| alpha * y * y + beta * mu;
        let mut y = y0;
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f(y + 0.5 * h * k1);
            let k3 = f(y + 0.5 * h * k2);
            let k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        y
    }

    /// Independent oracle: adaptive Simpson quadrature of 1/Y.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b))
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, whole: f64) -> f64 {
        let c = 0.5 * (a + b);
        let left = simpson(f, a, c);
        let right = simpson(f, c, b);
        if (left + right - whole).abs() <= 15.0 * eps {
            left + right + (left + right - whole) / 15.0
        } else {
            adaptive_simpson(f, a, c, eps / 2.0, left)
                + adaptive_simpson(f, c, b, eps / 2.0, right)
        }
    }

    fn quad_time(alpha: f64, beta: f64, mu: f64, a: f64, b: f64) -> f64 {
        let g = move |y: f64| 1.0 / (alpha * y * y + beta * mu);
        let whole = simpson(&g, a, b);
        adaptive_simpson(&g, a, b, 1e-12, whole)
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(SaddleNodeNormalForm::new(-1.0, 1.0, 0.5, 0.05, 0.05).is_err());
        assert!(SaddleNodeNormalForm::new(1.0, 0.0, 0.5, 0.05, 0.05).is_err());
        assert!(SaddleNodeNormalForm::new(1.0, 1.0, 0.5, 0.01, 0.05).is_err());
        // zeros at mu = -t2 must fit inside the core
        assert!(SaddleNodeNormalForm::new(1.0, 1.0, 0.2, 0.05, 0.05).is_err());
    }

    #[test]
    fn field_values() {
        assert_eq!(nf(1.0, 1.0).eval_field(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(nf(1.0, 1.0).eval_field(0.01, 0.0).unwrap(), 0.01);
        let v = nf(2.0, 3.0).eval_field(-0.01, 0.2).unwrap();
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn field_domain_errors() {
        assert!(nf(1.0, 1.0).eval_field(0.2, 0.0).is_err());
        assert!(nf(1.0, 1.0).eval_field(0.0, 0.7).is_err());
    }

    #[test]
    fn critical_point_is_origin() {
        let n = nf(1.0, 1.0);
        assert_eq!(n.critical_point(0.0), 0.0);
        assert_eq!(n.critical_point(-0.01), 0.0);
        // dY/dy has the right sign on either side
        assert!(n.field_dy(0.2) > 0.0);
        assert!(n.field_dy(-0.2) < 0.0);
    }

    #[test]
    fn zeros_match_closed_form() {
        let (s, q) = nf(1.0, 1.0).field_zeros(-0.01).unwrap();
        assert!((s + 0.1).abs() < 1e-15 && (q - 0.1).abs() < 1e-15);
        assert!(nf(1.0, 1.0).field_zeros(0.01).is_none());
        let (s, q) = nf(4.0, 1.0).field_zeros(-0.04).unwrap();
        assert!((s + 0.1).abs() < 1e-15 && (q - 0.1).abs() < 1e-15);
    }

    #[test]
    fn time_one_rational_form() {
        let n = nf(1.0, 1.0);
        let v = n.time_one_map(0.0, 0.1).unwrap();
        assert!((v - 0.1 / 0.9).abs() < 1e-15);
        // cross-check against the RK4 oracle
        let o = rk4_flow(1.0, 1.0, 0.0, 0.1, 1.0, 20000);
        assert!((v - o).abs() < 1e-12);
        assert_eq!(n.time_one_map(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rest_point_is_fixed() {
        let n = nf(1.0, 1.0);
        let v = n.time_one_map(-0.01, 0.1).unwrap();
        assert!((v - 0.1).abs() < 1e-12);
    }

    #[test]
    fn flow_oracle_all_regimes() {
        let n = nf(1.0, 1.0);
        for &(mu, y0) in &[
            (0.01, -0.3),
            (0.01, 0.2),
            (-0.01, -0.3),
            (-0.01, 0.05),
            (-0.01, 0.15),
            (0.0, -0.2),
        ] {
            let v = n.time_one_map(mu, y0).unwrap();
            let o = rk4_flow(1.0, 1.0, mu, y0, 1.0, 40000);
            assert!(
                (v - o).abs() < 1e-10,
                "mu={mu}, y0={y0}: closed {v} vs rk4 {o}"
            );
        }
    }

    #[test]
    fn escape_reported_with_time() {
        let n = nf(1.0, 1.0);
        // From y0 = 0.4 at mu = 0.04 the flow passes delta1 = 0.5 quickly.
        match n.flow_at(0.04, 0.4, 1.0) {
            Err(Error::Escape { escape_time }) => {
                let t = n.flow_time_between(0.04, 0.4, 0.499999999).unwrap();
                assert!(escape_time > 0.0 && escape_time < 1.0);
                assert!((escape_time - t).abs() < 1e-6);
            }
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn flow_time_closed_forms() {
        // arctan antiderivative: alpha=beta=mu=1 would leave the parameter
        // domain, so widen the form for this identity check.
        let n = SaddleNodeNormalForm::new(1.0, 1.0, 1.5, 1.5, 1.5).unwrap();
        let t = n.flow_time_between(1.0, 0.0, 1.0).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_4).abs() < 1e-14);

        let n = nf(1.0, 1.0);
        let t = n.flow_time_between(1e-4, -0.25, 0.25).unwrap();
        let expect = 100.0 * 2.0 * (25.0f64).atan();
        assert!((t - expect).abs() < 1e-9 * expect);
        // quadrature oracle
        let q = quad_time(1.0, 1.0, 1e-4, -0.25, 0.25);
        assert!((t - q).abs() < 1e-6 * t);
    }

    #[test]
    fn flow_time_quadrature_negative_mu() {
        let n = nf(1.0, 1.0);
        // above the repelling zero q = 0.1
        let t = n.flow_time_between(-0.01, 0.15, 0.3).unwrap();
        let q = quad_time(1.0, 1.0, -0.01, 0.15, 0.3);
        assert!((t - q).abs() < 1e-8 * t.abs());
        // inside the trap (s, q), moving down: signed time from 0.05 to -0.05
        let t = n.flow_time_between(-0.01, 0.05, -0.05).unwrap();
        let q = quad_time(1.0, 1.0, -0.01, 0.05, -0.05);
        assert!(t > 0.0, "downward motion still takes positive time");
        assert!((t - q).abs() < 1e-8 * t.abs());
    }

    #[test]
    fn flow_time_round_trip_is_one() {
        let n = nf(1.0, 1.0);
        for &(mu, y0) in &[(0.01, -0.2), (0.0, 0.1), (-0.01, 0.2), (-0.01, 0.02)] {
            let y1 = n.time_one_map(mu, y0).unwrap();
            let t = n.flow_time_between(mu, y0, y1).unwrap();
            assert!((t - 1.0).abs() < 1e-9, "mu={mu} y0={y0}: t={t}");
        }
    }

    #[test]
    fn singular_integral_rejected() {
        let n = nf(1.0, 1.0);
        assert!(matches!(
            n.flow_time_between(-0.01, 0.05, 0.2),
            Err(Error::SingularIntegral { .. })
        ));
        assert!(matches!(
            n.flow_time_between(0.0, -0.1, 0.1),
            Err(Error::SingularIntegral { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        let n = nf(1.0, 1.0);
        let d = n.time_one_derivative(0.01, 0.0).unwrap();
        let f0 = n.time_one_map(0.01, 0.0).unwrap();
        assert!((d - (f0 * f0 + 0.01) / 0.01).abs() < 1e-12);
        assert!(d > 1.0);
        // hyperbolic rest point: linearization exp(dY/dy)
        let d = n.time_one_derivative(-0.01, 0.1).unwrap();
        assert!((d - 0.2f64.exp()).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn derivative_positive_and_matches_differences() {
        let n = nf(1.0, 1.0);
        let h = 1e-6;
        for &(mu, y0) in &[
            (0.01, -0.3),
            (0.01, 0.0),
            (0.0, -0.2),
            (-0.01, 0.2),
            (-0.01, -0.02),
            (-0.04, -0.3),
        ] {
            let d = n.time_one_derivative(mu, y0).unwrap();
            assert!(d > 0.0);
            let fd = (n.time_one_map(mu, y0 + h).unwrap() - n.time_one_map(mu, y0 - h).unwrap())
                / (2.0 * h);
            assert!(
                ((d - fd) / d).abs() < 1e-6,
                "mu={mu} y0={y0}: ratio {d} vs fd {fd}"
            );
        }
    }

    #[test]
    fn semigroup_property() {
        let n = nf(1.0, 1.0);
        for &(mu, y0) in &[(0.01, -0.3), (0.0, -0.2), (-0.01, 0.12), (-0.02, -0.05)] {
            let two_steps = n
                .time_one_map(mu, n.time_one_map(mu, y0).unwrap())
                .unwrap();
            let direct = n.flow_at(mu, y0, 2.0).unwrap();
            assert!(
                ((two_steps - direct) / direct.abs().max(1e-300)).abs() < 1e-10,
                "mu={mu} y0={y0}"
            );
        }
    }

    #[test]
    fn monotone_in_initial_condition() {
        let n = nf(1.0, 1.0);
        for &mu in &[-0.04, -0.01, 0.0, 0.01, 0.04] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..200 {
                let y0 = -0.35 + 0.6 * i as f64 / 199.0;
                if let Ok(v) = n.time_one_map(mu, y0) {
                    assert!(v > prev, "not increasing at mu={mu}, y0={y0}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn even_field_symmetry() {
        let n = nf(1.0, 1.0);
        for &(a, b) in &[(0.05, 0.2), (-0.1, 0.3), (0.0, 0.25)] {
            let t1 = n.flow_time_between(0.01, a, b).unwrap();
            let t2 = n.flow_time_between(0.01, -b, -a).unwrap();
            assert!((t1 - t2).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_interval_encloses_pointwise() {
        let n = nf(1.0, 1.0);
        for &(mu, lo, hi) in &[
            (0.01, -0.3, -0.28),
            (0.01, -0.01, 0.01),
            (-0.01, 0.08, 0.12), // straddles the repelling zero
            (-0.01, -0.12, -0.08),
            (0.0, -0.05, 0.05),
        ] {
            let enc = n.time_one_derivative_interval(mu, Iv::new(lo, hi));
            for i in 0..50 {
                let y = lo + (hi - lo) * i as f64 / 49.0;
                let d = n.time_one_derivative(mu, y).unwrap();
                assert!(
                    enc.lo <= d && d <= enc.hi,
                    "mu={mu} y={y}: {d} not in [{}, {}]",
                    enc.lo,
                    enc.hi
                );
            }
        }
    }
}
