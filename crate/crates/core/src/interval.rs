//! Minimal outward-rounded interval arithmetic.
//!
//! Every certified quantity in the hyperbolicity pipeline is computed from
//! these intervals rather than from pointwise samples.  Basic operations are
//! evaluated in f64 and inflated outward by a couple of ulps, which dominates
//! the rounding error of the underlying operation; library transcendentals get
//! a wider inflation since their accuracy is only guaranteed to a few ulps.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Closed interval [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Outward step of `n` ulps on each side.
fn widen(lo: f64, hi: f64, n: u32) -> Iv {
    let mut l = lo;
    let mut h = hi;
    for _ in 0..n {
        l = next_down(l);
        h = next_up(h);
    }
    Iv { lo: l, hi: h }
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "bad interval [{lo}, {hi}]");
        Iv { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    /// Hull of two endpoint values in either order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Iv {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn hull(self, other: Iv) -> Self {
        Iv {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Iv) -> Option<Iv> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Iv { lo, hi })
        } else {
            None
        }
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn scale(self, k: f64) -> Iv {
        self * Iv::point(k)
    }

    pub fn offset(self, k: f64) -> Iv {
        self + Iv::point(k)
    }

    pub fn square(self) -> Iv {
        if self.lo >= 0.0 {
            widen(self.lo * self.lo, self.hi * self.hi, 2)
        } else if self.hi <= 0.0 {
            widen(self.hi * self.hi, self.lo * self.lo, 2)
        } else {
            let m = (-self.lo).max(self.hi);
            widen(0.0, m * m, 2)
        }
    }

    /// exp over the interval, inflated for libm slack.
    pub fn exp(self) -> Iv {
        widen(self.lo.exp(), self.hi.exp(), 8)
    }
}

impl Add for Iv {
    type Output = Iv;
    fn add(self, o: Iv) -> Iv {
        widen(self.lo + o.lo, self.hi + o.hi, 2)
    }
}

impl Sub for Iv {
    type Output = Iv;
    fn sub(self, o: Iv) -> Iv {
        widen(self.lo - o.hi, self.hi - o.lo, 2)
    }
}

impl Mul for Iv {
    type Output = Iv;
    fn mul(self, o: Iv) -> Iv {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi, 2)
    }
}

/// Division; the divisor must not contain zero.
impl Div for Iv {
    type Output = Iv;
    fn div(self, o: Iv) -> Iv {
        debug_assert!(!o.contains(0.0), "division by interval containing zero");
        let c = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi, 2)
    }
}

impl Neg for Iv {
    type Output = Iv;
    fn neg(self) -> Iv {
        Iv {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

/// Enclosure of a monotone function from its endpoint values.
pub fn monotone_image(f_lo: f64, f_hi: f64) -> Iv {
    widen(f_lo.min(f_hi), f_lo.max(f_hi), 8)
}

/// Interval Horner evaluation of a polynomial with f64 coefficients
/// (lowest degree first).
pub fn horner(coeffs: &[f64], t: Iv) -> Iv {
    let mut acc = Iv::point(0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * t + Iv::point(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outward_contains_exact() {
        let a = Iv::new(0.1, 0.2);
        let b = Iv::new(0.3, 0.4);
        let s = a + b;
        assert!(s.lo <= 0.4 && s.hi >= 0.6);
        let p = a * b;
        assert!(p.lo <= 0.03 && p.hi >= 0.08);
    }

    #[test]
    fn square_straddling_zero() {
        let a = Iv::new(-2.0, 1.0);
        let s = a.square();
        assert!(s.lo <= 0.0 && s.hi >= 4.0);
    }

    #[test]
    fn horner_encloses() {
        // p(t) = 1 + 2t + 3t^2 at t in [0.5, 0.5]
        let p = horner(&[1.0, 2.0, 3.0], Iv::point(0.5));
        assert!(p.contains(2.75));
        assert!(p.width() < 1e-12);
    }
}
