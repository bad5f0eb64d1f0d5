//! One-variable profiles built from the quintic smoothstep: radial
//! Hamiltonian profiles, cutoffs, and the reparametrization `rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `S(u) = 6u^5 - 15u^4 + 10u^3` clamped to `[0, 1]`; `C^2` at both ends.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

pub fn smoothstep_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// `P(u) = ∫_0^u S`.
pub fn smoothstep_primitive(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        u - 0.5
    } else {
        u.powi(4) * (2.5 + u * (-3.0 + u))
    }
}

/// A smooth indicator of `[lo, hi]`: 0 outside, 1 on `[lo + ramp, hi - ramp]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothBox {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl SmoothBox {
    pub fn eval(&self, s: f64) -> f64 {
        smoothstep((s - self.lo) / self.ramp) - smoothstep((s - self.hi + self.ramp) / self.ramp)
    }

    /// `∫_s^∞ box`.
    pub fn tail_integral(&self, s: f64) -> f64 {
        if s >= self.hi {
            return 0.0;
        }
        if s <= self.lo {
            return self.area();
        }
        let w = self.ramp;
        (self.hi - w - self.lo) - w * smoothstep_primitive((s - self.lo) / w)
            + w * smoothstep_primitive((s - self.hi + w) / w)
    }

    pub fn area(&self) -> f64 {
        self.hi - self.lo - self.ramp
    }
}

/// `H(z) = h(|z|^2)` with `h'(rho) = -slope * sum of boxes` and `h = 0`
/// beyond the last box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialProfile {
    pub slope: f64,
    pub boxes: Vec<SmoothBox>,
}

impl RadialProfile {
    pub fn new(slope: f64, boxes: Vec<SmoothBox>) -> Result<Self> {
        let p = Self { slope, boxes };
        p.check()?;
        Ok(p)
    }

    /// Single box `[lo, hi]` scaled so that `h(0) = max`.
    pub fn with_max(max: f64, lo: f64, hi: f64, ramp: f64) -> Result<Self> {
        let b = SmoothBox { lo, hi, ramp };
        Self::new(max / b.area(), vec![b])
    }

    pub fn check(&self) -> Result<()> {
        if !self.slope.is_finite() {
            return Err(Error::ProfileInvalid("slope must be finite".into()));
        }
        let mut prev_hi = 0.0;
        for b in &self.boxes {
            if !(b.ramp > 0.0 && b.lo >= prev_hi && b.lo + 2.0 * b.ramp <= b.hi && b.hi.is_finite()) {
                return Err(Error::ProfileInvalid(format!(
                    "box [{}, {}] with ramp {} must be ordered, disjoint, and at least two ramps wide",
                    b.lo, b.hi, b.ramp
                )));
            }
            prev_hi = b.hi;
        }
        Ok(())
    }

    pub fn h(&self, rho: f64) -> f64 {
        self.slope * self.boxes.iter().map(|b| b.tail_integral(rho)).sum::<f64>()
    }

    pub fn h_prime(&self, rho: f64) -> f64 {
        -self.slope * self.boxes.iter().map(|b| b.eval(rho)).sum::<f64>()
    }

    /// `sup |h'|`.
    pub fn max_abs_slope(&self) -> f64 {
        if self.boxes.is_empty() {
            0.0
        } else {
            self.slope.abs()
        }
    }

    /// Outer edge of the support in `rho = |z|^2`.
    pub fn support_rho(&self) -> f64 {
        self.boxes.last().map_or(0.0, |b| b.hi)
    }

    /// Radius of the central plateau `{h = h(0)}` in `rho`.
    pub fn plateau_rho(&self) -> f64 {
        self.boxes.first().map_or(f64::INFINITY, |b| b.lo)
    }

    /// Critical values of `h(|x|^2)` on a real subspace: the top plateau,
    /// every shelf between boxes, and 0 outside the support.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals = vec![self.h(0.0)];
        for b in self.boxes.iter().take(self.boxes.len().saturating_sub(1)) {
            vals.push(self.h(b.hi));
        }
        vals.push(0.0);
        vals.sort_by(f64::total_cmp);
        vals.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        vals
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { slope: self.slope * c, boxes: self.boxes.clone() }
    }
}

/// `phi(u) = 1` for `u <= inner`, `0` for `u >= outer`, smooth and
/// non-increasing between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::ProfileInvalid(format!("cutoff needs 0 < inner < outer, got {inner}, {outer}")));
        }
        Ok(Self { inner, outer })
    }

    pub fn eval(&self, u: f64) -> f64 {
        1.0 - smoothstep((u - self.inner) / (self.outer - self.inner))
    }

    pub fn deriv(&self, u: f64) -> f64 {
        -smoothstep_deriv((u - self.inner) / (self.outer - self.inner)) / (self.outer - self.inner)
    }
}

/// A `C^2` non-decreasing `rho` with `rho = a` on `(-inf, a]`, `rho(s) = s`
/// on `[b, inf)`, `0 < rho' <= 1 + eta` on `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rho {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
}

impl Rho {
    /// The effective slope margin is capped at 1/2 so that the rising and
    /// falling ramps fit in `[a, b]`.
    pub fn new(a: f64, b: f64, eta: f64) -> Result<Self> {
        if !(a < b && eta > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InfeasibleRho(format!("need a < b and eta > 0, got a={a}, b={b}, eta={eta}")));
        }
        Ok(Self { a, b, eta: eta.min(0.5) })
    }

    fn width(&self) -> f64 {
        self.eta / (0.5 + self.eta)
    }

    /// Slope profile on `u in [0, 1]`; integrates to 1.
    fn phi(&self, u: f64) -> f64 {
        let (w, e) = (self.width(), self.eta);
        if u <= 0.0 {
            0.0
        } else if u < w {
            (1.0 + e) * smoothstep(u / w)
        } else if u <= 1.0 - w {
            1.0 + e
        } else if u < 1.0 {
            1.0 + e * (1.0 - smoothstep((u - 1.0 + w) / w))
        } else {
            1.0
        }
    }

    fn phi_integral(&self, u: f64) -> f64 {
        let (w, e) = (self.width(), self.eta);
        if u <= 0.0 {
            0.0
        } else if u < w {
            (1.0 + e) * w * smoothstep_primitive(u / w)
        } else if u <= 1.0 - w {
            (1.0 + e) * (0.5 * w + u - w)
        } else if u < 1.0 {
            let v = u - 1.0 + w;
            (1.0 + e) * (1.0 - 1.5 * w) + v + e * (v - w * smoothstep_primitive(v / w))
        } else {
            1.0 + (u - 1.0)
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let l = self.b - self.a;
        if s <= self.a {
            self.a
        } else if s >= self.b {
            s
        } else {
            self.a + l * self.phi_integral((s - self.a) / l)
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        self.phi((s - self.a) / (self.b - self.a))
    }

    pub fn max_slope(&self) -> f64 {
        1.0 + self.eta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_primitive_matches_quadrature() {
        let n = 20000;
        let mut acc = 0.0;
        for k in 0..n {
            let u = (k as f64 + 0.5) / n as f64 * 1.5;
            acc += smoothstep(u) * 1.5 / n as f64;
        }
        assert!((acc - smoothstep_primitive(1.5)).abs() < 1e-8);
    }

    #[test]
    fn radial_profile_closed_form() {
        let p = RadialProfile::with_max(2.0, 0.1, 1.0, 0.1).unwrap();
        assert!((p.h(0.0) - 2.0).abs() < 1e-14);
        assert_eq!(p.h(1.0), 0.0);
        assert_eq!(p.h(3.0), 0.0);
        // h' is the derivative of h
        for rho in [0.12, 0.3, 0.95] {
            let fd = (p.h(rho + 1e-6) - p.h(rho - 1e-6)) / 2e-6;
            assert!((fd - p.h_prime(rho)).abs() < 1e-7);
        }
        assert_eq!(p.critical_values(), vec![0.0, 2.0]);
    }

    #[test]
    fn shelf_adds_a_critical_value() {
        let p = RadialProfile::new(
            1.0,
            vec![SmoothBox { lo: 0.1, hi: 0.4, ramp: 0.05 }, SmoothBox { lo: 0.5, hi: 0.8, ramp: 0.05 }],
        )
        .unwrap();
        let cv = p.critical_values();
        assert_eq!(cv.len(), 3);
        assert!((cv[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn invalid_profiles() {
        assert!(RadialProfile::new(1.0, vec![SmoothBox { lo: 0.5, hi: 0.6, ramp: 0.1 }]).is_err());
        assert!(Cutoff::new(1.0, 0.5).is_err());
    }

    #[test]
    fn cutoff_endpoints() {
        let c = Cutoff::new(0.5, 1.0).unwrap();
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(1.0), 0.0);
        assert_eq!(c.eval(0.1), 1.0);
    }

    #[test]
    fn rho_bullets() {
        for eta in [0.01, 0.1, 0.5, 2.0] {
            let r = Rho::new(1.7, 1.85, eta).unwrap();
            assert_eq!(r.eval(1.0), 1.7);
            assert_eq!(r.eval(1.9), 1.9);
            assert!((r.eval(1.85) - 1.85).abs() < 1e-14);
            let mut prev = r.eval(1.7);
            for k in 1..=1000 {
                let s = 1.7 + 0.15 * k as f64 / 1000.0;
                let d = r.deriv(s);
                assert!(d > 0.0 && d <= r.max_slope() + 1e-15);
                let v = r.eval(s);
                assert!(v >= prev);
                let fd = (r.eval(s + 1e-7) - r.eval(s - 1e-7)) / 2e-7;
                assert!((fd - d).abs() < 1e-5, "{fd} {d}");
                prev = v;
            }
        }
    }
}
