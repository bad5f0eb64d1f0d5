//! Symplectic integration of autonomous Hamiltonian flows: the implicit
//! midpoint rule, optionally composed into the fourth-order triple jump.

use crate::dynamics::HamiltonianModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Implicit midpoint, order 2.
    Midpoint,
    /// Triple-jump composition of implicit midpoint, order 4.
    TripleJump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub scheme: Scheme,
    /// Fixed-point tolerance of the implicit solve, relative to `1 + |z|`.
    pub solve_tol: f64,
    pub max_iter: usize,
    /// A non-converging step is split in halves at most this many times.
    pub max_split: u32,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { step: 1e-3, scheme: Scheme::TripleJump, solve_tol: 1e-15, max_iter: 60, max_split: 12 }
    }
}

const CBRT2: f64 = 1.259_921_049_894_873_2;
const GAMMA1: f64 = 1.0 / (2.0 - CBRT2);
const GAMMA2: f64 = -CBRT2 / (2.0 - CBRT2);

/// Sampled solution of `z' = X_H(z)`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// `max |H(z(t)) - H(z0)|` over the samples.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn end(&self) -> &[f64] {
        self.points.last().expect("trajectory has a start point")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("trajectory has a start time")
    }

    /// Energy drift divided by `max(duration, 1)`.
    pub fn drift_per_unit_time(&self) -> f64 {
        self.energy_drift / self.duration().max(1.0)
    }
}

fn midpoint(model: &HamiltonianModel, z: &[f64], h: f64, cfg: &IntegratorConfig, t: f64) -> Result<Vec<f64>> {
    midpoint_split(model, z, h, cfg, t, 0)
}

fn midpoint_split(model: &HamiltonianModel, z: &[f64], h: f64, cfg: &IntegratorConfig, t: f64, depth: u32) -> Result<Vec<f64>> {
    if let Some(z1) = midpoint_solve(model, z, h, cfg) {
        return Ok(z1);
    }
    if depth >= cfg.max_split {
        return Err(Error::StepFailure(t));
    }
    let half = midpoint_split(model, z, h / 2.0, cfg, t, depth + 1)?;
    midpoint_split(model, &half, h / 2.0, cfg, t + h / 2.0, depth + 1)
}

fn midpoint_solve(model: &HamiltonianModel, z: &[f64], h: f64, cfg: &IntegratorConfig) -> Option<Vec<f64>> {
    let d = z.len();
    let mut f = vec![0.0; d];
    model.vector_field(z, &mut f);
    let mut z1: Vec<f64> = z.iter().zip(&f).map(|(a, b)| a + h * b).collect();
    let mut mid = vec![0.0; d];
    let scale = 1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut prev_delta = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        for i in 0..d {
            mid[i] = 0.5 * (z[i] + z1[i]);
        }
        model.vector_field(&mid, &mut f);
        let mut delta: f64 = 0.0;
        for i in 0..d {
            let next = z[i] + h * f[i];
            delta = delta.max((next - z1[i]).abs());
            z1[i] = next;
        }
        if !delta.is_finite() {
            return None;
        }
        if delta <= cfg.solve_tol * scale {
            return Some(z1);
        }
        // stalled at round-off level
        if delta >= prev_delta && delta <= 1e-13 * scale {
            return Some(z1);
        }
        prev_delta = delta;
    }
    None
}

/// One step of size `h` with the configured scheme.
pub fn step(model: &HamiltonianModel, z: &[f64], h: f64, cfg: &IntegratorConfig, t: f64) -> Result<Vec<f64>> {
    match cfg.scheme {
        Scheme::Midpoint => midpoint(model, z, h, cfg, t),
        Scheme::TripleJump => {
            let a = midpoint(model, z, GAMMA1 * h, cfg, t)?;
            let b = midpoint(model, &a, GAMMA2 * h, cfg, t)?;
            midpoint(model, &b, GAMMA1 * h, cfg, t)
        }
    }
}

/// Integrates from `z0` for time `t_end >= 0`, sampling every step; the last
/// step is shortened to land on `t_end`.
pub fn flow(model: &HamiltonianModel, z0: &[f64], t_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if z0.len() != model.dim {
        return Err(Error::Input(format!("point has dimension {}, model {}", z0.len(), model.dim)));
    }
    let h0 = model.value(z0);
    let mut times = vec![0.0];
    let mut points = vec![z0.to_vec()];
    let mut drift: f64 = 0.0;
    let mut t = 0.0;
    let mut z = z0.to_vec();
    while t < t_end {
        let h = cfg.step.min(t_end - t);
        if h <= 1e-15 * t_end.max(1.0) {
            break;
        }
        z = step(model, &z, h, cfg, t)?;
        t += h;
        drift = drift.max((model.value(&z) - h0).abs());
        times.push(t);
        points.push(z.clone());
    }
    Ok(Trajectory { times, points, energy_drift: drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::profile::RadialProfile;
    use crate::dynamics::{Field, Lagrangian};

    fn rotation_model(c: f64) -> HamiltonianModel {
        // h' = -c on a wide box around the test orbit
        let p = RadialProfile::new(c, vec![crate::dynamics::profile::SmoothBox { lo: 0.01, hi: 4.0, ramp: 0.01 }]).unwrap();
        HamiltonianModel::new(2, Field::Radial(p), Lagrangian::RealSubspace).unwrap()
    }

    #[test]
    fn radial_rotation_matches_closed_form() {
        let c = 0.7;
        let model = rotation_model(c);
        let z0 = [1.0, 0.0];
        let t = 2.0;
        let tr = flow(&model, &z0, t, &IntegratorConfig::default()).unwrap();
        // x' = -2h' y, y' = 2h' x with h' = -c: angle -2ct
        let th = 2.0 * (-c) * t;
        let exact = [th.cos(), th.sin()];
        let err = ((tr.end()[0] - exact[0]).powi(2) + (tr.end()[1] - exact[1]).powi(2)).sqrt();
        assert!(err < 1e-6 * t, "error {err}");
        assert!(tr.drift_per_unit_time() < 1e-8);
    }

    #[test]
    fn zero_field_and_critical_point_are_fixed() {
        let m = HamiltonianModel::new(2, Field::Zero, Lagrangian::RealSubspace).unwrap();
        let tr = flow(&m, &[0.3, 0.0], 1.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.end(), &[0.3, 0.0]);
        let tr = flow(&rotation_model(1.0), &[0.0, 0.0], 1.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.end(), &[0.0, 0.0]);
    }

    #[test]
    fn order_four_beats_order_two() {
        let model = rotation_model(1.3);
        let z0 = [1.0, 0.0];
        let th: f64 = 2.0 * (-1.3) * 1.0;
        let err = |scheme| {
            let cfg = IntegratorConfig { scheme, step: 1e-2, ..Default::default() };
            let e = flow(&model, &z0, 1.0, &cfg).unwrap();
            ((e.end()[0] - th.cos()).powi(2) + (e.end()[1] - th.sin()).powi(2)).sqrt()
        };
        assert!(err(Scheme::TripleJump) < 0.01 * err(Scheme::Midpoint));
    }
}
