//! Chords: trajectories that leave the Lagrangian and return to it.
//!
//! Returns are detected by a sign change of one defining function of `L`
//! between steps, refined by bisection on a partial step, and accepted when
//! all defining functions vanish at the refined point. Local minima of the
//! distance without a sign change are refined separately and flagged as
//! tangential.

use rayon::prelude::*;

use crate::dynamics::integrator::{step, IntegratorConfig};
use crate::dynamics::HamiltonianModel;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChordKind {
    Constant,
    Nonconstant,
}

#[derive(Clone, Debug)]
pub struct Chord {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// `None` for constant chords.
    pub return_time: Option<f64>,
    pub kind: ChordKind,
    /// Found as a touching point rather than a transverse crossing.
    pub tangential: bool,
    /// Up to 65 points along the chord.
    pub samples: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    /// Seed points per axis of `L`.
    pub grid: usize,
    /// Seeds with `|dH|` below this are constant chords.
    pub grad_tol: f64,
    /// Distance to `L` accepted as a return.
    pub chord_tol: f64,
    pub time_tol: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { grid: 17, grad_tol: 1e-9, chord_tol: 1e-6, time_tol: 1e-10, integrator: IntegratorConfig::default() }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// First return to `L` of the trajectory through `z0` within `(0, t_max]`.
pub fn first_return(model: &HamiltonianModel, z0: &[f64], t_max: f64, cfg: &ScanConfig) -> Result<Option<Chord>> {
    let lag = &model.lagrangian;
    let icfg = &cfg.integrator;
    let h = icfg.step;
    let mut samples = vec![z0.to_vec()];
    let mut z_prev = z0.to_vec();
    let mut t_prev = 0.0;
    let mut g_prev = lag.defining(z0);
    // |g| at the two previous samples, for tangential minima
    let mut d_hist = [f64::INFINITY, norm(&g_prev)];
    let mut k = 0usize;
    while t_prev < t_max {
        let dt = h.min(t_max - t_prev);
        if dt <= 0.0 {
            break;
        }
        let z = step(model, &z_prev, dt, icfg, t_prev)?;
        let t = t_prev + dt;
        let g = lag.defining(&z);
        k += 1;
        if k > 1 {
            for i in 0..g.len() {
                if g_prev[i] * g[i] < 0.0 || (g[i] == 0.0 && g_prev[i] != 0.0) {
                    let (tau, zc) = bisect_component(model, &z_prev, dt, i, g_prev[i], cfg, t_prev)?;
                    if lag.distance_proxy(&zc) <= cfg.chord_tol {
                        samples.push(zc.clone());
                        return Ok(Some(finish(z0, zc, t_prev + tau, false, samples)));
                    }
                }
            }
            let d = norm(&g);
            if d_hist[1] < d_hist[0] && d_hist[1] <= d && d_hist[1] < 100.0 * cfg.chord_tol {
                // touching minimum between the two previous samples' neighbours
                let t0 = (t_prev - h).max(0.0);
                if let Some((tm, zm)) = refine_minimum(model, z0, t0, t, cfg)? {
                    if lag.distance_proxy(&zm) <= cfg.chord_tol && tm > h {
                        return Ok(Some(finish(z0, zm, tm, true, samples)));
                    }
                }
            }
            d_hist = [d_hist[1], d];
        } else {
            d_hist = [d_hist[1], norm(&g)];
        }
        if k.is_multiple_of(16) {
            samples.push(z.clone());
        }
        z_prev = z;
        g_prev = g;
        t_prev = t;
    }
    Ok(None)
}

fn finish(z0: &[f64], end: Vec<f64>, t: f64, tangential: bool, mut samples: Vec<Vec<f64>>) -> Chord {
    if samples.len() > 65 {
        let stride = samples.len().div_ceil(64);
        let last = samples.last().cloned();
        samples = samples.into_iter().step_by(stride).collect();
        if let Some(l) = last {
            if samples.last() != Some(&l) {
                samples.push(l);
            }
        }
    }
    Chord {
        start: z0.to_vec(),
        end,
        return_time: Some(t),
        kind: ChordKind::Nonconstant,
        tangential,
        samples,
    }
}

/// Bisection on the partial step length for a zero of component `i`.
fn bisect_component(
    model: &HamiltonianModel,
    z: &[f64],
    dt: f64,
    i: usize,
    g_start: f64,
    cfg: &ScanConfig,
    t: f64,
) -> Result<(f64, Vec<f64>)> {
    let (mut lo, mut hi) = (0.0, dt);
    let mut z_hi = step(model, z, dt, &cfg.integrator, t)?;
    while hi - lo > cfg.time_tol {
        let mid = 0.5 * (lo + hi);
        let zm = step(model, z, mid, &cfg.integrator, t)?;
        let gm = model.lagrangian.defining(&zm)[i];
        if gm == 0.0 {
            return Ok((mid, zm));
        }
        if (gm > 0.0) == (g_start > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            z_hi = zm;
        }
    }
    Ok((hi, z_hi))
}

/// Golden-section minimization of the distance to `L` on `[t0, t1]`.
fn refine_minimum(model: &HamiltonianModel, z0: &[f64], t0: f64, t1: f64, cfg: &ScanConfig) -> Result<Option<(f64, Vec<f64>)>> {
    let at = |t: f64| -> Result<Vec<f64>> {
        let tr = crate::dynamics::integrator::flow(model, z0, t, &cfg.integrator)?;
        Ok(tr.end().to_vec())
    };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (t0, t1);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut zc = at(c)?;
    let mut zd = at(d)?;
    for _ in 0..60 {
        if b - a <= cfg.time_tol {
            break;
        }
        if model.lagrangian.distance_proxy(&zc) < model.lagrangian.distance_proxy(&zd) {
            b = d;
            d = c;
            zd = zc;
            c = b - r * (b - a);
            zc = at(c)?;
        } else {
            a = c;
            c = d;
            zc = zd;
            d = a + r * (b - a);
            zd = at(d)?;
        }
    }
    Ok(Some((c, zc)))
}

/// Chords starting at a grid of seeds on `L` within the support of `H`,
/// with return time at most `t_max`. Constant chords are the seeds where
/// `dH` vanishes. Results follow seed order.
pub fn chord_scan(model: &HamiltonianModel, t_max: f64, cfg: &ScanConfig) -> Result<Vec<Chord>> {
    let seeds = model.lagrangian.seeds(model.dim, model.seed_extent(), cfg.grid);
    let found: Vec<Result<Option<Chord>>> = seeds
        .par_iter()
        .map(|z0| {
            if norm(&model.gradient(z0)) < cfg.grad_tol {
                return Ok(Some(Chord {
                    start: z0.clone(),
                    end: z0.clone(),
                    return_time: None,
                    kind: ChordKind::Constant,
                    tangential: false,
                    samples: vec![z0.clone()],
                }));
            }
            first_return(model, z0, t_max, cfg)
        })
        .collect();
    let mut out = Vec::new();
    for r in found {
        if let Some(c) = r? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Shortest nonconstant return time among `chords`.
pub fn min_return_time(chords: &[Chord]) -> Option<f64> {
    chords.iter().filter_map(|c| c.return_time).min_by(f64::total_cmp)
}

/// Return time of a radial model at `rho = |z|^2`: `pi / (2 |h'(rho)|)`.
pub fn radial_return_time(h_prime: f64) -> f64 {
    std::f64::consts::PI / (2.0 * h_prime.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::profile::{RadialProfile, SmoothBox};
    use crate::dynamics::{Field, Lagrangian};

    fn radial(slope: f64) -> HamiltonianModel {
        let p = RadialProfile::new(slope, vec![SmoothBox { lo: 0.1, hi: 1.0, ramp: 0.1 }]).unwrap();
        HamiltonianModel::new(2, Field::Radial(p), Lagrangian::RealSubspace).unwrap()
    }

    #[test]
    fn return_time_matches_closed_form() {
        let model = radial(std::f64::consts::PI);
        let cfg = ScanConfig::default();
        let c = first_return(&model, &[0.7, 0.0], 1.0, &cfg).unwrap().expect("chord");
        let t = c.return_time.unwrap();
        assert!((t - 0.5).abs() < 1e-6, "{t}");
        assert!(!c.tangential);
    }

    #[test]
    fn slow_profile_has_no_short_chords() {
        let model = radial(std::f64::consts::FRAC_PI_4);
        let chords = chord_scan(&model, 1.5, &ScanConfig::default()).unwrap();
        assert!(chords.iter().all(|c| c.kind == ChordKind::Constant));
        let chords = chord_scan(&model, 2.1, &ScanConfig::default()).unwrap();
        let t = min_return_time(&chords).unwrap();
        assert!((t - 2.0).abs() < 1e-6, "{t}");
    }

    #[test]
    fn zero_field_has_only_constant_chords() {
        let m = HamiltonianModel::new(2, Field::Zero, Lagrangian::RealSubspace).unwrap();
        assert!(chord_scan(&m, 2.0, &ScanConfig::default()).unwrap().iter().all(|c| c.kind == ChordKind::Constant));
    }
}
