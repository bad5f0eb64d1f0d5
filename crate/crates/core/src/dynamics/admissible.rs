//! The four admissibility conditions for an autonomous Hamiltonian with
//! respect to its Lagrangian, and the maximum `m(H)`.
//!
//! 1. every chord with return time `T <= 1 + eta` is constant;
//! 2. the maximum set on `L` is a closed ball;
//! 3. the critical values of `H|L` are exactly `{0, m(H)}`;
//! 4. `H` is compactly supported.
//!
//! Conditions 2 and 3 use closed forms for the tagged families and a grid
//! search otherwise; condition 2 is reported unverified for families
//! without a closed form. Condition 1 is grid-limited: a pass means no
//! short chord started from the seed grid.

use std::fmt;

use crate::dynamics::chords::{chord_scan, min_return_time, Chord, ChordKind, ScanConfig};
use crate::dynamics::{ChartFunction, Field, HamiltonianModel, Lagrangian};
use crate::energy::{spatial_sup, QuadratureConfig, ScalarField};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unverified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Unverified => "unverified",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConditionResult {
    pub index: u8,
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub family: &'static str,
    pub eta: f64,
    pub m_h: f64,
    pub support_radius: Option<f64>,
    pub critical_values: Vec<f64>,
    pub conditions: Vec<ConditionResult>,
    /// Nonconstant chords with `T <= 1 + eta`.
    pub short_chords: Vec<Chord>,
    pub seeds_scanned: usize,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn condition(&self, index: u8) -> &ConditionResult {
        &self.conditions[usize::from(index - 1)]
    }

    pub fn render(&self) -> String {
        let mut s = format!("family {}\nm(H) = {:.9}\n", self.family, self.m_h);
        match self.support_radius {
            Some(r) => s.push_str(&format!("support radius {r:.6}\n")),
            None => s.push_str("support radius: not compact\n"),
        }
        let cv: Vec<String> = self.critical_values.iter().map(|v| format!("{v:.9}")).collect();
        s.push_str(&format!("critical values on L: {{{}}}\n", cv.join(", ")));
        for c in &self.conditions {
            s.push_str(&format!("condition {} ({}): {} - {}\n", c.index, c.name, c.verdict, c.detail));
        }
        s.push_str(&format!("admissible: {}\n", if self.is_admissible() { "yes" } else { "no" }));
        s
    }
}

/// Maximum of `H`: closed form for the tagged families, otherwise a grid
/// search with refinement and compass polish over the seed box.
pub fn max_value(model: &HamiltonianModel) -> f64 {
    if let Some(v) = closed_form_max(&model.field) {
        return v;
    }
    let ext = model.seed_extent();
    let field = model.field.clone();
    let sf = ScalarField::new(model.dim, ext, model.field.support_radius().is_some(), move |_, z| field.value(z));
    let grid = if model.dim <= 2 { 129 } else { 25 };
    let cfg = QuadratureConfig { grid, tol: 1e-10, max_grid: grid * 4 };
    spatial_sup(&sf, 0.0, &cfg).unwrap_or(f64::NAN)
}

fn closed_form_max(field: &Field) -> Option<f64> {
    match field {
        Field::Zero => Some(0.0),
        Field::Radial(p) => Some(p.h(0.0).max(0.0)),
        Field::Weinstein { f: ChartFunction::Radial(p), .. } => Some(p.h(0.0).max(0.0)),
        Field::Product { base, m, .. } => closed_form_max(base).filter(|b| (b - m).abs() <= 1e-12).map(|_| *m),
        Field::Reparam { base, rho } => closed_form_max(base).map(|b| rho.eval(b) - rho.a),
        Field::Scaled { base, factor } if *factor >= 0.0 => closed_form_max(base).map(|b| factor * b),
        _ => None,
    }
}

/// Critical values of `H|L` for the families where they are known exactly.
fn closed_form_critical_values(field: &Field, lag: &Lagrangian) -> Option<Vec<f64>> {
    match (field, lag) {
        (Field::Zero, _) => Some(vec![0.0]),
        (Field::Radial(p), Lagrangian::RealSubspace) => Some(p.critical_values()),
        (Field::Weinstein { f: ChartFunction::Radial(p), .. }, Lagrangian::RealSubspace) => Some(p.critical_values()),
        (Field::Reparam { base, rho }, _) => {
            let mut vals: Vec<f64> = closed_form_critical_values(base, lag)?.iter().map(|v| rho.eval(*v) - rho.a).collect();
            vals.push(0.0);
            Some(dedup(vals))
        }
        (Field::Scaled { base, factor }, _) if *factor > 0.0 => {
            Some(closed_form_critical_values(base, lag)?.iter().map(|v| factor * v).collect())
        }
        _ => None,
    }
}

fn dedup(mut vals: Vec<f64>) -> Vec<f64> {
    vals.sort_by(f64::total_cmp);
    vals.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);
    vals
}

/// Point of `L` from chart coordinates: `x` for the real subspace, base `x`
/// and an angle for the product circle, angles for the torus.
fn chart_point(lag: &Lagrangian, dim: usize, u: &[f64]) -> Vec<f64> {
    let n = dim / 2;
    let mut z = vec![0.0; dim];
    match lag {
        Lagrangian::RealSubspace => z[..n].copy_from_slice(u),
        Lagrangian::ProductCircle { radius } => {
            z[..n - 1].copy_from_slice(&u[..n - 1]);
            z[n - 1] = radius * u[n - 1].cos();
            z[2 * n - 1] = radius * u[n - 1].sin();
        }
        Lagrangian::Torus { radii } => {
            for i in 0..n {
                z[i] = radii[i] * u[i].cos();
                z[n + i] = radii[i] * u[i].sin();
            }
        }
    }
    z
}

fn chart_box(lag: &Lagrangian, n: usize, extent: f64) -> Vec<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    match lag {
        Lagrangian::RealSubspace => vec![(-extent, extent); n],
        Lagrangian::ProductCircle { .. } => {
            let mut b = vec![(-extent, extent); n - 1];
            b.push((0.0, tau));
            b
        }
        Lagrangian::Torus { .. } => vec![(0.0, tau); n],
    }
}

/// Critical values of `H|L` by a chart grid: local minima of the chart
/// gradient norm, polished by compass search, accepted below `1e-6`.
pub fn numeric_critical_values(model: &HamiltonianModel) -> Vec<f64> {
    let n = model.n();
    let boxes = chart_box(&model.lagrangian, n, model.seed_extent());
    let per_axis: usize = if n == 1 { 401 } else { 41 };
    let f = |u: &[f64]| model.value(&chart_point(&model.lagrangian, model.dim, u));
    let grad_norm = |u: &[f64]| -> f64 {
        let mut s = 0.0;
        let mut v = u.to_vec();
        for i in 0..u.len() {
            let h = 1e-6;
            v[i] = u[i] + h;
            let fp = f(&v);
            v[i] = u[i] - h;
            let fm = f(&v);
            v[i] = u[i];
            s += ((fp - fm) / (2.0 * h)).powi(2);
        }
        s.sqrt()
    };
    let coord = |axis: usize, k: usize| {
        let (lo, hi) = boxes[axis];
        lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
    };
    let total = per_axis.pow(n as u32);
    let unravel = |mut k: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let i = k % per_axis;
                k /= per_axis;
                i
            })
            .collect()
    };
    let norms: Vec<f64> = (0..total)
        .map(|k| {
            let idx = unravel(k);
            let u: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| coord(a, i)).collect();
            grad_norm(&u)
        })
        .collect();
    let mut vals = Vec::new();
    for k in 0..total {
        let idx = unravel(k);
        let mut is_min = true;
        let mut stride = 1;
        for a in 0..n {
            for d in [-1i64, 1] {
                let j = idx[a] as i64 + d;
                if j >= 0 && (j as usize) < per_axis {
                    let kk = (k as i64 + d * stride as i64) as usize;
                    if norms[kk] < norms[k] {
                        is_min = false;
                    }
                }
            }
            stride *= per_axis;
        }
        if !is_min {
            continue;
        }
        let mut u: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| coord(a, i)).collect();
        let mut best = norms[k];
        let mut step = (boxes[0].1 - boxes[0].0) / (per_axis - 1) as f64;
        while step > 1e-12 && best > 1e-9 {
            let mut improved = false;
            for a in 0..n {
                for d in [-1.0, 1.0] {
                    let mut v = u.clone();
                    v[a] = (v[a] + d * step).clamp(boxes[a].0, boxes[a].1);
                    let g = grad_norm(&v);
                    if g < best {
                        best = g;
                        u = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best < 1e-6 {
            vals.push(f(&u));
        }
    }
    if model.field.support_radius().is_some() {
        vals.push(0.0);
    }
    dedup(vals)
}

fn ball_verdict(field: &Field, lag: &Lagrangian) -> (Verdict, String) {
    let profile_ball = |p: &crate::dynamics::profile::RadialProfile| {
        if p.boxes.is_empty() || p.slope <= 0.0 {
            (Verdict::Fail, "H has no positive maximum on L".to_string())
        } else if p.plateau_rho() > 0.0 {
            (Verdict::Pass, format!("maximum set on L is the ball |x|^2 <= {}", p.plateau_rho()))
        } else {
            (Verdict::Fail, "maximum on L is attained at a single point".to_string())
        }
    };
    match (field, lag) {
        (Field::Zero, _) => (Verdict::Fail, "H vanishes identically".into()),
        (Field::Radial(p), Lagrangian::RealSubspace) => profile_ball(p),
        (Field::Weinstein { f: ChartFunction::Radial(p), .. }, Lagrangian::RealSubspace) => profile_ball(p),
        (Field::Product { .. }, _) => (Verdict::Fail, "maximum set on L contains a ball times a circle".into()),
        (Field::Reparam { base, .. }, _) => ball_verdict(base, lag),
        (Field::Scaled { base, factor }, _) if *factor > 0.0 => ball_verdict(base, lag),
        (Field::Scaled { .. }, _) => (Verdict::Fail, "H has no positive maximum".into()),
        _ => (Verdict::Unverified, "ball topology is only decided for tagged families".into()),
    }
}

/// Checks all four conditions; chords are scanned up to `T = 1 + eta`.
pub fn check_admissible(model: &HamiltonianModel, eta: f64, scan: &ScanConfig) -> Result<AdmissibilityReport> {
    let t_max = 1.0 + eta;
    let m_h = max_value(model);
    let support = model.field.support_radius();
    let chords = chord_scan(model, t_max, scan)?;
    let seeds = scan.grid.pow(model.n() as u32);
    let short: Vec<Chord> = chords.into_iter().filter(|c| c.kind == ChordKind::Nonconstant).collect();
    let mut conditions = Vec::new();

    let c1 = if short.is_empty() {
        ConditionResult {
            index: 1,
            name: "short chords are constant",
            verdict: Verdict::Pass,
            detail: format!("no nonconstant chord with T <= {t_max:.6} from {seeds} seeds"),
        }
    } else {
        ConditionResult {
            index: 1,
            name: "short chords are constant",
            verdict: Verdict::Fail,
            detail: format!(
                "{} nonconstant chords with T <= {t_max:.6}, shortest T = {:.9}",
                short.len(),
                min_return_time(&short).unwrap_or(f64::NAN)
            ),
        }
    };
    conditions.push(c1);

    let (v2, d2) = ball_verdict(&model.field, &model.lagrangian);
    conditions.push(ConditionResult { index: 2, name: "maximum set on L is a ball", verdict: v2, detail: d2 });

    let (crit, how) = match closed_form_critical_values(&model.field, &model.lagrangian) {
        Some(v) => (v, "closed form"),
        None => (numeric_critical_values(model), "grid search"),
    };
    let expected = dedup(vec![0.0, m_h]);
    let ok3 = m_h > 1e-9 && crit.len() == expected.len() && crit.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= 1e-6);
    conditions.push(ConditionResult {
        index: 3,
        name: "critical values on L are {0, m(H)}",
        verdict: if ok3 { Verdict::Pass } else { Verdict::Fail },
        detail: format!("{} values by {how}", crit.len()),
    });

    conditions.push(match support {
        Some(r) => ConditionResult {
            index: 4,
            name: "compact support",
            verdict: Verdict::Pass,
            detail: format!("supported in the ball of radius {r:.6}"),
        },
        None => ConditionResult {
            index: 4,
            name: "compact support",
            verdict: Verdict::Fail,
            detail: "H is constant and nonzero outside a compact set".into(),
        },
    });

    Ok(AdmissibilityReport {
        family: model.field.family(),
        eta,
        m_h,
        support_radius: support,
        critical_values: crit,
        conditions,
        short_chords: short,
        seeds_scanned: seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::profile::{RadialProfile, SmoothBox};

    fn radial(p: RadialProfile) -> HamiltonianModel {
        HamiltonianModel::new(2, Field::Radial(p), Lagrangian::RealSubspace).unwrap()
    }

    #[test]
    fn slow_radial_is_admissible() {
        let p = RadialProfile::new(1.2, vec![SmoothBox { lo: 0.1, hi: 1.0, ramp: 0.1 }]).unwrap();
        let rep = check_admissible(&radial(p.clone()), 0.05, &ScanConfig::default()).unwrap();
        assert!(rep.is_admissible(), "{}", rep.render());
        assert_eq!(rep.m_h, p.h(0.0));
    }

    #[test]
    fn fast_radial_fails_condition_one() {
        let p = RadialProfile::new(std::f64::consts::PI, vec![SmoothBox { lo: 0.1, hi: 1.0, ramp: 0.1 }]).unwrap();
        let rep = check_admissible(&radial(p), 0.05, &ScanConfig::default()).unwrap();
        assert_eq!(rep.condition(1).verdict, Verdict::Fail);
        let t = min_return_time(&rep.short_chords).unwrap();
        assert!((t - 0.5).abs() < 1e-6);
    }

    #[test]
    fn shelf_fails_condition_three() {
        let p = RadialProfile::new(
            1.0,
            vec![SmoothBox { lo: 0.1, hi: 0.4, ramp: 0.05 }, SmoothBox { lo: 0.5, hi: 0.8, ramp: 0.05 }],
        )
        .unwrap();
        let rep = check_admissible(&radial(p), 0.05, &ScanConfig::default()).unwrap();
        assert_eq!(rep.condition(3).verdict, Verdict::Fail);
        assert_eq!(rep.critical_values.len(), 3);
    }

    #[test]
    fn numeric_and_closed_form_critical_values_agree() {
        let p = RadialProfile::new(
            1.0,
            vec![SmoothBox { lo: 0.1, hi: 0.4, ramp: 0.05 }, SmoothBox { lo: 0.5, hi: 0.8, ramp: 0.05 }],
        )
        .unwrap();
        let model = radial(p.clone());
        let numeric = numeric_critical_values(&model);
        let exact = p.critical_values();
        assert_eq!(numeric.len(), exact.len(), "{numeric:?}");
        for (a, b) in numeric.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn numeric_max_matches_closed_form() {
        let p = RadialProfile::with_max(0.8, 0.05, 0.9, 0.05).unwrap();
        let f = Field::Scaled { base: Box::new(Field::Radial(p)), factor: -1.0 };
        let m = HamiltonianModel::new(2, Field::Scaled { base: Box::new(f), factor: -1.0 }, Lagrangian::RealSubspace).unwrap();
        assert!((max_value(&m) - 0.8).abs() < 1e-8);
    }
}
