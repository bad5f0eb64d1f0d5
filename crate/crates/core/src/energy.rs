//! The one-sided oscillation `E+(H+ - H-) = ∫_0^1 sup_x (H+ - H-)(t, x) dt`
//! that bounds the action shift of linear continuation maps.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

type FieldFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;

/// A time-dependent scalar field on the cube `[-radius, radius]^dim`.
#[derive(Clone)]
pub struct ScalarField {
    pub dim: usize,
    pub radius: f64,
    /// The field vanishes outside the cube.
    pub compact_support: bool,
    f: Arc<FieldFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim).field("radius", &self.radius).finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new(dim: usize, radius: f64, compact_support: bool, f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, radius, compact_support, f: Arc::new(f) }
    }

    pub fn zero(dim: usize, radius: f64) -> Self {
        Self::new(dim, radius, true, |_, _| 0.0)
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        (self.f)(t, x)
    }

    /// `self - other` on the larger of the two cubes.
    pub fn minus(&self, other: &ScalarField) -> Result<ScalarField> {
        if self.dim != other.dim {
            return Err(Error::Input(format!("dimension mismatch {} vs {}", self.dim, other.dim)));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(ScalarField::new(
            self.dim,
            self.radius.max(other.radius),
            self.compact_support && other.compact_support,
            move |t, x| a.eval_supported(t, x) - b.eval_supported(t, x),
        ))
    }

    fn eval_supported(&self, t: f64, x: &[f64]) -> f64 {
        if self.compact_support && x.iter().any(|v| v.abs() > self.radius) {
            0.0
        } else {
            self.eval(t, x)
        }
    }
}

/// The endpoints of a homotopy of Hamiltonians.
#[derive(Clone, Debug)]
pub struct HamiltonianPair {
    pub h_minus: ScalarField,
    pub h_plus: ScalarField,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Grid points per axis for the first pass of the spatial supremum.
    pub grid: usize,
    pub tol: f64,
    /// Refinement stops once the grid exceeds this many points per axis.
    pub max_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { grid: 64, tol: 1e-6, max_grid: 1024 }
    }
}

/// Supremum of `field(t, .)` over its cube: grid maximum, refined by
/// doubling until stable, then polished by compass search.
pub fn spatial_sup(field: &ScalarField, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let mut n = cfg.grid.max(2);
    let mut prev = grid_sup(field, t, n);
    loop {
        let next_n = 2 * n - 1;
        if next_n > cfg.max_grid.max(cfg.grid) || grid_budget(field.dim, next_n) {
            break;
        }
        let next = grid_sup(field, t, next_n);
        let done = (next.0 - prev.0).abs() <= cfg.tol;
        prev = next;
        n = next_n;
        if done {
            break;
        }
    }
    let (mut best, mut x) = prev;
    if !best.is_finite() {
        return Err(Error::NonFiniteSup);
    }
    let mut step = 2.0 * field.radius / (n - 1) as f64;
    while step > 1e-13 * field.radius.max(1.0) {
        let mut improved = false;
        for i in 0..field.dim {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + dir * step).clamp(-field.radius, field.radius);
                let v = field.eval(t, &y);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSup);
                }
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    if field.compact_support {
        best = best.max(0.0);
    }
    Ok(best)
}

/// Grids beyond ~4M points are not refined further.
fn grid_budget(dim: usize, n: usize) -> bool {
    (n as f64).powi(dim as i32) > 4.0e6
}

fn grid_sup(field: &ScalarField, t: f64, n: usize) -> (f64, Vec<f64>) {
    let h = 2.0 * field.radius / (n - 1) as f64;
    let total = n.pow(field.dim as u32);
    (0..total)
        .into_par_iter()
        .map(|mut k| {
            let mut x = vec![0.0; field.dim];
            for xi in x.iter_mut() {
                *xi = -field.radius + h * (k % n) as f64;
                k /= n;
            }
            let v = field.eval(t, &x);
            (if v.is_nan() { f64::INFINITY } else { v }, x)
        })
        .reduce(|| (f64::NEG_INFINITY, Vec::new()), |a, b| if b.0 > a.0 { b } else { a })
}

/// `∫_0^1 sup_x (H+ - H-)(t, x) dt` by adaptive Simpson quadrature.
pub fn e_plus(pair: &HamiltonianPair, cfg: &QuadratureConfig) -> Result<f64> {
    let diff = pair.h_plus.minus(&pair.h_minus)?;
    let g = |t: f64| spatial_sup(&diff, t, cfg);
    let (fa, fm, fb) = (g(0.0)?, g(0.5)?, g(1.0)?);
    let whole = (fa + 4.0 * fm + fb) / 6.0;
    simpson(&g, 0.0, 1.0, fa, fm, fb, whole, cfg.tol, 24)
}

#[allow(clippy::too_many_arguments)]
fn simpson<G: Fn(f64) -> Result<f64>>(g: &G, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm)?, g(rm)?);
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    Ok(simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)? + simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}
