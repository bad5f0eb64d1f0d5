//! Hamiltonians built from other data: the reparametrization `rho(H) - a`,
//! the Weinstein extension of a function on `L`, the product extension
//! across a circle factor, and the radial lower bound for the capacity of
//! a ball.

use crate::dynamics::admissible::{check_admissible, max_value, AdmissibilityReport};
use crate::dynamics::chords::ScanConfig;
use crate::dynamics::integrator::{flow, IntegratorConfig};
use crate::dynamics::profile::{Cutoff, RadialProfile, Rho, SmoothBox};
use crate::dynamics::{ChartFunction, Field, HamiltonianModel, Lagrangian};
use crate::error::{Error, Result};

/// Output of [`reparametrize`].
#[derive(Clone, Debug)]
pub struct Reparametrized {
    pub model: HamiltonianModel,
    /// `None` when `alpha = m(H0)` and the model is returned unchanged.
    pub rho: Option<Rho>,
    pub m0: f64,
    pub m1: f64,
    /// `sup |dH0|` over the samples where `H0 >= a`.
    pub sup_dh0_top: f64,
    pub sup_dh1: f64,
    /// Largest deviation of `dH1` (finite differences) from `rho'(H0) dH0`.
    pub vector_field_error: f64,
    pub samples: usize,
}

impl Reparametrized {
    /// `sup |dH1| <= (1 + eta) sup_{H0 >= a} |dH0|` on the samples.
    pub fn slope_bound_holds(&self) -> bool {
        match self.rho {
            Some(r) => self.sup_dh1 <= r.max_slope() * self.sup_dh0_top * (1.0 + 1e-9) + 1e-12,
            None => true,
        }
    }
}

/// Ambient sample grid on the cube of half-width `extent`.
pub fn ambient_samples(dim: usize, extent: f64) -> Vec<Vec<f64>> {
    let per_axis: usize = match dim {
        2 => 201,
        4 => 21,
        _ => 7,
    };
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let i = k % per_axis;
                    k /= per_axis;
                    -extent + 2.0 * extent * i as f64 / (per_axis - 1) as f64
                })
                .collect()
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `H1 = rho(H0) - a` with `a = m(H0) - alpha`, so that `m(H1) = alpha`,
/// `H1 = 0` on `{H0 <= a}`, and `X_{H1} = rho'(H0) X_{H0}`.
pub fn reparametrize(model: &HamiltonianModel, alpha: f64, eta: f64) -> Result<Reparametrized> {
    let m0 = max_value(model);
    if alpha > m0 + 1e-12 {
        return Err(Error::AlphaTooLarge { alpha, max: m0 });
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InfeasibleRho(format!("alpha must be positive, got {alpha}")));
    }
    if alpha >= m0 - 1e-12 {
        return Ok(Reparametrized {
            model: model.clone(),
            rho: None,
            m0,
            m1: m0,
            sup_dh0_top: f64::NAN,
            sup_dh1: f64::NAN,
            vector_field_error: 0.0,
            samples: 0,
        });
    }
    let a = m0 - alpha;
    let b = 0.5 * (a + m0);
    let rho = Rho::new(a, b, eta)?;
    let mut out = model.clone();
    out.field = Field::Reparam { base: Box::new(model.field.clone()), rho };
    let m1 = max_value(&out);

    let samples = ambient_samples(model.dim, model.seed_extent());
    let (mut sup0, mut sup1, mut err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for z in &samples {
        let h0 = model.value(z);
        let g0 = model.gradient(z);
        if h0 >= a {
            sup0 = sup0.max(norm(&g0));
        }
        let d = rho.deriv(h0);
        let fd: Vec<f64> = (0..z.len())
            .map(|i| {
                let (mut zp, mut zm) = (z.clone(), z.clone());
                zp[i] += 1e-7;
                zm[i] -= 1e-7;
                (out.value(&zp) - out.value(&zm)) / 2e-7
            })
            .collect();
        sup1 = sup1.max(norm(&out.gradient(z)));
        let dev = fd.iter().zip(&g0).map(|(f, g)| (f - d * g).abs()).fold(0.0, f64::max);
        err = err.max(dev);
    }
    Ok(Reparametrized {
        model: out,
        rho: Some(rho),
        m0,
        m1,
        sup_dh0_top: sup0,
        sup_dh1: sup1,
        vector_field_error: err,
        samples: samples.len(),
    })
}

/// Largest distance between the `H1`-trajectory through `z0` on `[0, t]`
/// and the `H0`-trajectory on `[0, c t]`, `c = rho'(H0(z0))`, at matched
/// samples. Bounds the Hausdorff distance between the two images.
pub fn trajectory_image_distance(base: &HamiltonianModel, rep: &Reparametrized, z0: &[f64], t: f64) -> Result<f64> {
    let Some(rho) = rep.rho else {
        return Ok(0.0);
    };
    let c = rho.deriv(base.value(z0));
    if c <= 0.0 {
        return Err(Error::Precondition("z0 lies where H1 vanishes; its trajectory is constant".into()));
    }
    let cfg1 = IntegratorConfig::default();
    let cfg0 = IntegratorConfig { step: cfg1.step * c, ..cfg1 };
    let t1 = flow(&rep.model, z0, t, &cfg1)?;
    let t0 = flow(base, z0, c * t, &cfg0)?;
    let n = t1.points.len().min(t0.points.len());
    Ok((0..n)
        .map(|k| norm(&t1.points[k].iter().zip(&t0.points[k]).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .fold(0.0, f64::max))
}

/// `f~(x, y) = phi(|y|) f(x)` with `phi = 1` on `[0, r]`, `0` on `[R, inf)`.
pub fn weinstein_extend(f: ChartFunction, r: f64, big_r: f64, dim: usize) -> Result<HamiltonianModel> {
    let cutoff = Cutoff::new(r, big_r)?;
    HamiltonianModel::new(dim, Field::Weinstein { f, cutoff }, Lagrangian::RealSubspace)
}

/// `H~ = (H - m) beta + m` on `X x R^2`, with `L~ = L x {circle of radius
/// circle_radius}`; `beta = 1` must hold on a neighbourhood of the circle.
pub fn product_extend(base: &HamiltonianModel, beta: Cutoff, m: f64, circle_radius: f64) -> Result<HamiltonianModel> {
    if base.lagrangian != Lagrangian::RealSubspace {
        return Err(Error::Input("product extension needs a real-subspace base Lagrangian".into()));
    }
    if beta.inner <= circle_radius {
        return Err(Error::ProfileInvalid(format!(
            "cutoff must equal 1 near the circle: inner radius {} <= circle radius {circle_radius}",
            beta.inner
        )));
    }
    let mut out = HamiltonianModel::new(
        base.dim + 2,
        Field::Product { base: Box::new(base.field.clone()), cutoff: beta, m },
        Lagrangian::ProductCircle { radius: circle_radius },
    )?;
    out.scan_extent = base.field.support_radius().or(base.scan_extent);
    Ok(out)
}

/// The product extension across a circle of area `epsilon`: radius
/// `sqrt(eps/pi)`, `beta = 1` up to `sqrt(1.5 eps/pi)`, `0` beyond
/// `sqrt(2 eps/pi)`.
pub fn circle_product(base: &HamiltonianModel, epsilon: f64) -> Result<HamiltonianModel> {
    let pi = std::f64::consts::PI;
    let beta = Cutoff::new((1.5 * epsilon / pi).sqrt(), (2.0 * epsilon / pi).sqrt())?;
    product_extend(base, beta, max_value(base), (epsilon / pi).sqrt())
}

#[derive(Clone, Debug)]
pub struct CapacityBound {
    pub value: f64,
    /// `(pi/2) R^2`, the value approached as the slope cap tends to 1.
    pub limit: f64,
    pub smoothing_loss: f64,
    pub model: HamiltonianModel,
    pub report: AdmissibilityReport,
}

impl CapacityBound {
    pub fn render(&self) -> String {
        format!(
            "lower bound m(H) = {:.9}\nlimit (pi/2) R^2 = {:.9}\nsmoothing loss = {:.9}\n{}",
            self.value,
            self.limit,
            self.smoothing_loss,
            self.report.render()
        )
    }
}

/// A radial profile on the ball of radius `radius` with `|h'| <= fraction *
/// pi/2`, certified admissible; returns `m(H) = h(0)`.
pub fn radial_capacity_lower_bound(radius: f64, fraction: f64) -> Result<CapacityBound> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Precondition(format!("slope fraction must lie in (0, 1), got {fraction}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
    }
    let r2 = radius * radius;
    let slope = fraction * std::f64::consts::FRAC_PI_2;
    let profile = RadialProfile::new(slope, vec![SmoothBox { lo: 0.01 * r2, hi: r2, ramp: 0.01 * r2 }])?;
    let model = HamiltonianModel::new(2, Field::Radial(profile.clone()), Lagrangian::RealSubspace)?;
    // shortest return time is 1/fraction; scan halfway to it
    let eta = (1.0 / fraction - 1.0) / 2.0;
    let report = check_admissible(&model, eta, &ScanConfig::default())?;
    let value = profile.h(0.0);
    let limit = std::f64::consts::FRAC_PI_2 * r2;
    Ok(CapacityBound { value, limit, smoothing_loss: limit - value, model, report })
}

/// Test profile with `m(H0) = 2`: one box `[0.1, 1]` with ramp `0.1`.
pub fn radial_test_model() -> HamiltonianModel {
    let p = RadialProfile::with_max(2.0, 0.1, 1.0, 0.1).expect("valid profile");
    HamiltonianModel::new(2, Field::Radial(p), Lagrangian::RealSubspace).expect("valid model")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reparam_hits_alpha_and_vanishes_below() {
        let h0 = radial_test_model();
        let rep = reparametrize(&h0, 0.3, 0.1).unwrap();
        assert!((rep.m1 - 0.3).abs() < 1e-9);
        for z in ambient_samples(2, 1.0) {
            if h0.value(&z) <= 1.7 {
                assert_eq!(rep.model.value(&z), 0.0);
            }
        }
        assert!(rep.vector_field_error < 1e-5, "{}", rep.vector_field_error);
        assert!(rep.slope_bound_holds());
    }

    #[test]
    fn reparam_limits() {
        let h0 = radial_test_model();
        assert!(reparametrize(&h0, 2.0, 0.1).unwrap().rho.is_none());
        assert!(matches!(reparametrize(&h0, 2.5, 0.1), Err(Error::AlphaTooLarge { .. })));
    }

    #[test]
    fn weinstein_basics() {
        let f = ChartFunction::Radial(RadialProfile::with_max(0.4, 0.05, 0.5, 0.05).unwrap());
        let m = weinstein_extend(f, 0.5, 1.0, 2).unwrap();
        assert!((max_value(&m) - 0.4).abs() < 1e-12);
        assert_eq!(m.value(&[0.0, 0.5]), 0.4);
        assert_eq!(m.value(&[0.0, 1.0]), 0.0);
        assert!(matches!(
            weinstein_extend(ChartFunction::Radial(RadialProfile::new(0.0, vec![]).unwrap()), 1.0, 0.5, 2),
            Err(Error::ProfileInvalid(_))
        ));
    }

    #[test]
    fn product_substitutions() {
        let base = radial_test_model();
        let p = circle_product(&base, 0.1).unwrap();
        let m = 2.0;
        let r = (0.1 / std::f64::consts::PI).sqrt();
        // beta = 1 on the circle: H~ = H
        let z = [0.3, r, 0.0, 0.0];
        assert!((p.value(&z) - base.value(&[0.3, 0.0])).abs() < 1e-14);
        // outside supp beta: H~ = m
        assert_eq!(p.value(&[0.3, 1.0, 0.1, 0.0]), m);
        assert_eq!(max_value(&p), m);
    }

    #[test]
    fn capacity_bound_scales_quadratically() {
        let one = radial_capacity_lower_bound(1.0, 0.99).unwrap();
        assert!(one.report.is_admissible(), "{}", one.report.render());
        assert!(one.value >= 0.95 * std::f64::consts::FRAC_PI_2);
        let two = radial_capacity_lower_bound(2.0, 0.99).unwrap();
        assert!((two.value - 4.0 * one.value).abs() < 1e-12);
    }
}
