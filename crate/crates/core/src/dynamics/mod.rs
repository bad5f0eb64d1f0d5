//! Autonomous Hamiltonian dynamics on `R^{2n}` with coordinates
//! `z = (x1..xn, y1..yn)`, `omega = sum dx_i ^ dy_i`, and
//! `x' = -dH/dy`, `y' = dH/dx`.

pub mod admissible;
pub mod chords;
pub mod constructions;
pub mod expr;
pub mod integrator;
pub mod profile;

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use expr::Expr;
use profile::{Cutoff, RadialProfile, Rho};

/// A function on the `x`-chart of a Lagrangian, for Weinstein extensions.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartFunction {
    /// `f(x) = h(|x|^2)`.
    Radial(RadialProfile),
    /// An expression in `x1..xn`.
    Expr(Expr),
}

impl ChartFunction {
    fn eval_grad(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        match self {
            ChartFunction::Radial(p) => {
                let rho: f64 = x.iter().map(|v| v * v).sum();
                if let Some(g) = grad {
                    let d = 2.0 * p.h_prime(rho);
                    for (gi, xi) in g.iter_mut().zip(x) {
                        *gi = d * xi;
                    }
                }
                p.h(rho)
            }
            ChartFunction::Expr(e) => {
                // expressions are parsed over (x, y) with n = x.len(); pad y = 0
                let mut z = x.to_vec();
                z.extend(std::iter::repeat_n(0.0, x.len()));
                if let Some(g) = grad {
                    for (i, gi) in g.iter_mut().enumerate() {
                        *gi = e.diff(i).eval(&z);
                    }
                }
                e.eval(&z)
            }
        }
    }

    fn support_radius(&self) -> Option<f64> {
        match self {
            ChartFunction::Radial(p) => Some(p.support_rho().sqrt()),
            ChartFunction::Expr(_) => None,
        }
    }
}

/// Closed-form autonomous Hamiltonians.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Zero,
    Radial(RadialProfile),
    /// `expr(z) * phi(|z|)`, compactly supported by the bump.
    Custom { expr: Expr, gradient: Vec<Expr>, bump: Cutoff },
    /// `phi(|y|) f(x)` on the cotangent model `T*R^n = R^{2n}`.
    Weinstein { f: ChartFunction, cutoff: Cutoff },
    /// `(H(z') - m) beta(|w|) + m` where `z'` uses the first `n - 1`
    /// coordinate pairs and `w` the last one.
    Product { base: Box<Field>, cutoff: Cutoff, m: f64 },
    /// `rho(H) - a`.
    Reparam { base: Box<Field>, rho: Rho },
    Scaled { base: Box<Field>, factor: f64 },
}

impl Field {
    pub fn custom(expr: Expr, dim: usize, bump: Cutoff) -> Self {
        let gradient = expr.gradient(dim);
        Field::Custom { expr, gradient, bump }
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.eval(z, None)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; z.len()];
        self.eval(z, Some(&mut g));
        g
    }

    /// Value, and the gradient written into `grad` when requested.
    pub fn eval(&self, z: &[f64], grad: Option<&mut [f64]>) -> f64 {
        match self {
            Field::Zero => {
                if let Some(g) = grad {
                    g.fill(0.0);
                }
                0.0
            }
            Field::Radial(p) => {
                let rho: f64 = z.iter().map(|v| v * v).sum();
                if let Some(g) = grad {
                    let d = 2.0 * p.h_prime(rho);
                    for (gi, zi) in g.iter_mut().zip(z) {
                        *gi = d * zi;
                    }
                }
                p.h(rho)
            }
            Field::Custom { expr, gradient, bump } => {
                let r = norm(z);
                let (phi, e) = (bump.eval(r), expr.eval(z));
                if let Some(g) = grad {
                    let dphi = bump.deriv(r);
                    for (i, gi) in g.iter_mut().enumerate() {
                        let radial = if r > 0.0 { dphi * z[i] / r } else { 0.0 };
                        *gi = if phi == 0.0 { 0.0 } else { gradient[i].eval(z) * phi } + e * radial;
                    }
                }
                if phi == 0.0 {
                    0.0
                } else {
                    e * phi
                }
            }
            Field::Weinstein { f, cutoff } => {
                let n = z.len() / 2;
                let (x, y) = z.split_at(n);
                let r = norm(y);
                let phi = cutoff.eval(r);
                match grad {
                    Some(g) => {
                        let (gx, gy) = g.split_at_mut(n);
                        let fv = f.eval_grad(x, Some(gx));
                        for v in gx.iter_mut() {
                            *v *= phi;
                        }
                        let dphi = cutoff.deriv(r);
                        for (gi, yi) in gy.iter_mut().zip(y) {
                            *gi = if r > 0.0 { fv * dphi * yi / r } else { 0.0 };
                        }
                        phi * fv
                    }
                    None => phi * f.eval_grad(x, None),
                }
            }
            Field::Product { base, cutoff, m } => {
                let n = z.len() / 2;
                let bz = base_coords(z);
                let w = [z[n - 1], z[2 * n - 1]];
                let r = norm(&w);
                let beta = cutoff.eval(r);
                match grad {
                    Some(g) => {
                        let mut bg = vec![0.0; bz.len()];
                        let hv = base.eval(&bz, Some(&mut bg));
                        let k = n - 1;
                        for i in 0..k {
                            g[i] = beta * bg[i];
                            g[n + i] = beta * bg[k + i];
                        }
                        let dbeta = cutoff.deriv(r);
                        for (slot, wi) in [(n - 1, w[0]), (2 * n - 1, w[1])] {
                            g[slot] = if r > 0.0 { (hv - m) * dbeta * wi / r } else { 0.0 };
                        }
                        (hv - m) * beta + m
                    }
                    None => (base.value(&bz) - m) * beta + m,
                }
            }
            Field::Reparam { base, rho } => {
                let mut grad = grad;
                let hv = base.eval(z, grad.as_deref_mut());
                if let Some(g) = grad {
                    let d = rho.deriv(hv);
                    for gi in g.iter_mut() {
                        *gi *= d;
                    }
                }
                rho.eval(hv) - rho.a
            }
            Field::Scaled { base, factor } => {
                let mut grad = grad;
                let hv = base.eval(z, grad.as_deref_mut());
                if let Some(g) = grad {
                    for gi in g.iter_mut() {
                        *gi *= factor;
                    }
                }
                factor * hv
            }
        }
    }

    /// Radius of a ball containing the support, if the field is compactly
    /// supported.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Field::Zero => Some(0.0),
            Field::Radial(p) => Some(p.support_rho().sqrt()),
            Field::Custom { bump, .. } => Some(bump.outer),
            Field::Weinstein { f, cutoff } => f.support_radius().map(|rx| rx.hypot(cutoff.outer)),
            Field::Product { .. } => None,
            Field::Reparam { base, .. } => base.support_radius(),
            Field::Scaled { base, factor } => {
                if *factor == 0.0 {
                    Some(0.0)
                } else {
                    base.support_radius()
                }
            }
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Field::Zero => "zero",
            Field::Radial(_) => "radial",
            Field::Custom { .. } => "custom",
            Field::Weinstein { .. } => "weinstein",
            Field::Product { .. } => "product",
            Field::Reparam { .. } => "reparam",
            Field::Scaled { .. } => "scaled",
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The first `n - 1` coordinate pairs of `z`, as `(x1..x_{n-1}, y1..y_{n-1})`.
fn base_coords(z: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    z[..n - 1].iter().chain(&z[n..2 * n - 1]).copied().collect()
}

/// The Lagrangian on which chords start and end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Lagrangian {
    /// `{y = 0}`.
    RealSubspace,
    /// `{y_i = 0, i < n} x {x_n^2 + y_n^2 = radius^2}`.
    ProductCircle { radius: f64 },
    /// `{x_i^2 + y_i^2 = radii_i^2}`.
    Torus { radii: Vec<f64> },
}

impl Lagrangian {
    /// Defining functions, all zero exactly on `L`.
    pub fn defining(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len() / 2;
        match self {
            Lagrangian::RealSubspace => z[n..].to_vec(),
            Lagrangian::ProductCircle { radius } => {
                let mut g = z[n..2 * n - 1].to_vec();
                g.push(z[n - 1].powi(2) + z[2 * n - 1].powi(2) - radius * radius);
                g
            }
            Lagrangian::Torus { radii } => {
                (0..n).map(|i| z[i].powi(2) + z[n + i].powi(2) - radii[i] * radii[i]).collect()
            }
        }
    }

    pub fn distance_proxy(&self, z: &[f64]) -> f64 {
        norm(&self.defining(z))
    }

    /// Tangential gradient of `H` along `L` at a point of `L`.
    pub fn tangential_gradient(&self, z: &[f64], grad: &[f64]) -> Vec<f64> {
        let n = z.len() / 2;
        match self {
            Lagrangian::RealSubspace => grad[..n].to_vec(),
            Lagrangian::ProductCircle { .. } => {
                let mut t = grad[..n - 1].to_vec();
                t.push(-z[2 * n - 1] * grad[n - 1] + z[n - 1] * grad[2 * n - 1]);
                t
            }
            Lagrangian::Torus { .. } => (0..n).map(|i| -z[n + i] * grad[i] + z[i] * grad[n + i]).collect(),
        }
    }

    /// Points of `L` with base coordinates on a grid of `grid` points per
    /// axis in `[-extent, extent]` and circle angles on `grid` points.
    pub fn seeds(&self, dim: usize, extent: f64, grid: usize) -> Vec<Vec<f64>> {
        let n = dim / 2;
        let lin = |k: usize| if grid == 1 { 0.0 } else { -extent + 2.0 * extent * k as f64 / (grid - 1) as f64 };
        let ang = |k: usize| 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / grid as f64;
        let axes: usize = match self {
            Lagrangian::RealSubspace => n,
            Lagrangian::ProductCircle { .. } => n,
            Lagrangian::Torus { .. } => n,
        };
        let total = grid.pow(axes as u32);
        let mut out = Vec::with_capacity(total);
        for mut k in 0..total {
            let mut idx = Vec::with_capacity(axes);
            for _ in 0..axes {
                idx.push(k % grid);
                k /= grid;
            }
            let mut z = vec![0.0; dim];
            match self {
                Lagrangian::RealSubspace => {
                    for i in 0..n {
                        z[i] = lin(idx[i]);
                    }
                }
                Lagrangian::ProductCircle { radius } => {
                    for i in 0..n - 1 {
                        z[i] = lin(idx[i]);
                    }
                    let th = ang(idx[n - 1]);
                    z[n - 1] = radius * th.cos();
                    z[2 * n - 1] = radius * th.sin();
                }
                Lagrangian::Torus { radii } => {
                    for i in 0..n {
                        let th = ang(idx[i]);
                        z[i] = radii[i] * th.cos();
                        z[n + i] = radii[i] * th.sin();
                    }
                }
            }
            out.push(z);
        }
        out
    }
}

/// A Hamiltonian on `R^dim` together with its Lagrangian.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianModel {
    pub dim: usize,
    pub field: Field,
    pub lagrangian: Lagrangian,
    /// Half-width of the seed box on `L` when the field is not compactly
    /// supported.
    pub scan_extent: Option<f64>,
}

impl HamiltonianModel {
    pub fn new(dim: usize, field: Field, lagrangian: Lagrangian) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Input(format!("phase space dimension {dim} must be even and positive")));
        }
        let n = dim / 2;
        match &lagrangian {
            Lagrangian::Torus { radii } if radii.len() != n => {
                return Err(Error::Input(format!("torus needs {n} radii, got {}", radii.len())));
            }
            Lagrangian::ProductCircle { radius } if *radius <= 0.0 => {
                return Err(Error::Input("circle radius must be positive".into()));
            }
            _ => {}
        }
        if matches!(field, Field::Product { .. }) && n < 2 {
            return Err(Error::Input("product models need dim >= 4".into()));
        }
        Ok(Self { dim, field, lagrangian, scan_extent: None })
    }

    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.field.value(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        self.field.gradient(z)
    }

    /// `X_H = (-dH/dy, dH/dx)`.
    pub fn vector_field(&self, z: &[f64], out: &mut [f64]) {
        let g = self.field.gradient(z);
        let n = self.n();
        for i in 0..n {
            out[i] = -g[n + i];
            out[n + i] = g[i];
        }
    }

    /// Extent of the seed grid on `L`.
    pub fn seed_extent(&self) -> f64 {
        self.field.support_radius().or(self.scan_extent).unwrap_or(1.0)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::error::read_file(path)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let file: ModelFile = serde_json::from_value(v.clone())?;
        let n = file.dim / 2;
        if file.dim == 0 || !file.dim.is_multiple_of(2) {
            return Err(Error::Input(format!("phase space dimension {} must be even and positive", file.dim)));
        }
        let params = file.params.unwrap_or(Value::Null);
        let field = match file.family.as_str() {
            "zero" => Field::Zero,
            "radial" => {
                let p: RadialProfile = serde_json::from_value(params)?;
                p.check()?;
                Field::Radial(p)
            }
            "custom" => {
                let p: CustomParams = serde_json::from_value(params)?;
                let src = file.expression.ok_or_else(|| Error::Input("custom family needs an expression".into()))?;
                let bump = Cutoff::new(p.bump.inner, p.bump.outer)?;
                Field::custom(Expr::parse(&src, n)?, file.dim, bump)
            }
            "weinstein" => {
                let p: WeinsteinParams = serde_json::from_value(params)?;
                let f = match (p.f_radial, file.expression) {
                    (Some(r), None) => {
                        r.check()?;
                        ChartFunction::Radial(r)
                    }
                    (None, Some(src)) => ChartFunction::Expr(Expr::parse(&src, n)?),
                    _ => return Err(Error::Input("weinstein family needs exactly one of f_radial or expression".into())),
                };
                Field::Weinstein { f, cutoff: Cutoff::new(p.cutoff.inner, p.cutoff.outer)? }
            }
            "product" => {
                let p: ProductParams = serde_json::from_value(params)?;
                let base = Self::from_value(&p.base)?;
                if base.dim + 2 != file.dim {
                    return Err(Error::Input("product base must have dimension dim - 2".into()));
                }
                Field::Product { base: Box::new(base.field), cutoff: Cutoff::new(p.cutoff.inner, p.cutoff.outer)?, m: p.m }
            }
            "reparam" => {
                let p: ReparamParams = serde_json::from_value(params)?;
                let base = Self::from_value(&p.base)?;
                Field::Reparam { base: Box::new(base.field), rho: Rho::new(p.rho.a, p.rho.b, p.rho.eta)? }
            }
            "scaled" => {
                let p: ScaledParams = serde_json::from_value(params)?;
                let base = Self::from_value(&p.base)?;
                Field::Scaled { base: Box::new(base.field), factor: p.factor }
            }
            other => return Err(Error::Input(format!("unknown family '{other}'"))),
        };
        let mut model = Self::new(file.dim, field, file.lagrangian)?;
        model.scan_extent = file.scan_extent;
        Ok(model)
    }

    pub fn to_value(&self) -> Value {
        let (family, params, expression) = field_json(&self.field, self.dim);
        let mut v = json!({
            "dim": self.dim,
            "family": family,
            "params": params,
            "lagrangian": serde_json::to_value(&self.lagrangian).expect("lagrangian serializes"),
        });
        if let Some(e) = expression {
            v["expression"] = Value::String(e);
        }
        if let Some(s) = self.scan_extent {
            v["scan_extent"] = json!(s);
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("model serializes")
    }
}

fn field_json(field: &Field, dim: usize) -> (&'static str, Value, Option<String>) {
    let n = dim / 2;
    let sub = |base: &Field, d: usize| {
        HamiltonianModel { dim: d, field: base.clone(), lagrangian: Lagrangian::RealSubspace, scan_extent: None }.to_value()
    };
    match field {
        Field::Zero => ("zero", Value::Null, None),
        Field::Radial(p) => ("radial", serde_json::to_value(p).expect("profile serializes"), None),
        Field::Custom { expr, bump, .. } => ("custom", json!({ "bump": bump }), Some(expr.render(n))),
        Field::Weinstein { f, cutoff } => match f {
            ChartFunction::Radial(p) => ("weinstein", json!({ "cutoff": cutoff, "f_radial": p }), None),
            ChartFunction::Expr(e) => ("weinstein", json!({ "cutoff": cutoff }), Some(e.render(n))),
        },
        Field::Product { base, cutoff, m } => ("product", json!({ "base": sub(base, dim - 2), "cutoff": cutoff, "m": m }), None),
        Field::Reparam { base, rho } => ("reparam", json!({ "base": sub(base, dim), "rho": rho }), None),
        Field::Scaled { base, factor } => ("scaled", json!({ "base": sub(base, dim), "factor": factor }), None),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dim: usize,
    family: String,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    expression: Option<String>,
    lagrangian: Lagrangian,
    #[serde(default)]
    scan_extent: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomParams {
    bump: Cutoff,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeinsteinParams {
    cutoff: Cutoff,
    #[serde(default)]
    f_radial: Option<RadialProfile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    base: Value,
    cutoff: Cutoff,
    m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReparamParams {
    base: Value,
    rho: Rho,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaledParams {
    base: Value,
    factor: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use profile::SmoothBox;

    fn fd_grad(f: &Field, z: &[f64]) -> Vec<f64> {
        (0..z.len())
            .map(|i| {
                let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
                zp[i] += 1e-6;
                zm[i] -= 1e-6;
                (f.value(&zp) - f.value(&zm)) / 2e-6
            })
            .collect()
    }

    fn radial() -> Field {
        Field::Radial(RadialProfile::with_max(1.0, 0.1, 1.0, 0.1).unwrap())
    }

    #[test]
    fn gradients_match_finite_differences() {
        let fields = vec![
            radial(),
            Field::custom(Expr::parse("1 - x1^2 + x1*y1", 1).unwrap(), 2, Cutoff::new(0.5, 1.0).unwrap()),
            Field::Weinstein {
                f: ChartFunction::Radial(RadialProfile::with_max(0.5, 0.05, 0.6, 0.05).unwrap()),
                cutoff: Cutoff::new(0.5, 1.0).unwrap(),
            },
            Field::Reparam { base: Box::new(radial()), rho: Rho::new(0.5, 0.75, 0.1).unwrap() },
            Field::Scaled { base: Box::new(radial()), factor: 0.4 },
        ];
        let z = [0.31, 0.52];
        for f in &fields {
            let (g, fd) = (f.gradient(&z), fd_grad(f, &z));
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{}: {a} vs {b}", f.family());
            }
        }
        let p = Field::Product { base: Box::new(radial()), cutoff: Cutoff::new(0.2, 0.3).unwrap(), m: 1.0 };
        let z = [0.3, 0.1, 0.2, 0.22];
        let (g, fd) = (p.gradient(&z), fd_grad(&p, &z));
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6, "product: {a} vs {b}");
        }
    }

    #[test]
    fn json_round_trip() {
        let m = HamiltonianModel::new(
            4,
            Field::Product {
                base: Box::new(Field::Radial(RadialProfile::new(1.0, vec![SmoothBox { lo: 0.1, hi: 1.0, ramp: 0.1 }]).unwrap())),
                cutoff: Cutoff::new(0.2, 0.3).unwrap(),
                m: 0.8,
            },
            Lagrangian::ProductCircle { radius: 0.15 },
        )
        .unwrap();
        let back = HamiltonianModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let c = HamiltonianModel::new(
            2,
            Field::custom(Expr::parse("1 - x1^2", 1).unwrap(), 2, Cutoff::new(0.5, 1.0).unwrap()),
            Lagrangian::RealSubspace,
        )
        .unwrap();
        let back = HamiltonianModel::from_json(&c.to_json()).unwrap();
        assert_eq!(back.value(&[0.2, 0.1]), c.value(&[0.2, 0.1]));
    }

    #[test]
    fn lagrangian_seeds_lie_on_l() {
        for (lag, dim) in [
            (Lagrangian::RealSubspace, 4),
            (Lagrangian::ProductCircle { radius: 0.3 }, 4),
            (Lagrangian::Torus { radii: vec![0.5, 0.7] }, 4),
        ] {
            for z in lag.seeds(dim, 1.0, 5) {
                assert!(lag.distance_proxy(&z) < 1e-14);
            }
        }
    }
}
