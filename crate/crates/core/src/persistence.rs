//! Window homology `HF^(a,b)` and the maps between windows: inclusions,
//! the connecting map of the exact triangle, multiplication by `t`, the
//! collar-shrinking isomorphism, barcodes, and death actions.
//!
//! Everything is computed by the column reduction in [`crate::gf2`]. A basis
//! of homology is read off the reduction: the cycles `V_j` for columns `j`
//! with `R_j = 0` that are not the pivot of another column. Together with
//! the nonzero columns of `R` they have pairwise distinct pivots, which is
//! what [`WindowHomology::coordinates`] eliminates against.

use std::collections::BTreeMap;

use crate::complex::{Chain, FilteredComplex, Monomial};
use crate::error::{Error, Result};
use crate::gf2::{self, BitColumn, Reduction};
use crate::laurent::ACTION_EPS;
use crate::window::{Spectrum, Window, WindowComplex};

#[derive(Clone, Copy, Debug)]
enum Pivot {
    Boundary(usize),
    Class(usize),
}

/// Homology of a window complex with a chosen basis of cycle
/// representatives.
#[derive(Clone, Debug)]
pub struct WindowHomology {
    complex: WindowComplex,
    reduction: Reduction,
    /// Column indices `j` whose `V_j` represents a basis class.
    classes: Vec<usize>,
    pivots: Vec<Option<Pivot>>,
}

impl WindowHomology {
    pub fn of(complex: WindowComplex) -> Self {
        let n = complex.len();
        let reduction = Reduction::new(&complex.boundary_matrix(), n);
        let mut pivots = vec![None; n];
        for (k, col) in reduction.r.iter().enumerate() {
            if let Some(p) = col.pivot() {
                pivots[p] = Some(Pivot::Boundary(k));
            }
        }
        let mut classes = Vec::new();
        for j in 0..n {
            if reduction.r[j].is_zero() && reduction.pivot_owner[j].is_none() {
                pivots[j] = Some(Pivot::Class(classes.len()));
                classes.push(j);
            }
        }
        // classes sorted by (degree, filtration position) for stable matrices
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&c| (complex.degree(classes[c]), classes[c]));
        let classes: Vec<usize> = order.iter().map(|&c| classes[c]).collect();
        for (c, &j) in classes.iter().enumerate() {
            pivots[j] = Some(Pivot::Class(c));
        }
        Self { complex, reduction, classes, pivots }
    }

    pub fn window(&self) -> Window {
        self.complex.window()
    }

    pub fn complex(&self) -> &WindowComplex {
        &self.complex
    }

    /// Number of basis classes.
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn class_degree(&self, c: usize) -> i64 {
        self.complex.degree(self.classes[c])
    }

    pub fn class_degrees(&self) -> Vec<i64> {
        (0..self.dim()).map(|c| self.class_degree(c)).collect()
    }

    /// Rank per degree; degrees with rank 0 are omitted.
    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for c in 0..self.dim() {
            *out.entry(self.class_degree(c)).or_insert(0) += 1;
        }
        out
    }

    pub fn rank_in_degree(&self, d: i64) -> usize {
        self.ranks().get(&d).copied().unwrap_or(0)
    }

    /// True iff the homology is `Z/2` concentrated in degree `d`.
    pub fn is_z2_in_degree(&self, d: i64) -> bool {
        self.dim() == 1 && self.class_degree(0) == d
    }

    /// The cycle representing basis class `c`, as a vector of the window
    /// complex.
    pub fn representative(&self, c: usize) -> &BitColumn {
        &self.reduction.v[self.classes[c]]
    }

    pub fn representative_monomials(&self, c: usize) -> Vec<Monomial> {
        self.complex.labels_of(self.representative(c))
    }

    /// Coordinates of a cycle in the class basis. Errors if `v` is not a
    /// cycle of the window complex.
    pub fn coordinates(&self, v: &BitColumn) -> Result<BitColumn> {
        let mut x = v.clone();
        let mut coords = BitColumn::zeros(self.dim());
        while let Some(p) = x.pivot() {
            match self.pivots[p] {
                Some(Pivot::Boundary(k)) => x.xor_assign(&self.reduction.r[k]),
                Some(Pivot::Class(c)) => {
                    x.xor_assign(self.representative(c));
                    coords.flip(c);
                }
                None => return Err(Error::NotACycle),
            }
        }
        Ok(coords)
    }

    /// True iff `v` is a boundary in this window complex.
    pub fn is_boundary(&self, v: &BitColumn) -> Result<bool> {
        Ok(self.coordinates(v)?.is_zero())
    }

    pub fn render_ranks(&self) -> String {
        let ranks = self.ranks();
        if ranks.is_empty() {
            return "0".into();
        }
        ranks.iter().map(|(d, r)| format!("(Z/2)^{r}[{d}]")).collect::<Vec<_>>().join(" + ")
    }

    pub fn ranks_csv(&self) -> String {
        let mut s = String::from("degree,rank\n");
        for (d, r) in self.ranks() {
            s.push_str(&format!("{d},{r}\n"));
        }
        s
    }
}

/// Homology of `CF^(a,b)`.
pub fn window_homology(cx: &FilteredComplex, w: Window) -> Result<WindowHomology> {
    Ok(WindowHomology::of(cx.window_complex(w)?))
}

/// A linear map between homology groups in the chosen class bases.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapOnHomology {
    pub src_degrees: Vec<i64>,
    pub tgt_degrees: Vec<i64>,
    /// Image of each source class, in target coordinates.
    pub columns: Vec<BitColumn>,
    /// Degree change of the map (0 for inclusions, -1 for the connecting map).
    pub degree_shift: i64,
}

impl LinearMapOnHomology {
    pub fn identity(degrees: Vec<i64>) -> Self {
        let n = degrees.len();
        Self {
            src_degrees: degrees.clone(),
            tgt_degrees: degrees,
            columns: (0..n).map(|i| BitColumn::unit(n, i)).collect(),
            degree_shift: 0,
        }
    }

    pub fn rank(&self) -> usize {
        gf2::rank(&self.columns)
    }

    /// Rank of the restriction to source degree `d`.
    pub fn rank_from_degree(&self, d: i64) -> usize {
        let cols: Vec<BitColumn> = self
            .columns
            .iter()
            .zip(&self.src_degrees)
            .filter(|(_, &sd)| sd == d)
            .map(|(c, _)| c.clone())
            .collect();
        gf2::rank(&cols)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BitColumn::is_zero)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.src_degrees.len() == self.tgt_degrees.len() && self.rank() == self.src_degrees.len()
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &LinearMapOnHomology) -> Result<LinearMapOnHomology> {
        if self.tgt_degrees != after.src_degrees {
            return Err(Error::Precondition("composed maps do not share a homology basis".into()));
        }
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let mut out = BitColumn::zeros(after.tgt_degrees.len());
                for i in c.ones() {
                    out.xor_assign(&after.columns[i]);
                }
                out
            })
            .collect();
        Ok(LinearMapOnHomology {
            src_degrees: self.src_degrees.clone(),
            tgt_degrees: after.tgt_degrees.clone(),
            columns,
            degree_shift: self.degree_shift + after.degree_shift,
        })
    }

    /// Dense matrix `rows x cols` (target classes x source classes).
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.tgt_degrees.len())
            .map(|i| self.columns.iter().map(|c| u8::from(c.get(i))).collect())
            .collect()
    }
}

/// Pushes every class of `src` through a chain-level map and expresses the
/// result in the class basis of `tgt`. `image` returns the image chain of one
/// basis monomial of the source window complex, as `(monomial, action)`
/// pairs in the target's ambient complex.
pub fn induced_map<F>(src: &WindowHomology, tgt: &WindowHomology, degree_shift: i64, image: F) -> Result<LinearMapOnHomology>
where
    F: Fn(Monomial) -> Vec<(Monomial, f64)>,
{
    let mut columns = Vec::with_capacity(src.dim());
    for c in 0..src.dim() {
        let mut acc: BTreeMap<Monomial, f64> = BTreeMap::new();
        for m in src.representative_monomials(c) {
            for (y, act) in image(m) {
                if acc.remove(&y).is_none() {
                    acc.insert(y, act);
                }
            }
        }
        let v = tgt.complex().project(acc)?;
        columns.push(tgt.coordinates(&v)?);
    }
    Ok(LinearMapOnHomology {
        src_degrees: src.class_degrees(),
        tgt_degrees: tgt.class_degrees(),
        columns,
        degree_shift,
    })
}

fn inclusion_between(cx: &FilteredComplex, h1: &WindowHomology, h2: &WindowHomology) -> Result<LinearMapOnHomology> {
    induced_map(h1, h2, 0, |m| vec![(m, cx.action(m))])
}

/// The map `HF^(w1) -> HF^(w2)` induced by inclusion, for `w1 <= w2`.
pub fn inclusion_map(cx: &FilteredComplex, w1: Window, w2: Window) -> Result<LinearMapOnHomology> {
    if !w1.precedes(w2) {
        return Err(Error::NotComparable(w1.a, w1.b, w2.a, w2.b));
    }
    let h1 = window_homology(cx, w1)?;
    let h2 = window_homology(cx, w2)?;
    inclusion_between(cx, &h1, &h2)
}

/// Exactness data at one node of the triangle in one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeCheck {
    pub node: &'static str,
    pub degree: i64,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composite_zero: bool,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct TriangleReport {
    pub cuts: (f64, f64, f64),
    pub ab: BTreeMap<i64, usize>,
    pub ac: BTreeMap<i64, usize>,
    pub bc: BTreeMap<i64, usize>,
    pub iota_ab_ac: LinearMapOnHomology,
    pub iota_ac_bc: LinearMapOnHomology,
    pub delta: LinearMapOnHomology,
    pub checks: Vec<NodeCheck>,
}

impl TriangleReport {
    pub fn is_exact(&self) -> bool {
        self.checks.iter().all(|c| c.exact)
    }

    pub fn render(&self) -> String {
        let (a, b, c) = self.cuts;
        let fmt = |r: &BTreeMap<i64, usize>| {
            if r.is_empty() {
                "0".to_string()
            } else {
                r.iter().map(|(d, k)| format!("{d}:{k}")).collect::<Vec<_>>().join(" ")
            }
        };
        let mut s = format!("cuts {a} < {b} < {c}\n");
        s.push_str(&format!("HF({a},{b}) ranks {}\n", fmt(&self.ab)));
        s.push_str(&format!("HF({a},{c}) ranks {}\n", fmt(&self.ac)));
        s.push_str(&format!("HF({b},{c}) ranks {}\n", fmt(&self.bc)));
        s.push_str(&format!(
            "rank iota_ab->ac = {}, rank iota_ac->bc = {}, rank delta = {}\n",
            self.iota_ab_ac.rank(),
            self.iota_ac_bc.rank(),
            self.delta.rank()
        ));
        for ch in &self.checks {
            s.push_str(&format!(
                "node {} degree {}: dim {} rank_in {} rank_out {} composite_zero {} -> {}\n",
                ch.node,
                ch.degree,
                ch.dim,
                ch.rank_in,
                ch.rank_out,
                ch.composite_zero,
                if ch.exact { "exact" } else { "NOT EXACT" }
            ));
        }
        s
    }
}

fn composite_zero_from_degree(first: &LinearMapOnHomology, second: &LinearMapOnHomology, d: i64) -> Result<bool> {
    let comp = first.then(second)?;
    Ok(comp.columns.iter().zip(&comp.src_degrees).filter(|(_, &sd)| sd == d).all(|(c, _)| c.is_zero()))
}

/// Computes `HF(a,b) -> HF(a,c) -> HF(b,c) -> HF(a,b)[-1]` and checks
/// exactness at every node in every degree.
pub fn exact_triangle(cx: &FilteredComplex, a: f64, b: f64, c: f64) -> Result<TriangleReport> {
    if !(a < b && b < c) {
        return Err(Error::Precondition(format!("cuts must satisfy a < b < c, got {a}, {b}, {c}")));
    }
    let h_ab = window_homology(cx, Window::new(a, b)?)?;
    let h_ac = window_homology(cx, Window::new(a, c)?)?;
    let h_bc = window_homology(cx, Window::new(b, c)?)?;
    let i1 = inclusion_between(cx, &h_ab, &h_ac)?;
    let i2 = inclusion_between(cx, &h_ac, &h_bc)?;
    let delta = connecting_map(cx, &h_bc, &h_ab)?;

    let mut degrees: Vec<i64> = h_ab
        .class_degrees()
        .into_iter()
        .chain(h_ac.class_degrees())
        .chain(h_bc.class_degrees())
        .chain(h_bc.class_degrees().into_iter().map(|d| d - 1))
        .collect();
    degrees.sort_unstable();
    degrees.dedup();

    let mut checks = Vec::new();
    for &d in &degrees {
        // node HF(a,c)_d: in i1 from HF(a,b)_d, out i2
        let dim = h_ac.rank_in_degree(d);
        let (rin, rout) = (i1.rank_from_degree(d), i2.rank_from_degree(d));
        let cz = composite_zero_from_degree(&i1, &i2, d)?;
        checks.push(NodeCheck { node: "HF(a,c)", degree: d, dim, rank_in: rin, rank_out: rout, composite_zero: cz, exact: cz && rin + rout == dim });
        // node HF(b,c)_d: in i2 from HF(a,c)_d, out delta to HF(a,b)_{d-1}
        let dim = h_bc.rank_in_degree(d);
        let (rin, rout) = (i2.rank_from_degree(d), delta.rank_from_degree(d));
        let cz = composite_zero_from_degree(&i2, &delta, d)?;
        checks.push(NodeCheck { node: "HF(b,c)", degree: d, dim, rank_in: rin, rank_out: rout, composite_zero: cz, exact: cz && rin + rout == dim });
        // node HF(a,b)_d: in delta from HF(b,c)_{d+1}, out i1
        let dim = h_ab.rank_in_degree(d);
        let (rin, rout) = (delta.rank_from_degree(d + 1), i1.rank_from_degree(d));
        let cz = composite_zero_from_degree(&delta, &i1, d + 1)?;
        checks.push(NodeCheck { node: "HF(a,b)", degree: d, dim, rank_in: rin, rank_out: rout, composite_zero: cz, exact: cz && rin + rout == dim });
    }
    let report = TriangleReport {
        cuts: (a, b, c),
        ab: h_ab.ranks(),
        ac: h_ac.ranks(),
        bc: h_bc.ranks(),
        iota_ab_ac: i1,
        iota_ac_bc: i2,
        delta,
        checks,
    };
    if let Some(bad) = report.checks.iter().find(|c| !c.exact) {
        return Err(Error::NotExact { node: bad.node, degree: bad.degree });
    }
    Ok(report)
}

/// `delta: HF(b,c) -> HF(a,b)`: lift a cycle of `(b,c)` to `(a,c)`, apply
/// the differential, and read the result in `(a,b)`.
fn connecting_map(cx: &FilteredComplex, h_bc: &WindowHomology, h_ab: &WindowHomology) -> Result<LinearMapOnHomology> {
    let mut columns = Vec::with_capacity(h_bc.dim());
    for c in 0..h_bc.dim() {
        let z = Chain::from_monomials(h_bc.representative_monomials(c));
        let dz = cx.boundary(&z);
        let v = h_ab.complex().project(dz.monomials().map(|m| (m, cx.action(m))))?;
        columns.push(h_ab.coordinates(&v)?);
    }
    Ok(LinearMapOnHomology {
        src_degrees: h_bc.class_degrees(),
        tgt_degrees: h_ab.class_degrees(),
        columns,
        degree_shift: -1,
    })
}

/// Outcome of an isomorphism check between two window homologies.
#[derive(Clone, Debug)]
pub struct IsomorphismReport {
    pub source: BTreeMap<i64, usize>,
    pub target: BTreeMap<i64, usize>,
    pub maps: Vec<LinearMapOnHomology>,
    pub degree_shift: i64,
    pub is_isomorphism: bool,
}

impl IsomorphismReport {
    pub fn render(&self) -> String {
        let fmt = |r: &BTreeMap<i64, usize>| {
            if r.is_empty() {
                "0".to_string()
            } else {
                r.iter().map(|(d, k)| format!("{d}:{k}")).collect::<Vec<_>>().join(" ")
            }
        };
        format!(
            "source ranks {}\ntarget ranks {}\ndegree shift {}\nisomorphism: {}\n",
            fmt(&self.source),
            fmt(&self.target),
            self.degree_shift,
            if self.is_isomorphism { "yes" } else { "NO" }
        )
    }
}

/// Multiplication by `t^k` as a map `HF(a,b) -> HF(a - k a0, b - k a0)`.
pub fn t_power_map(cx: &FilteredComplex, w: Window, k: i64) -> Result<LinearMapOnHomology> {
    let shifted = w.shifted(-(k as f64) * cx.a0());
    let h = window_homology(cx, w)?;
    let ht = window_homology(cx, shifted)?;
    let shift = -(k * i64::from(cx.params().n_l()));
    induced_map(&h, &ht, shift, |m| {
        let y = m.shift(k);
        vec![(y, cx.action(y))]
    })
}

/// Verifies that `t: HF(a,b) -> HF(a - a0, b - a0)` is an isomorphism that
/// lowers degree by `N_L`.
pub fn t_shift(cx: &FilteredComplex, w: Window) -> Result<IsomorphismReport> {
    let fwd = t_power_map(cx, w, 1)?;
    let back = t_power_map(cx, w.shifted(-cx.a0()), -1)?;
    let round = fwd.then(&back)?;
    let n_l = i64::from(cx.params().n_l());
    let degrees_ok = fwd
        .src_degrees
        .iter()
        .zip(&fwd.columns)
        .all(|(&d, col)| col.ones().all(|i| fwd.tgt_degrees[i] == d - n_l));
    let is_iso = fwd.is_isomorphism() && round == LinearMapOnHomology::identity(fwd.src_degrees.clone()) && degrees_ok;
    Ok(IsomorphismReport {
        source: window_homology(cx, w)?.ranks(),
        target: window_homology(cx, w.shifted(-cx.a0()))?.ranks(),
        maps: vec![fwd, back],
        degree_shift: -n_l,
        is_isomorphism: is_iso,
    })
}

/// `HF(a,b) ≅ HF(a',b')` when `[a,a']` and `[b',b]` miss the spectrum,
/// verified through the two inclusions into `HF(a',b)`.
pub fn shrink_window(cx: &FilteredComplex, a: f64, a1: f64, b1: f64, b: f64) -> Result<IsomorphismReport> {
    if !(a <= a1 && a1 < b1 && b1 <= b) {
        return Err(Error::Precondition(format!("need a <= a' < b' <= b, got {a}, {a1}, {b1}, {b}")));
    }
    let spec = cx.spectrum();
    if spec.intersects_closed(a, a1) {
        return Err(Error::SpectrumInCollar(a, a1));
    }
    if spec.intersects_closed(b1, b) {
        return Err(Error::SpectrumInCollar(b1, b));
    }
    let outer = window_homology(cx, Window::new(a, b)?)?;
    let inner = window_homology(cx, Window::new(a1, b1)?)?;
    let mid = window_homology(cx, Window::new(a1, b)?)?;
    let left = inclusion_between(cx, &outer, &mid)?;
    let right = inclusion_between(cx, &inner, &mid)?;
    let is_iso = left.is_isomorphism() && right.is_isomorphism();
    Ok(IsomorphismReport {
        source: outer.ranks(),
        target: inner.ranks(),
        maps: vec![left, right],
        degree_shift: 0,
        is_isomorphism: is_iso,
    })
}

/// One bar of the action-filtered persistence of the periodic complex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
    pub degree: i64,
}

/// Bars born inside a fundamental domain. The full barcode is their orbit
/// under `(birth, death, degree) -> (birth - a0, death - a0, degree - N_L)`.
#[derive(Clone, Debug)]
pub struct Barcode {
    pub domain: Window,
    pub bars: Vec<Bar>,
    pub a0: f64,
    pub n_l: u32,
    /// Actions below and above which the computation was truncated.
    pub horizon: (f64, f64),
}

impl Barcode {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("birth,death,degree\n");
        for b in &self.bars {
            let death = if b.death.is_infinite() { "inf".to_string() } else { format!("{}", b.death) };
            s.push_str(&format!("{},{},{}\n", b.birth, death, b.degree));
        }
        s
    }
}

/// Largest action drop `action(x) - action(y t^r)` over differential terms,
/// at least `a0`.
fn max_drop(cx: &FilteredComplex) -> f64 {
    let mut d = cx.a0();
    for x in 0..cx.len() {
        let ax = cx.generator(x).action;
        for m in cx.differential_of(x).monomials() {
            d = d.max(ax - cx.action(m));
        }
    }
    d
}

/// Moves `v` in direction `dir` until it is at least `gap` away from the
/// spectrum.
fn off_spectrum(spec: &Spectrum, mut v: f64, dir: f64, gap: f64) -> f64 {
    while spec.distance(v) < gap {
        v += dir * gap;
    }
    v
}

/// Persistence pairing of the action filtration, reported for bars born in
/// `domain`.
pub fn barcode(cx: &FilteredComplex, domain: Window) -> Result<Barcode> {
    let spec = cx.spectrum();
    let reach = (cx.len() as f64 + 1.0) * (max_drop(cx) + cx.a0());
    let gap = (cx.a0() * 1e-3).max(10.0 * ACTION_EPS);
    let lo = off_spectrum(&spec, domain.a - reach, -1.0, gap);
    let hi = off_spectrum(&spec, domain.b + reach, 1.0, gap);
    let wc = cx.window_complex(Window::new(lo, hi)?)?;
    let red = Reduction::new(&wc.boundary_matrix(), wc.len());
    let mut bars = Vec::new();
    for (k, col) in red.r.iter().enumerate() {
        if let Some(j) = col.pivot() {
            let (birth, death) = (wc.action(j), wc.action(k));
            if domain.contains(birth) && death - birth > ACTION_EPS {
                bars.push(Bar { birth, death, degree: wc.degree(j) });
            }
        } else if red.pivot_owner[k].is_none() && domain.contains(wc.action(k)) {
            bars.push(Bar { birth: wc.action(k), death: f64::INFINITY, degree: wc.degree(k) });
        }
    }
    bars.sort_by(|x, y| x.birth.total_cmp(&y.birth).then(x.degree.cmp(&y.degree)).then(x.death.total_cmp(&y.death)));
    Ok(Barcode { domain, bars, a0: cx.a0(), n_l: cx.params().n_l(), horizon: (lo, hi) })
}

/// Infimal action level at which a cycle becomes a boundary, with a
/// primitive realizing it.
#[derive(Clone, Debug)]
pub struct DeathReport {
    /// `-inf` for the zero class, `+inf` if the class never dies.
    pub action: f64,
    pub witness: Chain,
}

/// Finds the least `s` such that `seed` is a boundary in `CF^{<=s}`, together
/// with a primitive of action exactly `s`.
pub fn death_action(cx: &FilteredComplex, seed: &Chain) -> Result<DeathReport> {
    if seed.is_zero() {
        return Ok(DeathReport { action: f64::NEG_INFINITY, witness: Chain::zero() });
    }
    if !cx.boundary(seed).is_zero() {
        return Err(Error::NotACycle);
    }
    let spec = cx.spectrum();
    let top = cx.action_of_chain(seed);
    let bottom = seed.monomials().map(|m| cx.action(m)).fold(f64::INFINITY, f64::min);
    let reach = (cx.len() as f64 + 1.0) * (max_drop(cx) + cx.a0());
    let gap = (cx.a0() * 1e-3).max(10.0 * ACTION_EPS);
    let hi = off_spectrum(&spec, top + reach, 1.0, gap);
    let mut depth = reach;
    for _ in 0..8 {
        let lo = off_spectrum(&spec, bottom - depth, -1.0, gap);
        let wc = cx.window_complex(Window::new(lo, hi)?)?;
        let red = Reduction::new(&wc.boundary_matrix(), wc.len());
        let mut x = wc.project(seed.monomials().map(|m| (m, cx.action(m))))?;
        let mut used = BitColumn::zeros(wc.len());
        let mut last = None;
        let mut bounded = true;
        while let Some(p) = x.pivot() {
            match red.pivot_owner[p] {
                Some(k) => {
                    x.xor_assign(&red.r[k]);
                    used.xor_assign(&red.v[k]);
                    last = Some(last.map_or(k, |l: usize| l.max(k)));
                }
                None => {
                    bounded = false;
                    break;
                }
            }
        }
        if !bounded {
            return Ok(DeathReport { action: f64::INFINITY, witness: Chain::zero() });
        }
        let witness = Chain::from_monomials(wc.labels_of(&used));
        if cx.boundary(&witness) == *seed {
            let k = last.expect("nonzero seed uses a column");
            return Ok(DeathReport { action: wc.action(k), witness });
        }
        depth *= 2.0;
    }
    Err(Error::Precondition("primitive search did not stabilize under truncation".into()))
}
