//! Action windows, the action spectrum, and the finite quotient complexes
//! `CF^(a,b)`.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::complex::{FilteredComplex, Monomial};
use crate::error::{Error, Result};
use crate::gf2::BitColumn;
use crate::laurent::ACTION_EPS;

/// An open action interval `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub a: f64,
    pub b: f64,
}

impl Window {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::InvalidWindow(a, b));
        }
        Ok(Self { a, b })
    }

    /// `(a + c, b + c)`.
    pub fn shifted(self, c: f64) -> Self {
        Self { a: self.a + c, b: self.b + c }
    }

    /// The partial order `(a, b) <= (a', b')` iff `a <= a'` and `b <= b'`.
    pub fn precedes(self, other: Window) -> bool {
        self.a <= other.a && self.b <= other.b
    }

    pub fn contains(self, v: f64) -> bool {
        v > self.a && v < self.b
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", trim(self.a), trim(self.b))
    }
}

/// Nine decimals with trailing zeros removed, so that round-off in the last
/// bits does not leak into reports.
fn trim(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// The action spectrum of a complex: either `residues + a0 Z` for a
/// t-periodic complex, or a finite set of values.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    period: Option<f64>,
    points: Vec<f64>,
}

impl Spectrum {
    pub fn periodic(a0: f64, actions: impl IntoIterator<Item = f64>) -> Self {
        let mut pts: Vec<f64> = actions.into_iter().map(|v| v.rem_euclid(a0)).collect();
        pts.sort_by(f64::total_cmp);
        let mut residues: Vec<f64> = Vec::new();
        for p in pts {
            if residues.last().is_none_or(|&q| p - q > ACTION_EPS) {
                residues.push(p);
            }
        }
        if residues.len() > 1 && residues[0] + a0 - residues[residues.len() - 1] <= ACTION_EPS {
            residues.pop();
        }
        Self { period: Some(a0), points: residues }
    }

    pub fn finite(values: impl IntoIterator<Item = f64>) -> Self {
        let mut pts: Vec<f64> = values.into_iter().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= ACTION_EPS);
        Self { period: None, points: pts }
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Residues in `[0, a0)` (periodic) or the values themselves.
    pub fn residues(&self) -> &[f64] {
        &self.points
    }

    /// Membership within [`ACTION_EPS`].
    pub fn contains(&self, v: f64) -> bool {
        self.distance(v) <= ACTION_EPS
    }

    /// Distance from `v` to the nearest spectrum point (`+inf` if empty).
    pub fn distance(&self, v: f64) -> f64 {
        match self.period {
            Some(a0) => {
                let res = v.rem_euclid(a0);
                self.points
                    .iter()
                    .map(|&p| {
                        let d = (res - p).abs();
                        d.min(a0 - d)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            None => self.points.iter().map(|&p| (v - p).abs()).fold(f64::INFINITY, f64::min),
        }
    }

    /// Spectrum points in the closed interval `[lo, hi]` (widened by
    /// [`ACTION_EPS`]), in increasing order.
    pub fn points_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (lo, hi) = (lo - ACTION_EPS, hi + ACTION_EPS);
        let mut out = Vec::new();
        match self.period {
            Some(a0) => {
                let kmin = (lo / a0).floor() as i64 - 1;
                let kmax = (hi / a0).ceil() as i64 + 1;
                for k in kmin..=kmax {
                    for &p in &self.points {
                        let v = p + k as f64 * a0;
                        if v >= lo && v <= hi {
                            out.push(v);
                        }
                    }
                }
            }
            None => out.extend(self.points.iter().copied().filter(|&v| v >= lo && v <= hi)),
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn intersects_closed(&self, lo: f64, hi: f64) -> bool {
        !self.points_in(lo, hi).is_empty()
    }

    /// Errors with [`Error::EndpointInSpectrum`] if either endpoint is in the
    /// spectrum.
    pub fn check_window(&self, w: Window) -> Result<()> {
        for v in [w.a, w.b] {
            if self.contains(v) {
                return Err(Error::EndpointInSpectrum(v));
            }
        }
        Ok(())
    }
}

/// One basis element of a window complex together with its filtration data.
#[derive(Clone, Debug)]
pub struct Cell {
    pub label: Monomial,
    pub action: f64,
    pub degree: i64,
    /// Boundary terms, as labels; terms outside the window are dropped when
    /// the complex is assembled.
    pub boundary: Vec<(Monomial, f64)>,
}

/// The finite quotient complex of monomials with action in an open window,
/// ordered by `(action, degree, generator, r)`.
#[derive(Clone, Debug)]
pub struct WindowComplex {
    window: Window,
    labels: Vec<Monomial>,
    actions: Vec<f64>,
    degrees: Vec<i64>,
    columns: Vec<Vec<usize>>,
    index: HashMap<Monomial, usize>,
}

fn filtration_order(x: &Cell, y: &Cell) -> Ordering {
    x.action
        .total_cmp(&y.action)
        .then(x.degree.cmp(&y.degree))
        .then(x.label.gen.cmp(&y.label.gen))
        .then(x.label.r.cmp(&y.label.r))
}

impl WindowComplex {
    pub fn from_filtered(cx: &FilteredComplex, w: Window) -> Result<Self> {
        cx.spectrum().check_window(w)?;
        let mut cells = Vec::new();
        for gen in 0..cx.len() {
            let Some((lo, hi)) = cx.exponent_range(gen, w) else { continue };
            for r in lo..=hi {
                let m = Monomial::new(gen, r);
                let boundary = cx
                    .differential_of(gen)
                    .shift(r)
                    .monomials()
                    .map(|y| (y, cx.action(y)))
                    .collect();
                cells.push(Cell { label: m, action: cx.action(m), degree: cx.degree(m), boundary });
            }
        }
        Self::assemble(w, cells)
    }

    /// Builds a window complex from explicit cells. Every cell's action must
    /// lie in the window; boundary terms at or below `a` are dropped.
    pub fn assemble(window: Window, mut cells: Vec<Cell>) -> Result<Self> {
        cells.sort_by(filtration_order);
        let index: HashMap<Monomial, usize> = cells.iter().enumerate().map(|(i, c)| (c.label, i)).collect();
        let mut columns = Vec::with_capacity(cells.len());
        for c in &cells {
            if !window.contains(c.action) {
                return Err(Error::Precondition(format!("cell action {} outside window {window}", c.action)));
            }
            let mut col = Vec::new();
            for &(y, act) in &c.boundary {
                match index.get(&y) {
                    Some(&i) => col.push(i),
                    None if act <= window.a => {}
                    None => {
                        return Err(Error::Precondition(format!(
                            "boundary term with action {act} leaves window {window}"
                        )))
                    }
                }
            }
            col.sort_unstable();
            // Z/2: cancel repeated entries
            let mut dedup: Vec<usize> = Vec::with_capacity(col.len());
            for i in col {
                if dedup.last() == Some(&i) {
                    dedup.pop();
                } else {
                    dedup.push(i);
                }
            }
            columns.push(dedup);
        }
        Ok(Self {
            window,
            labels: cells.iter().map(|c| c.label).collect(),
            actions: cells.iter().map(|c| c.action).collect(),
            degrees: cells.iter().map(|c| c.degree).collect(),
            columns,
            index,
        })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Monomial] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Monomial {
        self.labels[i]
    }

    pub fn action(&self, i: usize) -> f64 {
        self.actions[i]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn position(&self, m: Monomial) -> Option<usize> {
        self.index.get(&m).copied()
    }

    /// Boundary of basis element `i` as sorted indices.
    pub fn column(&self, i: usize) -> &[usize] {
        &self.columns[i]
    }

    pub fn boundary_matrix(&self) -> Vec<BitColumn> {
        let n = self.len();
        self.columns.iter().map(|c| BitColumn::from_indices(n, c.iter().copied())).collect()
    }

    /// The induced differential applied to a vector of this complex.
    pub fn apply_boundary(&self, v: &BitColumn) -> BitColumn {
        let mut out = BitColumn::zeros(self.len());
        for i in v.ones() {
            for &j in &self.columns[i] {
                out.flip(j);
            }
        }
        out
    }

    /// Projects a chain of the ambient complex to this quotient: monomials at
    /// or below `a` vanish; a monomial at or above `b` is an error.
    pub fn project<I>(&self, terms: I) -> Result<BitColumn>
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut v = BitColumn::zeros(self.len());
        for (m, act) in terms {
            match self.index.get(&m) {
                Some(&i) => v.flip(i),
                None if act <= self.window.a => {}
                None => {
                    return Err(Error::Precondition(format!(
                        "chain term with action {act} does not fit below {}",
                        self.window.b
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn labels_of(&self, v: &BitColumn) -> Vec<Monomial> {
        v.ones().map(|i| self.labels[i]).collect()
    }
}
