//! Filtered chain maps with an action-shift budget, factorization checks
//! through window homology, and minimal-action primitives.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, FilteredComplex, Monomial};
use crate::error::{Error, Result};
use crate::laurent::ACTION_EPS;
use crate::persistence::{death_action, induced_map, inclusion_map, window_homology, LinearMapOnHomology};
use crate::window::Window;

/// A t-linear map `source -> target` given on generators, claimed to raise
/// action by at most `shift`.
#[derive(Clone, Debug)]
pub struct FilteredChainMap {
    pub source: Arc<FilteredComplex>,
    pub target: Arc<FilteredComplex>,
    /// `images[g]` is the image of generator `g` (at `t^0`).
    pub images: Vec<Chain>,
    pub shift: f64,
}

impl FilteredChainMap {
    pub fn new(source: Arc<FilteredComplex>, target: Arc<FilteredComplex>, images: Vec<Chain>, shift: f64) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Input(format!("map gives {} images for {} generators", images.len(), source.len())));
        }
        if let Some(bad) = images.iter().flat_map(|c| c.monomials()).find(|m| m.gen >= target.len()) {
            return Err(Error::Input(format!("image refers to unknown target generator {}", bad.gen)));
        }
        if !shift.is_finite() {
            return Err(Error::Input("shift budget must be finite".into()));
        }
        Ok(Self { source, target, images, shift })
    }

    pub fn identity(cx: Arc<FilteredComplex>) -> Self {
        let images = (0..cx.len()).map(|g| Chain::monomial(g, 0)).collect();
        Self { source: cx.clone(), target: cx, images, shift: 0.0 }
    }

    pub fn zero(source: Arc<FilteredComplex>, target: Arc<FilteredComplex>, shift: f64) -> Self {
        let images = vec![Chain::zero(); source.len()];
        Self { source, target, images, shift }
    }

    /// Builds the map from `(source id, [(target id, r)])` entries; generators
    /// without an entry map to zero.
    pub fn from_entries<'a, I>(source: Arc<FilteredComplex>, target: Arc<FilteredComplex>, shift: f64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Vec<(&'a str, i64)>)>,
    {
        let mut images = vec![Chain::zero(); source.len()];
        for (from, terms) in entries {
            let g = source.require(from)?;
            for (to, r) in terms {
                images[g].toggle(Monomial::new(target.require(to)?, r));
            }
        }
        Self::new(source, target, images, shift)
    }

    pub fn apply_monomial(&self, m: Monomial) -> Chain {
        self.images[m.gen].shift(m.r)
    }

    pub fn apply(&self, c: &Chain) -> Chain {
        let mut out = Chain::zero();
        for m in c.monomials() {
            out.add_assign_ref(&self.apply_monomial(m));
        }
        out
    }

    /// `after ∘ self`, with budget the sum of the two budgets.
    pub fn then(&self, after: &FilteredChainMap) -> Result<FilteredChainMap> {
        if !same_complex(&self.target, &after.source) {
            return Err(Error::Precondition("composed maps do not share the middle complex".into()));
        }
        let images = self.images.iter().map(|c| after.apply(c)).collect();
        Ok(FilteredChainMap {
            source: self.source.clone(),
            target: after.target.clone(),
            images,
            shift: self.shift + after.shift,
        })
    }

    /// Largest `action(y t^r) - action(g)` over all image terms; `-inf` for
    /// the zero map.
    pub fn realized_shift(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (g, img) in self.images.iter().enumerate() {
            let ag = self.source.generator(g).action;
            for m in img.monomials() {
                worst = worst.max(self.target.action(m) - ag);
            }
        }
        worst
    }

    /// The induced map `HF^(a,b)(source) -> HF^(a+C,b+C)(target)`.
    pub fn induced_on_window(&self, w: Window) -> Result<LinearMapOnHomology> {
        let hs = window_homology(&self.source, w)?;
        let ht = window_homology(&self.target, w.shifted(self.shift))?;
        induced_map(&hs, &ht, 0, |m| {
            self.apply_monomial(m).monomials().map(|y| (y, self.target.action(y))).collect()
        })
    }

    pub fn from_json_file(path: &Path) -> Result<MapFileContents> {
        let text = crate::error::read_file(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        MapFileContents::parse(&text, base)
    }
}

/// Structural equality of two complexes (same generators and differential).
pub fn same_complex(a: &FilteredComplex, b: &FilteredComplex) -> bool {
    std::ptr::eq(a, b) || a.to_json() == b.to_json()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainMapReport {
    pub budget: f64,
    pub realized_shift: f64,
}

impl ChainMapReport {
    pub fn render(&self) -> String {
        format!("chain map: ok\nbudget {}\nrealized shift {}\n", self.budget, fmt_shift(self.realized_shift))
    }
}

fn fmt_shift(s: f64) -> String {
    if s == f64::NEG_INFINITY {
        "none (zero map)".into()
    } else {
        format!("{s}")
    }
}

/// Checks `d f = f d` on every generator and the shift budget on every
/// image term.
pub fn verify_chain_map(f: &FilteredChainMap) -> Result<ChainMapReport> {
    for g in 0..f.source.len() {
        let lhs = f.target.boundary(&f.images[g]);
        let rhs = f.apply(f.source.differential_of(g));
        if lhs != rhs {
            return Err(Error::NotChainMap(f.source.generator(g).id.clone()));
        }
    }
    for (g, img) in f.images.iter().enumerate() {
        let ag = f.source.generator(g).action;
        for m in img.monomials() {
            let realized = f.target.action(m) - ag;
            if realized > f.shift + ACTION_EPS {
                return Err(Error::ShiftExceeded {
                    generator: f.source.generator(g).id.clone(),
                    realized,
                    budget: f.shift,
                });
            }
        }
    }
    Ok(ChainMapReport { budget: f.shift, realized_shift: f.realized_shift() })
}

/// One window of a homology-level factorization check.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorWindowRow {
    pub window: Window,
    pub composite_rank: usize,
    pub inclusion_rank: usize,
    pub agrees: bool,
}

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub c1: f64,
    pub c2: f64,
    /// `true` when a chain homotopy was supplied and verified.
    pub homotopy_checked: bool,
    pub rows: Vec<FactorWindowRow>,
}

impl FactorizationReport {
    pub fn render(&self) -> String {
        let mut s = format!("factorization through budget c2 - c1 = {}\n", self.c2 - self.c1);
        if self.homotopy_checked {
            s.push_str("chain homotopy: verified\n");
        }
        for r in &self.rows {
            s.push_str(&format!(
                "window {}: rank(phi psi) = {}, rank(incl) = {}, {}\n",
                r.window,
                r.composite_rank,
                r.inclusion_rank,
                if r.agrees { "equal" } else { "DIFFERENT" }
            ));
        }
        s
    }
}

/// Checks that `phi ∘ psi` agrees with the inclusion
/// `CF^{<=a} -> CF^{<=a+c2-c1}`: at chain level through `homotopy` when
/// given (`phi psi - incl = dK + Kd`, K within the same budget), otherwise on
/// the homology of every listed window.
pub fn verify_factorization(
    psi: &FilteredChainMap,
    phi: &FilteredChainMap,
    c1: f64,
    c2: f64,
    windows: &[Window],
    homotopy: Option<&[Chain]>,
) -> Result<FactorizationReport> {
    let budget = c2 - c1;
    if budget < -ACTION_EPS {
        return Err(Error::Precondition(format!("c2 - c1 = {budget} is negative")));
    }
    verify_chain_map(psi)?;
    verify_chain_map(phi)?;
    for (map, allowed) in [(psi, c2), (phi, -c1)] {
        let realized = map.realized_shift();
        if realized > allowed + ACTION_EPS {
            return Err(Error::ShiftExceeded { generator: "(map)".into(), realized, budget: allowed });
        }
    }
    if !same_complex(&psi.source, &phi.target) {
        return Err(Error::Precondition("phi must map back into the source of psi".into()));
    }
    let mut composite = psi.then(phi)?;
    composite.shift = budget;
    let cx = composite.source.clone();

    let homotopy_checked = if let Some(k) = homotopy {
        if k.len() != cx.len() {
            return Err(Error::Input(format!("homotopy gives {} images for {} generators", k.len(), cx.len())));
        }
        let kmap = FilteredChainMap::new(cx.clone(), cx.clone(), k.to_vec(), budget)?;
        for g in 0..cx.len() {
            let mut lhs = composite.images[g].clone();
            lhs.toggle(Monomial::new(g, 0));
            let rhs = cx.boundary(&kmap.images[g]).add(&kmap.apply(cx.differential_of(g)));
            if lhs != rhs {
                return Err(Error::HomotopyFails(format!(
                    "phi psi - incl != dK + Kd on {}",
                    cx.generator(g).id
                )));
            }
            let ag = cx.generator(g).action;
            for m in kmap.images[g].monomials() {
                let realized = cx.action(m) - ag;
                if realized > budget + ACTION_EPS {
                    return Err(Error::BudgetExceeded { generator: cx.generator(g).id.clone(), realized, budget });
                }
            }
        }
        true
    } else {
        false
    };

    let mut rows = Vec::new();
    for &w in windows {
        let comp = composite.induced_on_window(w)?;
        let incl = inclusion_map(&cx, w, w.shifted(budget))?;
        let agrees = comp == incl;
        rows.push(FactorWindowRow { window: w, composite_rank: comp.rank(), inclusion_rank: incl.rank(), agrees });
        if !agrees && !homotopy_checked {
            return Err(Error::HomotopyFails(format!("phi psi differs from the inclusion on HF{w}")));
        }
    }
    Ok(FactorizationReport { c1, c2, homotopy_checked, rows })
}

/// A primitive of a top class with its t-exponent structure.
#[derive(Clone, Debug)]
pub struct ChekanovReport {
    pub death: f64,
    pub witness: Chain,
    /// `(generator id, r)` for every term of the witness.
    pub exponents: Vec<(String, i64)>,
    pub all_negative: bool,
    /// Every generator degree forces a negative exponent in any primitive.
    pub degree_forced: bool,
}

/// Minimal-action `y` with `d y = class`, required to have action at most
/// `budget`.
pub fn chekanov_primitive(cx: &FilteredComplex, class: &Chain, budget: f64) -> Result<ChekanovReport> {
    if class.is_zero() {
        return Ok(ChekanovReport {
            death: f64::NEG_INFINITY,
            witness: Chain::zero(),
            exponents: Vec::new(),
            all_negative: true,
            degree_forced: true,
        });
    }
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::Precondition("budget must be positive".into()));
    }
    let degrees: Vec<i64> = class.monomials().map(|m| cx.degree(m)).collect();
    let d = degrees[0];
    if degrees.iter().any(|&x| x != d) {
        return Err(Error::Precondition("class is not homogeneous in degree".into()));
    }
    let rep = death_action(cx, class)?;
    if rep.action > budget + ACTION_EPS {
        return Err(Error::NoPrimitive { death: rep.action, budget });
    }
    let exponents: Vec<(String, i64)> = rep.witness.monomials().map(|m| (cx.generator(m.gen).id.clone(), m.r)).collect();
    let all_negative = exponents.iter().all(|(_, r)| *r < 0);
    // a term x t^r of a primitive has deg x - r N_L = d + 1
    let degree_forced = cx.generators().iter().all(|g| g.degree <= d);
    Ok(ChekanovReport { death: rep.action, witness: rep.witness, exponents, all_negative, degree_forced })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    source: String,
    target: String,
    shift: f64,
    entries: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    homotopy: Option<Vec<EntryFile>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    from: String,
    chain: Vec<ChainTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainTerm {
    to: String,
    r: i64,
}

/// A parsed map file: the map plus an optional chain homotopy on its source.
#[derive(Clone, Debug)]
pub struct MapFileContents {
    pub map: FilteredChainMap,
    pub homotopy: Option<Vec<Chain>>,
}

impl MapFileContents {
    /// `source` and `target` are paths to complex files, relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        let load = |p: &str| -> Result<Arc<FilteredComplex>> {
            let text = crate::error::read_file(&base.join(p))?;
            Ok(Arc::new(FilteredComplex::from_json(&text)?))
        };
        let source = load(&file.source)?;
        let target = if file.target == file.source { source.clone() } else { load(&file.target)? };
        let entries = |es: &[EntryFile]| -> BTreeMap<String, Vec<(String, i64)>> {
            es.iter().map(|e| (e.from.clone(), e.chain.iter().map(|t| (t.to.clone(), t.r)).collect())).collect()
        };
        let main = entries(&file.entries);
        let map = FilteredChainMap::from_entries(
            source.clone(),
            target,
            file.shift,
            main.iter().map(|(k, v)| (k.as_str(), v.iter().map(|(t, r)| (t.as_str(), *r)).collect())),
        )?;
        let homotopy = match &file.homotopy {
            None => None,
            Some(hs) => {
                let h = entries(hs);
                let k = FilteredChainMap::from_entries(
                    source.clone(),
                    source,
                    0.0,
                    h.iter().map(|(k, v)| (k.as_str(), v.iter().map(|(t, r)| (t.as_str(), *r)).collect())),
                )?;
                Some(k.images)
            }
        };
        Ok(Self { map, homotopy })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::GradingParams;

    fn c1() -> Arc<FilteredComplex> {
        Arc::new(
            FilteredComplex::builder(GradingParams::new(2, 0.5).unwrap())
                .critical_point("m", 0, 0.0)
                .critical_point("M", 1, 0.0)
                .term("m", "M", 1)
                .build()
                .unwrap(),
        )
    }

    fn pss_target() -> Arc<FilteredComplex> {
        Arc::new(
            FilteredComplex::builder(GradingParams::new(2, 0.5).unwrap())
                .chord("m_H", 0, 0.0)
                .chord("M_H", 1, 0.3)
                .term("m_H", "M_H", 1)
                .build()
                .unwrap(),
        )
    }

    fn w(a: f64, b: f64) -> Window {
        Window::new(a, b).unwrap()
    }

    #[test]
    fn identity_and_raised_copy() {
        let cx = c1();
        let rep = verify_chain_map(&FilteredChainMap::identity(cx.clone())).unwrap();
        assert_eq!(rep.realized_shift, 0.0);
        let raised = Arc::new(cx.map_actions(|g| g.action + 0.2));
        let f = FilteredChainMap::from_entries(cx.clone(), raised.clone(), 0.2, [("m", vec![("m", 0)]), ("M", vec![("M", 0)])]).unwrap();
        let rep = verify_chain_map(&f).unwrap();
        assert!((rep.realized_shift - 0.2).abs() < 1e-12);
        let over = Arc::new(cx.map_actions(|g| g.action + 0.3));
        let f = FilteredChainMap::from_entries(cx, over, 0.2, [("m", vec![("m", 0)]), ("M", vec![("M", 0)])]).unwrap();
        assert!(matches!(verify_chain_map(&f), Err(Error::ShiftExceeded { .. })));
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let cx = c1();
        let f = FilteredChainMap::from_entries(cx.clone(), cx, 0.0, [("m", vec![("m", 0)])]).unwrap();
        assert!(matches!(verify_chain_map(&f), Err(Error::NotChainMap(id)) if id == "m"));
    }

    #[test]
    fn pss_pair_factorizes() {
        let (cx, tgt) = (c1(), pss_target());
        let psi = FilteredChainMap::from_entries(cx.clone(), tgt.clone(), 0.3, [("m", vec![("m_H", 0)]), ("M", vec![("M_H", 0)])]).unwrap();
        let phi = FilteredChainMap::from_entries(tgt.clone(), cx.clone(), 0.0, [("m_H", vec![("m", 0)]), ("M_H", vec![("M", 0)])]).unwrap();
        let rep = verify_factorization(&psi, &phi, 0.0, 0.3, &[w(-0.5, 0.5), w(-1.5, 0.5)], None).unwrap();
        assert!(rep.rows.iter().all(|r| r.agrees));
        let zero_k = vec![Chain::zero(); 2];
        assert!(verify_factorization(&psi, &phi, 0.0, 0.3, &[], Some(&zero_k)).unwrap().homotopy_checked);

        let bad = FilteredChainMap::zero(tgt, cx, 0.0);
        assert!(matches!(
            verify_factorization(&psi, &bad, 0.0, 0.3, &[w(-0.5, 0.5)], None),
            Err(Error::HomotopyFails(_))
        ));
    }

    #[test]
    fn identity_factorization_with_zero_homotopy() {
        let cx = c1();
        let id = FilteredChainMap::identity(cx.clone());
        let k = vec![Chain::zero(); cx.len()];
        assert!(verify_factorization(&id, &id, 0.0, 0.0, &[w(-0.5, 0.5)], Some(&k)).is_ok());
    }

    #[test]
    fn chekanov_on_c1() {
        let cx = c1();
        let big_m = Chain::monomial(cx.require("M").unwrap(), 0);
        let rep = chekanov_primitive(&cx, &big_m, 1.0).unwrap();
        assert_eq!(rep.exponents, vec![("m".to_string(), -1)]);
        assert!(rep.all_negative && rep.degree_forced);
        assert!(matches!(chekanov_primitive(&cx, &big_m, 0.5), Err(Error::NoPrimitive { .. })));
        assert!(chekanov_primitive(&cx, &Chain::zero(), 0.3).unwrap().witness.is_zero());
    }
}
