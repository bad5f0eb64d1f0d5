//! Filtered chain complexes over `Z/2[t, t^-1]`.
//!
//! Only the `t^0` representative of every generator is stored. The
//! differential is recorded on those representatives and extends t-linearly,
//! so `d(g t^r) = d(g) t^r`. Degrees and actions of shifted monomials follow
//! [`monomial_degree`] and [`monomial_action`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{monomial_action, monomial_degree, GradingParams, LaurentGF2, ACTION_EPS};
use crate::window::{Spectrum, Window, WindowComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Chord,
    CriticalPoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub action: f64,
    pub kind: GeneratorKind,
}

/// `g t^r`, with `g` an index into the complex's generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub gen: usize,
    pub r: i64,
}

impl Monomial {
    pub fn new(gen: usize, r: i64) -> Self {
        Self { gen, r }
    }

    pub fn shift(self, k: i64) -> Self {
        Self { gen: self.gen, r: self.r + k }
    }
}

/// A chain: for each generator, the Laurent polynomial multiplying it.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Chain {
    terms: BTreeMap<usize, LaurentGF2>,
}

impl Chain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(gen: usize, r: i64) -> Self {
        let mut c = Self::zero();
        c.toggle(Monomial::new(gen, r));
        c
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ms: I) -> Self {
        let mut c = Self::zero();
        for m in ms {
            c.toggle(m);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, m: Monomial) {
        let entry = self.terms.entry(m.gen).or_default();
        entry.toggle(m.r);
        if entry.is_zero() {
            self.terms.remove(&m.gen);
        }
    }

    pub fn add_assign_ref(&mut self, other: &Chain) {
        for m in other.monomials() {
            self.toggle(m);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_assign_ref(other);
        c
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Chain {
        Chain {
            terms: self.terms.iter().map(|(&g, p)| (g, p.shift(k))).collect(),
        }
    }

    /// Coefficient polynomial of a generator.
    pub fn coefficient(&self, gen: usize) -> Option<&LaurentGF2> {
        self.terms.get(&gen)
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms
            .iter()
            .flat_map(|(&g, p)| p.exponents().map(move |r| Monomial::new(g, r)))
    }

    pub fn len(&self) -> usize {
        self.terms.values().map(LaurentGF2::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.monomials().map(|m| (m.gen, m.r))).finish()
    }
}

/// One failed axiom check.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Degree { from: String, to: String, r: i64, expected: i64, found: i64 },
    ActionIncrease { from: String, to: String, r: i64, source_action: f64, term_action: f64 },
    SquareNonzero { generator: String, residue: String },
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        match v {
            Violation::Degree { from, to, r, expected, found } => {
                Error::DegreeViolation { from, to, r, expected, found }
            }
            Violation::ActionIncrease { from, to, r, source_action, term_action } => {
                Error::ActionIncrease { from, to, r, source_action, term_action }
            }
            Violation::SquareNonzero { generator, residue } => {
                Error::SquareNonzero { generator, residue }
            }
        }
    }
}

/// Pass/fail per axiom: degree -1, action non-increase (equality only at
/// `r = 0`), and `d^2 = 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub degree_ok: bool,
    pub action_ok: bool,
    pub square_ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.degree_ok && self.action_ok && self.square_ok
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(v.into()),
        }
    }

    pub fn render(&self) -> String {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        let mut s = format!(
            "degree -1: {}\naction non-increase: {}\nd^2 = 0: {}\n",
            verdict(self.degree_ok),
            verdict(self.action_ok),
            verdict(self.square_ok)
        );
        for v in &self.violations {
            s.push_str(&format!("  {}\n", Error::from(v.clone())));
        }
        s.push_str(if self.is_valid() { "complex is valid\n" } else { "complex is NOT valid\n" });
        s
    }
}

/// A filtered complex: generators with degree and action, a t-linear
/// differential, and grading parameters.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    params: GradingParams,
    generators: Vec<Generator>,
    diff: Vec<Chain>,
    index: BTreeMap<String, usize>,
}

impl FilteredComplex {
    /// Starts a complex; call [`ComplexBuilder::build`] to validate it.
    pub fn builder(params: GradingParams) -> ComplexBuilder {
        ComplexBuilder { params, generators: Vec::new(), terms: Vec::new() }
    }

    pub fn params(&self) -> &GradingParams {
        &self.params
    }

    pub fn a0(&self) -> f64 {
        self.params.a0()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, gen: usize) -> &Generator {
        &self.generators[gen]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::Input(format!("unknown generator '{id}'")))
    }

    /// `d(g)` for a `t^0` generator.
    pub fn differential_of(&self, gen: usize) -> &Chain {
        &self.diff[gen]
    }

    pub fn degree(&self, m: Monomial) -> i64 {
        monomial_degree(self.generators[m.gen].degree, m.r, &self.params)
    }

    pub fn action(&self, m: Monomial) -> f64 {
        monomial_action(self.generators[m.gen].action, m.r, &self.params)
    }

    /// Applies the differential t-linearly.
    pub fn boundary(&self, chain: &Chain) -> Chain {
        let mut out = Chain::zero();
        for m in chain.monomials() {
            out.add_assign_ref(&self.diff[m.gen].shift(m.r));
        }
        out
    }

    /// Maximum action over the monomials of a chain; `-inf` for the zero
    /// chain. Duplicate monomials have already cancelled mod 2 in [`Chain`].
    pub fn action_of_chain(&self, chain: &Chain) -> f64 {
        chain.monomials().map(|m| self.action(m)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::periodic(self.a0(), self.generators.iter().map(|g| g.action))
    }

    /// Checks the three axioms, collecting every violation.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport { degree_ok: true, action_ok: true, square_ok: true, violations: vec![] };
        for (x, gen) in self.generators.iter().enumerate() {
            for m in self.diff[x].monomials() {
                let term_action = self.action(m);
                let increases = if m.r == 0 {
                    term_action > gen.action + ACTION_EPS
                } else {
                    term_action >= gen.action - ACTION_EPS
                };
                if increases {
                    rep.action_ok = false;
                    rep.violations.push(Violation::ActionIncrease {
                        from: gen.id.clone(),
                        to: self.generators[m.gen].id.clone(),
                        r: m.r,
                        source_action: gen.action,
                        term_action,
                    });
                }
                let expected = gen.degree - 1;
                let found = self.degree(m);
                if found != expected {
                    rep.degree_ok = false;
                    rep.violations.push(Violation::Degree {
                        from: gen.id.clone(),
                        to: self.generators[m.gen].id.clone(),
                        r: m.r,
                        expected,
                        found,
                    });
                }
            }
            let dd = self.boundary(&self.diff[x]);
            if !dd.is_zero() {
                rep.square_ok = false;
                rep.violations.push(Violation::SquareNonzero {
                    generator: gen.id.clone(),
                    residue: self.format_chain(&dd),
                });
            }
        }
        rep
    }

    /// The quotient complex `CF^(a,b) = CF^{<b} / CF^{<=a}`.
    pub fn window_complex(&self, w: Window) -> Result<WindowComplex> {
        WindowComplex::from_filtered(self, w)
    }

    /// Inclusive range of t-exponents `r` for which `g t^r` has action in the
    /// open window.
    pub fn exponent_range(&self, gen: usize, w: Window) -> Option<(i64, i64)> {
        let a0 = self.a0();
        let act = self.generators[gen].action;
        // act - r a0 in (a, b)  <=>  r in ((act - b)/a0, (act - a)/a0)
        let mut lo = ((act - w.b) / a0).floor() as i64;
        let mut hi = ((act - w.a) / a0).ceil() as i64;
        while monomial_action(act, lo, &self.params) >= w.b {
            lo += 1;
        }
        while monomial_action(act, hi, &self.params) <= w.a {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn format_monomial(&self, m: Monomial) -> String {
        let id = &self.generators[m.gen].id;
        match m.r {
            0 => id.clone(),
            1 => format!("{id}*t"),
            r => format!("{id}*t^{r}"),
        }
    }

    pub fn format_chain(&self, c: &Chain) -> String {
        if c.is_zero() {
            return "0".into();
        }
        c.monomials().map(|m| self.format_monomial(m)).collect::<Vec<_>>().join(" + ")
    }

    /// Parses a chain written as `id*t^r + id + ...`.
    pub fn parse_chain(&self, s: &str) -> Result<Chain> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Chain::zero());
        }
        let mut c = Chain::zero();
        for term in s.split('+') {
            let term = term.trim();
            let (id, r) = match term.split_once('*') {
                None => (term, 0),
                Some((id, tpart)) => {
                    let tpart = tpart.trim();
                    let r = if tpart == "t" {
                        1
                    } else if let Some(e) = tpart.strip_prefix("t^") {
                        e.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::Input(format!("bad exponent in '{term}'")))?
                    } else {
                        return Err(Error::Input(format!("bad monomial '{term}'")));
                    };
                    (id.trim(), r)
                }
            };
            c.toggle(Monomial::new(self.require(id)?, r));
        }
        Ok(c)
    }

    /// Copy with every generator action replaced by `f(action)`.
    pub fn map_actions(&self, f: impl Fn(&Generator) -> f64) -> FilteredComplex {
        let mut out = self.clone();
        for g in &mut out.generators {
            g.action = f(g);
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        if value.get("params").and_then(|p| p.get("a0")).is_some() {
            return Err(Error::Input("a0 is derived from tau and N_L and must not be supplied".into()));
        }
        let file: ComplexFile = serde_json::from_value(value)?;
        file.into_complex()
    }

    /// Parses without running the axiom checks (used to report violations).
    pub fn from_json_unchecked(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        if value.get("params").and_then(|p| p.get("a0")).is_some() {
            return Err(Error::Input("a0 is derived from tau and N_L and must not be supplied".into()));
        }
        let file: ComplexFile = serde_json::from_value(value)?;
        file.into_builder()?.build_unchecked()
    }

    pub fn to_json(&self) -> String {
        let file = ComplexFile {
            name: None,
            notes: None,
            params: ParamsFile { n_l: self.params.n_l(), tau: self.params.tau() },
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile { id: g.id.clone(), degree: g.degree, action: g.action, kind: g.kind })
                .collect(),
            diff: self
                .diff
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(x, c)| DiffFile {
                    from: self.generators[x].id.clone(),
                    terms: c
                        .monomials()
                        .map(|m| TermFile { to: self.generators[m.gen].id.clone(), r: m.r, coeff: 1 })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("complex serializes")
    }
}

/// Incremental construction of a [`FilteredComplex`].
#[derive(Clone, Debug)]
pub struct ComplexBuilder {
    params: GradingParams,
    generators: Vec<Generator>,
    terms: Vec<(String, String, i64)>,
}

impl ComplexBuilder {
    pub fn generator(mut self, id: &str, degree: i64, action: f64, kind: GeneratorKind) -> Self {
        self.generators.push(Generator { id: id.into(), degree, action, kind });
        self
    }

    pub fn chord(self, id: &str, degree: i64, action: f64) -> Self {
        self.generator(id, degree, action, GeneratorKind::Chord)
    }

    pub fn critical_point(self, id: &str, degree: i64, action: f64) -> Self {
        self.generator(id, degree, action, GeneratorKind::CriticalPoint)
    }

    /// Adds `to * t^r` to `d(from)`. Repeated terms cancel mod 2.
    pub fn term(mut self, from: &str, to: &str, r: i64) -> Self {
        self.terms.push((from.into(), to.into(), r));
        self
    }

    /// Builds and runs [`FilteredComplex::validate`], failing on the first
    /// violation.
    pub fn build(self) -> Result<FilteredComplex> {
        let cx = self.build_unchecked()?;
        cx.validate().into_result()?;
        Ok(cx)
    }

    /// Structural checks only (unique ids, known references).
    pub fn build_unchecked(self) -> Result<FilteredComplex> {
        let mut index = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if !g.action.is_finite() {
                return Err(Error::Input(format!("generator '{}' has non-finite action", g.id)));
            }
            if index.insert(g.id.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate generator id '{}'", g.id)));
            }
        }
        let mut diff = vec![Chain::zero(); self.generators.len()];
        for (from, to, r) in &self.terms {
            let x = *index.get(from).ok_or_else(|| Error::Input(format!("unknown generator '{from}'")))?;
            let y = *index.get(to).ok_or_else(|| Error::Input(format!("unknown generator '{to}'")))?;
            diff[x].toggle(Monomial::new(y, *r));
        }
        Ok(FilteredComplex { params: self.params, generators: self.generators, diff, index })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
    params: ParamsFile,
    generators: Vec<GeneratorFile>,
    #[serde(default)]
    diff: Vec<DiffFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(rename = "N_L")]
    n_l: u32,
    tau: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    id: String,
    degree: i64,
    action: f64,
    kind: GeneratorKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffFile {
    from: String,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    to: String,
    r: i64,
    coeff: u8,
}

impl ComplexFile {
    fn into_builder(self) -> Result<ComplexBuilder> {
        let params = GradingParams::new(self.params.n_l, self.params.tau)?;
        let mut b = FilteredComplex::builder(params);
        for g in self.generators {
            b = b.generator(&g.id, g.degree, g.action, g.kind);
        }
        for d in self.diff {
            for t in d.terms {
                match t.coeff {
                    0 => {}
                    1 => b = b.term(&d.from, &t.to, t.r),
                    c => return Err(Error::Input(format!("coefficient {c} is not in {{0, 1}}"))),
                }
            }
        }
        Ok(b)
    }

    fn into_complex(self) -> Result<FilteredComplex> {
        self.into_builder()?.build()
    }
}
