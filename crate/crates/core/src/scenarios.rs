//! Capacity instances and the slicing argument replayed on them.
//!
//! A [`CapacityInstance`] is the Floer complex of an admissible Hamiltonian
//! `H` given as data: its spectrum must be `a0 Z ∪ (m(H) + a0 Z)` and its
//! local homology at `m(H)` must be `Z/2` in degree `n`. The analytic inputs
//! that produce such complexes and the continuation maps between them are not
//! recomputed; reports say so and verify only their checkable consequences.
//!
//! All reports format numbers with fixed precision so that repeated runs are
//! byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_map::{verify_chain_map, FilteredChainMap};
use crate::complex::{Chain, FilteredComplex};
use crate::dynamics::admissible::{max_value, Verdict};
use crate::dynamics::constructions::{circle_product, radial_test_model};
use crate::dynamics::Lagrangian;
use crate::error::{Error, Result};
use crate::laurent::{GradingParams, ACTION_EPS};
use crate::persistence::{death_action, exact_triangle, inclusion_map, shrink_window, window_homology};
use crate::window::Window;

/// Offset used to push a resonant slicing parameter off `Z a0 / m`.
pub const NUDGE: f64 = 1e-7;

fn f6(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

fn is_resonant(v: f64, a0: f64) -> bool {
    let q = v / a0;
    (q - q.round()).abs() * a0 <= ACTION_EPS
}

/// The Floer complex of an admissible Hamiltonian, with its maximum `m_h`,
/// the death multiple `kappa0` of the fundamental class, the Lagrangian
/// dimension `n`, and a declared displacement energy `d_l`.
#[derive(Clone, Debug)]
pub struct CapacityInstance {
    pub name: String,
    pub complex: Arc<FilteredComplex>,
    pub m_h: f64,
    pub kappa0: i64,
    pub n: i64,
    pub d_l: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
    complex: serde_json::Value,
    #[serde(rename = "m_H")]
    m_h: f64,
    kappa0: i64,
    n: i64,
    #[serde(rename = "d_L")]
    d_l: f64,
}

impl CapacityInstance {
    /// Checks `m_h / a0 ∉ Z`, `kappa0 >= 1`, and the two-coset spectrum.
    pub fn new(name: &str, complex: Arc<FilteredComplex>, m_h: f64, kappa0: i64, n: i64, d_l: f64) -> Result<Self> {
        let a0 = complex.a0();
        if !(m_h.is_finite() && m_h > 0.0) {
            return Err(Error::Precondition(format!("{name}: m_H must be positive, got {m_h}")));
        }
        if is_resonant(m_h, a0) {
            return Err(Error::Precondition(format!("{name}: m_H / a0 = {} is an integer", m_h / a0)));
        }
        if kappa0 < 1 {
            return Err(Error::Precondition(format!("{name}: kappa0 must be positive, got {kappa0}")));
        }
        let inst = Self { name: name.into(), complex, m_h, kappa0, n, d_l };
        if !inst.spectrum_is_two_coset() {
            return Err(Error::Precondition(format!("{name}: spectrum is not a0 Z ∪ (m_H + a0 Z)")));
        }
        Ok(inst)
    }

    pub fn a0(&self) -> f64 {
        self.complex.a0()
    }

    pub fn death_level(&self) -> f64 {
        self.kappa0 as f64 * self.a0()
    }

    /// `true` iff the spectrum residues are exactly `{0, m_h mod a0}`.
    pub fn spectrum_is_two_coset(&self) -> bool {
        let spec = self.complex.spectrum();
        let a0 = self.a0();
        let res = spec.residues();
        let want = [0.0, self.m_h.rem_euclid(a0)];
        res.len() == 2 && want.iter().all(|&w| spec.contains(w)) && res.iter().all(|&r| r.abs() <= ACTION_EPS || (r - want[1]).abs() <= ACTION_EPS)
    }

    /// Largest `delta` with `(m - 2 delta, m + 2 delta) ∩ spectrum = {m}`.
    pub fn collar_max(&self) -> f64 {
        let spec = self.complex.spectrum();
        let a0 = self.a0();
        let nearest = spec
            .points_in(self.m_h - a0, self.m_h + a0)
            .into_iter()
            .map(|p| (p - self.m_h).abs())
            .filter(|d| *d > ACTION_EPS)
            .fold(f64::INFINITY, f64::min);
        nearest / 2.0
    }

    fn check_collar(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < self.collar_max()) {
            return Err(Error::CollarViolation(format!(
                "{}: delta = {delta} needs 0 < delta < {} so that (m - 2 delta, m + 2 delta) meets the spectrum only at m = {}",
                self.name,
                self.collar_max(),
                self.m_h
            )));
        }
        Ok(())
    }

    fn local_window(&self, delta: f64) -> Result<Window> {
        Window::new(self.m_h - delta, self.m_h + delta)
    }

    /// Whether `HF^(m + l a0 - delta, m + l a0 + delta)` is `Z/2` in degree
    /// `n + l N_L`.
    pub fn local_homology_is_point(&self, delta: f64, l: i64) -> Result<bool> {
        let w = self.local_window(delta)?.shifted(l as f64 * self.a0());
        let h = window_homology(&self.complex, w)?;
        let deg = self.n + l * i64::from(self.complex.params().n_l());
        Ok(h.dim() == 1 && h.is_z2_in_degree(deg))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(s)?;
        let cx = FilteredComplex::from_json(&f.complex.to_string())?;
        Self::new(&f.name, Arc::new(cx), f.m_h, f.kappa0, f.n, f.d_l)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::error::read_file(path)?)
    }

    pub fn to_json(&self, notes: Option<&str>) -> String {
        let f = InstanceFile {
            name: self.name.clone(),
            notes: notes.map(str::to_string),
            complex: serde_json::from_str(&self.complex.to_json()).expect("complex json"),
            m_h: self.m_h,
            kappa0: self.kappa0,
            n: self.n,
            d_l: self.d_l,
        };
        serde_json::to_string_pretty(&f).expect("instance serializes")
    }
}

/// `0 = tau_0 < ... < tau_N = 1` with `(tau_{k+1} - tau_k) m < a0 / 2` and
/// `tau_k m ∉ Z a0` for `0 < k < N`. Steps are uniform; a resonant interior
/// `tau_k` moves by the least multiple of [`NUDGE`] that clears it. The last
/// point is never moved: resonance there is a property of the instance.
pub fn slicing_partition(m_h: f64, a0: f64) -> Vec<f64> {
    let n = ((2.0 * m_h / a0).floor() as usize + 1).max(1);
    let mut taus: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    taus[n] = 1.0;
    for k in 1..n {
        let base = taus[k];
        let mut j = 0i64;
        while is_resonant(taus[k] * m_h, a0) {
            j += 1;
            // alternate sides so the nudge stays as small as possible
            taus[k] = base + if j % 2 == 1 { 1.0 } else { -1.0 } * ((j + 1) / 2) as f64 * NUDGE;
        }
    }
    taus
}

/// Verifies the two conditions of [`slicing_partition`]; returns the first
/// violation.
pub fn check_partition(taus: &[f64], m_h: f64, a0: f64) -> std::result::Result<(), String> {
    if taus.len() < 2 || taus[0] != 0.0 || taus[taus.len() - 1] != 1.0 {
        return Err("partition must run from 0 to 1".into());
    }
    for w in taus.windows(2) {
        if w[1] <= w[0] {
            return Err(format!("partition is not increasing at {}", w[1]));
        }
        if (w[1] - w[0]) * m_h >= a0 / 2.0 {
            return Err(format!("step [{}, {}] moves m by {} >= a0/2", f6(w[0]), f6(w[1]), f6((w[1] - w[0]) * m_h)));
        }
    }
    if let Some(t) = taus[1..].iter().find(|&&t| is_resonant(t * m_h, a0)) {
        return Err(format!("tau = {} is resonant", f6(*t)));
    }
    Ok(())
}

/// One verified step of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub name: String,
    pub verdict: Verdict,
    pub lines: Vec<String>,
}

impl StepReport {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), verdict: Verdict::Pass, lines: Vec::new() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Records a check; any failing check fails the step.
    fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        let what = what.into();
        self.lines.push(format!("[{}] {what}", if ok { "ok" } else { "FAIL" }));
        if !ok {
            self.verdict = Verdict::Fail;
        }
        ok
    }
}

/// Zero-map check `HF^(m - delta, m + delta) -> HF^(m - delta, kappa0 a0 + delta)`
/// for `0 < m < a0 / 2`. Passes iff the source is `Z/2[n]` and the map is zero.
pub fn verify_base_case(inst: &CapacityInstance, delta: f64) -> Result<StepReport> {
    let a0 = inst.a0();
    if inst.m_h >= a0 / 2.0 {
        return Err(Error::Precondition(format!("{}: base case needs m_H < a0/2, got {}", inst.name, inst.m_h)));
    }
    inst.check_collar(delta)?;
    let top = inst.death_level() + delta;
    inst.complex.spectrum().check_window(Window::new(inst.m_h - delta, top)?).map_err(|e| Error::CollarViolation(e.to_string()))?;
    let src = inst.local_window(delta)?;
    let tgt = Window::new(inst.m_h - delta, top)?;
    let mut rep = StepReport::new(format!("base case {}", inst.name));
    rep.line(format!("m(H) = {}, a0 = {}, kappa0 a0 = {}, delta = {}", f6(inst.m_h), f6(a0), f6(inst.death_level()), f6(delta)));
    let hs = window_homology(&inst.complex, src)?;
    let ht = window_homology(&inst.complex, tgt)?;
    rep.line(format!("HF{src} ranks {}", ranks_text(&hs.ranks())));
    rep.line(format!("HF{tgt} ranks {}", ranks_text(&ht.ranks())));
    rep.check(hs.dim() == 1 && hs.is_z2_in_degree(inst.n), format!("local homology is Z/2[{}]", inst.n));
    let iota = inclusion_map(&inst.complex, src, tgt)?;
    rep.line(format!("inclusion matrix {}", matrix_text(&iota.matrix())));
    rep.check(iota.is_zero(), "inclusion is the zero map");
    Ok(rep)
}

/// Replays the inductive step from `inst1` to `inst2` along `psi`: local
/// isomorphism, commuting square, the case split on `m2` versus
/// `kappa0 a0`, and the exact triangle with its degree argument. Passes iff
/// the zero map holds for `inst2` and `m2 < kappa0 a0`.
pub fn verify_inductive_step(inst1: &CapacityInstance, inst2: &CapacityInstance, psi: &FilteredChainMap, delta: f64) -> Result<StepReport> {
    let a0 = inst1.a0();
    let (m1, m2) = (inst1.m_h, inst2.m_h);
    let gap = m2 - m1;
    if !(gap > 0.0 && gap < a0 / 2.0) {
        return Err(Error::Precondition(format!("need 0 < m2 - m1 < a0/2, got {}", f6(gap))));
    }
    if inst1.kappa0 != inst2.kappa0 || (inst2.a0() - a0).abs() > ACTION_EPS {
        return Err(Error::Precondition("instances must share a0 and kappa0".into()));
    }
    inst1.check_collar(delta)?;
    inst2.check_collar(delta)?;
    let k = inst1.death_level();
    let (spec1, spec2) = (inst1.complex.spectrum(), inst2.complex.spectrum());
    for (spec, v) in [(&spec1, k + delta), (&spec2, k + delta), (&spec2, k + gap + delta)] {
        if spec.contains(v) {
            return Err(Error::CollarViolation(format!("window endpoint {v} lies in the spectrum")));
        }
    }

    let mut rep = StepReport::new(format!("inductive step {} -> {}", inst1.name, inst2.name));
    rep.line(format!("m1 = {}, m2 = {}, Delta = {}, kappa0 a0 = {}, delta = {}", f6(m1), f6(m2), f6(gap), f6(k), f6(delta)));

    let cm = verify_chain_map(psi)?;
    if cm.realized_shift > gap + ACTION_EPS {
        return Err(Error::ShiftExceeded { generator: "(continuation)".into(), realized: cm.realized_shift, budget: gap });
    }
    let mut psi = psi.clone();
    psi.shift = gap;
    rep.line(format!("continuation map: chain map, realized shift {} <= Delta", f6(cm.realized_shift)));

    let loc1 = inst1.local_window(delta)?;
    let loc2 = inst2.local_window(delta)?;
    let psi_loc = psi.induced_on_window(loc1)?;
    if !(psi_loc.is_isomorphism() && psi_loc.src_degrees == vec![inst1.n]) {
        return Err(Error::LocalIsoFails(format!(
            "continuation HF{loc1} -> HF{loc2} has rank {} on {} classes",
            psi_loc.rank(),
            psi_loc.src_degrees.len()
        )));
    }
    rep.line(format!("continuation HF{loc1} -> HF{loc2} is an isomorphism of Z/2[{}]", inst1.n));

    // top row: the inductive hypothesis
    let long1 = Window::new(m1 - delta, k + delta)?;
    let iota1 = inclusion_map(&inst1.complex, loc1, long1)?;
    rep.check(iota1.is_zero(), format!("hypothesis: HF{loc1} -> HF{long1} is zero"));

    // right column and bottom row of the square
    let long2 = Window::new(m2 - delta, k + gap + delta)?;
    let psi_long = psi.induced_on_window(long1)?;
    let iota2 = inclusion_map(&inst2.complex, loc2, long2)?;
    let commutes = iota1.then(&psi_long)? == psi_loc.then(&iota2)?;
    rep.check(commutes, "square commutes on homology");
    let long_zero = iota2.is_zero();
    rep.check(long_zero, format!("HF{loc2} -> HF{long2} is zero"));

    if m2 > k {
        // [m2 + delta, k + Delta + delta] misses the spectrum, so the long
        // inclusion is an isomorphism and cannot be zero
        let iso = shrink_window(&inst2.complex, m2 - delta, m2 - delta, m2 + delta, k + gap + delta)?;
        rep.check(
            false,
            format!(
                "m2 = {} > kappa0 a0 = {}: HF{loc2} -> HF{long2} is {}an isomorphism, contradicting the zero map",
                f6(m2),
                f6(k),
                if iso.is_isomorphism { "" } else { "not " }
            ),
        );
        return Ok(rep);
    }
    if !long_zero {
        rep.line(format!("max class of {} survives to {}: the zero-map conclusion fails", inst2.name, f6(k + gap + delta)));
    }
    rep.check(m2 < k, format!("m2 = {} < kappa0 a0 = {}", f6(m2), f6(k)));

    let tri = exact_triangle(&inst2.complex, m2 - delta, k + delta, k + gap + delta)?;
    rep.check(tri.is_exact(), format!("exact triangle at cuts ({}, {}, {}) is exact", f6(m2 - delta), f6(k + delta), f6(k + gap + delta)));
    let hits = spec2.points_in(k + delta, k + gap + delta);
    let n_l = i64::from(inst2.complex.params().n_l());
    match hits.as_slice() {
        [] => rep.line(format!("[{}, {}] misses the spectrum; the third window is 0", f6(k + delta), f6(k + gap + delta))),
        [p] => {
            let l = ((p - m2) / a0).round() as i64;
            let want = inst2.n + l * n_l;
            let ok = tri.bc.len() == 1 && tri.bc.get(&want) == Some(&1);
            rep.check(ok, format!("third window meets the spectrum at m2 + {l} a0 and is Z/2[{want}]"));
        }
        _ => {
            rep.check(false, format!("third window meets the spectrum {} times", hits.len()));
        }
    }
    // image of the connecting map sits in degrees n + l N_L - 1, never n
    let delta_degrees: Vec<i64> = tri
        .delta
        .columns
        .iter()
        .flat_map(|c| c.ones().map(|i| tri.delta.tgt_degrees[i]).collect::<Vec<_>>())
        .collect();
    rep.check(
        delta_degrees.iter().all(|d| (d - inst2.n + 1).rem_euclid(n_l) == 0),
        if delta_degrees.is_empty() {
            "connecting map is zero".to_string()
        } else {
            format!("image of the connecting map lies in degrees n + l N_L - 1: {delta_degrees:?}")
        },
    );
    let short2 = Window::new(m2 - delta, k + delta)?;
    let eta = inclusion_map(&inst2.complex, loc2, short2)?;
    rep.check(eta.is_zero(), format!("conclusion: HF{loc2} -> HF{short2} is zero"));
    Ok(rep)
}

/// A one-parameter family `tau_k H0` over a slicing partition, with the
/// pearl complex of `L` that fixes `kappa0`.
#[derive(Clone, Debug)]
pub struct TheoremFamily {
    pub name: String,
    pub pearl: Arc<FilteredComplex>,
    /// Generator id of the maximum in the pearl complex.
    pub max_id: String,
    pub m0: f64,
    pub taus: Vec<f64>,
    /// Instance `k - 1` models `tau_k H0`.
    pub instances: Vec<CapacityInstance>,
    /// Map `k` is the continuation from instance `k` to instance `k + 1`.
    pub maps: Vec<FilteredChainMap>,
    pub delta: f64,
}

/// A scenario outcome: step reports, an overall verdict, and CSV artifacts.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub steps: Vec<StepReport>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    /// `(file name, contents)`.
    pub artifacts: Vec<(String, String)>,
}

impl ScenarioReport {
    fn new(name: &str) -> Self {
        Self { name: name.into(), steps: Vec::new(), verdict: Verdict::Pass, notes: Vec::new(), artifacts: Vec::new() }
    }

    fn push(&mut self, step: StepReport) {
        if step.verdict != Verdict::Pass {
            self.verdict = Verdict::Fail;
        }
        self.steps.push(step);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn render(&self) -> String {
        let mut s = format!("scenario {}\n", self.name);
        for (i, st) in self.steps.iter().enumerate() {
            let _ = writeln!(s, "step {}: {} [{}]", i + 1, st.name, st.verdict);
            for l in &st.lines {
                let _ = writeln!(s, "  {l}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        s
    }

    /// `step,name,verdict` rows.
    pub fn steps_csv(&self) -> String {
        let mut s = String::from("step,name,verdict\n");
        for (i, st) in self.steps.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", i + 1, st.name, st.verdict);
        }
        s
    }

    /// Writes `<name>-steps.csv` and every artifact into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let steps = dir.join(format!("{}-steps.csv", self.name));
        std::fs::write(&steps, self.steps_csv())?;
        out.push(steps);
        for (file, body) in &self.artifacts {
            let p = dir.join(file);
            std::fs::write(&p, body)?;
            out.push(p);
        }
        Ok(out)
    }
}

fn ranks_text(r: &std::collections::BTreeMap<i64, usize>) -> String {
    if r.is_empty() {
        "0".into()
    } else {
        r.iter().map(|(d, k)| format!("{d}:{k}")).collect::<Vec<_>>().join(" ")
    }
}

fn matrix_text(m: &[Vec<u8>]) -> String {
    if m.is_empty() || m[0].is_empty() {
        return "[]".into();
    }
    let rows: Vec<String> = m.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

/// Chains the base case and the inductive steps along the family and
/// concludes `m(H0) < kappa0 a0 <= d_L`, reporting the two inequalities
/// separately.
pub fn run_theorem_scenario(family: &TheoremFamily) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(&family.name);
    let first = family.instances.first().ok_or_else(|| Error::Precondition("family has no instances".into()))?;
    if family.maps.len() + 1 != family.instances.len() || family.taus.len() != family.instances.len() + 1 {
        return Err(Error::Precondition("family needs one instance per slice and one map per step".into()));
    }
    let a0 = first.a0();
    let kappa0 = first.kappa0;
    let d_l = first.d_l;

    let mut part = StepReport::new("slicing partition");
    part.line(format!("tau = [{}]", family.taus.iter().map(|t| f6(*t)).collect::<Vec<_>>().join(", ")));
    let cond = check_partition(&family.taus, family.m0, a0);
    part.check(cond.is_ok(), cond.err().unwrap_or_else(|| "steps move m by less than a0/2 and avoid resonance".into()));
    for (inst, tau) in family.instances.iter().zip(&family.taus[1..]) {
        part.check((inst.m_h - tau * family.m0).abs() <= ACTION_EPS, format!("{}: m = {} = tau m(H0)", inst.name, f6(inst.m_h)));
    }
    report.push(part);

    let mut death = StepReport::new("death of the fundamental class");
    let max = Chain::monomial(family.pearl.require(&family.max_id)?, 0);
    let d = death_action(&family.pearl, &max)?;
    death.line(format!("death_action([{}]) = {}, witness {}", family.max_id, f6(d.action), family.pearl.format_chain(&d.witness)));
    death.check((d.action - kappa0 as f64 * a0).abs() <= ACTION_EPS, format!("death action equals kappa0 a0 = {}", f6(kappa0 as f64 * a0)));
    death.check(d.witness.monomials().all(|m| m.r < 0), "witness exponents are all negative");
    report.push(death);

    report.push(verify_base_case(first, family.delta)?);
    for (k, psi) in family.maps.iter().enumerate() {
        report.push(verify_inductive_step(&family.instances[k], &family.instances[k + 1], psi, family.delta)?);
    }

    let k0 = kappa0 as f64 * a0;
    let mut fin = StepReport::new("final inequality");
    fin.check(family.m0 < k0, format!("m(H0) = {} < kappa0 a0 = {}", f6(family.m0), f6(k0)));
    if !fin.check(k0 <= d_l + ACTION_EPS, format!("kappa0 a0 = {} <= d_L = {}", f6(k0), f6(d_l))) {
        fin.line("metadata inconsistency: declared d_L is below the death level of the fundamental class");
    }
    report.push(fin);
    report.notes.push(
        "the local Floer homology, perturbation, and energy arguments are encoded in the bundled complexes and maps; only their algebraic consequences are verified"
            .into(),
    );
    report.artifacts.push((format!("{}-slices.csv", family.name), slices_csv(family)));
    Ok(report)
}

fn slices_csv(family: &TheoremFamily) -> String {
    let mut s = String::from("k,tau,m_H,kappa0_a0,d_L\n");
    for (i, inst) in family.instances.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{},{}", i + 1, f6(family.taus[i + 1]), f6(inst.m_h), f6(inst.death_level()), f6(inst.d_l));
    }
    s
}

/// One row of the product counterexample table.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleRow {
    pub epsilon: f64,
    /// `max H~`, a lower bound for the unmodified relative capacity.
    pub capacity: f64,
    /// Declared displacement energy of `L_eps`.
    pub energy: f64,
    /// `max |H~ - H|` over samples of `L_eps` inside the plateau of the cutoff.
    pub trace_error: f64,
}

/// Extends the fixed admissible radial Hamiltonian across circles of area
/// `eps` and tabulates `max H~` against `eps`.
pub fn counterexample_report(epsilons: &[f64]) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("counterexample");
    if epsilons.is_empty() {
        return Ok(report);
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("epsilons must be positive and decreasing".into()));
    }
    let base = radial_test_model();
    let m = max_value(&base);
    let rows: Vec<Result<CounterexampleRow>> = epsilons
        .par_iter()
        .map(|&eps| {
            let prod = circle_product(&base, eps)?;
            let radius = match prod.lagrangian {
                Lagrangian::ProductCircle { radius } => radius,
                _ => unreachable!("circle_product builds a product circle"),
            };
            // L_eps = S_eps × R: compare H~ with H on a grid of its points
            let mut trace_error: f64 = 0.0;
            for i in 0..=40 {
                let x = -1.2 + 2.4 * i as f64 / 40.0;
                for j in 0..16 {
                    let th = std::f64::consts::TAU * j as f64 / 16.0;
                    let z = [x, radius * th.cos(), 0.0, radius * th.sin()];
                    trace_error = trace_error.max((prod.value(&z) - base.value(&[x, 0.0])).abs());
                }
            }
            Ok(CounterexampleRow { epsilon: eps, capacity: max_value(&prod), energy: eps, trace_error })
        })
        .collect();
    let rows: Vec<CounterexampleRow> = rows.into_iter().collect::<Result<_>>()?;

    let mut table = StepReport::new("product table");
    table.line(format!("factor Hamiltonian: radial test model, m(H) = {}", f6(m)));
    table.line("epsilon,capacity,energy,ratio");
    let mut csv = String::from("epsilon,capacity_lower_bound,displacement_energy,ratio,trace_error\n");
    for r in &rows {
        table.line(format!("{},{},{},{}", f6(r.epsilon), f6(r.capacity), f6(r.energy), f6(r.capacity / r.energy)));
        let _ = writeln!(csv, "{},{},{},{},{:.3e}", f6(r.epsilon), f6(r.capacity), f6(r.energy), f6(r.capacity / r.energy), r.trace_error);
    }
    table.check(rows.iter().all(|r| r.capacity == m), format!("capacity column is constant = m(H) = {}", f6(m)));
    table.check(rows.iter().all(|r| r.energy == r.epsilon), "energy column equals epsilon");
    table.check(rows.iter().all(|r| r.trace_error <= 1e-12), "H~ restricts to H on L_eps");
    table.check(rows.windows(2).all(|w| w[1].capacity / w[1].energy > w[0].capacity / w[0].energy), "capacity / energy grows as epsilon shrinks");
    report.push(table);
    report.notes.push("displacement energies are declared metadata (d(L_eps) = eps), not computed".into());
    report.artifacts.push(("counterexample.csv".into(), csv));
    Ok(report)
}

/// Bundled instances, maps, and families.
pub mod bundled {
    use super::*;

    /// `N_L = 2`, `tau = 1/2`, so `a0 = 1`.
    pub fn params() -> GradingParams {
        GradingParams::new(2, 0.5).expect("valid grading")
    }

    /// The pearl complex of the circle in the plane: `d m = M t`.
    pub fn c1() -> FilteredComplex {
        FilteredComplex::builder(params())
            .critical_point("m", 0, 0.0)
            .critical_point("M", 1, 0.0)
            .term("m", "M", 1)
            .build()
            .expect("C1 is valid")
    }

    /// Two generators `x` (action 0) and `P` (the maximum, action `m`, degree
    /// `n = 1`) with `d x = P t` when `displaceable`.
    pub fn max_complex(m: f64, displaceable: bool) -> Result<FilteredComplex> {
        let mut b = FilteredComplex::builder(params()).chord("x", 0, 0.0).chord("P", 1, m);
        if displaceable {
            b = b.term("x", "P", 1);
        }
        b.build()
    }

    pub fn instance(name: &str, m: f64, displaceable: bool) -> Result<CapacityInstance> {
        CapacityInstance::new(name, Arc::new(max_complex(m, displaceable)?), m, 1, 1, 1.0)
    }

    pub fn d1() -> CapacityInstance {
        instance("D1", 0.3, true).expect("D1 is valid")
    }

    pub fn d2() -> CapacityInstance {
        instance("D2", 0.6, true).expect("D2 is valid")
    }

    /// `x -> x`, `P -> P` with shift `m2 - m1`.
    pub fn continuation(a: &CapacityInstance, b: &CapacityInstance) -> Result<FilteredChainMap> {
        FilteredChainMap::from_entries(
            a.complex.clone(),
            b.complex.clone(),
            b.m_h - a.m_h,
            [("x", vec![("x", 0)]), ("P", vec![("P", 0)])],
        )
    }

    /// The family `tau_k H0` with `m(H0) = m0` over `taus`.
    pub fn circle_family(name: &str, m0: f64, taus: &[f64], delta: f64) -> Result<TheoremFamily> {
        let instances = taus[1..]
            .iter()
            .enumerate()
            .map(|(k, t)| instance(&format!("H{}", k + 1), t * m0, true))
            .collect::<Result<Vec<_>>>()?;
        let maps = instances.windows(2).map(|w| continuation(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
        Ok(TheoremFamily {
            name: name.into(),
            pearl: Arc::new(c1()),
            max_id: "M".into(),
            m0,
            taus: taus.to_vec(),
            instances,
            maps,
            delta,
        })
    }

    /// `m(H0) = 0.9` over the default partition `[0, 1/2, 1]`.
    pub fn circle() -> TheoremFamily {
        circle_family("circle", 0.9, &slicing_partition(0.9, 1.0), 0.02).expect("circle family is valid")
    }

    /// The same family over `[0, 1/3, 2/3, 1]`.
    pub fn circle_resliced() -> TheoremFamily {
        circle_family("circle-resliced", 0.9, &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 0.02).expect("resliced family is valid")
    }
}

/// Names accepted by [`run_scenario`], in suite order.
pub const SCENARIOS: &[&str] = &["base-case", "inductive-step", "circle", "circle-resliced", "negative-control", "counterexample"];

/// Epsilons of the bundled counterexample table.
pub const COUNTEREXAMPLE_EPSILONS: [f64; 3] = [0.1, 0.03, 0.01];

pub fn run_scenario(name: &str) -> Result<ScenarioReport> {
    match name {
        "base-case" => {
            let mut r = ScenarioReport::new(name);
            r.push(verify_base_case(&bundled::d1(), 0.05)?);
            Ok(r)
        }
        "inductive-step" => {
            let (a, b) = (bundled::d1(), bundled::d2());
            let mut r = ScenarioReport::new(name);
            r.push(verify_base_case(&a, 0.05)?);
            r.push(verify_inductive_step(&a, &b, &bundled::continuation(&a, &b)?, 0.05)?);
            Ok(r)
        }
        "circle" => run_theorem_scenario(&bundled::circle()),
        "circle-resliced" => run_theorem_scenario(&bundled::circle_resliced()),
        "negative-control" => {
            // no disk term: the maximum never dies, so every zero map fails
            let a = bundled::instance("R1", 0.3, false)?;
            let b = bundled::instance("R2", 0.6, false)?;
            let mut r = ScenarioReport::new(name);
            r.push(verify_base_case(&a, 0.05)?);
            r.push(verify_inductive_step(&a, &b, &bundled::continuation(&a, &b)?, 0.05)?);
            r.verdict = if r.steps.iter().all(|s| s.verdict == Verdict::Fail) { Verdict::Pass } else { Verdict::Fail };
            r.notes.push("negative control: every step is expected to fail, and the scenario passes when they all do".into());
            Ok(r)
        }
        "counterexample" => counterexample_report(&COUNTEREXAMPLE_EPSILONS),
        _ => Err(Error::Input(format!("unknown scenario '{name}'; known: {}", SCENARIOS.join(", ")))),
    }
}

/// Every scenario, run in parallel and returned in [`SCENARIOS`] order.
pub fn run_suite() -> Result<Vec<ScenarioReport>> {
    SCENARIOS.par_iter().map(|n| run_scenario(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_examples() {
        let p = slicing_partition(2.6, 1.0);
        assert_eq!(p.len(), 7);
        assert!(check_partition(&p, 2.6, 1.0).is_ok());
        assert_eq!(slicing_partition(0.3, 1.0), vec![0.0, 1.0]);
        assert_eq!(slicing_partition(0.9, 1.0), vec![0.0, 0.5, 1.0]);
        // 2.0 * 1/2 = 1.0 is resonant and gets nudged
        let p = slicing_partition(2.0, 1.0);
        assert!(check_partition(&p, 2.0, 1.0).is_err(), "tau_N m = 2 is itself resonant");
        assert!(p[1..p.len() - 1].iter().all(|t| !is_resonant(t * 2.0, 1.0)));
        assert!(bundled::instance("R", 1.0, true).is_err());
    }

    #[test]
    fn d1_base_case() {
        let r = verify_base_case(&bundled::d1(), 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.lines);
        assert!(matches!(verify_base_case(&bundled::d1(), 0.8), Err(Error::CollarViolation(_))));
        let rigid = bundled::instance("R", 0.3, false).unwrap();
        assert_eq!(verify_base_case(&rigid, 0.05).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn d1_to_d2_step() {
        let (a, b) = (bundled::d1(), bundled::d2());
        let psi = bundled::continuation(&a, &b).unwrap();
        let r = verify_inductive_step(&a, &b, &psi, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.lines);
        let far = bundled::instance("F", 0.9, true).unwrap();
        let psi = bundled::continuation(&a, &far).unwrap();
        assert!(matches!(verify_inductive_step(&a, &far, &psi, 0.02), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_continuation_is_not_a_local_iso() {
        let (a, b) = (bundled::d1(), bundled::d2());
        let z = FilteredChainMap::zero(a.complex.clone(), b.complex.clone(), 0.3);
        assert!(matches!(verify_inductive_step(&a, &b, &z, 0.05), Err(Error::LocalIsoFails(_))));
    }

    #[test]
    fn negative_control_fails() {
        let r = run_scenario("negative-control").unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.steps.iter().all(|s| s.verdict == Verdict::Fail));
    }

    #[test]
    fn circle_family_passes_and_flags_metadata() {
        let r = run_scenario("circle").unwrap();
        assert!(r.passed(), "{}", r.render());
        let mut fam = bundled::circle();
        for inst in &mut fam.instances {
            inst.d_l = 0.5;
        }
        let r = run_theorem_scenario(&fam).unwrap();
        assert!(!r.passed());
        assert!(r.render().contains("metadata inconsistency"));
    }

    #[test]
    fn single_instance_family() {
        let fam = bundled::circle_family("small", 0.4, &[0.0, 1.0], 0.05).unwrap();
        let r = run_theorem_scenario(&fam).unwrap();
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.steps.iter().filter(|s| s.name.starts_with("inductive")).count(), 0);
    }

    #[test]
    fn counterexample_edge_cases() {
        assert!(counterexample_report(&[]).unwrap().steps.is_empty());
        assert!(counterexample_report(&[0.01, 0.1]).is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let d1 = bundled::d1();
        let back = CapacityInstance::from_json(&d1.to_json(Some("hand reduction"))).unwrap();
        assert_eq!(back.to_json(None), d1.to_json(None));
    }
}
