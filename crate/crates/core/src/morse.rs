//! Morse and pearl complexes from prescribed counts, and filtered Morse
//! homology in a window.
//!
//! Gradient and pearly trajectory counts are inputs. A Morse generator has
//! degree equal to its index; its action is either its critical value or a
//! common constant (see [`ActionMode`]).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{FilteredComplex, GeneratorKind, Monomial};
use crate::error::{Error, Result};
use crate::laurent::{GradingParams, ACTION_EPS};
use crate::persistence::WindowHomology;
use crate::window::{Cell, Spectrum, Window, WindowComplex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPoint {
    pub id: String,
    pub index: i64,
    pub value: f64,
}

/// A mod-2 count of gradient lines from `from` down to `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseCount {
    pub from: String,
    pub to: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseData {
    pub manifold_dim: i64,
    pub critical_points: Vec<CriticalPoint>,
    #[serde(default)]
    pub morse_diff: Vec<MorseCount>,
    /// Declares that the top critical points form one cluster whose
    /// superlevel set is a closed ball. Never checked geometrically.
    #[serde(default)]
    pub ball_maximum: bool,
}

/// A pearly contribution `from -> to * t^r` through disks of Maslov index
/// `r N_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskTerm {
    pub from: String,
    pub to: String,
    pub r: i64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PearlData {
    pub morse: MorseData,
    #[serde(default)]
    pub disk_terms: Vec<DiskTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionMode {
    /// Action of a critical point is its critical value.
    CriticalValue,
    /// Every generator has the same action.
    Constant(f64),
}

impl MorseData {
    fn position(&self, id: &str) -> Result<usize> {
        self.critical_points
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::Input(format!("unknown critical point '{id}'")))
    }

    /// Index range and index-adjacency of every count.
    pub fn check_indices(&self) -> Result<()> {
        for c in &self.critical_points {
            if c.index < 0 || c.index > self.manifold_dim {
                return Err(Error::IndexMismatch(format!(
                    "critical point {} has index {} outside [0, {}]",
                    c.id, c.index, self.manifold_dim
                )));
            }
            if !c.value.is_finite() {
                return Err(Error::Input(format!("critical point {} has non-finite value", c.id)));
            }
        }
        for m in &self.morse_diff {
            let (x, y) = (self.position(&m.from)?, self.position(&m.to)?);
            let (ix, iy) = (self.critical_points[x].index, self.critical_points[y].index);
            if ix - iy != 1 {
                return Err(Error::IndexMismatch(format!(
                    "gradient count {} -> {} joins indices {ix} and {iy}",
                    m.from, m.to
                )));
            }
        }
        Ok(())
    }

    pub fn critical_values(&self) -> Spectrum {
        Spectrum::finite(self.critical_points.iter().map(|c| c.value))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn action_of(c: &CriticalPoint, mode: ActionMode) -> f64 {
    match mode {
        ActionMode::CriticalValue => c.value,
        ActionMode::Constant(v) => v,
    }
}

/// The Morse complex: `d x = sum (count mod 2) y` over index-adjacent pairs.
pub fn build_morse_complex(md: &MorseData, params: GradingParams, mode: ActionMode) -> Result<FilteredComplex> {
    build_pearl_complex(&PearlData { morse: md.clone(), disk_terms: Vec::new() }, params, mode)
}

/// Morse differential plus disk terms `y t^r`, each required to satisfy
/// `index(x) - index(y) + r N_L - 1 = 0`.
pub fn build_pearl_complex(pd: &PearlData, params: GradingParams, mode: ActionMode) -> Result<FilteredComplex> {
    let md = &pd.morse;
    md.check_indices()?;
    let n_l = i64::from(params.n_l());
    let mut b = FilteredComplex::builder(params);
    for c in &md.critical_points {
        b = b.generator(&c.id, c.index, action_of(c, mode), GeneratorKind::CriticalPoint);
    }
    for m in &md.morse_diff {
        if m.count % 2 == 1 {
            b = b.term(&m.from, &m.to, 0);
        }
    }
    for d in &pd.disk_terms {
        let (x, y) = (md.position(&d.from)?, md.position(&d.to)?);
        let (ix, iy) = (md.critical_points[x].index, md.critical_points[y].index);
        if d.r <= 0 || ix - iy + d.r * n_l - 1 != 0 {
            return Err(Error::IndexMismatch(format!(
                "disk term {} -> {} t^{} has index {} - {} + {}*{} - 1 != 0",
                d.from, d.to, d.r, ix, iy, d.r, n_l
            )));
        }
        if d.count % 2 == 1 {
            b = b.term(&d.from, &d.to, d.r);
        }
    }
    b.build()
}

/// Filtered Morse homology `H^(a,b)` with action equal to critical value.
pub fn window_morse_homology(md: &MorseData, w: Window) -> Result<WindowHomology> {
    md.check_indices()?;
    for e in [w.a, w.b] {
        if md.critical_points.iter().any(|c| (c.value - e).abs() <= ACTION_EPS) {
            return Err(Error::EndpointIsCriticalValue(e));
        }
    }
    let mut cells: Vec<Cell> = md
        .critical_points
        .iter()
        .enumerate()
        .filter(|(_, c)| w.contains(c.value))
        .map(|(i, c)| Cell { label: Monomial::new(i, 0), action: c.value, degree: c.index, boundary: Vec::new() })
        .collect();
    for m in &md.morse_diff {
        if m.count % 2 == 0 {
            continue;
        }
        let (x, y) = (md.position(&m.from)?, md.position(&m.to)?);
        if let Some(cell) = cells.iter_mut().find(|c| c.label.gen == x) {
            cell.boundary.push((Monomial::new(y, 0), md.critical_points[y].value));
        }
    }
    Ok(WindowHomology::of(WindowComplex::assemble(w, cells)?))
}

/// Unfiltered Morse homology ranks by degree, indices `0..=n`.
pub fn morse_betti(md: &MorseData) -> Result<Vec<usize>> {
    let lo = md.critical_points.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let hi = md.critical_points.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo - 1.0, hi + 1.0) } else { (-1.0, 1.0) };
    let h = window_morse_homology(md, Window::new(lo, hi)?)?;
    Ok((0..=md.manifold_dim).map(|d| h.rank_in_degree(d)).collect())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(rename = "N_L")]
    n_l: u32,
    tau: f64,
}

/// A pearl model file: grading parameters, action convention, and data.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PearlFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    params: ParamsFile,
    mode: ActionMode,
    pearl: PearlData,
}

/// Loads a pearl model file and builds its complex.
pub fn load_pearl_model(path: &Path) -> Result<(PearlData, FilteredComplex)> {
    pearl_model_from_json(&crate::error::read_file(path)?)
}

pub fn pearl_model_from_json(text: &str) -> Result<(PearlData, FilteredComplex)> {
    let file: PearlFile = serde_json::from_str(text)?;
    let params = GradingParams::new(file.params.n_l, file.params.tau)?;
    let cx = build_pearl_complex(&file.pearl, params, file.mode)?;
    Ok((file.pearl, cx))
}

/// Bundled Morse data on standard manifolds, with top critical value `m`.
pub mod models {
    use super::*;

    fn cp(id: &str, index: i64, value: f64) -> CriticalPoint {
        CriticalPoint { id: id.into(), index, value }
    }

    fn count(from: &str, to: &str, count: u64) -> MorseCount {
        MorseCount { from: from.into(), to: to.into(), count }
    }

    /// Height function on the circle: two gradient lines cancel.
    pub fn circle(m: f64) -> MorseData {
        MorseData {
            manifold_dim: 1,
            critical_points: vec![cp("q", 0, 0.0), cp("P", 1, m)],
            morse_diff: vec![count("P", "q", 2)],
            ball_maximum: true,
        }
    }

    pub fn sphere(m: f64) -> MorseData {
        MorseData {
            manifold_dim: 2,
            critical_points: vec![cp("q", 0, 0.0), cp("P", 2, m)],
            morse_diff: Vec::new(),
            ball_maximum: true,
        }
    }

    /// Standard torus function with saddles just above the minimum.
    pub fn torus(m: f64) -> MorseData {
        MorseData {
            manifold_dim: 2,
            critical_points: vec![cp("q", 0, 0.0), cp("s1", 1, 0.1 * m), cp("s2", 1, 0.15 * m), cp("P", 2, m)],
            morse_diff: vec![count("s1", "q", 2), count("s2", "q", 2), count("P", "s1", 2), count("P", "s2", 2)],
            ball_maximum: false,
        }
    }

    /// Sphere whose maximum set is two peaks joined by a saddle, all with
    /// values in `(0.8 m, 1.1 m)`.
    pub fn sphere_ball_cluster(m: f64) -> MorseData {
        MorseData {
            manifold_dim: 2,
            critical_points: vec![cp("q", 0, 0.0), cp("s", 1, 0.85 * m), cp("P1", 2, 0.9 * m), cp("P2", 2, m)],
            morse_diff: vec![count("s", "q", 2), count("P1", "s", 1), count("P2", "s", 1)],
            ball_maximum: true,
        }
    }

    /// Pearl data for the circle in the plane: one disk of Maslov index 2.
    pub fn circle_in_plane() -> PearlData {
        PearlData {
            morse: MorseData {
                manifold_dim: 1,
                critical_points: vec![cp("m", 0, 0.0), cp("M", 1, 0.0)],
                morse_diff: vec![count("M", "m", 2)],
                ball_maximum: true,
            },
            disk_terms: vec![DiskTerm { from: "m".into(), to: "M".into(), r: 1, count: 1 }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Chain;

    fn params() -> GradingParams {
        GradingParams::new(2, 0.5).unwrap()
    }

    #[test]
    fn circle_and_sphere_have_zero_differential() {
        for md in [models::circle(0.9), models::sphere(0.9)] {
            let cx = build_morse_complex(&md, params(), ActionMode::CriticalValue).unwrap();
            assert!((0..cx.len()).all(|g| cx.differential_of(g).is_zero()));
        }
        let cx = build_morse_complex(&models::torus(0.9), params(), ActionMode::CriticalValue).unwrap();
        assert!(cx.validate().is_valid());
    }

    #[test]
    fn circle_in_plane_is_c1() {
        let cx = build_pearl_complex(&models::circle_in_plane(), params(), ActionMode::Constant(0.0)).unwrap();
        let (m, big_m) = (cx.require("m").unwrap(), cx.require("M").unwrap());
        assert_eq!(*cx.differential_of(m), Chain::monomial(big_m, 1));
        assert!(cx.differential_of(big_m).is_zero());
        assert_eq!(cx.generator(m).degree, 0);
        assert_eq!(cx.generator(big_m).degree, 1);
    }

    #[test]
    fn pearl_index_formula_enforced() {
        let mut pd = models::circle_in_plane();
        pd.disk_terms[0].r = 2;
        assert!(matches!(
            build_pearl_complex(&pd, params(), ActionMode::Constant(0.0)),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn empty_disk_terms_match_morse_builder() {
        let md = models::torus(0.9);
        let a = build_morse_complex(&md, params(), ActionMode::CriticalValue).unwrap();
        let pd = PearlData { morse: md, disk_terms: Vec::new() };
        let b = build_pearl_complex(&pd, params(), ActionMode::CriticalValue).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn window_examples() {
        let w = Window::new(0.5, 1.0).unwrap();
        assert!(window_morse_homology(&models::sphere(0.9), w).unwrap().is_z2_in_degree(2));
        assert!(window_morse_homology(&models::circle(0.9), w).unwrap().is_z2_in_degree(1));
        assert_eq!(window_morse_homology(&models::sphere(0.9), Window::new(-2.0, -1.0).unwrap()).unwrap().dim(), 0);
        assert!(window_morse_homology(&models::sphere_ball_cluster(1.0), Window::new(0.8, 1.1).unwrap())
            .unwrap()
            .is_z2_in_degree(2));
        assert!(matches!(
            window_morse_homology(&models::sphere(0.9), Window::new(0.5, 0.9).unwrap()),
            Err(Error::EndpointIsCriticalValue(_))
        ));
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(morse_betti(&models::circle(0.9)).unwrap(), vec![1, 1]);
        assert_eq!(morse_betti(&models::sphere(0.9)).unwrap(), vec![1, 0, 1]);
        assert_eq!(morse_betti(&models::torus(0.9)).unwrap(), vec![1, 2, 1]);
        assert_eq!(morse_betti(&models::sphere_ball_cluster(1.0)).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn non_adjacent_count_rejected() {
        let mut md = models::sphere(0.9);
        md.morse_diff.push(MorseCount { from: "P".into(), to: "q".into(), count: 1 });
        assert!(matches!(md.check_indices(), Err(Error::IndexMismatch(_))));
    }
}
