//! Filtered Floer-type complexes over Z/2 Laurent polynomials, window
//! homology, and the dynamics needed to build capacity instances.

pub mod chain_map;
pub mod complex;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod gf2;
pub mod input;
pub mod laurent;
pub mod morse;
pub mod persistence;
pub mod scenarios;
pub mod window;

pub use chain_map::{
    chekanov_primitive, verify_chain_map, verify_factorization, ChainMapReport, ChekanovReport, FactorizationReport,
    FilteredChainMap,
};
pub use complex::{Chain, ComplexBuilder, FilteredComplex, Generator, GeneratorKind, Monomial, ValidationReport};
pub use energy::{e_plus, HamiltonianPair, QuadratureConfig, ScalarField};
pub use error::{Error, Result};
pub use laurent::{GradingParams, LaurentGF2, ACTION_EPS};
pub use morse::{
    build_morse_complex, build_pearl_complex, morse_betti, window_morse_homology, ActionMode, MorseData, PearlData,
};
pub use persistence::{
    barcode, death_action, exact_triangle, inclusion_map, shrink_window, t_shift, window_homology, Bar, Barcode,
    DeathReport, IsomorphismReport, LinearMapOnHomology, TriangleReport, WindowHomology,
};
pub use scenarios::{
    counterexample_report, run_scenario, run_suite, run_theorem_scenario, slicing_partition, verify_base_case,
    verify_inductive_step, CapacityInstance, ScenarioReport, StepReport, TheoremFamily,
};
pub use window::{Spectrum, Window, WindowComplex};

// Book chapters run as doctests so their snippets stay in sync with the API.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/complexes.md")]
pub mod book_complexes {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/persistence.md")]
pub mod book_persistence {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/chain-maps.md")]
pub mod book_chain_maps {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/morse.md")]
pub mod book_morse {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod book_dynamics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod book_scenarios {}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}
