//! Invariants over randomly generated complexes, windows, instances and
//! partitions.

use std::collections::BTreeMap;

use hzcap::dynamics::admissible::Verdict;
use hzcap::laurent::{lp_add, lp_mul};
use hzcap::scenarios::{bundled, check_partition};
use hzcap::{
    exact_triangle, run_theorem_scenario, slicing_partition, t_shift, verify_base_case, window_homology, FilteredComplex,
    LaurentGF2, Window,
};
use proptest::prelude::*;

/// `x -> y t^r`, with `y t^r` strictly below `x` by `gap`.
#[derive(Clone, Debug)]
struct Pair {
    degree: i64,
    action: f64,
    gap: f64,
    r: i64,
}

#[derive(Clone, Debug)]
struct Single {
    degree: i64,
    action: f64,
}

fn pair() -> impl Strategy<Value = Pair> {
    (-2i64..=2, 0.0..1.0f64, 0.01..1.5f64, -1i64..=1).prop_map(|(degree, action, gap, r)| Pair { degree, action, gap, r })
}

fn single() -> impl Strategy<Value = Single> {
    (-2i64..=2, 0.0..1.0f64).prop_map(|(degree, action)| Single { degree, action })
}

/// A direct sum of elementary complexes over `N_L = 2`, `a0 = 1`.
fn build(pairs: &[Pair], singles: &[Single]) -> FilteredComplex {
    let mut b = FilteredComplex::builder(bundled::params());
    for (i, p) in pairs.iter().enumerate() {
        let (x, y) = (format!("x{i}"), format!("y{i}"));
        // deg(y t^r) = deg(x) - 1 and act(y t^r) = act(x) - gap
        b = b
            .chord(&x, p.degree, p.action)
            .chord(&y, p.degree - 1 + 2 * p.r, p.action - p.gap + p.r as f64)
            .term(&x, &y, p.r);
    }
    for (i, s) in singles.iter().enumerate() {
        b = b.chord(&format!("s{i}"), s.degree, s.action);
    }
    b.build().expect("elementary complexes are valid")
}

/// Ranks of the direct sum: a single contributes each of its translates in
/// the window; a pair contributes `x t^k` when only `x` is inside and
/// `y t^(r+k)` when only `y` is.
fn closed_form_ranks(pairs: &[Pair], singles: &[Single], w: Window) -> BTreeMap<i64, usize> {
    let inside = |v: f64| v > w.a && v < w.b;
    let mut out = BTreeMap::new();
    for k in -20i64..=20 {
        for s in singles {
            if inside(s.action - k as f64) {
                *out.entry(s.degree - 2 * k).or_default() += 1;
            }
        }
        for p in pairs {
            let x = p.action - k as f64;
            let y = x - p.gap;
            match (inside(x), inside(y)) {
                (true, false) => *out.entry(p.degree - 2 * k).or_default() += 1,
                (false, true) => *out.entry(p.degree - 1 - 2 * k).or_default() += 1,
                _ => {}
            }
        }
    }
    out
}

fn off_spectrum_window(cx: &FilteredComplex, a: f64, len: f64) -> Option<Window> {
    let spec = cx.spectrum();
    let w = Window::new(a, a + len).ok()?;
    (spec.distance(w.a) > 1e-6 && spec.distance(w.b) > 1e-6).then_some(w)
}

fn laurent() -> impl Strategy<Value = LaurentGF2> {
    prop::collection::vec(-6i64..=6, 0..6).prop_map(LaurentGF2::from_exponents)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn laurent_ring_laws(p in laurent(), q in laurent(), s in laurent()) {
        prop_assert_eq!(lp_mul(&p, &q), lp_mul(&q, &p));
        prop_assert_eq!(lp_mul(&p, &lp_add(&q, &s)), lp_add(&lp_mul(&p, &q), &lp_mul(&p, &s)));
        prop_assert!(lp_add(&p, &p).is_zero());
    }

    #[test]
    fn random_complexes_square_to_zero(pairs in prop::collection::vec(pair(), 0..5), singles in prop::collection::vec(single(), 0..4)) {
        let cx = build(&pairs, &singles);
        prop_assert!(cx.validate().is_valid());
        for g in 0..cx.len() {
            prop_assert!(cx.boundary(cx.differential_of(g)).is_zero());
        }
    }

    #[test]
    fn window_homology_matches_closed_form(
        pairs in prop::collection::vec(pair(), 1..5),
        singles in prop::collection::vec(single(), 0..3),
        a in -2.5..2.5f64,
        len in 0.05..3.0f64,
    ) {
        let cx = build(&pairs, &singles);
        let Some(w) = off_spectrum_window(&cx, a, len) else { return Ok(()) };
        prop_assert_eq!(window_homology(&cx, w).unwrap().ranks(), closed_form_ranks(&pairs, &singles, w));
    }

    #[test]
    fn t_shift_is_an_isomorphism(pairs in prop::collection::vec(pair(), 1..4), a in -2.0..2.0f64, len in 0.05..2.5f64) {
        let cx = build(&pairs, &[]);
        let Some(w) = off_spectrum_window(&cx, a, len) else { return Ok(()) };
        let rep = t_shift(&cx, w).unwrap();
        prop_assert!(rep.is_isomorphism);
        prop_assert_eq!(rep.degree_shift, -2);
    }

    #[test]
    fn triangles_are_exact(pairs in prop::collection::vec(pair(), 1..4), mut cuts in prop::array::uniform3(-2.0..3.0f64)) {
        let cx = build(&pairs, &[]);
        cuts.sort_by(f64::total_cmp);
        let spec = cx.spectrum();
        prop_assume!(cuts.iter().all(|&c| spec.distance(c) > 1e-6));
        prop_assume!(cuts[1] - cuts[0] > 1e-6 && cuts[2] - cuts[1] > 1e-6);
        prop_assert!(exact_triangle(&cx, cuts[0], cuts[1], cuts[2]).unwrap().is_exact());
    }

    #[test]
    fn base_case_verdict_is_independent_of_delta(m in 0.02..0.48f64, frac in 0.01..0.99f64) {
        let inst = bundled::instance("B", m, true).unwrap();
        let rep = verify_base_case(&inst, frac * inst.collar_max()).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Pass);
        let rigid = bundled::instance("R", m, false).unwrap();
        prop_assert_eq!(verify_base_case(&rigid, frac * rigid.collar_max()).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn default_partition_is_valid(m in 0.01..5.0f64, a0 in 0.1..2.0f64) {
        prop_assume!(((m / a0) - (m / a0).round()).abs() > 1e-6);
        prop_assert_eq!(check_partition(&slicing_partition(m, a0), m, a0), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn verdict_is_invariant_under_reslicing(m0 in 0.1..0.95f64, cuts in prop::collection::vec(0.02..0.98f64, 1..6)) {
        let mut taus = vec![0.0];
        let mut inner = cuts;
        inner.sort_by(f64::total_cmp);
        inner.dedup_by(|a, b| (*a - *b).abs() < 0.02);
        taus.extend(inner);
        taus.push(1.0);
        prop_assume!(check_partition(&taus, m0, 1.0).is_ok());
        let default_taus = slicing_partition(m0, 1.0);
        // one delta inside every collar of both families
        let delta = 0.45 * taus[1..].iter().chain(&default_taus[1..])
            .map(|t| bundled::instance("probe", t * m0, true).unwrap().collar_max())
            .fold(f64::INFINITY, f64::min);
        let sliced = bundled::circle_family("random", m0, &taus, delta).unwrap();
        let default = bundled::circle_family("default", m0, &default_taus, delta).unwrap();
        let (a, b) = (run_theorem_scenario(&sliced).unwrap(), run_theorem_scenario(&default).unwrap());
        prop_assert_eq!(a.verdict, Verdict::Pass, "{}", a.render());
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(run_theorem_scenario(&sliced).unwrap().render(), a.render());
    }
}
