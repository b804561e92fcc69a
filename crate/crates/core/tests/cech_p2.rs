use hpd_core::cech::{CechComplex, Settings, TotalCochain};
use hpd_core::exactalg::{int, LPoly, Monomial};
use hpd_core::expr::{names, parse_multivector};
use hpd_core::family::{build_example, p2, ExampleKind, Family, P2_DIRECTIONS};
use hpd_core::multivector::Multivector;
use proptest::prelude::*;

fn p2_atlas() -> hpd_core::family::Atlas {
    let Family::Atlas(fam) = build_example(&ExampleKind::P2, 1).unwrap() else { panic!() };
    fam.central().unwrap().0
}

fn complex(base: &str) -> CechComplex {
    let l = parse_multivector(base, &names(&["x", "w"]), 2, 0).unwrap();
    CechComplex::from_chart_bivector(&p2_atlas(), &l).unwrap()
}

#[test]
fn p2_hypercohomology_dimensions() {
    let cx = complex("x*dx^dw");
    let h1 = cx.hypercohomology(1, &Settings::default()).unwrap();
    assert_eq!(h1.dimension, 5, "{:?}", h1.slices);
    assert!(h1.stable);
    let h2 = cx.hypercohomology(2, &Settings::default()).unwrap();
    assert_eq!(h2.dimension, 0);
    assert!(h2.stable);
}

#[test]
fn zero_structure_has_ten_classes() {
    let cx = CechComplex::from_chart_bivector(&p2_atlas(), &Multivector::zero(0, 2, 2)).unwrap();
    let h1 = cx.hypercohomology(1, &Settings::default()).unwrap();
    assert_eq!(h1.dimension, 10, "{:?}", h1.slices);
}

#[test]
fn cubic_bivectors_are_independent_classes() {
    let cx = complex("x*dx^dw");
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    let vars = names(&["x", "w"]);
    let mut rows = Vec::new();
    for d in P2_DIRECTIONS {
        let m = parse_multivector(&format!("{d}*dx^dw"), &vars, 2, 0).unwrap();
        let c = cx.extend_global(&m).unwrap();
        assert!(cx.total_differential(&c).unwrap().is_zero());
        rows.push(cx.project_to_basis(&c, &rep).unwrap());
    }
    assert_eq!(hpd_core::exactalg::linalg::rank(&rows), 5);
}

#[test]
fn coboundaries_project_to_zero() {
    let cx = complex("x*dx^dw");
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    let v = parse_multivector("x^2*dx + x*w*dw - 3*dw", &names(&["x", "w"]), 2, 0).unwrap();
    let mut b = TotalCochain::zero(0, 2);
    b.add_cell(vec![0], v).unwrap();
    let db = cx.total_differential(&b).unwrap();
    assert!(!db.is_zero());
    assert!(cx.project_to_basis(&db, &rep).unwrap().iter().all(|x| *x == int(0)));
    let zero = TotalCochain::zero(1, 2);
    assert!(cx.project_to_basis(&zero, &rep).unwrap().iter().all(|x| *x == int(0)));
}

#[test]
fn dimensions_do_not_depend_on_chart_order() {
    let mut spec = p2("x", &P2_DIRECTIONS, 1);
    spec.charts.rotate_left(1);
    let Family::Atlas(fam) = spec.build().unwrap() else { panic!() };
    let (atlas, bivs) = fam.central().unwrap();
    let cx = CechComplex::new(&atlas, &bivs).unwrap();
    assert_eq!(cx.hypercohomology(1, &Settings::default()).unwrap().dimension, 5);
    assert_eq!(cx.hypercohomology(2, &Settings::default()).unwrap().dimension, 0);
}

#[test]
fn inhomogeneous_base_is_rejected() {
    let l = parse_multivector("(x + w^2)*dx^dw", &names(&["x", "w"]), 2, 0).unwrap();
    assert!(matches!(CechComplex::from_chart_bivector(&p2_atlas(), &l), Err(hpd_core::Error::InhomogeneousBase)));
}

/// Random cochain with small monomial support on the cells of the ℙ² cover.
fn random_cochain(k: usize, seed: &[(u8, u8, i8, i8, i8)]) -> TotalCochain {
    let cells: Vec<Vec<usize>> = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]];
    let mut c = TotalCochain::zero(k, 2);
    for &(cell, dir, a, b, coeff) in seed {
        let t = &cells[cell as usize % cells.len()];
        let p = t.len() - 1;
        if p > k || k + 1 - p > 2 {
            continue;
        }
        let q = k + 1 - p;
        let dirs: Vec<usize> = if q == 2 { vec![0, 1] } else { vec![dir as usize % 2] };
        // negative exponents only where the intersection allows them
        let allow = |var: usize| t.len() > 1 && t[1..].iter().any(|&r| if t[0] == 0 { r == var + 1 } else { true });
        let ea = if a < 0 && !allow(0) { -a } else { a };
        let eb = if b < 0 && !allow(1) { -b } else { b };
        let m = LPoly::term(int(coeff as i64), Monomial::new(vec![ea as i32, eb as i32]));
        c.add_cell(t.clone(), Multivector::term(t[0], 2, &dirs, m)).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn d_squared_vanishes(k in 0usize..2, seed in prop::collection::vec((0u8..7, 0u8..2, -3i8..4, -3i8..4, -5i8..6), 1..5)) {
        let cx = complex("x*dx^dw");
        let c = random_cochain(k, &seed);
        let dd = cx.total_differential(&cx.total_differential(&c).unwrap()).unwrap();
        prop_assert!(dd.is_zero(), "{:?}", dd);
    }

    #[test]
    fn bracket_is_a_derivation(
        sa in prop::collection::vec((0u8..7, 0u8..2, -2i8..3, -2i8..3, -3i8..4), 1..3),
        sb in prop::collection::vec((0u8..7, 0u8..2, -2i8..3, -2i8..3, -3i8..4), 1..3),
        ka in 0usize..2,
        kb in 0usize..2,
    ) {
        let cx = complex("x*dx^dw");
        let a = random_cochain(ka, &sa);
        let b = random_cochain(kb, &sb);
        let d = |c: &TotalCochain| cx.total_differential(c).unwrap();
        let lhs = d(&cx.bracket(&a, &b).unwrap());
        let first = cx.bracket(&d(&a), &b).unwrap();
        let second = cx.bracket(&a, &d(&b)).unwrap();
        let sign = if ka % 2 == 0 { int(1) } else { int(-1) };
        let rhs = first.add(&second.scale(&sign)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
