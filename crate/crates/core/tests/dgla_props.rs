use hpd_core::exactalg::{int, LPoly, Monomial};
use hpd_core::multivector::{pushforward, ChartMap, Multivector, SCHOUTEN_JACOBI_RATIO};
use proptest::prelude::*;

fn poly(n: usize) -> impl Strategy<Value = LPoly> {
    prop::collection::vec((prop::collection::vec(0i32..=2, n), -3i64..=3), 0..=3).prop_map(move |terms| {
        let mut p = LPoly::zero();
        for (e, c) in terms {
            // keep total degree <= 2
            let mut e = e;
            while e.iter().sum::<i32>() > 2 {
                let i = e.iter().position(|&x| x > 0).unwrap();
                e[i] -= 1;
            }
            p += LPoly::term(int(c), Monomial::new(e));
        }
        p
    })
}

fn multivector(n: usize, degree: usize) -> impl Strategy<Value = Multivector> {
    let idx = prop::sample::subsequence((0..n).collect::<Vec<_>>(), degree);
    prop::collection::vec((idx, poly(n)), 1..=3).prop_map(move |terms| {
        let mut m = Multivector::zero(0, n, degree);
        for (i, c) in terms {
            m.add_term(&i, c);
        }
        m
    })
}

fn any_mv(n: usize) -> impl Strategy<Value = Multivector> {
    (1..=2usize.min(n)).prop_flat_map(move |d| multivector(n, d))
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn graded_antisymmetry((a, b) in (1..=3usize).prop_flat_map(|n| (any_mv(n), any_mv(n)))) {
        let ab = a.schouten(&b).unwrap();
        let ba = b.schouten(&a).unwrap();
        let s = -sign((a.degree() - 1) * (b.degree() - 1));
        prop_assert_eq!(ab, ba.scale(&int(s)));
    }

    #[test]
    fn graded_jacobi((a, b, c) in (1..=3usize).prop_flat_map(|n| (any_mv(n), any_mv(n), any_mv(n)))) {
        let bc = b.schouten(&c).unwrap();
        let lhs = if bc.degree() == 0 { return Ok(()) } else { a.schouten(&bc).unwrap() };
        let ab = a.schouten(&b).unwrap();
        let ac = a.schouten(&c).unwrap();
        let r1 = ab.schouten(&c).unwrap();
        let r2 = b.schouten(&ac).unwrap().scale(&int(sign((a.degree() - 1) * (b.degree() - 1))));
        prop_assert_eq!(lhs, r1.add(&r2).unwrap());
    }

    #[test]
    fn leibniz_over_wedge((a, b, c) in (1..=3usize).prop_flat_map(|n| (any_mv(n), any_mv(n), any_mv(n)))) {
        let lhs = a.schouten(&b.wedge(&c).unwrap()).unwrap();
        let t1 = a.schouten(&b).unwrap().wedge(&c).unwrap();
        let t2 = b.wedge(&a.schouten(&c).unwrap()).unwrap().scale(&int(sign((a.degree() - 1) * b.degree())));
        prop_assert_eq!(lhs, t1.add(&t2).unwrap());
    }

    #[test]
    fn bracket_matches_jacobi_defect(s in multivector(3, 2)) {
        let br = s.schouten(&s).unwrap();
        let d = s.jacobi_defect().unwrap();
        let defect = d.get(&(0, 1, 2)).cloned().unwrap_or_else(LPoly::zero);
        prop_assert_eq!(br.component(&[0, 1, 2]), defect.scale(&int(SCHOUTEN_JACOBI_RATIO)));
    }
}

fn x() -> LPoly {
    LPoly::var(0)
}
fn w() -> LPoly {
    LPoly::var(1)
}

/// Polynomial automorphism `(x, w) -> (x + p(w), c w)` with its inverse.
fn shear(p: &LPoly, c: i64) -> ChartMap {
    let pw = p.compose(&[w()]).unwrap();
    let f = ChartMap::new(0, 0, 2, vec![&x() + &pw, w().scale(&int(c))]);
    let winv = w().scale(&hpd_core::exactalg::rat(1, c));
    let g = ChartMap::new(0, 0, 2, vec![&x() - &pw.compose(&[x(), winv.clone()]).unwrap(), winv]);
    f.with_inverse(g)
}

fn swap_invert() -> ChartMap {
    let f = ChartMap::new(0, 0, 2, vec![x().inv().unwrap(), &w() * &x().inv().unwrap()]);
    f.clone().with_inverse(f)
}

fn chart_map() -> impl Strategy<Value = ChartMap> {
    prop_oneof![
        (prop::collection::vec(-2i64..=2, 3), prop::sample::select(vec![-2i64, -1, 1, 3])).prop_map(|(cs, c)| {
            let p = LPoly::from_terms(cs.iter().enumerate().map(|(i, &k)| (Monomial::var(0, i as i32), int(k))));
            shear(&p, c)
        }),
        Just(swap_invert()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pushforward_is_functorial(l in multivector(2, 2), f in chart_map(), g in chart_map()) {
        prop_assert!(f.round_trip_residuals().unwrap().iter().all(|r| r.is_zero()));
        // compositions leaving the Laurent class are undefined here
        let Ok(gf) = g.after(&f) else { return Ok(()) };
        let Ok(direct) = pushforward(&l, &gf) else { return Ok(()) };
        let step = pushforward(&pushforward(&l, &f).unwrap(), &g).unwrap();
        prop_assert_eq!(step, direct);
    }
}
