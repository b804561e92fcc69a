use hpd_core::cech::{CechComplex, Settings};
use hpd_core::deformation::{infinitesimal_cocycle, ks_matrix, verify_cocycle_identities};
use hpd_core::exactalg::{int, Rat};
use hpd_core::family::{build_example, p2, parse_jet_map, Atlas, ExampleKind, Family, PoissonFamily};
use hpd_core::multivector::pushforward;

fn atlas_family(spec_family: Family) -> PoissonFamily {
    match spec_family {
        Family::Atlas(f) => f,
        Family::Quotient(_) => panic!(),
    }
}

fn central_complex(f: &PoissonFamily) -> CechComplex {
    let (atlas, bivs) = f.central().unwrap();
    CechComplex::new(&atlas, &bivs).unwrap()
}

#[test]
fn p2_kodaira_spencer_is_an_isomorphism() {
    let f = atlas_family(build_example(&ExampleKind::P2, 3).unwrap());
    let cx = central_complex(&f);
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    let ks = ks_matrix(&f, &cx, &rep).unwrap();
    assert_eq!(ks.matrix.len(), 5);
    assert_eq!(ks.rank, 5);
    let (atlas, bivs) = f.central().unwrap();
    for u in 0..5 {
        let mut dir = vec![int(0); 5];
        dir[u] = int(1);
        let c = infinitesimal_cocycle(&f, &dir).unwrap();
        assert!(verify_cocycle_identities(&c, &atlas, &bivs).passed());
    }
}

#[test]
fn one_parameter_subfamily_has_rank_one() {
    let f = atlas_family(p2("x", &["w^2"], 3).build().unwrap());
    let cx = central_complex(&f);
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    assert_eq!(ks_matrix(&f, &cx, &rep).unwrap().rank, 1);
}

#[test]
fn constant_family_has_rank_zero() {
    let mut spec = p2("x", &["w^2"], 3);
    spec.bivectors.insert("U0".into(), "x*dx^dw".into());
    let f = atlas_family(spec.build().unwrap());
    let cx = central_complex(&f);
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    let ks = ks_matrix(&f, &cx, &rep).unwrap();
    assert_eq!(ks.rank, 0);
    assert!(ks.matrix.iter().flatten().all(|x| *x == int(0)));
}

#[test]
fn cocycles_are_linear_in_the_direction() {
    let f = atlas_family(build_example(&ExampleKind::HirzebruchNagata { m: 3, k: 1 }, 3).unwrap());
    let f5 = atlas_family(build_example(&ExampleKind::P2, 3).unwrap());
    for fam in [f, f5] {
        let m = fam.param_count();
        let a: Vec<Rat> = (0..m).map(|u| int(u as i64 + 1)).collect();
        let b: Vec<Rat> = (0..m).map(|u| int(2 - u as i64)).collect();
        let sum: Vec<Rat> = a.iter().zip(&b).map(|(x, y)| x * int(3) - y).collect();
        let ca = infinitesimal_cocycle(&fam, &a).unwrap().to_cochain().unwrap();
        let cb = infinitesimal_cocycle(&fam, &b).unwrap().to_cochain().unwrap();
        let cs = infinitesimal_cocycle(&fam, &sum).unwrap().to_cochain().unwrap();
        assert_eq!(cs, ca.scale(&int(3)).sub(&cb).unwrap());
    }
}

/// Re-coordinatizes the first chart by `(x, w) -> (x + t w^2, w)`.
fn recoordinatize(f: &PoissonFamily) -> PoissonFamily {
    let vars: Vec<String> = f.atlas.charts[0].vars.clone();
    let order = f.order;
    let e = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let phi = parse_jet_map(0, 0, &vars, &f.params, &e(&["x + t1*w^2", "w"]), order)
        .unwrap()
        .with_inverse(parse_jet_map(0, 0, &vars, &f.params, &e(&["x - t1*w^2", "w"]), order).unwrap());
    let mut atlas: Atlas<_> = Atlas::new(f.atlas.charts.clone());
    atlas.triples = f.atlas.triples.clone();
    for (j, k) in f.atlas.pairs() {
        let mut fwd = f.atlas.transition(j, k).unwrap().clone();
        let mut bwd = f.atlas.transition(k, j).unwrap().clone();
        if j == 0 {
            let inv = phi.inverse().unwrap().clone();
            fwd = phi.after(&fwd).unwrap();
            bwd = bwd.after(&inv).unwrap();
        }
        let (fwd, bwd) = (strip(fwd), strip(bwd));
        atlas.add_overlap(fwd, bwd);
    }
    let mut bivectors = f.bivectors.clone();
    bivectors[0] = pushforward(&f.bivectors[0], &phi).unwrap();
    PoissonFamily { atlas, bivectors, params: f.params.clone(), order }
}

fn strip(m: hpd_core::ChartMap<hpd_core::ParamJet>) -> hpd_core::ChartMap<hpd_core::ParamJet> {
    hpd_core::ChartMap::new(m.source(), m.target(), m.source_dim(), m.components().to_vec())
}

#[test]
fn coordinate_change_shifts_by_a_coboundary() {
    let f = atlas_family(p2("x", &["w^2", "x^3"], 3).build().unwrap());
    let g = recoordinatize(&f);
    assert!(hpd_core::family::validate_all(&g).passed());
    let cx = central_complex(&f);
    let rep = cx.hypercohomology(1, &Settings::default()).unwrap();
    for u in 0..2 {
        let mut dir = vec![int(0); 2];
        dir[u] = int(1);
        let a = infinitesimal_cocycle(&f, &dir).unwrap().to_cochain().unwrap();
        let b = infinitesimal_cocycle(&g, &dir).unwrap().to_cochain().unwrap();
        if u == 0 {
            assert_ne!(a, b);
        }
        assert_eq!(cx.project_to_basis(&a, &rep).unwrap(), cx.project_to_basis(&b, &rep).unwrap());
        assert!(cx.solve_exact(&a.sub(&b).unwrap()).unwrap().is_some());
    }
}
