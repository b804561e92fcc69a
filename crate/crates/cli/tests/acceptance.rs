//! End-to-end acceptance suite: one line per criterion, nonzero exit on any failure.

use std::path::PathBuf;

use hpd_cli::run_args;
use hpd_core::cech::{CechComplex, Settings, TotalCochain};
use hpd_core::exactalg::{int, linalg, LPoly, Monomial};
use hpd_core::expr::{names, parse_lpoly, parse_multivector};
use hpd_core::family::{build_example, hopf_iterate, ExampleKind, Family, P2_DIRECTIONS};
use hpd_core::multivector::{pushforward, ChartMap, Multivector, SCHOUTEN_JACOBI_RATIO};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

/// Runs `hpd` with `--json` and returns exit code and parsed report.
fn hpd(args: &[&str]) -> Result<(i32, Value, String), String> {
    let mut full = vec!["hpd"];
    full.extend_from_slice(args);
    full.push("--json");
    let out = run_args(full);
    if out.code == 2 {
        return Err(format!("input error: {}", out.stderr.trim()));
    }
    let v: Value = serde_json::from_str(&out.stdout).map_err(|e| format!("report is not JSON: {e}"))?;
    Ok((out.code, v, out.stdout))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn p2_complex() -> CechComplex {
    let Family::Atlas(f) = build_example(&ExampleKind::P2, 1).unwrap() else { unreachable!() };
    let atlas = f.central().unwrap().0;
    let l = parse_multivector("x*dx^dw", &names(&["x", "w"]), 2, 0).unwrap();
    CechComplex::from_chart_bivector(&atlas, &l).unwrap()
}

fn c1_hypercohomology() -> Outcome {
    let p2 = example("p2.json");
    let mut dims = Vec::new();
    for k in ["1", "2"] {
        let (code, v, _) = hpd(&["cohomology", "--family", &p2, "--lambda0", "x*dx^dw", "-k", k])?;
        ensure(code == 0, format!("exit code {code}"))?;
        ensure(v["results"]["stable"] == Value::Bool(true), format!("H^{k} not stable"))?;
        dims.push(v["results"]["dimension"].as_u64().ok_or("missing dimension")?);
    }
    ensure(dims == [5, 0], format!("dimensions {dims:?}, expected [5, 0]"))?;
    Ok("dim H^1 = 5, dim H^2 = 0, stable".into())
}

fn c2_basis_membership() -> Outcome {
    let cx = p2_complex();
    let h1 = cx.hypercohomology(1, &Settings::default()).map_err(|e| e.to_string())?;
    let vars = names(&["x", "w"]);
    let mut rows = Vec::new();
    for d in P2_DIRECTIONS {
        let m = parse_multivector(&format!("{d}*dx^dw"), &vars, 2, 0).unwrap();
        let c = cx.extend_global(&m).map_err(|e| e.to_string())?;
        ensure(cx.total_differential(&c).unwrap().is_zero(), format!("{d} does not extend to a cocycle"))?;
        rows.push(cx.project_to_basis(&c, &h1).map_err(|e| e.to_string())?);
    }
    let r = linalg::rank(&rows);
    ensure(r == 5, format!("rank {r}"))?;
    Ok("five cubic classes are cocycles of rank 5".into())
}

fn c3_transformation_laws() -> Outcome {
    let vars = names(&["z1", "z2", "a", "b", "t"]);
    for n in 1..=5 {
        let g = hopf_iterate(2, n);
        let image = pushforward(&Multivector::term(0, 2, &[0, 1], LPoly::one()), &g).map_err(|e| e.to_string())?;
        let expect = parse_lpoly(&format!("a^{n}*b^{n}"), &vars).unwrap();
        ensure(image == Multivector::term(0, 2, &[0, 1], expect), format!("g^{n} factor wrong"))?;
    }
    // (u, x) -> (u, y = 1/x), with t as a trailing symbol
    let (u, x) = (LPoly::var(0), LPoly::var(1));
    let inv = |p: &LPoly| p.inv().unwrap();
    let f = ChartMap::new(0, 1, 2, vec![u.clone(), inv(&x)]).with_inverse(ChartMap::new(1, 0, 2, vec![u, inv(&x)]));
    for g in ["t", "t + t^2", "3*t^3"] {
        let gt = parse_lpoly(g, &names(&["u", "x", "t"])).unwrap();
        let l = Multivector::term(0, 2, &[0, 1], &gt * &(&x * &x));
        let image = pushforward(&l, &f).map_err(|e| e.to_string())?;
        ensure(image == Multivector::term(1, 2, &[0, 1], -gt), format!("Hirzebruch image wrong for g = {g}"))?;
    }
    Ok("Hopf g^n factor a^n b^n (n <= 5) and Hirzebruch image -g(t) du^dy".into())
}

fn c4_validation_corpus() -> Outcome {
    for f in ["torus.json", "hopf.json", "hirzebruch_m2_k1.json", "p2_5param.json"] {
        let (code, v, _) = hpd(&["validate", "--family", &example(f), "--order", "3"])?;
        ensure(code == 0 && v["passed"] == Value::Bool(true), format!("{f} does not validate"))?;
    }
    let (code, v, _) = hpd(&["validate", "--family", &example("hopf_free.json")])?;
    ensure(code == 1, "Hopf without relation should fail")?;
    let checks = v["results"]["checks"].as_array().ok_or("missing checks")?;
    let bad: Vec<&Value> = checks.iter().filter(|c| c["passed"] == Value::Bool(false)).collect();
    ensure(bad.len() == 1, format!("{} failing checks", bad.len()))?;
    let vars = names(&["z1", "z2", "a", "b", "t"]);
    let got = parse_lpoly(bad[0]["residual"].as_str().ok_or("no residual")?, &vars).map_err(|e| e.to_string())?;
    let expect = parse_lpoly("(b^3 - a*b)*t*z2^3", &vars).unwrap();
    ensure(got == expect, format!("residual {got:?}"))?;
    Ok("4 families valid at V = 3; Hopf without a = b^m leaves (b^3 - ab) t z2^3".into())
}

fn poly(n: usize) -> impl Strategy<Value = LPoly> {
    prop::collection::vec((prop::collection::vec(0i32..=2, n), -3i64..=3), 0..=3).prop_map(move |terms| {
        let mut p = LPoly::zero();
        for (mut e, c) in terms {
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

fn triple() -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    (1..=3usize).prop_flat_map(|n| (any_mv(n), any_mv(n), any_mv(n)))
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn c5_dgla() -> Outcome {
    let cases = 500;
    runner(cases)
        .run(&triple(), |(a, b, _)| {
            let s = -sign((a.degree() - 1) * (b.degree() - 1));
            prop_assert_eq!(a.schouten(&b).unwrap(), b.schouten(&a).unwrap().scale(&int(s)));
            Ok(())
        })
        .map_err(|e| format!("antisymmetry: {e}"))?;
    runner(cases)
        .run(&triple(), |(a, b, c)| {
            let bc = b.schouten(&c).unwrap();
            if bc.degree() == 0 {
                return Ok(());
            }
            let lhs = a.schouten(&bc).unwrap();
            let r1 = a.schouten(&b).unwrap().schouten(&c).unwrap();
            let r2 = b.schouten(&a.schouten(&c).unwrap()).unwrap().scale(&int(sign((a.degree() - 1) * (b.degree() - 1))));
            prop_assert_eq!(lhs, r1.add(&r2).unwrap());
            Ok(())
        })
        .map_err(|e| format!("jacobi: {e}"))?;
    runner(cases)
        .run(&triple(), |(a, b, c)| {
            let lhs = a.schouten(&b.wedge(&c).unwrap()).unwrap();
            let t1 = a.schouten(&b).unwrap().wedge(&c).unwrap();
            let t2 = b.wedge(&a.schouten(&c).unwrap()).unwrap().scale(&int(sign((a.degree() - 1) * b.degree())));
            prop_assert_eq!(lhs, t1.add(&t2).unwrap());
            Ok(())
        })
        .map_err(|e| format!("leibniz: {e}"))?;
    runner(cases)
        .run(&multivector(3, 2), |s| {
            let defect = s.jacobi_defect().unwrap().get(&(0, 1, 2)).cloned().unwrap_or_else(LPoly::zero);
            prop_assert_eq!(s.schouten(&s).unwrap().component(&[0, 1, 2]), defect.scale(&int(SCHOUTEN_JACOBI_RATIO)));
            Ok(())
        })
        .map_err(|e| format!("normalization: {e}"))?;
    Ok(format!("antisymmetry, Jacobi, Leibniz, normalization: {cases} cases each"))
}

fn random_cochain(k: usize, seed: &[(u8, u8, i8, i8, i8)]) -> TotalCochain {
    let cells: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
    let mut c = TotalCochain::zero(k, 2);
    for &(cell, dir, a, b, coeff) in seed {
        let t = cells[cell as usize % cells.len()];
        let p = t.len() - 1;
        if p > k || k + 1 - p > 2 {
            continue;
        }
        let dirs: Vec<usize> = if k + 1 - p == 2 { vec![0, 1] } else { vec![dir as usize % 2] };
        let allow = |var: usize| t.len() > 1 && t[1..].iter().any(|&r| if t[0] == 0 { r == var + 1 } else { true });
        let ea = if a < 0 && !allow(0) { -a } else { a };
        let eb = if b < 0 && !allow(1) { -b } else { b };
        let m = LPoly::term(int(coeff as i64), Monomial::new(vec![ea as i32, eb as i32]));
        c.add_cell(t.to_vec(), Multivector::term(t[0], 2, &dirs, m)).unwrap();
    }
    c
}

fn c6_d_squared() -> Outcome {
    let cx = p2_complex();
    let cases = 200;
    let strat = (0usize..2, prop::collection::vec((0u8..7, 0u8..2, -3i8..4, -3i8..4, -5i8..6), 1..6));
    runner(cases)
        .run(&strat, |(k, seed)| {
            let c = random_cochain(k, &seed);
            let dd = cx.total_differential(&cx.total_differential(&c).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("D(D c) = 0 for {cases} random cochains"))
}

fn c7_ks() -> Outcome {
    let fam = example("p2_5param.json");
    let (code, v, _) = hpd(&["ks", "--family", &fam])?;
    ensure(code == 0, format!("exit code {code}"))?;
    let rank = v["results"]["matrix"]["rank"].as_u64().ok_or("missing rank")?;
    ensure(rank == 5, format!("rank {rank}"))?;
    for u in 0..5 {
        let dir: Vec<&str> = (0..5).map(|i| if i == u { "1" } else { "0" }).collect();
        let (code, v, _) = hpd(&["infinitesimal", "--family", &fam, "--direction", &dir.join(",")])?;
        ensure(code == 0, format!("cocycle identities fail in direction {}", u + 1))?;
        let checks = v["results"]["checks"].as_array().ok_or("missing checks")?;
        ensure(checks.len() == 7, format!("{} checks", checks.len()))?;
    }
    Ok("KS rank 5; all cocycle identities hold in every direction".into())
}

fn c8_existence() -> Outcome {
    let (code, v, _) = hpd(&["mc-exist", "--family", &example("p2.json"), "--order", "4"])?;
    ensure(code == 0, format!("exit code {code}"))?;
    let r = &v["results"];
    ensure(r["order_reached"] == 4, "did not reach order 4")?;
    ensure(r["verified"] == Value::Bool(true), "defect does not vanish")?;
    let ledger = r["ledger"].as_array().ok_or("missing ledger")?;
    ensure(ledger.len() == 3, "ledger should cover orders 2..4")?;
    for e in ledger {
        ensure(e["obstructed"] == Value::Bool(false), format!("obstructed at {}", e["order"]))?;
        let zero = e["classes"].as_array().unwrap().iter().all(|c| c[1].as_array().unwrap().iter().all(|x| x == "0"));
        ensure(zero, format!("nonzero class at order {}", e["order"]))?;
    }
    Ok("orders 2..4 unobstructed, MC defect zero through order 4".into())
}

fn c9_completeness() -> Outcome {
    let args = ["mc-complete", "--family", &example("p2_5param.json"), "--test", &example("p2_pullback.json"), "--order", "3"];
    let (code, v, _) = hpd(&args)?;
    ensure(code == 0, format!("exit code {code}"))?;
    let r = &v["results"];
    let h: Vec<&str> = r["h"].as_array().ok_or("missing h")?.iter().map(|e| e["value"].as_str().unwrap()).collect();
    ensure(h == ["s1^2 + s1", "0", "0", "0", "0"], format!("h = {h:?}"))?;
    ensure(r["congruences"] == Value::Bool(true), "congruences fail")?;
    Ok(format!("h = (s1 + s1^2, 0, 0, 0, 0) modulo a {}-dimensional gauge; congruences hold", r["gauge_dim"]))
}

fn c10_determinism() -> Outcome {
    let (p2, p25, pb) = (example("p2.json"), example("p2_5param.json"), example("p2_pullback.json"));
    let commands: Vec<Vec<&str>> = vec![
        vec!["cohomology", "--family", &p2, "--lambda0", "x*dx^dw", "-k", "1"],
        vec!["cohomology", "--family", &p2, "--lambda0", "x*dx^dw", "-k", "2"],
        vec!["validate", "--family", &p25],
        vec!["ks", "--family", &p25],
        vec!["infinitesimal", "--family", &p25, "--direction", "1,0,0,0,0"],
        vec!["mc-exist", "--family", &p2, "--order", "4"],
        vec!["mc-complete", "--family", &p25, "--test", &pb, "--order", "3"],
    ];
    for c in &commands {
        let first = hpd(c)?.2;
        let mut threaded = c.clone();
        threaded.extend(["--threads", "1"]);
        ensure(hpd(c)?.2 == first && hpd(&threaded)?.2 == first, format!("`{}` is not reproducible", c[0]))?;
    }
    Ok(format!("{} commands byte-identical across runs and thread counts", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("P2 hypercohomology", c1_hypercohomology),
        ("basis membership", c2_basis_membership),
        ("transformation laws", c3_transformation_laws),
        ("family validation corpus", c4_validation_corpus),
        ("DGLA property suite", c5_dgla),
        ("D^2 = 0", c6_d_squared),
        ("KS isomorphism", c7_ks),
        ("existence solver", c8_existence),
        ("completeness round trip", c9_completeness),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Ok(Err(e)) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: panicked", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
