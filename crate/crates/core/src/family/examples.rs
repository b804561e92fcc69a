//! Constructors for the standard example families.

use std::collections::BTreeMap;

use super::spec::{ChartSpec, FamilySpec, GeneratorSpec, OverlapSpec, ParamSpec, SpecKind, FAMILY_SCHEMA};
use super::{PoissonFamily, QuotientFamily};
use crate::error::{Error, Result};
use crate::exactalg::LPoly;
use crate::expr::{names, parse_lpoly};
use crate::multivector::ChartMap;

#[derive(Clone, Debug)]
pub enum Family {
    Atlas(PoissonFamily),
    Quotient(QuotientFamily),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExampleKind {
    /// Complex torus of dimension `n` with symbolic period matrix.
    Torus { n: usize },
    /// Hopf surface with generator `(a z1 + t z2^m, b z2)`.
    Hopf { m: u32, impose_relation: bool },
    HirzebruchNagata { m: u32, k: u32 },
    /// Projective plane, `x dx^dw` deformed by the five cubic classes.
    P2,
    /// Projective plane, every Poisson structure: ten parameters around 0.
    P2Full,
}

fn chart(name: &str, vars: &[&str]) -> ChartSpec {
    ChartSpec { name: name.into(), variables: names(vars) }
}

fn overlap(a: &str, b: &str, forward: &[&str], backward: &[&str]) -> OverlapSpec {
    OverlapSpec { pair: [a.into(), b.into()], forward: names(forward), backward: names(backward) }
}

fn pow(var: &str, e: i64) -> String {
    match e {
        0 => "1".into(),
        1 => var.into(),
        _ => format!("{var}^{e}"),
    }
}

/// Projective plane with the standard three charts; `Lambda(t) = (base +
/// sum_u t_u directions[u]) dx^dw` on the first chart, other charts derived.
pub fn p2(base: &str, directions: &[&str], order: u32) -> FamilySpec {
    let params: Vec<String> = (1..=directions.len()).map(|u| format!("t{u}")).collect();
    let mut poly = base.to_string();
    for (p, d) in params.iter().zip(directions) {
        poly.push_str(&format!(" + {p}*{d}"));
    }
    let mut bivectors = BTreeMap::new();
    bivectors.insert("U0".to_string(), format!("({poly})*dx^dw"));
    FamilySpec {
        schema: FAMILY_SCHEMA.into(),
        kind: SpecKind::Atlas,
        name: Some("p2".into()),
        params: ParamSpec { names: params, order },
        symbols: Vec::new(),
        charts: vec![chart("U0", &["x", "w"]), chart("U1", &["x1", "w1"]), chart("U2", &["x2", "w2"])],
        overlaps: vec![
            overlap("U1", "U0", &["1/x", "w/x"], &["1/x1", "w1/x1"]),
            overlap("U2", "U0", &["1/w", "x/w"], &["w2/x2", "1/x2"]),
            overlap("U1", "U2", &["x2/w2", "1/w2"], &["x1/w1", "1/w1"]),
        ],
        triples: vec![["U0".into(), "U1".into(), "U2".into()]],
        bivectors,
        generators: Vec::new(),
        relations: Vec::new(),
    }
}

pub const P2_DIRECTIONS: [&str; 5] = ["w^2", "x^3", "x^2*w", "x*w^2", "w^3"];
pub const P2_ALL_MONOMIALS: [&str; 10] = ["1", "x", "w", "x^2", "x*w", "w^2", "x^3", "x^2*w", "x*w^2", "w^3"];

pub fn p2_full(order: u32) -> FamilySpec {
    p2("0", &P2_ALL_MONOMIALS, order)
}

pub fn hirzebruch_nagata(m: u32, k: u32, order: u32) -> Result<FamilySpec> {
    if m < 1 || k < 1 || m > 2 * k + 2 || 2 * k > m {
        return Err(Error::InvalidParams(format!("need m, k >= 1 and m-2 <= 2k <= m, got m={m}, k={k}")));
    }
    let (m, k) = (m as i64, k as i64);
    let (vm, vk, um, umk) = (pow("v", m), pow("v", k), pow("u", m), pow("u", m - k));
    let e = 2 * k - m + 2;
    let ve = pow("v", e);
    let vmk = pow("v", m - k);
    let mut bivectors = BTreeMap::new();
    bivectors.insert("A".to_string(), "t*x^2*du^dx".to_string());
    bivectors.insert("B".to_string(), "-t*du^dy".to_string());
    bivectors.insert("C".to_string(), format!("-t*{ve}*(w*{vmk} + t)^2*dv^dw"));
    bivectors.insert("D".to_string(), format!("t*{ve}*({vmk} + t*z)^2*dv^dz"));
    Ok(FamilySpec {
        schema: FAMILY_SCHEMA.into(),
        kind: SpecKind::Atlas,
        name: Some(format!("hirzebruch_nagata_m{m}_k{k}")),
        params: ParamSpec { names: names(&["t"]), order },
        symbols: Vec::new(),
        charts: vec![chart("A", &["u", "x"]), chart("B", &["u", "y"]), chart("C", &["v", "w"]), chart("D", &["v", "z"])],
        overlaps: vec![
            overlap("A", "B", &["u", "1/y"], &["u", "1/x"]),
            overlap("C", "D", &["v", "1/z"], &["v", "1/w"]),
            overlap("A", "C", &["1/v", &format!("{vm}*w + t*{vk}")], &["1/u", &format!("x*{um} - t*{umk}")]),
            overlap("A", "D", &["1/v", &format!("{vm}/z + t*{vk}")], &["1/u", &format!("1/(x*{um} - t*{umk})")]),
            overlap("B", "C", &["1/v", &format!("1/({vm}*w + t*{vk})")], &["1/u", &format!("{um}/y - t*{umk}")]),
            overlap("B", "D", &["1/v", &format!("z/({vm} + t*{vk}*z)")], &["1/u", &format!("y/({um} - t*{umk}*y)")]),
        ],
        triples: vec![
            ["A".into(), "B".into(), "C".into()],
            ["A".into(), "B".into(), "D".into()],
            ["A".into(), "C".into(), "D".into()],
            ["B".into(), "C".into(), "D".into()],
        ],
        bivectors,
        generators: Vec::new(),
        relations: Vec::new(),
    })
}

pub fn hopf(m: u32, impose_relation: bool) -> FamilySpec {
    let mut bivectors = BTreeMap::new();
    bivectors.insert("W".to_string(), format!("t*z2^{}*dz1^dz2", m + 1));
    FamilySpec {
        schema: FAMILY_SCHEMA.into(),
        kind: SpecKind::Quotient,
        name: Some(format!("hopf_m{m}")),
        params: ParamSpec { names: names(&["t"]), order: 3 },
        symbols: names(&["a", "b"]),
        charts: vec![chart("W", &["z1", "z2"])],
        overlaps: Vec::new(),
        triples: Vec::new(),
        bivectors,
        generators: vec![GeneratorSpec {
            map: vec![format!("a*z1 + t*{}", pow("z2", m as i64)), "b*z2".into()],
            inverse: Some(vec![format!("a^-1*z1 - a^-1*b^-{m}*t*{}", pow("z2", m as i64)), "b^-1*z2".into()]),
        }],
        relations: if impose_relation { vec![format!("a = b^{m}")] } else { Vec::new() },
    }
}

/// The iterate `g^n` of the Hopf generator on variables `[z1, z2, a, b, t]`,
/// with its inverse.
pub fn hopf_iterate(m: u32, n: u32) -> ChartMap<LPoly> {
    let vars = names(&["z1", "z2", "a", "b", "t"]);
    let p = |s: &str| parse_lpoly(s, &vars).expect("well-formed");
    let (m, n) = (m as i64, n as i64);
    let fwd = vec![p(&format!("a^{n}*z1 + {n}*a^{}*t*z2^{m}", n - 1)), p(&format!("b^{n}*z2"))];
    let bwd = vec![p(&format!("a^-{n}*z1 - {n}*a^-1*b^-{}*t*z2^{m}", n * m)), p(&format!("b^-{n}*z2"))];
    ChartMap::new(0, 0, 2, fwd).with_inverse(ChartMap::new(0, 0, 2, bwd))
}

pub fn torus(n: usize) -> FamilySpec {
    let z: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    let s: Vec<String> = (1..=n).flat_map(|a| (1..=n).map(move |b| format!("s{a}{b}"))).collect();
    let mut f = Vec::new();
    let mut terms = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            f.push(format!("f{i}{j}"));
            terms.push(format!("f{i}{j}*dz{i}^dz{j}"));
        }
    }
    let mut generators = Vec::new();
    for j in 0..2 * n {
        let map: Vec<String> = (0..n)
            .map(|a| {
                let shift = if j < n {
                    if a == j { "1".to_string() } else { "0".to_string() }
                } else {
                    format!("s{}{}", a + 1, j - n + 1)
                };
                format!("{} + {shift}", z[a])
            })
            .collect();
        let inverse = map.iter().map(|c| c.replacen(" + ", " - ", 1)).collect();
        generators.push(GeneratorSpec { map, inverse: Some(inverse) });
    }
    let mut bivectors = BTreeMap::new();
    bivectors.insert("C".to_string(), if terms.is_empty() { "0".into() } else { terms.join(" + ") });
    let mut symbols = s;
    symbols.extend(f);
    FamilySpec {
        schema: FAMILY_SCHEMA.into(),
        kind: SpecKind::Quotient,
        name: Some(format!("torus_n{n}")),
        params: ParamSpec { names: Vec::new(), order: 3 },
        symbols,
        charts: vec![ChartSpec { name: "C".into(), variables: z }],
        overlaps: Vec::new(),
        triples: Vec::new(),
        bivectors,
        generators,
        relations: Vec::new(),
    }
}

pub fn build_example(kind: &ExampleKind, order: u32) -> Result<Family> {
    let spec = match kind {
        ExampleKind::Torus { n } => {
            if *n == 0 {
                return Err(Error::InvalidParams("torus dimension must be positive".into()));
            }
            torus(*n)
        }
        ExampleKind::Hopf { m, impose_relation } => {
            if *m == 0 {
                return Err(Error::InvalidParams("Hopf exponent m must be positive".into()));
            }
            hopf(*m, *impose_relation)
        }
        ExampleKind::HirzebruchNagata { m, k } => hirzebruch_nagata(*m, *k, order)?,
        ExampleKind::P2 => p2("x", &P2_DIRECTIONS, order),
        ExampleKind::P2Full => p2_full(order),
    };
    spec.build()
}
