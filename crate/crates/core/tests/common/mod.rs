//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use asmlam::asm::{Inputs, Machine};
use asmlam::source::parse_machine;
use asmlam::value::{name, Value};
use asmlam::Term;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn euclid() -> Machine {
    load(include_str!("../../machines/euclid.asm"))
}

pub fn unary() -> Machine {
    load(include_str!("../../machines/unary.asm"))
}

pub fn load(src: &str) -> Machine {
    parse_machine(src).unwrap_or_else(|d| panic!("{d}"))
}

pub fn nat_inputs(pairs: &[(&str, u64)]) -> Inputs {
    pairs.iter().map(|(k, v)| (k.to_string(), Value::Nat(*v))).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A random λ-term with at most `budget` nodes, closed under `depth`
/// enclosing binders; uses the Boolean constants and codes.
pub fn random_term(r: &mut StdRng, budget: usize, depth: u32) -> Term {
    if budget <= 1 {
        return leaf(r, depth);
    }
    match r.gen_range(0..10) {
        0..=2 => Term::abs_raw(name(&format!("v{depth}")), random_term(r, budget - 1, depth + 1)),
        3..=6 => {
            let left = r.gen_range(1..budget);
            Term::app(random_term(r, left, depth), random_term(r, budget - left, depth))
        }
        _ => leaf(r, depth),
    }
}

fn leaf(r: &mut StdRng, depth: u32) -> Term {
    match r.gen_range(0..8) {
        0..=3 if depth > 0 => Term::bound(r.gen_range(0..depth)),
        0 | 1 | 4 => Term::code(Value::Bool(r.gen())),
        2 | 5 => Term::constant("not"),
        3 | 6 => Term::constant("and"),
        _ => Term::abs_raw(name("v"), Term::bound(0)),
    }
}

/// A closed random term of at most `budget` nodes.
pub fn random_closed_term(r: &mut StdRng, budget: usize) -> Term {
    let t = random_term(r, budget, 0);
    assert!(t.is_closed());
    t
}

/// Declarations of the random-program corpus: three dynamics over a tiny
/// naturals sort, partial arithmetic, and inputs for every dynamic.
pub const RANDOM_HEADER: &str = "
sort N = 0..3;
static x0 : N input;
static y0 : N input;
static b0 : Bool input;
static lt : N, N -> Bool = builtin lt;
static plus : N, N -> N = builtin plus;
static minus : N, N -> N = builtin minus;
dynamic x : N output;
dynamic y : N output;
dynamic b : Bool;
init x = x0;
init y = y0;
init b = b0;
";

fn nterm(r: &mut StdRng, d: u32) -> String {
    match if d == 0 { r.gen_range(0..3) } else { r.gen_range(0..6) } {
        0 => "x".into(),
        1 => "y".into(),
        2 => r.gen_range(0..4).to_string(),
        3 => format!("plus({}, {})", nterm(r, d - 1), nterm(r, d - 1)),
        4 => format!("minus({}, {})", nterm(r, d - 1), nterm(r, d - 1)),
        _ => "x".into(),
    }
}

fn bterm(r: &mut StdRng, d: u32) -> String {
    match if d == 0 { r.gen_range(0..2) } else { r.gen_range(0..6) } {
        0 => "b".into(),
        1 => format!("lt({}, {})", nterm(r, 0), nterm(r, 0)),
        2 => format!("not({})", bterm(r, d - 1)),
        3 => format!("{} = {}", if r.gen() { "x" } else { "y" }, nterm(r, d - 1)),
        4 => format!("and({}, {})", bterm(r, d - 1), bterm(r, d - 1)),
        _ => format!("lt({}, {})", nterm(r, d - 1), nterm(r, d - 1)),
    }
}

/// A random statement of nesting depth at most `d`.
pub fn random_stmt(r: &mut StdRng, d: u32) -> String {
    let top = if d == 0 { 6 } else { 9 };
    match r.gen_range(0..top) {
        0 => "skip".into(),
        1 => if r.gen_range(0..4) == 0 { "halt".into() } else { "skip".into() },
        2 => if r.gen_range(0..6) == 0 { "fail".into() } else { format!("y := {}", nterm(r, 1)) },
        3 => format!("x := {}", nterm(r, 1)),
        4 => format!("y := {}", nterm(r, 1)),
        5 => format!("b := {}", bterm(r, 1)),
        6 | 7 => {
            let c = bterm(r, 1);
            let t = random_stmt(r, d - 1);
            if r.gen() {
                format!("if {c} then {t} else {}", random_stmt(r, d - 1))
            } else {
                format!("if {c} then {t}")
            }
        }
        _ => {
            let n = r.gen_range(1..4);
            let parts: Vec<String> = (0..n).map(|_| format!("{};", random_stmt(r, d - 1))).collect();
            format!("par {{ {} }}", parts.join(" "))
        }
    }
}

/// A random machine over [`RANDOM_HEADER`] whose program has nesting depth
/// at most `depth`.
pub fn random_machine(r: &mut StdRng, depth: u32) -> (String, Machine) {
    let src = format!("{RANDOM_HEADER}program {}", random_stmt(r, depth));
    let m = load(&src);
    (src, m)
}

/// A random assignment of the corpus inputs.
pub fn random_inputs(r: &mut StdRng) -> Inputs {
    let mut i = nat_inputs(&[("x0", r.gen_range(0..4)), ("y0", r.gen_range(0..4))]);
    i.insert("b0".into(), Value::Bool(r.gen()));
    i
}
