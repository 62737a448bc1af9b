mod common;

use common::field;
use quatlink::algebra::SymbolAlgebra;
use quatlink::fields::{FieldElement, FunctionField, MultiPoly};
use quatlink::search::{seeded_rng, CandidatePool};
use quatlink::valuation::{QuadraticExtension, Value, ValueClass, ValuationContext};
use quatlink::Error;

/// Smallest exponent pair `(i, j)` of `a^i b^j`, comparing `j` first.
fn right_lex_min(p: &MultiPoly) -> (i64, i64) {
    p.terms()
        .iter()
        .map(|(m, _)| (m.exponent(1) as i64, m.exponent(0) as i64))
        .min()
        .map(|(j, i)| (i, j))
        .unwrap()
}

fn oracle_value(e: &FieldElement) -> Value {
    let (ni, nj) = right_lex_min(e.numerator());
    let (di, dj) = right_lex_min(e.denominator());
    Value::from_ints(ni - di, nj - dj)
}

fn setup() -> (FunctionField, ValuationContext) {
    let f = field("F2(a,b)");
    let ctx = ValuationContext::standard(&f).unwrap();
    (f, ctx)
}

fn algebra(f: &FunctionField, gamma: &str, delta: &str) -> SymbolAlgebra {
    SymbolAlgebra::new(f.parse(gamma).unwrap(), f.parse(delta).unwrap()).unwrap()
}

fn half(s: i64, t: i64) -> Value {
    Value::frac(s, 2, t, 2)
}

#[test]
fn monomial_values() {
    let (f, ctx) = setup();
    assert_eq!(ctx.value_of(&f.parse("a^-1").unwrap()).unwrap(), Value::from_ints(-1, 0));
    assert_eq!(ctx.value_of(&f.parse("a^-1*b^-1").unwrap()).unwrap(), Value::from_ints(-1, -1));
    assert_eq!(ctx.value_of(&f.zero()).unwrap(), Value::Infinity);
}

#[test]
fn values_agree_with_exponent_oracle() {
    let (f, ctx) = setup();
    let e = f.parse("(a + b)/a^2").unwrap();
    assert_eq!(oracle_value(&e), Value::from_ints(-1, 0));
    assert_eq!(ctx.value_of(&e).unwrap(), Value::from_ints(-1, 0));
    let pool = CandidatePool::new(&f, 3);
    let mut rng = seeded_rng(11);
    for _ in 0..300 {
        let e = pool.random_ratio(&mut rng);
        assert_eq!(ctx.value_of(&e).unwrap(), oracle_value(&e), "{e}");
    }
}

#[test]
fn right_lex_order_compares_the_second_coordinate_first() {
    assert!(Value::from_ints(5, 0) < Value::from_ints(0, 1));
    assert!(half(2, 1) > half(1, 1));
    assert!(Value::from_ints(-3, 2) < Value::Infinity);
    assert_eq!(half(2, 1).to_string(), "(1,1/2)");
    assert_eq!(ValueClass::frac(1, 2, 0, 1).to_string(), "(1/2,0)");
}

#[test]
fn quadratic_extension_values() {
    let (f, ctx) = setup();
    let (zero, one) = (f.zero(), f.one());
    let gen_as = QuadraticExtension::ArtinSchreier(f.parse("a^-1").unwrap());
    assert_eq!(ctx.extend_to_quadratic(&gen_as, &zero, &one).unwrap(), half(-1, 0));
    let gen_sqrt = QuadraticExtension::Sqrt(f.parse("b").unwrap());
    assert_eq!(ctx.extend_to_quadratic(&gen_sqrt, &zero, &one).unwrap(), half(0, 1));
    assert_eq!(ctx.extend_to_quadratic(&gen_sqrt, &one, &zero).unwrap(), Value::ZERO);
    let square = QuadraticExtension::Sqrt(f.parse("a^2").unwrap());
    assert!(matches!(
        ctx.extend_to_quadratic(&square, &one, &one),
        Err(Error::DegenerateExtension(_))
    ));
}

#[test]
fn generator_values_in_the_first_algebra() {
    let (f, ctx) = setup();
    let a = algebra(&f, "a^-1", "b");
    assert_eq!(ctx.value_of_algebra_element(&a.x(), &a).unwrap(), half(-1, 0));
    assert_eq!(ctx.value_of_algebra_element(&a.xy(), &a).unwrap(), half(-1, 1));
    // closed form a^2 + ab + b^2 gamma at a = b = 1: 1 + 1 + a^-1
    let t = a.add(&a.one(), &a.x());
    let norm = &(&f.one() + &f.one()) + &f.parse("a^-1").unwrap();
    assert_eq!(a.reduced_norm(&t).unwrap(), norm);
    let by_norm = oracle_value(&norm).half();
    assert_eq!(by_norm, half(-1, 0));
    assert_eq!(ctx.value_of_algebra_element(&t, &a).unwrap(), by_norm);
}

#[test]
fn total_ramification_reports() {
    let (f, ctx) = setup();
    let r = ctx.is_totally_ramified(&algebra(&f, "a^-1", "b")).unwrap();
    assert!(r.totally_ramified);
    let want: Vec<ValueClass> = vec![
        ValueClass::frac(1, 2, 0, 1),
        ValueClass::frac(0, 1, 1, 2),
        ValueClass::frac(1, 2, 1, 2),
    ];
    assert_eq!(r.classes, want);

    let r = ctx.is_totally_ramified(&algebra(&f, "a^-2*b^-1", "a")).unwrap();
    assert!(r.totally_ramified);
    assert_eq!(r.value_x, half(-2, -1));
    assert_eq!(r.value_y, half(1, 0));
    assert_eq!(r.value_xy, half(-1, -1));

    let r = ctx.is_totally_ramified(&algebra(&f, "1", "b")).unwrap();
    assert!(!r.totally_ramified);
}

#[test]
fn extension_w_from_the_closed_formula() {
    let (f, ctx) = setup();
    assert_eq!(ctx.w_of_extension(&f.parse("a^-1").unwrap()).unwrap(), half(1, 0));
    assert_eq!(ctx.w_of_extension(&f.parse("a^-1*b^-1").unwrap()).unwrap(), half(1, 1));
    assert!(matches!(
        ctx.w_of_extension(&f.parse("a^-2").unwrap()),
        Err(Error::LemmaInapplicable(_))
    ));
}

#[test]
fn algebra_w_values() {
    let (f, ctx) = setup();
    assert_eq!(ctx.w_of_algebra(&algebra(&f, "a^-2*b^-1", "a")).unwrap(), half(2, 1));
    assert_eq!(ctx.w_of_algebra(&algebra(&f, "a^-1", "b")).unwrap(), half(1, 0));
    assert_eq!(ctx.w_of_algebra(&algebra(&f, "a^-1*b^-1", "b")).unwrap(), half(1, 1));
}

/// Independent sampling: random `t = a + b x + c y + d xy` with `b != 0`,
/// `v(t)` from the reduced norm, minimum of `v(b) - v(t)`.
fn sampled_gap(ctx: &ValuationContext, a: &SymbolAlgebra, count: usize, seed: u64) -> Value {
    let f = a.field();
    let pool = CandidatePool::new(f, 2);
    let mut rng = seeded_rng(seed);
    let mut best = Value::Infinity;
    for _ in 0..count {
        let b = pool.random_nonzero(&mut rng);
        let coords: Vec<FieldElement> = (0..3).map(|_| pool.random_ratio(&mut rng)).collect();
        let t = a.quaternion(&coords[0], &b, &coords[1], &coords[2]);
        let vt = ctx.value_via_norm(&t, a).unwrap();
        best = best.min(ctx.value_of(&b).unwrap().sub(&vt).unwrap());
    }
    best
}

#[test]
fn sampled_trace_gaps_never_beat_w() {
    let (f, ctx) = setup();
    for (gamma, delta, w) in [("a^-1", "b", half(1, 0)), ("a^-1*b^-1", "b", half(1, 1))] {
        let a = algebra(&f, gamma, delta);
        let gap = sampled_gap(&ctx, &a, 1000, 5);
        assert!(gap >= w, "{a}: {gap}");
        // attained at t = x: v(1) - v(x)
        let at_x = ctx.value_via_norm(&a.x(), &a).unwrap().neg().unwrap();
        assert_eq!(at_x, w);
        assert_eq!(ctx.w_of_algebra(&a).unwrap(), w);
    }
}

#[test]
fn library_sample_bounds() {
    let (f, ctx) = setup();
    let a4 = algebra(&f, "a^-2*b^-1", "a");
    assert_eq!(ctx.w_sample_bound(&a4, 1000, 0).unwrap(), half(2, 1));
    let a1 = algebra(&f, "a^-1", "b");
    assert_eq!(ctx.w_sample_bound(&a1, 1, 0).unwrap(), half(1, 0));
    let a3 = algebra(&f, "a^-1*b^-1", "b");
    let bound = ctx.w_sample_bound(&a3, 1000, 7).unwrap();
    assert!(bound >= ctx.w_of_algebra(&a3).unwrap());
    assert_eq!(bound, half(1, 1));
}

#[test]
fn values_need_the_valuation_pair() {
    let f = field("F2(a,b,c)");
    let ctx = ValuationContext::new(&f, "a", "b").unwrap();
    assert!(matches!(
        ctx.value_of(&f.parse("c").unwrap()),
        Err(Error::OutsideValuationField(_))
    ));
}
