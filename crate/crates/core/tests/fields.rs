mod common;

use common::field;
use quatlink::fields::{artin_schreier_image_test, pth_root, wp, GaloisField, ImageVerdict};
use quatlink::Error;

/// `F_4` as bit pairs `c1*w + c0` reduced by `w^2 = w + 1`.
fn f4_mul(a: u32, b: u32) -> u32 {
    let mut acc = 0;
    for i in 0..2 {
        if b & (1 << i) != 0 {
            acc ^= a << i;
        }
    }
    if acc & 0b100 != 0 {
        acc ^= 0b111;
    }
    acc
}

#[test]
fn f4_tables_match_bit_arithmetic() {
    let gf = GaloisField::new(2, 2).unwrap();
    assert_eq!(gf.generator().code(), 2);
    for a in gf.elements() {
        for b in gf.elements() {
            assert_eq!(gf.add(a, b).code(), a.code() ^ b.code());
            assert_eq!(gf.mul(a, b).code(), f4_mul(a.code(), b.code()));
        }
    }
}

#[test]
fn w_squared_plus_w_is_one_in_f4() {
    let f = field("F4(a)");
    let w = 2;
    assert_eq!(f4_mul(w, w) ^ w, 1);
    assert!(f.parse("w^2 + w").unwrap().is_one());
}

#[test]
fn canonical_forms() {
    let f = field("F2(a,b)");
    let e = f.parse("a^-1 * b").unwrap();
    assert_eq!(e.numerator(), f.parse("b").unwrap().numerator());
    assert_eq!(e.denominator(), f.parse("a").unwrap().numerator());
    assert!(f.parse("(a+b)/(a+b)").unwrap().is_one());
}

#[test]
fn compound_scalar_numerators_print_with_parentheses() {
    let f = field("F4(a,b)");
    let e = f.parse("(w + 1)/(a^2 + b + 1)").unwrap();
    let printed = e.to_string();
    assert_eq!(printed, "(w + 1)/(a^2 + b + 1)");
    assert_eq!(f.parse(&printed).unwrap(), e);
}

#[test]
fn artin_schreier_image_of_zero_is_zero() {
    let f = field("F2(a,b)");
    assert_eq!(artin_schreier_image_test(&f.zero()), ImageVerdict::InImage(f.zero()));
}

#[test]
fn w_is_not_an_artin_schreier_value_in_f4() {
    let f = field("F4");
    let w = f.generator();
    // l^2 + l over all of F_4 gives {0, 1}
    let image: Vec<u32> = (0..4).map(|l| f4_mul(l, l) ^ l).collect();
    assert!(!image.contains(&2));
    assert!(artin_schreier_image_test(&w).is_not_in_image());
    assert!(artin_schreier_image_test(&f.one()).is_in_image());
}

#[test]
fn simple_pole_blocks_artin_schreier_preimages() {
    let f = field("F2(a,b)");
    let c = f.parse("a^-1").unwrap();
    assert!(artin_schreier_image_test(&c).is_not_in_image());
    // no preimage among low-degree ratios either
    let pool = quatlink::search::CandidatePool::new(&f, 1);
    let mut rng = quatlink::search::seeded_rng(1);
    for _ in 0..200 {
        assert_ne!(wp(&pool.random_ratio(&mut rng)), c);
    }
}

#[test]
fn artin_schreier_witnesses_satisfy_the_equation() {
    let f = field("F2(a,b)");
    for text in ["a^2 + a", "a^-2 + a^-1 + b^4 + b", "(a^2 + b^2)/(a^2*b^2) + (a + b)/(a*b)"] {
        let c = f.parse(text).unwrap();
        match artin_schreier_image_test(&c) {
            ImageVerdict::InImage(l) => assert_eq!(wp(&l), c, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn pth_roots() {
    let f = field("F2(a,b)");
    assert_eq!(pth_root(&f.parse("a^2").unwrap()), Some(f.parse("a").unwrap()));
    assert_eq!(pth_root(&f.parse("a").unwrap()), None);
    let g = field("F4");
    let w = g.generator();
    // Frobenius on F_4 codes: w^2 = w + 1, (w + 1)^2 = w
    let root = pth_root(&w).unwrap();
    assert_eq!(root.as_scalar().unwrap().code(), f4_mul(2, 2));
    assert_eq!(root.square(), w);
}

#[test]
fn descriptors_round_trip() {
    for d in ["F2(a,b)", "F4(a,b1,b2)", "F9(b)", "F5(a)", "F3", "F8(a,b)"] {
        assert_eq!(field(d).descriptor(), d);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let f = field("F2(a,b)");
    assert!(matches!(f.parse("a +"), Err(Error::Syntax { .. })));
    assert!(matches!(f.parse("c"), Err(Error::UnknownVariable(_))));
    assert!(matches!(f.parse("1/(a + a)"), Err(Error::DivisionByZero)));
    assert!(quatlink::fields::FunctionField::parse_descriptor("F6(a)").is_err());
}
