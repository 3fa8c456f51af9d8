use proptest::prelude::*;

use dgsymp::cohom::SliceSpec;
use dgsymp::corpus::{self, rng};
use dgsymp::derham::DeRham;
use dgsymp::dgmod::calibrate;
use dgsymp::gca::{parse_presentation, Poly, SemifreeCdga};
use dgsymp::shifted::twisted_standard_form;
use dgsymp::witt::{hyperbolic, lagrangian};
use dgsymp::Q;

fn algebra(seed: u64) -> SemifreeCdga {
    let mut r = rng(seed);
    corpus::random_presentation(&mut r, 3, -2).expect("random presentation")
}

fn sign(odd: bool) -> Q {
    Q::from_integer(if odd { -1 } else { 1 }.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_commutativity(seed in any::<u64>(), p in -3i32..=0, q in -3i32..=0) {
        let a = algebra(seed);
        let mut r = rng(seed ^ 1);
        let x = corpus::random_poly(&mut r, a.ring(), p, 3, 3);
        let y = corpus::random_poly(&mut r, a.ring(), q, 3, 3);
        prop_assert_eq!(&x * &y, (&y * &x).scale(&sign(p * q % 2 != 0)));
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>(), p in -2i32..=0) {
        let a = algebra(seed);
        let mut r = rng(seed ^ 2);
        let x = corpus::random_poly(&mut r, a.ring(), p, 3, 3);
        let y = corpus::random_element(&mut r, a.ring(), 3, 4);
        let lhs = a.apply_differential(&(&x * &y));
        let rhs = &(&a.apply_differential(&x) * &y) + &(&x * &a.apply_differential(&y)).scale(&sign(p % 2 != 0));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_squares_to_zero(seed in any::<u64>()) {
        let a = algebra(seed);
        let mut r = rng(seed ^ 3);
        for _ in 0..4 {
            let x = corpus::random_element(&mut r, a.ring(), 4, 5);
            prop_assert!(a.apply_differential(&a.apply_differential(&x)).is_zero());
        }
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let a = algebra(seed);
        let b = parse_presentation(&a.to_text()).expect("canonical text parses");
        prop_assert_eq!(b.to_text(), a.to_text());
        prop_assert_eq!(b, a);
    }

    #[test]
    fn total_de_rham_differential_squares_to_zero(seed in any::<u64>()) {
        let a = algebra(seed);
        let dr = DeRham::new(&a).expect("de Rham");
        let mut r = rng(seed ^ 4);
        let w = corpus::random_element(&mut r, dr.ring(), 3, 5);
        prop_assert!(dr.d(&dr.d(&w)).is_zero());
        prop_assert!(dr.big_d(&dr.big_d(&w)).is_zero());
        prop_assert!(dr.total(&dr.total(&w)).is_zero());
    }

    #[test]
    fn twisted_standard_forms_are_closed(seed in any::<u64>(), d in 2i32..=4) {
        let b = parse_presentation("field Q; gen x1 : 0; gen x2 : 0; gen e : -1; gen u : -2;").unwrap();
        let mut r = rng(seed);
        let f = corpus::random_poly(&mut r, b.ring(), 1 - d, 4, 3).filter_terms(|m| !m.is_one());
        let t = twisted_standard_form(&b, calibrate(d).unwrap(), &f).expect("twist");
        prop_assert!(t.derham().total(t.omega()).is_zero());
    }

    #[test]
    fn dagger_is_an_involution_and_flips_amplitude(seed in any::<u64>(), d in 1i32..=4) {
        let b = corpus::base("plane");
        let mut r = rng(seed);
        let m = corpus::random_module(&mut r, &b, &[-1, -1, 0]).expect("module");
        let mm = m.dagger(d).dagger(d);
        prop_assert!(m.dagger(d).is_complex());
        let degrees = |m: &dgsymp::dgmod::DgModule| m.basis().iter().map(|e| e.degree).collect::<Vec<_>>();
        prop_assert_eq!(degrees(&mm), degrees(&m));
        let amp = m.tor_amplitude().unwrap();
        let dual = m.dagger(0).tor_amplitude().unwrap();
        prop_assert_eq!(dual, amp.map(|(lo, hi)| (-hi, -lo)));
    }

    #[test]
    fn hyperbolic_forms_are_metabolic(seed in any::<u64>(), d in 1i32..=4) {
        let b = corpus::base("line");
        let mut r = rng(seed);
        let n = corpus::random_module(&mut r, &b, &[-1, 0]).expect("module");
        let sym = hyperbolic(&n, calibrate(d).unwrap()).expect("hyperbolic");
        let spec = SliceSpec::new((-6, 2), 3).with_max_weight(6);
        prop_assert!(sym.check(&spec).unwrap().passed());
        let idx: Vec<usize> = (0..n.rank()).collect();
        prop_assert!(lagrangian(&sym, &idx, &spec).is_ok());
    }
}

#[test]
fn random_poly_respects_degree() {
    let a = algebra(7);
    let mut r = rng(8);
    let p: Poly = corpus::random_poly(&mut r, a.ring(), -1, 3, 4);
    assert!(p.is_zero() || p.is_homogeneous_of(-1));
}
