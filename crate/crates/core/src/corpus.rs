//! Fixture presentations and seeded random generators for tests and demos.

use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cohom::{ClassBound, Complex, SliceSpec};
use crate::dgmod::{BasisElem, DgModule};
use crate::error::Result;
use crate::gca::{parse_presentation, Derivation, Generator, Monomial, Poly, Ring, SemifreeCdga};
use crate::Q;

pub fn rng(seed: u64) -> ChaCha8Rng {
    <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)
}

/// Weighted base presentations with `D` weight-homogeneous and all weights positive.
pub const BASES: &[(&str, &str)] = &[
    ("point", "field Q;"),
    ("line", "field Q; gen x : 0 weight 1;"),
    ("plane", "field Q; gen x1 : 0 weight 1; gen x2 : 0 weight 1;"),
    ("double-point", "field Q; gen x : 0 weight 1; gen z : -1 weight 2; D z = x^2;"),
    ("cusp", "field Q; gen x1 : 0 weight 3; gen x2 : 0 weight 2; gen z : -1 weight 6; D z = x1^2 - x2^3;"),
    (
        "two-cells",
        "field Q; gen x1 : 0 weight 1; gen x2 : 0 weight 1; gen z1 : -1 weight 2; gen z2 : -1 weight 2; \
         D z1 = x1^2; D z2 = x1*x2; gen w : -2 weight 3; D w = x2*z1 - x1*z2;",
    ),
    ("odd-line", "field Q; gen x : 0 weight 1; gen e : -1 weight 1;"),
    ("deep-free", "field Q; gen x : 0 weight 1; gen z : -2 weight 2;"),
];

pub fn base(name: &str) -> SemifreeCdga {
    let text = BASES.iter().find(|(n, _)| *n == name).expect("known fixture").1;
    parse_presentation(text).expect("fixture parses")
}

/// Twist potentials `(base, d, f)`; each `f` is closed, weight homogeneous and of degree `1 − d`.
pub const TWISTS: &[(&str, i32, &str)] = &[
    ("line", 1, "1/3*x^3"),
    ("line", 1, "0"),
    ("plane", 1, "x1*x2"),
    ("plane", 1, "x1^2*x2 + 1/2*x2^2"),
    ("double-point", 1, "x^3"),
    ("odd-line", 2, "x^2*e"),
    ("odd-line", 1, "x^4"),
];

/// Monomials of `ring` with polynomial degree at most `cap` and the given degree.
pub fn monomials_of_degree(ring: &std::sync::Arc<Ring>, degree: i32, cap: u32) -> Vec<Monomial> {
    let d = Derivation::zero(ring, 1);
    let c = Complex::new(ring.clone(), d, vec![0; ring.len()], vec![ClassBound::free()]);
    c.monomials(cap).into_iter().filter(|m| m.degree(ring) == degree).collect()
}

fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    let mut n: i64 = rng.gen_range(-4..=4);
    if n == 0 {
        n = 1;
    }
    Q::new(n.into(), rng.gen_range(1i64..=3).into())
}

/// A random polynomial of the given degree with up to `terms` terms.
pub fn random_poly(rng: &mut ChaCha8Rng, ring: &std::sync::Arc<Ring>, degree: i32, cap: u32, terms: usize) -> Poly {
    let mons = monomials_of_degree(ring, degree, cap);
    let mut p = Poly::zero(ring);
    for m in mons.choose_multiple(rng, terms.min(mons.len())) {
        p.add_term(m.clone(), small_rational(rng));
    }
    p
}

/// A random element of `ring` (not homogeneous) with up to `terms` terms.
pub fn random_element(rng: &mut ChaCha8Rng, ring: &std::sync::Arc<Ring>, cap: u32, terms: usize) -> Poly {
    let d = Derivation::zero(ring, 1);
    let c = Complex::new(ring.clone(), d, vec![0; ring.len()], vec![ClassBound::free()]);
    let mons = c.monomials(cap);
    let mut p = Poly::zero(ring);
    for m in mons.choose_multiple(rng, terms.min(mons.len())) {
        p.add_term(m.clone(), small_rational(rng));
    }
    p
}

/// A random weighted presentation: `cells` generators with degrees in `[min_degree, 0]`,
/// weights in `1..=3`, each attached along a random cycle of the matching slice.
pub fn random_presentation(rng: &mut ChaCha8Rng, cells: usize, min_degree: i32) -> Result<SemifreeCdga> {
    let mut a = SemifreeCdga::free(Vec::new())?;
    for k in 0..cells {
        let degree = if k == 0 { 0 } else { rng.gen_range(min_degree..=0) };
        let weight = rng.gen_range(1i64..=3);
        let name = if degree == 0 { format!("x{k}") } else { format!("z{k}") };
        let g = Generator::new(name, degree).with_weight(weight);
        let target = if degree == 0 {
            Poly::zero(a.ring())
        } else {
            let c = Complex::of_cdga(&a).with_cdga_weights(&a).weights_only();
            let spec = SliceSpec::new((degree + 1, degree + 1), weight as u32);
            let cycles = c.slice_cycles(&spec, degree + 1, &[weight]);
            let mut t = Poly::zero(a.ring());
            for z in &cycles {
                if rng.gen_bool(0.6) {
                    t = &t + &z.scale(&small_rational(rng));
                }
            }
            if !t.constant_term().is_zero() {
                t = Poly::zero(a.ring());
            }
            t
        };
        a = a.extend(vec![g], |r| vec![target.embed(r).expect("prefix")])?;
    }
    Ok(a)
}

/// A random complex of free modules over `base` with basis degrees
/// `degrees` (one entry per basis element): a sum of elementary two-term
/// pieces `A →^g A` and free summands, conjugated by a unitriangular change of
/// basis in each degree.
pub fn random_module(rng: &mut ChaCha8Rng, base: &SemifreeCdga, degrees: &[i32]) -> Result<DgModule> {
    let n = degrees.len();
    let zero = base.zero();
    let mut diff = vec![vec![zero.clone(); n]; n];
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let partners: Vec<usize> = (0..n).filter(|&j| !used[j] && j != i && degrees[j] == degrees[i] + 1).collect();
        if let Some(&j) = partners.choose(rng) {
            if rng.gen_bool(0.75) {
                used[i] = true;
                used[j] = true;
                let g = match rng.gen_range(0..3) {
                    0 => base.one(),
                    _ => random_poly(rng, base.ring(), 0, 2, 2),
                };
                diff[i][j] = g;
            }
        }
    }
    // conjugate by P = 1 + N with N strictly upper triangular inside each degree
    let mut p = vec![vec![zero.clone(); n]; n];
    let mut pinv = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        p[i][i] = base.one();
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if degrees[i] == degrees[j] && rng.gen_bool(0.5) {
                p[i][j] = random_poly(rng, base.ring(), 0, 1, 2);
            }
        }
    }
    // inverse of a unitriangular matrix by back substitution
    for j in 0..n {
        pinv[j][j] = base.one();
        for i in (0..j).rev() {
            let mut acc = zero.clone();
            for k in (i + 1)..=j {
                acc = &acc + &(&p[i][k] * &pinv[k][j]);
            }
            pinv[i][j] = -acc;
        }
    }
    // D' = P D P^{-1} (entries are even, so no Koszul signs arise)
    let mul = |a: &Vec<Vec<Poly>>, b: &Vec<Vec<Poly>>| -> Vec<Vec<Poly>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(zero.clone(), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect())
            .collect()
    };
    let conj = mul(&mul(&p, &diff), &pinv);
    let basis = degrees.iter().enumerate().map(|(i, &d)| BasisElem::new(format!("b{i}"), d)).collect();
    DgModule::checked(base, basis, conj)
}
