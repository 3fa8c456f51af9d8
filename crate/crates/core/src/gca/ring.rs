use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// A named generator of a free graded-commutative algebra.
///
/// Degrees are cohomological. Presentations only admit degrees `<= 0`, but the
/// de Rham and exterior-power rings built on top of them contain generators of
/// degree `+1` (the `dz` of a degree-0 `z`), so the type itself does not restrict
/// the sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub weight: Option<i64>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Generator { name: name.into(), degree, weight: None }
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// An ordered list of generators. Polynomials carry an `Arc<Ring>` and
/// arithmetic is only defined between polynomials over the same ring.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    gens: Vec<Generator>,
    index: Vec<(String, usize)>,
}

impl Ring {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Ring>> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() {
                return Err(Error::Invalid("empty generator name".into()));
            }
            if seen.insert(g.name.as_str(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        let mut index: Vec<(String, usize)> =
            gens.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect();
        index.sort();
        Ok(Arc::new(Ring { gens, index }))
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.index
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
            .map(|k| self.index[k].1)
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }

    /// True when `self` lists exactly the first `self.len()` generators of `other`.
    pub fn is_prefix_of(&self, other: &Ring) -> bool {
        self.gens.len() <= other.gens.len()
            && self.gens.iter().zip(&other.gens).all(|(a, b)| a.name == b.name && a.degree == b.degree)
    }

    /// A new ring with `extra` appended.
    pub fn extend(&self, extra: Vec<Generator>) -> Result<Arc<Ring>> {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Ring::new(gens)
    }

    pub fn same(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// A monomial: sorted `(generator index, exponent)` pairs with positive
/// exponents. Odd generators appear with exponent 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![(i as u32, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0
            .binary_search_by_key(&(i as u32), |&(g, _)| g)
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn polydeg(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree(&self, ring: &Ring) -> i32 {
        self.0.iter().map(|&(g, e)| ring.gen(g as usize).degree * e as i32).sum()
    }

    pub fn parity(&self, ring: &Ring) -> u32 {
        self.0
            .iter()
            .filter(|&&(g, _)| ring.is_odd(g as usize))
            .map(|&(_, e)| e)
            .sum::<u32>()
            % 2
    }

    /// Sum of exponents over the generators selected by `pred`.
    pub fn count_where(&self, mut pred: impl FnMut(usize) -> bool) -> u32 {
        self.0.iter().filter(|&&(g, _)| pred(g as usize)).map(|&(_, e)| e).sum()
    }

    pub fn uses_only(&self, mut pred: impl FnMut(usize) -> bool) -> bool {
        self.0.iter().all(|&(g, _)| pred(g as usize))
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.last().map(|&(g, _)| g as usize)
    }

    /// Graded-commutative product with its Koszul sign; `None` when an odd
    /// generator would be squared.
    pub fn mul(&self, other: &Monomial, ring: &Ring) -> Option<(bool, Monomial)> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut negate = false;
        // odd generators of `self` not yet passed by the merge
        let mut odd_left: u32 = self.0.iter().filter(|&&(g, _)| ring.is_odd(g as usize)).count() as u32;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = j >= other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0);
            if take_left {
                let (g, e) = self.0[i];
                if ring.is_odd(g as usize) {
                    odd_left -= 1;
                }
                out.push((g, e));
                i += 1;
            } else if i < self.0.len() && self.0[i].0 == other.0[j].0 {
                let g = self.0[i].0;
                if ring.is_odd(g as usize) {
                    return None;
                }
                out.push((g, self.0[i].1 + other.0[j].1));
                i += 1;
                j += 1;
            } else {
                let (g, e) = other.0[j];
                if ring.is_odd(g as usize) && odd_left % 2 == 1 {
                    negate = !negate;
                }
                out.push((g, e));
                j += 1;
            }
        }
        Some((negate, Monomial(out)))
    }

    /// Remove one factor of generator `i` (which must be present).
    pub fn without_one(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        let k = v.binary_search_by_key(&(i as u32), |&(g, _)| g).expect("generator present");
        if v[k].1 == 1 {
            v.remove(k);
        } else {
            v[k].1 -= 1;
        }
        Monomial(v)
    }

    /// Re-index generators through `map` (old index -> new index). The result is
    /// re-sorted and the sign of the permutation of odd factors is returned.
    pub fn reindex(&self, map: &[usize], target: &Ring) -> (bool, Monomial) {
        let mut acc = (false, Monomial::one());
        for &(g, e) in &self.0 {
            let m = Monomial(vec![(map[g as usize] as u32, e)]);
            let (s, prod) = acc.1.mul(&m, target).expect("distinct generators");
            acc = (acc.0 ^ s, prod);
        }
        acc
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> MonoDisplay<'a> {
        MonoDisplay { mono: self, ring }
    }
}

pub struct MonoDisplay<'a> {
    mono: &'a Monomial,
    ring: &'a Ring,
}

impl fmt::Display for MonoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        for (k, &(g, e)) in self.mono.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            let name = &self.ring.gen(g as usize).name;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<Ring> {
        Ring::new(vec![Generator::new("x", 0), Generator::new("xi", -1), Generator::new("eta", -1)]).unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let r = ring();
        assert!(Monomial::var(1).mul(&Monomial::var(1), &r).is_none());
    }

    #[test]
    fn koszul_swap() {
        let r = ring();
        let (neg, m) = Monomial::var(2).mul(&Monomial::var(1), &r).unwrap();
        assert!(neg);
        assert_eq!(m, Monomial(vec![(1, 1), (2, 1)]));
        let (neg, _) = Monomial::var(1).mul(&Monomial::var(2), &r).unwrap();
        assert!(!neg);
    }

    #[test]
    fn even_factors_commute() {
        let r = ring();
        let (neg, m) = Monomial(vec![(2, 1)]).mul(&Monomial(vec![(0, 2), (1, 1)]), &r).unwrap();
        assert!(neg);
        assert_eq!(m.polydeg(), 4);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Ring::new(vec![Generator::new("x", 0), Generator::new("x", -1)]).is_err());
    }
}
