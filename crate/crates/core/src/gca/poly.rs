use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Signed, Zero};

use super::ring::{Monomial, Ring};
use crate::error::{Error, Result};
use crate::Q;

/// An element of the free graded-commutative algebra over ℚ on the generators
/// of `ring`. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        Ring::same(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Poly::constant(ring, Q::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: Q) -> Self {
        Poly::term(ring, Monomial::one(), c)
    }

    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        Poly::term(ring, Monomial::var(i), Q::one())
    }

    /// Generator by name; panics on unknown names (test and construction helper).
    pub fn named(ring: &Arc<Ring>, name: &str) -> Self {
        let i = ring.find(name).unwrap_or_else(|| panic!("unknown generator {name}"));
        Poly::var(ring, i)
    }

    pub fn term(ring: &Arc<Ring>, m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Arc<Ring>, it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero(ring);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Q) {
        debug_assert!(Ring::same(&self.ring, &other.ring));
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    /// The set of cohomological degrees of the terms.
    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.terms.keys().map(|m| m.degree(&self.ring)).collect();
        d.sort();
        d.dedup();
        d
    }

    /// `Some(deg)` for a nonzero homogeneous element, `None` for zero or mixed.
    pub fn degree(&self) -> Option<i32> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Homogeneous degree, treating zero as homogeneous of any degree.
    pub fn is_homogeneous_of(&self, deg: i32) -> bool {
        self.terms.keys().all(|m| m.degree(&self.ring) == deg)
    }

    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.ring));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn max_polydeg(&self) -> u32 {
        self.terms.keys().map(|m| m.polydeg()).max().unwrap_or(0)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        if !Ring::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        let mut out = Poly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = ma.mul(mb, &self.ring) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        if !Ring::same(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Move into a ring whose generator list starts with this ring's generators.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<Poly> {
        if Ring::same(&self.ring, target) {
            return Ok(self.clone());
        }
        if !self.ring.is_prefix_of(target) {
            return Err(Error::RingMismatch);
        }
        Ok(Poly { ring: target.clone(), terms: self.terms.clone() })
    }

    /// Inverse of [`Poly::embed`]; fails when a term uses a generator outside the prefix.
    pub fn restrict(&self, target: &Arc<Ring>) -> Result<Poly> {
        if !target.is_prefix_of(&self.ring) {
            return Err(Error::RingMismatch);
        }
        let n = target.len();
        if self.terms.keys().any(|m| !m.uses_only(|g| g < n)) {
            return Err(Error::Invalid("element uses generators outside the sub-presentation".into()));
        }
        Ok(Poly { ring: target.clone(), terms: self.terms.clone() })
    }

    /// Rename generators by name into another ring (all names must exist there
    /// with the same degrees).
    pub fn rename_into(&self, target: &Arc<Ring>) -> Result<Poly> {
        let map: Vec<usize> = self
            .ring
            .gens()
            .iter()
            .map(|g| match target.find(&g.name) {
                Some(i) if target.gen(i).degree == g.degree => Ok(i),
                _ => Err(Error::UnknownGenerator(g.name.clone())),
            })
            .collect::<Result<_>>()?;
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let (neg, mm) = m.reindex(&map, target);
            out.add_term(mm, if neg { -c.clone() } else { c.clone() });
        }
        Ok(out)
    }

    /// Split by a predicate on monomials.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Substitute every generator by a polynomial in the target ring
    /// (algebra morphism on the free algebra).
    pub fn substitute(&self, images: &[Poly], target: &Arc<Ring>) -> Poly {
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(target, c.clone());
            for &(g, e) in &m.0 {
                for _ in 0..e {
                    acc = &acc * &images[g as usize];
                }
            }
            out.add_scaled(&acc, &Q::one());
        }
        out
    }

    /// Evaluate at a point: `values[i]` for generator `i` (`None` sends the
    /// generator to zero). Only meaningful on the polynomial part.
    pub fn evaluate(&self, values: &[Option<Q>]) -> Q {
        let mut total = Q::zero();
        'terms: for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(g, e) in &m.0 {
                match &values[g as usize] {
                    Some(x) => {
                        for _ in 0..e {
                            v *= x;
                        }
                    }
                    None => continue 'terms,
                }
            }
            total += v;
        }
        total
    }

    /// Canonical text form, parseable by [`crate::gca::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Terms in printing order: higher polynomial degree first, then monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.polydeg().cmp(&a.0.polydeg()).then(a.0.cmp(b.0)));
        v
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", m.display(&self.ring))?;
            } else {
                write!(f, "{a}*{}", m.display(&self.ring))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomials over different rings")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert!(Ring::same(&self.ring, &rhs.ring), "polynomials over different rings");
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomials over different rings")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::ring::Generator;

    fn ring() -> Arc<Ring> {
        Ring::new(vec![Generator::new("x", 0), Generator::new("xi", -1), Generator::new("eta", -1)]).unwrap()
    }

    #[test]
    fn even_square() {
        let r = ring();
        let x = Poly::named(&r, "x");
        assert_eq!((&x * &x).to_string(), "x^2");
    }

    #[test]
    fn odd_square_is_zero() {
        let r = ring();
        let xi = Poly::named(&r, "xi");
        assert!((&xi * &xi).is_zero());
    }

    #[test]
    fn koszul_sign() {
        let r = ring();
        let xi = Poly::named(&r, "xi");
        let eta = Poly::named(&r, "eta");
        assert_eq!(&eta * &xi, -(&xi * &eta));
    }

    #[test]
    fn mismatch_is_an_error() {
        let r = ring();
        let s = Ring::new(vec![Generator::new("y", 0)]).unwrap();
        assert!(matches!(Poly::named(&r, "x").try_mul(&Poly::named(&s, "y")), Err(Error::RingMismatch)));
    }

    #[test]
    fn printing() {
        let r = ring();
        let x = Poly::named(&r, "x");
        let p = &x.pow(3).scale(&qf(1, 3)) - &Poly::constant(&r, q(2));
        assert_eq!(p.to_string(), "1/3*x^3 - 2");
    }
}
