use std::fmt;
use std::sync::Arc;

use super::derivation::Derivation;
use super::poly::Poly;
use super::ring::{Generator, Monomial, Ring};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::Q;
use num::One;

/// A cell-attachment presentation `k[z_1..z_n | D z_i = f_i]`.
#[derive(Clone, Debug)]
pub struct SemifreeCdga {
    ring: Arc<Ring>,
    diff: Derivation,
}

impl PartialEq for SemifreeCdga {
    fn eq(&self, other: &Self) -> bool {
        Ring::same(&self.ring, &other.ring) && self.diff.images() == other.diff.images()
    }
}

impl SemifreeCdga {
    /// Assemble a presentation without validating it; see [`SemifreeCdga::check_presentation`].
    pub fn from_parts(ring: Arc<Ring>, diffs: Vec<Poly>) -> Result<Self> {
        if diffs.len() != ring.len() {
            return Err(Error::Invalid("one differential per generator is required".into()));
        }
        if diffs.iter().any(|p| !Ring::same(p.ring(), &ring)) {
            return Err(Error::RingMismatch);
        }
        let diff = Derivation::new(&ring, 1, diffs);
        Ok(SemifreeCdga { ring, diff })
    }

    /// Build from generators and a closure producing each differential over the full ring.
    pub fn build(gens: Vec<Generator>, diffs: impl FnOnce(&Arc<Ring>) -> Vec<Poly>) -> Result<Self> {
        let ring = Ring::new(gens)?;
        let d = diffs(&ring);
        SemifreeCdga::from_parts(ring, d)
    }

    /// The polynomial algebra with zero differential on the given generators.
    pub fn free(gens: Vec<Generator>) -> Result<Self> {
        SemifreeCdga::build(gens, |r| vec![Poly::zero(r); r.len()])
    }

    /// Presentation that must pass [`SemifreeCdga::check_presentation`].
    pub fn validated(self) -> Result<Self> {
        let rep = self.check_presentation();
        let first = rep.failures().next().map(|c| format!("{}: {}", c.name, c.detail));
        match first {
            None => Ok(self),
            Some(msg) => Err(Error::Invalid(msg)),
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn gens(&self) -> &[Generator] {
        self.ring.gens()
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    pub fn differential(&self) -> &Derivation {
        &self.diff
    }

    pub fn diff_of(&self, i: usize) -> &Poly {
        self.diff.image(i)
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::named(&self.ring, name)
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(&self.ring)
    }

    pub fn one(&self) -> Poly {
        Poly::one(&self.ring)
    }

    pub fn apply_differential(&self, a: &Poly) -> Poly {
        self.diff.apply(a)
    }

    /// All generators carry a weight.
    pub fn is_weighted(&self) -> bool {
        !self.is_empty() && self.gens().iter().all(|g| g.weight.is_some())
    }

    pub fn weight_of(&self, m: &Monomial) -> Option<i64> {
        m.0.iter()
            .map(|&(g, e)| self.ring.gen(g as usize).weight.map(|w| w * e as i64))
            .sum()
    }

    pub fn check_presentation(&self) -> Report {
        let mut rep = Report::new();
        let gens = self.gens();
        let any_weight = gens.iter().any(|g| g.weight.is_some());
        if any_weight && !self.is_weighted() {
            rep.fail("weights", "weights must be given for all generators or none");
        }
        for (i, g) in gens.iter().enumerate() {
            let f = self.diff_of(i);
            if g.degree > 0 {
                rep.fail(format!("degree({})", g.name), format!("degree {} is positive", g.degree));
            }
            if let Some(w) = g.weight {
                if w < 0 {
                    rep.fail(format!("weight({})", g.name), "negative weight");
                }
            }
            if !f.is_homogeneous_of(g.degree + 1) {
                rep.fail(
                    format!("degree(D {})", g.name),
                    format!("D {} must have degree {}, found {:?}", g.name, g.degree + 1, f.degrees()),
                );
            }
            if f.terms().keys().any(|m| !m.uses_only(|j| j < i)) {
                rep.fail(format!("triangular({})", g.name), format!("D {} uses a generator not attached before it", g.name));
            }
            if self.is_weighted() {
                let w = g.weight.unwrap_or(0);
                if f.terms().keys().any(|m| self.weight_of(m) != Some(w)) {
                    rep.fail(format!("weight(D {})", g.name), format!("D {} is not of weight {w}", g.name));
                }
            }
            let dd = self.diff.apply(f);
            if !dd.is_zero() {
                rep.fail(format!("D^2({})", g.name), format!("D(D {}) = {dd}", g.name));
            }
        }
        if rep.checks.is_empty() {
            rep.pass("presentation");
        }
        rep
    }

    /// The sub-presentation on the first `k` generators.
    pub fn prefix(&self, k: usize) -> Result<SemifreeCdga> {
        let ring = Ring::new(self.gens()[..k].to_vec())?;
        let diffs = (0..k).map(|i| self.diff_of(i).restrict(&ring)).collect::<Result<Vec<_>>>()?;
        SemifreeCdga::from_parts(ring, diffs)
    }

    /// Attach further cells; `diffs` is evaluated over the enlarged ring.
    pub fn extend(&self, extra: Vec<Generator>, diffs: impl FnOnce(&Arc<Ring>) -> Vec<Poly>) -> Result<SemifreeCdga> {
        let ring = self.ring.extend(extra)?;
        let mut all: Vec<Poly> = (0..self.len()).map(|i| self.diff_of(i).embed(&ring)).collect::<Result<_>>()?;
        all.extend(diffs(&ring));
        SemifreeCdga::from_parts(ring, all)
    }

    /// True when `self` is a prefix sub-presentation of `other`.
    pub fn is_prefix_of(&self, other: &SemifreeCdga) -> bool {
        self.ring.is_prefix_of(&other.ring)
            && (0..self.len()).all(|i| self.diff_of(i).embed(other.ring()).ok().as_ref() == Some(other.diff_of(i)))
    }

    /// Zariski localization at a degree-0 element: attach `t` (degree 0) and
    /// `ξ` (degree −1) with `Dξ = t·f − 1`.
    pub fn localize(&self, f: &Poly) -> Result<SemifreeCdga> {
        if !Ring::same(f.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        if !f.is_homogeneous_of(0) {
            return Err(Error::Degree(format!("localizing element {f} is not of degree 0")));
        }
        let t_name = fresh_name(&self.ring, "t");
        let xi_name = fresh_name(&self.ring, "xi");
        let n = self.len();
        self.extend(vec![Generator::new(t_name, 0), Generator::new(xi_name, -1)], |r| {
            let t = Poly::var(r, n);
            let f = f.embed(r).expect("prefix ring");
            vec![Poly::zero(r), &(&t * &f) - &Poly::constant(r, Q::one())]
        })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// `base`, or `base` followed by the first free numeric suffix.
pub fn fresh_name(ring: &Ring, base: &str) -> String {
    if ring.find(base).is_none() {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}{k}")).find(|n| ring.find(n).is_none()).expect("infinite supply")
}

impl fmt::Display for SemifreeCdga {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field Q;")?;
        for g in self.gens() {
            match g.weight {
                Some(w) => writeln!(f, "gen {} : {} weight {};", g.name, g.degree, w)?,
                None => writeln!(f, "gen {} : {};", g.name, g.degree)?,
            }
        }
        for (i, g) in self.gens().iter().enumerate() {
            let d = self.diff_of(i);
            if !d.is_zero() {
                writeln!(f, "D {} = {};", g.name, d)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi_x2() -> SemifreeCdga {
        SemifreeCdga::build(vec![Generator::new("x", 0), Generator::new("xi", -1)], |r| {
            vec![Poly::zero(r), Poly::var(r, 0).pow(2)]
        })
        .unwrap()
    }

    #[test]
    fn valid_presentation_passes() {
        assert!(xi_x2().check_presentation().passed());
    }

    #[test]
    fn self_referential_cell_fails_twice() {
        let a = SemifreeCdga::build(vec![Generator::new("xi", -1)], |r| vec![Poly::var(r, 0)]).unwrap();
        let rep = a.check_presentation();
        assert!(rep.get("degree(D xi)").is_some_and(|c| !c.pass));
        assert!(rep.get("triangular(xi)").is_some_and(|c| !c.pass));
    }

    #[test]
    fn nonzero_square_is_reported() {
        let a = SemifreeCdga::build(
            vec![Generator::new("x", 0), Generator::new("xi", -1), Generator::new("eta", -2)],
            |r| vec![Poly::zero(r), Poly::var(r, 0), Poly::var(r, 1)],
        )
        .unwrap();
        let rep = a.check_presentation();
        assert!(rep.get("D^2(eta)").is_some_and(|c| !c.pass));
    }

    #[test]
    fn localization_shape() {
        let a = SemifreeCdga::free(vec![Generator::new("x", 0)]).unwrap();
        let l = a.localize(&a.var("x")).unwrap();
        assert_eq!(l.diff_of(2).to_string(), "x*t - 1");
        assert!(l.check_presentation().passed());
        assert!(a.localize(&Poly::zero(a.ring())).is_ok());
    }
}
