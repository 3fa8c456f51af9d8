use super::cdga::SemifreeCdga;
use super::poly::Poly;
use crate::error::{Error, Result};

/// A validated cdga morphism, determined by the images of the generators.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    source: SemifreeCdga,
    target: SemifreeCdga,
    images: Vec<Poly>,
}

impl AlgebraMap {
    /// Checks degrees and `D_B ∘ φ = φ ∘ D_A` on every generator.
    pub fn new(source: &SemifreeCdga, target: &SemifreeCdga, images: Vec<Poly>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Invalid("one image per source generator is required".into()));
        }
        for (g, img) in source.gens().iter().zip(&images) {
            if !crate::gca::Ring::same(img.ring(), target.ring()) {
                return Err(Error::RingMismatch);
            }
            if !img.is_homogeneous_of(g.degree) {
                return Err(Error::Degree(format!("image of {} must have degree {}", g.name, g.degree)));
            }
        }
        let map = AlgebraMap { source: source.clone(), target: target.clone(), images };
        for (i, g) in source.gens().iter().enumerate() {
            let lhs = target.apply_differential(&map.images[i]);
            let rhs = map.push(source.diff_of(i));
            if lhs != rhs {
                return Err(Error::NotChainMap(g.name.clone()));
            }
        }
        Ok(map)
    }

    pub fn identity(a: &SemifreeCdga) -> Self {
        let images = (0..a.len()).map(|i| Poly::var(a.ring(), i)).collect();
        AlgebraMap { source: a.clone(), target: a.clone(), images }
    }

    /// Inclusion of a prefix sub-presentation.
    pub fn inclusion(sub: &SemifreeCdga, a: &SemifreeCdga) -> Result<Self> {
        if !sub.is_prefix_of(a) {
            return Err(Error::Precondition("not a prefix sub-presentation".into()));
        }
        let images = (0..sub.len()).map(|i| Poly::var(a.ring(), i)).collect();
        Ok(AlgebraMap { source: sub.clone(), target: a.clone(), images })
    }

    pub fn source(&self) -> &SemifreeCdga {
        &self.source
    }

    pub fn target(&self) -> &SemifreeCdga {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Pushforward of an element of the source.
    pub fn push(&self, p: &Poly) -> Poly {
        p.substitute(&self.images, self.target.ring())
    }

    pub fn compose(&self, then: &AlgebraMap) -> Result<AlgebraMap> {
        let images = self.images.iter().map(|p| then.push(p)).collect();
        AlgebraMap::new(&self.source, &then.target, images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::Generator;

    fn pair() -> (SemifreeCdga, SemifreeCdga) {
        let b = SemifreeCdga::free(vec![Generator::new("x", 0)]).unwrap();
        let a = b.extend(vec![Generator::new("xi", -1)], |r| vec![Poly::var(r, 0).pow(2)]).unwrap();
        (b, a)
    }

    #[test]
    fn identity_and_inclusion() {
        let (b, a) = pair();
        let id = AlgebraMap::identity(&a);
        assert!(AlgebraMap::new(&a, &a, id.images().to_vec()).is_ok());
        assert!(AlgebraMap::new(&b, &a, vec![a.var("x")]).is_ok());
    }

    #[test]
    fn degree_mismatch() {
        let (b, a) = pair();
        assert!(matches!(AlgebraMap::new(&b, &a, vec![a.var("xi")]), Err(Error::Degree(_))));
    }

    #[test]
    fn chain_failure_names_generator() {
        let (_, a) = pair();
        let bad = vec![a.var("x"), a.var("xi").scale(&crate::gca::q(2))];
        assert_eq!(AlgebraMap::new(&a, &a, bad).unwrap_err(), Error::NotChainMap("xi".into()));
    }
}
