use std::sync::Arc;

use num::{One, Zero};

use super::poly::Poly;
use super::ring::{Monomial, Ring};
use crate::Q;

/// A graded derivation of the free algebra, determined by its values on the
/// generators: θ(ab) = θ(a)b + (−1)^{|θ||a|} a θ(b).
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    ring: Arc<Ring>,
    degree: i32,
    images: Vec<Poly>,
}

impl Derivation {
    pub fn new(ring: &Arc<Ring>, degree: i32, images: Vec<Poly>) -> Self {
        assert_eq!(images.len(), ring.len(), "one image per generator");
        Derivation { ring: ring.clone(), degree, images }
    }

    pub fn zero(ring: &Arc<Ring>, degree: i32) -> Self {
        Derivation::new(ring, degree, vec![Poly::zero(ring); ring.len()])
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Poly {
        &self.images[i]
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn apply_monomial(&self, m: &Monomial) -> Poly {
        let ring = &self.ring;
        let mut out = Poly::zero(ring);
        let mut prefix_deg = 0i32;
        for (k, &(g, e)) in m.0.iter().enumerate() {
            let gi = g as usize;
            let img = &self.images[gi];
            if !img.is_zero() {
                let prefix = Poly::term(ring, Monomial(m.0[..k].to_vec()), Q::one());
                let mut mid = Monomial(Vec::new());
                if e > 1 {
                    mid.0.push((g, e - 1));
                }
                let suffix = Poly::term(ring, Monomial(m.0[k + 1..].to_vec()), Q::one());
                let mut c = Q::from_integer(e.into());
                if self.is_odd() && prefix_deg.rem_euclid(2) == 1 {
                    c = -c;
                }
                let mid = Poly::term(ring, mid, c);
                let t = &(&(&prefix * &mid) * img) * &suffix;
                out.add_scaled(&t, &Q::one());
            }
            prefix_deg += ring.gen(gi).degree * e as i32;
        }
        out
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        debug_assert!(Ring::same(&self.ring, p.ring()));
        let mut out = Poly::zero(&self.ring);
        for (m, c) in p.terms() {
            if m.is_one() {
                continue;
            }
            out.add_scaled(&self.apply_monomial(m), c);
        }
        out
    }

    /// Graded commutator [θ, φ] = θφ − (−1)^{|θ||φ|} φθ, again a derivation.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let sign = if self.is_odd() && other.is_odd() { Q::one() } else { -Q::one() };
        let images = (0..self.ring.len())
            .map(|i| {
                let mut a = self.apply(&other.images[i]);
                a.add_scaled(&other.apply(&self.images[i]), &sign);
                a
            })
            .collect();
        Derivation::new(&self.ring, self.degree + other.degree, images)
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.degree, other.degree);
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect();
        Derivation::new(&self.ring, self.degree, images)
    }

    pub fn scale(&self, c: &Q) -> Derivation {
        Derivation::new(&self.ring, self.degree, self.images.iter().map(|a| a.scale(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Poly::is_zero)
    }

    /// Index of the first generator whose image is not homogeneous of degree
    /// `deg(generator) + degree`.
    pub fn first_degree_violation(&self) -> Option<usize> {
        (0..self.ring.len()).find(|&i| !self.images[i].is_homogeneous_of(self.ring.gen(i).degree + self.degree))
    }
}

/// Sum of coefficient-weighted derivations helper used for Euler-type fields:
/// the derivation sending generator `i` to `c_i · z_i`.
pub fn diagonal(ring: &Arc<Ring>, coeffs: &[Q]) -> Derivation {
    let images = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if c.is_zero() { Poly::zero(ring) } else { Poly::var(ring, i).scale(c) })
        .collect();
    Derivation::new(ring, 0, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::ring::Generator;

    #[test]
    fn odd_derivation_signs() {
        let r = Ring::new(vec![Generator::new("x", 0), Generator::new("xi", -1), Generator::new("eta", -2)]).unwrap();
        let x = Poly::named(&r, "x");
        let xi = Poly::named(&r, "xi");
        let eta = Poly::named(&r, "eta");
        let d = Derivation::new(&r, 1, vec![Poly::zero(&r), &x * &x, &x * &xi]);
        assert_eq!(d.apply(&(&xi * &x)), x.pow(3));
        // D(xi*eta) = D(xi) eta - xi D(eta) = x^2 eta - xi x xi = x^2 eta
        assert_eq!(d.apply(&(&xi * &eta)), &(&x * &x) * &eta);
        // D(x xi) = x D(xi): the cell eta is not a cycle attachment
        assert_eq!(d.apply(&d.apply(&eta)), x.pow(3));
    }

    #[test]
    fn even_derivation_on_powers() {
        let r = Ring::new(vec![Generator::new("x", 0)]).unwrap();
        let x = Poly::named(&r, "x");
        let e = diagonal(&r, &[Q::one()]);
        assert_eq!(e.apply(&x.pow(3)), x.pow(3).scale(&Q::from_integer(3.into())));
    }
}
