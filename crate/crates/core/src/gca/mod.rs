//! Graded-commutative polynomials with Koszul signs, derivations, semifree
//! presentations and their morphisms.

pub mod cdga;
pub mod derivation;
pub mod morphism;
pub mod parse;
pub mod poly;
pub mod ring;

pub use cdga::SemifreeCdga;
pub use derivation::Derivation;
pub use morphism::AlgebraMap;
pub use parse::{parse_poly, parse_presentation};
pub use poly::{q, qf, Poly};
pub use ring::{Generator, Monomial, Ring};
