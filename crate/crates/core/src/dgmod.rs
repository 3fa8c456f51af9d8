//! Finite semifree dg-modules over a presentation.
//!
//! A module has an ordered basis `b_i` and differential matrix `M` with
//! `D b_i = Σ_j M_ij b_j`; coefficients sit on the left and
//! `D(a b) = D(a) b + (−1)^{|a|} a D(b)`.

use std::collections::HashMap;
use std::sync::Arc;

use num::{One, Zero};
use rand::Rng as _;
use serde::Serialize;

use crate::cohom::{ClassBound, Complex, SliceSpec};
use crate::error::{Error, Result};
use crate::gca::parse::{lex, Parser};
use crate::gca::{AlgebraMap, Derivation, Generator, Monomial, Poly, Ring, SemifreeCdga};
use crate::linalg::DenseMat;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisElem {
    pub name: String,
    pub degree: i32,
    pub weight: Option<i64>,
}

impl BasisElem {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        BasisElem { name: name.into(), degree, weight: None }
    }
}

/// `(−1)^{|m|}` applied termwise.
pub fn parity_twist(p: &Poly) -> Poly {
    let r = p.ring().clone();
    Poly::from_terms(
        &r,
        p.terms().iter().map(|(m, c)| (m.clone(), if m.parity(&r) == 1 { -c.clone() } else { c.clone() })),
    )
}

fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

fn odd(n: i32) -> bool {
    n.rem_euclid(2) == 1
}

#[derive(Clone, Debug)]
pub struct DgModule {
    base: SemifreeCdga,
    basis: Vec<BasisElem>,
    diff: Vec<Vec<Poly>>,
}

/// A module map `φ(b_i) = Σ_k Φ_ik c_k` of degree `shift`, satisfying
/// `D φ = (−1)^shift φ D`.
#[derive(Clone, Debug)]
pub struct DgMap {
    pub source: DgModule,
    pub target: DgModule,
    pub matrix: Vec<Vec<Poly>>,
    pub shift: i32,
}

/// Sign data for the duality `M ↦ M† = Hom(M, P^{-1})` with `P = k[−d]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualityContext {
    pub d: i32,
    pub lambda_p: i8,
}

impl DgModule {
    /// Assemble without checking `D² = 0`; degrees of entries are checked.
    pub fn new(base: &SemifreeCdga, basis: Vec<BasisElem>, diff: Vec<Vec<Poly>>) -> Result<Self> {
        let n = basis.len();
        if diff.len() != n || diff.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("differential matrix must be square of basis size".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &basis {
            if !seen.insert(b.name.as_str()) {
                return Err(Error::DuplicateGenerator(b.name.clone()));
            }
        }
        for (i, row) in diff.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !Ring::same(e.ring(), base.ring()) {
                    return Err(Error::RingMismatch);
                }
                let want = basis[i].degree - basis[j].degree + 1;
                if !e.is_homogeneous_of(want) {
                    return Err(Error::Degree(format!(
                        "entry D {} -> {} must have degree {want}",
                        basis[i].name, basis[j].name
                    )));
                }
            }
        }
        Ok(DgModule { base: base.clone(), basis, diff })
    }

    /// Like [`DgModule::new`] but also requires `D² = 0`.
    pub fn checked(base: &SemifreeCdga, basis: Vec<BasisElem>, diff: Vec<Vec<Poly>>) -> Result<Self> {
        let m = DgModule::new(base, basis, diff)?;
        if let Some(i) = m.first_square_violation() {
            return Err(Error::Invalid(format!("D^2 is not zero on {}", m.basis[i].name)));
        }
        Ok(m)
    }

    pub fn zero(base: &SemifreeCdga) -> Self {
        DgModule { base: base.clone(), basis: Vec::new(), diff: Vec::new() }
    }

    /// Free module of rank one on a generator of degree `deg`.
    pub fn free(base: &SemifreeCdga, name: &str, deg: i32) -> Self {
        DgModule { base: base.clone(), basis: vec![BasisElem::new(name, deg)], diff: vec![vec![base.zero()]] }
    }

    pub fn base(&self) -> &SemifreeCdga {
        &self.base
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.diff[i][j]
    }

    pub fn diff(&self) -> &[Vec<Poly>] {
        &self.diff
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    fn entry_degree(&self, i: usize, j: usize) -> i32 {
        self.basis[i].degree - self.basis[j].degree + 1
    }

    /// Apply `D` to an element given by its coefficient vector.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        let mut out = vec![self.base.zero(); self.rank()];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out[i] = &out[i] + &self.base.apply_differential(a);
            let ta = parity_twist(a);
            for (j, e) in self.diff[i].iter().enumerate() {
                if !e.is_zero() {
                    out[j] = &out[j] + &(&ta * e);
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Poly> {
        let mut v = vec![self.base.zero(); self.rank()];
        v[i] = self.base.one();
        v
    }

    /// First basis element on which `D²` fails to vanish.
    pub fn first_square_violation(&self) -> Option<usize> {
        (0..self.rank()).find(|&i| self.apply(&self.apply(&self.basis_vector(i))).iter().any(|p| !p.is_zero()))
    }

    pub fn is_complex(&self) -> bool {
        self.first_square_violation().is_none()
    }

    /// Ring `base ++ basis` in which module elements are the parts linear in the basis.
    pub fn encoding_ring(&self) -> Result<Arc<Ring>> {
        let extra = self
            .basis
            .iter()
            .map(|b| {
                let mut g = Generator::new(format!("[{}]", b.name), b.degree);
                g.weight = b.weight;
                g
            })
            .collect();
        self.base.ring().extend(extra)
    }

    /// The module as a [`Complex`] (one basis element per monomial).
    pub fn complex(&self) -> Complex {
        let ring = self.encoding_ring().expect("bracketed basis names are fresh");
        let nb = self.base.len();
        let mut images: Vec<Poly> =
            (0..nb).map(|i| self.base.diff_of(i).embed(&ring).expect("prefix")).collect();
        for row in &self.diff {
            let mut p = Poly::zero(&ring);
            for (j, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    p = &p + &(&e.embed(&ring).expect("prefix") * &Poly::var(&ring, nb + j));
                }
            }
            images.push(p);
        }
        let d = Derivation::new(&ring, 1, images);
        let class_of = (0..ring.len()).map(|g| usize::from(g >= nb)).collect();
        let bounds = vec![ClassBound::free(), ClassBound::exactly(1)];
        let mut c = Complex::new(ring.clone(), d, class_of, bounds);
        if self.base.is_weighted() {
            let w = ring.gens().iter().map(|g| vec![g.weight.unwrap_or(0)]).collect();
            c = c.with_weights(w);
        }
        c
    }

    pub fn to_poly(&self, ring: &Arc<Ring>, v: &[Poly]) -> Poly {
        let nb = self.base.len();
        let mut p = Poly::zero(ring);
        for (i, a) in v.iter().enumerate() {
            if !a.is_zero() {
                p = &p + &(&a.embed(ring).expect("prefix") * &Poly::var(ring, nb + i));
            }
        }
        p
    }

    /// Inverse of [`DgModule::to_poly`]; terms not linear in the basis are an error.
    pub fn from_poly(&self, p: &Poly) -> Result<Vec<Poly>> {
        let nb = self.base.len();
        let mut out = vec![self.base.zero(); self.rank()];
        for (m, c) in p.terms() {
            let basis_factors: Vec<_> = m.0.iter().filter(|(g, _)| *g as usize >= nb).collect();
            if basis_factors.len() != 1 || basis_factors[0].1 != 1 {
                return Err(Error::Invalid("element is not linear in the basis".into()));
            }
            let j = basis_factors[0].0 as usize - nb;
            let coeff = Monomial(m.0.iter().filter(|(g, _)| (*g as usize) < nb).cloned().collect());
            out[j].add_term(coeff, c.clone());
        }
        Ok(out)
    }

    pub fn cohomology(&self, spec: &SliceSpec) -> crate::cohom::CohomologyReport {
        self.complex().cohomology(spec)
    }

    /// Text for an element: `coef*name + ...`.
    pub fn element_text(&self, v: &[Poly]) -> String {
        let parts: Vec<String> = v
            .iter()
            .zip(&self.basis)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, b)| if a.len() == 1 && a.constant_term().is_one() { b.name.clone() } else { format!("({a})*{}", b.name) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// `M[k]`: degrees drop by `k`, entries pick up `(−1)^{k(|M_ij|+1)}`.
    pub fn shift(&self, k: i32) -> DgModule {
        let basis = self.basis.iter().map(|b| BasisElem { degree: b.degree - k, ..b.clone() }).collect();
        let diff = (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| {
                        let s = odd(k) && !odd(self.entry_degree(i, j));
                        if s {
                            -&self.diff[i][j]
                        } else {
                            self.diff[i][j].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        DgModule { base: self.base.clone(), basis, diff }
    }

    /// Direct sum with basis `self ++ other` (names of `other` suffixed when clashing).
    pub fn sum(&self, other: &DgModule) -> DgModule {
        let n = self.rank();
        let m = other.rank();
        let mut basis = self.basis.clone();
        for b in &other.basis {
            let mut b = b.clone();
            while basis.iter().any(|c| c.name == b.name) {
                b.name.push('\'');
            }
            basis.push(b);
        }
        let z = self.base.zero();
        let mut diff = vec![vec![z; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                diff[i][j] = self.diff[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                diff[n + i][n + j] = other.diff[i][j].clone();
            }
        }
        DgModule { base: self.base.clone(), basis, diff }
    }

    /// `M ⊗_A N` with `D(b⊗c) = Db⊗c + (−1)^{|b|} b⊗Dc`.
    pub fn tensor(&self, other: &DgModule) -> DgModule {
        let (n, m) = (self.rank(), other.rank());
        let mut basis = Vec::new();
        for b in &self.basis {
            for c in &other.basis {
                basis.push(BasisElem::new(format!("{}*{}", b.name, c.name), b.degree + c.degree));
            }
        }
        let z = self.base.zero();
        let mut diff = vec![vec![z; n * m]; n * m];
        for i in 0..n {
            for k in 0..m {
                for j in 0..n {
                    if !self.diff[i][j].is_zero() {
                        diff[i * m + k][j * m + k] = self.diff[i][j].clone();
                    }
                }
                for l in 0..m {
                    let e = &other.diff[k][l];
                    if !e.is_zero() {
                        let s = odd(self.basis[i].degree) ^ (odd(self.basis[i].degree) && odd(other.entry_degree(k, l)));
                        diff[i * m + k][i * m + l] = e.scale(&sign(s));
                    }
                }
            }
        }
        DgModule { base: self.base.clone(), basis, diff }
    }

    /// `M† = Hom(M, P^{-1})`, basis `b_i†` of degree `−d − |b_i|`.
    pub fn dagger(&self, d: i32) -> DgModule {
        let n = self.rank();
        let basis: Vec<BasisElem> = self
            .basis
            .iter()
            .map(|b| BasisElem { name: dagger_name(&b.name), degree: -d - b.degree, weight: b.weight.map(|w| -w) })
            .collect();
        let diff = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let e = &self.diff[j][i];
                        if e.is_zero() {
                            return e.clone();
                        }
                        let s = odd(basis[i].degree) && !odd(self.entry_degree(j, i));
                        e.scale(&-sign(s))
                    })
                    .collect()
            })
            .collect();
        DgModule { base: self.base.clone(), basis, diff }
    }

    /// Same module with new basis weights.
    pub fn reweighted(&self, mut w: impl FnMut(usize, &BasisElem) -> Option<i64>) -> DgModule {
        let mut m = self.clone();
        for (i, b) in m.basis.iter_mut().enumerate() {
            b.weight = w(i, &self.basis[i]);
        }
        m
    }

    /// Untwisted dual `Hom_A(M, A)`.
    pub fn dual(&self) -> DgModule {
        self.dagger(0)
    }

    /// `⋀^p M`, realised on the free algebra of the shifted basis (degree `|b|+1`)
    /// in word length `p`; module degrees are total degree minus `p`.
    pub fn wedge_power(&self, p: u32) -> Result<DgModule> {
        let nb = self.base.len();
        let extra: Vec<Generator> =
            self.basis.iter().map(|b| Generator::new(format!("[{}]", b.name), b.degree + 1)).collect();
        let ring = self.base.ring().extend(extra)?;
        let mut images: Vec<Poly> = (0..nb).map(|i| self.base.diff_of(i).embed(&ring)).collect::<Result<_>>()?;
        for row in &self.diff {
            let mut q = Poly::zero(&ring);
            for (j, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    q = &q + &(&e.embed(&ring)? * &Poly::var(&ring, nb + j));
                }
            }
            images.push(q);
        }
        let der = Derivation::new(&ring, 1, images);
        let class_of = (0..ring.len()).map(|g| usize::from(g >= nb)).collect();
        let bounds = vec![ClassBound::exactly(0), ClassBound::exactly(p)];
        let words = Complex::new(ring.clone(), der.clone(), class_of, bounds).monomials(0);
        let index: HashMap<&Monomial, usize> = words.iter().enumerate().map(|(k, m)| (m, k)).collect();
        let basis: Vec<BasisElem> = words
            .iter()
            .map(|w| {
                let name = if w.is_one() {
                    "1".to_string()
                } else {
                    w.0.iter()
                        .flat_map(|&(g, e)| std::iter::repeat_n(self.basis[g as usize - nb].name.clone(), e as usize))
                        .collect::<Vec<_>>()
                        .join("^")
                };
                BasisElem::new(name, w.degree(&ring) - p as i32)
            })
            .collect();
        let n = words.len();
        let mut diff = vec![vec![self.base.zero(); n]; n];
        for (i, w) in words.iter().enumerate() {
            let img = der.apply(&Poly::term(&ring, w.clone(), Q::one()));
            for (m, c) in img.terms() {
                let coeff = Monomial(m.0.iter().filter(|(g, _)| (*g as usize) < nb).cloned().collect());
                let word = Monomial(m.0.iter().filter(|(g, _)| (*g as usize) >= nb).cloned().collect());
                let j = index[&word];
                let restricted = Poly::term(self.base.ring(), coeff, c.clone());
                diff[i][j] = &diff[i][j] + &restricted;
            }
        }
        DgModule::new(&self.base, basis, diff)
    }

    /// Base change along an algebra map `A → A'`.
    pub fn base_change(&self, f: &AlgebraMap) -> Result<DgModule> {
        if !Ring::same(f.source().ring(), self.base.ring()) {
            return Err(Error::RingMismatch);
        }
        let diff = self.diff.iter().map(|r| r.iter().map(|e| f.push(e)).collect()).collect();
        DgModule::new(f.target(), self.basis.clone(), diff)
    }

    /// Constant part of the differential at a point of the degree-0 generators.
    fn evaluated(&self, point: &[Option<Q>]) -> DenseMat {
        let n = self.rank();
        DenseMat::from_fn(n, n, |i, j| {
            if self.entry_degree(i, j) == 0 {
                self.diff[i][j].evaluate(point)
            } else {
                Q::zero()
            }
        })
    }

    /// Residual basis degrees after cancelling every unit entry of the fibre at `point`.
    pub fn minimal_degrees_at(&self, point: &[Option<Q>]) -> Vec<i32> {
        let mut c = self.evaluated(point);
        let n = self.rank();
        let mut alive = vec![true; n];
        loop {
            let piv = (0..n)
                .filter(|&i| alive[i])
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| alive[j] && !c[(i, j)].is_zero());
            let Some((i, j)) = piv else { break };
            let p = c[(i, j)].clone();
            for k in 0..n {
                if !alive[k] || c[(k, j)].is_zero() || k == i {
                    continue;
                }
                let f = &c[(k, j)] / &p;
                for l in 0..n {
                    if alive[l] && !c[(i, l)].is_zero() {
                        let t = &f * &c[(i, l)];
                        c[(k, l)] -= t;
                    }
                }
            }
            alive[i] = false;
            alive[j] = false;
        }
        (0..n).filter(|&i| alive[i]).map(|i| self.basis[i].degree).collect()
    }

    /// Degrees in which the fibre complex at `point` has cohomology, by ranks.
    pub fn fibre_cohomology_degrees(&self, point: &[Option<Q>]) -> Vec<i32> {
        let c = self.evaluated(point);
        let n = self.rank();
        let mut out = Vec::new();
        let mut degs = self.degrees();
        degs.sort();
        degs.dedup();
        for &i in &degs {
            let rows = |deg: i32| (0..n).filter(move |&k| self.basis[k].degree == deg).collect::<Vec<_>>();
            let (here, below, above) = (rows(i), rows(i - 1), rows(i + 1));
            let sub = |r: &[usize], s: &[usize]| DenseMat::from_fn(r.len(), s.len(), |a, b| c[(r[a], s[b])].clone());
            let out_rank = sub(&here, &above).rank();
            let in_rank = sub(&below, &here).rank();
            if here.len() > out_rank + in_rank {
                out.push(i);
            }
        }
        out
    }

    /// Points at which Tor amplitude is probed: the augmentation and one
    /// random rational point, each kept only if it is a dg point of the base.
    pub fn probe_points(&self, seed: u64) -> Result<Vec<Vec<Option<Q>>>> {
        let a = &self.base;
        let zero: Vec<Option<Q>> = a.gens().iter().map(|g| (g.degree == 0).then(Q::zero)).collect();
        let valid = |pt: &[Option<Q>]| {
            (0..a.len()).filter(|&i| a.gens()[i].degree == -1).all(|i| a.diff_of(i).evaluate(pt).is_zero())
        };
        if !valid(&zero) {
            return Err(Error::Precondition("the base has no augmentation at the origin".into()));
        }
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let random: Vec<Option<Q>> = a
            .gens()
            .iter()
            .map(|g| (g.degree == 0).then(|| Q::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into())))
            .collect();
        let mut pts = vec![zero];
        if valid(&random) {
            pts.push(random);
        }
        Ok(pts)
    }

    /// Tor amplitude `[a, b]` by minimalization at the probe points, or `None`
    /// for the zero module.
    pub fn tor_amplitude(&self) -> Result<Option<(i32, i32)>> {
        let mut degs = Vec::new();
        for pt in self.probe_points(0x746f72)? {
            degs.extend(self.minimal_degrees_at(&pt));
        }
        Ok(range(&degs))
    }

    /// Independent estimate from fibre cohomology (ranks, no elimination).
    pub fn tor_amplitude_oracle(&self) -> Result<Option<(i32, i32)>> {
        let mut degs = Vec::new();
        for pt in self.probe_points(0x746f72)? {
            degs.extend(self.fibre_cohomology_degrees(&pt));
        }
        Ok(range(&degs))
    }

    pub fn identity(&self) -> DgMap {
        let n = self.rank();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.base.one() } else { self.base.zero() }).collect())
            .collect();
        DgMap { source: self.clone(), target: self.clone(), matrix, shift: 0 }
    }
}

fn range(degs: &[i32]) -> Option<(i32, i32)> {
    Some((*degs.iter().min()?, *degs.iter().max()?))
}

pub fn dagger_name(n: &str) -> String {
    match n.strip_suffix('†') {
        Some(inner) => format!("{inner}††"),
        None => format!("{n}†"),
    }
}

impl DgMap {
    pub fn new(source: &DgModule, target: &DgModule, matrix: Vec<Vec<Poly>>, shift: i32) -> Result<Self> {
        if !Ring::same(source.base.ring(), target.base.ring()) {
            return Err(Error::RingMismatch);
        }
        if matrix.len() != source.rank() || matrix.iter().any(|r| r.len() != target.rank()) {
            return Err(Error::Invalid("map matrix has the wrong shape".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                let want = source.basis[i].degree + shift - target.basis[k].degree;
                if !e.is_homogeneous_of(want) {
                    return Err(Error::Degree(format!(
                        "map entry {} -> {} must have degree {want}",
                        source.basis[i].name, target.basis[k].name
                    )));
                }
            }
        }
        Ok(DgMap { source: source.clone(), target: target.clone(), matrix, shift })
    }

    /// Like [`DgMap::new`] and also requires the chain-map identity.
    pub fn checked(source: &DgModule, target: &DgModule, matrix: Vec<Vec<Poly>>, shift: i32) -> Result<Self> {
        let f = DgMap::new(source, target, matrix, shift)?;
        if let Some(i) = f.first_chain_violation() {
            return Err(Error::NotChainMap(source.basis[i].name.clone()));
        }
        Ok(f)
    }

    pub fn zero(source: &DgModule, target: &DgModule) -> DgMap {
        let z = source.base.zero();
        DgMap { source: source.clone(), target: target.clone(), matrix: vec![vec![z; target.rank()]; source.rank()], shift: 0 }
    }

    /// `φ(Σ a_i b_i) = Σ (−1)^{shift·|a_i|} a_i φ(b_i)`.
    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        let mut out = vec![self.target.base.zero(); self.target.rank()];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ta = if odd(self.shift) { parity_twist(a) } else { a.clone() };
            for (k, e) in self.matrix[i].iter().enumerate() {
                if !e.is_zero() {
                    out[k] = &out[k] + &(&ta * e);
                }
            }
        }
        out
    }

    pub fn first_chain_violation(&self) -> Option<usize> {
        let s = sign(odd(self.shift));
        (0..self.source.rank()).find(|&i| {
            let b = self.source.basis_vector(i);
            let lhs = self.target.apply(&self.apply(&b));
            let rhs = self.apply(&self.source.apply(&b));
            lhs.iter().zip(&rhs).any(|(l, r)| *l != r.scale(&s))
        })
    }

    pub fn is_chain_map(&self) -> bool {
        self.first_chain_violation().is_none()
    }

    pub fn compose(&self, then: &DgMap) -> DgMap {
        let matrix = (0..self.source.rank()).map(|i| then.apply(&self.matrix[i])).collect();
        DgMap { source: self.source.clone(), target: then.target.clone(), matrix, shift: self.shift + then.shift }
    }

    pub fn add(&self, other: &DgMap) -> DgMap {
        let matrix = self.matrix.iter().zip(&other.matrix).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
        DgMap { matrix, ..self.clone() }
    }

    pub fn scale(&self, c: &Q) -> DgMap {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|x| x.scale(c)).collect()).collect();
        DgMap { matrix, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Poly::is_zero)
    }

    /// `cone(φ) = M[1] ⊕ N` with `D(s m) = −s D m + φ(m)`; also returns the
    /// inclusion `N → cone` and the projection `cone → M[1]`.
    pub fn cone(&self) -> Result<(DgModule, DgMap, DgMap)> {
        if self.shift != 0 {
            return Err(Error::Precondition("cone needs a degree-0 map".into()));
        }
        let m = self.source.shift(1);
        let sum = m.sum(&self.target);
        let n = self.source.rank();
        let mut diff = sum.diff.clone();
        for i in 0..n {
            for k in 0..self.target.rank() {
                diff[i][n + k] = self.matrix[i][k].clone();
            }
        }
        let cone = DgModule::new(&self.source.base, sum.basis.clone(), diff)?;
        let one = self.source.base.one();
        let z = self.source.base.zero();
        let t = self.target.rank();
        let incl = (0..t).map(|k| (0..n + t).map(|j| if j == n + k { one.clone() } else { z.clone() }).collect()).collect();
        let proj = (0..n + t).map(|j| (0..n).map(|i| if i == j { one.clone() } else { z.clone() }).collect()).collect();
        let incl = DgMap { source: self.target.clone(), target: cone.clone(), matrix: incl, shift: 0 };
        let proj = DgMap { source: cone.clone(), target: m, matrix: proj, shift: 0 };
        Ok((cone, incl, proj))
    }

    /// `φ†: N† → M†`, `φ†(c_k†) = Σ_i (−1)^{|c_k†||Φ_ik|} Φ_ik b_i†`.
    pub fn dagger(&self, d: i32) -> DgMap {
        let src = self.target.dagger(d);
        let tgt = self.source.dagger(d);
        let matrix = (0..self.target.rank())
            .map(|k| {
                (0..self.source.rank())
                    .map(|i| {
                        let e = &self.matrix[i][k];
                        let deg = self.source.basis[i].degree + self.shift - self.target.basis[k].degree;
                        e.scale(&sign(odd(src.basis[k].degree) && odd(deg)))
                    })
                    .collect()
            })
            .collect();
        DgMap { source: src, target: tgt, matrix, shift: self.shift }
    }

    /// Quasi-isomorphism check: the cone is acyclic on the given slices.
    pub fn is_quis(&self, spec: &SliceSpec) -> Result<bool> {
        let (c, _, _) = self.cone()?;
        Ok(c.cohomology(spec).is_zero())
    }

    /// Pushed along an algebra map.
    pub fn base_change(&self, f: &AlgebraMap) -> Result<DgMap> {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|e| f.push(e)).collect()).collect();
        DgMap::new(&self.source.base_change(f)?, &self.target.base_change(f)?, matrix, self.shift)
    }
}

impl DualityContext {
    /// Natural map `M → M††`, `b_i ↦ (−1)^{(d+1)|b_i|} b_i††`, times `λ_P`.
    pub fn eta(&self, m: &DgModule) -> DgMap {
        let n = m.rank();
        let target = m.dagger(self.d).dagger(self.d);
        let lam = Q::from_integer(self.lambda_p.into());
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            let s = sign(odd((self.d + 1) * m.basis[i].degree));
                            Poly::constant(m.base.ring(), s * &lam)
                        } else {
                            m.base.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        DgMap { source: m.clone(), target, matrix, shift: 0 }
    }

    /// `φ: M† → M` is symmetric when `φ† = η ∘ φ` as maps `M† → M††`.
    pub fn is_symmetric(&self, phi: &DgMap) -> bool {
        let lhs = phi.dagger(self.d);
        let rhs = phi.compose(&self.eta(&phi.target));
        lhs.matrix == rhs.matrix
    }
}

/// The sign `λ_P` for which the standard form `dy ∧ dx` on `k[x, y]`,
/// `|y| = −d`, induces a symmetric map `L† → L`.
pub fn calibrate(d: i32) -> Result<DualityContext> {
    if d < 1 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    let a = SemifreeCdga::free(vec![Generator::new("x", 0), Generator::new("y", -d)])?;
    let dr = crate::derham::DeRham::new(&a)?;
    let omega = &dr.dz(1) * &dr.dz(0);
    let phi = crate::shifted::form_map(&dr, &omega, d)?;
    for lambda_p in [1i8, -1] {
        let ctx = DualityContext { d, lambda_p };
        if ctx.is_symmetric(&phi) {
            return Ok(ctx);
        }
    }
    Err(Error::Invalid(format!("no sign makes the standard form symmetric for d = {d}")))
}

/// Parse `module over NAME { basis b : DEG; ...; D b = LIN; }` over `base`.
pub fn parse_module(text: &str, base: &SemifreeCdga) -> Result<DgModule> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    let m = module_body(&mut p, text, base)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(m)
}

pub fn module_body(p: &mut Parser<'_>, text: &str, base: &SemifreeCdga) -> Result<DgModule> {
    p.expect_kw("module")?;
    p.expect_kw("over")?;
    p.ident()?;
    p.expect_sym('{')?;
    let mut basis: Vec<BasisElem> = Vec::new();
    let mut diffs = Vec::new();
    while !p.eat_sym('}') {
        if p.at_end() {
            return Err(p.err("missing `}`"));
        }
        let (line, col) = p.loc();
        if p.is_kw("basis") {
            p.bump();
            let name = p.ident()?;
            p.expect_sym(':')?;
            let deg = p.int()? as i32;
            let mut b = BasisElem::new(name.clone(), deg);
            if p.is_kw("weight") {
                p.bump();
                b.weight = Some(p.int()?);
            }
            p.expect_sym(';')?;
            if basis.iter().any(|c| c.name == name) {
                return Err(Error::parse(line, col, format!("duplicate basis element `{name}`")));
            }
            basis.push(b);
        } else if p.is_kw("D") {
            p.bump();
            let name = p.ident()?;
            p.expect_sym('=')?;
            let body = p.until_semicolon()?;
            diffs.push((line, col, name, body));
        } else {
            return Err(p.err("expected `basis` or `D`"));
        }
    }
    let shell = DgModule { base: base.clone(), basis: basis.clone(), diff: Vec::new() };
    let ring = shell.encoding_ring()?;
    let nb = base.len();
    let mut diff = vec![vec![base.zero(); basis.len()]; basis.len()];
    for (line, col, name, body) in diffs {
        let i = basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::parse(line, col, format!("D of unknown basis element `{name}`")))?;
        let r = ring.clone();
        let bnames: Vec<String> = basis.iter().map(|b| b.name.clone()).collect();
        let resolve = move |n: &str, _| {
            bnames.iter().position(|b| b == n).map(|j| nb + j).or_else(|| r.find(n).filter(|&k| k < nb))
        };
        let mut sub = Parser::new(body, text);
        let v = sub.expr(&ring, &resolve, false)?;
        if !sub.at_end() {
            return Err(sub.err("trailing input in expression"));
        }
        let row = shell.from_poly(&v).map_err(|_| Error::parse(line, col, "differential must be linear in the basis"))?;
        diff[i] = row;
    }
    DgModule::checked(base, basis, diff)
}
