//! Cohomology of complexes realised inside a free graded-commutative algebra,
//! computed on finite slices by exact elimination.
//!
//! A [`Complex`] is a ring with a degree-one derivation, a class structure that
//! bounds how often generators of each class may occur (module basis elements
//! occur exactly once, forms have bounded wedge degree), an optional monomial
//! filter realising quotient complexes, and an optional multi-grading.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gca::{Derivation, Monomial, Poly, Ring, SemifreeCdga};
use crate::linalg::{unit, ColMatrix, Echelon, SVec};
use crate::Q;

/// Truncation parameters for slicing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceSpec {
    /// Cohomological window `[min, max]`.
    pub window: (i32, i32),
    /// Cap on the polynomial degree of coefficients.
    pub max_polydeg: u32,
    /// Cap on the (summed) weight, when a grading is present.
    pub max_weight: Option<i64>,
}

impl SliceSpec {
    pub fn new(window: (i32, i32), max_polydeg: u32) -> Self {
        SliceSpec { window, max_polydeg, max_weight: None }
    }

    pub fn with_max_weight(mut self, w: i64) -> Self {
        self.max_weight = Some(w);
        self
    }
}

/// Occurrence bounds for one class of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassBound {
    pub min: u32,
    pub max: Option<u32>,
    /// Whether generators of this class count towards the polynomial degree.
    /// Uncounted classes must have a finite `max`.
    pub counted: bool,
}

impl ClassBound {
    pub fn free() -> Self {
        ClassBound { min: 0, max: None, counted: true }
    }

    pub fn exactly(n: u32) -> Self {
        ClassBound { min: n, max: Some(n), counted: false }
    }

    pub fn counted_range(min: u32, max: Option<u32>) -> Self {
        ClassBound { min, max, counted: true }
    }
}

type Keep = Arc<dyn Fn(&Monomial) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Complex {
    ring: Arc<Ring>,
    d: Derivation,
    class_of: Vec<usize>,
    bounds: Vec<ClassBound>,
    weights: Vec<Vec<i64>>,
    keep: Option<Keep>,
    polydeg_keys: bool,
}

impl std::fmt::Debug for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Complex")
            .field("ring", &self.ring)
            .field("class_of", &self.class_of)
            .field("bounds", &self.bounds)
            .field("weights", &self.weights)
            .finish()
    }
}

/// One cohomology slice.
#[derive(Clone, Debug, Serialize)]
pub struct SliceCohomology {
    pub degree: i32,
    pub weight: Vec<i64>,
    pub dim: usize,
    pub chain_dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
    pub exact: bool,
    #[serde(serialize_with = "ser_polys")]
    pub representatives: Vec<Poly>,
}

fn ser_polys<S: serde::Serializer>(v: &[Poly], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub spec: SliceSpec,
    /// Whether a multi-grading preserved by the differential was used.
    pub graded: bool,
    pub slices: Vec<SliceCohomology>,
}

impl CohomologyReport {
    pub fn all_exact(&self) -> bool {
        self.slices.iter().all(|s| s.exact)
    }

    /// Total dimension in a cohomological degree, summed over weights.
    pub fn dim(&self, degree: i32) -> usize {
        self.slices.iter().filter(|s| s.degree == degree).map(|s| s.dim).sum()
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for i in self.spec.window.0..=self.spec.window.1 {
            m.insert(i, self.dim(i));
        }
        m
    }

    /// Dimension of the slices whose first weight component is `w`.
    pub fn dim_at(&self, degree: i32, w: i64) -> usize {
        self.slices.iter().filter(|s| s.degree == degree && s.weight.first() == Some(&w)).map(|s| s.dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.dim == 0)
    }
}

/// Outcome of [`Complex::solve_boundary`].
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    Primitive(Poly),
    /// Not a boundary in the slice; the residue is the target reduced modulo
    /// the boundaries that were found.
    NotBoundary { residue: Poly },
}

const INSIDE: usize = 1 << 40;

/// Monomials of a slice key, split by whether they respect the degree cap.
#[derive(Default, Debug, Clone)]
struct Bucket {
    inside: Vec<Monomial>,
    beyond: usize,
}

impl Complex {
    /// A cdga as a complex (all generators in one unbounded class).
    pub fn of_cdga(a: &SemifreeCdga) -> Self {
        Complex::new(a.ring().clone(), a.differential().clone(), vec![0; a.len()], vec![ClassBound::free()])
    }

    pub fn new(ring: Arc<Ring>, d: Derivation, class_of: Vec<usize>, bounds: Vec<ClassBound>) -> Self {
        assert_eq!(class_of.len(), ring.len());
        assert!(class_of.iter().all(|&c| c < bounds.len()));
        assert!(bounds.iter().all(|b| b.counted || b.max.is_some()), "uncounted classes need a bound");
        let weights = vec![Vec::new(); ring.len()];
        Complex { ring, d, class_of, bounds, weights, keep: None, polydeg_keys: true }
    }

    /// Use the presentation's own weights when every generator has one.
    pub fn with_cdga_weights(self, a: &SemifreeCdga) -> Self {
        if a.is_weighted() {
            let w = a.gens().iter().map(|g| vec![g.weight.unwrap_or(0)]).collect();
            self.with_weights(w)
        } else {
            self
        }
    }

    /// Weight vectors, one per generator (all of the same length).
    pub fn with_weights(mut self, weights: Vec<Vec<i64>>) -> Self {
        assert_eq!(weights.len(), self.ring.len());
        self.weights = weights;
        self
    }

    /// Restrict to monomials satisfying `keep`; differentials are projected
    /// onto them (a quotient complex when the kept span is closed upward).
    pub fn with_filter(mut self, keep: impl Fn(&Monomial) -> bool + Send + Sync + 'static) -> Self {
        self.keep = Some(Arc::new(keep));
        self
    }

    /// Slice by weights only, so that slice keys of different complexes match.
    pub fn weights_only(mut self) -> Self {
        self.polydeg_keys = false;
        self
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn differential(&self) -> &Derivation {
        &self.d
    }

    fn counted(&self, g: usize) -> bool {
        self.bounds[self.class_of[g]].counted
    }

    pub fn polydeg(&self, m: &Monomial) -> u32 {
        m.count_where(|g| self.counted(g))
    }

    fn admissible(&self, m: &Monomial) -> bool {
        let mut counts = vec![0u32; self.bounds.len()];
        for &(g, e) in &m.0 {
            counts[self.class_of[g as usize]] += e;
        }
        counts.iter().zip(&self.bounds).all(|(c, b)| *c >= b.min && b.max.is_none_or(|mx| *c <= mx))
            && self.keep.as_ref().is_none_or(|k| k(m))
    }

    /// Apply the differential and project onto admissible monomials.
    pub fn apply(&self, p: &Poly) -> Poly {
        let raw = self.d.apply(p);
        raw.filter_terms(|m| self.admissible(m))
    }

    pub fn project(&self, p: &Poly) -> Poly {
        p.filter_terms(|m| self.admissible(m))
    }

    fn weight(&self, m: &Monomial) -> Vec<i64> {
        let k = self.weights.first().map_or(0, Vec::len);
        let mut w = vec![0i64; k];
        for &(g, e) in &m.0 {
            for (a, b) in w.iter_mut().zip(&self.weights[g as usize]) {
                *a += b * e as i64;
            }
        }
        w
    }

    /// True when the differential maps each weight into itself.
    pub fn weight_homogeneous(&self) -> bool {
        if self.weights.first().is_none_or(Vec::is_empty) {
            return false;
        }
        (0..self.ring.len()).all(|g| {
            let w = self.weight(&Monomial::var(g));
            self.d.image(g).terms().keys().all(|m| self.weight(m) == w)
        })
    }

    /// True when the differential preserves the counted polynomial degree.
    pub fn polydeg_homogeneous(&self) -> bool {
        (0..self.ring.len()).all(|g| {
            let p = self.polydeg(&Monomial::var(g));
            self.d.image(g).terms().keys().all(|m| self.polydeg(m) == p)
        })
    }

    /// Grading used for slicing: the weights when D preserves them, extended
    /// by the polynomial degree when D preserves that too.
    fn grading(&self) -> (bool, bool) {
        (self.weight_homogeneous(), self.polydeg_keys && self.polydeg_homogeneous())
    }

    fn key(&self, m: &Monomial, by_weight: bool, by_polydeg: bool) -> (i32, Vec<i64>) {
        let mut w = if by_weight { self.weight(m) } else { Vec::new() };
        if by_polydeg {
            w.push(self.polydeg(m) as i64);
        }
        (m.degree(&self.ring), w)
    }

    /// All admissible monomials with counted polynomial degree at most `cap`.
    pub fn monomials(&self, cap: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut counts = vec![0u32; self.bounds.len()];
        let mut cur = Vec::new();
        self.enumerate(0, cap, &mut counts, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, g: usize, cap: u32, counts: &mut [u32], cur: &mut Vec<(u32, u32)>, out: &mut Vec<Monomial>) {
        if g == self.ring.len() {
            let m = Monomial(cur.clone());
            if self.admissible(&m) {
                out.push(m);
            }
            return;
        }
        let c = self.class_of[g];
        let counted = self.counted(g);
        let used: u32 = if counted {
            cur.iter().filter(|&&(h, _)| self.counted(h as usize)).map(|&(_, e)| e).sum()
        } else {
            0
        };
        let class_room = self.bounds[c].max.map(|mx| mx.saturating_sub(counts[c]));
        let mut max_e = if counted { (cap - used).min(class_room.unwrap_or(u32::MAX)) } else { class_room.expect("bounded class") };
        if self.ring.is_odd(g) {
            max_e = max_e.min(1);
        }
        for e in 0..=max_e {
            if e > 0 {
                cur.push((g as u32, e));
                counts[c] += e;
            }
            self.enumerate(g + 1, cap, counts, cur, out);
            if e > 0 {
                cur.pop();
                counts[c] -= e;
            }
        }
    }

    fn buckets(&self, spec: &SliceSpec, by_weight: bool, by_polydeg: bool) -> HashMap<(i32, Vec<i64>), Bucket> {
        let mut map: HashMap<(i32, Vec<i64>), Bucket> = HashMap::new();
        let cap = spec.max_polydeg + if by_polydeg { 0 } else { 2 };
        for m in self.monomials(cap) {
            let key = self.key(&m, by_weight, by_polydeg);
            if key.0 < spec.window.0 - 1 || key.0 > spec.window.1 + 1 {
                continue;
            }
            let b = map.entry(key).or_default();
            if self.polydeg(&m) <= spec.max_polydeg {
                b.inside.push(m);
            } else {
                b.beyond += 1;
            }
        }
        map
    }

    /// A slice is provably complete when the grading includes the polynomial
    /// degree, or when all counted generators have positive weight (so that
    /// the polynomial degree is bounded by the weight).
    fn complete(&self, w: &[i64], spec: &SliceSpec, by_weight: bool, by_polydeg: bool) -> bool {
        if by_polydeg {
            return true;
        }
        if !by_weight {
            return false;
        }
        let positive = (0..self.ring.len())
            .filter(|&g| self.counted(g))
            .all(|g| self.weights[g].iter().all(|&x| x >= 0) && self.weights[g].iter().sum::<i64>() >= 1);
        positive && w.iter().sum::<i64>() <= spec.max_polydeg as i64
    }

    fn weight_ok(&self, w: &[i64], by_weight: bool, spec: &SliceSpec) -> bool {
        match (spec.max_weight, by_weight) {
            (Some(mx), true) => {
                let k = self.weights.first().map_or(0, Vec::len);
                w[..k].iter().sum::<i64>() <= mx
            }
            _ => true,
        }
    }

    /// Chain dimensions of the slices in the window.
    pub fn slice_dims(&self, spec: &SliceSpec) -> BTreeMap<(i32, Vec<i64>), usize> {
        let (bw, bp) = self.grading();
        self.buckets(spec, bw, bp)
            .into_iter()
            .filter(|((i, w), _)| *i >= spec.window.0 && *i <= spec.window.1 && self.weight_ok(w, bw, spec))
            .map(|(k, b)| (k, b.inside.len()))
            .collect()
    }

    /// Slice soundness: true when every slice in the window is an exact summand.
    pub fn slicing_exact(&self, spec: &SliceSpec) -> bool {
        self.cohomology(spec).all_exact()
    }

    pub fn cohomology(&self, spec: &SliceSpec) -> CohomologyReport {
        let (bw, bp) = self.grading();
        let buckets = self.buckets(spec, bw, bp);
        let mut keys: Vec<&(i32, Vec<i64>)> = buckets
            .keys()
            .filter(|(i, w)| *i >= spec.window.0 && *i <= spec.window.1 && self.weight_ok(w, bw, spec))
            .collect();
        keys.sort();
        let empty = Bucket::default();
        let mut slices = Vec::new();
        for key in keys {
            let (i, w) = key;
            let here = &buckets[key];
            let below = buckets.get(&(i - 1, w.clone())).unwrap_or(&empty);
            let above = buckets.get(&(i + 1, w.clone())).unwrap_or(&empty);
            let clipped = here.beyond + below.beyond + above.beyond > 0;
            let exact = (bw || bp) && !clipped && self.complete(w, spec, bw, bp);
            let s = self.slice_cohomology(*i, w.clone(), &below.inside, &here.inside, exact);
            slices.push(s);
        }
        CohomologyReport { spec: spec.clone(), graded: bw || bp, slices }
    }

    fn images(&self, basis: &[Monomial]) -> Vec<Poly> {
        basis.iter().map(|m| self.apply(&Poly::term(&self.ring, m.clone(), Q::one()))).collect()
    }

    /// Cycles of `V^i` (with unrestricted target) and boundaries `D(V^{i-1}) ∩ V^i`.
    fn cycles_boundaries(&self, below: &[Monomial], here: &[Monomial]) -> (Vec<SVec>, Echelon) {
        let index: HashMap<&Monomial, usize> = here.iter().enumerate().map(|(k, m)| (m, k)).collect();
        // cycles: kernel of D on `here`, with target coordinates indexed on the fly
        let mut target: HashMap<Monomial, usize> = HashMap::new();
        let cols: Vec<SVec> = self
            .images(here)
            .into_iter()
            .map(|p| {
                p.into_terms()
                    .into_iter()
                    .map(|(m, c)| {
                        let n = target.len();
                        (*target.entry(m).or_insert(n), c)
                    })
                    .collect()
            })
            .collect();
        let cycles = ColMatrix::new(target.len(), cols).kernel();
        // boundaries: coordinates outside the slice come first so that rows with
        // inside pivots span the intersection
        let mut outside: HashMap<Monomial, usize> = HashMap::new();
        let mut ech = Echelon::new();
        for p in self.images(below) {
            let mut v = SVec::new();
            for (m, c) in p.into_terms() {
                let k = match index.get(&m) {
                    Some(&k) => INSIDE + k,
                    None => {
                        let n = outside.len();
                        *outside.entry(m).or_insert(n)
                    }
                };
                v.insert(k, c);
            }
            ech.insert(v);
        }
        let mut bnd = Echelon::new();
        for r in ech.rows_with_pivot(|p| p >= INSIDE) {
            bnd.insert(r.into_iter().map(|(k, c)| (k - INSIDE, c)).collect());
        }
        (cycles, bnd)
    }

    fn slice_cohomology(&self, degree: i32, weight: Vec<i64>, below: &[Monomial], here: &[Monomial], exact: bool) -> SliceCohomology {
        let (cycles, mut bnd) = self.cycles_boundaries(below, here);
        let boundaries = bnd.rank();
        let mut reps = Vec::new();
        for z in &cycles {
            if bnd.insert(z.clone()) {
                reps.push(self.to_poly(here, z));
            }
        }
        SliceCohomology {
            degree,
            weight,
            dim: reps.len(),
            chain_dim: here.len(),
            cycles: cycles.len(),
            boundaries,
            exact,
            representatives: reps,
        }
    }

    fn to_poly(&self, basis: &[Monomial], v: &SVec) -> Poly {
        Poly::from_terms(&self.ring, v.iter().map(|(k, c)| (basis[*k].clone(), c.clone())))
    }

    /// Images of the slice `(degree − 1, key)`, spanning the boundaries of `(degree, key)`.
    /// `key` is the slice key reported by [`Complex::cohomology`].
    pub fn boundary_images(&self, spec: &SliceSpec, degree: i32, key: &[i64]) -> Vec<Poly> {
        let (bw, bp) = self.grading();
        let buckets = self.buckets(spec, bw, bp);
        match buckets.get(&(degree - 1, key.to_vec())) {
            Some(b) => self.images(&b.inside).into_iter().filter(|p| !p.is_zero()).collect(),
            None => Vec::new(),
        }
    }

    /// A basis of the cycles in the slice `(degree, key)`.
    pub fn slice_cycles(&self, spec: &SliceSpec, degree: i32, key: &[i64]) -> Vec<Poly> {
        let (bw, bp) = self.grading();
        let buckets = self.buckets(spec, bw, bp);
        let Some(b) = buckets.get(&(degree, key.to_vec())) else { return Vec::new() };
        let (cycles, _) = self.cycles_boundaries(&[], &b.inside);
        cycles.iter().map(|z| self.to_poly(&b.inside, z)).collect()
    }

    /// Slice keys of the given degree.
    pub fn slice_keys(&self, spec: &SliceSpec, degree: i32) -> Vec<Vec<i64>> {
        let mut keys: Vec<Vec<i64>> = self.slice_dims(&SliceSpec { window: (degree, degree), ..spec.clone() })
            .into_keys()
            .map(|(_, k)| k)
            .collect();
        keys.sort();
        keys
    }

    /// Rank of the span of `elems` (cycles of the slice `(degree, key)`) modulo boundaries.
    pub fn rank_mod_boundaries(&self, spec: &SliceSpec, degree: i32, key: &[i64], elems: &[Poly]) -> usize {
        let mut coords = Coords::new();
        let mut ech = Echelon::new();
        for b in self.boundary_images(spec, degree, key) {
            ech.insert(coords.vec(&self.project(&b)));
        }
        elems.iter().filter(|e| ech.insert(coords.vec(&self.project(e)))).count()
    }

    /// Rank of D on the slice `(degree, weight)` computed twice, by columns and
    /// on the transpose.
    pub fn rank_pair(&self, spec: &SliceSpec, degree: i32, weight: &[i64]) -> (usize, usize) {
        let (bw, bp) = self.grading();
        let buckets = self.buckets(spec, bw, bp);
        let Some(b) = buckets.get(&(degree, weight.to_vec())) else { return (0, 0) };
        let mut target: HashMap<Monomial, usize> = HashMap::new();
        let cols: Vec<SVec> = self
            .images(&b.inside)
            .into_iter()
            .map(|p| {
                p.into_terms()
                    .into_iter()
                    .map(|(m, c)| {
                        let n = target.len();
                        (*target.entry(m).or_insert(n), c)
                    })
                    .collect()
            })
            .collect();
        let mat = ColMatrix::new(target.len(), cols);
        (mat.rank(), mat.rank_transpose())
    }

    /// Find `z` with `D z = target` among monomials of polynomial degree at most
    /// the cap (ignoring weights).
    pub fn solve_boundary(&self, target: &Poly, spec: &SliceSpec) -> Result<Boundary> {
        if !Ring::same(target.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        let target = self.project(target);
        if !self.apply(&target).is_zero() {
            return Err(Error::Precondition(format!("target {target} is not closed")));
        }
        if target.is_zero() {
            return Ok(Boundary::Primitive(Poly::zero(&self.ring)));
        }
        let Some(deg) = target.degree() else {
            return Err(Error::Degree("target is not homogeneous".into()));
        };
        let cap = spec.max_polydeg.max(self.polydeg_max(&target));
        let below: Vec<Monomial> =
            self.monomials(cap).into_iter().filter(|m| m.degree(&self.ring) == deg - 1).collect();
        match self.solve_in(&below, &target) {
            Some(z) => Ok(Boundary::Primitive(z)),
            None => {
                let residue = self.reduce_mod_boundaries(&below, &target);
                Ok(Boundary::NotBoundary { residue })
            }
        }
    }

    fn polydeg_max(&self, p: &Poly) -> u32 {
        p.terms().keys().map(|m| self.polydeg(m)).max().unwrap_or(0)
    }

    /// Solve `D z = target` with `z` in the span of `basis`.
    pub fn solve_in(&self, basis: &[Monomial], target: &Poly) -> Option<Poly> {
        let mut coords: HashMap<Monomial, usize> = HashMap::new();
        let to_vec = |p: Poly, coords: &mut HashMap<Monomial, usize>| -> SVec {
            p.into_terms()
                .into_iter()
                .map(|(m, c)| {
                    let n = coords.len();
                    (*coords.entry(m).or_insert(n), c)
                })
                .collect()
        };
        let cols: Vec<SVec> = self.images(basis).into_iter().map(|p| to_vec(p, &mut coords)).collect();
        let b = to_vec(target.clone(), &mut coords);
        let mut e = Echelon::tracking();
        for (j, c) in cols.into_iter().enumerate() {
            e.insert_tagged(c, unit(j));
        }
        let x = e.solve(&b)?;
        Some(self.to_poly(basis, &x))
    }

    fn reduce_mod_boundaries(&self, below: &[Monomial], target: &Poly) -> Poly {
        let mut coords: Vec<Monomial> = target.terms().keys().cloned().collect();
        let mut index: HashMap<Monomial, usize> = coords.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        let mut ech = Echelon::new();
        for p in self.images(below) {
            let mut v = SVec::new();
            for (m, c) in p.into_terms() {
                let n = index.len();
                let k = *index.entry(m.clone()).or_insert_with(|| {
                    coords.push(m);
                    n
                });
                v.insert(k, c);
            }
            ech.insert(v);
        }
        let t: SVec = target.terms().iter().map(|(m, c)| (index[m], c.clone())).collect();
        let r = ech.reduce(t);
        Poly::from_terms(&self.ring, r.into_iter().map(|(k, c)| (coords[k].clone(), c)))
    }
}

/// Coordinates of a set of polynomials in a common monomial basis.
#[derive(Default, Debug)]
pub struct Coords {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Coords {
    pub fn new() -> Self {
        Coords::default()
    }

    pub fn index_of(&mut self, m: &Monomial) -> usize {
        if let Some(&k) = self.index.get(m) {
            return k;
        }
        let k = self.monomials.len();
        self.monomials.push(m.clone());
        self.index.insert(m.clone(), k);
        k
    }

    pub fn vec(&mut self, p: &Poly) -> SVec {
        let mut v = SVec::new();
        for (m, c) in p.terms() {
            let k = self.index_of(m);
            v.insert(k, c.clone());
        }
        v
    }

    pub fn poly(&self, ring: &Arc<Ring>, v: &SVec) -> Poly {
        Poly::from_terms(ring, v.iter().map(|(k, c)| (self.monomials[*k].clone(), c.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::parse_presentation;

    #[test]
    fn polynomial_ring_slice() {
        let a = parse_presentation("field Q; gen x : 0;").unwrap();
        let rep = Complex::of_cdga(&a).cohomology(&SliceSpec::new((-1, 0), 3));
        assert_eq!(rep.dim(0), 4);
        assert_eq!(rep.dim(-1), 0);
        assert!(rep.all_exact());
    }

    #[test]
    fn truncated_quotient() {
        let a = parse_presentation("field Q; gen x : 0 weight 1; gen xi : -1 weight 2; D xi = x^2;").unwrap();
        let c = Complex::of_cdga(&a).with_cdga_weights(&a);
        let rep = c.cohomology(&SliceSpec::new((-1, 0), 6).with_max_weight(5));
        assert!(rep.all_exact());
        assert_eq!(rep.dim_at(0, 0), 1);
        assert_eq!(rep.dim_at(0, 1), 1);
        for w in 2..=5 {
            assert_eq!(rep.dim_at(0, w), 0, "weight {w}");
        }
    }

    #[test]
    fn boundary_solving() {
        let a = parse_presentation("field Q; gen x : 0; gen xi : -1; D xi = x^2;").unwrap();
        let c = Complex::of_cdga(&a);
        let spec = SliceSpec::new((-1, 0), 4);
        let x2 = a.var("x").pow(2);
        assert_eq!(c.solve_boundary(&x2, &spec).unwrap(), Boundary::Primitive(a.var("xi")));
        match c.solve_boundary(&a.one(), &spec).unwrap() {
            Boundary::NotBoundary { residue } => assert_eq!(residue, a.one()),
            b => panic!("{b:?}"),
        }
        assert!(matches!(c.solve_boundary(&a.zero(), &spec).unwrap(), Boundary::Primitive(z) if z.is_zero()));
    }
}
