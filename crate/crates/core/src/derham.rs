//! Truncated de Rham calculus on a semifree presentation.
//!
//! Forms live in the free algebra on `z_i` and `dz_i`, with
//! `deg dz_i = deg z_i + 1` (total degree = internal degree + form degree).
//! `d` sends `z ↦ dz`, `dz ↦ 0`; the internal differential sends
//! `z ↦ f`, `dz ↦ −d f`, so that `[d, D] = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;

use crate::cohom::{ClassBound, Complex, SliceSpec};
use crate::error::{Error, Result};
use crate::gca::parse::parse_expr;
use crate::gca::{Derivation, Generator, Monomial, Poly, Ring, SemifreeCdga};
use crate::linalg::{Echelon, SVec};
use crate::Q;

/// The de Rham algebra of a presentation.
#[derive(Clone, Debug)]
pub struct DeRham {
    base: SemifreeCdga,
    ring: Arc<Ring>,
    d: Derivation,
    big_d: Derivation,
}

/// A vector field of degree `k`: values `X_i` on `dz_i`, each of degree `|z_i| + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub degree: i32,
    pub values: Vec<Poly>,
}

/// Element of `F^p` with a hard wedge-degree cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct DeRhamElement {
    pub form: Poly,
    pub p_floor: u32,
    pub max_wedge: u32,
    /// Set once an operation dropped components above `max_wedge`.
    pub clipped: bool,
}

/// Filtration data for one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationLabel {
    pub term: String,
    /// Number of fibre `d`-generators (the `Filt` count).
    pub filt: u32,
    /// Total fibre weight (the `''Filt` weight).
    pub filt2: i64,
}

#[derive(Clone, Debug)]
pub enum Operator {
    D,
    BigD,
    Total,
    Iota(VectorField),
    Lie(VectorField),
}

/// Result of comparing the two sides of the graded-piece identity.
#[derive(Clone, Debug, Serialize)]
pub struct GradedPieceComparison {
    pub p: u32,
    pub degree: i32,
    pub lambda: i64,
    pub direct: usize,
    pub model: usize,
    pub exact: bool,
}

impl GradedPieceComparison {
    pub fn agree(&self) -> bool {
        self.direct == self.model
    }
}

/// Result of [`DeRham::find_primitive`].
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Found { f: Poly, correction: Poly },
    Obstructed { residue: Poly },
}

impl DeRham {
    pub fn new(base: &SemifreeCdga) -> Result<Self> {
        let n = base.len();
        let mut gens: Vec<Generator> = base.gens().to_vec();
        for g in base.gens() {
            let mut h = Generator::new(format!("d({})", g.name), g.degree + 1);
            h.weight = g.weight;
            gens.push(h);
        }
        let ring = Ring::new(gens)?;
        let mut d_img = Vec::with_capacity(2 * n);
        for i in 0..n {
            d_img.push(Poly::var(&ring, n + i));
        }
        d_img.extend((0..n).map(|_| Poly::zero(&ring)));
        let d = Derivation::new(&ring, 1, d_img);
        let mut dd_img: Vec<Poly> = (0..n).map(|i| base.diff_of(i).embed(&ring)).collect::<Result<_>>()?;
        for i in 0..n {
            let f = dd_img[i].clone();
            dd_img.push(-d.apply(&f));
        }
        let big_d = Derivation::new(&ring, 1, dd_img);
        Ok(DeRham { base: base.clone(), ring, d, big_d })
    }

    pub fn base(&self) -> &SemifreeCdga {
        &self.base
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn z(&self, i: usize) -> Poly {
        Poly::var(&self.ring, i)
    }

    pub fn dz(&self, i: usize) -> Poly {
        Poly::var(&self.ring, self.n() + i)
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::named(&self.ring, name)
    }

    pub fn dvar(&self, name: &str) -> Poly {
        Poly::named(&self.ring, &format!("d({name})"))
    }

    pub fn de_rham_d(&self) -> &Derivation {
        &self.d
    }

    pub fn internal_d(&self) -> &Derivation {
        &self.big_d
    }

    pub fn total_d(&self) -> Derivation {
        self.d.add(&self.big_d)
    }

    pub fn d(&self, w: &Poly) -> Poly {
        self.d.apply(w)
    }

    pub fn big_d(&self, w: &Poly) -> Poly {
        self.big_d.apply(w)
    }

    pub fn total(&self, w: &Poly) -> Poly {
        &self.d.apply(w) + &self.big_d.apply(w)
    }

    /// Embed a function from the base.
    pub fn function(&self, f: &Poly) -> Result<Poly> {
        f.embed(&self.ring)
    }

    /// The function part (form degree 0) back in the base ring.
    pub fn to_function(&self, f: &Poly) -> Result<Poly> {
        f.restrict(self.base.ring())
    }

    pub fn form_degree(&self, m: &Monomial) -> u32 {
        let n = self.n();
        m.count_where(|g| g >= n)
    }

    /// Components by form degree.
    pub fn components(&self, w: &Poly) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in w.terms() {
            out.entry(self.form_degree(m)).or_insert_with(|| Poly::zero(&self.ring)).add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn component(&self, w: &Poly, p: u32) -> Poly {
        w.filter_terms(|m| self.form_degree(m) == p)
    }

    pub fn at_least(&self, w: &Poly, p: u32) -> Poly {
        w.filter_terms(|m| self.form_degree(m) >= p)
    }

    /// Coefficient of `dz_j` in a 1-form (as a function in the de Rham ring).
    pub fn coefficient(&self, one_form: &Poly, j: usize) -> Poly {
        let g = (self.n() + j) as u32;
        Poly::from_terms(
            &self.ring,
            one_form
                .terms()
                .iter()
                .filter(|(m, _)| self.form_degree(m) == 1 && m.exponent(g as usize) == 1)
                .map(|(m, c)| (m.without_one(g as usize), c.clone())),
        )
    }

    /// Contraction `ι_X`: kills functions, `dz_i ↦ X_i`; degree `k − 1`.
    pub fn iota(&self, x: &VectorField) -> Derivation {
        let n = self.n();
        let mut images = vec![Poly::zero(&self.ring); 2 * n];
        for (i, v) in x.values.iter().enumerate() {
            images[n + i] = v.clone();
        }
        Derivation::new(&self.ring, x.degree - 1, images)
    }

    /// `Lie_X = [d, ι_X]`: `z_i ↦ (−1)^k X_i`, `dz_i ↦ d X_i`.
    pub fn lie(&self, x: &VectorField) -> Derivation {
        self.d.commutator(&self.iota(x))
    }

    /// The vector field `∂/∂z_i` scaled into degree `−|z_i|` (dual basis vector).
    pub fn dual_basis_field(&self, i: usize) -> VectorField {
        let mut values = vec![Poly::zero(&self.ring); self.n()];
        values[i] = Poly::one(&self.ring);
        VectorField { degree: -self.base.gens()[i].degree, values }
    }

    /// Euler field `z_i ↦ w_i z_i` for the given weights.
    pub fn euler(&self, weights: &[i64]) -> VectorField {
        let values = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| self.z(i).scale(&Q::from_integer(w.into())))
            .collect();
        VectorField { degree: 0, values }
    }

    /// Euler field of the presentation's own weights.
    pub fn presentation_euler(&self) -> Result<VectorField> {
        if !self.base.is_weighted() {
            return Err(Error::Precondition("the presentation carries no weights".into()));
        }
        let w: Vec<i64> = self.base.gens().iter().map(|g| g.weight.unwrap_or(0)).collect();
        Ok(self.euler(&w))
    }

    pub fn operator(&self, op: &Operator) -> Derivation {
        match op {
            Operator::D => self.d.clone(),
            Operator::BigD => self.big_d.clone(),
            Operator::Total => self.total_d(),
            Operator::Iota(x) => self.iota(x),
            Operator::Lie(x) => self.lie(x),
        }
    }

    /// Apply an operator to a truncated element, clipping above its cutoff.
    pub fn apply_operator(&self, op: &Operator, w: &DeRhamElement) -> DeRhamElement {
        let raw = self.operator(op).apply(&w.form);
        let kept = raw.filter_terms(|m| self.form_degree(m) <= w.max_wedge);
        let clipped = w.clipped || kept.len() != raw.len();
        let p_floor = match op {
            Operator::Iota(_) => w.p_floor.saturating_sub(1),
            _ => w.p_floor,
        };
        DeRhamElement { form: kept, p_floor, max_wedge: w.max_wedge, clipped }
    }

    /// `e^ξ = Σ_k ι_ξ^k / k!`; the sum stops because `ι_ξ` lowers form degree.
    pub fn exp_iota(&self, xi: &VectorField, w: &Poly) -> Poly {
        let iota = self.iota(xi);
        let mut out = w.clone();
        let mut term = w.clone();
        let mut k = 1i64;
        loop {
            term = iota.apply(&term).scale(&Q::new(1.into(), k.into()));
            if term.is_zero() {
                return out;
            }
            out = &out + &term;
            k += 1;
        }
    }

    /// Terms grouped by weight for the given Euler weights.
    pub fn weight_decompose(&self, w: &Poly, weights: &[i64]) -> BTreeMap<i64, Poly> {
        let n = self.n();
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        for (m, c) in w.terms() {
            let wt: i64 = m.0.iter().map(|&(g, e)| weights[g as usize % n] * e as i64).sum();
            out.entry(wt).or_insert_with(|| Poly::zero(&self.ring)).add_term(m.clone(), c.clone());
        }
        out
    }

    /// `Filt` and `''Filt` labels; `fibre` marks the fibre generators.
    pub fn filtration_label(&self, w: &Poly, fibre: &[bool]) -> Vec<FiltrationLabel> {
        let n = self.n();
        w.sorted_terms()
            .into_iter()
            .map(|(m, c)| FiltrationLabel {
                term: Poly::term(&self.ring, m.clone(), c.clone()).to_string(),
                filt: m.count_where(|g| g >= n && fibre[g - n]),
                filt2: m.count_where(|g| fibre[g % n]) as i64,
            })
            .collect()
    }

    /// Parse a form expression (`d(NAME)`, wedge `^`).
    pub fn parse_form(&self, text: &str) -> Result<Poly> {
        let n = self.n();
        let base = self.base.ring().clone();
        let resolve = move |name: &str, is_d: bool| base.find(name).map(|i| if is_d { n + i } else { i });
        parse_expr(&self.ring, text, &resolve, true)
    }

    /// Canonical text: coefficients with `*`, form factors joined by `^`.
    pub fn form_text(&self, w: &Poly) -> String {
        if w.is_zero() {
            return "0".into();
        }
        let n = self.n();
        let mut parts = Vec::new();
        for (k, (m, c)) in w.sorted_terms().into_iter().enumerate() {
            let fun = Monomial(m.0.iter().filter(|(g, _)| (*g as usize) < n).cloned().collect());
            let forms: Vec<String> = m
                .0
                .iter()
                .filter(|(g, _)| (*g as usize) >= n)
                .map(|&(g, e)| {
                    let name = &self.ring.gen(g as usize).name;
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let neg = c < &Q::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            let mut factors = Vec::new();
            if !a.is_one() || (fun.is_one() && forms.is_empty()) {
                factors.push(a.to_string());
            }
            if !fun.is_one() {
                factors.push(fun.display(&self.ring).to_string());
            }
            let mut s = factors.join("*");
            if !forms.is_empty() {
                if !s.is_empty() {
                    s.push('*');
                }
                s.push_str(&forms.join("^"));
            }
            let sep = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            parts.push(format!("{sep}{s}"));
        }
        parts.concat()
    }

    /// The truncated complex `F^p / F^{max_wedge+1}` with differential `d + D`.
    pub fn filtered_complex(&self, p: u32, max_wedge: u32) -> Complex {
        self.complex_with(self.total_d(), p, max_wedge)
    }

    /// `⋀^p L_A` inside the de Rham algebra (form degree exactly `p`, differential `D`).
    pub fn wedge_complex(&self, p: u32) -> Complex {
        self.complex_with(self.big_d.clone(), p, p)
    }

    fn complex_with(&self, der: Derivation, p: u32, max_wedge: u32) -> Complex {
        let n = self.n();
        let class_of = (0..2 * n).map(|g| usize::from(g >= n)).collect();
        let bounds = vec![ClassBound::free(), ClassBound::counted_range(p, Some(max_wedge))];
        Complex::new(self.ring.clone(), der, class_of, bounds)
    }

    /// Weight vectors for slicing: per generator of the base, reused for its `d`.
    pub fn lift_weights(&self, base_weights: &[Vec<i64>]) -> Vec<Vec<i64>> {
        (0..2 * self.n()).map(|g| base_weights[g % self.n()].clone()).collect()
    }

    /// Compare `dim H^i(F^p)_λ` with `dim ker(d: H^{i−p}(⋀^p)_λ → H^{i−p}(⋀^{p+1})_λ)`.
    /// `weights[g]` is a weight vector whose first entry is the Euler weight.
    pub fn graded_piece_model(
        &self,
        weights: &[Vec<i64>],
        p: u32,
        i: i32,
        lambda: i64,
        spec: &SliceSpec,
        max_wedge: u32,
    ) -> Result<GradedPieceComparison> {
        if lambda == 0 {
            return Err(Error::Precondition("the weight-zero piece is the base de Rham complex".into()));
        }
        let wts = self.lift_weights(weights);
        let window = SliceSpec { window: (i, i), ..spec.clone() };
        let direct_c = self.filtered_complex(p, max_wedge).with_weights(wts.clone());
        let direct = direct_c.cohomology(&window);
        let dims_direct: usize = direct.slices.iter().filter(|s| s.weight.first() == Some(&lambda)).map(|s| s.dim).sum();
        let mut exact = direct.slices.iter().filter(|s| s.weight.first() == Some(&lambda)).all(|s| s.exact);

        let lower = self.wedge_complex(p).with_weights(wts.clone());
        let upper = self.wedge_complex(p + 1).with_weights(wts);
        let h_low = lower.cohomology(&window);
        let up_spec = SliceSpec { window: (i + 1, i + 1), ..spec.clone() };
        let h_up = upper.cohomology(&up_spec);
        let mut model = 0;
        for s in h_low.slices.iter().filter(|s| s.weight.first() == Some(&lambda)) {
            exact &= s.exact;
            // boundaries of the matching upper slice, then the images of the representatives
            let target = h_up.slices.iter().find(|t| t.weight == s.weight);
            let mut coords = crate::cohom::Coords::new();
            let mut ech = Echelon::new();
            if let Some(t) = target {
                exact &= t.exact;
                for b in upper.boundary_images(&up_spec, i + 1, &t.weight) {
                    ech.insert(coords.vec(&b));
                }
            }
            let mut rank = 0;
            for r in &s.representatives {
                let v: SVec = coords.vec(&self.d.apply(r));
                if ech.insert(v) {
                    rank += 1;
                }
            }
            model += s.dim - rank;
        }
        Ok(GradedPieceComparison { p, degree: i, lambda, direct: dims_direct, model, exact })
    }

    /// Solve `d f + (d + D) ν = −γ` for a function `f` (no constant term,
    /// `D f = 0`) and `ν ∈ F¹`, among monomials of polynomial degree at most
    /// `cap`; `f` is the primitive with `γ ≡ −df`.
    pub fn find_primitive(&self, gamma: &Poly, cap: u32, max_wedge: u32) -> Result<Primitive> {
        let Some(deg) = (if gamma.is_zero() { Some(1) } else { gamma.degree() }) else {
            return Err(Error::Degree("γ is not homogeneous".into()));
        };
        let total = self.total_d();
        let closed = total.apply(gamma).filter_terms(|m| self.form_degree(m) <= max_wedge);
        if !closed.is_zero() {
            return Err(Error::Precondition(format!("γ is not closed: (d+D)γ = {}", self.form_text(&closed))));
        }
        let c = self.complex_with(total.clone(), 0, max_wedge);
        let fun: Vec<Monomial> = c
            .monomials(cap)
            .into_iter()
            .filter(|m| self.form_degree(m) == 0 && !m.is_one() && m.degree(&self.ring) == deg - 1)
            .collect();
        let nu: Vec<Monomial> = c
            .monomials(cap)
            .into_iter()
            .filter(|m| self.form_degree(m) >= 1 && m.degree(&self.ring) == deg - 1)
            .collect();
        let mut coords = crate::cohom::Coords::new();
        let mut ech = Echelon::tracking();
        let nf = fun.len();
        let clip = |p: Poly| p.filter_terms(|m| self.form_degree(m) <= max_wedge);
        for (k, m) in fun.iter().chain(&nu).enumerate() {
            let x = Poly::term(&self.ring, m.clone(), Q::one());
            let img = clip(total.apply(&x));
            ech.insert_tagged(coords.vec(&img), crate::linalg::unit(k));
        }
        let target = coords.vec(&-gamma);
        let Some(sol) = ech.solve(&target) else {
            let residue = coords.poly(&self.ring, &ech.reduce(target));
            return Ok(Primitive::Obstructed { residue });
        };
        let mut f = Poly::zero(&self.ring);
        let mut nu_p = Poly::zero(&self.ring);
        for (k, a) in &sol {
            if *k < nf {
                f.add_term(fun[*k].clone(), a.clone());
            } else {
                nu_p.add_term(nu[*k - nf].clone(), a.clone());
            }
        }
        Ok(Primitive::Found { f, correction: nu_p })
    }
}

impl DeRhamElement {
    pub fn new(form: Poly, p_floor: u32, max_wedge: u32) -> Self {
        DeRhamElement { form, p_floor, max_wedge, clipped: false }
    }
}

/// `(d + D_A − Lie_ξ) e^ξ w − e^ξ (d + D_A) w`; zero when the intertwining holds.
pub fn intertwining_defect(dr: &DeRham, xi: &VectorField, w: &Poly) -> Poly {
    let total = dr.total_d();
    let lie = dr.lie(xi);
    let lhs = {
        let e = dr.exp_iota(xi, w);
        &total.apply(&e) - &lie.apply(&e)
    };
    let rhs = dr.exp_iota(xi, &total.apply(w));
    &lhs - &rhs
}

/// Graded commutator of two derivations applied to `w`.
pub fn commutator_on(a: &Derivation, b: &Derivation, w: &Poly) -> Poly {
    a.commutator(b).apply(w)
}
