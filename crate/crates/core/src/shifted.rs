//! Shifted cotangent bundles, twisted symmetric algebras and symplectic checks.
//!
//! The fibre generator `y_i` of `Sym_B(L_B†)` corresponds to `(−1)^{|z_i|}(dz_i)†`;
//! with this normalisation the Liouville form `Σ y_i dz_i` is `D`-closed.

use num::Zero;
use serde::Serialize;

use crate::cohom::SliceSpec;
use crate::cotangent::cotangent_complex;
use crate::derham::{DeRham, DeRhamElement, VectorField};
use crate::dgmod::{BasisElem, DgMap, DgModule, DualityContext};
use crate::error::{Error, Result};
use crate::gca::cdga::fresh_name;
use crate::gca::{Generator, Poly, Ring, SemifreeCdga};
use crate::report::Report;
use crate::Q;

/// A module `M` over `B` with a cocycle `ξ: M → B[1]`, given by `ξ(m_i)`.
#[derive(Clone, Debug)]
pub struct TwistData {
    pub base: SemifreeCdga,
    pub module: DgModule,
    pub xi: Vec<Poly>,
}

impl TwistData {
    pub fn new(module: DgModule, xi: Vec<Poly>) -> Result<Self> {
        let base = module.base().clone();
        if xi.len() != module.rank() {
            return Err(Error::Invalid("one twist value per basis element".into()));
        }
        for (b, v) in module.basis().iter().zip(&xi) {
            if !Ring::same(v.ring(), base.ring()) {
                return Err(Error::RingMismatch);
            }
            if !v.is_homogeneous_of(b.degree + 1) {
                return Err(Error::Degree(format!("twist of {} must have degree {}", b.name, b.degree + 1)));
            }
        }
        let t = TwistData { base, module, xi };
        if let Some(i) = t.first_cocycle_violation() {
            return Err(Error::NotChainMap(t.module.basis()[i].name.clone()));
        }
        Ok(t)
    }

    pub fn untwisted(module: DgModule) -> Self {
        let z = module.base().zero();
        TwistData { base: module.base().clone(), xi: vec![z; module.rank()], module }
    }

    /// `D ξ(m_i) + Σ_j (−1)^{|M_ij|} M_ij ξ(m_j)` must vanish.
    pub fn first_cocycle_violation(&self) -> Option<usize> {
        (0..self.module.rank()).find(|&i| {
            let mut acc = self.base.apply_differential(&self.xi[i]);
            for (j, e) in self.module.diff()[i].iter().enumerate() {
                if !e.is_zero() {
                    acc = &acc + &(&crate::dgmod::parity_twist(e) * &self.xi[j]);
                }
            }
            !acc.is_zero()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().all(Poly::is_zero)
    }
}

/// `Sym^ξ_B M`: generators of `B` followed by the basis of `M`, with
/// `D m_i = Σ_j M_ij m_j + ξ(m_i)`. The basis must be triangular (`M_ij = 0` for `j ≥ i`).
/// Untwisted algebras carry the weights `B ↦ 0`, `M ↦ 1`.
pub fn sym_twisted(t: &TwistData) -> Result<SemifreeCdga> {
    let m = &t.module;
    for i in 0..m.rank() {
        for j in i..m.rank() {
            if !m.entry(i, j).is_zero() {
                return Err(Error::Precondition(format!(
                    "module differential is not triangular: D {} involves {}",
                    m.basis()[i].name,
                    m.basis()[j].name
                )));
            }
        }
    }
    let nb = t.base.len();
    let weighted = t.is_zero();
    let mut gens: Vec<Generator> = t.base.gens().to_vec();
    for g in &mut gens {
        g.weight = weighted.then_some(0);
    }
    for b in m.basis() {
        let mut g = Generator::new(b.name.clone(), b.degree);
        g.weight = weighted.then_some(1);
        gens.push(g);
    }
    SemifreeCdga::build(gens, |r| {
        let mut diffs: Vec<Poly> = (0..nb).map(|i| t.base.diff_of(i).embed(r).expect("prefix")).collect();
        for i in 0..m.rank() {
            let mut p = t.xi[i].embed(r).expect("prefix");
            for (j, e) in m.diff()[i].iter().enumerate() {
                if !e.is_zero() {
                    p = &p + &(&e.embed(r).expect("prefix") * &Poly::var(r, nb + j));
                }
            }
            diffs.push(p);
        }
        diffs
    })
}

/// The shifted cotangent bundle `Ā = Sym_B(L_B†)` with its Liouville and standard forms.
#[derive(Clone, Debug)]
pub struct ShiftedCotangent {
    pub base: SemifreeCdga,
    pub ctx: DualityContext,
    /// Fibre module over `B` (basis `y_i` in reverse generator order).
    pub fibre: DgModule,
    pub algebra: SemifreeCdga,
    pub derham: DeRham,
    /// Index in `algebra` of the fibre generator dual to `z_i`.
    pub fibre_of: Vec<usize>,
    pub liouville: Poly,
    pub omega: Poly,
    pub euler: VectorField,
}

impl ShiftedCotangent {
    pub fn is_fibre(&self) -> Vec<bool> {
        (0..self.algebra.len()).map(|g| g >= self.base.len()).collect()
    }

    /// Weights `B ↦ 0`, fibre `↦ 1`.
    pub fn euler_weights(&self) -> Vec<i64> {
        self.is_fibre().into_iter().map(i64::from).collect()
    }
}

fn fibre_name(ring: &Ring, z: &str) -> String {
    let base = match z.strip_prefix('x') {
        Some(rest) => format!("y{rest}"),
        None => format!("y_{z}"),
    };
    fresh_name(ring, &base)
}

/// `L_B†` rebased as the fibre module: `D y_j = −Σ_i (−1)^{|y_i|(1+|M_ij|)} M_ij y_i`
/// where `D dz_i = Σ_j M_ij dz_j`.
pub fn fibre_module(b: &SemifreeCdga, d: i32) -> Result<(DgModule, Vec<usize>)> {
    let lb = cotangent_complex(b)?.module;
    let n = b.len();
    let ydeg: Vec<i32> = b.gens().iter().map(|g| -d - g.degree).collect();
    if let Some(k) = ydeg.iter().position(|&e| e > 0) {
        return Err(Error::Precondition(format!(
            "fibre generator dual to {} would have positive degree {}",
            b.gens()[k].name, ydeg[k]
        )));
    }
    // fibre basis position of y_i
    let pos: Vec<usize> = (0..n).map(|i| n - 1 - i).collect();
    let mut taken = b.ring().gens().to_vec();
    let mut names = vec![String::new(); n];
    for i in (0..n).rev() {
        let r = Ring::new(taken.clone())?;
        names[i] = fibre_name(&r, &b.gens()[i].name);
        taken.push(Generator::new(names[i].clone(), ydeg[i]));
    }
    let mut basis = vec![BasisElem::new("", 0); n];
    for i in 0..n {
        basis[pos[i]] = BasisElem { name: names[i].clone(), degree: ydeg[i], weight: Some(1) };
    }
    let mut diff = vec![vec![b.zero(); n]; n];
    for j in 0..n {
        for i in 0..n {
            let e = lb.entry(i, j);
            if e.is_zero() {
                continue;
            }
            let deg_m = b.gens()[i].degree - b.gens()[j].degree + 1;
            let odd = (ydeg[i] * (1 + deg_m)).rem_euclid(2) == 1;
            let c = if odd { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
            diff[pos[j]][pos[i]] = &diff[pos[j]][pos[i]] + &e.scale(&c);
        }
    }
    Ok((DgModule::new(b, basis, diff)?, pos))
}

pub fn shifted_cotangent(b: &SemifreeCdga, ctx: DualityContext) -> Result<ShiftedCotangent> {
    twisted_cotangent(b, ctx, None)
}

fn twisted_cotangent(b: &SemifreeCdga, ctx: DualityContext, f: Option<&Poly>) -> Result<ShiftedCotangent> {
    let (fibre, pos) = fibre_module(b, ctx.d)?;
    let n = b.len();
    let twist = match f {
        None => TwistData::untwisted(fibre.clone()),
        Some(f) => {
            let df = cotangent_complex(b)?.universal(f)?;
            let mut xi = vec![b.zero(); n];
            for i in 0..n {
                xi[pos[i]] = df[i].clone();
            }
            TwistData::new(fibre.clone(), xi)?
        }
    };
    let algebra = sym_twisted(&twist)?;
    let dr = DeRham::new(&algebra)?;
    let fibre_of: Vec<usize> = pos.iter().map(|p| n + p).collect();
    let mut liouville = Poly::zero(dr.ring());
    let mut omega = Poly::zero(dr.ring());
    for i in 0..n {
        liouville = &liouville + &(&dr.z(fibre_of[i]) * &dr.dz(i));
        omega = &omega + &(&dr.dz(fibre_of[i]) * &dr.dz(i));
    }
    let weights: Vec<i64> = (0..algebra.len()).map(|g| i64::from(g >= n)).collect();
    let euler = dr.euler(&weights);
    Ok(ShiftedCotangent { base: b.clone(), ctx, fibre, algebra, derham: dr, fibre_of, liouville, omega, euler })
}

/// The twisted standard structure: `A = Sym^ξ_B(L_B†)` with `D y_i = D̄ y_i + ∂_i f`,
/// on which `Σ dy_i ∧ dz_i` is closed.
#[derive(Clone, Debug)]
pub struct TwistedStandard {
    pub cotangent: ShiftedCotangent,
    pub f: Poly,
    /// The twist as a vector field of degree 1: `ι_ξ(dy_i) = −∂_i f`, so `D_A = D̄ + Lie_ξ`.
    pub xi: VectorField,
    /// `Ā` on the same generators as `A` (the untwisted differential `D̄`).
    pub graded: DeRham,
}

impl TwistedStandard {
    pub fn algebra(&self) -> &SemifreeCdga {
        &self.cotangent.algebra
    }

    pub fn derham(&self) -> &DeRham {
        &self.cotangent.derham
    }

    pub fn omega(&self) -> &Poly {
        &self.cotangent.omega
    }
}

pub fn twisted_standard_form(b: &SemifreeCdga, ctx: DualityContext, f: &Poly) -> Result<TwistedStandard> {
    if !Ring::same(f.ring(), b.ring()) {
        return Err(Error::RingMismatch);
    }
    if !f.is_zero() && !f.is_homogeneous_of(1 - ctx.d) {
        return Err(Error::Degree(format!("the potential must have degree {}", 1 - ctx.d)));
    }
    if !f.constant_term().is_zero() {
        return Err(Error::Precondition("the potential must have zero constant term".into()));
    }
    if !b.apply_differential(f).is_zero() {
        return Err(Error::Precondition("the potential must be closed".into()));
    }
    let ct = twisted_cotangent(b, ctx, Some(f))?;
    let dr = &ct.derham;
    let n = b.len();
    let df = cotangent_complex(b)?.universal(f)?;
    let mut values = vec![Poly::zero(dr.ring()); ct.algebra.len()];
    for i in 0..n {
        values[ct.fibre_of[i]] = -dr.function(&df[i].embed(ct.algebra.ring())?)?;
    }
    let xi = VectorField { degree: 1, values };
    let a = &ct.algebra;
    let diffs = (0..a.len())
        .map(|g| if g < n { a.diff_of(g).clone() } else { a.diff_of(g) - &df_at(&df, &ct.fibre_of, g, a) })
        .collect::<Vec<_>>();
    let graded = DeRham::new(&SemifreeCdga::from_parts(a.ring().clone(), diffs)?)?;
    Ok(TwistedStandard { cotangent: ct, f: f.clone(), xi, graded })
}

fn df_at(df: &[Poly], fibre_of: &[usize], g: usize, a: &SemifreeCdga) -> Poly {
    let i = fibre_of.iter().position(|&k| k == g).expect("fibre generator");
    df[i].embed(a.ring()).expect("prefix")
}

/// The map `L_A† → L_A`, `(dz_i)† ↦ Σ_j s_i Φ_ij dz_j` with `Φ_ij` the coefficient of
/// `dz_j` in `ι_{∂_i} ω₂`.
pub fn form_map(dr: &DeRham, omega2: &Poly, d: i32) -> Result<DgMap> {
    form_map_signed(dr, omega2, d, &form_sign)
}

fn form_map_signed(dr: &DeRham, omega2: &Poly, d: i32, form_sign: &dyn Fn(i32, i32) -> Q) -> Result<DgMap> {
    let a = dr.base();
    let la = cotangent_complex(a)?.module;
    let n = a.len();
    let w_omega = omega_weight(dr, omega2);
    let mut src = la.dagger(d);
    if let Some(w) = w_omega {
        src = src.reweighted(|i, _| la.basis()[i].weight.map(|wi| w - wi));
    }
    let mut matrix = Vec::with_capacity(n);
    for i in 0..n {
        let iota = dr.iota(&dr.dual_basis_field(i));
        let one = iota.apply(omega2);
        let s = form_sign(a.gens()[i].degree, d);
        let row = (0..n)
            .map(|j| Ok(dr.to_function(&dr.coefficient(&one, j))?.scale(&s)))
            .collect::<Result<Vec<_>>>()?;
        matrix.push(row);
    }
    DgMap::new(&src, &la, matrix, 0)
}

/// `(−1)^{|z_i|(d+1)}`: the unique choice in the family tried that makes the
/// map a chain map for every `d`.
fn form_sign(deg_z: i32, d: i32) -> Q {
    Q::from_integer(if (deg_z * (d + 1)).rem_euclid(2) == 1 { -1 } else { 1 }.into())
}

/// Weight of a form that is homogeneous for the generator weights, if any.
fn omega_weight(dr: &DeRham, w: &Poly) -> Option<i64> {
    let a = dr.base();
    if !a.is_weighted() {
        return None;
    }
    let n = a.len();
    let ws: Vec<i64> = w
        .terms()
        .keys()
        .map(|m| m.0.iter().map(|&(g, e)| a.gens()[g as usize % n].weight.unwrap_or(0) * e as i64).sum())
        .collect();
    let first = *ws.first()?;
    ws.iter().all(|&x| x == first).then_some(first)
}

/// A verified shifted symplectic form.
#[derive(Clone, Debug)]
pub struct SymplecticForm {
    pub omega: DeRhamElement,
    pub ctx: DualityContext,
    pub witness: DgMap,
    pub report: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyCheck {
    pub method: &'static str,
    pub pass: bool,
    pub exact: bool,
}

/// Quasi-isomorphism test for a map of finite semifree modules: exact slice
/// cohomology of the cone when the cone is weight graded, otherwise the fibre of
/// the cone at the probe points.
pub fn quis_check(phi: &DgMap, spec: &SliceSpec) -> Result<NondegeneracyCheck> {
    let (cone, _, _) = phi.cone()?;
    let h = cone.cohomology(spec);
    if h.graded && h.all_exact() {
        return Ok(NondegeneracyCheck { method: "slices", pass: h.is_zero(), exact: true });
    }
    let pass = cone.tor_amplitude()?.is_none();
    Ok(NondegeneracyCheck { method: "fibres", pass: pass && h.is_zero(), exact: false })
}

/// Closedness, nondegeneracy of `ω₂` and `λ_P`-symmetry.
pub fn verify_symplectic(dr: &DeRham, omega: &DeRhamElement, ctx: DualityContext, spec: &SliceSpec) -> Result<Report> {
    let mut r = Report::default();
    let total = dr.total_d().apply(&omega.form);
    let defect = dr.at_least(&total, 0).filter_terms(|m| dr.form_degree(m) <= omega.max_wedge);
    let low = dr.components(&omega.form).keys().any(|&p| p < 2);
    if defect.is_zero() && !low {
        r.pass("closed");
    } else if low {
        r.fail("closed", "components below form degree 2".to_string());
    } else {
        r.fail("closed", format!("(d+D)ω = {}", dr.form_text(&defect)));
    }
    let omega2 = dr.component(&omega.form, 2);
    let phi = form_map(dr, &omega2, ctx.d)?;
    if !phi.is_chain_map() {
        let i = phi.first_chain_violation().expect("violation");
        r.fail("nondegenerate", format!("induced map is not a chain map at {}", phi.source.basis()[i].name));
    } else {
        let q = quis_check(&phi, spec)?;
        r.approximate |= !q.exact;
        r.push("nondegenerate", q.pass, format!("quasi-isomorphism by {}", q.method));
    }
    r.push("symmetric", ctx.is_symmetric(&phi), format!("lambda_P = {}", ctx.lambda_p));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::parse_presentation;

    fn ctx(d: i32) -> DualityContext {
        crate::dgmod::calibrate(d).unwrap()
    }

    #[test]
    fn cotangent_of_line() {
        let b = parse_presentation("field Q; gen x : 0;").unwrap();
        let t = shifted_cotangent(&b, ctx(1)).unwrap();
        assert_eq!(t.algebra.to_string(), "field Q;\ngen x : 0 weight 0;\ngen y : -1 weight 1;\n");
        assert_eq!(t.derham.form_text(&t.liouville), "y*d(x)");
        assert_eq!(t.omega, t.derham.parse_form("d(y)^d(x)").unwrap());
    }

    #[test]
    fn liouville_is_closed_for_a_cell() {
        let b = parse_presentation("field Q; gen x : 0; gen z : -1; D z = x^3;").unwrap();
        for d in 1..=3 {
            if let Ok(t) = shifted_cotangent(&b, ctx(d)) {
                assert!(t.derham.big_d(&t.liouville).is_zero(), "d = {d}");
            }
        }
    }

    #[test]
    fn critical_locus_twist() {
        let b = parse_presentation("field Q; gen x : 0;").unwrap();
        let x = b.var("x");
        let f = x.pow(3).scale(&Q::new(1.into(), 3.into()));
        let t = twisted_standard_form(&b, ctx(1), &f).unwrap();
        assert_eq!(t.cotangent.algebra.diff_of(1).to_string(), "x^2");
        let dr = &t.cotangent.derham;
        assert!(dr.total(&t.cotangent.omega).is_zero());
    }

    fn element(p: &Poly) -> DeRhamElement {
        DeRhamElement::new(p.clone(), 2, 3)
    }

    #[test]
    fn standard_forms_verify() {
        let spec = SliceSpec::new((-3, 0), 4);
        let bases = ["field Q; gen x : 0;", "field Q; gen x1 : 0; gen x2 : 0;", "field Q; gen x : 0; gen z : -1; D z = x^2;"];
        for d in 1..=4 {
            for bt in bases {
                let b = parse_presentation(bt).unwrap();
                let Ok(t) = shifted_cotangent(&b, ctx(d)) else { continue };
                let r = verify_symplectic(&t.derham, &element(&t.omega), ctx(d), &spec).unwrap();
                assert!(r.passed(), "d = {d}, {bt}: {r:?}");
            }
        }
    }

    #[test]
    fn twisted_forms_verify() {
        let spec = SliceSpec::new((-3, 0), 4);
        let b = parse_presentation("field Q; gen x1 : 0; gen x2 : 0;").unwrap();
        let f = &b.var("x1") * &b.var("x2");
        let t = twisted_standard_form(&b, ctx(1), &f).unwrap();
        let a = &t.cotangent.algebra;
        assert_eq!(a.diff_of(2).to_string(), "x1");
        assert_eq!(a.diff_of(3).to_string(), "x2");
        let r = verify_symplectic(&t.cotangent.derham, &element(&t.cotangent.omega), ctx(1), &spec).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn degenerate_and_wrong_sign() {
        let spec = SliceSpec::new((-3, 0), 4);
        let b = parse_presentation("field Q; gen x : 0;").unwrap();
        let t = shifted_cotangent(&b, ctx(1)).unwrap();
        let dr = &t.derham;
        let zero = verify_symplectic(dr, &element(&Poly::zero(dr.ring())), ctx(1), &spec).unwrap();
        assert!(!zero.get("nondegenerate").unwrap().pass);
        let wrong = DualityContext { d: 1, lambda_p: -ctx(1).lambda_p };
        let r = verify_symplectic(dr, &element(&t.omega), wrong, &spec).unwrap();
        assert!(!r.get("symmetric").unwrap().pass);
    }

    #[test]
    fn calibration_signs() {
        assert_eq!(ctx(1).lambda_p, 1);
        assert_eq!(ctx(2).lambda_p, -1);
        assert_eq!(ctx(3).lambda_p, 1);
        assert_eq!(ctx(2), ctx(2));
    }
}
