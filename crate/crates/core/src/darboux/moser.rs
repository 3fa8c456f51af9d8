//! Identifying `(A, ω)` with the standard twisted structure on `Sym^ξ_B L_B†`.

use num::One;

use super::normalize::Normalized;
use crate::derham::DeRham;
use crate::dgmod::DualityContext;
use crate::error::{Error, Result};
use crate::gca::{AlgebraMap, Poly};
use crate::linalg::DenseMat;
use crate::report::Report;
use crate::shifted::{twisted_standard_form, TwistedStandard};
use crate::Q;

#[derive(Clone, Debug)]
pub struct MoserResult {
    pub model: TwistedStandard,
    /// `σ: A′ → A_r` with `A′` the model algebra.
    pub sigma: AlgebraMap,
    /// `σ*ω^std − ω`, truncated.
    pub delta: Poly,
    pub report: Report,
}

/// Coefficient `P` in `ω₂ = Σ P_ug du ∧ dg + …` (the `du ∧ dg` factor on the right).
pub fn pairing(dr: &DeRham, omega2: &Poly, u: usize, g: usize) -> Result<Poly> {
    let n = dr.n();
    let (du, dg) = (dr.dz(u), dr.dz(g));
    let mut out = Poly::zero(dr.ring());
    for (m, c) in omega2.terms() {
        if dr.form_degree(m) != 2 || m.exponent(n + u) != 1 || m.exponent(n + g) != 1 {
            continue;
        }
        let rest = m.without_one(n + u).without_one(n + g);
        let probe = &(&Poly::term(dr.ring(), rest.clone(), Q::one()) * &du) * &dg;
        let s = probe.coeff(m);
        out.add_term(rest, c * s);
    }
    dr.to_function(&out)
}

/// Push a form along an algebra map `σ: S → T` to the de Rham ring of `T`.
pub fn push_form(sigma: &AlgebraMap, src: &DeRham, tgt: &DeRham, w: &Poly) -> Result<Poly> {
    let n = src.n();
    let mut images = Vec::with_capacity(2 * n);
    for img in sigma.images() {
        images.push(tgt.function(img)?);
    }
    for i in 0..n {
        let f = images[i].clone();
        images.push(tgt.d(&f));
    }
    Ok(w.substitute(&images, tgt.ring()))
}

/// Build `A′ = Sym^{ξ′}_B L_B†` for the potential `f` and `σ: A′ → A_r` from the
/// pairing of `ω₂`, then check `σ*ω^std_{df} = ω` as truncated representatives.
pub fn moser_identify(
    norm: &Normalized,
    dr: &DeRham,
    omega: &Poly,
    max_wedge: u32,
    f: &Poly,
    ctx: DualityContext,
) -> Result<MoserResult> {
    let a = norm.algebra();
    let b = norm.base();
    let nb = b.len();
    let fibre: Vec<usize> = norm.fibre().collect();
    if fibre.len() != nb {
        return Err(Error::Precondition(format!("{} fibre generators for {nb} base generators", fibre.len())));
    }
    let model = twisted_standard_form(b, ctx, f)?;
    let omega2 = dr.component(omega, 2);
    let mut p = vec![vec![a.zero(); nb]; fibre.len()];
    for (k, &u) in fibre.iter().enumerate() {
        for (g, row) in p[k].iter_mut().enumerate() {
            *row = pairing(dr, &omega2, u, g)?;
        }
    }
    let mut report = Report::new();
    let constant = DenseMat::from_fn(nb, nb, |k, g| p[k][g].constant_term());
    let invertible = constant.rank() == nb;
    report.push("pairing invertible", invertible, "constant part of the fibre/base pairing");
    if !invertible {
        return Err(Error::Precondition("ω₂ does not pair the fibre with the base invertibly".into()));
    }
    let ring = a.ring();
    let mut images: Vec<Poly> = (0..nb).map(|g| Poly::var(ring, g)).collect();
    images.resize(model.algebra().len(), Poly::zero(ring));
    for g in 0..nb {
        let mut img = Poly::zero(ring);
        for (k, &u) in fibre.iter().enumerate() {
            img = &img + &(&p[k][g] * &Poly::var(ring, u));
        }
        images[model.cotangent.fibre_of[g]] = img;
    }
    let sigma = AlgebraMap::new(model.algebra(), a, images)
        .map_err(|e| Error::Invalid(format!("the identification is not a cdga map: {e}")))?;
    report.pass("sigma is a cdga map");
    let pushed = push_form(&sigma, model.derham(), dr, model.omega())?;
    let delta = (&pushed - omega).filter_terms(|m| dr.form_degree(m) <= max_wedge);
    if delta.is_zero() {
        report.pass("moser");
    } else {
        report.fail("moser", format!("σ*ω^std − ω = {}", dr.form_text(&delta)));
    }
    // fibres sit in negative degree, so A⁰ = B⁰
    let surj = fibre.iter().all(|&u| a.gens()[u].degree < 0);
    report.push("H0 surjective", surj, "A⁰ = B⁰");
    // σ is linear in the fibres with invertible constant part: an isomorphism
    report.push("relative cotangent", invertible, "L_{A′/A} = 0");
    Ok(MoserResult { model, sigma, delta, report })
}
