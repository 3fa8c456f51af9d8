//! Darboux normal form: from `(A, ω)` and a Lagrangian witness to
//! `σ: Sym^ξ_B L_B† → A` with `σ*ω^std_{df} = ω`.

pub mod frobenius;
pub mod moser;
pub mod normalize;
pub mod potential;

use crate::cohom::SliceSpec;
use crate::derham::{DeRham, DeRhamElement};
use crate::dgmod::DualityContext;
use crate::error::{Error, Result};
use crate::gca::{AlgebraMap, Poly, SemifreeCdga};
use crate::report::Report;
use crate::shifted::{form_map, verify_symplectic, TwistedStandard};
use crate::witt::{connectivity_bound, split_off_quadratic, surgery_to_lagrangian, LagrangianData, SurgeryStep, SymmetricComplex, WittWitness};

pub use frobenius::{frobenius_integrate, FrobeniusMode, Integration};
pub use moser::{moser_identify, MoserResult};
pub use normalize::{normalize_presentation, Normalized};
pub use potential::extract_potential;

/// Truncation for the pipeline: slices for cohomology checks, the polynomial
/// degree searched for the potential, and the form degree kept.
#[derive(Clone, Debug)]
pub struct DarbouxConfig {
    pub spec: SliceSpec,
    pub cap: u32,
    pub max_wedge: u32,
}

#[derive(Clone, Debug)]
pub struct DarbouxResult {
    pub base: SemifreeCdga,
    pub f: Poly,
    /// `σ: A′ → A` from the model algebra.
    pub sigma: AlgebraMap,
    pub model: TwistedStandard,
    pub surgery: Vec<SurgeryStep>,
    pub report: Report,
}

impl DarbouxResult {
    /// Report payload: presentations and forms in the text grammar.
    pub fn to_json(&self) -> serde_json::Value {
        let sigma: serde_json::Map<String, serde_json::Value> = self
            .model
            .algebra()
            .gens()
            .iter()
            .zip(self.sigma.images())
            .map(|(g, img)| (g.name.clone(), img.to_string().into()))
            .collect();
        serde_json::json!({
            "base": self.base.to_text(),
            "f": self.f.to_string(),
            "model": self.model.algebra().to_text(),
            "omega_std": self.model.derham().form_text(self.model.omega()),
            "sigma": sigma,
            "surgery": self.surgery,
            "report": self.report,
        })
    }
}

/// `B ⊂ A` integrating a Lagrangian that already satisfies the connectivity bound.
pub fn choose_base_from_lagrangian(a: &SemifreeCdga, lag: &LagrangianData, ctx: DualityContext, spec: &SliceSpec) -> Result<Integration> {
    let mut integ = frobenius_integrate(a, &lag.indices, FrobeniusMode::Foliation, spec)?;
    let rel = frobenius::relative_vanishing(&integ, connectivity_bound(ctx.d), spec)?;
    let ok = rel.passed();
    integ.report.extend("", rel);
    if !ok {
        return Err(Error::Precondition("H^i(L_A/B) does not vanish above the connectivity bound".into()));
    }
    Ok(integ)
}

/// The full pipeline. Inputs with a nonzero middle-degree quadratic block
/// are rejected; use [`crate::witt::split_off_quadratic`] for those.
pub fn darboux_pipeline(
    a: &SemifreeCdga,
    omega: &DeRhamElement,
    ctx: DualityContext,
    witness: &WittWitness,
    cfg: &DarbouxConfig,
) -> Result<DarbouxResult> {
    let dr = DeRham::new(a)?;
    let mut report = Report::new();
    let vs = verify_symplectic(&dr, omega, ctx, &cfg.spec)?;
    if !vs.passed() {
        let f: Vec<String> = vs.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Precondition(format!("not a shifted symplectic form ({})", f.join("; "))));
    }
    report.extend("symplectic: ", vs);
    let phi = form_map(&dr, &dr.component(&omega.form, 2), ctx.d)?;
    let sym = SymmetricComplex::new(phi.target.clone(), phi, ctx)?;
    if ctx.d % 2 == 0 {
        let split = split_off_quadratic(&sym, &cfg.spec)?;
        if !split.middle_indices.is_empty() {
            return Err(Error::Precondition("the form has a middle-degree quadratic block".into()));
        }
    }
    let surgery = surgery_to_lagrangian(&sym, witness, &cfg.spec)?;
    report.extend("surgery: ", surgery.connectivity.clone());
    let integ = choose_base_from_lagrangian(a, &surgery.lagrangian, ctx, &cfg.spec)?;
    let to_original = integ.to_original.clone();
    report.extend("base: ", integ.report.clone());
    let norm = normalize_presentation(integ, ctx)?;
    report.extend("normalize: ", norm.report.clone());
    let dr_r = DeRham::new(norm.algebra())?;
    let omega_r = omega.form.rename_into(dr_r.ring())?;
    let f = extract_potential(&norm, &dr_r, &omega_r, cfg.cap, omega.max_wedge.min(cfg.max_wedge))?;
    let moser = moser_identify(&norm, &dr_r, &omega_r, omega.max_wedge, &f, ctx)?;
    report.extend("moser: ", moser.report.clone());
    let sigma = moser.sigma.compose(&to_original)?;
    let pushed = moser::push_form(&sigma, moser.model.derham(), &dr, moser.model.omega())?;
    let delta = (&pushed - &omega.form).filter_terms(|m| dr.form_degree(m) <= omega.max_wedge);
    if delta.is_zero() {
        report.pass("roundtrip");
    } else {
        report.fail("roundtrip", format!("σ*ω^std − ω = {}", dr.form_text(&delta)));
    }
    Ok(DarbouxResult { base: norm.base().clone(), f, sigma, model: moser.model, surgery: surgery.steps, report })
}
