//! Reading `A_r = Sym^ξ_B M` off a presentation with `B` in front.


use super::frobenius::Integration;
use crate::dgmod::{BasisElem, DgModule, DualityContext};
use crate::error::{Error, Result};
use crate::gca::{Poly, SemifreeCdga};
use crate::report::Report;
use crate::shifted::TwistData;

/// `D u = λ_u + Σ_v μ_uv v` for the fibre generators `u` of `A_r`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub integration: Integration,
    /// Fibre generators as a module over `B` (basis in `A_r` order).
    pub module: DgModule,
    /// `λ_u ∈ B`, the twist.
    pub xi: Vec<Poly>,
    pub twist: TwistData,
    pub report: Report,
}

impl Normalized {
    pub fn base(&self) -> &SemifreeCdga {
        &self.integration.base
    }

    pub fn algebra(&self) -> &SemifreeCdga {
        &self.integration.reordered
    }

    pub fn fibre(&self) -> std::ops::Range<usize> {
        self.integration.fibre()
    }
}

/// Split `D u` into its parts of fibre degree 0 and 1 over `B`.
///
/// The degree window `⌊(d+1)/2⌋ ≤ −|u| ≤ d` forces linearity in the fibre
/// generators; anything else is reported as an error.
pub fn normalize_presentation(integ: Integration, ctx: DualityContext) -> Result<Normalized> {
    let a = &integ.reordered;
    let b = &integ.base;
    let nb = b.len();
    let fibre: Vec<usize> = integ.fibre().collect();
    let d = ctx.d;
    let mut report = Report::new();
    let lo = (d + 1) / 2;
    let bad: Vec<String> = fibre
        .iter()
        .filter(|&&u| !(lo..=d).contains(&-a.gens()[u].degree))
        .map(|&u| format!("{} : {}", a.gens()[u].name, a.gens()[u].degree))
        .collect();
    if bad.is_empty() {
        report.pass("degree window");
    } else {
        report.fail("degree window", format!("fibre degrees outside [-{d}, -{lo}]: {}", bad.join(", ")));
    }
    let is_fibre = |g: usize| g >= nb;
    let mut xi = Vec::with_capacity(fibre.len());
    let mut diff = vec![vec![b.zero(); fibre.len()]; fibre.len()];
    for (k, &u) in fibre.iter().enumerate() {
        let du = a.diff_of(u);
        let mut lambda = Poly::zero(a.ring());
        for (m, c) in du.terms() {
            match m.count_where(is_fibre) {
                0 => lambda.add_term(m.clone(), c.clone()),
                1 => {
                    let v = m.0.iter().map(|&(g, _)| g as usize).find(|&g| is_fibre(g)).expect("one fibre factor");
                    // D u = Σ μ v with μ on the left
                    let mu = m.without_one(v);
                    let probe = &Poly::term(a.ring(), mu.clone(), c.clone()) * &Poly::var(a.ring(), v);
                    let sign = probe.coeff(m) / c;
                    let j = v - nb;
                    diff[k][j] = &diff[k][j] + &Poly::term(a.ring(), mu, c * sign).restrict(b.ring())?;
                }
                _ => {
                    return Err(Error::Precondition(format!(
                        "D {} is not linear in the fibre generators: term {}",
                        a.gens()[u].name,
                        m.display(a.ring())
                    )))
                }
            }
        }
        xi.push(lambda.restrict(b.ring())?);
    }
    report.pass("linear");
    let basis = fibre
        .iter()
        .map(|&u| {
            let g = &a.gens()[u];
            BasisElem { name: g.name.clone(), degree: g.degree, weight: Some(1) }
        })
        .collect();
    let module = DgModule::new(b, basis, diff)?;
    if !module.is_complex() {
        return Err(Error::Invalid("the fibre differential does not square to zero".into()));
    }
    let twist = TwistData::new(module.clone(), xi.clone())?;
    if let Some(bad) = (0..fibre.len()).find(|&k| !twist.module.entry(k, k).is_zero()) {
        report.fail("triangular", format!("{} appears in its own differential", a.gens()[fibre[bad]].name));
    }
    if !report.passed() {
        let f: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Precondition(f.join("; ")));
    }
    Ok(Normalized { integration: integ, module, xi, twist, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohom::SliceSpec;
    use crate::darboux::frobenius::{frobenius_integrate, FrobeniusMode};
    use crate::dgmod::calibrate;
    use crate::gca::parse_presentation;

    #[test]
    fn critical_locus_reads_off_the_twist() {
        let a = parse_presentation("field Q; gen x : 0; gen y : -1; D y = x^2;").unwrap();
        let i = frobenius_integrate(&a, &[0], FrobeniusMode::Foliation, &SliceSpec::new((-2, 0), 3)).unwrap();
        let n = normalize_presentation(i, calibrate(1).unwrap()).unwrap();
        assert_eq!(n.xi[0].to_string(), "x^2");
        assert!(n.module.entry(0, 0).is_zero());
    }

    #[test]
    fn fibre_outside_window_is_rejected() {
        let a = parse_presentation("field Q; gen x : 0; gen y : 0;").unwrap();
        let i = frobenius_integrate(&a, &[0], FrobeniusMode::Foliation, &SliceSpec::new((-2, 0), 3)).unwrap();
        assert!(normalize_presentation(i, calibrate(1).unwrap()).is_err());
    }
}
