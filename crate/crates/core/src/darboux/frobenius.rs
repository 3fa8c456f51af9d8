//! Integrating a sub-basis of `L_A` to a sub-presentation `B ⊂ A`.

use serde::Serialize;

use crate::cohom::SliceSpec;
use crate::cotangent::{cotangent_complex, relative_cotangent_triangle};
use crate::error::{Error, Result};
use crate::gca::{AlgebraMap, Generator, Poly, Ring, SemifreeCdga};
use crate::report::Report;
use crate::witt::{quotient, submodule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrobeniusMode {
    /// `H^i(L_A/S) = 0` for `i > −s` and `tordim S ≤ 2s − 1`.
    TorBound { s: i32 },
    Foliation,
}

/// `B` as a prefix of a reordering `A_r` of `A`, with `L_B ⊗ A_r = S`.
#[derive(Clone, Debug)]
pub struct Integration {
    pub base: SemifreeCdga,
    /// `A` with the generators of `B` moved to the front.
    pub reordered: SemifreeCdga,
    /// Index in `A` of each generator of `A_r`.
    pub order: Vec<usize>,
    /// The renaming isomorphism `A_r → A`.
    pub to_original: AlgebraMap,
    pub report: Report,
}

impl Integration {
    /// Generators of `A_r` outside `B`.
    pub fn fibre(&self) -> std::ops::Range<usize> {
        self.base.len()..self.reordered.len()
    }
}

/// Reorder `a` so that the generators `front` come first (relative orders kept).
pub fn reorder(a: &SemifreeCdga, front: &[usize]) -> Result<(SemifreeCdga, Vec<usize>, AlgebraMap)> {
    let mut order: Vec<usize> = front.to_vec();
    order.sort_unstable();
    order.extend((0..a.len()).filter(|i| !front.contains(i)));
    let gens: Vec<Generator> = order.iter().map(|&i| a.gens()[i].clone()).collect();
    let ring = Ring::new(gens)?;
    let diffs = order.iter().map(|&i| a.diff_of(i).rename_into(&ring)).collect::<Result<Vec<_>>>()?;
    let r = SemifreeCdga::from_parts(ring, diffs)?;
    let images = order.iter().map(|&i| Poly::var(a.ring(), i)).collect();
    let back = AlgebraMap::new(&r, a, images)?;
    Ok((r, order, back))
}

/// Integrate the subcomplex `S ⊂ L_A` spanned by `d g` for `g` in `gens`.
///
/// The integrable case handled here is the one where `gens` generate a
/// sub-cdga; then `B = k[gens]` and `L_B ⊗_B A = S` on the nose. Other
/// foliations are rejected.
pub fn frobenius_integrate(a: &SemifreeCdga, gens: &[usize], mode: FrobeniusMode, spec: &SliceSpec) -> Result<Integration> {
    let la = cotangent_complex(a)?.module;
    let s = submodule(&la, gens).map_err(|e| Error::Precondition(format!("S is not a subcomplex of L_A: {e}")))?;
    for &g in gens {
        if let Some(m) = a.diff_of(g).terms().keys().find(|m| !m.uses_only(|k| gens.contains(&k))) {
            return Err(Error::Precondition(format!(
                "S is not spanned by a sub-presentation: D {} uses {}",
                a.gens()[g].name,
                m.display(a.ring())
            )));
        }
    }
    let mut report = Report::new();
    if let FrobeniusMode::TorBound { s: bound } = mode {
        let q = quotient(&la, gens)?;
        let top = q.basis().iter().map(|b| b.degree).max().unwrap_or(-bound);
        let h = q.cohomology(&SliceSpec { window: (-bound + 1, top.max(-bound + 1)), ..spec.clone() });
        report.approximate |= !h.all_exact();
        report.push("quotient connectivity", h.is_zero(), format!("H^i(L_A/S) = 0 for i > {}", -bound));
        let amp = s.tor_amplitude()?;
        let width = amp.map_or(0, |(lo, hi)| hi - lo);
        report.push("tor dimension", width < 2 * bound, format!("amplitude {amp:?}"));
        if !report.passed() {
            return Err(Error::Precondition(format!("Frobenius hypotheses fail: {:?}", report.failures().collect::<Vec<_>>())));
        }
    }
    let (reordered, order, to_original) = reorder(a, gens)?;
    let base = reordered.prefix(gens.len())?;
    report.pass("integrated");
    Ok(Integration { base, reordered, order, to_original, report })
}

/// `H^i(L_{A/B}) = 0` for `i ≥ lo` on the slices of `spec`.
pub fn relative_vanishing(integ: &Integration, lo: i32, spec: &SliceSpec) -> Result<Report> {
    let tri = relative_cotangent_triangle(&integ.base, &integ.reordered)?;
    let top = tri.relative.basis().iter().map(|b| b.degree).max().unwrap_or(lo).max(lo);
    let h = tri.relative.cohomology(&SliceSpec { window: (lo, top), ..spec.clone() });
    let mut r = Report::new();
    r.approximate = !(h.graded && h.all_exact());
    if h.is_zero() {
        r.pass("relative cotangent");
    } else {
        let s = h.slices.iter().find(|s| s.dim > 0).expect("nonzero slice");
        r.fail("relative cotangent", format!("H^{}(L_A/B) has dimension {}", s.degree, s.dim));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::parse_presentation;

    fn spec() -> SliceSpec {
        SliceSpec::new((-3, 0), 4)
    }

    #[test]
    fn full_lagrangian_recovers_a() {
        let a = parse_presentation("field Q; gen x : 0; gen e : -1; D e = x^2;").unwrap();
        let i = frobenius_integrate(&a, &[0, 1], FrobeniusMode::Foliation, &spec()).unwrap();
        assert_eq!(i.base, a);
    }

    #[test]
    fn lagrangian_of_critical_locus() {
        let a = parse_presentation("field Q; gen x : 0; gen y : -1; D y = x^2;").unwrap();
        let i = frobenius_integrate(&a, &[0], FrobeniusMode::TorBound { s: 1 }, &spec()).unwrap();
        assert_eq!(i.base.to_string(), "field Q;\ngen x : 0;\n");
        assert!(relative_vanishing(&i, 0, &spec()).unwrap().passed());
    }

    #[test]
    fn non_closed_span_is_rejected() {
        let a = parse_presentation("field Q; gen x : 0; gen y : -1; D y = x^2;").unwrap();
        assert!(frobenius_integrate(&a, &[1], FrobeniusMode::Foliation, &spec()).is_err());
    }

    #[test]
    fn reordering_moves_generators_forward() {
        let a = parse_presentation("field Q; gen x : 0; gen z : -1; gen u : 0; D z = x^2;").unwrap();
        let (r, order, back) = reorder(&a, &[0, 2]).unwrap();
        assert_eq!(order, vec![0, 2, 1]);
        assert_eq!(r.gens()[1].name, "u");
        assert_eq!(back.images()[2].to_string(), "z");
    }
}
