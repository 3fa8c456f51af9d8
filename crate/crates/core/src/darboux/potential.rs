//! The potential `f` with `e^ξ ω ≡ π*(−df)` in weight zero.


use super::normalize::Normalized;
use crate::derham::{DeRham, Primitive, VectorField};
use crate::error::{Error, Result};
use crate::gca::Poly;

/// The twist as a vector field on `A_r`: `ι_ξ(du) = −λ_u`.
pub fn twist_field(norm: &Normalized, dr: &DeRham) -> Result<VectorField> {
    let a = norm.algebra();
    let mut values = vec![Poly::zero(dr.ring()); a.len()];
    for (k, u) in norm.fibre().enumerate() {
        values[u] = -dr.function(&norm.xi[k].embed(a.ring())?)?;
    }
    Ok(VectorField { degree: 1, values })
}

/// Move a form on `A_r` that only involves base generators into the de Rham
/// ring of `B` (a prefix of `A_r`).
pub fn to_base_forms(dr: &DeRham, dr_b: &DeRham, w: &Poly) -> Result<Poly> {
    let (n, nb) = (dr.n(), dr_b.n());
    let map: Vec<usize> = (0..2 * n).map(|g| if g < n { g } else { nb + g - n }).collect();
    let mut out = Poly::zero(dr_b.ring());
    for (m, c) in w.terms() {
        if !m.uses_only(|g| g % n < nb) {
            return Err(Error::Invalid(format!("{} involves fibre generators", dr.form_text(w))));
        }
        let (neg, mm) = m.reindex(&map, dr_b.ring());
        out.add_term(mm, if neg { -c.clone() } else { c.clone() });
    }
    Ok(out)
}

/// `γ`, the weight-zero part of `e^ξ ω` (a closed form on `B`).
pub fn weight_zero_part(norm: &Normalized, dr: &DeRham, omega: &Poly) -> Result<Poly> {
    let xi = twist_field(norm, dr)?;
    let weights: Vec<i64> = (0..dr.n()).map(|g| i64::from(g >= norm.base().len())).collect();
    let e = dr.exp_iota(&xi, omega);
    Ok(dr.weight_decompose(&e, &weights).remove(&0).unwrap_or_else(|| Poly::zero(dr.ring())))
}

/// Solve `γ ≡ −df` on `B` among functions of polynomial degree at most `cap`.
pub fn extract_potential(norm: &Normalized, dr: &DeRham, omega: &Poly, cap: u32, max_wedge: u32) -> Result<Poly> {
    let gamma = weight_zero_part(norm, dr, omega)?;
    let dr_b = DeRham::new(norm.base())?;
    let gamma_b = to_base_forms(dr, &dr_b, &gamma)?;
    match dr_b.find_primitive(&gamma_b, cap, max_wedge)? {
        Primitive::Found { f, .. } => dr_b.to_function(&f),
        Primitive::Obstructed { residue } => Err(Error::Precondition(format!(
            "the weight-zero part is not exact within polynomial degree {cap}: residue {}",
            dr_b.form_text(&residue)
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohom::SliceSpec;
    use crate::darboux::frobenius::{frobenius_integrate, FrobeniusMode};
    use crate::darboux::normalize::normalize_presentation;
    use crate::dgmod::calibrate;
    use crate::gca::parse_presentation;

    fn potential(text: &str, base: &[usize], omega: &str) -> String {
        let a = parse_presentation(text).unwrap();
        let i = frobenius_integrate(&a, base, FrobeniusMode::Foliation, &SliceSpec::new((-2, 0), 3)).unwrap();
        let n = normalize_presentation(i, calibrate(1).unwrap()).unwrap();
        let dr = DeRham::new(n.algebra()).unwrap();
        let w = dr.parse_form(omega).unwrap();
        extract_potential(&n, &dr, &w, 4, 3).unwrap().to_string()
    }

    #[test]
    fn critical_locus_potential() {
        assert_eq!(potential("field Q; gen x : 0; gen y : -1; D y = x^2;", &[0], "d(y)^d(x)"), "1/3*x^3");
    }

    #[test]
    fn untwisted_potential_is_zero() {
        assert_eq!(potential("field Q; gen x : 0; gen y : -1;", &[0], "d(y)^d(x)"), "0");
    }

    #[test]
    fn product_potential() {
        let text = "field Q; gen x1 : 0; gen x2 : 0; gen y2 : -1; gen y1 : -1; D y1 = x2; D y2 = x1;";
        assert_eq!(potential(text, &[0, 1], "d(y1)^d(x1) + d(y2)^d(x2)"), "x1*x2");
    }
}
