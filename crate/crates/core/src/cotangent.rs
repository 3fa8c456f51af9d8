//! Cotangent complexes of semifree presentations and the connectivity criterion.

use serde::Serialize;

use crate::cohom::{Complex, SliceSpec};
use crate::derham::DeRham;
use crate::dgmod::{BasisElem, DgMap, DgModule};
use crate::error::{Error, Result};
use crate::gca::cdga::fresh_name;
use crate::gca::{AlgebraMap, Generator, Poly, SemifreeCdga};
use crate::report::Report;

/// `L_A`: the free module on `dz_i` with `D(dz_i) = −d(D z_i)`.
#[derive(Clone, Debug)]
pub struct CotangentComplex {
    pub module: DgModule,
    derham: DeRham,
}

impl CotangentComplex {
    pub fn new(a: &SemifreeCdga) -> Result<Self> {
        let rep = a.check_presentation();
        if let Some(f) = rep.failures().next() {
            return Err(Error::Invalid(format!("invalid presentation: {} ({})", f.name, f.detail)));
        }
        let dr = DeRham::new(a)?;
        let n = a.len();
        let basis = a
            .gens()
            .iter()
            .map(|g| {
                let mut b = BasisElem::new(format!("d({})", g.name), g.degree);
                b.weight = g.weight;
                b
            })
            .collect();
        let mut diff = Vec::with_capacity(n);
        for i in 0..n {
            let img = dr.big_d(&dr.dz(i));
            let row = (0..n).map(|j| dr.to_function(&dr.coefficient(&img, j))).collect::<Result<Vec<_>>>()?;
            diff.push(row);
        }
        let module = DgModule::new(a, basis, diff)?;
        Ok(CotangentComplex { module, derham: dr })
    }

    pub fn base(&self) -> &SemifreeCdga {
        self.module.base()
    }

    pub fn derham(&self) -> &DeRham {
        &self.derham
    }

    /// The universal derivation `d: A → L_A`, as a coefficient vector.
    pub fn universal(&self, f: &Poly) -> Result<Vec<Poly>> {
        let dr = &self.derham;
        let w = dr.d(&dr.function(f)?);
        (0..dr.n()).map(|j| dr.to_function(&dr.coefficient(&w, j))).collect()
    }
}

pub fn cotangent_complex(a: &SemifreeCdga) -> Result<CotangentComplex> {
    CotangentComplex::new(a)
}

/// `L_B ⊗ A → L_A → L_{A/B}` for a prefix inclusion `B ⊂ A`.
#[derive(Clone, Debug)]
pub struct RelativeTriangle {
    pub pulled: DgModule,
    pub absolute: DgModule,
    pub relative: DgModule,
    pub incl: DgMap,
    pub proj: DgMap,
}

impl RelativeTriangle {
    /// The comparison `cone(L_B ⊗ A → L_A) → L_{A/B}`.
    pub fn comparison(&self) -> Result<DgMap> {
        let (cone, _, _) = self.incl.cone()?;
        let k = self.pulled.rank();
        let z = self.absolute.base().zero();
        let mut matrix = vec![vec![z; self.relative.rank()]; cone.rank()];
        for (i, row) in self.proj.matrix.iter().enumerate() {
            matrix[k + i] = row.clone();
        }
        DgMap::new(&cone, &self.relative, matrix, 0)
    }
}

pub fn relative_cotangent_triangle(b: &SemifreeCdga, a: &SemifreeCdga) -> Result<RelativeTriangle> {
    let inc = AlgebraMap::inclusion(b, a)?;
    let lb = cotangent_complex(b)?.module.base_change(&inc)?;
    let la = cotangent_complex(a)?.module;
    let k = b.len();
    let n = a.len();
    let basis = la.basis()[k..].to_vec();
    let diff = (k..n).map(|i| la.diff()[i][k..].to_vec()).collect();
    let rel = DgModule::new(a, basis, diff)?;
    let (one, zero) = (a.one(), a.zero());
    let incl = (0..k).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    let proj = (0..n).map(|j| (k..n).map(|i| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    Ok(RelativeTriangle {
        incl: DgMap::new(&lb, &la, incl, 0)?,
        proj: DgMap::new(&la, &rel, proj, 0)?,
        pulled: lb,
        absolute: la,
        relative: rel,
    })
}

/// Both sides of the connectivity equivalence, evaluated on weight slices.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    pub d: i32,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub agree: bool,
    /// `dim H^{−d}(A ⊗_B K)` and `dim H^{−d}(L_{A/B})` per weight, when condition (ii) holds.
    pub moreover: Option<Vec<(Vec<i64>, usize, usize)>>,
    pub exact: bool,
    pub report: Report,
}

impl ConnectivityReport {
    pub fn moreover_holds(&self) -> bool {
        self.moreover.as_ref().is_none_or(|v| v.iter().all(|(_, a, b)| a == b))
    }
}

/// Per weight slice: weight, rank of the induced map, dimensions, exactness.
type SliceRanks = Vec<(Vec<i64>, usize, usize, usize, bool)>;

/// Rank of `H^i(B) → H^i(A)` and `dim H^i(A)` on every slice of the window.
fn induced(b: &SemifreeCdga, a: &SemifreeCdga, spec: &SliceSpec, i: i32) -> Result<SliceRanks> {
    let window = SliceSpec { window: (i, i), ..spec.clone() };
    let cb = Complex::of_cdga(b).with_cdga_weights(b).weights_only();
    let ca = Complex::of_cdga(a).with_cdga_weights(a).weights_only();
    let hb = cb.cohomology(&window);
    let ha = ca.cohomology(&window);
    let mut keys: Vec<Vec<i64>> = ha.slices.iter().map(|s| s.weight.clone()).collect();
    keys.extend(hb.slices.iter().map(|s| s.weight.clone()));
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for key in keys {
        let sa = ha.slices.iter().find(|s| s.weight == key);
        let sb = hb.slices.iter().find(|s| s.weight == key);
        let dim_a = sa.map_or(0, |s| s.dim);
        let dim_b = sb.map_or(0, |s| s.dim);
        let reps: Vec<Poly> = match sb {
            Some(s) => s.representatives.iter().map(|r| r.embed(a.ring())).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let rank = if reps.is_empty() { 0 } else { ca.rank_mod_boundaries(&window, i, &key, &reps) };
        let exact = sa.is_none_or(|s| s.exact) && sb.is_none_or(|s| s.exact);
        out.push((key, dim_b, dim_a, rank, exact));
    }
    Ok(out)
}

/// Evaluate conditions (i) and (ii) for `B ⊂ A` on the slices of `spec`
/// (weights of the presentations are used when present).
pub fn check_connectivity(b: &SemifreeCdga, a: &SemifreeCdga, d: i32, spec: &SliceSpec) -> Result<ConnectivityReport> {
    if d < 1 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    let tri = relative_cotangent_triangle(b, a)?;
    let mut report = Report::default();
    let mut exact = true;

    // (i)
    let mut surj0 = true;
    for (key, _, dim_a, rank, ex) in induced(b, a, spec, 0)? {
        exact &= ex;
        if rank != dim_a {
            surj0 = false;
            report.fail("H0 surjective", format!("weight {key:?}: rank {rank} < dim {dim_a}"));
        }
    }
    if surj0 {
        report.pass("H0 surjective");
    }
    let rel = tri.relative.complex().with_weights(weights_for(&tri.relative)).weights_only();
    let hl = rel.cohomology(&SliceSpec { window: (-d + 1, 0), ..spec.clone() });
    exact &= hl.all_exact();
    let rel_vanish = hl.is_zero();
    if rel_vanish {
        report.pass("relative cotangent vanishes");
    } else {
        let s = hl.slices.iter().find(|s| s.dim > 0).expect("nonzero slice");
        report.fail("relative cotangent vanishes", format!("H^{}(L_A/B) weight {:?} has dim {}", s.degree, s.weight, s.dim));
    }
    let condition_i = surj0 && rel_vanish;

    // (ii)
    let mut condition_ii = true;
    for i in (-d + 1)..=0 {
        for (key, dim_b, dim_a, rank, ex) in induced(b, a, spec, i)? {
            exact &= ex;
            let ok = if i == -d + 1 { rank == dim_a } else { rank == dim_a && rank == dim_b };
            if !ok {
                condition_ii = false;
                report.fail(
                    format!("H^{i} comparison"),
                    format!("weight {key:?}: dim B {dim_b}, dim A {dim_a}, rank {rank}"),
                );
            }
        }
    }
    if condition_ii {
        report.pass("connectivity");
    }

    let moreover = if condition_ii {
        let quot = tensor_with_quotient(b, a)?;
        let spec_d = SliceSpec { window: (-d, -d), ..spec.clone() };
        let hk = quot.cohomology(&spec_d);
        let hr = rel.cohomology(&spec_d);
        exact &= hk.all_exact() && hr.all_exact();
        let mut keys: Vec<Vec<i64>> = hk.slices.iter().chain(&hr.slices).map(|s| s.weight.clone()).collect();
        keys.sort();
        keys.dedup();
        let rows: Vec<_> = keys
            .into_iter()
            .map(|w| {
                let dk = hk.slices.iter().find(|s| s.weight == w).map_or(0, |s| s.dim);
                let dl = hr.slices.iter().find(|s| s.weight == w).map_or(0, |s| s.dim);
                (w, dk, dl)
            })
            .collect();
        if rows.iter().all(|(_, x, y)| x == y) {
            report.pass("moreover isomorphism");
        } else {
            report.fail("moreover isomorphism", "dimensions differ".to_string());
        }
        Some(rows)
    } else {
        None
    };
    let agree = condition_i == condition_ii;
    if agree {
        report.pass("equivalence");
    } else {
        report.fail("equivalence", format!("(i) = {condition_i}, (ii) = {condition_ii}"));
    }
    report.approximate = !exact;
    Ok(ConnectivityReport { d, condition_i, condition_ii, agree, moreover, exact, report })
}

/// `A ⊗_B (A/B)` modelled on `A` with a second copy of the cells of `A` over `B`,
/// keeping the monomials that involve the copy. Since `A/B` is semifree over
/// `B`, this computes the derived tensor product with `K = cone(B → A)`.
pub fn tensor_with_quotient(b: &SemifreeCdga, a: &SemifreeCdga) -> Result<Complex> {
    let k = b.len();
    let n = a.len();
    let copies: Vec<Generator> = a.gens()[k..]
        .iter()
        .map(|g| {
            let mut h = g.clone();
            h.name = fresh_name(a.ring(), &format!("{}'", g.name));
            h
        })
        .collect();
    let a2 = a.extend(copies, |r| {
        let images: Vec<Poly> = (0..n).map(|i| Poly::var(r, if i < k { i } else { n + i - k })).collect();
        (k..n).map(|i| a.diff_of(i).substitute(&images, r)).collect()
    })?;
    Ok(Complex::of_cdga(&a2).with_cdga_weights(&a2).weights_only().with_filter(move |m| m.max_gen().is_some_and(|g| g >= n)))
}

fn weights_for(m: &DgModule) -> Vec<Vec<i64>> {
    let base = m.base();
    base.gens().iter().map(|g| vec![g.weight.unwrap_or(0)]).chain(m.basis().iter().map(|b| vec![b.weight.unwrap_or(0)])).collect()
}

/// Finite presentation criterion: `H⁰(A)` is finitely presented and `L_A` perfect.
pub fn is_finitely_presented_criterion(a: &SemifreeCdga) -> Report {
    let mut r = Report::default();
    let zero = a.gens().iter().filter(|g| g.degree == 0).count();
    let rel = a.gens().iter().filter(|g| g.degree == -1).count();
    r.push("H0 finitely presented", true, format!("{zero} generators, {rel} relations"));
    r.push("cotangent perfect", true, format!("finite free of rank {}", a.len()));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::parse_presentation;

    fn crit() -> SemifreeCdga {
        parse_presentation("field Q; gen x : 0 weight 1; gen xi : -1 weight 2; D xi = x^2;").unwrap()
    }

    #[test]
    fn cotangent_of_critical_point() {
        let l = cotangent_complex(&crit()).unwrap();
        assert_eq!(l.module.entry(1, 0).to_string(), "-2*x");
        assert!(l.module.is_complex());
    }

    #[test]
    fn relative_cotangent_kills_the_base_direction() {
        let a = crit();
        let b = a.prefix(1).unwrap();
        let t = relative_cotangent_triangle(&b, &a).unwrap();
        assert_eq!(t.relative.rank(), 1);
        assert!(t.relative.entry(0, 0).is_zero());
        let cmp = t.comparison().unwrap();
        assert!(cmp.is_chain_map());
        assert!(cmp.is_quis(&SliceSpec::new((-2, 0), 4)).unwrap());
    }

    #[test]
    fn connectivity_of_critical_point() {
        let a = crit();
        let b = a.prefix(1).unwrap();
        let r = check_connectivity(&b, &a, 1, &SliceSpec::new((-2, 0), 6).with_max_weight(6)).unwrap();
        assert!(r.condition_i && r.condition_ii && r.moreover_holds(), "{r:?}");
    }

    #[test]
    fn connectivity_fails_for_a_free_variable() {
        let a = parse_presentation("field Q; gen x : 0 weight 1;").unwrap();
        let b = a.prefix(0).unwrap();
        let r = check_connectivity(&b, &a, 1, &SliceSpec::new((-2, 0), 4).with_max_weight(4)).unwrap();
        assert!(!r.condition_i && !r.condition_ii && r.agree);
    }
}
