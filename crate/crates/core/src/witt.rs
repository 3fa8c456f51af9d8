//! P-symmetric complexes, Lagrangians given by sub-bases, surgery and the
//! middle-degree quadratic splitting.
//!
//! Lagrangians are represented by a set of basis indices of `M` spanning a
//! subcomplex `N`; the quotient `M/N` is spanned by the complementary basis.

use num::Zero;
use serde::Serialize;

use crate::cohom::SliceSpec;
use crate::dgmod::{module_body, DgMap, DgModule, DualityContext};
use crate::error::{Error, Result};
use crate::gca::parse::{lex, Parser};
use crate::gca::Poly;
use crate::report::Report;
use crate::shifted::quis_check;
use crate::Q;

/// `φ: M† → M` with the duality context it is symmetric for.
#[derive(Clone, Debug)]
pub struct SymmetricComplex {
    pub module: DgModule,
    pub phi: DgMap,
    pub ctx: DualityContext,
}

impl SymmetricComplex {
    pub fn new(module: DgModule, phi: DgMap, ctx: DualityContext) -> Result<Self> {
        if phi.source.rank() != module.rank() || phi.target.rank() != module.rank() || phi.shift != 0 {
            return Err(Error::Invalid("the form must be a degree-0 map M† → M".into()));
        }
        Ok(SymmetricComplex { module, phi, ctx })
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn check(&self, spec: &SliceSpec) -> Result<Report> {
        check_symmetric(&self.module, &self.phi, self.ctx, spec)
    }

    /// Orthogonal sum; the form is block diagonal.
    pub fn sum(&self, other: &SymmetricComplex) -> Result<SymmetricComplex> {
        let (n, m) = (self.rank(), other.rank());
        let module = self.module.sum(&other.module);
        let zero = self.module.base().zero();
        let mut matrix = vec![vec![zero; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] = self.phi.matrix[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                matrix[n + i][n + j] = other.phi.matrix[i][j].clone();
            }
        }
        let phi = DgMap::new(&module.dagger(self.ctx.d), &module, matrix, 0)?;
        SymmetricComplex::new(module, phi, self.ctx)
    }

    /// Restriction to the basis elements `idx`, valid when `idx` spans an
    /// orthogonal direct summand.
    pub fn restrict(&self, idx: &[usize]) -> Result<SymmetricComplex> {
        let module = summand(&self.module, idx)?;
        let matrix = idx.iter().map(|&i| idx.iter().map(|&j| self.phi.matrix[i][j].clone()).collect()).collect();
        let phi = DgMap::new(&module.dagger(self.ctx.d), &module, matrix, 0)?;
        SymmetricComplex::new(module, phi, self.ctx)
    }
}

/// Chain map, quasi-isomorphism and `φ† = η φ`.
pub fn check_symmetric(m: &DgModule, phi: &DgMap, ctx: DualityContext, spec: &SliceSpec) -> Result<Report> {
    let mut r = Report::new();
    match phi.first_chain_violation() {
        None => r.pass("chain map"),
        Some(i) => r.fail("chain map", format!("fails on {}", phi.source.basis()[i].name)),
    }
    if phi.target.rank() != m.rank() {
        r.fail("quasi-isomorphism", "the form does not land in M");
    } else {
        let q = quis_check(phi, spec)?;
        r.approximate |= !q.exact;
        r.push("quasi-isomorphism", q.pass, format!("by {}", q.method));
    }
    r.push("symmetric", ctx.is_symmetric(phi), format!("lambda_P = {}", ctx.lambda_p));
    Ok(r)
}

/// The hyperbolic form on `N ⊕ N†`: `b† ↦ b†` and `b†† ↦ λ_P (−1)^{(d+1)|b|} b`.
pub fn hyperbolic(n: &DgModule, ctx: DualityContext) -> Result<SymmetricComplex> {
    let module = n.sum(&n.dagger(ctx.d));
    let k = n.rank();
    let ring = n.base().ring().clone();
    let mut matrix = vec![vec![n.base().zero(); 2 * k]; 2 * k];
    for i in 0..k {
        let odd = ((ctx.d + 1) * n.basis()[i].degree).rem_euclid(2) == 1;
        let t = i64::from(ctx.lambda_p) * if odd { -1 } else { 1 };
        matrix[i][k + i] = Poly::one(&ring);
        matrix[k + i][i] = Poly::constant(&ring, Q::from_integer(t.into()));
    }
    let phi = DgMap::new(&module.dagger(ctx.d), &module, matrix, 0)?;
    SymmetricComplex::new(module, phi, ctx)
}

/// A Lagrangian `N ⊂ M` with its quotient and the factorisation `(M/N)† → N`.
#[derive(Clone, Debug)]
pub struct LagrangianData {
    /// Basis indices of `M` spanning `N` (sorted).
    pub indices: Vec<usize>,
    pub n: DgModule,
    pub inclusion: DgMap,
    pub quotient: DgModule,
    pub factor: DgMap,
    pub report: Report,
}

impl LagrangianData {
    /// `S†`, quasi-isomorphic to `M/N`.
    pub fn dual(&self, d: i32) -> DgModule {
        self.n.dagger(d)
    }

    pub fn names(&self) -> Vec<String> {
        self.n.basis().iter().map(|b| b.name.clone()).collect()
    }
}

fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !idx.contains(i)).collect()
}

/// Sub-basis module; `idx` must be closed under `D`.
pub fn submodule(m: &DgModule, idx: &[usize]) -> Result<DgModule> {
    for &i in idx {
        if let Some(j) = (0..m.rank()).find(|j| !idx.contains(j) && !m.entry(i, *j).is_zero()) {
            return Err(Error::Invalid(format!(
                "{} is not a subcomplex: D {} involves {}",
                names(m, idx),
                m.basis()[i].name,
                m.basis()[j].name
            )));
        }
    }
    Ok(restrict_module(m, idx))
}

/// Quotient by the subcomplex spanned by `idx`.
pub fn quotient(m: &DgModule, idx: &[usize]) -> Result<DgModule> {
    submodule(m, idx)?;
    Ok(restrict_module(m, &complement(m.rank(), idx)))
}

fn summand(m: &DgModule, idx: &[usize]) -> Result<DgModule> {
    submodule(m, idx)?;
    submodule(m, &complement(m.rank(), idx))?;
    Ok(restrict_module(m, idx))
}

fn restrict_module(m: &DgModule, idx: &[usize]) -> DgModule {
    let basis = idx.iter().map(|&i| m.basis()[i].clone()).collect();
    let diff = idx.iter().map(|&i| idx.iter().map(|&j| m.entry(i, j).clone()).collect()).collect();
    DgModule::new(m.base(), basis, diff).expect("restriction of a valid module")
}

fn names(m: &DgModule, idx: &[usize]) -> String {
    let v: Vec<&str> = idx.iter().map(|&i| m.basis()[i].name.as_str()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Validate the sub-basis `idx` as a Lagrangian of `sym`: `N` is a subcomplex,
/// `φ` carries `(M/N)†` into `N`, and `(M/N)† → N` is a quasi-isomorphism.
pub fn lagrangian(sym: &SymmetricComplex, idx: &[usize], spec: &SliceSpec) -> Result<LagrangianData> {
    let m = &sym.module;
    let mut indices = idx.to_vec();
    indices.sort_unstable();
    indices.dedup();
    if indices.iter().any(|&i| i >= m.rank()) {
        return Err(Error::Invalid("Lagrangian index out of range".into()));
    }
    let n = submodule(m, &indices)?;
    let rest = complement(m.rank(), &indices);
    let quotient = restrict_module(m, &rest);
    let (one, zero) = (m.base().one(), m.base().zero());
    let incl = indices.iter().map(|&i| (0..m.rank()).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    let inclusion = DgMap::new(&n, m, incl, 0)?;
    let mut factor = Vec::with_capacity(rest.len());
    for &c in &rest {
        let row = &sym.phi.matrix[c];
        if let Some(j) = rest.iter().find(|&&j| !row[j].is_zero()) {
            return Err(Error::Invalid(format!(
                "not co-isotropic: the form sends {} to {}",
                sym.phi.source.basis()[c].name,
                m.basis()[*j].name
            )));
        }
        factor.push(indices.iter().map(|&j| row[j].clone()).collect());
    }
    // (M/N)† as a subcomplex of M†, keeping the weights the form was built with
    let source = restrict_module(&sym.phi.source, &rest);
    let factor = DgMap::new(&source, &n, factor, 0)?;
    let mut report = Report::new();
    match factor.first_chain_violation() {
        None => report.pass("factorisation"),
        Some(i) => report.fail("factorisation", format!("not a chain map at {}", factor.source.basis()[i].name)),
    }
    let q = quis_check(&factor, spec)?;
    report.approximate |= !q.exact;
    report.push("lagrangian", q.pass, format!("N/(M/N)† acyclic by {}", q.method));
    if !report.passed() {
        let f: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Invalid(format!("{} is not Lagrangian ({})", names(m, &indices), f.join("; "))));
    }
    Ok(LagrangianData { indices, n, inclusion, quotient, factor, report })
}

/// Evidence that a symmetric complex is zero in the Witt group.
#[derive(Clone, Debug)]
pub enum WittWitness {
    /// A Lagrangian of `M` itself.
    Lagrangian(Vec<usize>),
    /// A Lagrangian `L` of `H(P) ⊕ M` (basis `P, P†, M`) containing the `P†` summand;
    /// then `L̃ = cone(L → P†)[−1]` is `L ∩ M`.
    Stabilized { p: DgModule, lagrangian: Vec<usize> },
}

/// One basis exchange performed by surgery.
#[derive(Clone, Debug, Serialize)]
pub struct SurgeryStep {
    pub removed: String,
    pub added: String,
    pub degree: i32,
}

#[derive(Clone, Debug)]
pub struct SurgeryResult {
    pub lagrangian: LagrangianData,
    pub steps: Vec<SurgeryStep>,
    /// `H^i(S†) = 0` for `i ≥ −⌊(d−1)/2⌋`.
    pub connectivity: Report,
}

/// Lowest degree in which `H(S†)` must vanish.
pub fn connectivity_bound(d: i32) -> i32 {
    -((d - 1).div_euclid(2))
}

fn connectivity(s_dual: &DgModule, d: i32, spec: &SliceSpec) -> Result<(bool, Report)> {
    let lo = connectivity_bound(d);
    let hi = s_dual.basis().iter().map(|b| b.degree).max().unwrap_or(lo).max(lo);
    let window = SliceSpec { window: (lo, hi), ..spec.clone() };
    let h = s_dual.cohomology(&window);
    let mut r = Report::new();
    if h.graded && h.all_exact() {
        let zero = h.is_zero();
        r.push("connectivity", zero, format!("H^i(S†) = 0 for i >= {lo} on exact slices"));
        return Ok((zero, r));
    }
    // Tor amplitude at most b forces H^i = 0 for i > b over a connective base
    let amp = s_dual.tor_amplitude()?;
    let ok = h.is_zero() && amp.is_none_or(|(_, b)| b < lo);
    r.approximate = true;
    r.push("connectivity", ok, format!("Tor amplitude {amp:?} below {lo}"));
    Ok((ok, r))
}

/// Convert a Witt-zero witness into a Lagrangian `S → M → S†` and normalise
/// it by surgery: while `H^i(S†) ≠ 0` for some `i ≥ −⌊(d−1)/2⌋`, exchange the
/// top-degree basis element of `M/S` with its partner in `S`.
pub fn surgery_to_lagrangian(sym: &SymmetricComplex, witness: &WittWitness, spec: &SliceSpec) -> Result<SurgeryResult> {
    let d = sym.ctx.d;
    let mut idx = match witness {
        WittWitness::Lagrangian(idx) => idx.clone(),
        WittWitness::Stabilized { p, lagrangian: l } => {
            let k = p.rank();
            let h = hyperbolic(p, sym.ctx)?;
            let total = h.sum(sym)?;
            let full = self::lagrangian(&total, l, spec)?;
            if (k..2 * k).any(|i| !full.indices.contains(&i)) {
                return Err(Error::Invalid("the stabilising Lagrangian must contain the P† summand".into()));
            }
            full.indices.iter().filter(|&&i| i >= 2 * k).map(|&i| i - 2 * k).collect()
        }
    };
    let mut lag = lagrangian(sym, &idx, spec)?;
    let mut steps = Vec::new();
    let lo = connectivity_bound(d);
    for _ in 0..=sym.rank() {
        let (ok, report) = connectivity(&lag.dual(d), d, spec)?;
        if ok {
            return Ok(SurgeryResult { lagrangian: lag, steps, connectivity: report });
        }
        let m = &sym.module;
        let rest = complement(m.rank(), &lag.indices);
        let Some(&c) = rest.iter().filter(|&&c| m.basis()[c].degree >= lo).max_by_key(|&&c| (m.basis()[c].degree, c)) else {
            return Err(Error::Invalid("no basis element of M/S carries the offending cohomology".into()));
        };
        let row = &sym.phi.matrix[c];
        let Some(&p) = lag.indices.iter().find(|&&j| !row[j].constant_term().is_zero()) else {
            return Err(Error::Invalid(format!("{} has no invertible partner in S", m.basis()[c].name)));
        };
        steps.push(SurgeryStep { removed: m.basis()[p].name.clone(), added: m.basis()[c].name.clone(), degree: m.basis()[c].degree });
        idx = lag.indices.iter().copied().filter(|&j| j != p).chain([c]).collect();
        lag = lagrangian(sym, &idx, spec)?;
    }
    Err(Error::Invalid("surgery did not terminate".into()))
}

/// `(P_mid, M_metabolic)` together with the basis indices of `P_mid`.
#[derive(Clone, Debug)]
pub struct QuadraticSplit {
    pub middle: SymmetricComplex,
    pub middle_indices: Vec<usize>,
    pub metabolic: SymmetricComplex,
    pub report: Report,
}

/// Split off the self-paired middle-degree part: basis elements of degree
/// `−d/2` with zero differential that the form pairs only with themselves.
pub fn split_off_quadratic(sym: &SymmetricComplex, spec: &SliceSpec) -> Result<QuadraticSplit> {
    let d = sym.ctx.d;
    let m = &sym.module;
    let n = m.rank();
    let mid: Vec<usize> = if d % 2 != 0 {
        Vec::new()
    } else {
        (0..n)
            .filter(|&i| {
                m.basis()[i].degree == -d / 2
                    && (0..n).all(|j| m.entry(i, j).is_zero() && m.entry(j, i).is_zero())
                    && (0..n).all(|j| j == i || (sym.phi.matrix[i][j].is_zero() && sym.phi.matrix[j][i].is_zero()))
                    && !sym.phi.matrix[i][i].is_zero()
            })
            .collect()
    };
    let rest = complement(n, &mid);
    let middle = sym.restrict(&mid)?;
    let metabolic = sym.restrict(&rest)?;
    let mut report = Report::new();
    report.extend("middle: ", middle.check(spec)?);
    report.extend("metabolic: ", metabolic.check(spec)?);
    if let Some(amp) = middle.module.tor_amplitude()? {
        report.push("middle amplitude", amp == (-d / 2, -d / 2), format!("{amp:?}"));
    }
    if d % 4 != 2 && !mid.is_empty() {
        report.fail("middle parity", "a middle block can only be symmetric when d = 2 mod 4");
    }
    Ok(QuadraticSplit { middle, middle_indices: mid, metabolic, report })
}

/// `ω̄^std: L_Ā† → L_Ā` on a shifted cotangent bundle with the Lagrangian
/// `L_B ⊗ Ā` (the `dz_i` of the base generators).
pub fn standard_symmetric(t: &crate::shifted::ShiftedCotangent) -> Result<(SymmetricComplex, Vec<usize>)> {
    let phi = crate::shifted::form_map(&t.derham, &t.omega, t.ctx.d)?;
    let module = phi.target.clone();
    Ok((SymmetricComplex::new(module, phi, t.ctx)?, (0..t.base.len()).collect()))
}

/// A rank-one form `φ(b†) = c·b` on `A·b`, `|b| = −d/2`.
pub fn rank_one(base: &crate::gca::SemifreeCdga, name: &str, c: Q, ctx: DualityContext) -> Result<SymmetricComplex> {
    if ctx.d % 2 != 0 {
        return Err(Error::Precondition("a middle degree needs even d".into()));
    }
    let module = DgModule::free(base, name, -ctx.d / 2);
    let phi = DgMap::new(&module.dagger(ctx.d), &module, vec![vec![Poly::constant(base.ring(), c)]], 0)?;
    SymmetricComplex::new(module, phi, ctx)
}

/// Parse a witness file against the symmetric complex `sym` on `L_A`:
///
/// ```text
/// witness {
///   stabilizer module over A { basis p : 0; }
///   lagrangian d(x), d(z);
/// }
/// ```
///
/// The stabiliser is optional; with one, `P†` is added to the Lagrangian.
/// Lagrangian entries name basis elements of `sym`, either as `d(g)` or as
/// the bare generator `g`.
pub fn parse_witness(text: &str, sym: &SymmetricComplex) -> Result<WittWitness> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text);
    p.expect_kw("witness")?;
    p.expect_sym('{')?;
    let mut stabilizer = None;
    let mut names = Vec::new();
    while !p.eat_sym('}') {
        if p.at_end() {
            return Err(p.err("missing `}`"));
        }
        if p.is_kw("stabilizer") {
            p.bump();
            stabilizer = Some(module_body(&mut p, text, sym.module.base())?);
        } else if p.is_kw("lagrangian") {
            p.bump();
            loop {
                let (line, col) = p.loc();
                let mut name = p.ident()?;
                if name == "d" && p.eat_sym('(') {
                    name = format!("d({})", p.ident()?);
                    p.expect_sym(')')?;
                }
                let found = sym.module.basis().iter().position(|b| b.name == name || b.name == format!("d({name})"));
                names.push(found.ok_or_else(|| Error::parse(line, col, format!("unknown basis element {name}")))?);
                if !p.eat_sym(',') {
                    break;
                }
            }
            p.expect_sym(';')?;
        } else {
            return Err(p.err("expected `stabilizer` or `lagrangian`"));
        }
    }
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(match stabilizer {
        None => WittWitness::Lagrangian(names),
        Some(m) => {
            let k = m.rank();
            let lagrangian = (k..2 * k).chain(names.into_iter().map(|i| i + 2 * k)).collect();
            WittWitness::Stabilized { p: m, lagrangian }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::dgmod::calibrate;
    use num::One;

    fn spec() -> SliceSpec {
        SliceSpec::new((-4, 1), 4).with_max_weight(6)
    }

    #[test]
    fn hyperbolic_forms_are_symmetric_and_metabolic() {
        let b = corpus::base("line");
        let mut r = corpus::rng(11);
        for d in 1..=4 {
            let ctx = calibrate(d).unwrap();
            for _ in 0..4 {
                let n = corpus::random_module(&mut r, &b, &[-2, -1, -1, 0]).unwrap();
                let h = hyperbolic(&n, ctx).unwrap();
                assert!(h.check(&spec()).unwrap().passed(), "d = {d}");
                let lag = lagrangian(&h, &[0, 1, 2, 3], &spec()).unwrap();
                assert!(lag.report.passed());
            }
        }
    }

    #[test]
    fn zero_form_is_not_a_quis() {
        let b = corpus::base("line");
        let ctx = calibrate(1).unwrap();
        let m = DgModule::free(&b, "e", 0);
        let phi = DgMap::zero(&m.dagger(1), &m);
        let r = check_symmetric(&m, &phi, ctx, &spec()).unwrap();
        assert!(!r.get("quasi-isomorphism").unwrap().pass);
    }

    #[test]
    fn rank_one_middle_form() {
        let b = corpus::base("point");
        let two = calibrate(2).unwrap();
        assert!(rank_one(&b, "u", Q::one(), two).unwrap().check(&spec()).unwrap().passed());
        let four = calibrate(4).unwrap();
        let r = rank_one(&b, "u", Q::one(), four).unwrap().check(&spec()).unwrap();
        assert!(!r.get("symmetric").unwrap().pass);
    }

    #[test]
    fn hyperbolic_surgery_keeps_n() {
        let b = corpus::base("point");
        let ctx = calibrate(2).unwrap();
        let n = DgModule::free(&b, "e", -1).shift(0);
        let h = hyperbolic(&n, ctx).unwrap();
        let s = surgery_to_lagrangian(&h, &WittWitness::Lagrangian(vec![0]), &spec()).unwrap();
        assert!(s.connectivity.passed());
        assert_eq!(s.lagrangian.names(), vec!["e"]);
        assert!(s.steps.is_empty());
    }

    #[test]
    fn standard_lagrangian_surgery_count() {
        for d in 1..=4 {
            let ctx = calibrate(d).unwrap();
            for name in ["line", "double-point", "deep-free"] {
                let Ok(t) = crate::shifted::shifted_cotangent(&corpus::base(name), ctx) else { continue };
                let (sym, idx) = standard_symmetric(&t).unwrap();
                assert!(sym.check(&spec()).unwrap().passed(), "{name}, d = {d}");
                let s = surgery_to_lagrangian(&sym, &WittWitness::Lagrangian(idx), &spec()).unwrap();
                assert!(s.connectivity.passed(), "{name}, d = {d}");
                // one exchange per base generator whose dual sits at or above the bound
                let expect = t.base.gens().iter().filter(|g| -d - g.degree >= connectivity_bound(d)).count();
                assert_eq!(s.steps.len(), expect, "{name}, d = {d}: {:?}", s.steps);
            }
        }
    }

    #[test]
    fn middle_block_splits_off() {
        let b = corpus::base("point");
        let ctx = calibrate(2).unwrap();
        let q = rank_one(&b, "u", Q::one(), ctx).unwrap();
        let h = hyperbolic(&DgModule::free(&b, "e", 0), ctx).unwrap();
        let split = split_off_quadratic(&q.sum(&h).unwrap(), &spec()).unwrap();
        assert_eq!(split.middle_indices, vec![0]);
        assert_eq!(split.metabolic.rank(), 2);
        assert!(split.report.passed(), "{:?}", split.report);
        let odd = split_off_quadratic(&hyperbolic(&DgModule::free(&b, "e", 0), calibrate(1).unwrap()).unwrap(), &spec()).unwrap();
        assert!(odd.middle_indices.is_empty());
    }
}
