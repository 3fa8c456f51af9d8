//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use dgsymp::cohom::SliceSpec;
use dgsymp::corpus::{self, rng, BASES, TWISTS};
use dgsymp::cotangent::check_connectivity;
use dgsymp::derham::{commutator_on, intertwining_defect, DeRham};
use dgsymp::dgmod::{calibrate, DualityContext};
use dgsymp::gca::{parse_poly, parse_presentation, Derivation, Poly};
use dgsymp::shifted::{shifted_cotangent, twisted_standard_form, verify_symplectic, TwistedStandard};
use dgsymp::darboux::{darboux_pipeline, DarbouxConfig};
use dgsymp::derham::DeRhamElement;
use dgsymp::witt::{hyperbolic, standard_symmetric, surgery_to_lagrangian, WittWitness};
use dgsymp::Q;
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ctx(d: i32) -> DualityContext {
    calibrate(d).expect("calibration")
}

fn twists() -> Vec<TwistedStandard> {
    TWISTS
        .iter()
        .map(|(b, d, f)| {
            let base = corpus::base(b);
            let f = parse_poly(base.ring(), f).expect("fixture potential");
            twisted_standard_form(&base, ctx(*d), &f).expect("fixture twist")
        })
        .collect()
}

/// `w ↦ (weight of w) · w` for the fibre-count weight, computed termwise.
fn weight_multiply(dr: &DeRham, fibre: &[bool], w: &Poly) -> Poly {
    let n = dr.n();
    let mut out = Poly::zero(dr.ring());
    for (m, c) in w.terms() {
        let wt: i64 = m.0.iter().filter(|(g, _)| fibre[*g as usize % n]).map(|&(_, e)| e as i64).sum();
        out.add_term(m.clone(), c * Q::from_integer(wt.into()));
    }
    out
}

/// Graded commutator `[a, b] w` for two operators given as closures of known degree.
fn bracket(a: (i32, &dyn Fn(&Poly) -> Poly), b: (i32, &dyn Fn(&Poly) -> Poly), w: &Poly) -> Poly {
    let ab = a.1(&b.1(w));
    let ba = b.1(&a.1(w));
    if (a.0 * b.0).rem_euclid(2) == 1 {
        &ab + &ba
    } else {
        &ab - &ba
    }
}

fn operator_suite() -> Outcome {
    let mut r = rng(101);
    let mut checked = 0;
    let algebras = twists();
    for t in &algebras {
        let dr = t.derham();
        let fibre = t.cotangent.is_fibre();
        let iota_e = dr.iota(&t.cotangent.euler);
        let iota_xi = dr.iota(&t.xi);
        let dbar: &Derivation = t.graded.internal_d();
        let d_a = dr.internal_d();
        let d = dr.de_rham_d();
        let lie_e = |w: &Poly| weight_multiply(dr, &fibre, w);
        let lie_xi = |w: &Poly| &d_a.apply(w) - &dbar.apply(w);
        let d_op = |w: &Poly| d.apply(w);
        let ie = |w: &Poly| iota_e.apply(w);
        let ix = |w: &Poly| iota_xi.apply(w);
        let db = |w: &Poly| dbar.apply(w);
        for _ in 0..30 {
            let terms = r.gen_range(1..6);
            let w = corpus::random_element(&mut r, dr.ring(), 3, terms);
            let rels: [(&str, Poly, Poly); 6] = [
                ("[d, iota_E] = Lie_E", bracket((1, &d_op), (-1, &ie), &w), lie_e(&w)),
                ("[iota_E, Lie_xi] = -iota_xi", bracket((-1, &ie), (1, &lie_xi), &w), -ix(&w)),
                ("[Lie_E, Lie_xi] = -Lie_xi", bracket((0, &lie_e), (1, &lie_xi), &w), -lie_xi(&w)),
                ("[iota_E, iota_xi] = 0", bracket((-1, &ie), (0, &ix), &w), Poly::zero(dr.ring())),
                ("[Dbar, iota_E] = 0", bracket((1, &db), (-1, &ie), &w), Poly::zero(dr.ring())),
                ("[Dbar, d] = 0", bracket((1, &db), (1, &d_op), &w), Poly::zero(dr.ring())),
            ];
            for (name, lhs, rhs) in rels {
                if lhs != rhs {
                    return ok(false, format!("{name} fails on {} over f = {}", dr.form_text(&w), t.f));
                }
            }
            // the library's own commutator agrees with the hand-rolled bracket
            if commutator_on(d, &iota_e, &w) != lie_e(&w) {
                return ok(false, "Derivation::commutator disagrees with [d, iota_E]");
            }
            checked += 1;
        }
    }
    ok(checked >= 200 && algebras.len() >= 5, format!("{checked} elements over {} algebras", algebras.len()))
}

fn intertwining() -> Outcome {
    let mut r = rng(202);
    let algebras = twists();
    for t in &algebras {
        let dr = t.derham();
        for _ in 0..50 {
            let terms = r.gen_range(1..6);
            let w = corpus::random_element(&mut r, dr.ring(), 3, terms);
            let defect = intertwining_defect(dr, &t.xi, &w);
            if !defect.is_zero() {
                return ok(false, format!("defect {} on {}", dr.form_text(&defect), dr.form_text(&w)));
            }
            // (d + D_A − Lie_ξ) coincides with d + D̄ on the same generators
            let e = dr.exp_iota(&t.xi, &w);
            let lhs = &t.graded.d(&e) + &t.graded.big_d(&e);
            let rhs = dr.exp_iota(&t.xi, &dr.total(&w));
            if lhs.to_string() != rhs.to_string() {
                return ok(false, format!("(d + Dbar) e^xi differs on {}", dr.form_text(&w)));
            }
        }
    }
    ok(true, format!("50 elements on each of {} twists", algebras.len()))
}

/// Weight vectors `[Euler weight, internal weight]` on `T*[d]B`.
fn cotangent_weights(base_weights: &[i64], fibre_of: &[usize]) -> Vec<Vec<i64>> {
    let n = base_weights.len();
    let c = base_weights.iter().copied().max().unwrap_or(0) + 1;
    let mut out = vec![Vec::new(); 2 * n];
    for i in 0..n {
        out[i] = vec![0, base_weights[i]];
        out[fibre_of[i]] = vec![1, c - base_weights[i]];
    }
    out
}

fn graded_pieces() -> Outcome {
    let mut cases = 0;
    let mut nonzero = 0;
    let mut inexact = 0;
    for (name, _) in BASES.iter().filter(|(n, _)| *n != "point") {
        let b = corpus::base(name);
        let bw: Vec<i64> = b.gens().iter().map(|g| g.weight.unwrap_or(1)).collect();
        for d in 1..=3 {
            let Ok(t) = shifted_cotangent(&b, ctx(d)) else { continue };
            let weights = cotangent_weights(&bw, &t.fibre_of);
            for lambda in 1..=3 {
                for p in 1..=2u32 {
                    for i in [p as i32, p as i32 + 1] {
                        let spec = SliceSpec::new((i, i), 6).with_max_weight(6);
                        let c = t.derham.graded_piece_model(&weights, p, i, lambda, &spec, 6).expect("model");
                        cases += 1;
                        if !c.exact {
                            inexact += 1;
                        }
                        if c.direct != 0 {
                            nonzero += 1;
                        }
                        if !c.agree() {
                            return ok(false, format!("{name}, d = {d}, lambda = {lambda}, p = {p}, i = {i}: {} vs {}", c.direct, c.model));
                        }
                    }
                }
            }
        }
    }
    ok(cases > 0, format!("{cases} cases ({nonzero} nonzero, {inexact} inexact slices)"))
}

fn connectivity() -> Outcome {
    let mut r = rng(404);
    let mut instances = 0;
    let mut held = 0;
    let spec = SliceSpec::new((-4, 0), 5).with_max_weight(5);
    while instances < 30 {
        let cells = r.gen_range(2..=4);
        let a = corpus::random_presentation(&mut r, cells, -3).expect("random presentation");
        let k = r.gen_range(1..cells);
        let b = a.prefix(k).expect("prefix");
        let d = r.gen_range(1..=3);
        let rep = check_connectivity(&b, &a, d, &spec).expect("connectivity");
        instances += 1;
        if rep.condition_i {
            held += 1;
        }
        if !rep.agree || !rep.moreover_holds() {
            return ok(false, format!("B = {b}, A = {a}, d = {d}: {:?}", rep.report));
        }
    }
    ok(true, format!("{instances} inclusions, conditions hold on {held}"))
}

fn standard_forms() -> Outcome {
    let spec = SliceSpec::new((-5, 1), 4).with_max_weight(6);
    let mut count = 0;
    let mut approximate = 0;
    let mut run = |dr: &DeRham, omega: &Poly, d: i32, label: String| -> Option<Outcome> {
        let rep = verify_symplectic(dr, &DeRhamElement::new(omega.clone(), 2, 3), ctx(d), &spec).expect("verify");
        count += 1;
        approximate += usize::from(rep.approximate);
        (!rep.passed()).then(|| ok(false, format!("{label}: {:?}", rep.failures().collect::<Vec<_>>())))
    };
    for (name, _) in BASES {
        let b = corpus::base(name);
        for d in 1..=4 {
            let Ok(t) = shifted_cotangent(&b, ctx(d)) else { continue };
            if let Some(o) = run(&t.derham, &t.omega, d, format!("T*[{d}] {name}")) {
                return o;
            }
        }
    }
    for t in twists() {
        let d = t.cotangent.ctx.d;
        if let Some(o) = run(t.derham(), t.omega(), d, format!("twist {} over {}", t.f, t.cotangent.base)) {
            return o;
        }
    }
    ok(true, format!("{count} forms ({approximate} by fibre check)"))
}

fn surgery() -> Outcome {
    let spec = SliceSpec::new((-5, 1), 4).with_max_weight(6);
    let mut fixtures = Vec::new();
    for (name, _) in BASES {
        for d in 1..=4 {
            if let Ok(t) = shifted_cotangent(&corpus::base(name), ctx(d)) {
                let (sym, idx) = standard_symmetric(&t).expect("standard form");
                fixtures.push((format!("T*[{d}] {name}"), sym, WittWitness::Lagrangian(idx)));
            }
        }
    }
    for t in twists() {
        let (sym, idx) = standard_symmetric(&t.cotangent).expect("twisted form");
        fixtures.push((format!("twist {}", t.f), sym, WittWitness::Lagrangian(idx)));
    }
    // stabilised witnesses: H(P) ⊕ H(N) with Lagrangian P† ⊕ N
    let b = corpus::base("line");
    let mut r = rng(707);
    for d in 1..=4 {
        let n = corpus::random_module(&mut r, &b, &[-2, -1, 0]).expect("module");
        let p = corpus::random_module(&mut r, &b, &[-1, 0]).expect("module");
        let sym = hyperbolic(&n, ctx(d)).expect("hyperbolic");
        let lag = vec![2, 3, 4, 5, 6];
        fixtures.push((format!("stabilised d = {d}"), sym, WittWitness::Stabilized { p, lagrangian: lag }));
    }
    let mut swaps = 0;
    for (label, sym, witness) in &fixtures {
        let s = match surgery_to_lagrangian(sym, witness, &spec) {
            Ok(s) => s,
            Err(e) => return ok(false, format!("{label}: {e}")),
        };
        swaps += s.steps.len();
        if !s.connectivity.passed() {
            return ok(false, format!("{label}: {:?}", s.connectivity));
        }
    }
    ok(true, format!("{} fixtures, {swaps} surgery exchanges", fixtures.len()))
}

fn tor_duality() -> Outcome {
    let mut r = rng(808);
    let bases = [corpus::base("line"), corpus::base("plane"), corpus::base("double-point")];
    let mut count = 0;
    while count < 30 {
        let b = &bases[count % bases.len()];
        let top: i32 = r.gen_range(-1..=1);
        let terms = r.gen_range(2..=3);
        let mut degrees = Vec::new();
        for k in 0..terms {
            for _ in 0..r.gen_range(1..=2) {
                degrees.push(top - k);
            }
        }
        degrees.sort();
        let m = corpus::random_module(&mut r, b, &degrees).expect("random module");
        let amp = m.tor_amplitude().expect("amplitude");
        let oracle = m.tor_amplitude_oracle().expect("oracle");
        let dual = m.dual().tor_amplitude().expect("dual amplitude");
        let flipped = amp.map(|(a, b)| (-b, -a));
        if amp != oracle || dual != flipped {
            return ok(false, format!("degrees {degrees:?}: {amp:?}, oracle {oracle:?}, dual {dual:?}"));
        }
        count += 1;
    }
    ok(true, format!("{count} complexes"))
}

fn random_base(r: &mut rand_chacha::ChaCha8Rng, d: i32) -> dgsymp::gca::SemifreeCdga {
    let n = r.gen_range(if d == 1 { 1 } else { 2 }..=3);
    let mut text = String::from("field Q; gen x0 : 0;");
    let mut zeros = vec!["x0".to_string()];
    for k in 1..n {
        // for d > 1 the second generator can carry a potential of degree 1 − d
        let deg = if k == 1 && d > 1 { 1 - d } else { r.gen_range(-(d - 1).min(2)..=0) };
        if deg == 0 {
            text += &format!(" gen x{k} : 0;");
            zeros.push(format!("x{k}"));
        } else {
            text += &format!(" gen z{k} : {deg};");
            if deg == -1 && r.gen_bool(0.5) {
                let a = zeros.choose(r).expect("degree-zero generator");
                let b = zeros.choose(r).expect("degree-zero generator");
                text += &format!(" D z{k} = {a}*{b};");
            }
        }
    }
    parse_presentation(&text).expect("random base")
}

fn random_potential(r: &mut rand_chacha::ChaCha8Rng, b: &dgsymp::gca::SemifreeCdga, d: i32) -> Poly {
    for _ in 0..20 {
        let terms = r.gen_range(1..=3);
        // the origin must be a critical point: no constant or linear terms
        let f = corpus::random_poly(r, b.ring(), 1 - d, 4, terms).filter_terms(|m| m.polydeg() >= 2);
        if !f.is_zero() && b.apply_differential(&f).is_zero() {
            return f;
        }
    }
    Poly::zero(b.ring())
}

/// Planted `(A_f, c·ω^std_f)`; the pipeline must return `c·f`, or after surgery
/// `c·(f|_{z=0} + Σ ±(Dz)·y_z)` over the base where each `z` traded places with `y_z`.
fn darboux_roundtrip() -> Outcome {
    let cfg = DarbouxConfig { spec: SliceSpec::new((-5, 1), 4).with_max_weight(6), cap: 6, max_wedge: 3 };
    let mut r = rng(606);
    let (mut plain, mut exchanged) = (0, 0);
    for k in 0..40 {
        let d = 1 + (k % 4);
        let b = random_base(&mut r, d);
        let f = random_potential(&mut r, &b, d);
        let t = twisted_standard_form(&b, ctx(d), &f).expect("planted model");
        let c = Q::new(r.gen_range(1i64..=3).into(), r.gen_range(1i64..=2).into());
        let a = t.algebra();
        let omega = DeRhamElement::new(t.omega().scale(&c), 2, 3);
        let (_, idx) = standard_symmetric(&t.cotangent).expect("standard form");
        let label = format!("d = {d}, B = {}, f = {f}, c = {c}", b.to_string().replace('\n', " "));
        let res = match darboux_pipeline(a, &omega, ctx(d), &WittWitness::Lagrangian(idx), &cfg) {
            Ok(res) => res,
            Err(e) => return ok(false, format!("{label}: {e}")),
        };
        if !res.report.passed() {
            return ok(false, format!("{label}: {:?}", res.report.failures().collect::<Vec<_>>()));
        }
        let got = res.f.rename_into(a.ring()).expect("base names");
        let planted = f.embed(a.ring()).expect("embed").scale(&c);
        if res.surgery.is_empty() {
            if !(&got - &planted).filter_terms(|m| !m.is_one()).is_zero() {
                return ok(false, format!("{label}: recovered {}", res.f));
            }
            plain += 1;
            continue;
        }
        let swapped: Vec<usize> = res
            .surgery
            .iter()
            .map(|s| b.gens().iter().position(|g| format!("d({})", g.name) == s.removed).expect("base generator removed"))
            .collect();
        // f has degree 1 − d while exchanged generators have degree at most
        // −d − bound, so f is at most linear in them and its linear part becomes
        // the differential of their partners
        let images: Vec<Poly> = (0..a.len())
            .map(|g| if swapped.contains(&g) { Poly::zero(a.ring()) } else { Poly::var(a.ring(), g) })
            .collect();
        let planted = planted.substitute(&images, a.ring());
        let pieces: Vec<Poly> = swapped
            .iter()
            .map(|&i| {
                let dz = b.diff_of(i).embed(a.ring()).expect("embed");
                (&dz * &Poly::var(a.ring(), t.cotangent.fibre_of[i])).scale(&c)
            })
            .collect();
        let matches = (0..1u32 << pieces.len()).any(|signs| {
            let mut h = planted.clone();
            for (j, p) in pieces.iter().enumerate() {
                let s = if signs >> j & 1 == 1 { -Q::from_integer(1.into()) } else { Q::from_integer(1.into()) };
                h.add_scaled(p, &s);
            }
            (&got - &h).filter_terms(|m| !m.is_one()).is_zero()
        });
        if !matches {
            return ok(false, format!("{label}: recovered {} after {} exchanges", res.f, res.surgery.len()));
        }
        exchanged += 1;
    }
    ok(
        plain + exchanged >= 20,
        format!("{plain} recover c·f, {exchanged} recover the exchanged Hamiltonian"),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        ("1 operator relations", Duration::from_secs(60), operator_suite),
        ("2 exponential intertwining", Duration::from_secs(60), intertwining),
        ("3 graded pieces", Duration::from_secs(120), graded_pieces),
        ("4 connectivity equivalence", Duration::from_secs(120), connectivity),
        ("5 standard forms", Duration::from_secs(60), standard_forms),
        ("6 darboux roundtrip", Duration::from_secs(600), darboux_roundtrip),
        ("7 surgery normalization", Duration::from_secs(60), surgery),
        ("8 tor amplitude duality", Duration::from_secs(60), tor_duality),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {verdict} [{:.1}s] {}", took.as_secs_f64(), o.detail);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
