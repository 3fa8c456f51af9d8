//! `dgsymp` command line: one verb per operation, JSON report on stdout.
//!
//! Exit status is 0 when every check passes, 1 on a failed check or a
//! rejected input, 2 on usage or parse errors. Set `DGSYMP_PRETTY=1` for
//! indented JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dgsymp::cohom::{Complex, SliceSpec};
use dgsymp::cotangent::cotangent_complex;
use dgsymp::darboux::{darboux_pipeline, DarbouxConfig};
use dgsymp::derham::{DeRham, DeRhamElement};
use dgsymp::dgmod::{calibrate, parse_module, DgModule, DualityContext};
use dgsymp::error::Error;
use dgsymp::gca::{parse_poly, parse_presentation, SemifreeCdga};
use dgsymp::report::{Report, SCHEMA_VERSION};
use dgsymp::shifted::{form_map, shifted_cotangent, sym_twisted, twisted_standard_form, verify_symplectic, TwistData};
use dgsymp::witt::{parse_witness, surgery_to_lagrangian, SymmetricComplex};

#[derive(Parser)]
#[command(name = "dgsymp", version, about = "Exact computations with shifted symplectic cdgas")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Truncation of cohomology computations. All bounds are required.
#[derive(Args)]
struct Trunc {
    /// Cohomological window `I..J`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: (i32, i32),
    /// Cap on the polynomial degree of coefficients.
    #[arg(long)]
    max_polydeg: u32,
    /// Cap on the weight of slices (ignored for unweighted presentations).
    #[arg(long)]
    max_weight: i64,
}

impl Trunc {
    fn spec(&self) -> SliceSpec {
        SliceSpec::new(self.window, self.max_polydeg).with_max_weight(self.max_weight)
    }
}

#[derive(Args)]
struct FormArgs {
    /// Closed 2-form, e.g. `d(y)^d(x)`.
    #[arg(long, allow_hyphen_values = true)]
    omega: String,
    /// Shift `d` of the symplectic structure.
    #[arg(long)]
    d: i32,
    /// Highest form degree kept.
    #[arg(long)]
    max_wedge: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a presentation.
    Check { file: PathBuf },
    /// The cotangent complex `L_A`.
    Cotangent { file: PathBuf },
    /// Sliced cohomology of `A`.
    Cohomology {
        file: PathBuf,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Apply `d`, `D` and `d + D` to a form.
    Derham {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        max_wedge: u32,
    },
    /// `T*[d]` of a base with its Liouville and symplectic forms.
    ShiftedCotangent {
        file: PathBuf,
        #[arg(long)]
        d: i32,
        /// Twist by `df` for this potential.
        #[arg(long, allow_hyphen_values = true)]
        twist_potential: Option<String>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// `Sym^ξ_B M` for a module file and the values of `ξ` on its basis.
    Twist {
        file: PathBuf,
        #[arg(long)]
        module: PathBuf,
        /// Value of `ξ` on each basis element, in order.
        #[arg(long, allow_hyphen_values = true)]
        xi: Vec<String>,
    },
    /// Closedness, nondegeneracy and symmetry of a 2-form.
    VerifySymplectic {
        file: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Normalise a Lagrangian witness to the connectivity bound.
    Surgery {
        file: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        witness: PathBuf,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Tor amplitude of a module over the presentation.
    TorAmplitude {
        file: PathBuf,
        #[arg(long)]
        module: PathBuf,
    },
    /// Darboux normal form of a shifted symplectic cdga.
    Darboux {
        file: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        witness: PathBuf,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Adjoin an inverse: `A[t, ξ | Dξ = t f − 1]`.
    Localize {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once("..").ok_or("expected I..J")?;
    let a: i32 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: i32 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty window {a}..{b}"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownGenerator(_) | Error::DuplicateGenerator(_) => Failure::Usage(e.to_string()),
            _ => Failure::Rejected(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn presentation(path: &Path) -> Result<SemifreeCdga, Failure> {
    Ok(parse_presentation(&read(path)?)?)
}

fn context(d: i32) -> Result<DualityContext, Failure> {
    if d < 1 {
        return Err(Failure::Usage(format!("--d must be positive, got {d}")));
    }
    Ok(calibrate(d)?)
}

fn module_json(m: &DgModule) -> Value {
    let basis: Vec<Value> = m.basis().iter().map(|b| json!({ "name": b.name, "degree": b.degree })).collect();
    let diff: Vec<Value> = (0..m.rank())
        .map(|i| Value::from((0..m.rank()).map(|j| m.entry(i, j).to_string()).collect::<Vec<_>>()))
        .collect();
    json!({ "basis": basis, "differential": diff })
}

fn form_element(dr: &DeRham, f: &FormArgs) -> Result<DeRhamElement, Failure> {
    Ok(DeRhamElement::new(dr.parse_form(&f.omega)?, 2, f.max_wedge))
}

fn symmetric(dr: &DeRham, omega: &DeRhamElement, ctx: DualityContext) -> Result<SymmetricComplex, Failure> {
    let phi = form_map(dr, &dr.component(&omega.form, 2), ctx.d)?;
    Ok(SymmetricComplex::new(phi.target.clone(), phi, ctx)?)
}

/// The payload and whether every check passed.
fn run(cmd: &Command) -> Result<(&'static str, bool, Value), Failure> {
    Ok(match cmd {
        Command::Check { file } => {
            let a = presentation(file)?;
            let r = a.check_presentation();
            ("check", r.passed(), json!({ "presentation": a.to_text(), "report": r }))
        }
        Command::Cotangent { file } => {
            let a = presentation(file)?;
            let l = cotangent_complex(&a)?;
            ("cotangent", true, json!({ "module": module_json(&l.module) }))
        }
        Command::Cohomology { file, trunc } => {
            let a = presentation(file)?;
            let h = Complex::of_cdga(&a).with_cdga_weights(&a).cohomology(&trunc.spec());
            ("cohomology", true, json!({ "cohomology": h, "dims": h.dims() }))
        }
        Command::Derham { file, form, max_wedge } => {
            let a = presentation(file)?;
            let dr = DeRham::new(&a)?;
            let w = dr.parse_form(form)?;
            let keep = |p: dgsymp::gca::Poly| dr.form_text(&p.filter_terms(|m| dr.form_degree(m) <= *max_wedge));
            let total = dr.total(&w);
            let closed = total.filter_terms(|m| dr.form_degree(m) <= *max_wedge).is_zero();
            let value = json!({
                "form": dr.form_text(&w),
                "d": keep(dr.d(&w)),
                "D": keep(dr.big_d(&w)),
                "total": keep(total),
                "closed": closed,
            });
            ("derham", true, value)
        }
        Command::ShiftedCotangent { file, d, twist_potential, trunc } => {
            let b = presentation(file)?;
            let ctx = context(*d)?;
            let (algebra, dr, liouville, omega) = match twist_potential {
                Some(text) => {
                    let f = parse_poly(b.ring(), text)?;
                    let t = twisted_standard_form(&b, ctx, &f)?;
                    let lv = t.derham().form_text(&t.cotangent.liouville);
                    (t.algebra().clone(), t.derham().clone(), lv, t.omega().clone())
                }
                None => {
                    let t = shifted_cotangent(&b, ctx)?;
                    let lv = t.derham.form_text(&t.liouville);
                    (t.algebra, t.derham, lv, t.omega)
                }
            };
            let r = verify_symplectic(&dr, &DeRhamElement::new(omega.clone(), 2, 3), ctx, &trunc.spec())?;
            let value = json!({
                "presentation": algebra.to_text(),
                "liouville": liouville,
                "omega": dr.form_text(&omega),
                "report": r,
            });
            ("shifted-cotangent", r.passed(), value)
        }
        Command::Twist { file, module, xi } => {
            let b = presentation(file)?;
            let m = parse_module(&read(module)?, &b)?;
            if xi.len() != m.rank() {
                return Err(Failure::Usage(format!("{} values of --xi for a module of rank {}", xi.len(), m.rank())));
            }
            let values = xi.iter().map(|t| parse_poly(b.ring(), t)).collect::<Result<Vec<_>, _>>()?;
            let t = TwistData::new(m, values)?;
            let a = sym_twisted(&t)?;
            let r = a.check_presentation();
            ("twist", r.passed(), json!({ "presentation": a.to_text(), "report": r }))
        }
        Command::VerifySymplectic { file, form, trunc } => {
            let a = presentation(file)?;
            let dr = DeRham::new(&a)?;
            let w = form_element(&dr, form)?;
            let r = verify_symplectic(&dr, &w, context(form.d)?, &trunc.spec())?;
            ("verify-symplectic", r.passed(), json!({ "omega": dr.form_text(&w.form), "report": r }))
        }
        Command::Surgery { file, form, witness, trunc } => {
            let a = presentation(file)?;
            let dr = DeRham::new(&a)?;
            let w = form_element(&dr, form)?;
            let sym = symmetric(&dr, &w, context(form.d)?)?;
            let wit = parse_witness(&read(witness)?, &sym)?;
            let s = surgery_to_lagrangian(&sym, &wit, &trunc.spec())?;
            let value = json!({
                "lagrangian": s.lagrangian.names(),
                "steps": s.steps,
                "report": s.connectivity,
            });
            ("surgery", s.connectivity.passed(), value)
        }
        Command::TorAmplitude { file, module } => {
            let b = presentation(file)?;
            let m = parse_module(&read(module)?, &b)?;
            let amp = m.tor_amplitude()?;
            ("tor-amplitude", true, json!({ "module": module_json(&m), "amplitude": amp }))
        }
        Command::Darboux { file, form, witness, trunc } => {
            let a = presentation(file)?;
            let dr = DeRham::new(&a)?;
            let w = form_element(&dr, form)?;
            let ctx = context(form.d)?;
            let sym = symmetric(&dr, &w, ctx)?;
            let wit = parse_witness(&read(witness)?, &sym)?;
            let cfg = DarbouxConfig { spec: trunc.spec(), cap: trunc.max_polydeg, max_wedge: form.max_wedge };
            let r = darboux_pipeline(&a, &w, ctx, &wit, &cfg)?;
            let value = r.to_json();
            ("darboux", r.report.passed(), value)
        }
        Command::Localize { file, at } => {
            let a = presentation(file)?;
            let f = parse_poly(a.ring(), at)?;
            let l = a.localize(&f)?;
            let r: Report = l.check_presentation();
            ("localize", r.passed(), json!({ "presentation": l.to_text(), "report": r }))
        }
    })
}

fn emit(out: &Option<PathBuf>, value: &Value) -> Result<(), String> {
    let pretty = std::env::var("DGSYMP_PRETTY").is_ok_and(|v| !v.is_empty() && v != "0");
    let mut text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }.map_err(|e| e.to_string())?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli.command) {
        Ok((verb, pass, payload)) => {
            let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": verb, "pass": pass });
            v.as_object_mut().expect("object").extend(payload.as_object().expect("object").clone());
            (v, if pass { 0 } else { 1 })
        }
        Err(Failure::Rejected(msg)) => (json!({ "schema_version": SCHEMA_VERSION, "pass": false, "error": msg }), 1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli.output, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
