use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semired::bundles::{assemble_bundle, birkhoff, splitting_type, quadratic_polynomial_transition};
use semired::corpus::{builtin, parse_corpus, verify_entry};
use semired::json::{
    aut_to_json, bundle_report_to_json, charts_from_json, cocycle_from_json, cocycle_to_json, map_from_json,
    matrix_to_json, multiplier_to_json, obstruction_to_json, parse_map, parse_place, report_to_json, scan_to_json,
    splitting_to_json, to_text, verdict_to_json, AnyMap, JsonField,
};
use semired::moduli::{automorphisms_d2, obstruction_data, sigma_invariants};
use semired::reduction::{scan_family, semistable_model, LocalModel};
use semired::stability::{verdict, verify_certificate, StabilityVerdict, VerdictKind};
use semired::{Error, RatFunc};

#[derive(Parser)]
#[command(name = "semired", version, about = "Exact stability and semistable reduction of rational self-maps")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Stability verdict of a map, with certificate.
    Stab {
        file: String,
        /// Re-verify the certificate and fail if it does not check.
        #[arg(long)]
        strict: bool,
    },
    /// Semistable model at one place.
    Reduce {
        file: String,
        /// `inf`, `p:7`, `poly:c`, `poly:c^2-2`, ...
        #[arg(long)]
        place: String,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Reduction verdicts at every place where a family over Q(c) can degenerate.
    Scan { file: String },
    #[command(subcommand)]
    Bundle(BundleCommand),
    #[command(subcommand)]
    Inv(InvCommand),
    /// Automorphisms of a quadratic map.
    Aut { file: String },
    /// Completing the square for `γz^2 + δz + ε`; file holds `{"gamma","delta","eps"}`.
    Poly { file: String },
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Subcommand)]
enum BundleCommand {
    /// Splitting type of a cocycle.
    Split { file: String },
    /// Glue two charts and check every fiber.
    Assemble { file: String },
}

#[derive(Subcommand)]
enum InvCommand {
    /// The invariants σ1, σ2 of a quadratic morphism.
    Sigma { file: String },
    /// Totally invariant point and residual fixed-point quadratic.
    Obstruction { file: String },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Recompute every entry of the built-in corpus, or of a given file.
    Verify {
        #[arg(long)]
        file: Option<String>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::Undetermined(_) => 3,
            Error::NonTerminating { .. } => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_failure(message: String) -> Failure {
    Failure { code: 2, message }
}

fn read_json(path: &str) -> Result<Value, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| parse_failure(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| parse_failure(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| parse_failure(format!("{path}: {e}")))
}

/// Output and whether the verdict was undetermined.
type Output = (Value, bool);

fn stab_output<F>(phi: &semired::RationalMap<F>, strict: bool) -> Result<Output, Failure>
where
    F: JsonField + semired::algebra::quotient::BaseField + semired::algebra::factor::Factorable,
{
    let v: StabilityVerdict<F> = verdict(phi)?;
    if strict {
        if let Some(cert) = &v.certificate {
            if !verify_certificate(phi, cert, v.kind == VerdictKind::Unstable)? {
                return Err(Failure { code: 1, message: "certificate failed re-verification".into() });
            }
        }
    }
    Ok((verdict_to_json(&v), v.kind == VerdictKind::Undetermined))
}

fn run(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Stab { file, strict } => match parse_map(&read_json(&file)?)? {
            AnyMap::Q(phi) => stab_output(&phi, strict),
            AnyMap::Qc(phi) => stab_output(&phi, strict),
        },
        Command::Reduce { file, place, max_steps } => {
            let place = parse_place(&place)?;
            let out = match parse_map(&read_json(&file)?)? {
                AnyMap::Q(phi) => report_to_json(&semistable_model(&LocalModel::new(phi, place)?, max_steps)?),
                AnyMap::Qc(phi) => report_to_json(&semistable_model(&LocalModel::new(phi, place)?, max_steps)?),
            };
            Ok((out, false))
        }
        Command::Scan { file } => {
            let family = map_from_json::<RatFunc>(&read_json(&file)?)?;
            let scan = scan_family(&family)?;
            let undetermined = scan.places.iter().any(|p| p.semistable.is_none());
            Ok((scan_to_json(&scan), undetermined))
        }
        Command::Bundle(BundleCommand::Split { file }) => {
            let t = cocycle_from_json(&read_json(&file)?)?;
            let b = birkhoff(&t);
            let out = json!({
                "cocycle": cocycle_to_json(&t),
                "splitting_type": splitting_to_json(&splitting_type(&t)),
                "exponents": b.exponents,
                "left": matrix_to_json(&b.left),
                "right": matrix_to_json(&b.right),
                "verified": b.verify(&t),
            });
            Ok((out, false))
        }
        Command::Bundle(BundleCommand::Assemble { file }) => {
            let (u, v, t) = charts_from_json(&read_json(&file)?)?;
            Ok((bundle_report_to_json(&assemble_bundle(&u, &v, &t)?), false))
        }
        Command::Inv(InvCommand::Sigma { file }) => {
            let out = match parse_map(&read_json(&file)?)? {
                AnyMap::Q(phi) => multiplier_to_json(&sigma_invariants(&phi)?),
                AnyMap::Qc(phi) => multiplier_to_json(&sigma_invariants(&phi)?),
            };
            Ok((out, false))
        }
        Command::Inv(InvCommand::Obstruction { file }) => {
            let phi = map_from_json(&read_json(&file)?)?;
            Ok((obstruction_to_json(&obstruction_data(&phi)?), false))
        }
        Command::Aut { file } => {
            let phi = map_from_json(&read_json(&file)?)?;
            Ok((aut_to_json(&automorphisms_d2(&phi)?), false))
        }
        Command::Poly { file } => {
            let v = read_json(&file)?;
            let get = |k: &str| -> Result<RatFunc, Failure> {
                Ok(RatFunc::from_json(v.get(k).ok_or_else(|| parse_failure(format!("missing {k}")))?)?)
            };
            let (gamma, delta, eps) = (get("gamma")?, get("delta")?, get("eps")?);
            if num_is_zero(&gamma) {
                return Err(parse_failure("gamma must be nonzero".into()));
            }
            let (m, kappa) = quadratic_polynomial_transition(&gamma, &delta, &eps);
            Ok((json!({ "matrix": matrix_to_json(&m), "kappa": kappa.to_json() }), false))
        }
        Command::Corpus(CorpusCommand::Verify { file }) => {
            let entries = match file {
                Some(f) => {
                    let text = std::fs::read_to_string(&f).map_err(|e| parse_failure(format!("{f}: {e}")))?;
                    parse_corpus(&text)?
                }
                None => builtin(),
            };
            let mut results = Vec::new();
            let mut all_ok = true;
            for e in &entries {
                let r = match verify_entry(e) {
                    Ok(o) => {
                        all_ok &= o.ok;
                        json!({ "name": o.name, "ok": o.ok, "computed": o.computed, "expected": e.expected() })
                    }
                    Err(err) => {
                        all_ok = false;
                        json!({ "name": e.name, "ok": false, "error": err.to_string() })
                    }
                };
                results.push(r);
            }
            let out = json!({ "entries": results, "all_ok": all_ok });
            if !all_ok {
                print_value(&out, Format::Json);
                return Err(Failure { code: 1, message: "corpus verification failed".into() });
            }
            Ok((out, false))
        }
    }
}

fn num_is_zero(r: &RatFunc) -> bool {
    r.num().is_zero()
}

fn print_value(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Text => print!("{}", to_text(v)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((v, undetermined)) => {
            print_value(&v, cli.format);
            ExitCode::from(if undetermined { 3 } else { 0 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
