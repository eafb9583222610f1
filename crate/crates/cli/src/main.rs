use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use healie::checks::{parse_suite, run_suites, CheckOptions};
use healie::config::{AlgebraConfig, LoadedConfig};
use healie::expr::{caret, parse_degree, parse_element, parse_scalar};
use healie::lattice::Degree;
use healie::linalg::IntMatrix;
use healie::repr::{JetGenerator, JetModule, JetVector, RankOneConvention, SpModule};
use healie::serial::{element_to_json, root_to_json, scalars_to_json, weight_from_json, weight_to_json};
use healie::structure::{reflect, root_of};
use healie::tau::{Fault, TauAlgebra, TauElement};
use healie::{Error, Result};

#[derive(Parser)]
#[command(
    name = "healie",
    version,
    about = "Exact computations in toroidal extended affine Lie algebras"
)]
struct Cli {
    /// Configuration file or preset name (sl2_untwisted, sl2_twisted, sl3_twisted).
    #[arg(short, long, global = true)]
    config: Option<String>,

    /// Line-delimited JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket of two elements.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Canonical form of an element.
    Canon {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run verification suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Samples per suite (defaults per suite).
        #[arg(short = 'n', long)]
        samples: Option<usize>,
        #[arg(long, env = "HEALIE_SEED", default_value_t = 0)]
        seed: u64,
        /// Skip structure-table validation when loading.
        #[arg(long)]
        unchecked: bool,
        #[arg(long, value_enum, default_value_t = FaultArg::None)]
        fault: FaultArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::ColumnRow)]
        convention: ConventionArg,
    },
    /// Eigenspace and central dimensions at the given degrees.
    Dims {
        #[arg(required = true, allow_hyphen_values = true)]
        degrees: Vec<String>,
    },
    /// Reflect a weight in the root of a homogeneous element.
    Reflect {
        /// Element whose root is reflected in, e.g. "e(1,0)".
        #[arg(allow_hyphen_values = true)]
        root: String,
        /// Weight as JSON: {"h": [...], "K": [...], "d": [...]}.
        weight: String,
    },
    /// Move an element along an integer change of variables.
    Twist {
        /// Rows separated by ';', e.g. "1,1;0,1".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Act by a generator of the jet module on w (x) t^k.
    Act {
        #[arg(long, value_enum, default_value_t = ModuleArg::Natural)]
        module: ModuleArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// h[r], t[r] or D[u].
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
        /// Degree k of the vector.
        #[arg(long, allow_hyphen_values = true)]
        degree: String,
        /// Component w (defaults to the first basis vector).
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    None,
    DropCocycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    ColumnRow,
    RowColumn,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleArg {
    Trivial,
    Natural,
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Usage(String),
}

impl Failure {
    fn parse(src: &str, e: Error) -> Failure {
        match e {
            Error::Parse { pos, msg } => Failure::Usage(format!("parse error: {msg}\n{}", caret(src, pos))),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(_) | Error::NonAdaptedBasis(_) => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl std::fmt::Display, value: Value) {
        if self.json {
            println!("{value}");
        } else {
            println!("{text}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli, unchecked: bool) -> CliResult<LoadedConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("a configuration is required (-c CONFIG)".into()))?;
    let cfg = AlgebraConfig::load(path)?;
    let loaded = if unchecked { cfg.build_unchecked() } else { cfg.build() };
    loaded.map_err(|e| match e {
        Error::Validation(_) | Error::NonAdaptedBasis(_) => Failure::Check(format!("FAIL load-time validation: {e}")),
        other => Failure::Usage(other.to_string()),
    })
}

fn element(src: &str, cfg: &LoadedConfig) -> CliResult<TauElement> {
    if let Some(x) = cfg.elements.get(src) {
        return Ok(x.clone());
    }
    parse_element(src, &cfg.algebra).map_err(|e| Failure::parse(src, e))
}

fn degree(src: &str) -> CliResult<Degree> {
    parse_degree(src).map_err(|e| Failure::parse(src, e))
}

fn emit_element(out: &Out, alg: &TauAlgebra, x: &TauElement) {
    out.emit(alg.pretty(x), element_to_json(alg, x));
}

fn run(cli: Cli) -> CliResult<()> {
    let out = Out { json: cli.json };
    match &cli.command {
        Command::Bracket { a, b } => {
            let cfg = load(&cli, false)?;
            let (x, y) = (element(a, &cfg)?, element(b, &cfg)?);
            emit_element(&out, &cfg.algebra, &cfg.algebra.bracket(&x, &y));
        }
        Command::Canon { expr } => {
            let cfg = load(&cli, false)?;
            emit_element(&out, &cfg.algebra, &element(expr, &cfg)?);
        }
        Command::Check {
            suite,
            samples,
            seed,
            unchecked,
            fault,
            convention,
        } => {
            let suite = parse_suite(suite).map_err(|e| Failure::Usage(e.to_string()))?;
            let cfg = load(&cli, *unchecked)?;
            let alg = match fault {
                FaultArg::None => cfg.algebra,
                FaultArg::DropCocycle => cfg.algebra.with_fault(Fault::DropDerivationCocycle),
            };
            let opts = CheckOptions {
                samples: *samples,
                seed: *seed,
                convention: match convention {
                    ConventionArg::ColumnRow => RankOneConvention::ColumnRow,
                    ConventionArg::RowColumn => RankOneConvention::RowColumn,
                },
                ..CheckOptions::default()
            };
            let reports = run_suites(&alg, suite, &opts)?;
            let single = reports.len() == 1;
            for r in &reports {
                let text = if single {
                    r.summary()
                } else {
                    format!("{} {}", r.suite, r.summary())
                };
                out.emit(text, r.to_json());
                if !out.json {
                    for note in &r.notes {
                        println!("  note: {note}");
                    }
                }
            }
            let ok = reports.iter().all(|r| r.ok());
            if !single {
                out.emit(
                    if ok { "PASS" } else { "FAIL" },
                    json!({ "status": if ok { "PASS" } else { "FAIL" } }),
                );
            }
            if let Some((r, f)) = reports.iter().find_map(|r| r.failures.first().map(|f| (r, f))) {
                return Err(Failure::Check(format!(
                    "first failure ({} sample {}, {}): {}",
                    r.suite, f.sample, f.property, f.detail
                )));
            }
            if !ok {
                return Err(Failure::Check("FAIL".into()));
            }
        }
        Command::Dims { degrees } => {
            let cfg = load(&cli, false)?;
            let alg = &cfg.algebra;
            for src in degrees {
                let r = degree(src)?;
                let (text, value) = match dims_row(alg, &r) {
                    Err(e) => (
                        format!("{r}\terror: {e}"),
                        json!({ "degree": r, "error": e.to_string() }),
                    ),
                    Ok((l, Some(c))) => (
                        format!("{r}\tloop {l}\tcentral {c}"),
                        json!({ "degree": r, "loop": l, "central": c }),
                    ),
                    Ok((l, None)) => {
                        let e = Error::NotInLattice {
                            degree: r.to_string(),
                            lattice: "Gamma-bar",
                        };
                        (
                            format!("{r}\tloop {l}\tcentral -\terror: {e}"),
                            json!({ "degree": r, "loop": l, "central": null, "error": e.to_string() }),
                        )
                    }
                };
                out.emit(text, value);
            }
        }
        Command::Reflect { root, weight } => {
            let cfg = load(&cli, false)?;
            let alg = &cfg.algebra;
            let x = element(root, &cfg)?;
            let gamma = root_of(alg, &x)?;
            let v: Value = serde_json::from_str(weight).map_err(|e| Failure::Usage(format!("weight: {e}")))?;
            let lambda = weight_from_json(&v, alg.field(), alg.lie().cartan().len(), alg.n())?;
            let w = reflect(alg, &gamma, &lambda)?;
            let value = json!({ "root": root_to_json(&gamma), "weight": weight_to_json(&w) });
            let text = format!("h: [{}]  K: [{}]  d: [{}]", join(&w.h), join(&w.k), join(&w.d));
            out.emit(text, value);
        }
        Command::Twist { matrix, expr } => {
            let cfg = load(&cli, false)?;
            let alg = &cfg.algebra;
            let b = int_matrix(matrix)?;
            let x = element(expr, &cfg)?;
            let y = alg.twist(&b, &x)?;
            let target = alg.twisted(&b)?;
            let mut value = element_to_json(&target, &y);
            value["frame"] = json!(target.frame().matrix().to_rows());
            out.emit(target.pretty(&y), value);
        }
        Command::Act {
            module,
            alpha,
            beta,
            generator,
            degree: k,
            vector,
        } => {
            let cfg = load(&cli, false)?;
            let alg = &cfg.algebra;
            let (n, field) = (alg.n(), alg.field());
            let module = match module {
                ModuleArg::Trivial => SpModule::Trivial { n },
                ModuleArg::Natural => SpModule::Natural { n },
            };
            let vec_arg = |src: &Option<String>, len: usize| -> CliResult<Vec<_>> {
                match src {
                    None => Ok(vec![field.zero(); len]),
                    Some(s) => scalars(s, field, len),
                }
            };
            let jm = JetModule::new(
                module,
                vec_arg(alpha, n)?,
                vec_arg(beta, n)?,
                alg.lattice().clone(),
                field,
            )?;
            let g = jet_generator(generator, field, n)?;
            let w = match vector {
                Some(s) => scalars(s, field, module.dim())?,
                None => {
                    let mut w = vec![field.zero(); module.dim()];
                    w[0] = field.one();
                    w
                }
            };
            let v = JetVector::single(degree(k)?, w);
            let res = jm.act(&g, &v)?;
            let comps: Vec<Value> = res
                .components()
                .iter()
                .map(|(k, w)| json!({ "degree": k, "vector": scalars_to_json(w) }))
                .collect();
            let text = if res.is_zero() {
                "0".to_string()
            } else {
                res.components()
                    .iter()
                    .map(|(k, w)| format!("[{}] t^{k}", join(w)))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            out.emit(text, json!({ "components": comps }));
        }
    }
    Ok(())
}

/// Eigenspace dimension of the class of `r`, and the central dimension when `r` lies in Gamma-bar.
fn dims_row(alg: &TauAlgebra, r: &Degree) -> Result<(usize, Option<usize>)> {
    if r.len() != alg.n() {
        return Err(Error::Dimension(format!(
            "expected {} entries, got {}",
            alg.n(),
            r.len()
        )));
    }
    let loop_dim = alg.eigen().eigenspace(&alg.lattice().residue(r)).len();
    if !alg.lattice().in_gamma_bar(r) {
        return Ok((loop_dim, None));
    }
    Ok((loop_dim, Some(alg.central_basis(r)?.len())))
}

fn join(v: &[healie::scalar::CycScalar]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn scalars(src: &str, field: healie::scalar::CyclotomicField, len: usize) -> CliResult<Vec<healie::scalar::CycScalar>> {
    let inner = src.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let v = inner
        .split(',')
        .map(|p| parse_scalar(p.trim(), field).map_err(|e| Failure::parse(src, e)))
        .collect::<CliResult<Vec<_>>>()?;
    if v.len() != len {
        return Err(Failure::Usage(format!(
            "{src:?}: expected {len} entries, got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn int_matrix(src: &str) -> CliResult<IntMatrix> {
    let rows = src
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| Failure::Usage(format!("matrix {src:?}: {x:?} is not an integer")))
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(IntMatrix::from_rows(rows)?)
}

fn jet_generator(src: &str, field: healie::scalar::CyclotomicField, n: usize) -> CliResult<JetGenerator> {
    let s = src.trim();
    let body = |prefix: &str| {
        s.strip_prefix(prefix)
            .and_then(|b| b.strip_prefix('['))
            .and_then(|b| b.strip_suffix(']'))
    };
    if let Some(b) = body("h") {
        return Ok(JetGenerator::Hamiltonian(degree(b)?));
    }
    if let Some(b) = body("t") {
        return Ok(JetGenerator::Monomial(degree(b)?));
    }
    if let Some(b) = body("D") {
        return Ok(JetGenerator::Derivation(scalars(b, field, n)?));
    }
    Err(Failure::Usage(format!(
        "generator {src:?}: expected h[r], t[r] or D[u]"
    )))
}
