//! Command-line front end. Exit codes: 0 success, 1 verification failed,
//! 2 usage error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::{catalog_load, entries, entry};
use crate::codefile::{matrix_json, CodeFile};
use crate::embed::{embedding_family, push_code};
use crate::error::{Error, Result};
use crate::extrinsic::{
    bosonic_sweep, conventional_distance, depth, weight_enumerators, DEFAULT_MAX_ORDER, DEFAULT_MAX_WEIGHT,
    DEFAULT_OPERATOR_CAP, EXTRINSIC_TOL,
};
use crate::intrinsic::{
    covariance_closure, intrinsic_distance, sector_reports, Code, DEFAULT_CLOSURE_CAP, DEFAULT_KL_TOL,
};
use crate::linalg::C64;
use crate::repcore::GroupElement;
use crate::search::{search, SearchProblem, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};
use crate::spaces::{build_space, fixed_multiplicity, schwinger_space, PointGroup, SpaceSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "intrinsic",
    version,
    about = "Verify, embed and search SU(2)-covariant quantum codes"
)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Knill-Laflamme check per sector.
    Verify {
        /// Code file path or `catalog:<name>`.
        #[arg(long)]
        code: String,
        /// Sector dimensions 2L+1, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sectors: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_KL_TOL)]
        tol: f64,
    },
    /// Intrinsic distance, or conventional distance and depth on product spaces.
    Distance {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT)]
        max_weight: usize,
    },
    /// Push an irrep code into a physical space.
    Embed {
        #[arg(long)]
        code: String,
        /// Space grammar: `2x2x2x2`, `sum:5*3+13*1`, `fock:N=4,max=8`.
        #[arg(long)]
        space: String,
        /// Moduli point as JSON `[[re, im], ...]`.
        #[arg(long)]
        z: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shor-Laflamme weight enumerators of a qubit code.
    Enumerators {
        #[arg(long)]
        code: String,
    },
    /// Perturbative depth of a code on a product space.
    Depth {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Logical images of SU(2) elements and the group they generate.
    Covariance {
        #[arg(long)]
        code: String,
        /// Comma-separated names (S, Sdag, S3dag, H, Hdag, X, Y, Z, Rz3, products with `*`)
        /// or JSON 2×2 matrices of `[re, im]` pairs.
        #[arg(long)]
        generators: String,
        #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
    },
    /// Numerical search for an intrinsic code.
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        distance: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Also write the found code as a code file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the built-in code catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// KL sweep of bosonic errors on a two-mode realization.
    Bosonic {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value = "catalog:5-2-2")]
        code: String,
    },
    /// Number of copies of the spin-ℓ irrep in a molecular rotational space.
    Molecular {
        /// `C<n>`, `T`, `O` or `I`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

/// Result of one command: machine report, human text and exit code.
struct Outcome {
    report: Value,
    text: String,
    code: i32,
}

impl Outcome {
    fn new(report: Value, text: String, ok: bool) -> Self {
        Outcome {
            report,
            text,
            code: if ok { EXIT_OK } else { EXIT_FAILED },
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotCovariant(_) => EXIT_FAILED,
        Error::DenseLimit { .. }
        | Error::NotOrthonormal(_)
        | Error::CorruptCatalog { .. }
        | Error::PointGroupData { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` (including the program name), runs the command, prints the
/// report and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(outcome) => {
            // A closed stdout (e.g. piped into `head`) must not panic.
            let mut out = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&outcome.report).expect("report serializes")
                )
            } else {
                write!(out, "{}", outcome.text)
            };
            outcome.code
        }
        Err(err) => {
            if cli.json {
                println!("{}", json!({ "error": err.to_string() }));
            }
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Loads `catalog:<name>` or a code file.
pub fn load_code(source: &str) -> Result<Code> {
    match source.strip_prefix("catalog:") {
        Some(name) => Ok(catalog_load(name)?.0),
        None => CodeFile::read(std::path::Path::new(source))?.to_code(),
    }
}

fn parse_z(text: &str) -> Result<Vec<C64>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("--z: {e}")))?;
    Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

fn parse_generators(text: &str) -> Result<Vec<GroupElement>> {
    let text = text.trim();
    if !text.starts_with('[') {
        return text.split(',').map(|g| GroupElement::from_name(g.trim())).collect();
    }
    type Mat = [[[f64; 2]; 2]; 2];
    let mats: Vec<Mat> = serde_json::from_str::<Vec<Mat>>(text)
        .or_else(|_| serde_json::from_str::<Mat>(text).map(|m| vec![m]))
        .map_err(|e| Error::Parse(format!("--generators: {e}")))?;
    mats.into_iter()
        .map(|m| {
            let u = nalgebra::Matrix2::from_fn(|i, j| C64::new(m[i][j][0], m[i][j][1]));
            GroupElement::new(u)
        })
        .collect()
}

fn single_irrep(code: &Code) -> Option<usize> {
    match code.space().spec() {
        SpaceSpec::Tensor(d) if d.len() == 1 => Some(d[0]),
        _ => None,
    }
}

fn sector_ls(dims: &[usize]) -> Result<Vec<usize>> {
    dims.iter()
        .map(|&d| {
            if d % 2 == 1 {
                Ok((d - 1) / 2)
            } else {
                Err(Error::InvalidAngularMomentum(format!(
                    "sector dimension {d} is not odd"
                )))
            }
        })
        .collect()
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Verify { code, sectors, tol } => {
            let c = load_code(code)?;
            let reports = sector_reports(&c, &sector_ls(sectors)?, *tol)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "sector {:>3}  residual {:.3e}  {}\n",
                    r.sector_dim,
                    r.residual,
                    if r.pass { "pass" } else { "FAIL" }
                ));
            }
            let ok = reports.iter().all(|r| r.pass);
            Ok(Outcome::new(serde_json::to_value(&reports)?, text, ok))
        }
        Command::Distance { code, max_weight } => {
            let c = load_code(code)?;
            if single_irrep(&c).is_some() {
                let d = intrinsic_distance(&c)?;
                return Ok(Outcome::new(
                    json!({ "kind": "intrinsic", "distance": d }),
                    format!("intrinsic distance {d}\n"),
                    true,
                ));
            }
            let conv = conventional_distance(&c, *max_weight, DEFAULT_OPERATOR_CAP)?;
            let dep = depth(&c, DEFAULT_MAX_ORDER)?;
            let bound = if conv.exact { "" } else { ">= " };
            let text = format!("conventional distance {bound}{}\ndepth {}\n", conv.distance, dep.depth);
            Ok(Outcome::new(
                json!({ "kind": "extrinsic", "conventional": conv, "depth": dep }),
                text,
                true,
            ))
        }
        Command::Embed { code, space, z, out } => {
            let c = load_code(code)?;
            let n =
                single_irrep(&c).ok_or_else(|| Error::Unsupported("embed needs a code on a single irrep".into()))?;
            let spec: SpaceSpec = space.parse()?;
            let target = Arc::new(build_space(&spec)?);
            let family = embedding_family(Arc::clone(&target), n)?;
            let u = match z {
                Some(z) => family.at_point(&parse_z(z)?)?,
                None => family.isometries[0].clone(),
            };
            let pushed = push_code(&c, &u, target)?;
            let mut meta = serde_json::Map::new();
            meta.insert("source".into(), json!(code));
            meta.insert("multiplicity".into(), json!(family.multiplicity()));
            if let Some(z) = z {
                meta.insert("z".into(), serde_json::from_str(z)?);
            }
            let file = CodeFile::from_code(&pushed, meta);
            let text = match out {
                Some(path) => {
                    file.write(path)?;
                    format!(
                        "wrote {} ({} copies of irrep {n} in {spec})\n",
                        path.display(),
                        family.multiplicity()
                    )
                }
                None => file.to_json()?,
            };
            Ok(Outcome::new(serde_json::to_value(&file)?, text, true))
        }
        Command::Enumerators { code } => {
            let e = weight_enumerators(&load_code(code)?)?;
            let d = e.distance();
            let text = format!(
                "{}distance {}\n",
                e.table(),
                d.map_or_else(|| "undetermined (A = B)".to_string(), |d| d.to_string())
            );
            Ok(Outcome::new(json!({ "a": e.a, "b": e.b, "distance": d }), text, true))
        }
        Command::Depth { code, max_order } => {
            let r = depth(&load_code(code)?, *max_order)?;
            let mut text = String::new();
            for o in &r.orders {
                text.push_str(&format!(
                    "order {}  operators {:>6}  residual {:.3e}\n",
                    o.order, o.operators, o.residual
                ));
            }
            text.push_str(&format!("depth {}\n", r.depth));
            if !r.failing_patterns.is_empty() {
                let patterns: Vec<String> = r
                    .failing_patterns
                    .iter()
                    .map(|p| p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("⊗"))
                    .collect();
                text.push_str(&format!("failing products: {}\n", patterns.join(", ")));
            }
            Ok(Outcome::new(serde_json::to_value(&r)?, text, true))
        }
        Command::Covariance { code, generators, cap } => {
            let c = load_code(code)?;
            let gens = parse_generators(generators)?;
            let closure = covariance_closure(&c, &gens, *cap)?;
            let mut text = String::new();
            for (g, l) in gens.iter().zip(&closure.logical_generators) {
                text.push_str(&format!("{g} ↦\n{l:.6}"));
            }
            match closure.order() {
                Some(o) => text.push_str(&format!("closure order {o}\n")),
                None => text.push_str(&format!("closure exceeds {cap} elements\n")),
            }
            let logical: Vec<Value> = closure.logical_generators.iter().map(matrix_json).collect();
            Ok(Outcome::new(
                json!({ "logical": logical, "order": closure.order() }),
                text,
                true,
            ))
        }
        Command::Search {
            dim,
            k,
            distance,
            restarts,
            seed,
            max_iters,
            out,
        } => {
            let mut problem = SearchProblem::for_distance(*dim, *k, *distance, *restarts, *seed);
            problem.max_iters = *max_iters;
            let r = search(&problem)?;
            if let Some(path) = out {
                let code = Code::in_irrep(*dim, r.codewords.clone())?;
                let mut meta = serde_json::Map::new();
                meta.insert("search".into(), serde_json::to_value(&problem)?);
                CodeFile::from_code(&code, meta).write(path)?;
            }
            let text = format!(
                "objective {:.3e}  converged {}  distance {}  restart {}\n",
                r.objective, r.converged, r.distance, r.restart
            );
            let code = if r.converged { EXIT_OK } else { EXIT_NUMERICAL };
            Ok(Outcome {
                report: serde_json::to_value(&r)?,
                text,
                code,
            })
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let text = entries()
                    .iter()
                    .map(|e| format!("{:<8} {}\n", e.name, e.description))
                    .collect();
                Ok(Outcome::new(serde_json::to_value(entries())?, text, true))
            }
            CatalogAction::Show { name } => {
                entry(name)?;
                let (code, e) = catalog_load(name)?;
                let file = CodeFile::from_code(&code, Default::default());
                let text = format!(
                    "{}\nirrep {}  K {}  distance {}  group order {}\nrealizations: {}\n",
                    e.description,
                    e.irrep_dim,
                    e.code_dim,
                    e.distance,
                    e.group_order,
                    e.realizations.join(", ")
                );
                Ok(Outcome::new(json!({ "entry": e, "code": file }), text, true))
            }
        },
        Command::Bosonic { n, nmax, code } => {
            let c = load_code(code)?;
            let dim = single_irrep(&c).ok_or_else(|| Error::Unsupported("bosonic sweep needs an irrep code".into()))?;
            if dim != n + 1 {
                return Err(Error::SpaceMismatch(format!(
                    "irrep {dim} lives at N = {}, not {n}",
                    dim - 1
                )));
            }
            let bosons = schwinger_space(*n, *nmax)?;
            let spec = bosons.space.spec().clone();
            let target = Arc::new(build_space(&spec)?);
            let u = embedding_family(Arc::clone(&target), dim)?.unique()?;
            let pushed = push_code(&c, &u, target)?;
            let rows = bosonic_sweep(&bosons, &pushed, EXTRINSIC_TOL)?;
            let mut text = String::from("operator          c                       residual   \n");
            for r in &rows {
                text.push_str(&format!(
                    "{:<14} {:>+.6} {:>+.6}i  {:.2e}  {}\n",
                    r.operator,
                    r.c.re,
                    r.c.im,
                    r.residual,
                    if r.pass { "pass" } else { "FAIL" }
                ));
            }
            let ok = rows.iter().all(|r| r.pass);
            Ok(Outcome::new(serde_json::to_value(&rows)?, text, ok))
        }
        Command::Molecular { group, ell } => {
            let g = PointGroup::by_name(group)?;
            let m = fixed_multiplicity(&g, *ell)?;
            Ok(Outcome::new(
                json!({ "group": group, "ell": ell, "multiplicity": m }),
                format!("{group}, ell = {ell}: multiplicity {m}\n"),
                true,
            ))
        }
    }
}
