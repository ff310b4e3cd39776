//! Command-line front end. `run` is the whole program minus process exit so
//! that tests can drive it with in-memory streams.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::branes::{self, Brane, HypersurfaceModel, ScanMode};
use crate::equivariant;
use crate::error::{Error, Result};
use crate::gauge::{self, HypersurfaceEquation};
use crate::polytope::{LatticePolytope, PolytopeDocument};
use crate::sheafcoh::CohomologyContext;
use crate::toric::{self, NormalFan, TorusDivisor};

pub const DEFAULT_SEED: u64 = 0xB4A17;
pub const SEED_ENV: &str = "BRANESCOPE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "branescope", version, about = "Toric geometry and B-brane checks on Calabi-Yau hypersurfaces")]
struct Cli {
    /// RNG seed (decimal or 0x-prefixed hex); overrides BRANESCOPE_SEED.
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polytope queries.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Normal fan, divisors and ambient cohomology.
    #[command(subcommand)]
    Toric(ToricCmd),
    /// Ext groups and checks on the anticanonical hypersurface.
    #[command(subcommand)]
    Branes(BranesCmd),
    /// Fixed points and equivariant localization.
    #[command(subcommand)]
    Equivariant(EquivariantCmd),
    /// Fubini-Study connection and the Yang-Mills value.
    #[command(subcommand)]
    Gauge(GaugeCmd),
}

#[derive(Debug, Subcommand)]
enum PolytopeCmd {
    Check { file: PathBuf },
    Dual { file: PathBuf },
    Points {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        dilate: i64,
    },
}

#[derive(Debug, Subcommand)]
enum ToricCmd {
    Fan { file: PathBuf },
    Cartier {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    VeryAmple {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    DivisorCohomology {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    Embedding {
        file: PathBuf,
        /// Torus point as comma-separated rationals, e.g. 2,1/3.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
}

#[derive(Debug, Args)]
struct BraneFile {
    file: PathBuf,
}

#[derive(Debug, Subcommand)]
enum BranesCmd {
    /// h^q(O_Y(E)).
    Cohomology {
        #[command(flatten)]
        input: BraneFile,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    Ext {
        #[command(flatten)]
        input: BraneFile,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Spanning {
        #[command(flatten)]
        input: BraneFile,
        #[arg(long, allow_hyphen_values = true)]
        brane: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        /// Scan Ext^l(F, L^i) instead of Ext^r(L^i, F).
        #[arg(long)]
        reverse: bool,
    },
    Rectangle {
        #[command(flatten)]
        input: BraneFile,
        #[arg(long, allow_hyphen_values = true)]
        brane: String,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
    },
    Triangle {
        #[command(flatten)]
        input: BraneFile,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        brane: String,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        other: String,
    },
}

#[derive(Debug, Subcommand)]
enum EquivariantCmd {
    Localize {
        file: PathBuf,
        /// Divisor for the standard mode; defaults to (n-1) D_Delta.
        #[arg(long, allow_hyphen_values = true)]
        divisor: Option<String>,
        #[arg(long)]
        paper_mode: bool,
        #[arg(long)]
        restrict_y: bool,
    },
    Xi {
        #[arg(long, allow_hyphen_values = true)]
        m: String,
    },
    Compare { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum GaugeCmd {
    Ym {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    Probe {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

/// Resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
}

pub fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    }
}

/// Seed precedence: flag, then environment, then the default.
pub fn resolve_seed(flag: Option<&str>, env: Option<&str>) -> std::result::Result<u64, String> {
    if let Some(f) = flag {
        return parse_seed(f).ok_or_else(|| format!("invalid --seed '{f}'"));
    }
    if let Some(e) = env {
        return parse_seed(e).ok_or_else(|| format!("invalid {SEED_ENV} '{e}'"));
    }
    Ok(DEFAULT_SEED)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegeneratePolytope { .. }
        | Error::UnsupportedDimension(_)
        | Error::NonReflexive
        | Error::NonSimplicialFan { .. }
        | Error::NotCartier { .. }
        | Error::NotInTorus(_)
        | Error::NotASubcomplex
        | Error::Overflow(_) => EXIT_DOMAIN,
        Error::GenericityFailure { .. }
        | Error::NumericalInstability(_)
        | Error::ScanExhausted { .. }
        | Error::RegionNotCertified(_) => EXIT_NUMERIC,
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
    }
}

/// Run with the given arguments (including the program name) and the value
/// of `BRANESCOPE_SEED`, if set. Returns the process exit code.
pub fn run(args: &[String], env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let seed = match resolve_seed(cli.seed.as_deref(), env_seed) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let config = RunConfig {
        seed,
        format: cli.format,
    };
    match execute(&cli.command, &config) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_USAGE,
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load_polytope(path: &Path) -> Result<LatticePolytope> {
    PolytopeDocument::from_json(&std::fs::read_to_string(path)?)?.to_polytope()
}

fn load_doc(path: &Path) -> Result<PolytopeDocument> {
    PolytopeDocument::from_json(&std::fs::read_to_string(path)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn json_only(config: &RunConfig) -> Result<()> {
    match config.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::invalid("CSV output is only available for ext and rectangle tables")),
    }
}

/// A brane spec, or a bare integer `k` meaning `L^k`.
fn parse_brane(h: &HypersurfaceModel, text: &str) -> Result<Brane> {
    if h.ray_count() > 1 && !text.contains([',', ';', '@']) {
        if let Ok(k) = text.trim().parse::<i64>() {
            return Ok(h.l_power(k));
        }
    }
    let b = Brane::parse(text)?;
    h.check_brane(&b)?;
    Ok(b)
}

fn parse_ints(text: &str) -> Result<Vec<i64>> {
    Ok(TorusDivisor::parse(text)?.0)
}

fn parse_rationals(text: &str) -> Result<Vec<num_rational::BigRational>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<num_rational::BigRational>()
                .map_err(|_| Error::invalid(format!("bad rational '{t}'")))
        })
        .collect()
}

fn execute(cmd: &Command, config: &RunConfig) -> Result<String> {
    match cmd {
        Command::Polytope(c) => {
            json_only(config)?;
            polytope_cmd(c)
        }
        Command::Toric(c) => {
            json_only(config)?;
            toric_cmd(c)
        }
        Command::Branes(c) => branes_cmd(c, config),
        Command::Equivariant(c) => {
            json_only(config)?;
            equivariant_cmd(c)
        }
        Command::Gauge(c) => {
            json_only(config)?;
            gauge_cmd(c, config)
        }
    }
}

fn polytope_cmd(cmd: &PolytopeCmd) -> Result<String> {
    match cmd {
        PolytopeCmd::Check { file } => {
            let doc = load_doc(file)?;
            let p = doc.to_polytope()?;
            let dual = if p.is_reflexive() {
                Some(p.polar_dual()?.vertices().to_vec())
            } else {
                None
            };
            to_json(&json!({
                "name": doc.name,
                "dim": p.dim(),
                "reflexive": p.is_reflexive(),
                "vertices": p.vertices(),
                "facets": p.facets(),
                "dual_vertices": dual,
                "lattice_points": p.lattice_points().len(),
                "interior_points": p.interior_lattice_points().len(),
            }))
        }
        PolytopeCmd::Dual { file } => {
            let doc = load_doc(file)?;
            let dual = doc.to_polytope()?.polar_dual()?;
            to_json(&dual.to_document(&format!("{}-dual", doc.name)))
        }
        PolytopeCmd::Points { file, dilate } => {
            if *dilate < 1 {
                return Err(Error::invalid("--dilate must be at least 1"));
            }
            let p = load_polytope(file)?.dilate(*dilate)?;
            let points = p.lattice_points();
            to_json(&json!({ "dilation": dilate, "count": points.len(), "points": points }))
        }
    }
}

fn toric_cmd(cmd: &ToricCmd) -> Result<String> {
    match cmd {
        ToricCmd::Fan { file } => {
            let fan = NormalFan::of_polytope(&load_polytope(file)?)?;
            to_json(&json!({
                "rays": fan.rays(),
                "cones": fan.cones(),
                "cone_vertices": fan.cone_vertices(),
                "simplicial": fan.is_simplicial(),
                "canonical_divisor": fan.canonical_divisor(),
            }))
        }
        ToricCmd::Cartier { file, divisor } => {
            let fan = NormalFan::of_polytope(&load_polytope(file)?)?;
            to_json(&fan.cartier_data(&TorusDivisor::parse(divisor)?)?)
        }
        ToricCmd::VeryAmple { file, divisor } => {
            let fan = NormalFan::of_polytope(&load_polytope(file)?)?;
            let d = TorusDivisor::parse(divisor)?;
            to_json(&json!({
                "divisor": d,
                "ample": fan.is_ample(&d)?,
                "very_ample": fan.is_very_ample(&d)?,
            }))
        }
        ToricCmd::DivisorCohomology { file, divisor } => {
            let fan = NormalFan::of_polytope(&load_polytope(file)?)?;
            to_json(&CohomologyContext::new(fan)?.divisor_cohomology(&TorusDivisor::parse(divisor)?)?)
        }
        ToricCmd::Embedding { file, at } => {
            let e = toric::embedding(&load_polytope(file)?)?;
            let image = match at {
                Some(text) => Some(
                    e.evaluate(&parse_rationals(text)?)?
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>(),
                ),
                None => None,
            };
            to_json(&json!({
                "coordinates": e.coordinate_count(),
                "target_dimension": e.target_dimension(),
                "monomials": e.monomials,
                "image": image,
            }))
        }
    }
}

fn branes_cmd(cmd: &BranesCmd, config: &RunConfig) -> Result<String> {
    let file = match cmd {
        BranesCmd::Cohomology { input, .. }
        | BranesCmd::Ext { input, .. }
        | BranesCmd::Spanning { input, .. }
        | BranesCmd::Rectangle { input, .. }
        | BranesCmd::Triangle { input, .. } => &input.file,
    };
    let h = HypersurfaceModel::new(&load_polytope(file)?, config.seed)?;
    match cmd {
        BranesCmd::Ext { a, b, .. } => {
            let table = h.ext_table(&parse_brane(&h, a)?, &parse_brane(&h, b)?)?;
            match config.format {
                Format::Json => to_json(&table),
                Format::Csv => Ok(table.to_csv()),
            }
        }
        BranesCmd::Rectangle { brane, b, .. } => {
            let table = branes::rectangle_table(&h, &parse_brane(&h, brane)?, *b)?;
            match config.format {
                Format::Json => to_json(&table),
                Format::Csv => Ok(table.to_csv()),
            }
        }
        _ => {
            json_only(config)?;
            match cmd {
                BranesCmd::Cohomology { divisor, .. } => {
                    let e = TorusDivisor::parse(divisor)?;
                    let dims = h.hypersurface_cohomology(&e)?;
                    to_json(&json!({ "divisor": e, "seed": h.seed(), "h": dims }))
                }
                BranesCmd::Spanning {
                    brane,
                    depth,
                    window,
                    reverse,
                    ..
                } => {
                    let mode = if *reverse { ScanMode::Reverse } else { ScanMode::Forward };
                    to_json(&branes::spanning_scan(&h, &parse_brane(&h, brane)?, *depth, *window, mode)?)
                }
                BranesCmd::Triangle { brane, a, other, .. } => to_json(&branes::triangle_clauses(
                    &h,
                    &parse_brane(&h, brane)?,
                    *a,
                    &parse_brane(&h, other)?,
                )?),
                BranesCmd::Ext { .. } | BranesCmd::Rectangle { .. } => unreachable!("handled above"),
            }
        }
    }
}

fn equivariant_cmd(cmd: &EquivariantCmd) -> Result<String> {
    match cmd {
        EquivariantCmd::Localize {
            file,
            divisor,
            paper_mode,
            restrict_y,
        } => {
            let p = load_polytope(file)?;
            let fan = NormalFan::of_polytope(&p)?;
            if *paper_mode {
                return to_json(&equivariant::localize_paper_mode(&fan, p.dim(), *restrict_y));
            }
            let d = match divisor {
                Some(text) => TorusDivisor::parse(text)?,
                None => fan.polytope_divisor().scaled(p.dim() as i64 - 1),
            };
            to_json(&equivariant::localize_standard(&fan, &d)?)
        }
        EquivariantCmd::Xi { m } => {
            let form = equivariant::xi_star(&parse_ints(m)?);
            to_json(&json!({ "form": form, "text": form.to_string() }))
        }
        EquivariantCmd::Compare { file } => {
            let p = load_polytope(file)?;
            to_json(&equivariant::compare_modes(&NormalFan::of_polytope(&p)?, p.dim())?)
        }
    }
}

fn gauge_cmd(cmd: &GaugeCmd, config: &RunConfig) -> Result<String> {
    match cmd {
        GaugeCmd::Ym { poly, trials } => {
            let eq = HypersurfaceEquation::from_json(&std::fs::read_to_string(poly)?)?;
            to_json(&gauge::ym_value(&eq, *trials, config.seed)?)
        }
        GaugeCmd::Probe { poly, trials } => {
            let eq = HypersurfaceEquation::from_json(&std::fs::read_to_string(poly)?)?;
            to_json(&gauge::degree_probe(&eq, *trials, config.seed)?)
        }
    }
}
