use clap::{Parser, Subcommand, ValueEnum};
use conesys::bounds::bounds;
use conesys::decompose::decompose;
use conesys::generate::{generate, GeneratorSpec};
use conesys::kite::{base_between, build_diamond, build_exact, excise, Kite};
use conesys::optimize::{optimize, OptimizeConfig};
use conesys::report::{decomposition_report, surface_info, systole_report, SCHEMA};
use conesys::svg::{decomposition_view, export_svg, kite_view, NetOverlays};
use conesys::{parse_surface, ConeSurface, Error};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "conesys", version, about = "Systoles and kite surgery on flat cone surfaces")]
struct Cli {
    /// Length tolerance for systole comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Exact,
    Diamond,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Torus,
    Octagon,
    #[value(name = "example-4-10")]
    FourCylinder,
}

#[derive(Clone, Copy, ValueEnum)]
enum View {
    Net,
    Decomposition,
}

#[derive(Subcommand)]
enum Command {
    /// Check a surface file and report every violated invariant.
    Validate { input: PathBuf },
    /// Counts, genus, area and cone angles.
    Info { input: PathBuf },
    /// Length of the shortest noncontractible closed geodesic.
    Systole { input: PathBuf },
    /// Systolic bands and nonsystolic domains.
    Decompose { input: PathBuf },
    /// Remove a kite on the shortest segment from `p` to `q`.
    Excise {
        input: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run surgery moves until none applies.
    Optimize {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_passes: usize,
    },
    /// Counting bounds for a genus.
    Bounds {
        #[arg(long)]
        genus: u64,
    },
    /// Generate a surface from a named family or a JSON spec.
    Gen {
        #[arg(value_enum, required_unless_present = "spec")]
        family: Option<Family>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        shear: f64,
        #[arg(long, default_value_t = 1.0)]
        side: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        height: f64,
        /// JSON generator spec, overriding the family.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the developed net as SVG.
    ExportSvg {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = View::Net)]
        view: View,
        /// Draw a kite `p,q,kind,width` cut into the mesh.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        kite: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<ConeSurface, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_surface(&text)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Serializes with a schema field added at top level.
fn versioned<T: Serialize>(v: &T) -> Value {
    let mut value = serde_json::to_value(v).expect("reports serialize");
    if let Value::Object(m) = &mut value {
        m.entry("schema").or_insert(json!(SCHEMA));
    }
    value
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn emit(v: &Value) -> Outcome {
    print!("{}", pretty(v));
    Ok(ExitCode::SUCCESS)
}

fn text_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_kite(s: &ConeSurface, p: usize, q: usize, kind: KindArg, w: f64) -> Result<Kite, Failure> {
    let base = base_between(s, p, q)?;
    Ok(match kind {
        KindArg::Exact => build_exact(s, &base, w)?,
        KindArg::Diamond => build_diamond(s, &base, w)?,
    })
}

fn parse_kind(text: &str) -> Result<KindArg, Failure> {
    KindArg::from_str(text, true).map_err(|_| Failure::Domain(Error::InvalidArgument(format!("unknown kite kind {text}"))))
}

fn number<T: std::str::FromStr>(text: &str) -> Result<T, Failure> {
    text.trim().parse().map_err(|_| Failure::Domain(Error::InvalidArgument(format!("bad number {text}"))))
}

fn run(cli: Cli) -> Outcome {
    let tol = cli.tol;
    match cli.command {
        Command::Validate { input } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
            let report = parse_surface(&text)?.validate();
            print!("{}", pretty(&versioned(&report)));
            Ok(if report.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Info { input } => emit(&versioned(&surface_info(&read(&input)?))),
        Command::Systole { input } => emit(&versioned(&systole_report(&read(&input)?, tol)?)),
        Command::Decompose { input } => {
            let s = read(&input)?;
            let dec = decompose(&s, tol)?;
            emit(&versioned(&decomposition_report(&s, &dec)))
        }
        Command::Excise { input, p, q, kind, width, out } => {
            let s = read(&input)?;
            let k = build_kite(&s, p, q, kind, width)?;
            let r = excise(&s, &k)?;
            let check = r.surface.validate();
            if let Some(path) = &out {
                write(path, &r.surface.to_cfs())?;
            }
            emit(&json!({
                "schema": SCHEMA,
                "kite": k,
                "p": r.p,
                "q": r.q,
                "r": r.r,
                "removed_area": r.removed_area,
                "area": [s.area(), r.surface.area()],
                "angle_p": [r.angle_p.0, r.angle_p.1],
                "angle_q": [r.angle_q.0, r.angle_q.1],
                "apex_before": [r.apex_before.0, r.apex_before.1],
                "angle_r": r.angle_r,
                "vertex_map": r.vertex_map,
                "valid": check.valid,
            }))
        }
        Command::Optimize { input, out, log, max_passes } => {
            let s = read(&input)?;
            let cfg = OptimizeConfig { tol, max_passes, ..OptimizeConfig::default() };
            let o = optimize(&s, &cfg)?;
            if let Some(path) = &out {
                write(path, &o.surface.to_cfs())?;
            }
            if let Some(path) = &log {
                write(path, &pretty(&versioned(&o.log)))?;
            }
            let mut report = versioned(&o.report);
            report["exhausted"] = json!(o.exhausted);
            report["moves"] = json!(o.log.moves.len());
            emit(&report)
        }
        Command::Bounds { genus } => emit(&versioned(&bounds(genus)?)),
        Command::Gen { family, a, b, shear, side, height, spec, out } => {
            let spec = match (spec, family) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<GeneratorSpec>(&text)
                        .map_err(|e| Failure::Domain(Error::InvalidArgument(format!("bad generator spec: {e}"))))?
                }
                (None, Some(Family::Torus)) => GeneratorSpec::Torus { a, b, shear },
                (None, Some(Family::Octagon)) => GeneratorSpec::Octagon { side },
                (None, Some(Family::FourCylinder)) => GeneratorSpec::FourCylinder { height },
                (None, None) => unreachable!("clap requires a family or a spec"),
            };
            let s = generate(&spec)?;
            text_out(out.as_deref(), &s.to_cfs())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportSvg { input, view, kite, out } => {
            let s = read(&input)?;
            let (surface, overlays) = match (kite, view) {
                (Some(k), _) => {
                    let kite = build_kite(&s, number(&k[0])?, number(&k[1])?, parse_kind(&k[2])?, number(&k[3])?)?;
                    kite_view(&s, &kite)?
                }
                (None, View::Decomposition) => decomposition_view(&decompose(&s, tol)?),
                (None, View::Net) => (s, NetOverlays::default()),
            };
            text_out(out.as_deref(), &export_svg(&surface, &overlays))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            let (kind, message) = match f {
                Failure::Domain(e) => (e.kind(), e.to_string()),
                Failure::Io(m) => ("io", m),
            };
            eprintln!("{}", json!({ "schema": SCHEMA, "error": kind, "message": message }));
            ExitCode::from(1)
        }
    }
}
