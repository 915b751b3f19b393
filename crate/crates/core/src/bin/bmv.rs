//! Command-line front end. Exit codes: 0 success / all checks passed,
//! 2 input or validation problem, 3 numerical or convergence failure,
//! 4 a verification check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bmv::config::{RunConfig, Spacing};
use bmv::error::Error;
use bmv::export::{self, Coords};
use bmv::measure::{assemble_measure, atoms};
use bmv::pair::{matrix_from_json, random_pair, HermitianPair};
use bmv::reduce::{default_eps_split, reduce_pair};
use bmv::verify::{trace_poly_coeffs, verify};

#[derive(Parser)]
#[command(
    name = "bmv",
    about = "Representing measure of Tr exp(A - tB) for Hermitian pairs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute atoms and continuous density, write atoms.csv/density.csv (or JSON)
    Density(DensityArgs),
    /// Atoms only; skips all contour work
    Atoms(AtomsArgs),
    /// Laplace round-trip, positivity and contour-residual report
    Verify(VerifyArgs),
    /// Coefficients of t -> Tr (A + tB)^p for positive semi-definite B
    Poly(PolyArgs),
}

#[derive(Args)]
struct MatrixInput {
    /// JSON file with matrix A ({"n":..,"re":[[..]],"im":[[..]]}, "im" optional)
    #[arg(long, value_name = "FILE")]
    matrix_a: Option<PathBuf>,
    /// JSON file with matrix B (same format)
    #[arg(long, value_name = "FILE")]
    matrix_b: Option<PathBuf>,
    /// Use a seeded random pair of this dimension instead of files
    /// (A Hermitian with entries in [-1,1], B = diag(1..n))
    #[arg(long, value_name = "N", conflicts_with_all = ["matrix_a", "matrix_b"])]
    random: Option<usize>,
    /// Seed for --random
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ConfigOverrides {
    /// JSON config file (overrides BMV_CONFIG; flags below override both)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Eigenvalue splitting scale (default: 1e-6 x spectral diameter of B)
    #[arg(long)]
    eps_split: Option<f64>,
    /// Initial contour node count (power of two >= 64)
    #[arg(long)]
    nodes: Option<usize>,
    /// Node-doubling ceiling
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Contour radius (default: automatic search)
    #[arg(long)]
    radius: Option<f64>,
    /// Density samples per interval between consecutive atoms
    #[arg(long)]
    points_per_interval: Option<usize>,
    /// Density convergence tolerance
    #[arg(long)]
    tau_quad: Option<f64>,
    /// Monodromy closure tolerance
    #[arg(long)]
    tau_closure: Option<f64>,
    /// Allowed imaginary residual of density samples
    #[arg(long)]
    tau_im: Option<f64>,
    /// Laplace round-trip tolerance (verify)
    #[arg(long = "tol")]
    tau_laplace: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long, value_enum)]
    t_spacing: Option<SpacingArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Log,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordsArg {
    Reduced,
    Original,
}

impl From<CoordsArg> for Coords {
    fn from(c: CoordsArg) -> Coords {
        match c {
            CoordsArg::Reduced => Coords::Reduced,
            CoordsArg::Original => Coords::Original,
        }
    }
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Write a single measure.json instead of atoms.csv + density.csv
    #[arg(long)]
    json: bool,
    /// Output directory
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Coordinate convention for atom/density locations
    #[arg(long, value_enum, default_value = "reduced")]
    coords: CoordsArg,
    /// Also dump the tracked contour as CSV (for plotting)
    #[arg(long, value_name = "FILE")]
    dump_contour: Option<PathBuf>,
}

#[derive(Args)]
struct AtomsArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[command(flatten)]
    overrides: ConfigOverrides,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "reduced")]
    coords: CoordsArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Write the full report JSON here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolyArgs {
    #[command(flatten)]
    input: MatrixInput,
    /// Polynomial degree (1..=20)
    #[arg(long)]
    p: usize,
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn load_pair(input: &MatrixInput) -> Result<HermitianPair, Error> {
    if let Some(n) = input.random {
        if n == 0 {
            return Err(Error::Parameter {
                name: "random",
                reason: "dimension must be at least 1".into(),
            });
        }
        return random_pair(n, input.seed);
    }
    let (Some(pa), Some(pb)) = (&input.matrix_a, &input.matrix_b) else {
        return Err(Error::Parameter {
            name: "matrix",
            reason: "provide --matrix-a and --matrix-b, or --random N".into(),
        });
    };
    let read = |p: &Path| -> Result<String, Error> { Ok(fs::read_to_string(p)?) };
    let a = matrix_from_json(&read(pa)?)?;
    let b = matrix_from_json(&read(pb)?)?;
    HermitianPair::new(a, b)
}

fn effective_config(overrides: &ConfigOverrides) -> Result<RunConfig, Error> {
    let mut cfg = if let Some(path) = &overrides.config {
        RunConfig::from_json_file(path.to_str().unwrap_or_default())?
    } else if let Ok(path) = std::env::var("BMV_CONFIG") {
        RunConfig::from_json_file(&path)?
    } else {
        RunConfig::default()
    };
    if overrides.eps_split.is_some() {
        cfg.eps_split = overrides.eps_split;
    }
    if let Some(v) = overrides.nodes {
        cfg.n_nodes_initial = v;
    }
    if let Some(v) = overrides.max_nodes {
        cfg.n_nodes_max = v;
    }
    if overrides.radius.is_some() {
        cfg.radius = overrides.radius;
    }
    if let Some(v) = overrides.points_per_interval {
        cfg.points_per_interval = v;
    }
    if let Some(v) = overrides.tau_quad {
        cfg.tau_quad = v;
    }
    if let Some(v) = overrides.tau_closure {
        cfg.tau_closure = v;
    }
    if let Some(v) = overrides.tau_im {
        cfg.tau_im = v;
    }
    if let Some(v) = overrides.tau_laplace {
        cfg.tau_laplace = v;
    }
    if let Some(v) = overrides.t_min {
        cfg.t_grid.t_min = v;
    }
    if let Some(v) = overrides.t_max {
        cfg.t_grid.t_max = v;
    }
    if let Some(v) = overrides.t_count {
        cfg.t_grid.count = v;
    }
    if let Some(v) = overrides.t_spacing {
        cfg.t_grid.spacing = match v {
            SpacingArg::Log => Spacing::Log,
            SpacingArg::Linear => Spacing::Linear,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_eps(cfg: &RunConfig, pair: &HermitianPair) -> Result<f64, Error> {
    match cfg.eps_split {
        Some(e) => Ok(e),
        None => default_eps_split(pair.b()),
    }
}

fn cmd_density(args: &DensityArgs) -> Result<(), Error> {
    let cfg = effective_config(&args.overrides)?;
    let pair = load_pair(&args.input)?;
    let eps = resolve_eps(&cfg, &pair)?;
    let red = reduce_pair(&pair, eps)?;
    let asm = assemble_measure(&red, &cfg)?;
    let coords: Coords = args.coords.into();

    fs::create_dir_all(&args.out_dir)?;
    if args.json {
        let path = args.out_dir.join("measure.json");
        let value = export::measure_json(&asm.measure, coords, &cfg);
        fs::write(&path, serde_json::to_string_pretty(&value)?)?;
        println!("wrote {}", path.display());
    } else {
        let atoms_path = args.out_dir.join("atoms.csv");
        let density_path = args.out_dir.join("density.csv");
        let mut buf = Vec::new();
        export::write_atoms_csv(&mut buf, &asm.measure, coords, &cfg)?;
        fs::write(&atoms_path, &buf)?;
        buf.clear();
        export::write_density_csv(&mut buf, &asm.measure, coords, &cfg)?;
        fs::write(&density_path, &buf)?;
        println!("wrote {} and {}", atoms_path.display(), density_path.display());
    }
    if let Some(path) = &args.dump_contour {
        let mut buf = Vec::new();
        asm.contour.write_csv(&mut buf)?;
        fs::write(path, &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_atoms(args: &AtomsArgs) -> Result<(), Error> {
    let cfg = effective_config(&args.overrides)?;
    let pair = load_pair(&args.input)?;
    let eps = resolve_eps(&cfg, &pair)?;
    let red = reduce_pair(&pair, eps)?;
    let ats = atoms(&red)?;
    let coords: Coords = args.coords.into();
    let off = match coords {
        Coords::Reduced => 0.0,
        Coords::Original => red.shift(),
    };
    fs::create_dir_all(&args.out_dir)?;
    if args.json {
        let path = args.out_dir.join("atoms.json");
        let value = serde_json::json!({
            "config": &cfg,
            "coords": match coords { Coords::Reduced => "reduced", Coords::Original => "original" },
            "atoms": ats.iter().map(|&(s, w)| serde_json::json!({"s": s - off, "weight": w})).collect::<Vec<_>>(),
            "shift": red.shift(),
        });
        fs::write(&path, serde_json::to_string_pretty(&value)?)?;
        println!("wrote {}", path.display());
    } else {
        let path = args.out_dir.join("atoms.csv");
        let mut buf = Vec::new();
        use std::io::Write;
        writeln!(&mut buf, "# config={}", serde_json::to_string(&cfg)?)?;
        writeln!(&mut buf, "s,weight")?;
        for (s, w) in &ats {
            writeln!(&mut buf, "{},{}", export::fmt_f64(s - off), export::fmt_f64(*w))?;
        }
        fs::write(&path, &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Error> {
    let cfg = effective_config(&args.overrides)?;
    let pair = load_pair(&args.input)?;
    let report = verify(&pair, &cfg)?;
    println!("{}", report.summary());
    if let Some(path) = &args.out {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let value = export::report_json(&report, &cfg);
        fs::write(path, serde_json::to_string_pretty(&value)?)?;
        println!("wrote {}", path.display());
    }
    Ok(report.all_pass())
}

fn cmd_poly(args: &PolyArgs) -> Result<bool, Error> {
    let pair = load_pair(&args.input)?;
    let coeffs = trace_poly_coeffs(&pair, args.p)?;
    let line: Vec<String> = coeffs.iter().map(|c| format!("{c:.12e}")).collect();
    println!("{}", line.join(" "));
    let scale = coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    Ok(coeffs.iter().all(|&c| c >= -1e-10 * scale))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Density(args) => match cmd_density(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e.exit_code(), &e.to_string()),
        },
        Command::Atoms(args) => match cmd_atoms(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e.exit_code(), &e.to_string()),
        },
        Command::Verify(args) => match cmd_verify(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("verification checks failed");
                ExitCode::from(4)
            }
            Err(e) => fail(e.exit_code(), &e.to_string()),
        },
        Command::Poly(args) => match cmd_poly(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("negative coefficient beyond tolerance");
                ExitCode::from(4)
            }
            Err(e) => fail(e.exit_code(), &e.to_string()),
        },
    }
}
