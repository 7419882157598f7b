use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orlx::config::{parse_configs, BilinearRegime, ExperimentConfig, Suite};
use orlx::report::InequalityReport;
use orlx::{io, suites, Error, Result};
use orlx_core::sparse::{default_stopping_parameter, sparse_check, stopping_sparse, SparseError};
use orlx_core::weights::{ainfty_condition, characteristic, WeightClass};
use orlx_core::{Cell, Domain, Grid, GridFunction, Shift, YoungFunction};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "orlx", version, about = "Orlicz bumps, weights and sparse bounds on dyadic grids")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a Young function: values, inverse, conjugate, B_p verdicts.
    Young(YoungArgs),
    /// Compute a weight characteristic from a sample file.
    Weight(WeightArgs),
    /// Build a stopping-time sparse family or check a cell list for sparsity.
    Sparse(SparseArgs),
    /// Run verification suites; exit 0 iff every suite passes.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Power,
    LogBump,
    Oscillatory,
}

#[derive(Args)]
struct YoungSpec {
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Exponent of `power` and `log-bump`.
    #[arg(long)]
    p: Option<f64>,
    /// Log exponent excess of `log-bump`.
    #[arg(long)]
    delta: Option<f64>,
    /// Base exponent of `oscillatory`.
    #[arg(long)]
    s: Option<f64>,
    /// Amplitude of `oscillatory`.
    #[arg(long)]
    a: Option<f64>,
}

impl YoungSpec {
    fn build(&self) -> Result<YoungFunction> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Format(format!("--{name} is required")));
        let variant = self.variant.ok_or_else(|| Error::Format("--variant is required".into()))?;
        Ok(match variant {
            VariantArg::Power => YoungFunction::power(need(self.p, "p")?)?,
            VariantArg::LogBump => YoungFunction::log_bump(need(self.p, "p")?, need(self.delta, "delta")?)?,
            VariantArg::Oscillatory => YoungFunction::oscillatory(need(self.s, "s")?, need(self.a, "a")?)?,
        })
    }
}

#[derive(Args)]
struct YoungArgs {
    #[command(flatten)]
    spec: YoungSpec,
    /// Apply `t -> Φ(t^{1/r})` first.
    #[arg(long)]
    rescale: Option<f64>,
    /// Report the conjugate function as well.
    #[arg(long)]
    conjugate: bool,
    /// Exponents for the B_p test.
    #[arg(long, value_delimiter = ',')]
    bp: Vec<f64>,
    /// Points of the value table.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 1.0, 10.0, 100.0])]
    at: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ClassArg {
    Ap,
    A1,
    Rh,
    Rhinf,
    Rhpsi,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GridsArg {
    /// All one-third shifts.
    Family,
    /// Only the grid named by the sidecar.
    Single,
}

#[derive(Args)]
struct WeightArgs {
    /// Sample file (relative paths resolve against ORLX_DATA_DIR).
    file: PathBuf,
    #[arg(long, value_enum, required_unless_present = "alpha")]
    class: Option<ClassArg>,
    /// Exponent of `ap`.
    #[arg(long, required_if_eq("class", "ap"))]
    p: Option<f64>,
    /// Exponent of `rh`.
    #[arg(long, required_if_eq("class", "rh"))]
    s: Option<f64>,
    /// Bump of `rhpsi`: JSON descriptor or `power:P`, `log_bump:P,DELTA`,
    /// `oscillatory:S,A`.
    #[arg(long, required_if_eq("class", "rhpsi"))]
    psi: Option<String>,
    /// Report the A_∞ condition at this `α` instead of a characteristic.
    #[arg(long, conflicts_with = "class")]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "family")]
    grids: GridsArg,
}

#[derive(Args)]
struct SparseArgs {
    /// First function of the stopping-time construction.
    #[arg(long, requires = "g")]
    f: Option<PathBuf>,
    /// Second function of the stopping-time construction.
    #[arg(long)]
    g: Option<PathBuf>,
    /// Stopping parameter (defaults to the computed value).
    #[arg(long)]
    a: Option<f64>,
    /// JSON list of cells `{level, index, piece?}` to check for sparsity.
    #[arg(long, conflicts_with_all = ["f", "g"], required_unless_present = "f")]
    cells: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    grid_depth: u32,
    /// Grid shift of the cell list, in thirds per axis.
    #[arg(long, value_delimiter = ',', default_values_t = [0u8, 0])]
    shift: Vec<u8>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Config file: one entry or an array; omitted fields take suite defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only run these suites.
    #[arg(long, value_parser = parse_suite)]
    suite: Vec<Suite>,
    /// Overrides every config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    grid_depth: Option<u32>,
    /// Bilinear regime when no config file is given (default: both).
    #[arg(long, value_parser = parse_regime)]
    regime: Option<BilinearRegime>,
    /// Directory for `<suite>.json` and `<suite>.csv` reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.replace('-', "_").parse().map_err(|e: Error| e.to_string())
}

fn parse_regime(s: &str) -> std::result::Result<BilinearRegime, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown regime `{s}` (banach, quasi)"))
}

/// A Young function from a JSON descriptor or a `name:params` shorthand.
fn parse_young(s: &str) -> Result<YoungFunction> {
    let s = s.trim();
    if s.starts_with('{') {
        return Ok(serde_json::from_str(s)?);
    }
    let (name, params) = s.split_once(':').ok_or_else(|| Error::Format(format!("bad Young descriptor `{s}`")))?;
    let nums: Vec<f64> = params
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Format(format!("bad number in `{s}`"))))
        .collect::<Result<_>>()?;
    Ok(match (name.replace('-', "_").as_str(), nums.as_slice()) {
        ("power", [p]) => YoungFunction::power(*p)?,
        ("log_bump", [p, d]) => YoungFunction::log_bump(*p, *d)?,
        ("oscillatory", [s, a]) => YoungFunction::oscillatory(*s, *a)?,
        _ => return Err(Error::Format(format!("bad Young descriptor `{s}`"))),
    })
}

fn print(v: &impl serde::Serialize) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?)
}

fn emit(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        // A closed pipe (e.g. `| head`) is not an error of ours.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| Error::io(Path::new("<stdout>"), e)),
    }
}

fn cmd_young(a: &YoungArgs) -> Result<ExitCode> {
    let mut phi = a.spec.build()?;
    if let Some(r) = a.rescale {
        phi = phi.rescale_outer(r)?;
    }
    phi.check_young()?;
    let table = |f: &YoungFunction| -> Result<Vec<Value>> {
        a.at.iter()
            .map(|&t| Ok(json!({"t": t, "value": f.eval(t), "inverse": f.inverse(t)?})))
            .collect()
    };
    let mut out = json!({"function": phi, "table": table(&phi)?});
    if a.conjugate {
        let bar = phi.conjugate()?;
        out["conjugate"] = json!({
            "function": bar,
            "power_exponent": bar.power_exponent(),
            "table": table(&bar)?,
        });
    }
    if !a.bp.is_empty() {
        let bp: Vec<Value> = a.bp.iter().map(|&p| Ok(json!({"p": p, "report": phi.bp_test(p)?}))).collect::<Result<_>>()?;
        out["bp"] = Value::Array(bp);
    }
    print(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_weight(a: &WeightArgs) -> Result<ExitCode> {
    let (w, side) = io::load(&io::resolve(&a.file))?;
    let d = side.domain()?;
    let grids = match a.grids {
        GridsArg::Family => Grid::family(d),
        GridsArg::Single => vec![Grid::new(d, side.sigma)],
    };
    if let Some(alpha) = a.alpha {
        print(&ainfty_condition(&w, alpha, &grids)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let class = match a.class.expect("clap requires --class or --alpha") {
        ClassArg::Ap => WeightClass::Ap { p: a.p.expect("required by clap") },
        ClassArg::A1 => WeightClass::A1,
        ClassArg::Rh => WeightClass::Rh { s: a.s.expect("required by clap") },
        ClassArg::Rhinf => WeightClass::RhInf,
        ClassArg::Rhpsi => WeightClass::RhPsi {
            psi: parse_young(a.psi.as_deref().expect("required by clap"))?,
        },
    };
    print(&characteristic(&w, &class, &grids)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct CellSpec {
    level: u32,
    index: [u32; 2],
    #[serde(default)]
    piece: [u8; 2],
}

fn load_pair(f: &Path, g: &Path) -> Result<(GridFunction, GridFunction)> {
    let (f, _) = io::load(&io::resolve(f))?;
    let (g, _) = io::load(&io::resolve(g))?;
    if f.domain() != g.domain() {
        return Err(Error::Format("f and g live on different grids".into()));
    }
    Ok((f, g))
}

fn cmd_sparse(a: &SparseArgs) -> Result<ExitCode> {
    if let (Some(f), Some(g)) = (&a.f, &a.g) {
        let (f, g) = load_pair(f, g)?;
        let param = match a.a {
            Some(x) => x,
            None => default_stopping_parameter(&f, &g, &Grid::family(f.domain()))?,
        };
        print(&stopping_sparse(&f, &g, param)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let path = io::resolve(a.cells.as_deref().expect("clap requires --cells or --f"));
    let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let specs: Vec<CellSpec> = serde_json::from_slice(&raw)?;
    let d = Domain::new(a.dim, a.grid_depth)?;
    let shift = match a.shift.as_slice() {
        [x] => Shift::new([*x, 0])?,
        [x, y] => Shift::new([*x, *y])?,
        _ => return Err(Error::Format("--shift takes one or two values".into())),
    };
    let grid = Grid::new(d, shift);
    let mut cells: Vec<Cell> = Vec::with_capacity(specs.len());
    for s in &specs {
        if s.level > d.depth() {
            return Err(Error::Format(format!("level {} is below the finest level", s.level)));
        }
        let found = grid
            .cells(s.level)
            .into_iter()
            .find(|c| c.index == s.index && c.piece == s.piece)
            .ok_or_else(|| Error::Format(format!("no cell at level {} index {:?}", s.level, s.index)))?;
        cells.push(found);
    }
    match sparse_check(&grid, &cells) {
        Ok(fam) => {
            print(&json!({"sparse": true, "family": fam}))?;
            Ok(ExitCode::SUCCESS)
        }
        Err(SparseError::Violation { cell, covered }) => {
            print(&json!({"sparse": false, "violation": {"cell": cell, "covered": covered}}))?;
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn report_name(r: &InequalityReport) -> String {
    match r.config.regime {
        Some(BilinearRegime::Banach) => format!("{}_banach", r.config.suite),
        Some(BilinearRegime::Quasi) => format!("{}_quasi", r.config.suite),
        None => r.config.suite.to_string(),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode> {
    let mut configs = match &a.config {
        Some(p) => {
            let p = io::resolve(p);
            parse_configs(&fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?)?
        }
        None => match a.regime {
            Some(r) => Suite::ALL
                .iter()
                .map(|&s| ExperimentConfig::reference(s, (s == Suite::Bilinear).then_some(r)))
                .collect(),
            None => ExperimentConfig::all_reference(),
        },
    };
    if !a.suite.is_empty() {
        configs.retain(|c| a.suite.contains(&c.suite));
    }
    if configs.is_empty() {
        return Err(Error::Format("no suite selected".into()));
    }
    for c in &mut configs {
        if let Some(s) = a.seed {
            c.seed = s;
        }
        if let Some(t) = a.trials {
            c.trials = t;
        }
        if let Some(n) = a.dim {
            c.dim = n;
        }
        if let Some(l) = a.grid_depth {
            c.depth = l;
        }
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut reports = Vec::new();
    for c in &configs {
        let start = std::time::Instant::now();
        let r = suites::run(c)?;
        eprintln!("{} [{:.1}s]", r.summary(), start.elapsed().as_secs_f64());
        if let Some(dir) = &a.out {
            let base = dir.join(report_name(&r));
            let json_path = base.with_extension("json");
            fs::write(&json_path, r.to_json()?).map_err(|e| Error::io(&json_path, e))?;
            let csv_path = base.with_extension("csv");
            let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
            r.write_csv(file, true)?;
        }
        reports.push(r);
    }
    let ok = reports.iter().all(InequalityReport::ok);
    if reports.len() == 1 {
        emit(&reports[0].to_json()?)?;
    } else {
        print(&reports)?;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Young(a) => cmd_young(a),
        Cmd::Weight(a) => cmd_weight(a),
        Cmd::Sparse(a) => cmd_sparse(a),
        Cmd::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build();
    let outcome = match pool {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(Error::Format(e.to_string())),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
