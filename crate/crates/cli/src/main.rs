use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use toric_exceptional::bondal::bondal_criterion;
use toric_exceptional::cohomology::{CohomologyEngine, CohomologyOptions};
use toric_exceptional::collection::{box_product, check_strongly_exceptional, find_strong_order, Collection, OrderSearch};
use toric_exceptional::divisor::TorusDivisor;
use toric_exceptional::fan::{validate, Fan};
use toric_exceptional::formats;
use toric_exceptional::frobenius::{stabilization_check, thomsen_split, verify_splitting_invariants};
use toric_exceptional::variety::{build_named, VarietySpec};
use toric_exceptional::Error;

#[derive(Parser, Debug)]
#[command(name = "toricx", version, about = "Frobenius splittings and exceptional collections on smooth toric varieties")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    group: Group,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Build, inspect and export fans.
    #[command(subcommand)]
    Variety(VarietyCmd),
    /// Thomsen splitting of the Frobenius push-forward.
    #[command(subcommand)]
    Frobenius(FrobeniusCmd),
    /// Wall relations and Bondal's criterion.
    #[command(subcommand)]
    Bondal(BondalCmd),
    /// Line-bundle cohomology.
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    /// Exceptional collections of line bundles.
    #[command(subcommand)]
    Collection(CollectionCmd),
}

#[derive(Args, Debug, Clone)]
struct FanSource {
    /// Variety descriptor: P:n, dP:r, Xd:d, F:a, or a product A*B.
    #[arg(long, conflicts_with = "fan")]
    variety: Option<String>,
    /// Fan JSON file.
    #[arg(long)]
    fan: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct NamedSource {
    /// Variety descriptor (same as --variety).
    #[arg(conflicts_with_all = ["variety", "fan"])]
    descriptor: Option<String>,
    #[command(flatten)]
    source: FanSource,
}

#[derive(Args, Debug, Clone)]
struct SplitArgs {
    #[command(flatten)]
    source: FanSource,
    /// Divisor JSON file; the trivial bundle if omitted.
    #[arg(long)]
    divisor: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    p: u64,
    #[arg(long = "base-cone", default_value_t = 0)]
    base_cone: usize,
}

#[derive(Args, Debug, Clone)]
struct BundleSource {
    /// Collection JSON file.
    #[arg(long, conflicts_with = "frobenius")]
    collection: Option<PathBuf>,
    /// Use the Frobenius summands of the trivial bundle instead.
    #[arg(long)]
    frobenius: bool,
    #[arg(long, default_value_t = 5)]
    p: u64,
}

#[derive(Subcommand, Debug)]
enum VarietyCmd {
    /// Summary of a fan.
    Info(NamedSource),
    /// Fan JSON of a named variety.
    Export(NamedSource),
}

#[derive(Subcommand, Debug)]
enum FrobeniusCmd {
    Split(SplitArgs),
    /// Multiplicity, first Chern class and base-cone checks.
    Verify(SplitArgs),
}

#[derive(Subcommand, Debug)]
enum BondalCmd {
    Check(FanSource),
}

#[derive(Subcommand, Debug)]
enum CohomologyCmd {
    Compute {
        #[command(flatten)]
        source: FanSource,
        #[arg(long)]
        divisor: PathBuf,
        /// Fixed search box `[-B, B]^n` instead of the adaptive search.
        #[arg(long = "box")]
        box_radius: Option<i64>,
        /// List every contributing degree.
        #[arg(long)]
        degrees: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CollectionCmd {
    /// Check strong exceptionality in the given order.
    Verify {
        #[command(flatten)]
        source: FanSource,
        #[command(flatten)]
        bundles: BundleSource,
    },
    /// Search for a strongly exceptional order.
    Order {
        #[command(flatten)]
        source: FanSource,
        #[command(flatten)]
        bundles: BundleSource,
    },
    /// External tensor products of two strongly exceptional collections.
    Product {
        #[command(flatten)]
        source: FanSource,
        #[command(flatten)]
        bundles: BundleSource,
        #[arg(long = "second-variety", conflicts_with = "second_fan")]
        second_variety: Option<String>,
        #[arg(long = "second-fan")]
        second_fan: Option<PathBuf>,
        #[arg(long = "second-collection", conflicts_with = "second_frobenius")]
        second_collection: Option<PathBuf>,
        #[arg(long = "second-frobenius")]
        second_frobenius: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoxNotConverged { .. }
            | Error::FactorNotStronglyExceptional { .. }
            | Error::NotExceptionalMember { .. }
            | Error::InconsistentGluing { .. }
            | Error::BasisDegenerate(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// What a command prints: a JSON payload, a table rendering and whether the
/// verification it performs succeeded.
struct Output {
    json: serde_json::Value,
    table: String,
    ok: bool,
}

impl Output {
    fn new<T: Serialize>(payload: &T, table: String, ok: bool) -> Result<Self, Failure> {
        let json = serde_json::to_value(payload).map_err(|e| input_error(e.to_string()))?;
        Ok(Output { json, table, ok })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_fan(variety: Option<&str>, fan: Option<&Path>) -> Result<(Fan, String), Failure> {
    match (variety, fan) {
        (Some(v), None) => {
            let spec: VarietySpec = v.parse()?;
            Ok((build_named(&spec)?, spec.to_string()))
        }
        (None, Some(path)) => {
            let fan = formats::parse_fan(&read(path)?)?;
            let report = validate(&fan);
            if !report.is_ok() {
                return Err(input_error(format!(
                    "{}: not a smooth complete fan: {}",
                    path.display(),
                    report.messages.join("; ")
                )));
            }
            Ok((fan, path.display().to_string()))
        }
        _ => Err(input_error("exactly one of --variety or --fan is required")),
    }
}

fn source_fan(s: &FanSource) -> Result<(Fan, String), Failure> {
    load_fan(s.variety.as_deref(), s.fan.as_deref())
}

fn named_fan(s: &NamedSource) -> Result<(Fan, String), Failure> {
    load_fan(s.descriptor.as_deref().or(s.source.variety.as_deref()), s.source.fan.as_deref())
}

fn load_divisor(fan: &Fan, path: Option<&Path>) -> Result<TorusDivisor, Failure> {
    let d = match path {
        Some(p) => formats::parse_divisor(&read(p)?)?,
        None => TorusDivisor::zero(fan.ray_count()),
    };
    if d.len() != fan.ray_count() {
        return Err(input_error(format!(
            "divisor has {} coefficients but the fan has {} rays",
            d.len(),
            fan.ray_count()
        )));
    }
    Ok(d)
}

fn load_bundles(fan: &Fan, collection: Option<&Path>, frobenius: bool, p: u64) -> Result<Vec<TorusDivisor>, Failure> {
    match (collection, frobenius) {
        (Some(path), false) => {
            let bundles = formats::parse_collection(&read(path)?)?;
            Collection::new(fan, bundles.clone())?;
            Ok(bundles)
        }
        (None, true) => Ok(thomsen_split(fan, &TorusDivisor::zero(fan.ray_count()), p, 0)?.representatives()),
        _ => Err(input_error("exactly one of --collection or --frobenius is required")),
    }
}

fn vec_str<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn variety(cmd: &VarietyCmd) -> Result<Output, Failure> {
    match cmd {
        VarietyCmd::Info(src) => {
            let (fan, name) = named_fan(src)?;
            let info = formats::variety_info(&fan, &name)?;
            let table = format!(
                "variety      {}\ndim          {}\nrays         {}\nmax cones    {}\npicard rank  {}\nsmooth       {}\ncomplete     {}\nfano         {}\neuler char   {}\n",
                info.variety,
                info.dim,
                info.rays,
                info.max_cones,
                info.picard_rank,
                info.smooth,
                info.complete,
                info.fano.map_or("n/a".to_string(), |f| f.to_string()),
                info.euler_characteristic,
            );
            Output::new(&info, table, true)
        }
        VarietyCmd::Export(src) => {
            let (fan, _) = named_fan(src)?;
            let file = formats::fan_file(&fan)?;
            let mut table = format!("dim {}\n", file.dim);
            for (j, r) in file.rays.iter().enumerate() {
                let _ = writeln!(table, "ray {j:>3}  {}", vec_str(r));
            }
            for (i, c) in file.max_cones.iter().enumerate() {
                let _ = writeln!(table, "cone {i:>3}  {}", vec_str(c));
            }
            Output::new(&file, table, true)
        }
    }
}

fn frobenius(cmd: &FrobeniusCmd) -> Result<Output, Failure> {
    let (FrobeniusCmd::Split(args) | FrobeniusCmd::Verify(args)) = cmd;
    let (fan, _) = source_fan(&args.source)?;
    let d = load_divisor(&fan, args.divisor.as_deref())?;
    let r = thomsen_split(&fan, &d, args.p, args.base_cone)?;
    if args.p >= 2 && !stabilization_check(&fan, &d, &[args.p, args.p + 2])? {
        eprintln!(
            "warning: the class sets for p = {} and p = {} differ; p may be too small",
            args.p,
            args.p + 2
        );
    }
    match cmd {
        FrobeniusCmd::Split(_) => {
            let payload = formats::splitting_json(&r)?;
            let mut table = format!("p = {}, n = {}, {} classes\n", r.p, r.n, r.classes.len());
            for c in &payload.classes {
                let _ = writeln!(
                    table,
                    "x{:<6} class {}  representative {}",
                    c.multiplicity,
                    vec_str(&c.class),
                    vec_str(&c.representative)
                );
            }
            Output::new(&payload, table, true)
        }
        FrobeniusCmd::Verify(_) => {
            let report = verify_splitting_invariants(&fan, &r)?;
            let stable = args.p >= 2 && stabilization_check(&fan, &d, &[args.p, args.p + 2])?;
            let payload = formats::splitting_report_json(&r, &report, stable);
            let table = format!(
                "pass                 {}\nclasses              {}\nmultiplicities       {} / {}\nc1 identity          {}\nbase cone {:<10} {}\nstable at p+2        {}\n",
                payload.pass,
                payload.classes,
                payload.multiplicity_sum,
                payload.expected_sum,
                payload.c1_identity.map_or("n/a".into(), |b| b.to_string()),
                payload.second_base_cone.map_or("-".into(), |b| b.to_string()),
                payload.base_cone_agrees.map_or("n/a".into(), |b| b.to_string()),
                stable,
            );
            Output::new(&payload, table, payload.pass)
        }
    }
}

fn bondal(cmd: &BondalCmd) -> Result<Output, Failure> {
    let BondalCmd::Check(src) = cmd;
    let (fan, _) = source_fan(src)?;
    let verdict = bondal_criterion(&fan)?;
    let payload = formats::bondal_json(&verdict)?;
    let mut table = format!("pass {}  walls {}\n", payload.pass, payload.walls);
    for v in &payload.violations {
        let _ = writeln!(
            table,
            "violation  wall {}  u+ {}  u- {}  coeffs {}",
            vec_str(&v.rays),
            v.u_plus,
            v.u_minus,
            vec_str(&v.coeffs)
        );
    }
    Output::new(&payload, table, payload.pass)
}

fn cohomology(cmd: &CohomologyCmd) -> Result<Output, Failure> {
    let CohomologyCmd::Compute {
        source,
        divisor,
        box_radius,
        degrees,
    } = cmd;
    let (fan, _) = source_fan(source)?;
    let d = load_divisor(&fan, Some(divisor))?;
    let opts = CohomologyOptions {
        box_radius: *box_radius,
        record_degrees: *degrees,
        ..CohomologyOptions::default()
    };
    let t = CohomologyEngine::new(&fan)?.compute(&d, &opts)?;
    let payload = formats::cohomology_json(&t);
    let mut table = String::new();
    for (i, h) in t.dims.iter().enumerate() {
        let _ = writeln!(table, "h^{i} = {h}");
    }
    let _ = writeln!(table, "box = {}", t.box_radius);
    for c in &payload.contributions {
        let _ = writeln!(table, "m = {}  {}", vec_str(&c.m), vec_str(&c.dims));
    }
    Output::new(&payload, table, true)
}

fn ordered(fan: &Fan, bundles: Vec<TorusDivisor>) -> Result<Result<Collection, OrderSearch>, Failure> {
    match find_strong_order(fan, &bundles)? {
        OrderSearch::Found(order) => Ok(Ok(Collection::new(fan, bundles)?.reordered(&order))),
        other => Ok(Err(other)),
    }
}

fn order_failure_json(o: &OrderSearch) -> serde_json::Value {
    match o {
        OrderSearch::BothBlocked { j, k } => json!({ "found": false, "blocked_pair": [j, k] }),
        OrderSearch::Cycle(c) => json!({ "found": false, "cycle": c }),
        OrderSearch::Found(_) => unreachable!("only failures are rendered here"),
    }
}

fn collection(cmd: &CollectionCmd) -> Result<Output, Failure> {
    match cmd {
        CollectionCmd::Verify { source, bundles } => {
            let (fan, _) = source_fan(source)?;
            let b = load_bundles(&fan, bundles.collection.as_deref(), bundles.frobenius, bundles.p)?;
            let c = Collection::new(&fan, b)?;
            let verdict = check_strongly_exceptional(&CohomologyEngine::new(&fan)?, &c)?;
            let payload = formats::exceptional_json(&verdict);
            let mut table = format!(
                "pass {}  bundles {}  tables {}\n",
                payload.pass, payload.bundles, payload.tables
            );
            for v in &payload.violations {
                let _ = writeln!(table, "{}  {} -> {}  h = {}", v.kind, v.from, v.to, vec_str(&v.dims));
            }
            Output::new(&payload, table, payload.pass)
        }
        CollectionCmd::Order { source, bundles } => {
            let (fan, _) = source_fan(source)?;
            let b = load_bundles(&fan, bundles.collection.as_deref(), bundles.frobenius, bundles.p)?;
            match ordered(&fan, b)? {
                Ok(c) => {
                    let file = formats::collection_file(c.bundles())?;
                    let mut table = String::new();
                    for (i, d) in file.bundles.iter().enumerate() {
                        let _ = writeln!(table, "{i:>3}  {}", vec_str(d));
                    }
                    Output::new(&file, table, true)
                }
                Err(o) => {
                    let payload = order_failure_json(&o);
                    Output::new(&payload, format!("no strongly exceptional order: {o:?}\n"), false)
                }
            }
        }
        CollectionCmd::Product {
            source,
            bundles,
            second_variety,
            second_fan,
            second_collection,
            second_frobenius,
        } => {
            let (f1, _) = source_fan(source)?;
            let (f2, _) = load_fan(second_variety.as_deref(), second_fan.as_deref())?;
            let b1 = load_bundles(&f1, bundles.collection.as_deref(), bundles.frobenius, bundles.p)?;
            let b2 = load_bundles(&f2, second_collection.as_deref(), *second_frobenius, bundles.p)?;
            let c1 = if bundles.frobenius {
                ordered(&f1, b1)?.map_err(|o| Failure::from(Error::FactorNotStronglyExceptional { factor: 1 }).note(&o))?
            } else {
                Collection::new(&f1, b1)?
            };
            let c2 = if *second_frobenius {
                ordered(&f2, b2)?.map_err(|o| Failure::from(Error::FactorNotStronglyExceptional { factor: 2 }).note(&o))?
            } else {
                Collection::new(&f2, b2)?
            };
            let (fan, c) = box_product(&f1, &c1, &f2, &c2)?;
            let verdict = check_strongly_exceptional(&CohomologyEngine::new(&fan)?, &c)?;
            let payload = json!({
                "fan": formats::fan_file(&fan)?,
                "bundles": formats::collection_file(c.bundles())?.bundles,
                "pass": verdict.pass,
            });
            let mut table = format!("pass {}  bundles {}\n", verdict.pass, c.len());
            for (i, d) in c.bundles().iter().enumerate() {
                let _ = writeln!(table, "{i:>3}  {d}");
            }
            Output::new(&payload, table, verdict.pass)
        }
    }
}

impl Failure {
    fn note(mut self, o: &OrderSearch) -> Self {
        self.message = format!("{} ({o:?})", self.message);
        self
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.group {
        Group::Variety(c) => variety(c),
        Group::Frobenius(c) => frobenius(c),
        Group::Bondal(c) => bondal(c),
        Group::Cohomology(c) => cohomology(c),
        Group::Collection(c) => collection(c),
    }
}

fn command_name(g: &Group) -> &'static str {
    match g {
        Group::Variety(VarietyCmd::Info(_)) => "variety info",
        Group::Variety(VarietyCmd::Export(_)) => "variety export",
        Group::Frobenius(FrobeniusCmd::Split(_)) => "frobenius split",
        Group::Frobenius(FrobeniusCmd::Verify(_)) => "frobenius verify",
        Group::Bondal(_) => "bondal check",
        Group::Cohomology(_) => "cohomology compute",
        Group::Collection(CollectionCmd::Verify { .. }) => "collection verify",
        Group::Collection(CollectionCmd::Order { .. }) => "collection order",
        Group::Collection(CollectionCmd::Product { .. }) => "collection product",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let code = match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("JSON values always serialize")
                ),
                Format::Table => print!("{}", out.table),
            }
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    eprintln!(
        "{}",
        json!({
            "command": command_name(&cli.group),
            "status": code,
            "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        })
    );
    ExitCode::from(code)
}
