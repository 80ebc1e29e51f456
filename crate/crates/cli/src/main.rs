use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use hecke_core::atkin_lehner::{trace_tn_wl, ALQuery};
use hecke_core::characters::{enumerate_characters, DirichletCharacter};
use hecke_core::class_numbers::{h0, hurwitz_h};
use hecke_core::cyclotomic::CyclotomicNumber;
use hecke_core::error::Error;
use hecke_core::gamma0::{trace_s_with, TraceQuery};
use hecke_core::gamma1::{trace_gamma1_ms, trace_gamma1_s, Gamma1Query};
use hecke_core::level4::{trace_form, GroupSpec, ParityFilter};
use hecke_core::oracles::{consistency_suite, run_suite, Bounds, Mutation, Suite};

mod record;
mod table;

use record::{approximate, OutputRecord};
use table::{Cache, Grid, TableKind};

/// Errors with their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid arguments: exit 2.
    Usage(String),
    /// A trace failed its integrality check: exit 3.
    Integrality(String),
    /// A self-check reported failures: exit 1.
    Check(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonIntegral { .. } => Failure::Integrality(e.to_string()),
            Error::Precondition(_) | Error::Domain(_) | Error::ConductorMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Integrality(_) => 3,
            Failure::Check(_) | Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Integrality(m) | Failure::Check(m) | Failure::Other(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "hecke", version, about = "Exact traces of Hecke operators from class-number formulas")]
struct Cli {
    /// Print plain text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Also render values as decimals with this many digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    approx: Option<usize>,
    /// Omit the wall-time field.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// tr(T_n) on S_k(Gamma0(N), chi).
    Trace(TraceArgs),
    /// tr(T_n o W_l) on S_k(Gamma0(N)).
    TraceAl(TraceAlArgs),
    /// tr(T_n) on S_k(Gamma1(N)) or M_k + S_k.
    TraceGamma1(TraceGamma1Args),
    /// The q-series sum tr(T_n) q^n.
    TraceForm(TraceFormArgs),
    /// Hurwitz class number H(D) or h0(D).
    Classnum(ClassnumArgs),
    /// Dirichlet characters.
    Char {
        #[command(subcommand)]
        command: CharCommand,
    },
    /// Run the cross-formula consistency suites.
    Selfcheck(SelfcheckArgs),
    /// Evaluate a grid of traces, with caching.
    Table(TableArgs),
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    level: u64,
    #[arg(long)]
    weight: u32,
    /// Index into `char list --level N`, or `trivial`.
    #[arg(long = "char", default_value = "trivial")]
    character: String,
    #[arg(long)]
    index: u64,
    /// Include the elliptic, hyperbolic and weight-2 terms.
    #[arg(long)]
    breakdown: bool,
    /// Evaluate with a seeded bug (diagnostics only).
    #[arg(long, value_enum, default_value = "none", hide = true)]
    mutation: MutationArg,
}

#[derive(Args)]
struct TraceAlArgs {
    #[arg(long)]
    level: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    weight: u32,
    #[arg(long)]
    index: u64,
    #[arg(long)]
    breakdown: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    #[value(name = "S")]
    S,
    #[value(name = "MS")]
    Ms,
}

#[derive(Args)]
struct TraceGamma1Args {
    #[arg(long)]
    level: u64,
    #[arg(long)]
    weight: u32,
    #[arg(long)]
    index: u64,
    #[arg(long, value_enum, default_value = "S")]
    space: Space,
    #[arg(long)]
    breakdown: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Gamma0,
    Gamma1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Parity {
    All,
    Odd,
    Even,
}

#[derive(Args)]
struct TraceFormArgs {
    #[arg(long, value_enum, default_value = "gamma0")]
    group: Group,
    #[arg(long)]
    level: u64,
    #[arg(long)]
    weight: u32,
    /// Character for gamma0, as for `trace`.
    #[arg(long = "char", default_value = "trivial")]
    character: String,
    #[arg(long)]
    precision: usize,
    #[arg(long, value_enum, default_value = "all")]
    parity: Parity,
}

#[derive(Args)]
struct ClassnumArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    /// Print h0(-D) = 2h/w instead of H(D).
    #[arg(long)]
    h0: bool,
}

#[derive(Subcommand)]
enum CharCommand {
    /// Characters mod N in enumeration order.
    List {
        #[arg(long)]
        level: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    None,
    FlipNegSquare,
    IgnoreConductor,
}

impl MutationArg {
    fn get(self) -> Mutation {
        match self {
            MutationArg::None => Mutation::None,
            MutationArg::FlipNegSquare => Mutation::FlipNegSquare,
            MutationArg::IgnoreConductor => Mutation::IgnoreConductor,
        }
    }
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Suite name or number 1-7, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// `desk`, `quick`, `full`, optionally followed by overrides like `N=10,k=4`.
    #[arg(long, default_value = "desk")]
    bounds: String,
    /// Seed a deliberate bug to show the suites notice it.
    #[arg(long, value_enum, default_value = "none")]
    mutation: MutationArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct TableArgs {
    /// e.g. `N=1..10,k=2..6:2,n=1..10` with optional `chi=all-valid-parity`.
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value = "trace")]
    kind: TableKind,
    /// Worker threads; 0 means one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Cache directory.
    #[arg(long, env = "HECKE_CACHE_DIR")]
    cache: Option<PathBuf>,
    /// Ignore any cache directory.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
}

fn character(level: u64, spec: &str) -> Result<(usize, DirichletCharacter), Failure> {
    if spec == "trivial" {
        return Ok((0, DirichletCharacter::trivial(level)?));
    }
    let index: usize = spec
        .parse()
        .map_err(|_| Failure::Usage(format!("--char must be an index or `trivial`, got {spec:?}")))?;
    Ok((index, DirichletCharacter::by_index(level, index)?))
}

struct Ctx {
    text: bool,
    approx: Option<usize>,
    timing: bool,
}

impl Ctx {
    fn emit(&self, rec: OutputRecord, start: Instant) {
        let mut rec = rec.with_approx(self.approx);
        if self.timing {
            rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        if self.text {
            match &rec.approx {
                Some(a) => println!("{}  ~ {a}", rec.result),
                None => println!("{}", rec.result),
            }
            if let Some(b) = &rec.breakdown {
                println!("elliptic {}\nhyperbolic {}\ndelta {}", b.elliptic, b.hyperbolic, b.delta);
            }
        } else {
            println!("{}", serde_json::to_string(&rec).expect("records serialize"));
        }
    }
}

fn cmd_trace(ctx: &Ctx, a: &TraceArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let (index, chi) = character(a.level, &a.character)?;
    let query = json!({
        "kind": "trace", "level": a.level, "weight": a.weight,
        "char_index": index, "character": chi, "n": a.index,
    });
    let r = trace_s_with(&TraceQuery::new(a.level, a.weight, chi, a.index)?, &a.mutation.get().conventions())?;
    ctx.emit(OutputRecord::from_trace(query, &r, a.breakdown), start);
    Ok(())
}

fn cmd_trace_al(ctx: &Ctx, a: &TraceAlArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let query = json!({
        "kind": "trace-al", "level": a.level, "ell": a.ell, "weight": a.weight, "n": a.index,
    });
    let r = trace_tn_wl(&ALQuery::new(a.level, a.ell, a.weight, a.index)?)?;
    ctx.emit(OutputRecord::from_trace(query, &r, a.breakdown), start);
    Ok(())
}

fn cmd_trace_gamma1(ctx: &Ctx, a: &TraceGamma1Args) -> Result<(), Failure> {
    let start = Instant::now();
    let q = Gamma1Query::new(a.level, a.weight, a.index)?;
    let (r, space) = match a.space {
        Space::S => (trace_gamma1_s(&q)?, "S"),
        Space::Ms => (trace_gamma1_ms(&q)?, "MS"),
    };
    let query = json!({
        "kind": "trace-gamma1", "level": a.level, "weight": a.weight, "n": a.index, "space": space,
    });
    ctx.emit(OutputRecord::from_trace(query, &r, a.breakdown), start);
    Ok(())
}

fn cmd_trace_form(ctx: &Ctx, a: &TraceFormArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let filter = match a.parity {
        Parity::All => ParityFilter::All,
        Parity::Odd => ParityFilter::Odd,
        Parity::Even => ParityFilter::Even,
    };
    let (spec, mut query) = match a.group {
        Group::Gamma0 => {
            let (index, chi) = character(a.level, &a.character)?;
            let q = json!({ "group": "gamma0", "char_index": index, "character": chi.clone() });
            (GroupSpec::Gamma0 { level: a.level, character: chi }, q)
        }
        Group::Gamma1 => (GroupSpec::Gamma1 { level: a.level }, json!({ "group": "gamma1" })),
    };
    let form = trace_form(&spec, a.weight, a.precision, filter)?;
    if ctx.text {
        println!("{form}");
        return Ok(());
    }
    let extra = json!({
        "kind": "trace-form", "level": a.level, "weight": a.weight,
        "precision": a.precision, "parity": filter,
    });
    if let (Value::Object(q), Value::Object(e)) = (&mut query, extra) {
        q.extend(e);
    }
    let mut out = json!({
        "query": query,
        "label": form.label,
        "coefficients": form.coeffs[1..],
    });
    if let Some(d) = ctx.approx {
        out["approx"] = form.coeffs[1..].iter().map(|c| approximate(c, d)).collect();
    }
    if ctx.timing {
        out["wall_time_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    println!("{out}");
    Ok(())
}

fn cmd_classnum(ctx: &Ctx, a: &ClassnumArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let (value, function): (BigRational, _) = if a.h0 { (h0(-a.d), "h0") } else { (hurwitz_h(a.d), "H") };
    let query = json!({ "kind": "classnum", "function": function, "D": a.d });
    ctx.emit(OutputRecord::new(query, CyclotomicNumber::from_rational(value)), start);
    Ok(())
}

fn cmd_char_list(ctx: &Ctx, level: u64) -> Result<(), Failure> {
    let chars = enumerate_characters(level, None)?;
    if ctx.text {
        for (i, chi) in chars.iter().enumerate() {
            println!(
                "{i}: exponents {:?} order {} conductor {} parity {:+}",
                chi.exponents(),
                chi.order(),
                chi.conductor(),
                chi.parity()
            );
        }
        return Ok(());
    }
    let gens: Vec<Value> = chars
        .first()
        .map(|c| c.group().generators().iter().map(|&(g, o)| json!({ "generator": g, "order": o })).collect())
        .unwrap_or_default();
    let list: Vec<Value> = chars
        .iter()
        .enumerate()
        .map(|(i, chi)| json!({ "index": i, "order": chi.order(), "character": chi }))
        .collect();
    println!("{}", json!({ "level": level, "generators": gens, "characters": list }));
    Ok(())
}

fn cmd_selfcheck(ctx: &Ctx, a: &SelfcheckArgs) -> Result<(), Failure> {
    let bounds: Bounds = a.bounds.parse()?;
    let mutation = a.mutation.get();
    let reports = if a.suite == "all" {
        consistency_suite(&bounds, mutation)
    } else {
        vec![run_suite(a.suite.parse::<Suite>()?, &bounds, mutation)]
    };
    if ctx.text {
        for r in &reports {
            println!("{} {} ({} cases)", if r.ok() { "PASS" } else { "FAIL" }, r.suite, r.cases);
            for f in r.failures.iter().take(5) {
                println!("    {}: expected {} got {}", f.case, f.expected, f.got);
            }
        }
    } else {
        println!("{}", serde_json::to_string(&reports).expect("reports serialize"));
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.ok()).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failing suites: {}", failed.join(", "))))
    }
}

fn cmd_table(ctx: &Ctx, a: &TableArgs) -> Result<(), Failure> {
    let grid: Grid = a.grid.parse().map_err(Failure::Usage)?;
    if a.format == TableFormat::Csv && a.kind == TableKind::Trace && grid.chars != table::CharSelection::Trivial {
        return Err(Failure::Usage(
            "CSV output is only available for integer-valued grids (trivial character or Gamma1)".into(),
        ));
    }
    let cache = match (&a.cache, a.no_cache) {
        (Some(dir), false) => Some(Cache::open(dir)?),
        _ => None,
    };
    let cells = table::cells(&grid, a.kind)?;
    let run = table::run(cells, cache.as_ref(), a.jobs)?;
    match a.format {
        TableFormat::Json => {
            for (_, rec) in &run.records {
                let rec = rec.clone().with_approx(ctx.approx);
                println!("{}", serde_json::to_string(&rec).expect("records serialize"));
            }
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let io = |e: csv::Error| Failure::Other(e.to_string());
            w.write_record(["N", "k", "chi", "n", "value"]).map_err(io)?;
            for (cell, rec) in &run.records {
                let value = table::integer_value(rec)
                    .ok_or_else(|| Failure::Integrality(format!("non-integer value at {}", cell.key())))?;
                let chi = cell.chi.map_or_else(String::new, |c| c.to_string());
                w.write_record([cell.level.to_string(), cell.weight.to_string(), chi, cell.n.to_string(), value])
                    .map_err(io)?;
            }
            w.flush().map_err(|e| Failure::Other(e.to_string()))?;
        }
    }
    eprintln!("{} cells: {} computed, {} cached", run.records.len(), run.computed, run.cached);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        text: cli.text,
        approx: cli.approx,
        timing: !cli.no_timing,
    };
    let result = match &cli.command {
        Command::Trace(a) => cmd_trace(&ctx, a),
        Command::TraceAl(a) => cmd_trace_al(&ctx, a),
        Command::TraceGamma1(a) => cmd_trace_gamma1(&ctx, a),
        Command::TraceForm(a) => cmd_trace_form(&ctx, a),
        Command::Classnum(a) => cmd_classnum(&ctx, a),
        Command::Char {
            command: CharCommand::List { level },
        } => cmd_char_list(&ctx, *level),
        Command::Selfcheck(a) => cmd_selfcheck(&ctx, a),
        Command::Table(a) => cmd_table(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
