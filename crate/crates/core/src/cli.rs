//! The `steinhaus` command line.

use std::io::Write;
use std::ops::RangeInclusive;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::blocks::{
    block_multiplicities, build_library, golden_mismatches, layout, table_csv, BLOCK_NAMES,
};
use crate::census::{
    count_balanced, orbit_count, sample_balanced, CensusConfig, SymmetryGroup, BUDGET_ENV,
};
use crate::lift::{detect_tail, LiftReport, LiftSearch, Method, DEFAULT_ENUMERATION_CAP};
use crate::reproduce::{claim_ids, run_claim, ClaimReport, Options, CLAIMS, DEFAULT_TAIL_WINDOW};
use crate::residue::{catalog_entry, parse_sequence, Modulus, Sequence};
use crate::triangle::{
    admissible_length, balanced_prefix_flags, build_triangle, strongly_balanced_from_flags,
    MultiplicityVector,
};

#[derive(Debug, Parser)]
#[command(
    name = "steinhaus",
    version,
    about = "Balanced Steinhaus triangles over Z/m"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, short = 'o', value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and render the triangle of a first row.
    Triangle(TriangleArgs),
    /// Check balance and strong balance at a set of lengths.
    Check(CheckArgs),
    /// Show the S1 building blocks, their multiplicities or the tiling.
    Blocks(BlocksArgs),
    /// Count strongly balanced lifts from Z/m to Z/2m.
    Lift(LiftArgs),
    /// Count balanced first rows of a given length.
    Census(CensusArgs),
    /// Recompute published results and compare.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    /// Catalog name (S1, T3, Q2, R10, ...) or literal `INIT` / `INIT(PERIOD)`.
    pub sequence: String,
    /// Modulus; required for literals.
    #[arg(short, long)]
    pub modulus: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TriangleArgs {
    #[command(flatten)]
    pub seq: SequenceArgs,
    /// Length of the first row (required for periodic sequences).
    #[arg(long)]
    pub prefix: Option<usize>,
    /// Print multiplicities only.
    #[arg(long)]
    pub no_render: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub seq: SequenceArgs,
    /// Checkpoints `offset + 2m·k` for k in `A..B` (inclusive).
    #[arg(long, value_parser = parse_range)]
    pub k: Option<RangeInclusive<usize>>,
    /// Explicit lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct BlocksArgs {
    /// Block to render (A0..E0); all blocks when omitted.
    pub name: Option<String>,
    /// Print the multiplicity table instead.
    #[arg(long)]
    pub table: bool,
    /// Print the block labels tiling S1[8k].
    #[arg(long, value_name = "K")]
    pub layout: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[command(flatten)]
    pub seq: SequenceArgs,
    /// Largest length counted (default 256 over Z/2, 128 otherwise).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Checkpoints a constant run must span to be reported as a tail.
    #[arg(long, default_value_t = DEFAULT_TAIL_WINDOW)]
    pub window: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
    pub method: MethodArg,
    /// Only the checkpoint classes congruent to the initial part's length.
    #[arg(long)]
    pub family: bool,
    /// List the lifts of length N instead of counting.
    #[arg(long, value_name = "N")]
    pub enumerate: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Direct,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, short)]
    pub modulus: u32,
    #[arg(long, short = 'n')]
    pub length: usize,
    /// Also count classes under the symmetry group.
    #[arg(long)]
    pub orbits: bool,
    #[arg(long, value_enum, default_value_t = GroupArg::ReversalUnits)]
    pub group: GroupArg,
    /// Print the first K balanced rows in lexicographic order.
    #[arg(long, value_name = "K")]
    pub limit: Option<usize>,
    #[command(flatten)]
    pub work: WorkArgs,
}

#[derive(Debug, Args)]
pub struct WorkArgs {
    /// Prefix groups searched in parallel.
    #[arg(long)]
    pub partitions: Option<usize>,
    /// Cap on m^n (also read from the budget environment variable).
    #[arg(long)]
    pub budget: Option<u128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Identity,
    Reversal,
    Units,
    ReversalUnits,
}

impl From<GroupArg> for SymmetryGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Identity => SymmetryGroup::Identity,
            GroupArg::Reversal => SymmetryGroup::Reversal,
            GroupArg::Units => SymmetryGroup::Units,
            GroupArg::ReversalUnits => SymmetryGroup::ReversalUnits,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Claim ids; see `--list`.
    pub claims: Vec<String>,
    /// List claim ids and exit.
    #[arg(long)]
    pub list: bool,
    /// Run every top-level claim.
    #[arg(long)]
    pub all: bool,
    /// With `--all`, include the slow claims.
    #[arg(long)]
    pub include_slow: bool,
    /// Print every check, not only failures.
    #[arg(long, short)]
    pub verbose: bool,
    #[arg(long, default_value_t = DEFAULT_TAIL_WINDOW)]
    pub window: usize,
    #[command(flatten)]
    pub work: WorkArgs,
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected A..B, got {text:?}");
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Resolves a catalog name or literal.
fn resolve(args: &SequenceArgs) -> Result<(String, Sequence)> {
    if let Ok(entry) = catalog_entry(&args.sequence) {
        if let Some(m) = args.modulus {
            if m != entry.modulus {
                bail!(
                    "{} is defined mod {}, not mod {m}",
                    entry.name,
                    entry.modulus
                );
            }
        }
        return Ok((entry.name.to_string(), entry.sequence().into()));
    }
    let m = args.modulus.ok_or_else(|| {
        anyhow!(
            "`{}` is not a catalog name; give the modulus with -m",
            args.sequence
        )
    })?;
    let seq = parse_sequence(&args.sequence, Modulus::new(m)?)?;
    Ok((args.sequence.clone(), seq))
}

fn census_config(work: &WorkArgs) -> CensusConfig {
    let mut cfg = CensusConfig::from_env();
    if let Some(b) = work.budget {
        cfg.budget = b;
    }
    cfg.partitions = work
        .partitions
        .unwrap_or_else(|| rayon::current_num_threads() * 8);
    cfg
}

fn json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn counts_text(mv: &MultiplicityVector) -> String {
    let parts: Vec<String> = mv.counts().iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Serialize)]
struct TriangleDoc {
    sequence: String,
    modulus: u32,
    length: usize,
    rows: Vec<Vec<u8>>,
    multiplicities: MultiplicityVector,
    balanced: bool,
    admissible: bool,
}

fn cmd_triangle(args: &TriangleArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    let (name, seq) = resolve(&args.seq)?;
    let row = match (&seq, args.prefix) {
        (_, Some(l)) => seq.prefix(l)?,
        (Sequence::Finite(s), None) => s.clone(),
        (Sequence::Periodic(_), None) => bail!("{name} is periodic; give a length with --prefix"),
    };
    let t = build_triangle(&row);
    let mv = t.multiplicities();
    let m = row.modulus();
    match format {
        Format::Json => json(
            out,
            &TriangleDoc {
                sequence: name,
                modulus: m.get(),
                length: row.len(),
                rows: t.rows().to_vec(),
                balanced: mv.is_balanced(),
                admissible: admissible_length(row.len(), m),
                multiplicities: mv,
            },
        )?,
        Format::Csv => {
            let header: Vec<String> = (0..m.get()).map(|r| r.to_string()).collect();
            writeln!(out, "{}", header.join(","))?;
            let vals: Vec<String> = mv.counts().iter().map(u64::to_string).collect();
            writeln!(out, "{}", vals.join(","))?;
        }
        Format::Text => {
            if !args.no_render && !row.is_empty() {
                write!(out, "{}", t.render())?;
            }
            writeln!(out, "counts {}", counts_text(&mv))?;
            writeln!(
                out,
                "balanced {}",
                if mv.is_balanced() { "yes" } else { "no" }
            )?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct CheckRow {
    length: usize,
    admissible: bool,
    balanced: bool,
    strongly_balanced: Option<bool>,
    passed: bool,
}

fn cmd_check(args: &CheckArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    let (name, seq) = resolve(&args.seq)?;
    let m = seq.modulus();
    let stride = 2 * m.as_usize();
    let mut lengths = args.lengths.clone();
    if let Some(range) = &args.k {
        let offset = seq.initial_len() % stride;
        lengths.extend(range.clone().map(|k| offset + stride * k));
    }
    if lengths.is_empty() {
        match seq.len() {
            Some(n) => lengths.push(n),
            None => bail!("{name} is periodic; give --k or --lengths"),
        }
    }
    let longest = *lengths.iter().max().expect("nonempty");
    let row = seq.prefix(longest)?;
    let flags = balanced_prefix_flags(&row);
    let rows: Vec<CheckRow> = lengths
        .iter()
        .map(|&n| {
            let balanced = flags[n];
            let strongly = m
                .is_even()
                .then(|| strongly_balanced_from_flags(&flags, n, m));
            CheckRow {
                length: n,
                admissible: admissible_length(n, m),
                balanced,
                strongly_balanced: strongly,
                passed: strongly.unwrap_or(balanced),
            }
        })
        .collect();
    let all = rows.iter().all(|r| r.passed);
    let yn = |b: bool| if b { "pass" } else { "fail" };
    match format {
        Format::Json => json(out, &rows)?,
        Format::Csv => {
            writeln!(out, "length,admissible,balanced,strongly_balanced,passed")?;
            for r in &rows {
                let sb = r.strongly_balanced.map_or(String::new(), |b| b.to_string());
                writeln!(
                    out,
                    "{},{},{},{sb},{}",
                    r.length, r.admissible, r.balanced, r.passed
                )?;
            }
        }
        Format::Text => {
            writeln!(out, "{name} mod {m}")?;
            writeln!(
                out,
                "{:>8}  {:>10}  {:>8}  {:>8}",
                "length", "admissible", "balanced", "strongly"
            )?;
            for r in &rows {
                let sb = r.strongly_balanced.map_or("-", yn);
                writeln!(
                    out,
                    "{:>8}  {:>10}  {:>8}  {:>8}",
                    r.length,
                    if r.admissible { "yes" } else { "no" },
                    yn(r.balanced),
                    sb
                )?;
            }
            let passed = rows.iter().filter(|r| r.passed).count();
            writeln!(out, "{passed}/{} lengths pass", rows.len())?;
        }
    }
    Ok(all)
}

#[derive(Serialize)]
struct BlockDoc {
    name: &'static str,
    kind: &'static str,
    rows: Vec<Vec<u8>>,
    multiplicities: MultiplicityVector,
    matches_reference: bool,
}

fn cmd_blocks(args: &BlocksArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    let lib = build_library();
    let mismatches = golden_mismatches(&lib);
    if let Some(k) = args.layout {
        let grid = layout(k);
        match format {
            Format::Json => json(out, &grid)?,
            _ => {
                for row in grid {
                    writeln!(out, "{}", row.join(" "))?;
                }
            }
        }
        return Ok(true);
    }
    if args.table {
        let table = block_multiplicities(&lib);
        match format {
            Format::Json => {
                let map: std::collections::BTreeMap<_, _> = table
                    .iter()
                    .map(|(n, mv)| (*n, mv.counts().to_vec()))
                    .collect();
                json(out, &map)?
            }
            Format::Csv => write!(out, "{}", table_csv(&table))?,
            Format::Text => {
                write!(out, "{:>3}", "")?;
                for (n, _) in &table {
                    write!(out, " {n:>3}")?;
                }
                writeln!(out)?;
                for r in 0..4u8 {
                    write!(out, "{r:>3}")?;
                    for (_, mv) in &table {
                        write!(out, " {:>3}", mv.get(r))?;
                    }
                    writeln!(out)?;
                }
            }
        }
        return Ok(mismatches.is_empty());
    }
    let names: Vec<&'static str> = match &args.name {
        Some(n) => vec![*BLOCK_NAMES
            .iter()
            .find(|b| b.eq_ignore_ascii_case(n))
            .ok_or_else(|| {
                anyhow!(
                    "unknown block `{n}`; expected one of {}",
                    BLOCK_NAMES.join(", ")
                )
            })?],
        None => BLOCK_NAMES.to_vec(),
    };
    let docs: Vec<BlockDoc> = names
        .iter()
        .map(|&name| {
            let b = lib.get(name).expect("library block");
            BlockDoc {
                name,
                kind: match b.kind() {
                    crate::blocks::BlockKind::Triangle => "triangle",
                    crate::blocks::BlockKind::Lozenge => "lozenge",
                },
                rows: b.rows().to_vec(),
                multiplicities: b.multiplicities(),
                matches_reference: !mismatches.contains(&name),
            }
        })
        .collect();
    match format {
        Format::Json => json(out, &docs)?,
        _ => {
            for (i, d) in docs.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "{}", d.name)?;
                write!(out, "{}", lib.get(d.name).expect("library block").render())?;
            }
        }
    }
    Ok(docs.iter().all(|d| d.matches_reference))
}

fn cmd_lift(args: &LiftArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    let (name, seq) = resolve(&args.seq)?;
    let method = match args.method {
        MethodArg::Spectral => Method::Spectral,
        MethodArg::Direct => Method::Direct,
    };
    let search = LiftSearch::new(&seq)?.with_method(method);
    if let Some(n) = args.enumerate {
        let lifts = search.enumerate(n, args.cap)?;
        match format {
            Format::Json => {
                let rows: Vec<String> = lifts.iter().map(|s| s.to_string()).collect();
                json(out, &rows)?
            }
            _ => {
                for s in &lifts {
                    writeln!(out, "{s}")?;
                }
            }
        }
        return Ok(true);
    }
    let horizon = args
        .horizon
        .unwrap_or(if seq.modulus().get() == 2 { 256 } else { 128 });
    let g = if args.family {
        search.count_classes(horizon, &search.family_classes(), &mut |_, _| {})?
    } else {
        search.count(horizon)?
    };
    let g = detect_tail(&g, args.window);
    let report = LiftReport::new(&name, seq.modulus(), &g);
    match format {
        Format::Json => json(out, &report)?,
        Format::Csv => {
            writeln!(out, "n,a_n")?;
            for (n, a) in &report.coefficients {
                writeln!(out, "{n},{a}")?;
            }
        }
        Format::Text => {
            writeln!(
                out,
                "G_{name}(t) for lifts Z/{} -> Z/{}, n <= {horizon}",
                report.modulus, report.target
            )?;
            writeln!(out, "{}", g.series())?;
            if let Some(t) = g.tail {
                writeln!(
                    out,
                    "constant tail {} from n = {} with stride {} (observed, not proven)",
                    t.c, t.n0, t.stride
                )?;
            }
        }
    }
    Ok(true)
}

fn cmd_census(args: &CensusArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    let m = Modulus::new(args.modulus)?;
    let cfg = census_config(&args.work);
    let report = if args.orbits {
        orbit_count(m, args.length, args.group.into(), &cfg)?
    } else {
        count_balanced(m, args.length, &cfg)?
    };
    let sample = match args.limit {
        Some(k) => Some(sample_balanced(m, args.length, k, &cfg)?),
        None => None,
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                report: &'a crate::census::CensusReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                sample: Option<Vec<String>>,
            }
            json(
                out,
                &Doc {
                    report: &report,
                    sample: sample.map(|v| v.iter().map(|s| s.to_string()).collect()),
                },
            )?
        }
        Format::Csv => {
            writeln!(
                out,
                "modulus,length,total_sequences,balanced_count,orbit_count,elapsed_secs"
            )?;
            writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                report.modulus,
                report.length,
                report.total_sequences,
                report.balanced_count,
                report.orbit_count.map_or(String::new(), |o| o.to_string()),
                report.elapsed_secs
            )?;
        }
        Format::Text => {
            writeln!(out, "{report}")?;
            if let Some(rows) = sample {
                for s in rows {
                    writeln!(out, "{s}")?;
                }
            }
        }
    }
    Ok(true)
}

fn cmd_reproduce(args: &ReproduceArgs, format: Format, out: &mut dyn Write) -> Result<bool> {
    if args.list {
        for c in CLAIMS.iter() {
            writeln!(
                out,
                "{:<16} {}{}",
                c.id,
                c.description,
                if c.slow { " [slow]" } else { "" }
            )?;
        }
        let rest: Vec<String> = claim_ids().into_iter().skip(CLAIMS.len()).collect();
        writeln!(out, "per sequence: {}", rest.join(" "))?;
        return Ok(true);
    }
    let mut ids = args.claims.clone();
    if args.all {
        ids.extend(
            CLAIMS
                .iter()
                .filter(|c| args.include_slow || !c.slow)
                .map(|c| c.id.to_string()),
        );
    }
    if ids.is_empty() {
        bail!("name at least one claim, or pass --all or --list");
    }
    let progress = |msg: &str| eprintln!("... {msg}");
    let opts = Options {
        census: census_config(&args.work),
        tail_window: args.window,
        progress: Some(&progress),
    };
    let mut reports: Vec<ClaimReport> = Vec::new();
    for id in &ids {
        let report = run_claim(id, &opts).with_context(|| format!("claim {id}"))?;
        if format == Format::Text {
            write!(out, "{}", report.render(args.verbose))?;
        }
        reports.push(report);
    }
    match format {
        Format::Json => json(out, &reports)?,
        Format::Csv => {
            writeln!(out, "claim,label,expected,measured,passed")?;
            for r in &reports {
                for c in &r.checks {
                    writeln!(
                        out,
                        "{},\"{}\",\"{}\",\"{}\",{}",
                        r.id, c.label, c.expected, c.measured, c.passed
                    )?;
                }
            }
        }
        Format::Text => {}
    }
    Ok(reports.iter().all(|r| r.passed))
}

/// Runs a parsed command, writing to `out`. `Ok(false)` means some check
/// failed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    if let Some(n) = cli.threads {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.command {
        Command::Triangle(a) => cmd_triangle(a, cli.format, out),
        Command::Check(a) => cmd_check(a, cli.format, out),
        Command::Blocks(a) => cmd_blocks(a, cli.format, out),
        Command::Lift(a) => cmd_lift(a, cli.format, out),
        Command::Census(a) => cmd_census(a, cli.format, out),
        Command::Reproduce(a) => cmd_reproduce(a, cli.format, out),
    }
}

/// Entry point: exit 0 when every requested check passes, 1 when one
/// fails, 2 on usage or input errors.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e:#}");
            if e.to_string().contains(BUDGET_ENV) {
                eprintln!("hint: the budget caps m^n, the unpruned search space");
            }
            ExitCode::from(2)
        }
    }
}
