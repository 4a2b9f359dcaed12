//! Deterministic command-line runner for the partition/ideal engine.
//!
//! Every verb maps onto one library operation and emits one report to
//! stdout: canonical JSON (sorted keys, no timestamps) by default, or a
//! plain-text rendering with `--format text`.  Identical invocations emit
//! byte-identical reports, so outputs can be diffed and committed.
//!
//! Exit codes: `0` — a verdict or result was produced (including negative
//! verdicts such as "none found"); `1` — an internal invariant was violated,
//! e.g. a fully covered descent or a failed identity sweep, conditions the
//! engine treats as impossible; `2` — bad input, an unknown verb or flag, or
//! an exhausted search window.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use serde::Serialize;
use serde_json::{json, Value};

use pjlab::chain::{
    down_color, floor_quotients_compose, interval_pigeonhole, pq_sequence, refute_witness,
    refute_witness_in, ChainError, FunctionSpec, RefutationOutcome, RefutationReport, RefuteMode,
    Stage,
};
use pjlab::criteria::{
    adgen_verdict, ref1_verdict, render_table1_grid, sufficient_scan, table1_grid, table2_verdict,
    veze_verdict, Evidence, ScanReport, SufficientCase, Verdict,
};
use pjlab::grid::{Point, PointSet, Window};
use pjlab::ideal::{Budgets, Certificate, IdealKind, IdealSpec};
use pjlab::partition::{
    build_coloring, e_class, ColorId, DFamily, EPointClass, PartitionSpec,
};
use pjlab::tower::{
    search_ed_sequence, search_tower, search_tower_constrained, validate_ed_sequence,
    validate_tower, TowerConstraints,
};

const EXIT_OK: u8 = 0;
const EXIT_INVARIANT: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

/// Most offending inputs an identity sweep lists before truncating.
const MISMATCH_CAP: usize = 16;

#[derive(Parser)]
#[command(
    name = "pjlab",
    version,
    about = "Partition ideals, towers of functions, and the covering refutation engine",
    disable_help_subcommand = true
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Verb {
    /// Tabulate the elements of a block family D_k.
    Gen(GenArgs),
    /// Color grid points under a partition.
    Color(ColorArgs),
    /// Search a window for a monochromatic (kappa,lambda)-tower.
    Tower(TowerArgs),
    /// Build a sequence of essentially different towers.
    EdSeq(EdSeqArgs),
    /// Run the covering refutation engine.
    Refute(RefuteArgs),
    /// Evaluate a classification criterion verdict.
    Criteria(CriteriaArgs),
    /// Evaluate the p/q chain-size recurrences.
    Pq(PqArgs),
    /// Exhaustively sweep the arithmetic identities the engine relies on.
    VerifyClaims(VerifyClaimsArgs),
    /// Reproduce the 5x5 ideal classification table.
    Table1(Table1Args),
}

#[derive(Args)]
struct GenArgs {
    /// Block family.
    #[arg(long, value_enum, default_value_t = DFamilyArg::Cantor)]
    d: DFamilyArg,
    /// Tabulate blocks D_0 ..= D_{k-max}.
    #[arg(long = "k-max", default_value_t = 7)]
    k_max: u64,
    /// Tabulate element indices 0 ..= r-max in each block.
    #[arg(long = "r-max", default_value_t = 7)]
    r_max: u64,
}

#[derive(Args)]
struct ColorArgs {
    /// Partition: vertical, rows, E:cantor, E:dyadic, or @file.json.
    #[arg(long)]
    partition: String,
    /// Window as COLSxROWS.
    #[arg(long)]
    window: Window,
    /// Single point "x,y" to classify; omitted, lists all window colors.
    #[arg(long)]
    point: Option<PointArg>,
}

#[derive(Args)]
struct TowerArgs {
    /// Partition: vertical, rows, E:cantor, E:dyadic, or @file.json.
    #[arg(long)]
    partition: String,
    /// Domain size of the tower.
    #[arg(long)]
    kappa: u64,
    /// Number of pairwise graph-disjoint functions.
    #[arg(long)]
    lambda: u64,
    /// Window as COLSxROWS.
    #[arg(long)]
    window: Window,
    /// Restrict the search to A-colors off column 0.
    #[arg(long = "a-colors-only", default_value_t = false)]
    a_colors_only: bool,
}

#[derive(Args)]
struct EdSeqArgs {
    /// Partition: vertical, rows, E:cantor, E:dyadic, or @file.json.
    #[arg(long)]
    partition: String,
    /// Number of essentially different towers to build.
    #[arg(long, default_value_t = 8)]
    count: u64,
    /// Domain size per level: a number, or "k" for the level index.
    #[arg(long, default_value = "k")]
    kappa: ShapeArg,
    /// Function count per level: a number, or "k" for the level index.
    #[arg(long, default_value = "k")]
    lambda: ShapeArg,
    /// Window as COLSxROWS.
    #[arg(long)]
    window: Window,
}

#[derive(Args)]
struct RefuteArgs {
    /// Which ideal the candidate cover is measured against.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Covering function, repeatable: const:C, lin:A:B, or table:V,V,...
    #[arg(long = "f")]
    f: Vec<String>,
    /// Comma-separated defect bounds k_0,...,k_n, one per row 0..=|f|.
    #[arg(long)]
    k: String,
    /// Block family behind the staircase partition.
    #[arg(long, value_enum, default_value_t = DFamilyArg::Cantor)]
    d: DFamilyArg,
    /// Fixed window COLSxROWS; auto-sized when omitted.
    #[arg(long)]
    window: Option<Window>,
}

#[derive(Args)]
struct CriteriaArgs {
    /// Which verdict to compute.
    #[arg(long, value_enum)]
    op: CriteriaOp,
    /// Window as COLSxROWS.
    #[arg(long)]
    window: Window,
    /// Partition (the row partition for table2).
    #[arg(long)]
    partition: Option<String>,
    /// Column partition for table2.
    #[arg(long = "partition-b")]
    partition_b: Option<String>,
    /// Ideal kind for adgen and table2.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// adgen: the countable family, as JSON [[[x,y],...],...] or @file.json.
    #[arg(long)]
    family: Option<String>,
    /// adgen: the J-budget certificate, as JSON or @file.json.
    #[arg(long)]
    cert: Option<String>,
    /// veze: largest tower width scanned.
    #[arg(long, default_value_t = 3)]
    kmax: u64,
    /// veze: finite proxy for an unbounded tower domain (at least 3).
    #[arg(long = "kappa-min", default_value_t = 3)]
    kappa_min: u64,
    /// sufficient: which case to scan.
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    /// Most generator blocks a certificate may name.
    #[arg(long = "max-colors", default_value_t = 6)]
    max_colors: usize,
    /// Most points a finite delta may hold.
    #[arg(long = "max-delta", default_value_t = 20)]
    max_delta: usize,
    /// Largest selector width / per-block bound.
    #[arg(long = "max-width", default_value_t = 4)]
    max_width: u64,
}

#[derive(Args)]
struct PqArgs {
    /// Comma-separated defect bounds k_0,...,k_n.
    #[arg(long)]
    k: String,
}

#[derive(Args)]
struct VerifyClaimsArgs {
    /// Which identity to sweep.
    #[arg(long, value_enum, default_value_t = ClaimArg::All)]
    claim: ClaimArg,
    /// down-color: block family.
    #[arg(long, value_enum, default_value_t = DFamilyArg::Cantor)]
    d: DFamilyArg,
    /// down-color: rows i below this bound.
    #[arg(long = "i-max", default_value_t = 15)]
    i_max: u64,
    /// down-color: color indices j below this bound.
    #[arg(long = "j-max", default_value_t = 50)]
    j_max: u64,
    /// down-color: window bounding the resident blocks.
    #[arg(long, default_value = "4096x16")]
    window: Window,
    /// pigeonhole: interval sizes up to this bound.
    #[arg(long = "d-max", default_value_t = 24)]
    d_max: u64,
    /// pigeonhole: failure bounds up to this value.
    #[arg(long = "k-max", default_value_t = 4)]
    k_max: u64,
    /// floors: numerators up to this bound.
    #[arg(long = "a-max", default_value_t = 1000)]
    a_max: u64,
    /// floors: divisors up to this bound.
    #[arg(long = "bc-max", default_value_t = 20)]
    bc_max: u64,
}

#[derive(Args)]
struct Table1Args {
    /// Window as COLSxROWS.
    #[arg(long, default_value = "64x64")]
    window: Window,
    /// Most generator blocks a certificate may name.
    #[arg(long = "max-colors", default_value_t = 6)]
    max_colors: usize,
    /// Most points a finite delta may hold.
    #[arg(long = "max-delta", default_value_t = 20)]
    max_delta: usize,
    /// Largest selector width / per-block bound.
    #[arg(long = "max-width", default_value_t = 4)]
    max_width: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DFamilyArg {
    Cantor,
    Dyadic,
}

impl From<DFamilyArg> for DFamily {
    fn from(a: DFamilyArg) -> DFamily {
        match a {
            DFamilyArg::Cantor => DFamily::CantorPairing,
            DFamilyArg::Dyadic => DFamily::Dyadic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sel,
    Ed,
}

impl From<ModeArg> for RefuteMode {
    fn from(a: ModeArg) -> RefuteMode {
        match a {
            ModeArg::Sel => RefuteMode::Sel,
            ModeArg::Ed => RefuteMode::Ed,
        }
    }
}

/// Ideal kinds under their report names.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "finGen", alias = "fin-gen")]
    FinGen,
    Sel,
    Ed,
    #[value(name = "oFin", alias = "o-fin")]
    OFin,
    #[value(name = "finFin", alias = "fin-fin")]
    FinFin,
}

impl From<KindArg> for IdealKind {
    fn from(a: KindArg) -> IdealKind {
        match a {
            KindArg::FinGen => IdealKind::FinGen,
            KindArg::Sel => IdealKind::Sel,
            KindArg::Ed => IdealKind::Ed,
            KindArg::OFin => IdealKind::OFin,
            KindArg::FinFin => IdealKind::FinFin,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriteriaOp {
    Adgen,
    Table2,
    Ref1,
    Veze,
    Sufficient,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    A,
    B,
    C,
    D,
    E,
}

impl From<CaseArg> for SufficientCase {
    fn from(a: CaseArg) -> SufficientCase {
        match a {
            CaseArg::A => SufficientCase::A,
            CaseArg::B => SufficientCase::B,
            CaseArg::C => SufficientCase::C,
            CaseArg::D => SufficientCase::D,
            CaseArg::E => SufficientCase::E,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    DownColor,
    Pigeonhole,
    Floors,
    All,
}

/// A grid point given as "x,y".
#[derive(Clone, Copy)]
struct PointArg(Point);

impl FromStr for PointArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("expected a point as x,y — got {s:?}");
        let (x, y) = s.split_once(',').ok_or_else(err)?;
        let x = x.trim().parse().map_err(|_| err())?;
        let y = y.trim().parse().map_err(|_| err())?;
        Ok(PointArg(Point::new(x, y)))
    }
}

/// A per-level tower dimension: fixed, or the level index itself.
#[derive(Clone, Copy)]
enum ShapeArg {
    Level,
    Fixed(u64),
}

impl ShapeArg {
    fn at(self, level: u64) -> u64 {
        match self {
            ShapeArg::Level => level,
            ShapeArg::Fixed(n) => n,
        }
    }
}

impl FromStr for ShapeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "k" {
            return Ok(ShapeArg::Level);
        }
        s.parse()
            .map(ShapeArg::Fixed)
            .map_err(|_| format!("expected a number or \"k\", got {s:?}"))
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().skip(1).collect()))
}

/// Parses `argv` (program name excluded), runs the verb, prints the report
/// to stdout, and returns the process exit code.  Input errors print to
/// stderr and exit 2; help and version requests print and exit 0.
fn run(argv: Vec<String>) -> u8 {
    let echo = argv.join(" ");
    let with_name = std::iter::once("pjlab".to_string()).chain(argv);
    let cli = match Cli::try_parse_from(with_name) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return u8::try_from(e.exit_code()).unwrap_or(EXIT_BAD_INPUT);
        }
    };
    match dispatch(&cli.verb) {
        Ok(out) => {
            let report = Report {
                command: echo,
                window: out.window.map(|w| w.to_string()),
                result: out.result,
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            print!("{}", emit_report(&report, cli.format, &out.body));
            out.code
        }
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_BAD_INPUT
        }
    }
}

/// The report envelope shared by every verb.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<String>,
    result: Value,
    version: String,
}

/// What a verb produced: the JSON payload, its plain-text rendering, the
/// effective window if the verb had one, and the exit code.
struct VerbOutput {
    result: Value,
    body: String,
    window: Option<Window>,
    code: u8,
}

impl VerbOutput {
    fn new(result: Value, body: String) -> Self {
        VerbOutput {
            result,
            body,
            window: None,
            code: EXIT_OK,
        }
    }

    fn with_window(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

/// Canonical serialization: JSON is round-tripped through `Value` so map
/// keys come out sorted; text prepends the command/window/version header to
/// the verb body.  No timestamps, no environment-dependent content.
fn emit_report(report: &Report, format: Format, body: &str) -> String {
    match format {
        Format::Json => {
            let value = serde_json::to_value(report).expect("reports serialize");
            let mut out = serde_json::to_string_pretty(&value).expect("values print");
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "command: pjlab {}", report.command).unwrap();
            if let Some(w) = &report.window {
                writeln!(out, "window: {w}").unwrap();
            }
            writeln!(out, "version: {}", report.version).unwrap();
            writeln!(out).unwrap();
            out.push_str(body);
            out
        }
    }
}

fn dispatch(verb: &Verb) -> Result<VerbOutput, String> {
    match verb {
        Verb::Gen(a) => run_gen(a),
        Verb::Color(a) => run_color(a),
        Verb::Tower(a) => run_tower(a),
        Verb::EdSeq(a) => run_ed_seq(a),
        Verb::Refute(a) => run_refute(a),
        Verb::Criteria(a) => run_criteria(a),
        Verb::Pq(a) => run_pq(a),
        Verb::VerifyClaims(a) => run_verify_claims(a),
        Verb::Table1(a) => run_table1(a),
    }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers

/// Inline partition names, or `@path` pointing at a JSON `PartitionSpec`.
fn parse_partition(s: &str) -> Result<PartitionSpec, String> {
    if let Some(path) = s.strip_prefix('@') {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read partition file {path}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("bad partition JSON in {path}: {e}"));
    }
    match s {
        "vertical" => Ok(PartitionSpec::Vertical),
        "rows" => Ok(PartitionSpec::Rows),
        "E:cantor" | "e:cantor" => Ok(PartitionSpec::E {
            d: DFamily::CantorPairing,
        }),
        "E:dyadic" | "e:dyadic" => Ok(PartitionSpec::E { d: DFamily::Dyadic }),
        other => Err(format!(
            "unknown partition {other:?}; expected vertical, rows, E:cantor, E:dyadic or @file.json"
        )),
    }
}

/// Inline JSON, or `@path` pointing at a JSON document.
fn parse_json_arg<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T, String> {
    let text = match s.strip_prefix('@') {
        Some(path) => {
            fs::read_to_string(path).map_err(|e| format!("cannot read {what} file {path}: {e}"))?
        }
        None => s.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| format!("bad {what} JSON: {e}"))
}

fn parse_kvec(s: &str) -> Result<Vec<u64>, String> {
    let kvec: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse()).collect();
    let kvec = kvec.map_err(|_| format!("expected comma-separated bounds, got {s:?}"))?;
    if kvec.is_empty() {
        return Err("at least one bound is required".to_string());
    }
    Ok(kvec)
}

fn partition_label(spec: &PartitionSpec) -> String {
    spec.to_string()
}

// ---------------------------------------------------------------------------
// Verbs

fn run_gen(a: &GenArgs) -> Result<VerbOutput, String> {
    let d: DFamily = a.d.into();
    let blocks: Vec<Vec<Option<u64>>> = (0..=a.k_max)
        .map(|k| (0..=a.r_max).map(|r| d.element_checked(k, r)).collect())
        .collect();
    let result = json!({
        "dfamily": d,
        "kMax": a.k_max,
        "rMax": a.r_max,
        "blocks": blocks,
    });
    let mut body = String::new();
    for (k, row) in blocks.iter().enumerate() {
        write!(body, "D_{k}:").unwrap();
        for e in row {
            match e {
                Some(v) => write!(body, " {v}").unwrap(),
                None => write!(body, " -").unwrap(),
            }
        }
        writeln!(body).unwrap();
    }
    Ok(VerbOutput::new(result, body))
}

fn run_color(a: &ColorArgs) -> Result<VerbOutput, String> {
    let spec = parse_partition(&a.partition)?;
    let coloring = build_coloring(&spec, a.window).map_err(|e| e.to_string())?;
    let out = match a.point {
        Some(PointArg(p)) => {
            if !a.window.contains(p) {
                return Err(format!("point {p} lies outside the {} window", a.window));
            }
            let color = coloring.color(p);
            let result = json!({
                "partition": partition_label(&spec),
                "point": p,
                "color": color,
            });
            VerbOutput::new(result, format!("color({}, {}) = {color}\n", p.x, p.y))
        }
        None => {
            let colors = coloring.window_colors(a.window);
            let mut body = format!("{} colors in the window\n", colors.len());
            for c in &colors {
                writeln!(body, "{c}").unwrap();
            }
            let result = json!({
                "partition": partition_label(&spec),
                "count": colors.len(),
                "colors": colors,
            });
            VerbOutput::new(result, body)
        }
    };
    Ok(out.with_window(a.window))
}

fn run_tower(a: &TowerArgs) -> Result<VerbOutput, String> {
    if a.kappa == 0 || a.lambda == 0 {
        return Err("kappa and lambda must be at least 1".to_string());
    }
    let spec = parse_partition(&a.partition)?;
    let coloring = build_coloring(&spec, a.window).map_err(|e| e.to_string())?;
    let found = if a.a_colors_only {
        let allowed: BTreeSet<ColorId> = coloring
            .window_colors(a.window)
            .into_iter()
            .filter(|c| matches!(c, ColorId::A { .. }))
            .collect();
        let cons = TowerConstraints {
            allowed_colors: Some(allowed),
            min_column: 1,
            ..TowerConstraints::default()
        };
        search_tower_constrained(&coloring, a.kappa, a.lambda, a.window, &cons)
    } else {
        search_tower(&coloring, a.kappa, a.lambda, a.window)
    };
    let out = match found {
        Some(tower) => {
            let validated = validate_tower(&tower, a.kappa, a.lambda, Some(&coloring));
            let mut body = format!("found a ({},{})-tower\n", a.kappa, a.lambda);
            write!(body, "  domain:").unwrap();
            for x in &tower.domain {
                write!(body, " {x}").unwrap();
            }
            writeln!(body).unwrap();
            if let Some(colors) = &tower.colors {
                write!(body, "  colors:").unwrap();
                for c in colors {
                    write!(body, " {c}").unwrap();
                }
                writeln!(body).unwrap();
            }
            writeln!(
                body,
                "  validated: {}",
                if validated { "yes" } else { "NO — internal inconsistency" }
            )
            .unwrap();
            let result = json!({
                "found": true,
                "tower": tower,
                "validated": validated,
            });
            let code = if validated { EXIT_OK } else { EXIT_INVARIANT };
            VerbOutput::new(result, body).with_code(code)
        }
        None => VerbOutput::new(
            json!({ "found": false, "note": "none found" }),
            "none found\n".to_string(),
        ),
    };
    Ok(out.with_window(a.window))
}

fn run_ed_seq(a: &EdSeqArgs) -> Result<VerbOutput, String> {
    if a.count == 0 {
        return Err("count must be at least 1".to_string());
    }
    if matches!(a.kappa, ShapeArg::Fixed(0)) || matches!(a.lambda, ShapeArg::Fixed(0)) {
        return Err("kappa and lambda must be at least 1".to_string());
    }
    let spec = parse_partition(&a.partition)?;
    let coloring = build_coloring(&spec, a.window).map_err(|e| e.to_string())?;
    let shape = |k: u64| (a.kappa.at(k), a.lambda.at(k));
    let out = match search_ed_sequence(&coloring, a.count, shape, a.window) {
        Some(sequence) => {
            let validated = validate_ed_sequence(&sequence, Some(&coloring));
            let shapes: Vec<(u64, u64)> = sequence
                .towers
                .iter()
                .map(|t| (t.kappa(), t.lambda()))
                .collect();
            let mut body = format!("built {} essentially different towers\n", a.count);
            write!(body, "  shapes:").unwrap();
            for (k, l) in &shapes {
                write!(body, " ({k},{l})").unwrap();
            }
            writeln!(body).unwrap();
            writeln!(
                body,
                "  validated: {}",
                if validated { "yes" } else { "NO — internal inconsistency" }
            )
            .unwrap();
            let result = json!({
                "found": true,
                "shapes": shapes,
                "sequence": sequence,
                "validated": validated,
            });
            let code = if validated { EXIT_OK } else { EXIT_INVARIANT };
            VerbOutput::new(result, body).with_code(code)
        }
        None => {
            // The construction is a greedy prefix, so the least failing count
            // is the exact stall level.
            let stall = (1..=a.count)
                .find(|&c| search_ed_sequence(&coloring, c, shape, a.window).is_none())
                .expect("the full count failed, so some prefix fails");
            let result = json!({ "found": false, "stallLevel": stall });
            let body = format!(
                "no sequence of {} towers at this window; construction stalls at level {stall}\n",
                a.count
            );
            VerbOutput::new(result, body)
        }
    };
    Ok(out.with_window(a.window))
}

fn run_refute(a: &RefuteArgs) -> Result<VerbOutput, String> {
    let f: Vec<FunctionSpec> = a
        .f
        .iter()
        .map(|s| s.parse().map_err(|e: ChainError| e.to_string()))
        .collect::<Result<_, _>>()?;
    let kvec = parse_kvec(&a.k)?;
    if kvec.len() != f.len() + 1 {
        return Err(format!(
            "--k must list {} bounds (one per row 0..=|f|), got {}",
            f.len() + 1,
            kvec.len()
        ));
    }
    let mode: RefuteMode = a.mode.into();
    let d: DFamily = a.d.into();
    let report = match a.window {
        Some(w) => refute_witness_in(&f, &kvec, mode, d, w),
        None => refute_witness(&f, &kvec, mode, d),
    }
    .map_err(|e| e.to_string())?;
    let code = match report.outcome {
        RefutationOutcome::Witness { .. } => EXIT_OK,
        // The descent reached row 0 fully covered — a condition the engine
        // treats as impossible.  The report still prints, trace included.
        RefutationOutcome::ContradictionAtColumn { .. } => EXIT_INVARIANT,
    };
    let window = report.window_used;
    let body = render_refutation(&report);
    let result = serde_json::to_value(&report).expect("reports serialize");
    Ok(VerbOutput::new(result, body)
        .with_window(window)
        .with_code(code))
}

fn render_refutation(r: &RefutationReport) -> String {
    let mut out = String::new();
    match &r.outcome {
        RefutationOutcome::Witness {
            row,
            color_index,
            uncovered_points,
        } => {
            let n = uncovered_points.len();
            writeln!(
                out,
                "witness: row {row}, color {color_index} — the cover misses {n} point{} of A({color_index},{row})",
                if n == 1 { "" } else { "s" }
            )
            .unwrap();
            write!(out, "  uncovered:").unwrap();
            for p in uncovered_points {
                write!(out, " ({},{})", p.x, p.y).unwrap();
            }
            writeln!(out).unwrap();
        }
        RefutationOutcome::ContradictionAtColumn { column } => {
            writeln!(
                out,
                "CONTRADICTION: the descent reached row 0 fully covered at column {column}"
            )
            .unwrap();
            writeln!(
                out,
                "this outcome is reserved for impossible configurations; treat it as a bug"
            )
            .unwrap();
        }
    }
    if let Some(ed) = &r.ed {
        writeln!(
            out,
            "ed: {} window-bad colors; witness colors start at {}",
            ed.bad_set.len(),
            ed.color_floor
        )
        .unwrap();
    }
    writeln!(out, "trace:").unwrap();
    for frame in &r.trace {
        let stage = match frame.stage {
            Stage::Initial => "initial",
            Stage::Extracted => "extracted",
            Stage::Descended => "descended",
        };
        writeln!(
            out,
            "  {stage:<9} row {} colors [{}, {}] blocks [{}, {}]",
            frame.row, frame.color_lo, frame.color_hi, frame.block_lo, frame.block_hi
        )
        .unwrap();
    }
    out
}

fn run_criteria(a: &CriteriaArgs) -> Result<VerbOutput, String> {
    let budgets = Budgets {
        max_colors: a.max_colors,
        max_delta: a.max_delta,
        max_width: a.max_width,
    };
    let w = a.window;
    let need = |flag: &str, op: &str| format!("--op {op} requires --{flag}");
    let partition = |op: &str| -> Result<PartitionSpec, String> {
        parse_partition(a.partition.as_deref().ok_or_else(|| need("partition", op))?)
    };
    match a.op {
        CriteriaOp::Adgen => {
            let kind: IdealKind = a.kind.ok_or_else(|| need("kind", "adgen"))?.into();
            let spec = IdealSpec::new(kind, partition("adgen")?);
            let family_raw: Vec<Vec<(u64, u64)>> = parse_json_arg(
                "family",
                a.family.as_deref().ok_or_else(|| need("family", "adgen"))?,
            )?;
            let family: Vec<PointSet> = family_raw
                .into_iter()
                .map(|m| m.into_iter().map(|(x, y)| Point::new(x, y)).collect())
                .collect();
            let cert: Certificate =
                parse_json_arg("cert", a.cert.as_deref().ok_or_else(|| need("cert", "adgen"))?)?;
            let verdict = adgen_verdict(&family, &spec, &cert, w).map_err(|e| e.to_string())?;
            Ok(verdict_output(&verdict, w))
        }
        CriteriaOp::Table2 => {
            let kind: IdealKind = a.kind.ok_or_else(|| need("kind", "table2"))?.into();
            let pa = partition("table2")?;
            let pb = parse_partition(
                a.partition_b
                    .as_deref()
                    .ok_or_else(|| need("partition-b", "table2"))?,
            )?;
            let verdict = table2_verdict(&pa, &pb, kind, w).map_err(|e| e.to_string())?;
            Ok(verdict_output(&verdict, w))
        }
        CriteriaOp::Ref1 => {
            let verdict =
                ref1_verdict(&partition("ref1")?, w, &budgets).map_err(|e| e.to_string())?;
            Ok(verdict_output(&verdict, w))
        }
        CriteriaOp::Veze => {
            if a.kappa_min < 3 {
                return Err("--kappa-min below 3 does not proxy an unbounded domain".to_string());
            }
            let verdict = veze_verdict(&partition("veze")?, a.kmax, a.kappa_min, w)
                .map_err(|e| e.to_string())?;
            Ok(verdict_output(&verdict, w))
        }
        CriteriaOp::Sufficient => {
            let case: SufficientCase = a.case.ok_or_else(|| need("case", "sufficient"))?.into();
            let report =
                sufficient_scan(&partition("sufficient")?, case, w).map_err(|e| e.to_string())?;
            Ok(scan_output(&report, w))
        }
    }
}

fn verdict_output(verdict: &Verdict, w: Window) -> VerbOutput {
    let result = serde_json::to_value(verdict).expect("verdicts serialize");
    VerbOutput::new(result, render_verdict(verdict)).with_window(w)
}

fn scan_output(report: &ScanReport, w: Window) -> VerbOutput {
    let mut body = format!(
        "case {}: {}\n",
        report.case,
        if report.holds {
            "necessary condition HOLDS at scale"
        } else {
            "necessary condition FAILS at scale"
        }
    );
    writeln!(body, "  statement: {}", report.statement).unwrap();
    body.push_str(&indent(&render_verdict(&report.verdict), "  "));
    let result = serde_json::to_value(report).expect("reports serialize");
    VerbOutput::new(result, body).with_window(w)
}

fn indent(text: &str, prefix: &str) -> String {
    text.lines()
        .map(|l| format!("{prefix}{l}\n"))
        .collect::<String>()
}

fn render_verdict(v: &Verdict) -> String {
    match v {
        Verdict::ConsistentAtScale { window, note } => {
            format!("consistent at {window}: {note}\n")
        }
        Verdict::Refuted { evidence } => format!("REFUTED — {}\n", evidence_summary(evidence)),
    }
}

fn evidence_summary(e: &Evidence) -> String {
    match e {
        Evidence::LargeBlocks { failing, total, .. } => format!(
            "{} of {total} family members overflow the certificate budget",
            failing.len()
        ),
        Evidence::CountViolations {
            pattern,
            failing_rows,
            violations,
            alternate_reading,
            ..
        } => {
            let mut s = format!(
                "{failing_rows} rows break the pattern {pattern} ({} violations listed)",
                violations.len()
            );
            if let Some(alt) = alternate_reading {
                write!(s, "; alternate reading: {alt}").unwrap();
            }
            s
        }
        Evidence::TowerFound { kappa, lambda, .. } => {
            format!("a ({kappa},{lambda})-tower exists at this window")
        }
        Evidence::TowerSequenceFound { shapes, .. } => {
            let list = shapes
                .iter()
                .map(|(k, l)| format!("({k},{l})"))
                .collect::<Vec<_>>()
                .join(" ");
            format!(
                "{} essentially different towers exist: {list}",
                shapes.len()
            )
        }
        Evidence::AllCandidatesDefeated { family, defeats } => format!(
            "all {} candidate certificates are defeated by the {family} family",
            defeats.len()
        ),
        Evidence::CheckFailed { check } => format!("verification step failed: {check}"),
    }
}

fn run_pq(a: &PqArgs) -> Result<VerbOutput, String> {
    let kvec = parse_kvec(&a.k)?;
    let pq = pq_sequence(&kvec);
    let p_list = pq.p.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    let q_list = pq.q.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    let body = format!(
        "k = [{}]\np = [{}]\nq = [{}]\n",
        kvec.iter().map(u64::to_string).collect::<Vec<_>>().join(", "),
        p_list.join(", "),
        q_list.join(", ")
    );
    let result = serde_json::to_value(&pq).expect("sequences serialize");
    Ok(VerbOutput::new(result, body))
}

/// Outcome of one exhaustive identity sweep.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClaimSweep {
    claim: &'static str,
    checked: u64,
    mismatch_count: u64,
    /// The first offending inputs, at most [`MISMATCH_CAP`].
    mismatches: Vec<Value>,
}

impl ClaimSweep {
    fn new(claim: &'static str) -> Self {
        ClaimSweep {
            claim,
            checked: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
        }
    }

    fn record(&mut self, mismatch: Value) {
        self.mismatch_count += 1;
        if self.mismatches.len() < MISMATCH_CAP {
            self.mismatches.push(mismatch);
        }
    }

    fn holds(&self) -> bool {
        self.mismatch_count == 0
    }
}

/// The index-shift identity: the block-k trace of `A(j, i+1)` must land in
/// the class `down_color` predicts, for every block resident in the window.
fn sweep_down_color(d: DFamily, i_max: u64, j_max: u64, w: Window) -> ClaimSweep {
    let mut sweep = ClaimSweep::new("downColor");
    for i in 0..i_max {
        for j in 0..j_max {
            for k in 0u64.. {
                let Some(index) = k.checked_mul(i + 1).and_then(|v| v.checked_add(j)) else {
                    break;
                };
                let Some(col) = d.element_checked(k, index) else {
                    break;
                };
                if col >= w.cols {
                    break;
                }
                sweep.checked += 1;
                let shifted =
                    down_color(ColorId::A { j, i: i + 1 }, k).expect("A-color above row 0");
                let ColorId::A { j: j2, i: i2 } = shifted else {
                    unreachable!("down_color maps A-colors to A-colors")
                };
                if e_class(d, Point::new(col, i)) != (EPointClass::A { j: j2, i: i2 }) {
                    sweep.record(json!({ "i": i, "j": j, "k": k, "column": col }));
                }
            }
        }
    }
    sweep
}

/// The pigeonhole split: every interval of size d with at most k failures
/// yields a failure-free subinterval of size exactly floor(d/(k+1)).
fn sweep_pigeonhole(d_max: u64, k_max: u64) -> ClaimSweep {
    let mut sweep = ClaimSweep::new("pigeonhole");
    for d_size in 1..=d_max {
        for k in 0..=k_max.min(d_size - 1) {
            for size in 0..=(k as usize) {
                for combo in (0..d_size).combinations(size) {
                    let failures: BTreeSet<u64> = combo.into_iter().collect();
                    sweep.checked += 1;
                    let verdict = interval_pigeonhole(0, d_size - 1, &failures, k);
                    let ok = match verdict {
                        Ok((lo, hi)) => {
                            hi < d_size
                                && lo <= hi
                                && hi - lo + 1 == d_size / (k + 1)
                                && failures.range(lo..=hi).next().is_none()
                        }
                        Err(_) => false,
                    };
                    if !ok {
                        sweep.record(json!({
                            "d": d_size,
                            "k": k,
                            "failures": failures.iter().copied().collect::<Vec<u64>>(),
                        }));
                    }
                }
            }
        }
    }
    sweep
}

/// The floor collapse: nested floor divisions equal one division by the
/// product.
fn sweep_floors(a_max: u64, bc_max: u64) -> ClaimSweep {
    let mut sweep = ClaimSweep::new("floors");
    for a in 0..=a_max {
        for b in 1..=bc_max {
            for c in 1..=bc_max {
                sweep.checked += 1;
                if !floor_quotients_compose(a, b, c) {
                    sweep.record(json!({ "a": a, "b": b, "c": c }));
                }
            }
        }
    }
    sweep
}

fn run_verify_claims(a: &VerifyClaimsArgs) -> Result<VerbOutput, String> {
    if a.bc_max == 0 {
        return Err("--bc-max must be at least 1".to_string());
    }
    let mut sweeps = Vec::new();
    if matches!(a.claim, ClaimArg::DownColor | ClaimArg::All) {
        sweeps.push(sweep_down_color(a.d.into(), a.i_max, a.j_max, a.window));
    }
    if matches!(a.claim, ClaimArg::Pigeonhole | ClaimArg::All) {
        sweeps.push(sweep_pigeonhole(a.d_max, a.k_max));
    }
    if matches!(a.claim, ClaimArg::Floors | ClaimArg::All) {
        sweeps.push(sweep_floors(a.a_max, a.bc_max));
    }
    let all_hold = sweeps.iter().all(ClaimSweep::holds);
    let mut body = String::new();
    for s in &sweeps {
        writeln!(
            body,
            "{}: {} cases checked, {} mismatches",
            s.claim, s.checked, s.mismatch_count
        )
        .unwrap();
    }
    writeln!(
        body,
        "{}",
        if all_hold {
            "all identities hold"
        } else {
            "IDENTITY FAILURES — this build is inconsistent"
        }
    )
    .unwrap();
    let result = json!({ "claims": sweeps, "allHold": all_hold });
    let code = if all_hold { EXIT_OK } else { EXIT_INVARIANT };
    Ok(VerbOutput::new(result, body).with_code(code))
}

fn run_table1(a: &Table1Args) -> Result<VerbOutput, String> {
    let budgets = Budgets {
        max_colors: a.max_colors,
        max_delta: a.max_delta,
        max_width: a.max_width,
    };
    let cells = table1_grid(a.window, &budgets).map_err(|e| e.to_string())?;
    let all_match = cells
        .iter()
        .all(|c| c.verdict.is_refuted() == !c.expected);
    let grid = render_table1_grid(&cells);
    let mut body = grid;
    writeln!(
        body,
        "{}",
        if all_match {
            "every cell's direction matches the expected table"
        } else {
            "DIRECTION MISMATCHES — cells marked with !"
        }
    )
    .unwrap();
    let result = json!({
        "budgets": budgets,
        "cells": cells,
        "allMatch": all_match,
    });
    let code = if all_match { EXIT_OK } else { EXIT_INVARIANT };
    Ok(VerbOutput::new(result, body)
        .with_window(a.window)
        .with_code(code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_flags_parse_inline_names() {
        assert_eq!(parse_partition("vertical").unwrap(), PartitionSpec::Vertical);
        assert_eq!(parse_partition("rows").unwrap(), PartitionSpec::Rows);
        assert_eq!(
            parse_partition("E:cantor").unwrap(),
            PartitionSpec::E {
                d: DFamily::CantorPairing
            }
        );
        assert_eq!(
            parse_partition("e:dyadic").unwrap(),
            PartitionSpec::E { d: DFamily::Dyadic }
        );
        assert!(parse_partition("diagonal").is_err());
    }

    #[test]
    fn kvec_flags_parse_comma_lists() {
        assert_eq!(parse_kvec("1,1").unwrap(), vec![1, 1]);
        assert_eq!(parse_kvec("0").unwrap(), vec![0]);
        assert!(parse_kvec("").is_err());
        assert!(parse_kvec("1,x").is_err());
    }

    #[test]
    fn shape_flags_parse_levels_and_numbers() {
        assert_eq!(ShapeArg::from_str("k").unwrap().at(5), 5);
        assert_eq!(ShapeArg::from_str("3").unwrap().at(5), 3);
        assert!(ShapeArg::from_str("kk").is_err());
    }

    #[test]
    fn json_reports_sort_keys_and_repeat_byte_identically() {
        let report = Report {
            command: "pq --k 1,1".to_string(),
            window: None,
            result: json!({ "zeta": 1, "alpha": 2 }),
            version: "0.0.0".to_string(),
        };
        let a = emit_report(&report, Format::Json, "");
        let b = emit_report(&report, Format::Json, "");
        assert_eq!(a, b);
        let alpha = a.find("\"alpha\"").unwrap();
        let zeta = a.find("\"zeta\"").unwrap();
        assert!(alpha < zeta, "keys must be sorted:\n{a}");
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn text_reports_lead_with_the_command_echo() {
        let report = Report {
            command: "pq --k 1,1".to_string(),
            window: Some("8x2".to_string()),
            result: json!({}),
            version: "0.0.0".to_string(),
        };
        let text = emit_report(&report, Format::Text, "p = [1]\n");
        assert!(text.starts_with("command: pjlab pq --k 1,1\n"));
        assert!(text.contains("window: 8x2\n"));
        assert!(text.ends_with("p = [1]\n"));
    }

    #[test]
    fn identity_sweeps_hold_at_small_bounds() {
        let dc = sweep_down_color(DFamily::CantorPairing, 4, 8, Window::new(256, 8));
        assert!(dc.holds() && dc.checked > 0);
        let ph = sweep_pigeonhole(10, 3);
        assert!(ph.holds() && ph.checked > 0);
        let fl = sweep_floors(50, 6);
        assert!(fl.holds() && fl.checked == 51 * 36);
    }

    #[test]
    fn refutation_rendering_names_the_witness() {
        let f = [FunctionSpec::Const { value: 0 }];
        let report = refute_witness(&f, &[1, 1], RefuteMode::Sel, DFamily::CantorPairing).unwrap();
        let text = render_refutation(&report);
        assert!(text.starts_with("witness: row 1, color 0"));
        assert!(text.contains("(1,1) (5,1)"));
        assert!(text.contains("trace:"));
    }
}
