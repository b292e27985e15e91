//! Command-line front end: argument types and dispatch.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use triortho_core::classify::{self, ClassRow, ClassifyOptions, SweepOptions};
use triortho_core::distance::{d_max_even, d_max_odd, d_max_table, z_distance, DistanceResult, DEFAULT_CAP};
use triortho_core::level3::is_level3_divisible;
use triortho_core::magic::{run_shots, Convention, ProtocolConfig, Variant};
use triortho_core::triortho::{
    even_descendant, indicator_to_generator, is_triorthogonal_space, odd_descendant, verify_triorthogonal_matrix,
    DescendantCode, Parity, TriorthogonalSpace,
};
use triortho_core::{BitMatrix, RMPolynomial};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] triortho_core::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit status: 1 verification failure, 2 bad input, 3 budget.
    pub fn status(&self) -> u8 {
        use triortho_core::Error as E;
        match self {
            CliError::Core(E::BudgetExceeded(_)) => 3,
            CliError::Core(E::Parse { .. } | E::LengthMismatch { .. } | E::IndexOutOfRange { .. }) => 2,
            CliError::Core(E::OutOfRange(_) | E::InvalidCase(_) | E::ZeroPolynomial) => 2,
            CliError::Core(_) => 1,
            CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Text to print and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub status: u8,
}

impl Output {
    fn json<T: Serialize>(value: &T, status: u8) -> Self {
        let mut stdout = serde_json::to_string_pretty(value).expect("serializable");
        stdout.push('\n');
        Self { stdout, status }
    }
}

#[derive(Debug, Parser)]
#[command(name = "triortho", version, about = "Triorthogonal codes and their classification")]
pub struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "TRIORTHO_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SpaceSource {
    /// Indicator polynomial, e.g. "x1*x2 + x3*x4".
    #[arg(long)]
    pub poly: Option<String>,
    /// Generator matrix file of a triorthogonal space.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a triorthogonal matrix (`G1 --- G0`) or space.
    Check {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Puncture a unital space into a code.
    Descend {
        #[command(flatten)]
        source: SpaceSource,
        /// Number of variables of the polynomial.
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated column indices.
        #[arg(long, value_delimiter = ',', required = true)]
        puncture: Vec<usize>,
        /// Distinguished column for an odd descendant.
        #[arg(long)]
        odd: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Z distance of a code.
    Distance {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Best Z distance over descendants of a space.
    Dmax {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long)]
        m: Option<usize>,
        /// All feasible k when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = ParityArg::Even)]
        parity: ParityArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Level-3 divisibility of a space.
    Divisible {
        #[command(flatten)]
        source: SpaceSource,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Classify unital triorthogonal spaces by size.
    Classify {
        #[arg(long = "max-c", default_value_t = 30)]
        max_c: usize,
        #[arg(long)]
        heavy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to the extension of `--out`, else JSON.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Quadratic parts examined per base pair.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Affine classes of low-weight cubics on six variables.
    #[command(name = "classify-rm36")]
    ClassifyRm36 {
        #[arg(long = "max-weight", default_value_t = 18)]
        max_weight: usize,
    },
    /// Monte Carlo run of the distillation protocol.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Delayed)]
        variant: VariantArg,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ConventionArg::Minus)]
        convention: ConventionArg,
    },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn load_space(source: &SpaceSource, m: Option<usize>) -> CliResult<TriorthogonalSpace> {
    match (&source.poly, &source.matrix) {
        (Some(p), _) => Ok(indicator_to_generator(&RMPolynomial::parse(p, m)?)?),
        (None, Some(path)) => {
            let h = BitMatrix::parse_text(&read(path)?)?;
            if !is_triorthogonal_space(&h.row_basis()) {
                return Err(triortho_core::Error::NotTriorthogonal.into());
            }
            Ok(TriorthogonalSpace::new(h)?)
        }
        (None, None) => Err(CliError::Usage("one of --poly or --matrix is required".into())),
    }
}

fn load_code(path: &Path) -> CliResult<DescendantCode> {
    Ok(DescendantCode::parse(&read(path)?)?)
}

#[derive(Serialize)]
struct CheckCode {
    triorthogonal: bool,
    n: usize,
    k: usize,
    parity: Parity,
}

#[derive(Serialize)]
struct CheckSpace {
    triorthogonal: bool,
    c: usize,
    r: usize,
    unital: bool,
}

fn check(path: &Path) -> CliResult<Output> {
    let text = read(path)?;
    let shift_line = |e: triortho_core::Error, by: usize| match e {
        triortho_core::Error::Parse { line, message } => triortho_core::Error::Parse { line: line + by, message },
        other => other,
    };
    if text.trim_start().starts_with('{') {
        let code = DescendantCode::parse(&text);
        return match code {
            Ok(c) => Ok(Output::json(&CheckCode { triorthogonal: true, n: c.n(), k: c.k(), parity: c.parity() }, 0)),
            Err(triortho_core::Error::NotTriorthogonal) => Err(triortho_core::Error::NotTriorthogonal.into()),
            Err(e) => Err(e.into()),
        };
    }
    let lines: Vec<&str> = text.lines().collect();
    if let Some(sep) = lines.iter().position(|l| l.trim() == "---") {
        let g1 = BitMatrix::parse_text(&lines[..sep].join("\n"))?;
        let g0 = BitMatrix::parse_text(&lines[sep + 1..].join("\n")).map_err(|e| shift_line(e, sep + 1))?;
        let n = g1.ncols().max(g0.ncols());
        let g1 = if g1.nrows() == 0 { BitMatrix::new(n) } else { g1 };
        let g0 = if g0.nrows() == 0 { BitMatrix::new(n) } else { g0 };
        if g1.ncols() != g0.ncols() {
            return Err(triortho_core::Error::Parse { line: sep + 2, message: "G0 and G1 widths differ".into() }.into());
        }
        let ok = verify_triorthogonal_matrix(&g1, &g0);
        let k = g1.nrows();
        let parity = if (n + k) % 2 == 0 { Parity::Even } else { Parity::Odd };
        return Ok(Output::json(&CheckCode { triorthogonal: ok, n, k, parity }, if ok { 0 } else { 1 }));
    }
    let h = BitMatrix::parse_text(&text)?;
    let ok = is_triorthogonal_space(&h.row_basis());
    let unital = ok && TriorthogonalSpace::new(h.clone()).map(|s| s.is_unital()).unwrap_or(false);
    let out = CheckSpace { triorthogonal: ok, c: h.ncols(), r: h.rank(), unital };
    Ok(Output::json(&out, if ok { 0 } else { 1 }))
}

#[derive(Serialize)]
struct DescendSummary {
    n: usize,
    k: usize,
    parity: Parity,
    out: String,
}

fn descend(source: &SpaceSource, m: Option<usize>, puncture: &[usize], odd: Option<usize>, out: Option<&Path>) -> CliResult<Output> {
    let s = load_space(source, m)?;
    let code = match odd {
        Some(j) => odd_descendant(&s, puncture, j)?,
        None => even_descendant(&s, puncture)?,
    };
    match out {
        None => Ok(Output::json(&code.to_json(), 0)),
        Some(path) => {
            let text = if path.extension().is_some_and(|e| e == "json") {
                serde_json::to_string_pretty(&code.to_json()).expect("serializable") + "\n"
            } else {
                code.to_text()
            };
            write(path, &text)?;
            let summary = DescendSummary { n: code.n(), k: code.k(), parity: code.parity(), out: path.display().to_string() };
            Ok(Output::json(&summary, 0))
        }
    }
}

#[derive(Serialize)]
struct DistanceOut {
    d: Option<usize>,
    cap: usize,
    exact: bool,
}

impl From<DistanceResult> for DistanceOut {
    fn from(r: DistanceResult) -> Self {
        Self { d: r.value, cap: r.cap, exact: r.exact }
    }
}

#[derive(Serialize)]
struct DmaxOut {
    k: usize,
    parity: Parity,
    d: Option<usize>,
    cap: usize,
    exact: bool,
}

fn dmax(source: &SpaceSource, m: Option<usize>, k: Option<usize>, parity: Parity, cap: usize) -> CliResult<Output> {
    let s = load_space(source, m)?;
    let rows: Vec<DmaxOut> = match k {
        Some(k) => {
            let r = match parity {
                Parity::Even => d_max_even(&s, k, cap)?,
                Parity::Odd => d_max_odd(&s, k, cap)?,
            };
            vec![DmaxOut { k, parity, d: r.value, cap, exact: r.exact }]
        }
        None => d_max_table(&s, parity, cap)?
            .into_iter()
            .map(|(k, r)| DmaxOut { k, parity, d: r.value, cap, exact: r.exact })
            .collect(),
    };
    if k.is_some() {
        Ok(Output::json(&rows[0], 0))
    } else {
        Ok(Output::json(&rows, 0))
    }
}

#[derive(Serialize)]
struct DivisibleOut {
    divisible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstruction_row: Option<Vec<u8>>,
}

fn divisible(source: &SpaceSource, m: Option<usize>) -> CliResult<Output> {
    let v = is_level3_divisible(&load_space(source, m)?);
    Ok(Output::json(&DivisibleOut { divisible: v.divisible, witness: v.witness, obstruction_row: v.obstruction }, 0))
}

/// CSV with sparse `dmax_even_k*` and `dmax_odd_k*` columns.
pub fn rows_to_csv(rows: &[ClassRow]) -> String {
    let even: BTreeSet<usize> = rows.iter().flat_map(|r| r.dmax_even.keys().copied()).collect();
    let odd: BTreeSet<usize> = rows.iter().flat_map(|r| r.dmax_odd.keys().copied()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["id", "polynomial", "m", "weight", "divisible"].iter().map(|s| s.to_string()).collect();
    header.extend(even.iter().map(|k| format!("dmax_even_k{k}")));
    header.extend(odd.iter().map(|k| format!("dmax_odd_k{k}")));
    w.write_record(&header).expect("in-memory write");
    let cell = |v: Option<&Option<usize>>| match v {
        Some(Some(d)) => d.to_string(),
        Some(None) => "null".into(),
        None => String::new(),
    };
    for (i, r) in rows.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string(), r.polynomial.clone(), r.m.to_string(), r.weight.to_string(), r.divisible_level3.to_string()];
        rec.extend(even.iter().map(|k| cell(r.dmax_even.get(k))));
        rec.extend(odd.iter().map(|k| cell(r.dmax_odd.get(k))));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn summary_table(rows: &[ClassRow]) -> String {
    let mut s = String::from("id  c   m  r   div    dmax even / odd            polynomial\n");
    for (i, r) in rows.iter().enumerate() {
        let seq = |t: &std::collections::BTreeMap<usize, Option<usize>>| {
            t.values().map(|d| d.map_or("-".into(), |x| x.to_string())).collect::<Vec<_>>().join("")
        };
        s += &format!(
            "{:<3} {:<3} {:<2} {:<3} {:<6} {:<12} / {:<12} {}{}\n",
            i + 1,
            r.weight,
            r.m,
            r.r,
            r.divisible_level3,
            seq(&r.dmax_even),
            seq(&r.dmax_odd),
            r.polynomial,
            if r.unresolved { "  (possibly equivalent to another row)" } else { "" }
        );
    }
    s
}

#[derive(Serialize)]
struct ClassifyOut<'a> {
    complete: bool,
    rows: &'a [ClassRow],
}

#[allow(clippy::too_many_arguments)]
fn classify_cmd(
    max_c: usize,
    heavy: bool,
    out: Option<&Path>,
    format: Option<Format>,
    cap: usize,
    budget: Option<usize>,
    checkpoint: Option<&Path>,
    seed: u64,
) -> CliResult<Output> {
    let mut opts = ClassifyOptions::new(max_c);
    opts.heavy = heavy;
    opts.checkpoint = checkpoint.map(Path::to_path_buf);
    opts.sweep = SweepOptions { seed, ..SweepOptions::default() };
    if let Some(b) = budget {
        opts.sweep.budget = b;
    }
    let report = classify::classify_with(&opts)?;
    let rows: Vec<ClassRow> = report.classes.iter().map(|c| classify::describe_class(c, cap)).collect::<Result<_, _>>()?;
    let complete = report.exhaustive && rows.iter().all(|r| !r.unresolved);
    let status = if complete { 0 } else { 3 };
    let Some(path) = out else {
        return Ok(Output::json(&ClassifyOut { complete, rows: &rows }, status));
    };
    let format = format.unwrap_or(if path.extension().is_some_and(|e| e == "csv") { Format::Csv } else { Format::Json });
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("serializable") + "\n",
        Format::Csv => rows_to_csv(&rows),
    };
    write(path, &text)?;
    let mut stdout = format!("{} classes with c <= {max_c}\n", rows.len());
    stdout += &summary_table(&rows);
    if !complete {
        stdout += "PARTIAL RESULT: search budget exhausted or equivalence undecided\n";
    }
    Ok(Output { stdout, status })
}

#[derive(Serialize)]
struct Rm36Row {
    id: usize,
    representative: String,
    weight: usize,
    members_seen: usize,
    unresolved: bool,
}

fn classify_rm36_cmd(max_weight: usize) -> CliResult<Output> {
    let classes = classify::classify_rm36(max_weight)?;
    let rows: Vec<Rm36Row> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| Rm36Row {
            id: i + 1,
            representative: c.representative.to_string(),
            weight: c.weight,
            members_seen: c.member_count_seen,
            unresolved: c.unresolved,
        })
        .collect();
    let status = if rows.iter().any(|r| r.unresolved) { 3 } else { 0 };
    Ok(Output::json(&rows, status))
}

fn simulate(code: &Path, variant: VariantArg, shots: usize, noise: f64, seed: u64, convention: ConventionArg) -> CliResult<Output> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(CliError::Usage(format!("noise {noise} is not a probability")));
    }
    let code = load_code(code)?;
    let config = ProtocolConfig {
        variant: match variant {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Delayed => Variant::Delayed,
        },
        noise,
        convention: match convention {
            ConventionArg::Minus => Convention::Minus,
            ConventionArg::Plus => Convention::Plus,
        },
    };
    Ok(Output::json(&run_shots(&code, &config, shots, seed)?, 0))
}

/// Runs one command.
pub fn run(cli: &Cli) -> CliResult<Output> {
    if let Some(n) = cli.workers {
        // The global pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match &cli.command {
        Command::Check { matrix } => check(matrix),
        Command::Descend { source, m, puncture, odd, out } => descend(source, *m, puncture, *odd, out.as_deref()),
        Command::Distance { code, cap } => Ok(Output::json(&DistanceOut::from(z_distance(&load_code(code)?, *cap)?), 0)),
        Command::Dmax { source, m, k, parity, cap } => dmax(source, *m, *k, (*parity).into(), *cap),
        Command::Divisible { source, m } => divisible(source, *m),
        Command::Classify { max_c, heavy, out, format, cap, budget, checkpoint, seed } => {
            classify_cmd(*max_c, *heavy, out.as_deref(), *format, *cap, *budget, checkpoint.as_deref(), *seed)
        }
        Command::ClassifyRm36 { max_weight } => classify_rm36_cmd(*max_weight),
        Command::Simulate { code, variant, shots, noise, seed, convention } => {
            simulate(code, *variant, *shots, *noise, *seed, *convention)
        }
    }
}
