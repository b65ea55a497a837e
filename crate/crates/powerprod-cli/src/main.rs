//! Command-line front end: exact generation of power-product matrices,
//! determinant reports, sparsity tables, polynomial basis conversion,
//! verification sweeps, and the determinant-conjecture explorer.
//!
//! Exit codes: 0 on success, 1 when a verification check fails (the
//! counterexample is in the report), 2 on usage or configuration errors.
//! Identical invocations produce byte-identical output.

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use powerprod::basis::{poly_from_json, poly_to_json_string, BasisTag, Conversion, PolyJson};
use powerprod::compositions::{binomial, count_weak_compositions, enumerate_b};
use powerprod::determinant::{
    conjecture_explore, det_bareiss, det_v, det_v2_closed, factorize, ConjectureReportJson,
    FactoredIntegerJson,
};
use powerprod::matrix::{
    build_v, build_vhat, exponent_set_as_matrix, matrix_to_csv, ExponentSetJson, MatrixJson,
};
use powerprod::report::SuiteReport;
use powerprod::structure::{
    canonical_block_order, nnz_count_v, sparsity_row, sparsity_table, sparsity_table_csv,
    SparsityRowJson,
};

#[derive(Parser)]
#[command(
    name = "powerprod",
    version,
    about = "Exact power-product matrices: generation, determinants, sparsity, basis conversion, verification"
)]
struct Cli {
    /// Output format; csv applies to gen and sparsity tables only.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Largest matrix side any full-matrix route may allocate.
    #[arg(
        long,
        global = true,
        env = "POWERPROD_SIZE_CAP",
        default_value_t = 5000
    )]
    size_cap: usize,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit B(n,d) and V(n,d) or the scaled variant.
    Gen(GenArgs),
    /// Exact determinant of V(n,d) with its prime factorization.
    Det(DetArgs),
    /// Nonzero counts and exact sparsity, single pair or a table.
    Sparsity(SparsityArgs),
    /// Convert a polynomial file between the monomial and linear-power bases.
    Basis(BasisArgs),
    /// Run verification sweeps and report pass/fail with counterexamples.
    Verify(VerifyArgs),
    /// Factor det V(n,d) across n and derive the prime-exponent polynomials.
    Conjecture(ConjectureArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GenWhat {
    /// The power-product matrix V(n,d).
    V,
    /// V(n,d) with columns scaled by multinomial coefficients.
    Vhat,
    /// Only the exponent set B(n,d).
    B,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OrderChoice {
    /// Descending lexicographic enumeration order.
    Lex,
    /// Support-size groups sorted logically reverse lexicographically.
    Canonical,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: u32,
    #[arg(long, value_enum, default_value_t = GenWhat::V)]
    what: GenWhat,
    #[arg(long, value_enum, default_value_t = OrderChoice::Lex)]
    order: OrderChoice,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DetMethod {
    /// Multiply small diagonal-block determinants (fast, default).
    Blocks,
    /// Fraction-free elimination on the full matrix.
    Bareiss,
    /// Run both and require exact agreement.
    Both,
}

#[derive(Args)]
struct DetArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: u32,
    #[arg(long, value_enum, default_value_t = DetMethod::Blocks)]
    method: DetMethod,
    /// Also compare against the closed form for two bins (needs n = 2).
    #[arg(long)]
    check_closed_form: bool,
}

#[derive(Args)]
struct SparsityArgs {
    #[arg(long, conflicts_with_all = ["n_range", "d_range"])]
    n: Option<usize>,
    #[arg(long, conflicts_with_all = ["n_range", "d_range"])]
    d: Option<u32>,
    /// Inclusive range `lo..hi` of n for a table sweep.
    #[arg(long, value_parser = parse_range_usize, requires = "d_range")]
    n_range: Option<RangeInclusive<usize>>,
    /// Inclusive range `lo..hi` of d for a table sweep.
    #[arg(long, value_parser = parse_range_u32, requires = "n_range")]
    d_range: Option<RangeInclusive<u32>>,
    /// Also count nonzeros entry by entry and compare with the formula.
    #[arg(long)]
    check_count: bool,
}

#[derive(Args)]
struct BasisArgs {
    /// Polynomial JSON file to read.
    #[arg(long)]
    input: PathBuf,
    /// Basis to convert into.
    #[arg(long, value_enum)]
    to: TargetBasis,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TargetBasis {
    Monomial,
    LinearPower,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SuiteChoice {
    All,
    /// Generating-function identity for signless Stirling numbers.
    Gf,
    Rearrangement,
    Delta,
    Couples,
    Involution,
    Blocks,
    Sparsity,
    /// Inverse support containment via exact rational inversion.
    Inverse,
    /// Block-product determinant against full elimination.
    DetOracle,
    /// Closed determinant forms for A_k(a,b) and V(2,d).
    DetClosed,
    /// Basis conversion round trips and the product-monomial form.
    Basis,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
    suite: SuiteChoice,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    d_max: Option<u32>,
    #[arg(long)]
    m_max: Option<usize>,
    /// Random cases per (n, d) for the basis round-trip suite.
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    n_max: usize,
}

fn parse_range_usize(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

fn parse_range_u32(s: &str) -> Result<RangeInclusive<u32>, String> {
    let r = parse_range_usize(s)?;
    Ok(*r.start() as u32..=*r.end() as u32)
}

enum Failure {
    /// Bad arguments, bad files, cap breaches: exit 2.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

struct Outcome {
    body: String,
    all_ok: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, all_ok: true }
    }

    fn verdict(body: String, all_ok: bool) -> Self {
        Self { body, all_ok }
    }
}

fn json_pretty<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn check_cap(n: usize, d: u32, cap: usize) -> Result<usize, Failure> {
    let s = count_weak_compositions(n, d)?;
    match s.to_string().parse::<usize>() {
        Ok(side) if side <= cap => Ok(side),
        _ => Err(Failure::Usage(format!(
            "matrix side {s} exceeds the size cap {cap}; raise --size-cap if intended"
        ))),
    }
}

/// The block route never touches the full matrix, but its diagonal blocks
/// have side C(d-1, k-1); cap the largest one the same way.
fn check_block_cap(n: usize, d: u32, cap: usize) -> Result<(), Failure> {
    let largest = (1..=n.min(d as usize))
        .map(|k| binomial(u64::from(d) - 1, k as u64 - 1))
        .max()
        .unwrap_or_default();
    if largest
        .to_string()
        .parse::<usize>()
        .is_ok_and(|side| side <= cap)
    {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "largest diagonal block side {largest} exceeds the size cap {cap}; \
             raise --size-cap if intended"
        )))
    }
}

#[derive(Serialize)]
struct GenReport {
    n: usize,
    d: u32,
    what: &'static str,
    b: ExponentSetJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<MatrixJson>,
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> CmdResult {
    check_cap(args.n, args.d, cli.size_cap)?;
    let order = match args.order {
        OrderChoice::Lex => enumerate_b(args.n, args.d)?,
        OrderChoice::Canonical => canonical_block_order(&enumerate_b(args.n, args.d)?)?,
    };
    let (what, matrix) = match args.what {
        GenWhat::V => ("v", Some(build_v(args.n, args.d, &order)?)),
        GenWhat::Vhat => ("vhat", Some(build_vhat(args.n, args.d, &order)?)),
        GenWhat::B => ("b", None),
    };
    let body = match cli.format {
        OutputFormat::Json => json_pretty(&GenReport {
            n: args.n,
            d: args.d,
            what,
            b: ExponentSetJson::from_set(&order),
            matrix: matrix.as_ref().map(MatrixJson::from_matrix),
        })?,
        OutputFormat::Csv => match &matrix {
            Some(m) => matrix_to_csv(m),
            None => matrix_to_csv(&exponent_set_as_matrix(&order)),
        },
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct DetReport {
    n: usize,
    d: u32,
    method: &'static str,
    value: String,
    factorization: FactoredIntegerJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    elimination_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    methods_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_matches: Option<bool>,
}

fn cmd_det(cli: &Cli, args: &DetArgs) -> CmdResult {
    if cli.format == OutputFormat::Csv {
        return Err(Failure::Usage("det reports are JSON only".into()));
    }
    if args.check_closed_form && args.n != 2 {
        return Err(Failure::Usage(
            "--check-closed-form applies to n = 2 only".into(),
        ));
    }
    let blocks_needed = matches!(args.method, DetMethod::Blocks | DetMethod::Both);
    let elim_needed = matches!(args.method, DetMethod::Bareiss | DetMethod::Both);

    let blocks_val = if blocks_needed {
        check_block_cap(args.n, args.d, cli.size_cap)?;
        Some(det_v(args.n, args.d)?)
    } else {
        None
    };
    let elim_val = if elim_needed {
        check_cap(args.n, args.d, cli.size_cap)?;
        let order = canonical_block_order(&enumerate_b(args.n, args.d)?)?;
        Some(det_bareiss(&build_v(args.n, args.d, &order)?)?)
    } else {
        None
    };

    let method = match args.method {
        DetMethod::Blocks => "blocks",
        DetMethod::Bareiss => "bareiss",
        DetMethod::Both => "both",
    };

    let (value, factorization) = match (&blocks_val, &elim_val) {
        (Some(f), _) => (f.value().clone(), FactoredIntegerJson::from(f)),
        (None, Some(v)) => {
            let f = factorize(v)?;
            (v.clone(), FactoredIntegerJson::from(&f))
        }
        (None, None) => unreachable!("some method always runs"),
    };

    let methods_agree = match (&blocks_val, &elim_val) {
        (Some(f), Some(v)) => Some(f.value() == v),
        _ => None,
    };
    let closed = if args.check_closed_form {
        Some(det_v2_closed(args.d))
    } else {
        None
    };
    let closed_form_matches = closed.as_ref().map(|c| c == &value);

    let all_ok = methods_agree.unwrap_or(true) && closed_form_matches.unwrap_or(true);
    let report = DetReport {
        n: args.n,
        d: args.d,
        method,
        value: value.to_string(),
        factorization,
        elimination_value: elim_val.as_ref().map(|v| v.to_string()),
        methods_agree,
        closed_form: closed.as_ref().map(|c| c.to_string()),
        closed_form_matches,
    };
    Ok(Outcome::verdict(json_pretty(&report)?, all_ok))
}

#[derive(Serialize)]
struct SparsitySingleReport {
    #[serde(flatten)]
    row: SparsityRowJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count_matches: Option<bool>,
}

#[derive(Serialize)]
struct SparsityTableReport {
    rows: Vec<SparsityRowJson>,
}

fn cmd_sparsity(cli: &Cli, args: &SparsityArgs) -> CmdResult {
    match (args.n, args.d, &args.n_range, &args.d_range) {
        (Some(n), Some(d), None, None) => {
            let row = sparsity_row(n, d)?;
            let (direct, matches) = if args.check_count {
                check_cap(n, d, cli.size_cap)?;
                let direct = nnz_count_v(n, d)?;
                let matches = row.nnz.to_string() == direct.to_string();
                (Some(direct.to_string()), Some(matches))
            } else {
                (None, None)
            };
            let all_ok = matches.unwrap_or(true);
            let body = match cli.format {
                OutputFormat::Json => json_pretty(&SparsitySingleReport {
                    row: SparsityRowJson::from(&row),
                    direct_count: direct,
                    count_matches: matches,
                })?,
                OutputFormat::Csv => sparsity_table_csv(std::slice::from_ref(&row)),
            };
            Ok(Outcome::verdict(body, all_ok))
        }
        (None, None, Some(nr), Some(dr)) => {
            if args.check_count {
                return Err(Failure::Usage("--check-count needs a single (n, d)".into()));
            }
            let rows = sparsity_table(nr.clone(), dr.clone())?;
            let body = match cli.format {
                OutputFormat::Json => json_pretty(&SparsityTableReport {
                    rows: rows.iter().map(SparsityRowJson::from).collect(),
                })?,
                OutputFormat::Csv => sparsity_table_csv(&rows),
            };
            Ok(Outcome::ok(body))
        }
        _ => Err(Failure::Usage(
            "pass either --n and --d, or --n-range and --d-range".into(),
        )),
    }
}

fn cmd_basis(cli: &Cli, args: &BasisArgs) -> CmdResult {
    if cli.format == OutputFormat::Csv {
        return Err(Failure::Usage("basis conversion emits JSON only".into()));
    }
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    // check the cap from the header before any matrix-sized allocation
    let shell: PolyJson = serde_json::from_str(&text)?;
    check_cap(shell.n, shell.d, cli.size_cap)?;
    let poly = poly_from_json(&shell)?;
    let conv = Conversion::new(poly.n(), poly.d())?;
    let target = match args.to {
        TargetBasis::Monomial => BasisTag::Monomial,
        TargetBasis::LinearPower => BasisTag::LinearPower,
    };
    let converted = match (poly.basis(), target) {
        (BasisTag::Monomial, BasisTag::LinearPower) => conv.to_linear_power(&poly)?,
        (BasisTag::LinearPower, BasisTag::Monomial) => conv.from_linear_power(&poly)?,
        _ => poly,
    };
    Ok(Outcome::ok(poly_to_json_string(&converted)?))
}

#[derive(Serialize)]
struct VerifyReport {
    suites: Vec<SuiteReport>,
    all_passed: bool,
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> CmdResult {
    if cli.format == OutputFormat::Csv {
        return Err(Failure::Usage("verification reports are JSON only".into()));
    }
    use powerprod::{basis, determinant, identities, structure};

    let mut suites = Vec::new();
    let run = |choice: SuiteChoice| args.suite == SuiteChoice::All || args.suite == choice;

    // suites that materialize full matrices must respect the size cap at
    // their largest (n, d) pair
    if run(SuiteChoice::Blocks) {
        check_cap(
            args.n_max.unwrap_or(6),
            args.d_max.unwrap_or(6),
            cli.size_cap,
        )?;
    }
    if run(SuiteChoice::DetOracle) {
        check_cap(
            args.n_max.unwrap_or(5),
            args.d_max.unwrap_or(5),
            cli.size_cap,
        )?;
    }

    if run(SuiteChoice::Gf) {
        suites.push(identities::sweep_gf(
            args.m_max.unwrap_or(8),
            args.n_max.unwrap_or(12) as u64,
        ));
    }
    if run(SuiteChoice::Rearrangement) {
        suites.push(identities::sweep_rearrangement(args.n_max.unwrap_or(7)));
    }
    if run(SuiteChoice::Delta) {
        suites.push(identities::sweep_delta(args.n_max.unwrap_or(7)));
    }
    if run(SuiteChoice::Couples) {
        suites.push(identities::sweep_couples(args.n_max.unwrap_or(5)));
    }
    if run(SuiteChoice::Involution) {
        suites.push(identities::sweep_involution(args.n_max.unwrap_or(5)));
    }
    if run(SuiteChoice::Blocks) {
        suites.push(structure::sweep_blocks(
            args.n_max.unwrap_or(6),
            args.d_max.unwrap_or(6),
        ));
    }
    if run(SuiteChoice::Sparsity) {
        suites.push(structure::sweep_sparsity(
            args.n_max.unwrap_or(8),
            args.d_max.unwrap_or(8),
        ));
    }
    if run(SuiteChoice::Inverse) {
        suites.push(structure::sweep_inverse_pattern(
            args.n_max.unwrap_or(5),
            args.d_max.unwrap_or(5),
            cli.size_cap,
        ));
    }
    if run(SuiteChoice::DetOracle) {
        suites.push(determinant::sweep_det_oracle(
            args.n_max.unwrap_or(5),
            args.d_max.unwrap_or(5),
        ));
    }
    if run(SuiteChoice::DetClosed) {
        suites.push(determinant::sweep_det_a_closed(6, -3..=6, -3..=6));
        suites.push(determinant::sweep_det_v2(args.d_max.unwrap_or(12)));
    }
    if run(SuiteChoice::Basis) {
        suites.push(basis::sweep_roundtrip(
            args.n_max.unwrap_or(4),
            args.d_max.unwrap_or(4),
            args.cases.unwrap_or(100),
            args.seed.unwrap_or(20240704),
        ));
        suites.push(basis::sweep_product_monomial(args.n_max.unwrap_or(5)));
    }

    let all_passed = suites.iter().all(|s| s.passed);
    let body = json_pretty(&VerifyReport { suites, all_passed })?;
    Ok(Outcome::verdict(body, all_passed))
}

fn cmd_conjecture(cli: &Cli, args: &ConjectureArgs) -> CmdResult {
    if cli.format == OutputFormat::Csv {
        return Err(Failure::Usage("conjecture reports are JSON only".into()));
    }
    check_block_cap(args.d as usize, args.d, cli.size_cap)?;
    let report = conjecture_explore(args.d, args.n_max)?;
    let body = json_pretty(&ConjectureReportJson::from(&report))?;
    Ok(Outcome::verdict(body, report.conjecture_holds))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Det(args) => cmd_det(cli, args),
        Command::Sparsity(args) => cmd_sparsity(cli, args),
        Command::Basis(args) => cmd_basis(cli, args),
        Command::Verify(args) => cmd_verify(cli, args),
        Command::Conjecture(args) => cmd_conjecture(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut body = outcome.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{body}");
            }
            if outcome.all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
