//! `gadic-bases`: build partitions, decompose integers, run the verification
//! drivers and export tables.
//!
//! Exit codes: 0 success, 1 integer outside the proven range, 2 invalid
//! parameters or usage, 3 invariant violation or failed verification.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gadic_bases::checks;
use gadic_bases::partition::{block_partition, residue_partition, thm1_partition, thm2_partition};
use gadic_bases::sumset::{self, BoundedBitset};
use gadic_bases::{
    BigUint, DecomposeError, DecompositionCertificate, PartitionError, PartitionSpec, Thm1Decomposer, Thm1Params,
    Thm2Decomposer, Thm2Params,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gadic-bases", version, about = "g-adic bases from partitions of the naturals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a partition as JSON.
    Construct {
        kind: Construction,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Decompose an integer into h parts and print the certificate.
    Decompose {
        kind: Decomposer,
        /// Decimal integer of any length.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification driver; exits 0 iff every check passes.
    Verify {
        kind: Check,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Export a table (CSV by default).
    Report {
        kind: Table,
        /// Set whose sums are tabulated.
        #[arg(long, value_enum, default_value = "thm2")]
        set: SetKind,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Thm1,
    Thm2,
    Residue,
    Block,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decomposer {
    Thm1,
    Thm2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Thm1,
    Thm2,
    Lemma1a,
    Lemma1c,
    Minimality,
    Faults,
    Roundtrip,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Rep,
    Growth,
    Minimality,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Naturals,
    Residue,
    Block,
    Thm1,
    Thm2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    g: Option<u32>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    m1: Option<u64>,
    #[arg(long)]
    gap: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// Upper end of the checked or tabulated range.
    #[arg(long = "N")]
    bound: Option<u64>,
    /// Samples per case, mutated certificates, or random bignums.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest exponent of sampled bignums.
    #[arg(long)]
    max_exp: Option<u64>,
    /// Probe bound B for minimality; threshold limit C for lemma1c.
    #[arg(long = "B")]
    probe_bound: Option<u64>,
    /// Cell whose member count is tabulated by `report growth`.
    #[arg(long, default_value_t = 0)]
    cell: u32,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

enum Failure {
    OutOfRange(String),
    Invalid(String),
    Invariant(String),
    Io(io::Error),
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<sumset::SumsetError> for Failure {
    fn from(e: sumset::SumsetError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::OutOfRange { .. } => Failure::OutOfRange(e.to_string()),
            DecomposeError::InvalidParams(_) | DecomposeError::Gadic(_) | DecomposeError::UnknownCase(_) => {
                Failure::Invalid(e.to_string())
            }
            DecomposeError::InvariantViolation { ref trace, .. } => {
                let dump = serde_json::to_string_pretty(trace).unwrap_or_default();
                Failure::Invariant(format!("{e}\ntrace:\n{dump}"))
            }
            DecomposeError::Infeasible(_) | DecomposeError::Unreachable { .. } => Failure::Invariant(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

impl ParamArgs {
    fn thm1(&self) -> Result<Thm1Params, Failure> {
        let m1 = self.m1.unwrap_or(65);
        Ok(Thm1Params::new(
            self.g.unwrap_or(2),
            self.h.unwrap_or(4),
            self.t.unwrap_or(2),
            m1,
            self.gap.unwrap_or(m1),
        )?)
    }

    fn thm2(&self) -> Result<Thm2Params, Failure> {
        Ok(Thm2Params::new(
            self.g.unwrap_or(2),
            self.h.unwrap_or(5),
            self.t.unwrap_or(2),
            self.m.unwrap_or(7),
        )?)
    }

    fn g(&self, default: u32) -> Result<u32, Failure> {
        match self.g.unwrap_or(default) {
            g if g >= 2 => Ok(g),
            g => Err(Failure::Invalid(format!("g >= 2 violated (g = {g})"))),
        }
    }

    fn construct(&self, kind: Construction) -> Result<(PartitionSpec, u32), Failure> {
        Ok(match kind {
            Construction::Thm1 => {
                let p = self.thm1()?;
                (thm1_partition(&p)?, p.g)
            }
            Construction::Thm2 => {
                let p = self.thm2()?;
                (thm2_partition(&p)?, p.g)
            }
            Construction::Residue => (residue_partition(self.h.unwrap_or(3))?, self.g(2)?),
            Construction::Block => (block_partition(self.h.unwrap_or(4), self.t.unwrap_or(2))?, self.g(3)?),
        })
    }
}

/// Writes to `--out` or stdout.
fn sink(out: &OutArgs) -> io::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> Outcome {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn json_only(out: &OutArgs, what: &str) -> Outcome {
    match out.format {
        Some(Format::Csv) => Err(Failure::Invalid(format!("{what} has no CSV output"))),
        _ => Ok(()),
    }
}

/// JSON report, then a nonzero exit when it did not pass.
fn finish<T: Serialize>(out: &OutArgs, report: &T, passed: bool, what: &str) -> Outcome {
    write_json(out, report)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("{what} failed")))
    }
}

fn construct(kind: Construction, params: &ParamArgs, out: &OutArgs) -> Outcome {
    json_only(out, "construct")?;
    let (spec, _) = params.construct(kind)?;
    write_json(out, &spec)
}

fn decompose(kind: Decomposer, n: &str, params: &ParamArgs, out: &OutArgs) -> Outcome {
    json_only(out, "decompose")?;
    let n: BigUint = n
        .parse()
        .map_err(|_| Failure::Invalid(format!("n must be a nonnegative decimal integer, got {n:?}")))?;
    let cert: DecompositionCertificate = match kind {
        Decomposer::Thm1 => Thm1Decomposer::new(&params.thm1()?)?.decompose(&n)?,
        Decomposer::Thm2 => Thm2Decomposer::new(&params.thm2()?)?.decompose(&n)?,
    };
    write_json(out, &cert)
}

fn verify(kind: Check, params: &ParamArgs, run: &RunArgs, out: &OutArgs) -> Outcome {
    if kind != Check::Thm1 {
        json_only(out, "this check")?;
    }
    match kind {
        Check::Thm2 => {
            let p = params.thm2()?;
            let r = checks::verify_thm2(&p, run.bound.unwrap_or(131_072))?;
            match run.samples {
                Some(samples) => {
                    let random = checks::verify_thm2_random(&p, samples, run.seed, run.max_exp.unwrap_or(400))?;
                    let passed = r.passed && random.passed;
                    #[derive(Serialize)]
                    struct Both {
                        exhaustive: checks::Thm2Report,
                        random: checks::RandomReport,
                    }
                    finish(out, &Both { exhaustive: r, random }, passed, "thm2 verification")
                }
                None => finish(out, &r, r.passed, "thm2 verification"),
            }
        }
        Check::Thm1 => {
            let p = params.thm1()?;
            let r = checks::verify_thm1(&p, run.samples.unwrap_or(1000), run.seed, run.max_exp.unwrap_or(400))?;
            if out.format == Some(Format::Csv) {
                let mut w = csv::Writer::from_writer(sink(out)?);
                w.write_record(["case", "reachable", "samples", "valid", "variants", "note"])?;
                for row in &r.rows {
                    let variants: Vec<String> = row.variants.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    w.write_record([
                        row.case.clone(),
                        row.reachable.to_string(),
                        row.samples.to_string(),
                        row.valid.to_string(),
                        variants.join(";"),
                        row.note.clone().unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
                return if r.passed {
                    Ok(())
                } else {
                    Err(Failure::Invariant(format!("thm1 verification failed: {:?}", r.failures.first())))
                };
            }
            finish(out, &r, r.passed, "thm1 verification")
        }
        Check::Lemma1a => {
            let r = checks::lemma1_disjoint(params.g(2)?, params.h.unwrap_or(3), run.bound.unwrap_or(1_000_000))?;
            finish(out, &r, r.passed, "disjointness check")
        }
        Check::Lemma1c => {
            let r = checks::lemma1_basis(
                params.g(2)?,
                params.h.unwrap_or(2),
                run.bound.unwrap_or(1 << 20),
                run.probe_bound.unwrap_or(100),
            )?;
            finish(out, &r, r.passed, "basis check")
        }
        Check::Minimality => {
            let r = checks::minimality_block_probe(
                params.g(3)?,
                params.h.unwrap_or(4),
                params.t.unwrap_or(2),
                run.bound.unwrap_or(3u64.pow(12)),
                run.probe_bound.unwrap_or(200),
            )?;
            finish(out, &r, r.passed, "minimality probe")
        }
        Check::Faults => {
            let r = checks::fault_injection(run.samples.unwrap_or(100), run.seed);
            finish(out, &r, r.passed, "fault injection")
        }
        Check::Roundtrip => {
            let bases: Vec<u32> = match params.g {
                Some(g) => vec![params.g(g)?],
                None => vec![2, 3, 5, 10],
            };
            let r = checks::gadic_round_trip(
                &bases,
                run.bound.unwrap_or(100_000),
                run.samples.unwrap_or(50),
                run.max_exp.unwrap_or(1000).min(u32::MAX as u64) as u32,
                run.seed,
            );
            finish(out, &r, r.passed, "round trip")
        }
    }
}

/// The set `A` and its base for `report`: all positive integers, or the
/// union of the `A_g(W_i)` over a partition.
fn report_set(set: SetKind, params: &ParamArgs) -> Result<(Option<PartitionSpec>, u32), Failure> {
    let kind = match set {
        SetKind::Naturals => return Ok((None, params.g(2)?)),
        SetKind::Residue => Construction::Residue,
        SetKind::Block => Construction::Block,
        SetKind::Thm1 => Construction::Thm1,
        SetKind::Thm2 => Construction::Thm2,
    };
    let (spec, g) = params.construct(kind)?;
    Ok((Some(spec), g))
}

fn union(spec: &Option<PartitionSpec>, g: u32, bound: u64) -> BoundedBitset {
    match spec {
        Some(spec) => sumset::restrict_union(spec, g, bound),
        None => sumset::restrict(|n| n >= 1, bound),
    }
}

fn fold(spec: &Option<PartitionSpec>, params: &ParamArgs) -> u32 {
    match spec {
        Some(spec) => params.h.unwrap_or(spec.h()),
        None => params.h.unwrap_or(2),
    }
}

fn report(kind: Table, set: SetKind, params: &ParamArgs, run: &RunArgs, out: &OutArgs) -> Outcome {
    let (spec, g) = report_set(set, params)?;
    let format = out.format.unwrap_or(Format::Csv);
    match kind {
        Table::Rep => {
            let bound = run.bound.unwrap_or(64);
            let h = fold(&spec, params);
            let table = sumset::rep_table(&union(&spec, g, bound), h, bound)?;
            #[derive(Serialize)]
            struct Row {
                n: u64,
                r_h: u64,
            }
            // n = 0 is omitted: A holds positive integers only
            let rows: Vec<Row> = (1..=bound).map(|n| Row { n, r_h: table[n as usize] }).collect();
            emit(out, format, &rows)
        }
        Table::Growth => {
            let steps = run.bound.unwrap_or(20).min(63) as u32;
            let rows = match &spec {
                Some(spec) => {
                    if run.cell >= spec.h() {
                        return Err(Failure::Invalid(format!("cell {} >= h = {}", run.cell, spec.h())));
                    }
                    let cell = run.cell;
                    checks::growth_table(|w| spec.cell(w) == cell, g, steps)
                }
                None => checks::growth_table(|_| true, g, steps),
            };
            if let Some(slope) = checks::log_log_slope(&rows) {
                eprintln!("log-log slope {slope:.6}");
            }
            emit(out, format, &rows)
        }
        Table::Minimality => {
            let bound = run.bound.unwrap_or(3u64.pow(12));
            let h = fold(&spec, params);
            let r = sumset::minimality_probe(&union(&spec, g, bound), h, bound, run.probe_bound.unwrap_or(200))?;
            match format {
                Format::Json => write_json(out, &r),
                Format::Csv => emit(out, format, &r.entries),
            }
        }
    }
}

fn emit<T: Serialize>(out: &OutArgs, format: Format, rows: &[T]) -> Outcome {
    match format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(out)?);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct { kind, params, out } => construct(*kind, params, out),
        Command::Decompose { kind, n, params, out } => decompose(*kind, n, params, out),
        Command::Verify { kind, params, run, out } => verify(*kind, params, run, out),
        Command::Report {
            kind,
            set,
            params,
            run,
            out,
        } => report(*kind, *set, params, run, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::OutOfRange(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
