//! Command-line front end for `circwalk`.
//!
//! All data goes to the output stream (or the `--out` file); all
//! diagnostics go to the error stream. Exit codes: 0 success, 1 computation
//! error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use circwalk::classifier::{
    classify_with, verify_classification, ClassifierConfig, Evidence, VerifyBudget,
};
use circwalk::diophantine::{
    best_time_on_lattice, first_time_reaching, scan_lattice_capped, SearchError, DEFAULT_SCAN_CAP,
};
use circwalk::graph::{symmetric_sets, SetSpec};
use circwalk::spectral::{
    spectrum_with_tol, ParityConflict, DEFAULT_EQUALITY_TOL, DEFAULT_INTEGRALITY_TOL,
};
use circwalk::{
    transition_entry, CirculantGraph, Citation, GraphError, LatticeKind, QRange, TransferRecord,
    Verdict,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Environment variable overriding tolerances: `"EQ"` or `"EQ,INT"`.
pub const TOLERANCE_ENV: &str = "CIRCULANT_TOL";

/// Largest order accepted by `census` (2^(n/2) graphs are enumerated).
pub const CENSUS_MAX_ORDER: usize = 40;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error("{0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Computation(_) | CliError::Io(_) => EXIT_COMPUTATION,
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Computation(e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("no records to write")]
    EmptyRecords,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "circwalk",
    version,
    about = "Quantum walks on circulant graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of Cay(Z_n, S) in Fourier order.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide PST / PGST between 0 and n/2.
    Classify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Attach numerical evidence from a lattice scan.
        #[arg(long)]
        verify: bool,
        /// Largest lattice index scanned by --verify.
        #[arg(long, requires = "verify")]
        qmax: Option<i64>,
    },
    /// Classify every symmetric connection set on Z_n (JSON Lines).
    Census {
        #[arg(long)]
        n: usize,
    },
    /// Amplitude of exp(-itA) between two vertices.
    Fidelity {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, allow_negative_numbers = true)]
        time: f64,
    },
    /// Best (or first good) time on a lattice.
    Search {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Stop at the first q with fidelity >= 1 - eps.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// One CSV row per lattice point.
    Scan {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Classify { .. } => "classify",
            Command::Census { .. } => "census",
            Command::Fidelity { .. } => "fidelity",
            Command::Search { .. } => "search",
            Command::Scan { .. } => "scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Order of the cyclic group.
    #[arg(long)]
    n: usize,
    /// Connection set, comma separated (e.g. 1,7,9,15).
    #[arg(long, allow_hyphen_values = true)]
    set: String,
}

impl GraphArgs {
    fn build(&self) -> Result<CirculantGraph, CliError> {
        let spec: SetSpec = self
            .set
            .parse()
            .map_err(|e: GraphError| CliError::usage("--set", e.to_string()))?;
        CirculantGraph::new(self.n, &spec.0).map_err(|e| match e {
            GraphError::InvalidOrder(_) => CliError::usage("--n", e.to_string()),
            _ => CliError::usage("--set", e.to_string()),
        })
    }
}

#[derive(Debug, Args)]
struct LatticeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Vertex pair u,v; defaults to 0,n/2 for even n.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    #[arg(long, value_parser = parse_lattice, default_value = "2piZ")]
    lattice: LatticeKind,
    /// First lattice index; 1 for 2piZ, 0 for oddHalfPi by default.
    #[arg(long, allow_negative_numbers = true)]
    qmin: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    qmax: i64,
}

struct LatticeJob {
    graph: CirculantGraph,
    u: usize,
    v: usize,
    kind: LatticeKind,
    range: QRange,
}

impl LatticeArgs {
    fn build(&self) -> Result<LatticeJob, CliError> {
        let graph = self.graph.build()?;
        let n = graph.order();
        let (u, v) = match self.pair {
            Some(p) => p,
            None if n % 2 == 0 => (0, n / 2),
            None => {
                return Err(CliError::usage(
                    "--pair",
                    format!("required for odd n = {n}"),
                ))
            }
        };
        if u >= n || v >= n {
            return Err(CliError::usage(
                "--pair",
                format!("vertices must lie in 0..{n}"),
            ));
        }
        let qmin = self.qmin.unwrap_or(self.lattice.default_qmin());
        let range =
            QRange::new(qmin, self.qmax).map_err(|e| CliError::usage("--qmax", e.to_string()))?;
        Ok(LatticeJob {
            graph,
            u,
            v,
            kind: self.lattice,
            range,
        })
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| format!("expected u,v but got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(u)?, parse(v)?))
}

fn parse_lattice(s: &str) -> Result<LatticeKind, String> {
    s.parse().map_err(|e: SearchError| e.to_string())
}

/// Tolerances in effect for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub equality: f64,
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equality: DEFAULT_EQUALITY_TOL,
            integrality: DEFAULT_INTEGRALITY_TOL,
        }
    }
}

impl Tolerances {
    /// Parse `"EQ"` or `"EQ,INT"`; both must be positive and finite.
    pub fn parse(value: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::usage(
                TOLERANCE_ENV,
                format!("expected EQ or EQ,INT but got {value:?}"),
            )
        };
        let parts: Vec<f64> = value
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if parts.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(bad());
        }
        match parts[..] {
            [eq] => Ok(Tolerances {
                equality: eq,
                ..Tolerances::default()
            }),
            [eq, int] => Ok(Tolerances {
                equality: eq,
                integrality: int,
            }),
            _ => Err(bad()),
        }
    }
}

fn example_for(command: &str) -> &'static str {
    match command {
        "spectrum" => "circwalk spectrum --n 16 --set 1,7,9,15",
        "classify" => "circwalk classify --n 16 --set 1,7,9,15 --verify --qmax 100000",
        "census" => "circwalk census --n 16",
        "fidelity" => "circwalk fidelity --n 4 --set 1,3 --from 0 --to 2 --time 1.5707963267948966",
        "search" => "circwalk search --n 16 --set 1,2,3,4,12,13,14,15 --pair 0,8 --lattice 2piZ --qmin 1 --qmax 10000",
        "scan" => {
            "circwalk scan --n 16 --set 1,2,3,4,12,13,14,15 --pair 0,8 --lattice 2piZ --qmin 7500 --qmax 8000 --out window.csv"
        }
        _ => "circwalk classify --n 16 --set 1,7,9,15",
    }
}

/// Parse `argv` (program name first), run the command and return the exit
/// code. Tolerances come from the `CIRCULANT_TOL` environment variable.
pub fn parse_and_dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let tol = std::env::var(TOLERANCE_ENV).ok();
    dispatch_with_tolerances(argv, tol.as_deref(), out, err)
}

/// As [`parse_and_dispatch`], with the tolerance override passed explicitly.
pub fn dispatch_with_tolerances<I, T>(
    argv: I,
    tolerance_override: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let sub = argv.get(1).and_then(|s| s.to_str()).unwrap_or("");
                    let _ = write!(err, "{}", e.render());
                    let _ = writeln!(err, "example: {}", example_for(sub));
                    EXIT_USAGE
                }
            };
        }
    };
    let name = cli.command.name();
    let result = tolerance_override
        .map(Tolerances::parse)
        .transpose()
        .and_then(|tol| run(cli.command, tol.unwrap_or_default(), out));
    match result {
        Ok(()) => EXIT_OK,
        // the reader went away (e.g. `| head`); nothing left to report
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Usage { .. } = e {
                let _ = writeln!(err, "example: {}", example_for(name));
            }
            e.exit_code()
        }
    }
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    n: usize,
    set: &'a [usize],
    eigenvalues: &'a [f64],
    integral: bool,
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    n: usize,
    set: &'a [usize],
    verdict: Verdict,
    citation: Citation,
    witness_divisor: Option<usize>,
    /// The antipodal pair examined; `null` for odd n.
    pair: Option<(usize, usize)>,
    lattice: Option<LatticeKind>,
    numeric_caveat: bool,
    obstruction: Option<ParityConflict>,
    #[serde(skip_serializing_if = "Skip::skip")]
    evidence: Skip<Option<Evidence>>,
}

/// `evidence` is `null` in `classify` output and absent in `census` lines.
struct Skip<T> {
    value: T,
    omit: bool,
}

impl<T> Skip<T> {
    fn skip(&self) -> bool {
        self.omit
    }
}

impl<T: Serialize> Serialize for Skip<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

fn classify_output<'a>(
    graph: &'a CirculantGraph,
    tol: Tolerances,
    evidence: Option<Option<Evidence>>,
) -> (ClassifyOutput<'a>, circwalk::Classification) {
    let n = graph.order();
    let c = classify_with(
        graph,
        &ClassifierConfig {
            equality_tol: tol.equality,
        },
    );
    let output = ClassifyOutput {
        n,
        set: graph.connection_set(),
        verdict: c.verdict,
        citation: c.citation,
        witness_divisor: c.witness_divisor,
        pair: c.pair.or(n.is_multiple_of(2).then_some((0, n / 2))),
        lattice: c.lattice,
        numeric_caveat: c.numeric_caveat,
        obstruction: c.obstruction,
        evidence: Skip {
            omit: evidence.is_none(),
            value: evidence.flatten(),
        },
    };
    (output, c)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value).map_err(|e| {
        if e.is_io() {
            CliError::Io(e.into())
        } else {
            CliError::Computation(e.to_string())
        }
    })?;
    writeln!(out)?;
    Ok(())
}

fn run(command: Command, tol: Tolerances, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Spectrum { graph, format } => {
            let graph = graph.build()?;
            let s = spectrum_with_tol(&graph, tol.integrality);
            match format {
                Format::Json => write_json(
                    out,
                    &SpectrumOutput {
                        n: s.n,
                        set: graph.connection_set(),
                        eigenvalues: &s.values,
                        integral: s.integral,
                    },
                )?,
                Format::Csv => {
                    writeln!(out, "l,eigenvalue")?;
                    for (l, x) in s.values.iter().enumerate() {
                        writeln!(out, "{l},{x:.16e}")?;
                    }
                }
            }
        }
        Command::Classify {
            graph,
            verify,
            qmax,
        } => {
            let graph = graph.build()?;
            if let Some(q) = qmax {
                if q < 0 {
                    return Err(CliError::usage("--qmax", "must be non-negative"));
                }
            }
            let (mut output, c) = classify_output(&graph, tol, Some(None));
            if verify {
                let budget =
                    qmax.map_or_else(VerifyBudget::default, |q_max| VerifyBudget { q_max });
                output.evidence.value = Some(verify_classification(&graph, &c, budget)?);
            }
            write_json(out, &output)?;
        }
        Command::Census { n } => {
            if !(2..=CENSUS_MAX_ORDER).contains(&n) {
                return Err(CliError::usage(
                    "--n",
                    format!("census needs 2 <= n <= {CENSUS_MAX_ORDER}"),
                ));
            }
            let mut out = BufWriter::new(out);
            for graph in symmetric_sets(n) {
                let (line, _) = classify_output(&graph, tol, None);
                write_json(&mut out, &line)?;
            }
            out.flush()?;
        }
        Command::Fidelity {
            graph,
            from,
            to,
            time,
        } => {
            let graph = graph.build()?;
            let n = graph.order();
            if from >= n {
                return Err(CliError::usage(
                    "--from",
                    format!("vertex must lie in 0..{n}"),
                ));
            }
            if to >= n {
                return Err(CliError::usage(
                    "--to",
                    format!("vertex must lie in 0..{n}"),
                ));
            }
            if !time.is_finite() {
                return Err(CliError::usage("--time", "must be finite"));
            }
            let z = transition_entry(&graph, from, to, time)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            write_json(out, &TransferRecord::new(None, time, z.into()))?;
        }
        Command::Search { lattice, eps } => {
            let job = lattice.build()?;
            if let Some(e) = eps {
                if !(e > 0.0 && e < 1.0) {
                    return Err(CliError::usage("--eps", "must lie in (0, 1)"));
                }
            }
            let lat = job.kind.lattice();
            let first = match eps {
                Some(e) => first_time_reaching(&job.graph, job.u, job.v, &lat, job.range, 1.0 - e)?,
                None => None,
            };
            let record = match first {
                Some(r) => r,
                None => best_time_on_lattice(&job.graph, job.u, job.v, &lat, job.range)?,
            };
            write_json(out, &record)?;
        }
        Command::Scan {
            lattice,
            out: path,
            format,
        } => {
            let job = lattice.build()?;
            if job.range.len() > DEFAULT_SCAN_CAP as u64 {
                return Err(CliError::usage(
                    "--qmax",
                    format!(
                        "scan covers {} points; the cap is {}",
                        job.range.len(),
                        DEFAULT_SCAN_CAP
                    ),
                ));
            }
            let records = scan_lattice_capped(
                &job.graph,
                job.u,
                job.v,
                &job.kind.lattice(),
                job.range,
                DEFAULT_SCAN_CAP,
            )?;
            let mut file;
            let sink: &mut dyn Write = match &path {
                Some(p) => {
                    file = BufWriter::new(File::create(p)?);
                    &mut file
                }
                None => out,
            };
            match format {
                Format::Csv => {
                    emit_scan_csv(&records, sink).map_err(|e| match e {
                        CsvError::Io(io) => CliError::Io(io),
                        other => CliError::Computation(other.to_string()),
                    })?;
                }
                Format::Json => {
                    for r in &records {
                        write_json(sink, r)?;
                    }
                }
            }
            sink.flush()?;
        }
    }
    Ok(())
}

/// Write scan records as CSV: header `q,t,re,im,fidelity`, one LF-terminated
/// row per record, floats with 17 significant digits. Returns the row count.
pub fn emit_scan_csv<W: Write + ?Sized>(
    records: &[TransferRecord],
    sink: &mut W,
) -> Result<usize, CsvError> {
    if records.is_empty() {
        return Err(CsvError::EmptyRecords);
    }
    writeln!(sink, "q,t,re,im,fidelity")?;
    for r in records {
        let q = r.q.map(|q| q.to_string()).unwrap_or_default();
        writeln!(
            sink,
            "{q},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.amplitude.re, r.amplitude.im, r.fidelity
        )?;
    }
    Ok(records.len())
}
