//! The `butterfly` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation errors,
//! 2 on a usage or configuration error. `BUTTERFLY_THREADS` sets the worker
//! count; output does not depend on it.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use hofstadter_core::checks::{self, CheckReport, PerturbedLabeler};
use hofstadter_core::flux::{Diophantine, GapLabeler, RationalFlux};
use hofstadter_core::render::{render, Kind, RasterConfig};
use hofstadter_core::table::{emit_gaps, emit_h_scan, emit_thermo, fmt_sig, gap_rows, Format};
use hofstadter_core::{spectrum, thermo, Error};

pub const THREADS_VAR: &str = "BUTTERFLY_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "butterfly",
    version,
    about = "Hofstadter butterfly spectra, gap labels, thermodynamics and colored diagrams",
    after_help = "Set BUTTERFLY_THREADS to fix the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band edges and mesh extrema at one flux.
    Spectrum {
        #[arg(long)]
        flux: RationalFlux,
        #[arg(long, default_value = "16x16", value_parser = parse_mesh)]
        mesh: (usize, usize),
        #[arg(long)]
        json: bool,
    },
    /// Open gaps with their labels, one row per gap, sorted by (q, p, j).
    Gaps {
        /// Comma-separated list of fluxes P/Q.
        #[arg(long, value_delimiter = ',', required = true)]
        flux: Vec<RationalFlux>,
        #[arg(long, default_value_t = spectrum::DEFAULT_MIN_WIDTH)]
        min_width: f64,
        #[arg(long)]
        json: bool,
    },
    /// Render a diagram as a binary pixmap (P6).
    ///
    /// Rows go top to bottom with the vertical coordinate increasing
    /// downward: flux per cell for tb and mono, cells per flux quantum
    /// (from 1 to --vmax) for landau. Columns go left to right in μ.
    Butterfly(ButterflyArgs),
    /// Pressure, density, magnetization and Hall integer on a μ grid.
    Thermo {
        #[arg(long)]
        flux: RationalFlux,
        #[arg(long, allow_hyphen_values = true)]
        mu_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "32x32", value_parser = parse_mesh)]
        mesh: (usize, usize),
        /// Denominator cap of the Farey neighbours used for the magnetization.
        #[arg(long, default_value_t = 64)]
        stencil_qmax: i64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exit 1 if any check fails.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        qmax: i64,
        /// Mesh for Chern numbers (default 60x60) or pressures (default 16x16, 8x8 for duality).
        #[arg(long, value_parser = parse_mesh)]
        mesh: Option<(usize, usize)>,
        /// Corrupt the label of one gap, given as P/Q:J.
        #[arg(long, hide = true, value_parser = parse_perturbation)]
        perturb: Option<PerturbedLabeler>,
    },
    /// Tabulate M(B) and H = B − 4πM at fixed μ (exploratory).
    ScanH {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        b_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        b_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 24)]
        qmax: i64,
        #[arg(long, default_value = "16x16", value_parser = parse_mesh)]
        mesh: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ButterflyArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    /// Flux denominator cap; default clamp(height/8, 8, 120).
    #[arg(long)]
    qmax: Option<i64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = -2.2)]
    mu_from: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.2)]
    mu_to: f64,
    /// Upper end of the landau axis, integer or P/Q.
    #[arg(long, default_value = "4")]
    vmax: RationalFlux,
    #[arg(long, default_value_t = spectrum::DEFAULT_MIN_WIDTH)]
    min_width: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Tb,
    Mono,
    Landau,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    Labels,
    Chern,
    Streda,
    Symmetry,
    Duality,
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("mesh `{s}` is not N1xN2"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad mesh size `{a}`"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad mesh size `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("mesh sizes must be positive".into());
    }
    Ok((a, b))
}

fn parse_perturbation(s: &str) -> Result<PerturbedLabeler, String> {
    let (f, j) = s.split_once(':').ok_or("expected P/Q:J")?;
    Ok(PerturbedLabeler {
        flux: RationalFlux::from_str(f).map_err(|e| e.to_string())?,
        j: j.parse().map_err(|_| format!("bad gap index `{j}`"))?,
    })
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::ZeroDenominator
            | Error::NotCoprime { .. }
            | Error::NonPositive { .. }
            | Error::GapIndex { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Standard output
/// goes to `out` once the command finishes; diagnostics go to `err`.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let _ = writeln!(
                    err,
                    "error: {THREADS_VAR} must be a positive integer, got `{v}`"
                );
                return 2;
            }
        },
        Err(_) => None,
    };
    // Output is buffered so the work can run on a pool that does not
    // borrow the caller's writer.
    let mut buf = Vec::new();
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli.command, &mut buf)),
            Err(e) => Err(Failure::Runtime(e.to_string())),
        },
        None => execute(cli.command, &mut buf),
    };
    if let Err(e) = out.write_all(&buf) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    match result {
        Ok(()) => 0,
        Err(Failure::Checks) => 1,
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\nRun `butterfly --help` for usage.");
            2
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Spectrum { flux, mesh, json } => run_spectrum(flux, mesh, json, out),
        Command::Gaps {
            flux,
            min_width,
            json,
        } => {
            let rows = gap_rows(&flux, min_width, &Diophantine)?;
            let format = if json { Format::Json } else { Format::Csv };
            emit_gaps(&rows, format, out)?;
            Ok(())
        }
        Command::Butterfly(args) => run_butterfly(args),
        Command::Thermo {
            flux,
            mu_from,
            mu_to,
            steps,
            mesh,
            stencil_qmax,
            json,
            out: path,
        } => {
            if steps < 2 || mu_from.is_nan() || mu_to.is_nan() || mu_from >= mu_to {
                return Err(Failure::Usage(format!(
                    "need --steps ≥ 2 and --mu-from < --mu-to, got {steps} steps on [{mu_from}, {mu_to}]"
                )));
            }
            let mus: Vec<f64> = (0..steps)
                .map(|i| mu_from + (mu_to - mu_from) * i as f64 / (steps - 1) as f64)
                .collect();
            let samples = thermo::thermo_samples(flux, &mus, mesh.0, mesh.1, stencil_qmax)?;
            let format = if json { Format::Json } else { Format::Csv };
            let mut buf = Vec::new();
            emit_thermo(&samples, format, &mut buf)?;
            deliver(&buf, path.as_deref(), out)
        }
        Command::Check {
            suite,
            qmax,
            mesh,
            perturb,
        } => {
            if qmax < 1 {
                return Err(Failure::Usage(format!("--qmax must be ≥ 1, got {qmax}")));
            }
            let labeler: &dyn GapLabeler = match &perturb {
                Some(p) => p,
                None => &Diophantine,
            };
            let report = run_suite(suite, qmax, mesh, labeler)?;
            write!(out, "{report}").map_err(|e| Failure::Runtime(e.to_string()))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::ScanH {
            mu,
            b_from,
            b_to,
            steps,
            qmax,
            mesh,
            out: path,
        } => {
            let record = thermo::h_field_scan(mu, b_from, b_to, steps, qmax, mesh.0, mesh.1)?;
            let mut buf = Vec::new();
            emit_h_scan(&record, &mut buf)?;
            deliver(&buf, path.as_deref(), out)
        }
    }
}

fn run_suite(
    suite: Suite,
    qmax: i64,
    mesh: Option<(usize, usize)>,
    labeler: &dyn GapLabeler,
) -> Result<CheckReport, Error> {
    match suite {
        Suite::Labels => checks::check_labels(qmax, labeler),
        Suite::Chern => {
            let (n1, n2) = mesh.unwrap_or((60, 60));
            checks::check_chern(qmax, n1, n2, labeler)
        }
        Suite::Streda => checks::check_streda(qmax, labeler),
        Suite::Symmetry => {
            let (n1, n2) = mesh.unwrap_or((16, 16));
            checks::check_symmetry(qmax, n1, n2, labeler)
        }
        Suite::Duality => {
            let (n1, n2) = mesh.unwrap_or((8, 8));
            checks::check_duality(qmax, n1, n2, labeler)
        }
    }
}

fn run_spectrum(
    flux: RationalFlux,
    (n1, n2): (usize, usize),
    json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let bs = spectrum::band_edges::<f64>(flux)?;
    let mesh = spectrum::spectrum_mesh::<f64>(flux, n1, n2)?;
    let q = bs.q();
    let mut lo = vec![f64::INFINITY; q];
    let mut hi = vec![f64::NEG_INFINITY; q];
    for values in mesh.iter() {
        for (b, &e) in values.iter().enumerate() {
            lo[b] = lo[b].min(e);
            hi[b] = hi[b].max(e);
        }
    }
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    if json {
        writeln!(out, "[").map_err(io)?;
        for (b, band) in bs.bands.iter().enumerate() {
            let sep = if b + 1 < q { "," } else { "" };
            writeln!(
                out,
                "  {{\"p\": {}, \"q\": {}, \"band\": {}, \"lo\": {}, \"hi\": {}, \"mesh_lo\": {}, \"mesh_hi\": {}}}{sep}",
                flux.p(),
                flux.q(),
                b + 1,
                fmt_sig(band.lo),
                fmt_sig(band.hi),
                fmt_sig(lo[b]),
                fmt_sig(hi[b])
            )
            .map_err(io)?;
        }
        writeln!(out, "]").map_err(io)?;
    } else {
        writeln!(out, "p,q,band,lo,hi,mesh_lo,mesh_hi").map_err(io)?;
        for (b, band) in bs.bands.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                flux.p(),
                flux.q(),
                b + 1,
                fmt_sig(band.lo),
                fmt_sig(band.hi),
                fmt_sig(lo[b]),
                fmt_sig(hi[b])
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

fn run_butterfly(args: ButterflyArgs) -> Result<(), Failure> {
    let kind = match args.kind {
        KindArg::Tb => Kind::Tb,
        KindArg::Mono => Kind::Mono,
        KindArg::Landau => Kind::Landau,
    };
    let mut config = RasterConfig::new(kind, args.width, args.height);
    if let Some(q) = args.qmax {
        config.qmax = q;
    }
    config.mu_window = (args.mu_from, args.mu_to);
    config.min_width = args.min_width;
    if kind == Kind::Landau {
        config.flux_window = (Ratio::from_integer(1), args.vmax.ratio());
    }
    config.validate()?;
    let image = render(&config)?;
    write_file(&args.out, &image.to_ppm())
}

fn deliver(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, bytes),
        None => out
            .write_all(bytes)
            .map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| {
        Failure::Runtime(
            Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }
            .to_string(),
        )
    })
}
