use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use legmoment::bench::bench;
use legmoment::io::{encode_csv, encode_pgm_u8, load_image, write_file, ImageFormat};
use legmoment::moment_file::{read_moments, write_moments};
use legmoment::{
    moments_2d_direct, moments_2d_fast, reconstruct, synth, verify, CascadeLayout, Error, FastOptions, OpCounter,
    Precision,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "legmoment", version, about = "Fast 2D Legendre moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fast,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Prefix,
    AllAdder,
}

#[derive(clap::Args)]
struct Common {
    /// Maximum total order M.
    #[arg(long, allow_negative_numbers = true)]
    order: i64,
    /// Input format; guessed from the file contents when omitted.
    #[arg(long)]
    format: Option<ImageFormat>,
    /// Worker threads; defaults to the available parallelism (1 for bench).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
    #[arg(long, value_enum, default_value_t = LayoutArg::Prefix)]
    layout: LayoutArg,
    /// Exact integer power sums for integer images.
    #[arg(long)]
    exact: bool,
}

impl Common {
    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    fn options(&self) -> FastOptions {
        FastOptions {
            layout: match self.layout {
                LayoutArg::Prefix => CascadeLayout::Prefix,
                LayoutArg::AllAdder => CascadeLayout::AllAdder,
            },
            precision: match self.precision {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Extended => Precision::Extended,
            },
            exact_integer_input: self.exact,
            workers: self.workers(),
            ..FastOptions::default()
        }
    }

    fn order(&self) -> Result<usize, Failure> {
        usize::try_from(self.order).map_err(|_| Failure::Usage(format!("--order must be non-negative, got {}", self.order)))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute moments of an image and write a moment file.
    Moments {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild an image from a moment file.
    Reconstruct {
        moments: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write real values as CSV instead of an 8-bit PGM.
        #[arg(long)]
        csv: bool,
        /// Output grid, `N` or `WxH`; defaults to the grid in the file.
        #[arg(long)]
        size: Option<String>,
        /// Image to report the RMSE against.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Compare fast and direct moments.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Operation counts and timings of both methods.
    Bench {
        input: Option<PathBuf>,
        /// Use N×N synthetic images (checkerboard, constant, random grey) instead of a file.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--size expects N or WxH, got '{s}'"));
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?)),
        None => {
            let n = s.parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Moments { input, out, method, common } => {
            let order = common.order()?;
            let img = load_image(&input, common.format)?;
            let mut c = OpCounter::disabled();
            let (table, tag) = match method {
                MethodArg::Fast => (moments_2d_fast(&img, order, &common.options(), &mut c)?, "fast"),
                MethodArg::Direct => (moments_2d_direct(&img, order, common.workers(), &mut c)?, "direct"),
            };
            write_file(&out, write_moments(&table, tag)?.as_bytes())?;
        }
        Command::Reconstruct { moments, out, csv, size, reference } => {
            let text = std::fs::read_to_string(&moments).map_err(|e| Error::io(&moments, e))?;
            let (table, header) = read_moments(&text)?;
            let (w, h) = match size {
                Some(s) => parse_size(&s)?,
                None => (header.nx, header.ny),
            };
            let rec = reconstruct(&table, w, h)?;
            let bytes = if csv { encode_csv(w, &rec.values) } else { encode_pgm_u8(w, h, &rec.to_u8()) };
            write_file(&out, &bytes)?;
            if let Some(r) = reference {
                let img = load_image(&r, None)?;
                println!("rmse {:.5e}", rec.rmse(&img)?);
            }
        }
        Command::Verify { input, threshold, common } => {
            let order = common.order()?;
            let img = load_image(&input, common.format)?;
            let report = verify(&img, order, &common.options())?;
            println!("max_abs {:.3e} max_rel {:.3e}", report.max_abs, report.max_rel);
            for d in &report.worst {
                println!("  L_{},{} fast {:.16e} direct {:.16e} rel {:.3e}", d.p, d.q, d.fast, d.direct, d.rel);
            }
            if !report.passes(threshold) {
                return Err(Failure::Verify(format!("max relative error {:.3e} exceeds {threshold:.3e}", report.max_rel)));
            }
        }
        Command::Bench { input, synthetic, repetitions, common } => {
            let order = common.order()?;
            let images = match (input, synthetic) {
                (Some(p), None) => vec![load_image(&p, common.format)?],
                (None, Some(n)) if n >= 2 => vec![
                    synth::checkerboard(n, n, 8, 255),
                    synth::constant(n, n, 128),
                    synth::random_grey(n, n, 1),
                ],
                _ => return Err(Failure::Usage("give exactly one of <input> or --synthetic N (N >= 2)".into())),
            };
            let opts = FastOptions { workers: common.workers.unwrap_or(1), ..common.options() };
            let report = bench(&images, order, repetitions, &opts)?;
            print!("{}", report.to_text());
            eprint!("{}", report.to_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_USAGE })
        }
    }
}
