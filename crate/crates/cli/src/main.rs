use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dynshannon::stats::BoundReport;
use dynshannon::{Algorithm, CodecParams};
use dynshannon_cli::container::{self, DecodeLimits};
use dynshannon_cli::corpus::synthetic_suite;
use dynshannon_cli::harness;

#[derive(Parser)]
#[command(name = "dsc", version, about = "Dynamic Shannon coding file codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file into a DSC1 container.
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        /// Append a CSV bound report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decode a DSC1 container.
    Decode { input: PathBuf, output: PathBuf },
    /// Run every algorithm on a corpus directory and the synthetic inputs.
    Verify {
        corpus: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, default_value = "dynamic-shannon")]
    algo: Algorithm,
    #[arg(long, default_value_t = 2)]
    ell: u16,
    #[arg(long, default_value_t = 1.0)]
    cost0: f64,
    #[arg(long, default_value_t = 1.0)]
    cost1: f64,
    #[arg(long)]
    distinct_mode: bool,
    #[arg(long, default_value_t = 256)]
    alphabet_size: u32,
}

impl CodecArgs {
    fn params(&self, alphabet: u32) -> CodecParams {
        CodecParams {
            alphabet,
            ell: self.ell,
            distinct_mode: self.distinct_mode,
            cost0: self.cost0,
            cost1: self.cost1,
        }
    }
}

fn write_report(path: &Path, rows: &[BoundReport]) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "{}", BoundReport::CSV_HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

fn encode(input: &Path, output: &Path, codec: &CodecArgs, report: Option<&Path>) -> Result<bool> {
    if codec.alphabet_size == 0 || codec.alphabet_size > 256 {
        bail!("--alphabet-size must be in 1..=256 for byte input");
    }
    let data = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let symbols = container::bytes_to_symbols(&data, codec.alphabet_size)?;
    let params = codec.params(codec.alphabet_size);
    let out = BufWriter::new(
        File::create(output).with_context(|| format!("creating {}", output.display()))?,
    );
    container::encode_to(&symbols, codec.algo, &params, out)?;
    let (_, r) = harness::report(codec.algo, &params, &symbols)?;
    println!("{r}");
    if let Some(path) = report {
        write_report(path, std::slice::from_ref(&r))?;
    }
    Ok(r.pass)
}

fn decode(input: &Path, output: &Path) -> Result<()> {
    let reader =
        BufReader::new(File::open(input).with_context(|| format!("opening {}", input.display()))?);
    let mut out = BufWriter::new(
        File::create(output).with_context(|| format!("creating {}", output.display()))?,
    );
    let mut io_err = None;
    let header = container::decode_from(reader, DecodeLimits::default(), &mut |s| {
        let b = u8::try_from(s).map_err(|_| {
            container::ContainerError::BadHeader("alphabet too large for bytes".into())
        })?;
        out.write_all(&[b]).map_err(|e| {
            let msg = e.to_string();
            io_err = Some(e);
            container::ContainerError::BadHeader(msg)
        })
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    let header = header?;
    out.flush()?;
    eprintln!("{}: {} symbols", header.algo, header.m);
    Ok(())
}

fn verify(corpus: &Path, codec: &CodecArgs, report: Option<&Path>, seed: u64) -> Result<bool> {
    let mut inputs = Vec::new();
    let mut files: Vec<_> = fs::read_dir(corpus)
        .with_context(|| format!("reading {}", corpus.display()))?
        .collect::<std::io::Result<Vec<_>>>()?;
    files.sort_by_key(|e| e.path());
    for entry in files {
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let data = fs::read(&path)?;
        let symbols = container::bytes_to_symbols(&data, codec.alphabet_size)
            .with_context(|| format!("in {}", path.display()))?;
        inputs.push((path.display().to_string(), codec.alphabet_size, symbols));
    }
    for s in synthetic_suite(seed) {
        inputs.push((s.name, s.n, s.symbols));
    }
    let mut rows = Vec::new();
    for (name, n, symbols) in &inputs {
        for r in harness::report_all(&codec.params(*n), symbols)? {
            println!("{name}: {r}");
            rows.push(r);
        }
    }
    if let Some(path) = report {
        write_report(path, &rows)?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failed} failed", rows.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Encode {
            input,
            output,
            codec,
            report,
        } => encode(input, output, codec, report.as_deref()),
        Command::Decode { input, output } => decode(input, output).map(|()| true),
        Command::Verify {
            corpus,
            codec,
            report,
            seed,
        } => verify(corpus, codec, report.as_deref(), *seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dsc: {e:#}");
            ExitCode::from(2)
        }
    }
}
