use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polarcm::bits::{format_bits, parse_bits, BitFormat};
use polarcm::config::{Campaign, CodeFile, Design, Kind, Labeling, Method, Modulation, SchemeConfig};
use polarcm::construct::construct;
use polarcm::core::schemes::SchemeDecoder;
use polarcm::curves::{variance_curves, Family};
use polarcm::engine::pool;
use polarcm::output::write_csv;
use polarcm::sim::{run_wer, sweep_rate_vs_snr};
use polarcm::tables::dump;
use polarcm::{Error, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "polarcm", version, about = "Polar-coded modulation: construction, coding and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SchemeArgs {
    #[arg(long, value_enum, default_value = "mlc")]
    kind: Kind,
    #[arg(long, value_enum, default_value = "ask")]
    modulation: Modulation,
    /// Bits per symbol.
    #[arg(long, default_value_t = 2)]
    bits: usize,
    /// log2 of the symbols per block.
    #[arg(long, default_value_t = 8)]
    n_exp: u32,
    #[arg(long, value_enum, default_value = "sp")]
    labeling: Labeling,
}

impl From<SchemeArgs> for SchemeConfig {
    fn from(a: SchemeArgs) -> Self {
        SchemeConfig {
            kind: a.kind,
            modulation: a.modulation,
            bits: a.bits,
            n_exp: a.n_exp,
            labeling: a.labeling,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a frozen set and write the code description as JSON.
    Construct {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value = "de-ga")]
        method: Method,
        /// Design Es/N0 in dB.
        #[arg(long)]
        es_n0: f64,
        /// Fixed number of information bits.
        #[arg(long, conflicts_with = "target_wer")]
        info_bits: Option<usize>,
        /// Largest code whose predicted WER stays within this value.
        #[arg(long)]
        target_wer: Option<f64>,
        /// Monte-Carlo samples (genie trials or level-capacity samples).
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encode information bits; prints one `index x y` line per symbol.
    Encode {
        /// Code description from `construct`.
        #[arg(long)]
        code: PathBuf,
        /// Information bits; read from stdin when absent.
        #[arg(long)]
        info: Option<String>,
        #[arg(long, value_enum, default_value = "bin")]
        format: BitFormat,
    },
    /// Decode received samples (`x` or `x y` per line) into information bits.
    Decode {
        #[arg(long)]
        code: PathBuf,
        /// Channel Es/N0 in dB.
        #[arg(long)]
        es_n0: f64,
        /// Received samples; stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "bin")]
        format: BitFormat,
    },
    /// Run a Monte-Carlo campaign from a JSON file and write CSV.
    Simulate {
        campaign: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Largest rate per SNR meeting a target WER.
    Sweep {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Es/N0 grid in dB: `a,b,c` or `start:stop:step`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1e-3)]
        target_wer: f64,
        #[arg(long, value_enum, default_value = "de-ga")]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Capacity-variance curves of polarized or level channels.
    Curves {
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated orders (`n` or `m`).
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        orders: Vec<u32>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Points, labelings and the SP-to-Gray transform as JSON.
    Tables {
        #[arg(long, value_enum, default_value = "ask")]
        modulation: Modulation,
        #[arg(long, default_value_t = 2)]
        bits: usize,
    },
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number {t:?} in grid")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) {
                return Err(Error::Config("grid step must be positive".into()));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + step * i as f64).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Config(format!("bad grid {s:?}"))),
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_input(path: Option<&Path>) -> Result<String> {
    Ok(match path {
        Some(p) => fs::read_to_string(p)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    })
}

fn load_code(path: &Path) -> Result<CodeFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct SweepHeader {
    scheme: SchemeConfig,
    target_wer: f64,
    method: Method,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct CurveHeader {
    family: Family,
    orders: Vec<u32>,
    points: usize,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct {
            scheme,
            method,
            es_n0,
            info_bits,
            target_wer,
            samples,
            seed,
            threads,
            output,
        } => {
            let design = Design {
                method,
                es_n0_db: es_n0,
                info_bits,
                target_wer: if info_bits.is_none() { Some(target_wer.unwrap_or(1e-3)) } else { None },
                samples,
            };
            let code = construct(&scheme.into(), &design, seed, &pool(threads)?)?;
            write_json(&output, &code)
        }
        Command::Encode { code, info, format } => {
            let spec = load_code(&code)?.spec()?;
            let text = match info {
                Some(s) => s,
                None => read_input(None)?,
            };
            let info = parse_bits(&text, format, spec.info_len())?;
            let labels = spec.encode(&spec.embed(&info)?)?;
            let points = spec.constellation().points();
            let mut out = io::stdout().lock();
            for idx in spec.points_of(&labels) {
                let [x, y] = points[idx];
                writeln!(out, "{idx} {x} {y}")?;
            }
            Ok(())
        }
        Command::Decode {
            code,
            es_n0,
            input,
            format,
        } => {
            let spec = load_code(&code)?.spec()?;
            let text = read_input(input.as_deref())?;
            let mut y = Vec::new();
            for (no, line) in text.lines().enumerate() {
                let vals: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| Error::Config(format!("line {}: bad number {t:?}", no + 1))))
                    .collect::<Result<_>>()?;
                match vals.as_slice() {
                    [] => {}
                    [x] => y.push([*x, 0.0]),
                    [x, q] => y.push([*x, *q]),
                    _ => return Err(Error::Config(format!("line {}: expected one or two values", no + 1))),
                }
            }
            let ch = spec.channel(es_n0)?;
            let u = SchemeDecoder::new(&spec)?.decode(&ch, &y)?;
            println!("{}", format_bits(&spec.extract(&u), format));
            Ok(())
        }
        Command::Simulate {
            campaign,
            threads,
            output,
        } => {
            let c: Campaign = serde_json::from_str(&fs::read_to_string(&campaign)?)?;
            let rows = run_wer(&c, &pool(threads)?)?;
            write_csv(sink(&output)?, &c, &rows)
        }
        Command::Sweep {
            scheme,
            grid,
            target_wer,
            method,
            samples,
            seed,
            threads,
            output,
        } => {
            let scheme: SchemeConfig = scheme.into();
            let rows = sweep_rate_vs_snr(&scheme, &parse_grid(&grid)?, target_wer, method, samples, seed, &pool(threads)?)?;
            let header = SweepHeader {
                scheme,
                target_wer,
                method,
                samples,
                seed,
            };
            write_csv(sink(&output)?, &header, &rows)
        }
        Command::Curves {
            family,
            orders,
            points,
            output,
        } => {
            let rows = variance_curves(family, &orders, points)?;
            write_csv(sink(&output)?, &CurveHeader { family, orders, points }, &rows)
        }
        Command::Tables { modulation, bits } => {
            let scheme = SchemeConfig {
                kind: Kind::Mlc,
                modulation,
                bits,
                n_exp: 0,
                labeling: Labeling::Sp,
            };
            write_json(&None, &dump(&scheme.constellation()?)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
