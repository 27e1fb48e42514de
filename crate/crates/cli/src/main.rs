//! `etc-sns` command-line tool.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 when processing fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use etc_sns::cipher::{self, EtcKey};
use etc_sns::eval::{self, ExperimentSpec};
use etc_sns::image::{crop_to_block_multiple, load_ppm, save_ppm, RasterImage};
use etc_sns::jpeg::{self, SubsamplingMode, Upsampling};
use etc_sns::sns::{LocalProvider, Provider, ProviderKind};
use etc_sns::{Error, Stage};

#[derive(Parser)]
#[command(
    name = "etc-sns",
    version,
    about = "Encryption-then-Compression images through simulated social networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scramble a PPM image with the block cipher.
    Encrypt(CipherArgs),
    /// Undo `encrypt` with the same key and block size.
    Decrypt(CipherArgs),
    /// Compress a PPM image to baseline JPEG.
    JpegEncode(EncodeArgs),
    /// Decompress a JPEG to PPM.
    JpegDecode(DecodeArgs),
    /// Rewrite a JPEG at another quality without leaving the DCT domain.
    Transcode(TranscodeArgs),
    /// Pass a JPEG through a provider model.
    Simulate(SimulateArgs),
    /// Run an experiment spec and write the result table as CSV.
    Evaluate(EvaluateArgs),
    /// Print dimensions, subsampling, quantization tables and estimated
    /// quality of a JPEG.
    Inspect(InspectArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("key").required(true)))]
struct CipherArgs {
    /// Key file with lines K1=<16 hex digits> .. K4=<16 hex digits>.
    #[arg(long, group = "key")]
    key_file: Option<PathBuf>,
    /// Derive the four subkeys from one integer (decimal or 0x hex).
    #[arg(long, group = "key", value_parser = parse_u64)]
    master_key: Option<u64>,
    /// Block edge in pixels.
    #[arg(long, default_value_t = cipher::DEFAULT_BLOCK)]
    block: usize,
    /// Input PPM.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output PPM.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// IJG quality factor, 1 to 100.
    #[arg(long, default_value_t = 85, value_parser = clap::value_parser!(u8).range(1..=100))]
    quality: u8,
    /// Chroma subsampling: 444 or 420.
    #[arg(long, default_value = "420", value_parser = parse_mode)]
    subsampling: SubsamplingMode,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    /// Triangle filter across the whole plane.
    Bilinear,
    /// Triangle filter that never reads outside the 8x8 chroma block.
    WithinBlock,
}

#[derive(Args)]
struct DecodeArgs {
    /// Chroma upsampling for 4:2:0 input.
    #[arg(long, value_enum, default_value = "bilinear")]
    upsampling: Kernel,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TranscodeArgs {
    /// Target quality factor for requantization.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=100))]
    requantize: u8,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// twitter, facebook-hq, facebook-lq, tumblr, google-plus or flickr.
    #[arg(long, value_parser = parse_provider)]
    provider: ProviderKind,
    /// key=value overrides: max_w, max_h, max_bytes, target_qf.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Experiment spec file.
    #[arg(long)]
    spec: PathBuf,
    /// CSV destination; `-` writes to stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    /// JPEG file.
    #[arg(long = "in")]
    input: PathBuf,
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("{s:?}: {e}"))
}

fn parse_mode(s: &str) -> Result<SubsamplingMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_provider(s: &str) -> Result<ProviderKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())).at(Stage::Load))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())).at(Stage::Save))
}

fn load_image(path: &Path) -> Result<RasterImage, Error> {
    load_ppm(&read(path)?).map_err(|e| e.at(Stage::Load))
}

fn load_key(args: &CipherArgs) -> Result<EtcKey, Error> {
    match (&args.key_file, args.master_key) {
        (_, Some(m)) => Ok(EtcKey::from_master(m)),
        (Some(path), None) => {
            let text = String::from_utf8_lossy(&read(path)?).into_owned();
            text.parse().map_err(|e: Error| e.at(Stage::Load))
        }
        (None, None) => unreachable!("clap requires one key source"),
    }
}

fn run_cipher(args: &CipherArgs, forward: bool) -> Result<(), Error> {
    let key = load_key(args)?;
    let img = load_image(&args.input)?;
    let b = args.block;
    let fitted = crop_to_block_multiple(&img, b, b).map_err(|e| e.at(Stage::Crop))?;
    if fitted.dimensions() != img.dimensions() {
        eprintln!(
            "cropped {}x{} to {}x{} (whole {b}x{b} blocks)",
            img.width(),
            img.height(),
            fitted.width(),
            fitted.height()
        );
    }
    let out = if forward {
        cipher::encrypt(&fitted, &key, b, b).map_err(|e| e.at(Stage::Encrypt))?
    } else {
        cipher::decrypt(&fitted, &key, b, b).map_err(|e| e.at(Stage::Decrypt))?
    };
    write(&args.out, &save_ppm(&out))
}

fn print_table(out: &mut impl Write, name: &str, table: &jpeg::QuantTable) -> std::io::Result<()> {
    writeln!(out, "{name}:")?;
    for row in table.natural().chunks(8) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:3}")).collect();
        writeln!(out, "  {}", cells.join(" "))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Encrypt(args) => run_cipher(&args, true),
        Command::Decrypt(args) => run_cipher(&args, false),
        Command::JpegEncode(args) => {
            let img = load_image(&args.input)?;
            let bytes = jpeg::encode(&img, args.quality, args.subsampling)
                .map_err(|e| e.at(Stage::Encode))?;
            write(&args.out, &bytes)
        }
        Command::JpegDecode(args) => {
            let kernel = match args.upsampling {
                Kernel::Bilinear => Upsampling::Bilinear,
                Kernel::WithinBlock => Upsampling::BilinearWithinBlock,
            };
            let img =
                jpeg::decode_with(&read(&args.input)?, kernel).map_err(|e| e.at(Stage::Decode))?;
            write(&args.out, &save_ppm(&img))
        }
        Command::Transcode(args) => {
            let coded = jpeg::parse(&read(&args.input)?).map_err(|e| e.at(Stage::Decode))?;
            let bytes =
                jpeg::requantize(&coded, args.requantize).map_err(|e| e.at(Stage::Encode))?;
            write(&args.out, &bytes)
        }
        Command::Simulate(args) => {
            let mut provider = LocalProvider::new(args.provider);
            if let Some(path) = &args.config {
                let text = String::from_utf8_lossy(&read(path)?).into_owned();
                provider = provider.with_config(&text).map_err(|e| e.at(Stage::Load))?;
            }
            let out = provider
                .simulate(&read(&args.input)?)
                .map_err(|e| e.at(Stage::Upload))?;
            write(&args.out, &out)
        }
        Command::Evaluate(args) => {
            let spec = ExperimentSpec::from_file(&args.spec)?;
            let rows = eval::run_experiment(&spec);
            let csv = eval::to_csv_string(&rows);
            if args.out.as_os_str() == "-" {
                print!("{csv}");
            } else {
                write(&args.out, csv.as_bytes())?;
            }
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!(
                "{} rows over {} images; {failed} with errors",
                rows.len(),
                spec.images.len()
            );
            Ok(())
        }
        Command::Inspect(args) => {
            let coded = jpeg::parse(&read(&args.input)?).map_err(|e| e.at(Stage::Decode))?;
            let mut out = std::io::stdout().lock();
            let io = |e: std::io::Error| Error::from(e).at(Stage::Save);
            writeln!(out, "dimensions: {}x{}", coded.width, coded.height).map_err(io)?;
            writeln!(out, "subsampling: {}", coded.mode).map_err(io)?;
            writeln!(out, "estimated_qf: {}", coded.estimated_quality()).map_err(io)?;
            writeln!(out, "restart_interval: {}", coded.restart_interval).map_err(io)?;
            print_table(&mut out, "luma_table", coded.luma_table()).map_err(io)?;
            print_table(&mut out, "chroma_table", coded.chroma_table()).map_err(io)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
