//! `polar` — construct codes, encode, decode, run FER campaigns and
//! report modeled latency.
//!
//! Exit status: 0 on success, 2 for an invalid configuration or flag, 1 for
//! a failure while running (unreadable input, malformed frame, ...).

mod config;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use polar_core::arith::LlrArith;
use polar_core::channel::{self, LlrDomain};
use polar_core::cycle::{self, CycleReport};
use polar_core::scl::{DecodeOptions, DecodeTrace};
use polar_core::{selftest, CodeSpec, Decoder, FloatArith};
use rand::Rng;

use config::{ConfigError, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "polar", version, about = "Bit-accurate SC / SCL polar decoder model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code and write its spec file.
    Construct {
        #[command(flatten)]
        common: CommonArgs,
        /// Output file (stdout when absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encode payload bit strings, one frame per line.
    Encode {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Decode LLR frames, one frame per line, into u_hat bit strings.
    Decode {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        io: IoArgs,
        /// Print the payload bits instead of the full u_hat.
        #[arg(long)]
        info: bool,
    },
    /// Run a FER campaign and write one CSV row per SNR point.
    Fer {
        #[command(flatten)]
        common: CommonArgs,
        /// Es/N0 points in dB, comma separated.
        #[arg(long, value_delimiter = ',')]
        snr: Option<Vec<f64>>,
        #[arg(long)]
        frames: Option<u64>,
        #[arg(long)]
        max_errors: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write JSON instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode one frame (or read a trace) and print the cycle report.
    Latency {
        #[command(flatten)]
        common: CommonArgs,
        /// LLR frame file; the first line is decoded.
        #[arg(long, conflicts_with = "trace")]
        input: Option<PathBuf>,
        /// Previously dumped decode trace (JSON).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Es/N0 of the random frame used when no input is given.
        #[arg(long, default_value_t = 2.0)]
        snr: f64,
        /// Schedule two copies of the frame as a double package.
        #[arg(long)]
        double: bool,
        /// Write the decode trace as JSON.
        #[arg(long)]
        dump_trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check the engine against its oracles on random instances.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: u64,
    },
}

/// Flags shared by the subcommands that need a code and a decoder. Each
/// flag is a shorthand for one config key; `--set` overrides are applied
/// after them.
#[derive(Args)]
struct CommonArgs {
    /// Run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set decoder.L=4` (repeatable, last wins).
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Load the code from a spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long = "N")]
    len: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    /// Design parameter: erasure probability or design Es/N0 (dB).
    #[arg(long, alias = "design-param")]
    eps: Option<f64>,
    /// CRC width (0, 8, 11, 16, 24).
    #[arg(long)]
    crc: Option<u32>,
    #[arg(long)]
    good_threshold: Option<f64>,
    /// sc, flexible or ultra.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long = "L")]
    list_size: Option<usize>,
    /// best_pm, crc_aided or parity_check.
    #[arg(long)]
    selection: Option<String>,
    /// quantized or float.
    #[arg(long)]
    domain: Option<String>,
    /// Channel LLR units per quantization step.
    #[arg(long)]
    scale: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self, extra: Vec<String>) -> Vec<String> {
        let quoted = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut o = Vec::new();
        if let Some(p) = &self.spec {
            o.push(format!("code.spec_file={}", quoted(&p.to_string_lossy())));
        }
        let mut push = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push(format!("{key}={v}"));
            }
        };
        push("code.N", self.len.map(|v| v.to_string()));
        push("code.k", self.k.map(|v| v.to_string()));
        push("code.method", self.method.as_deref().map(quoted));
        push("code.design_param", self.eps.map(|v| format!("{v:?}")));
        push("code.crc", self.crc.map(|v| v.to_string()));
        push("code.good_threshold", self.good_threshold.map(|v| format!("{v:?}")));
        push("decoder.profile", self.profile.as_deref().map(quoted));
        push("decoder.L", self.list_size.map(|v| v.to_string()));
        push("decoder.selection", self.selection.as_deref().map(quoted));
        push("channel.domain", self.domain.as_deref().map(quoted));
        push("quant.scale", self.scale.map(|v| format!("{v:?}")));
        o.extend(extra);
        o.extend(self.set.iter().cloned());
        o
    }

    fn load(&self, extra: Vec<String>) -> Result<RunConfig, ConfigError> {
        RunConfig::load(self.config.as_deref(), &self.overrides(extra))
    }
}

#[derive(Args)]
struct IoArgs {
    /// Input file (stdin when absent).
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Config(ConfigError),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("polar: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("polar: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn open_input(path: Option<&Path>) -> anyhow::Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn parse_bits(line: &str) -> anyhow::Result<Vec<u8>> {
    line.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => bail!("unexpected character `{other}` in bit string"),
        })
        .collect()
}

fn parse_llrs(line: &str) -> anyhow::Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| t.parse::<f64>().with_context(|| format!("bad LLR `{t}`")))
        .collect()
}

/// Non-empty lines with their 1-based line numbers.
fn frames(input: Box<dyn BufRead>) -> impl Iterator<Item = anyhow::Result<(usize, String)>> {
    input.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Construct { common, output } => {
            let cfg = common.load(Vec::new())?;
            let spec = cfg.code()?;
            let mut out = open_output(output.as_deref())?;
            out.write_all(spec.to_file_string().as_bytes())?;
            out.flush()?;
        }
        Command::Encode { common, io } => {
            let cfg = common.load(Vec::new())?;
            let spec = cfg.code()?;
            let mut out = open_output(io.output.as_deref())?;
            for frame in frames(open_input(io.input.as_deref())?) {
                let (line_no, line) = frame?;
                let payload = parse_bits(&line).with_context(|| format!("line {line_no}"))?;
                let codeword = spec.encode(&payload).with_context(|| format!("line {line_no}"))?;
                writeln!(out, "{}", bits_to_string(&codeword))?;
            }
            out.flush()?;
        }
        Command::Decode { common, io, info } => {
            let cfg = common.load(Vec::new())?;
            let spec = cfg.code()?;
            let profile = cfg.profile()?;
            let l = cfg.decoder.list_size;
            let input = open_input(io.input.as_deref())?;
            let mut out = open_output(io.output.as_deref())?;
            let opts = DecodeOptions { trace: false, shadow_u: false };
            let map = |e: polar_core::Error| ConfigError::new("decoder", e);
            match cfg.channel.domain {
                LlrDomain::Quantized => {
                    let dec = Decoder::fixed(&spec, profile, l).map_err(map)?.with_options(opts);
                    decode_stream(&dec, input, &mut out, info)?;
                }
                LlrDomain::Float => {
                    let dec = Decoder::<FloatArith>::scalar(&spec, profile, l).map_err(map)?.with_options(opts);
                    decode_stream(&dec, input, &mut out, info)?;
                }
            }
            out.flush()?;
        }
        Command::Fer { common, snr, frames, max_errors, seed, json, output } => {
            let mut extra = Vec::new();
            if let Some(s) = snr {
                let list: Vec<String> = s.iter().map(|v| format!("{v:?}")).collect();
                extra.push(format!("campaign.snr_db=[{}]", list.join(", ")));
            }
            if let Some(v) = frames {
                extra.push(format!("campaign.frames={v}"));
            }
            if let Some(v) = max_errors {
                extra.push(format!("campaign.max_errors={v}"));
            }
            if let Some(v) = seed {
                extra.push(format!("campaign.seed={v}"));
            }
            if json {
                extra.push("output.format=\"json\"".into());
            }
            if let Some(p) = &output {
                extra.push(format!("output.path=\"{}\"", p.to_string_lossy().replace('\\', "\\\\")));
            }
            let cfg = common.load(extra)?;
            run_fer(&cfg)?;
        }
        Command::Latency { common, input, trace, snr, double, dump_trace, json } => {
            let cfg = common.load(Vec::new())?;
            let spec = cfg.code()?;
            let profile = cfg.profile()?;
            let arch = cfg.arch()?;
            let trace = match trace {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<DecodeTrace>(&text).context("parsing trace")?
                }
                None => {
                    let llrs = match input {
                        Some(path) => {
                            let mut text = String::new();
                            File::open(&path)
                                .with_context(|| format!("opening {}", path.display()))?
                                .read_to_string(&mut text)?;
                            let line = text.lines().find(|l| !l.trim().is_empty()).context("no frame in input")?;
                            parse_llrs(line)?
                        }
                        None => random_frame(&spec, snr, cfg.campaign.seed)?,
                    };
                    let dec = Decoder::fixed(&spec, profile, cfg.decoder.list_size)
                        .map_err(|e| ConfigError::new("decoder", e))?;
                    dec.decode(&llrs).context("decoding")?.trace
                }
            };
            if let Some(path) = dump_trace {
                std::fs::write(&path, serde_json::to_string(&trace).context("serializing trace")?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let report = if double {
                cycle::double_package(&trace, &trace, &arch, &profile).map_err(|e| ConfigError::new("decoder", e))?
            } else {
                cycle::latency(&trace, &arch).context("cycle model")?
            };
            print_report(&cfg, &spec, &report, double, json)?;
        }
        Command::Selftest { seed, cases } => {
            let report = selftest::run(seed, cases).context("self-test")?;
            for c in &report.checks {
                let status = if c.mismatches == 0 { "ok" } else { "FAILED" };
                println!("{status:6} {:32} {} cases, {} mismatches", c.name, c.cases, c.mismatches);
            }
            if !report.passed() {
                return Err(anyhow::anyhow!("self-test found mismatches").into());
            }
        }
    }
    Ok(())
}

fn decode_stream<A: LlrArith>(
    dec: &Decoder<A>,
    input: Box<dyn BufRead>,
    out: &mut dyn Write,
    info: bool,
) -> anyhow::Result<()> {
    for frame in frames(input) {
        let (line_no, line) = frame?;
        let llrs = parse_llrs(&line).with_context(|| format!("line {line_no}"))?;
        let result = dec.decode(&llrs).with_context(|| format!("line {line_no}"))?;
        let bits = if info { &result.info_hat } else { &result.u_hat };
        writeln!(out, "{}", bits_to_string(bits))?;
    }
    Ok(())
}

fn random_frame(spec: &CodeSpec, snr: f64, seed: u64) -> anyhow::Result<Vec<f64>> {
    let mut rng = channel::frame_rng(seed, 0);
    let payload: Vec<u8> = (0..spec.payload_len()).map(|_| rng.random::<bool>() as u8).collect();
    let codeword = spec.encode(&payload)?;
    Ok(channel::transmit(&codeword, snr, &mut rng)?)
}

fn run_fer(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.code()?;
    let profile = cfg.profile()?;
    let points = channel::run_fer(&spec, profile, cfg.decoder.list_size, &cfg.channel_config(), &cfg.campaign.snr_db)
        .map_err(|e| ConfigError::new("campaign", e))?;
    let mut out = open_output(cfg.output.path.as_deref())?;
    match cfg.output.format {
        OutputFormat::Csv => {
            writeln!(out, "# polar fer, config sha256 {}", cfg.hash())?;
            for line in cfg.render().lines() {
                writeln!(out, "# {line}")?;
            }
            out.write_all(channel::to_csv(&points).as_bytes())?;
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "config_sha256": cfg.hash(),
                "config": cfg,
                "points": points,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).context("serializing results")?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn print_report(cfg: &RunConfig, spec: &CodeSpec, r: &CycleReport, double: bool, json: bool) -> Result<(), Failure> {
    let arch = cfg.arch()?;
    // two packages finish in `total_cycles`, so twice the bits per schedule
    let bits = if double { 2 * spec.k() } else { spec.k() };
    let tp = cycle::throughput(bits, arch.f_clk, r.total_cycles, arch.num_cores).context("throughput")?;
    if json {
        let doc = serde_json::json!({
            "config_sha256": cfg.hash(),
            "N": spec.len(),
            "k": spec.k(),
            "L": cfg.decoder.list_size,
            "report": r,
            "throughput_bps": tp,
        });
        println!("{}", serde_json::to_string_pretty(&doc).context("serializing report")?);
        return Ok(());
    }
    println!("config sha256     {}", cfg.hash());
    println!("code              N={} k={} L={}", spec.len(), spec.k(), cfg.decoder.list_size);
    println!("total cycles      {}", r.total_cycles);
    println!("  serial unit     {}", r.serial_cycles);
    println!("  parallel unit   {}", r.parallel_cycles);
    println!("  sorter          {}", r.sort_cycles);
    println!("  recompute       {}", r.recompute_cycles);
    println!("idle PE cycles    {}", r.idle_pe_cycles);
    if double {
        println!("package finish    {:?}", r.package_finish);
        if let Some(ratio) = r.overlap_ratio {
            println!("pair / single     {ratio:.3}");
        }
    }
    println!(
        "throughput        {:.1} Mbit/s ({} cores at {} MHz)",
        tp / 1e6,
        arch.num_cores,
        arch.f_clk / 1_000_000
    );
    Ok(())
}
