//! `qcldpc` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qcldpc::channel::{ebno_grid, run_ber, to_csv, ChannelConfig};
use qcldpc::schedule::{
    find_hazards, rearrange, slot_count, PipelineMode, PipelinePlan, ThroughputModel,
};
use qcldpc::{
    select_superlayer_size, Arithmetic, BaseMatrix, CompactCode, Decoder, DecoderConfig, QFormat,
};

#[derive(Parser, Debug)]
#[command(
    name = "qcldpc",
    version,
    about = "QC-LDPC code analysis, layered min-sum decoding and BER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a base matrix into its parity-check matrix
    Expand(ExpandArgs),
    /// Print the compact block-index and block-shift tables
    Compact(CompactArgs),
    /// Plan a superlayer pipeline and model throughput
    Schedule(ScheduleArgs),
    /// Decode one frame of channel LLRs
    Decode(DecodeArgs),
    /// Simulate BER/FER over an Eb/N0 grid
    Ber(BerArgs),
}

#[derive(Args, Debug)]
struct CodeArg {
    /// Base-matrix file ("m_b n_b z" header, then m_b rows, -1 for zero blocks)
    #[arg(long, value_name = "FILE")]
    code: PathBuf,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write data to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExpandFormat {
    Summary,
    Alist,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Output format
    #[arg(long, value_enum, default_value = "summary")]
    format: ExpandFormat,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct CompactArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Emit the tables as CSV (table,layer,slot,value)
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(name = "1x")]
    Serial,
    #[value(name = "2x")]
    Pipelined,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Superlayer size (an even divisor of the layer count) or "auto"
    #[arg(long, default_value = "auto", value_name = "SIZE|auto")]
    superlayer: String,
    /// Serial (1x) or two-layer pipelined (2x) processing
    #[arg(long, value_enum, default_value = "2x")]
    mode: ModeArg,
    /// Clock frequency in Hz
    #[arg(long, default_value_t = 200e6, value_name = "HZ")]
    fclk: f64,
    /// Decoding iterations per frame
    #[arg(long, default_value_t = 8, value_name = "N")]
    iters: usize,
    /// Clock cycles spent per slot
    #[arg(long, default_value_t = 1, value_name = "N")]
    cycles_per_slot: usize,
    /// Emit the rearranged tables as CSV
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ArithArg {
    Float,
    Fixed,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    /// Maximum decoding iterations
    #[arg(long, default_value_t = 8, value_name = "N")]
    iters: usize,
    /// Message arithmetic
    #[arg(long, value_enum, default_value = "float")]
    arith: ArithArg,
    /// Fixed-point format I.F (fixed arithmetic only) [default: 6.4]
    #[arg(long, value_name = "I.F")]
    qformat: Option<QFormat>,
    /// Check-to-variable scale factor
    #[arg(long, default_value_t = 0.75, value_name = "A")]
    scale: f64,
}

impl DecoderArgs {
    fn config(&self) -> Result<DecoderConfig, Failure> {
        let arithmetic = match (self.arith, self.qformat) {
            (ArithArg::Float, Some(_)) => {
                return Err(Failure::Usage("--qformat requires --arith fixed".into()))
            }
            (ArithArg::Float, None) => Arithmetic::Float,
            (ArithArg::Fixed, q) => Arithmetic::Fixed(q.unwrap_or_default()),
        };
        let cfg = DecoderConfig {
            scale: self.scale,
            max_iterations: self.iters,
            arithmetic,
            early_termination: true,
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Channel LLRs, one per line (positive favours bit 0)
    #[arg(long, value_name = "FILE")]
    llr: PathBuf,
    /// Read --llr as raw little-endian 32-bit floats
    #[arg(long)]
    raw: bool,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct BerArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Eb/N0 grid in dB, inclusive
    #[arg(long, value_name = "LO:STEP:HI")]
    ebno: String,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Noise seed
    #[arg(long, default_value_t = 1, value_name = "S")]
    seed: u64,
    /// Stop a point after this many bit errors
    #[arg(long, default_value_t = 200, value_name = "E")]
    min_errors: u64,
    /// Stop a point after this many frames
    #[arg(long, default_value_t = 200_000, value_name = "F")]
    max_frames: u64,
    /// Worker threads (0 = all cores, 1 = sequential)
    #[arg(long, default_value_t = 0, value_name = "W")]
    workers: usize,
    /// Code rate used for the noise variance [default: (n_b - m_b) / n_b]
    #[arg(long, value_name = "R")]
    rate: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Expand(a) => expand(a),
        Command::Compact(a) => compact(a),
        Command::Schedule(a) => schedule(a),
        Command::Decode(a) => decode(a),
        Command::Ber(a) => ber(a),
    }
}

fn load_base(path: &Path) -> anyhow::Result<BaseMatrix> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.parse()
        .with_context(|| format!("invalid base matrix {}", path.display()))
}

fn emit(out: &OutArg, data: &str) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => {
            fs::write(path, data).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(data.as_bytes())?;
            Ok(())
        }
    }
}

fn expand(a: ExpandArgs) -> Result<(), Failure> {
    let base = load_base(&a.code.code)?;
    let h = qcldpc::expand(&base);
    let data = match a.format {
        ExpandFormat::Alist => h.to_alist(),
        ExpandFormat::Summary => {
            let (row_deg, col_deg) = h.degrees();
            let mut s = String::new();
            writeln!(s, "m = {}", h.num_rows()).unwrap();
            writeln!(s, "n = {}", h.num_cols()).unwrap();
            writeln!(s, "z = {}", base.z()).unwrap();
            writeln!(s, "ones = {}", h.num_ones()).unwrap();
            writeln!(s, "design_rate = {}", base.design_rate()).unwrap();
            writeln!(s, "check_degrees = {}", degree_histogram(&row_deg)).unwrap();
            writeln!(s, "variable_degrees = {}", degree_histogram(&col_deg)).unwrap();
            s
        }
    };
    emit(&a.out, &data)?;
    Ok(())
}

fn degree_histogram(degrees: &[usize]) -> String {
    let mut counts = std::collections::BTreeMap::new();
    for &d in degrees {
        *counts.entry(d).or_insert(0usize) += 1;
    }
    counts
        .iter()
        .map(|(d, c)| format!("{d}:{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn compact(a: CompactArgs) -> Result<(), Failure> {
    let code = CompactCode::from_base(&load_base(&a.code.code)?);
    let data = if a.csv {
        code.render_csv()
    } else {
        format!(
            "{}J = {}\nlambda = {}\n",
            code.render_text(),
            code.width(),
            code.compaction_ratio()
        )
    };
    emit(&a.out, &data)?;
    Ok(())
}

fn schedule(a: ScheduleArgs) -> Result<(), Failure> {
    let code = CompactCode::from_base(&load_base(&a.code.code)?);
    let plan: PipelinePlan = match (a.mode, a.superlayer.as_str()) {
        (ModeArg::Serial, _) => PipelinePlan::serial(&code),
        (ModeArg::Pipelined, "auto") => {
            select_superlayer_size(&code).map_err(anyhow::Error::from)?
        }
        (ModeArg::Pipelined, s) => {
            let size: usize = s.parse().map_err(|_| {
                Failure::Usage(format!(
                    "--superlayer expects an integer or \"auto\", got {s:?}"
                ))
            })?;
            rearrange(&code, size).map_err(|e| Failure::Usage(e.to_string()))?
        }
    };
    let mut model = ThroughputModel::new(a.fclk, a.iters, plan.slot_count(), code.code_length());
    model.cycles_per_slot = a.cycles_per_slot;
    let throughput = model
        .throughput()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let serial_slots = slot_count(code.layers(), code.width(), PipelineMode::Serial1x, 1);
    let data = if a.csv {
        plan.code().render_csv()
    } else {
        let mut s = String::new();
        writeln!(s, "mode = {}", plan.mode()).unwrap();
        writeln!(s, "superlayer = {}", plan.superlayer_size()).unwrap();
        s.push_str(&plan.code().render_text());
        if plan.mode() == PipelineMode::Pipelined2x {
            let before = find_hazards(&code, plan.superlayer_size()).len();
            writeln!(
                s,
                "hazards = {} (before rearrangement: {before})",
                plan.hazards().len()
            )
            .unwrap();
            for h in plan.hazards() {
                writeln!(
                    s,
                    "  L{} b{} -> L{} b{} (block column {})",
                    h.layer + 1,
                    h.slot + 1,
                    h.next_layer + 1,
                    h.next_slot + 1,
                    h.block_col
                )
                .unwrap();
            }
        }
        writeln!(s, "slots = {}", plan.slot_count()).unwrap();
        writeln!(s, "slots_1x = {serial_slots}").unwrap();
        writeln!(s, "eta = {}", plan.efficiency()).unwrap();
        writeln!(s, "throughput_mbps = {:.2}", throughput / 1e6).unwrap();
        s
    };
    emit(&a.out, &data)?;
    Ok(())
}

fn read_llr(path: &Path, raw: bool) -> anyhow::Result<Vec<f64>> {
    if raw {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        if bytes.len() % 4 != 0 {
            bail!(
                "{}: length {} is not a multiple of 4",
                path.display(),
                bytes.len()
            );
        }
        return Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect());
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<f64>().with_context(|| {
                format!("{}:{}: not a number: {:?}", path.display(), i + 1, l.trim())
            })
        })
        .collect()
}

fn decode(a: DecodeArgs) -> Result<(), Failure> {
    let cfg = a.decoder.config()?;
    let code = CompactCode::from_base(&load_base(&a.code.code)?);
    let llr = read_llr(&a.llr, a.raw)?;
    let out = Decoder::new(&code, &cfg)
        .and_then(|d| d.decode(&llr))
        .map_err(anyhow::Error::from)?;
    let bits: String = out.bits.iter().map(|b| char::from(b'0' + b)).collect();
    let data = format!(
        "bits = {bits}\niterations = {}\nconverged = {}\n",
        out.iterations, out.converged
    );
    emit(&a.out, &data)?;
    Ok(())
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let usage = || Failure::Usage(format!("--ebno expects LO:STEP:HI, got {s:?}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage())?;
    match parts[..] {
        [lo, step, hi] => ebno_grid(lo, step, hi).map_err(|e| Failure::Usage(e.to_string())),
        [x] => Ok(vec![x]),
        _ => Err(usage()),
    }
}

fn ber(a: BerArgs) -> Result<(), Failure> {
    let cfg = a.decoder.config()?;
    let ebno_db = parse_grid(&a.ebno)?;
    let base = load_base(&a.code.code)?;
    let channel = ChannelConfig {
        ebno_db,
        rate: a.rate.unwrap_or_else(|| base.design_rate()),
        seed: a.seed,
        max_frames: a.max_frames,
        min_bit_errors: a.min_errors,
        workers: a.workers,
    };
    channel
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let results =
        run_ber(&CompactCode::from_base(&base), &cfg, &channel).map_err(anyhow::Error::from)?;
    emit(&a.out, &to_csv(&results))?;
    Ok(())
}
