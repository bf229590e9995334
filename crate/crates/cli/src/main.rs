//! `posit`: conversion, multiplication traces, oracle verification, value
//! tables, sigmoid sweeps, and MLP training/inference under posit arithmetic.
//!
//! Exit status: 0 on success, 1 when verification finds a mismatch, 2 on any
//! usage or input error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use posit_core::oracle::{verify_exhaustive, verify_sampled, VerifyOp, VerifyReport};
use posit_core::{
    decode, enumerate_values, exact_sigmoid, fast_sigmoid, from_f64, posit_mult_traced, to_f64,
    PositBits, PositConfig,
};
use posit_nn::{
    cast_model, evaluate, init_model, make_rings_dataset, train, Dataset, DotMode, MlpModel,
    NumericBackend, RingsParams, DEFAULT_EPOCHS, DEFAULT_LAYERS, DEFAULT_LR,
};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "posit", version, about = "Posit arithmetic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between patterns, real values and decoded fields.
    Convert(ConvertArgs),
    /// Multiply two patterns through the hardware-style datapath.
    Mul(MulArgs),
    /// Compare an operation against the exact-rational oracle.
    Verify(VerifyArgs),
    /// Every pattern of a format with its value, as CSV.
    Table(TableArgs),
    /// Evaluate the fast or rounded-exact sigmoid.
    Sigmoid(SigmoidArgs),
    /// Write a rings dataset as CSV.
    Dataset(DatasetArgs),
    /// Train the MLP and write its per-epoch loss.
    Train(TrainArgs),
    /// Evaluate a saved model under a backend.
    Infer(InferArgs),
}

fn parse_config(s: &str) -> Result<PositConfig, String> {
    s.parse().map_err(|e: posit_core::PositError| e.to_string())
}

fn parse_backend(s: &str) -> Result<NumericBackend, String> {
    s.parse().map_err(|e: posit_nn::NnError| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueFormat {
    Hex,
    Bin,
    Real,
    Fields,
}

#[derive(Args)]
struct ConvertArgs {
    /// Posit format as `n,es`.
    #[arg(long, value_parser = parse_config)]
    config: PositConfig,
    #[arg(long, value_enum)]
    from: ValueFormat,
    #[arg(long, value_enum)]
    to: ValueFormat,
    #[arg(allow_hyphen_values = true)]
    value: String,
}

#[derive(Args)]
struct MulArgs {
    #[arg(long, value_parser = parse_config)]
    config: PositConfig,
    a: String,
    b: String,
    /// Print every datapath intermediate as JSON.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Mul,
    Add,
    Sub,
    Div,
}

impl From<OpArg> for VerifyOp {
    fn from(op: OpArg) -> Self {
        match op {
            OpArg::Mul => VerifyOp::Mul,
            OpArg::Add => VerifyOp::Add,
            OpArg::Sub => VerifyOp::Sub,
            OpArg::Div => VerifyOp::Div,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_config)]
    config: PositConfig,
    #[arg(long, value_enum, default_value = "mul")]
    op: OpArg,
    /// Every operand pair (the default when --samples is absent).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Random pairs on top of the edge-pattern cross.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 42, requires = "samples")]
    seed: u64,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_parser = parse_config)]
    config: PositConfig,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SigmoidMode {
    Fast,
    Exact,
}

#[derive(Args)]
struct SigmoidArgs {
    #[arg(long, value_parser = parse_config)]
    config: PositConfig,
    #[arg(long, value_enum, default_value = "fast")]
    mode: SigmoidMode,
    /// Every pattern as CSV instead of one value.
    #[arg(long, conflicts_with = "pattern")]
    sweep: bool,
    #[arg(required_unless_present = "sweep")]
    pattern: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// CSV file (`x1,...,xk,label`), or `auto` for a generated rings set.
    #[arg(long, default_value = "auto")]
    dataset: String,
    #[arg(long, default_value_t = RingsParams::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = RingsParams::default().noise)]
    noise: f64,
    #[arg(long, default_value_t = RingsParams::default().seed)]
    data_seed: u64,
}

impl DataArgs {
    fn load(&self) -> CliResult<Dataset> {
        Ok(if self.dataset == "auto" {
            make_rings_dataset(self.samples, self.noise, self.data_seed)?
        } else {
            Dataset::read_csv(self.dataset.as_ref())?
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DotArg {
    Quire,
    Sequential,
}

impl From<DotArg> for DotMode {
    fn from(d: DotArg) -> Self {
        match d {
            DotArg::Quire => DotMode::Quire,
            DotArg::Sequential => DotMode::Sequential,
        }
    }
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long, default_value_t = RingsParams::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = RingsParams::default().noise)]
    noise: f64,
    #[arg(long, default_value_t = RingsParams::default().seed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// `binary64 | binary32 | posit:n,es[:fast|:relu] | hybrid:n,es`.
    #[arg(long, value_parser = parse_backend)]
    backend: NumericBackend,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    #[arg(long, default_value_t = DEFAULT_LR)]
    lr: f64,
    /// Weight-initialisation seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Start from a saved model instead of a fresh initialisation.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "quire")]
    dot: DotArg,
    #[command(flatten)]
    data: DataArgs,
    /// Loss record CSV (`epoch,loss`); standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to save the trained model as JSON.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = parse_backend)]
    backend: NumericBackend,
    #[arg(long, value_enum, default_value = "quire")]
    dot: DotArg,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    json: bool,
}

fn parse_pattern(text: &str, cfg: PositConfig, format: ValueFormat) -> CliResult<PositBits> {
    let literal = match format {
        ValueFormat::Hex if !text.starts_with("0x") => format!("0x{text}"),
        ValueFormat::Bin if !text.starts_with("0b") => format!("0b{text}"),
        _ => text.to_string(),
    };
    Ok(PositBits::parse(&literal, cfg)?)
}

fn real(p: PositBits) -> String {
    if p.is_nar() {
        "NaR".into()
    } else {
        to_f64(p).to_string()
    }
}

fn fields(p: PositBits) -> String {
    if p.is_nar() {
        return "NaR".into();
    }
    if p.is_zero() {
        return "zero".into();
    }
    let u = decode(p);
    let cfg = p.config();
    let frac_width = cfg.fraction_width() as usize;
    format!(
        "sign={} k={} e={} f=0b{:0w$b}",
        u8::from(u.sign),
        u.regime,
        u.exponent,
        u.fraction,
        w = frac_width
    )
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn say(line: impl std::fmt::Display) -> CliResult<()> {
    emit(&None, &format!("{line}\n"))
}

fn convert(args: ConvertArgs) -> CliResult<()> {
    let cfg = args.config;
    let p = match args.from {
        ValueFormat::Real => {
            let x: f64 = args
                .value
                .trim()
                .parse()
                .map_err(|e| format!("`{}`: {e}", args.value))?;
            from_f64(x, cfg)
        }
        ValueFormat::Fields => return Err("--from fields is not an input format".into()),
        f => parse_pattern(&args.value, cfg, f)?,
    };
    let text = match args.to {
        ValueFormat::Hex => p.to_hex(),
        ValueFormat::Bin => p.to_bin(),
        ValueFormat::Real => real(p),
        ValueFormat::Fields => fields(p),
    };
    say(text)
}

fn mul(args: MulArgs) -> CliResult<()> {
    let a = parse_pattern(&args.a, args.config, ValueFormat::Hex)?;
    let b = parse_pattern(&args.b, args.config, ValueFormat::Hex)?;
    let (product, trace) = posit_mult_traced(a, b);
    if args.trace {
        say(serde_json::to_string_pretty(&trace)?)
    } else {
        say(format!("{} {}", product.to_hex(), real(product)))
    }
}

fn report_table(report: &VerifyReport, mode: &str) -> String {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let mut text = format!(
        "config      {}\nop          {}\nmode        {mode}\npairs       {}\nmismatches  {}\nresult      {verdict}\n",
        report.config,
        report.op.name(),
        report.pairs_tested,
        report.mismatch_count
    );
    for m in &report.mismatches {
        let hex = |bits| PositBits::from_bits_truncate(bits, report.config).to_hex();
        text.push_str(&format!(
            "  {} {} got {} expected {}\n",
            hex(m.a),
            hex(m.b),
            hex(m.got),
            hex(m.expected)
        ));
    }
    text
}

fn verify(args: VerifyArgs) -> CliResult<bool> {
    let op = VerifyOp::from(args.op);
    let (report, mode) = match args.samples {
        Some(0) => return Err("--samples must be at least 1".into()),
        Some(k) => (
            verify_sampled(args.config, op, k, args.seed),
            format!("sampled {k} seed {}", args.seed),
        ),
        None => (
            verify_exhaustive(args.config, op)?,
            "exhaustive".to_string(),
        ),
    };
    if args.json {
        say(serde_json::to_string_pretty(&report)?)?;
    } else {
        emit(&None, &report_table(&report, &mode))?;
    }
    Ok(report.passed())
}

fn table(args: TableArgs) -> CliResult<()> {
    let mut csv = String::from("pattern,value\n");
    for (p, _) in enumerate_values(args.config)? {
        csv.push_str(&format!("{},{}\n", p.to_hex(), real(p)));
    }
    emit(&args.out, &csv)
}

fn sigma(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn sigmoid(args: SigmoidArgs) -> CliResult<()> {
    let cfg = args.config;
    let apply = |p: PositBits| -> CliResult<PositBits> {
        Ok(match args.mode {
            SigmoidMode::Fast => fast_sigmoid(p)?,
            SigmoidMode::Exact => exact_sigmoid(p),
        })
    };
    if !args.sweep {
        let p = parse_pattern(
            args.pattern.as_deref().expect("clap requires it"),
            cfg,
            ValueFormat::Hex,
        )?;
        let s = apply(p)?;
        return emit(&args.out, &format!("{} {}\n", s.to_hex(), real(s)));
    }
    let column = if args.mode == SigmoidMode::Fast {
        "fast"
    } else {
        "rounded"
    };
    let mut csv = format!("pattern,input,{column},exact,abs_error\n");
    for (p, x) in enumerate_values(cfg)? {
        let s = apply(p)?;
        if p.is_nar() {
            csv.push_str(&format!("{},NaR,{},NaR,NaR\n", p.to_hex(), real(s)));
        } else {
            let exact = sigma(x);
            csv.push_str(&format!(
                "{},{x},{},{exact},{}\n",
                p.to_hex(),
                real(s),
                (to_f64(s) - exact).abs()
            ));
        }
    }
    emit(&args.out, &csv)
}

fn dataset(args: DatasetArgs) -> CliResult<()> {
    let ds = make_rings_dataset(args.samples, args.noise, args.seed)?;
    emit(&args.out, &ds.to_csv_string())
}

fn train_cmd(args: TrainArgs) -> CliResult<()> {
    let ds = args.data.load()?;
    let model = match &args.init {
        Some(path) => MlpModel::load(path)?,
        None => MlpModel::from_mlp(
            &init_model(&DEFAULT_LAYERS, args.seed)?,
            NumericBackend::binary64(),
        ),
    };
    let backend = args.backend.with_dot_mode(args.dot.into());
    let (trained, record) = train(&model, &ds, backend, args.epochs, args.lr)?;
    let report = evaluate(&trained, &ds, backend)?;
    eprintln!(
        "{backend}: {} epochs, lr {}, final loss {:.6}, training accuracy {:.4}",
        record.epochs,
        record.lr,
        record.final_loss(),
        report.accuracy
    );
    if let Some(path) = &args.model_out {
        trained.save(path)?;
    }
    emit(&args.out, &record.to_csv_string())
}

fn infer(args: InferArgs) -> CliResult<()> {
    let ds = args.data.load()?;
    let backend = args.backend.with_dot_mode(args.dot.into());
    let model = cast_model(&MlpModel::load(&args.model)?, backend)?;
    let report = evaluate(&model, &ds, backend)?;
    if args.json {
        return say(serde_json::to_string_pretty(&report)?);
    }
    let mut text = format!(
        "backend   {}\nsamples   {}\ncorrect   {}\naccuracy  {:.2}%\n",
        report.backend,
        report.samples,
        report.correct,
        100.0 * report.accuracy
    );
    if report.nar_outputs > 0 {
        text.push_str(&format!("nar       {}\n", report.nar_outputs));
    }
    emit(&None, &text)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Convert(a) => convert(a)?,
        Command::Mul(a) => mul(a)?,
        Command::Verify(a) => return verify(a),
        Command::Table(a) => table(a)?,
        Command::Sigmoid(a) => sigmoid(a)?,
        Command::Dataset(a) => dataset(a)?,
        Command::Train(a) => train_cmd(a)?,
        Command::Infer(a) => infer(a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // A closed pipe (`posit table ... | head`) is not an error.
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
