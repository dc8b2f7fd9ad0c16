use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jamlab::detector::Detector;
use jamlab::harness::{
    self, draw_trial_frame, ExperimentKind, ExperimentOutput, ExperimentSpec, JammerConfig, JammerType,
    SymbolConfig, SymbolPolicyKind,
};
use jamlab::jammer::Hypothesis;
use jamlab::rng::Substreams;
use jamlab::Modem;

mod output;

use output::{write_outputs, RunRecord};

#[derive(Parser)]
#[command(name = "jamlab", version, about = "LoRa jamming lab: SER, detection and interference campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symbol-error-rate sweep (ser_vs_sjr, ser_vs_rho).
    Ser(RunArgs),
    /// Detection campaign (pmd_vs_l, pmd_vs_njr, pmd_theory_vs_sim, fap_vs_l, statistic_histogram).
    Pmd(RunArgs),
    /// Noise-free dechirped spectrum under tone jamming.
    Spectrum(SpectrumArgs),
    /// A handful of detector decisions, printed trial by trial.
    DetectDemo(DemoArgs),
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Overrides the document's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "JAMLAB_OUT_DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Divide trial counts by this factor.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    fast: Option<u64>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// dft_illustration document; when given the tone flags are ignored.
    #[arg(long, conflicts_with_all = ["u0", "sigma_j_sq", "a", "sf"])]
    config: Option<PathBuf>,
    /// Tone frequency offset in bins (repeat for several tones).
    #[arg(long, required_unless_present = "config")]
    u0: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma_j_sq: f64,
    /// Transmitted symbol; defaults to the one the tone helps most.
    #[arg(long)]
    a: Option<usize>,
    #[arg(long, default_value_t = 7)]
    sf: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DemoArgs {
    /// Detection document; its first sweep point is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trials per hypothesis.
    #[arg(long, default_value_t = 8)]
    trials: u64,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<jamlab::Error> for Failure {
    fn from(e: jamlab::Error) -> Self {
        match e {
            jamlab::Error::Config { .. } | jamlab::Error::InvalidParameter { .. } => {
                Failure::Invalid(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Ser(args) => run_campaign(args, ExperimentKind::is_ser, "ser"),
        Command::Pmd(args) => {
            run_campaign(args, |k| k.is_detection() || k == ExperimentKind::StatisticHistogram, "pmd")
        }
        Command::Spectrum(args) => spectrum(args),
        Command::DetectDemo(args) => detect_demo(args),
        Command::Validate { config } => {
            let spec = load(&config)?;
            spec.validate()?;
            println!(
                "{}: ok ({}, {} sweep points)",
                config.display(),
                spec.kind.name(),
                spec.sweep_values().len()
            );
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    Ok(ExperimentSpec::from_toml_str(&text)?)
}

fn run_campaign(args: RunArgs, accepts: fn(ExperimentKind) -> bool, sub: &str) -> Result<(), Failure> {
    let mut spec = load(&args.config)?;
    if !accepts(spec.kind) {
        return Err(Failure::Invalid(format!(
            "config field `kind`: `{}` is not handled by `jamlab {sub}`",
            spec.kind.name()
        )));
    }
    if let Some(seed) = args.common.seed {
        spec.seed = seed;
    }
    if let Some(f) = args.fast {
        spec = spec.scaled_down(f);
    }
    spec.validate()?;
    let out = harness::run(&spec)?;
    finish(&spec, &out, &args.common.out, args.fast)
}

fn spectrum(args: SpectrumArgs) -> Result<(), Failure> {
    let mut spec = match &args.config {
        Some(path) => load(path)?,
        None => {
            let mut spec = ExperimentSpec::new(ExperimentKind::DftIllustration);
            spec.sf = args.sf;
            let mut jam = JammerConfig::new(JammerType::Tone);
            jam.sigma_j_sq = Some(args.sigma_j_sq);
            jam.freqs = Some(args.u0.clone());
            spec.jammer = Some(jam);
            spec.symbol = match args.a {
                Some(a) => SymbolConfig { policy: SymbolPolicyKind::Fixed, value: Some(a) },
                None => SymbolConfig { policy: SymbolPolicyKind::AMax, value: None },
            };
            spec
        }
    };
    if spec.kind != ExperimentKind::DftIllustration {
        return Err(Failure::Invalid(format!(
            "config field `kind`: `{}` is not handled by `jamlab spectrum`",
            spec.kind.name()
        )));
    }
    if let Some(seed) = args.common.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    let out = harness::run(&spec)?;
    finish(&spec, &out, &args.common.out, None)
}

fn detect_demo(args: DemoArgs) -> Result<(), Failure> {
    let mut spec = match &args.config {
        Some(path) => load(path)?,
        None => ExperimentSpec::from_toml_str(DEMO_DEFAULT)?,
    };
    if let Some(seed) = args.common.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    let x = spec.sweep_values()[0];
    let series = spec.series_values()[0];
    let setup = spec.resolve(series, x)?;
    let modem = Modem::new(setup.params);
    let detector = Detector::new(setup.detector, &setup.params)?;
    let streams = Substreams::new(spec.seed);

    let mut hyps = vec![Hypothesis::H0, Hypothesis::H2];
    if setup.jammer.is_some() {
        hyps.extend([Hypothesis::H1, Hypothesis::H3]);
    }
    println!(
        "L = {}, lambda = {:.4}, lambda_saa = {:.4}, sigma_sq_hat = {}",
        setup.detector.l,
        detector.lambda(),
        detector.lambda_saa(),
        setup.detector.sigma_sq_hat
    );
    let path = prepare_dir(&args.common.out)?.join("detect_demo.csv");
    let mut w = csv::Writer::from_path(&path).map_err(runtime)?;
    w.write_record(["hypothesis", "trial", "symbol", "z", "threshold", "jammed", "n_eliminated"])
        .map_err(runtime)?;
    for (hi, &hyp) in hyps.iter().enumerate() {
        for t in 0..args.trials {
            let mut rng = streams.trial(hi as u64, t);
            let tf = draw_trial_frame(&modem, &setup, &spec.symbol, hyp, &mut rng)?;
            let dft = modem.dechirp_dft(&tf.frame)?;
            let symbol = tf.symbol.map(|s| s.value().to_string()).unwrap_or_default();
            let (z, jammed, elim) = match detector.detect(&dft, &mut rng) {
                Ok(d) => (format!("{:.6}", d.statistic_z), d.jammed.to_string(), d.n_eliminated.to_string()),
                Err(jamlab::Error::InsufficientBins { .. }) => (String::new(), "void".into(), String::new()),
                Err(e) => return Err(e.into()),
            };
            let verdict = match jammed.as_str() {
                "true" => "jammed",
                "false" => "clear",
                other => other,
            };
            println!("{:>2} trial {t:>3}: z = {z:>10} -> {verdict}", hyp.name());
            w.write_record([
                hyp.name().to_string(),
                t.to_string(),
                symbol,
                z,
                detector.lambda_saa().to_string(),
                jammed,
                elim,
            ])
            .map_err(runtime)?;
        }
    }
    w.flush().map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

const DEMO_DEFAULT: &str = r#"
kind = "pmd_theory_vs_sim"
seed = 1
[channel]
snr_db = 0.0
[jammer]
type = "band"
rho = 0.6
[detector]
l = 4
p_fa_saa = 1e-5
[sweep]
axis = "njr_db"
values = [-10.0]
"#;

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn prepare_dir(dir: &Path) -> Result<&Path, Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn finish(
    spec: &ExperimentSpec,
    out: &ExperimentOutput,
    dir: &Path,
    fast: Option<u64>,
) -> Result<(), Failure> {
    let record = RunRecord::new(spec, out, fast);
    let written = write_outputs(prepare_dir(dir)?, &record, out).map_err(runtime)?;
    output::print_summary(spec, out);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
