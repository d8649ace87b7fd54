use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use topoflux::device;
use topoflux::experiment::output::{self, OutputFormat};
use topoflux::experiment::{
    run_resolved, run_robustness, run_sweep, sweep_spec, Experiment, ResolvedScenario,
    ScenarioConfig,
};
use topoflux::gates::verify_cp;
use topoflux::{Error, Result};

#[derive(Parser)]
#[command(
    name = "topoflux",
    version,
    about = "Topological-qubit / flux-qubit transfer simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parameter pipeline and validity report.
    Derive(Common),
    /// Run the configured scenario (fig2a, fig2b, altParams, custom; sweeps and robustness dispatch too).
    Run(Common),
    /// F1 matrix for a fig3a/fig3b config.
    Sweep(Common),
    /// Monte Carlo and corner evaluation for a robustness config.
    Robustness(Common),
    /// Gate checks.
    Gates {
        #[command(subcommand)]
        command: GatesCommand,
    },
}

#[derive(Subcommand)]
enum GatesCommand {
    /// CP synthesis and √SWAP local-equivalence report.
    Verify(GatesArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the robustness seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', value_name = "csv|svg|json")]
    format: Vec<OutputFormat>,
}

#[derive(Args)]
struct GatesArgs {
    /// Scenario whose g and E drive the dynamics cross-check; set 1 otherwise.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn formats(&self) -> Vec<OutputFormat> {
        if self.format.is_empty() {
            vec![OutputFormat::Csv, OutputFormat::Svg, OutputFormat::Json]
        } else {
            self.format.clone()
        }
    }

    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let (Some(seed), Experiment::Robustness(r)) = (self.seed, &mut cfg.experiment) {
            r.seed = seed;
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DeriveReport {
    schema_version: u32,
    ratio_formula: Option<f64>,
    resolved: topoflux::experiment::scenario::ResolvedEcho,
}

fn derive(args: &Common) -> Result<()> {
    let cfg = args.load()?;
    let r = ResolvedScenario::from_config(&cfg)?;
    let report = DeriveReport {
        schema_version: topoflux::experiment::SCHEMA_VERSION,
        ratio_formula: device::ratio_formula(&r.device).ok(),
        resolved: topoflux::experiment::scenario::ResolvedEcho::of(&r)?,
    };
    let json = output::to_json(&report);
    print!("{json}");
    if let Some(dir) = &args.out {
        announce(&output::write_file(&dir.join("derive.json"), &json)?);
    }
    Ok(())
}

fn run(args: &Common) -> Result<()> {
    let cfg = args.load()?;
    match cfg.experiment {
        Experiment::Fig3a(_) | Experiment::Fig3b(_) => return sweep_with(args, &cfg),
        Experiment::Robustness(_) => return robustness_with(args, &cfg),
        _ => {}
    }
    let r = ResolvedScenario::from_config(&cfg)?;
    let out = run_resolved(&r)?;
    let s = &out.summary;
    eprintln!("{}: {} = {:.6}", s.experiment, s.fidelity_label, s.fidelity);
    let paths = output::emit_outputs(
        &out.trajectory,
        s,
        &args.formats(),
        &args.out_dir(),
        s.experiment,
    )?;
    paths.iter().for_each(|p| announce(p));
    Ok(())
}

fn sweep(args: &Common) -> Result<()> {
    let cfg = args.load()?;
    sweep_with(args, &cfg)
}

fn sweep_with(args: &Common, cfg: &ScenarioConfig) -> Result<()> {
    let spec = sweep_spec(cfg).ok_or_else(|| Error::Config {
        pointer: "/experiment".into(),
        message: "sweep needs a fig3a or fig3b experiment".into(),
    })??;
    let r = ResolvedScenario::from_config(cfg)?;
    let result = run_sweep(&r, &spec)?;
    let stem = cfg.experiment.name();
    let dir = args.out_dir();
    for f in args.formats() {
        let path = match f {
            OutputFormat::Csv => output::write_file(
                &dir.join(format!("{stem}.csv")),
                &output::sweep_csv(&result)?,
            )?,
            OutputFormat::Svg => output::write_file(
                &dir.join(format!("{stem}.svg")),
                &output::sweep_svg(&result),
            )?,
            OutputFormat::Json => {
                output::write_file(&dir.join(format!("{stem}.json")), &output::to_json(&result))?
            }
        };
        announce(&path);
    }
    Ok(())
}

fn robustness(args: &Common) -> Result<()> {
    let cfg = args.load()?;
    robustness_with(args, &cfg)
}

fn robustness_with(args: &Common, cfg: &ScenarioConfig) -> Result<()> {
    let Experiment::Robustness(rc) = cfg.experiment else {
        return Err(Error::Config {
            pointer: "/experiment".into(),
            message: "robustness needs a robustness experiment".into(),
        });
    };
    let r = ResolvedScenario::from_config(cfg)?;
    let summary = run_robustness(&r, rc.error_fraction, rc.samples, rc.seed)?;
    eprintln!(
        "robustness: nominal F1 = {:.6}, worst corner = {:.6}, mean = {:.6}",
        summary.nominal_f1, summary.worst_corner.f1, summary.mean_f1
    );
    let path = output::write_file(
        &args.out_dir().join("robustness.json"),
        &output::to_json(&summary),
    )?;
    announce(&path);
    Ok(())
}

fn gates_verify(args: &GatesArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::preset_set1(Experiment::Fig2a),
    };
    let r = ResolvedScenario::from_config(&cfg)?;
    let report = verify_cp(r.couplings.g, r.couplings.energy_e)?;
    eprintln!("{}", report.verdict);
    let json = output::to_json(&report);
    match &args.out {
        Some(dir) => announce(&output::write_file(
            &dir.join("gates_verification.json"),
            &json,
        )?),
        None => print!("{json}"),
    }
    Ok(())
}

fn announce(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Derive(a) => derive(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Robustness(a) => robustness(a),
        Command::Gates {
            command: GatesCommand::Verify(a),
        } => gates_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
