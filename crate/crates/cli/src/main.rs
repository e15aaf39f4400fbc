//! `ibvs-dock`: run docking scenarios, batches and gain synthesis from the shell.
//!
//! Exit status: 0 when every requested docking succeeded (or the command had
//! nothing to dock), 2 when a run finished cleanly but failed to dock, 1 on
//! usage, configuration or synthesis errors.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ibvs_docking::control::synthesize_gains;
use ibvs_docking::dynamics::TurbulenceLevel;
use ibvs_docking::sim::{
    parse_turbulence, run_batch, run_scenario, ControllerKind, GainTable, ScenarioConfig,
    ScenarioResult,
};
use ibvs_docking::Vec3;

const EXIT_DOCKED: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NOT_DOCKED: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ibvs-dock",
    version,
    about = "Probe-drogue docking simulator with IBVS outer loop and LQI inner loop"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write `<name>-<seed>.csv` and `<name>-<seed>.outcome.txt`.
    Run(RunArgs),
    /// Run the scenario over consecutive seeds and write per-seed files plus a summary.
    Batch(BatchArgs),
    /// Synthesize the inner-loop gains and print them with residuals and eigenvalues.
    Synth(ScenarioArgs),
    /// Check that a configuration is complete and runnable.
    Validate(ScenarioArgs),
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario file (TOML). Without it the built-in nominal scenario is used.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Outer-loop law.
    #[arg(long, value_name = "ibvs|pbvs")]
    controller: Option<ControllerKind>,
    /// Turbulence intensity.
    #[arg(long, value_name = "off|1|2", value_parser = parse_turbulence)]
    turbulence: Option<TurbulenceLevel>,
    /// Enable the bow-wave disturbance.
    #[arg(long)]
    bow_wave: bool,
    /// Camera mount offset error in receiver axes [m].
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec3, allow_hyphen_values = true)]
    pose_error: Option<Vec3>,
    /// Outer-loop gain table.
    #[arg(long, value_name = "table1|table2")]
    gains: Option<GainTable>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "IBVS_DOCK_OUT", default_value = "out")]
    out: PathBuf,
    /// Turbulence seed; defaults to the one in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BatchArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_name = "DIR", env = "IBVS_DOCK_OUT", default_value = "out")]
    out: PathBuf,
    /// First seed of the batch.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds.
    #[arg(long = "seeds", value_name = "N", default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(Vec3::from(v))
}

impl ScenarioArgs {
    /// Loads the config and applies command-line overrides on top of it.
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::nominal(),
        };
        if let Some(c) = self.controller {
            cfg.set_controller(c);
        }
        if let Some(t) = self.gains {
            cfg.set_gain_table(t);
        }
        if let Some(level) = self.turbulence {
            cfg.set_turbulence(level);
        }
        if self.bow_wave {
            cfg.enable_bow_wave();
        }
        if let Some(dp) = self.pose_error {
            cfg.set_pose_error(dp);
        }
        Ok(cfg)
    }
}

fn file_stem(cfg: &ScenarioConfig, seed: u64) -> String {
    format!("{}-{}", cfg.name, seed)
}

fn write_run_files(
    out: &Path,
    cfg: &ScenarioConfig,
    result: &ScenarioResult,
) -> Result<(PathBuf, PathBuf)> {
    let stem = file_stem(cfg, cfg.seed);
    let csv_path = out.join(format!("{stem}.csv"));
    let mut w = BufWriter::new(
        File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?,
    );
    result.log.write_csv(&mut w, &cfg.provenance())?;
    w.flush()?;

    let outcome_path = out.join(format!("{stem}.outcome.txt"));
    let mut text = String::new();
    text.push_str(&format!("name: {}\nseed: {}\n", cfg.name, cfg.seed));
    text.push_str(&result.outcome.to_string());
    text.push_str(&format!(
        "peak_image_error: {:.6}\n",
        result.log.peak_image_error()
    ));
    text.push_str(&format!(
        "saturation_fraction: {:.6}\n",
        result.log.saturation_fraction()
    ));
    for w in &result.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    fs::write(&outcome_path, text)
        .with_context(|| format!("writing {}", outcome_path.display()))?;
    Ok((csv_path, outcome_path))
}

fn create_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))
}

fn cmd_run(args: &RunArgs) -> Result<u8> {
    let mut cfg = args.scenario.load()?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    cfg.validate()?;
    let result = run_scenario(&cfg)?;
    create_out_dir(&args.out)?;
    let (csv, outcome) = write_run_files(&args.out, &cfg, &result)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let o = &result.outcome;
    match o.failure_reason {
        None => println!(
            "docked: miss {:.4} m, closing {:.3} m/s at t = {:.2} s",
            o.miss_distance,
            o.closing_speed,
            o.time_of_contact.unwrap_or(f64::NAN)
        ),
        Some(reason) => println!("not docked ({reason}): miss {:.4} m", o.miss_distance),
    }
    println!("wrote {} and {}", csv.display(), outcome.display());
    Ok(if o.success {
        EXIT_DOCKED
    } else {
        EXIT_NOT_DOCKED
    })
}

fn cmd_batch(args: &BatchArgs) -> Result<u8> {
    let cfg = args.scenario.load()?;
    cfg.validate()?;
    let seeds: Vec<u64> = (args.seed..args.seed + args.count).collect();
    let batch = run_batch(&cfg, &seeds)?;
    create_out_dir(&args.out)?;
    for run in &batch.runs {
        let mut seeded = cfg.clone();
        seeded.set_seed(run.seed);
        match &run.result {
            Ok(result) => {
                write_run_files(&args.out, &seeded, result)?;
            }
            Err(msg) => {
                let path = args
                    .out
                    .join(format!("{}.outcome.txt", file_stem(&seeded, run.seed)));
                fs::write(
                    &path,
                    format!("name: {}\nseed: {}\nerror: {msg}\n", cfg.name, run.seed),
                )?;
                eprintln!("seed {}: {msg}", run.seed);
            }
        }
    }
    let summary_path = args.out.join(format!("{}-batch.txt", cfg.name));
    let mut text = String::new();
    for (k, v) in cfg.provenance() {
        if k != "seed" {
            text.push_str(&format!("{k}: {v}\n"));
        }
    }
    text.push_str(&format!(
        "seeds: {}..{}\n",
        args.seed,
        args.seed + args.count
    ));
    text.push_str(&batch.summary.to_string());
    fs::write(&summary_path, &text)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    let s = &batch.summary;
    println!(
        "{}/{} docked ({:.1}%), miss mean {:.4} m, max {:.4} m",
        s.successes,
        s.runs,
        100.0 * s.success_rate,
        s.miss_mean,
        s.miss_max
    );
    println!("wrote {}", summary_path.display());
    Ok(if s.errors > 0 {
        EXIT_ERROR
    } else if s.successes == s.runs {
        EXIT_DOCKED
    } else {
        EXIT_NOT_DOCKED
    })
}

fn cmd_synth(args: &ScenarioArgs) -> Result<u8> {
    let cfg = args.load()?;
    let syn = synthesize_gains(&cfg.plant, &cfg.weights).context("gain synthesis failed")?;
    println!("plant: {}", cfg.plant_source);
    println!();
    print!("{syn}");
    let mut ok = true;
    for ch in [&syn.lon, &syn.lat] {
        if !(ch.residual < ch.residual_bound) {
            eprintln!(
                "error: {:?} Riccati residual {:.3e} exceeds {:.3e}",
                ch.channel, ch.residual, ch.residual_bound
            );
            ok = false;
        }
    }
    Ok(if ok { EXIT_DOCKED } else { EXIT_ERROR })
}

fn cmd_validate(args: &ScenarioArgs) -> Result<u8> {
    let cfg = args.load()?;
    cfg.validate()?;
    synthesize_gains(&cfg.plant, &cfg.weights).context("gain synthesis failed")?;
    println!("ok: {}", cfg.name);
    for (k, v) in cfg.provenance() {
        println!("  {k}: {v}");
    }
    Ok(EXIT_DOCKED)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_DOCKED
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
