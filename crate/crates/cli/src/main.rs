use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nuqutrit_core::decomp::Scenario;
use nuqutrit_core::pmns::Flavor;
use nuqutrit_device::{calibrate, CalibrationPlan, CalibrationReport, MockTransmon};
use nuqutrit_cli::{emit, gates, read_csv, run_scenario, score, table_from_csv, Gate, Mode, ScenarioConfig};

const EXIT_GATE_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "nuqutrit", version, about = "Neutrino oscillations on a simulated qutrit")]
struct Cli {
    /// Directory for CSV, plot data and manifests.
    #[arg(long, global = true, env = "NUQUTRIT_OUT", default_value = "nuqutrit-out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Vacuum oscillation over one solar period at 1 GeV.
    Vacuum(RunArgs),
    /// Oscillation in constant-density matter for several potentials.
    Matter(RunArgs),
    /// Energy sweep at 295 km for several CP phases.
    Cp(RunArgs),
    /// Calibrate a mock transmon and report estimates against its hidden parameters.
    Calibrate(CalibrateArgs),
    /// Score an emitted CSV against its analytic columns.
    Score(ScoreArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    repeats: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario config or run manifest to start from; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Device JSON for pulse mode.
    #[arg(long)]
    device: Option<PathBuf>,
    /// Initial flavor (e, mu, tau).
    #[arg(long)]
    init: Option<Flavor>,
    /// Grid points per curve.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    min_r2: Option<f64>,
    /// Report raw frequencies instead of mitigating readout errors.
    #[arg(long)]
    no_mitigate: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    device: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Shots per spectroscopy and Rabi point.
    #[arg(long)]
    shots: Option<u64>,
}

#[derive(Args)]
struct ScoreArgs {
    csv: PathBuf,
    /// Manifest or config of the run; needed for the exact R² threshold and shot metadata.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Vacuum(a) => run(Scenario::Vacuum, a, &cli.out),
        Cmd::Matter(a) => run(Scenario::Matter, a, &cli.out),
        Cmd::Cp(a) => run(Scenario::Cp, a, &cli.out),
        Cmd::Calibrate(a) => run_calibration(a, &cli.out),
        Cmd::Score(a) => run_score(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_GATE_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn print_gates(gates: &[Gate]) -> bool {
    for g in gates {
        println!("[{}] {}: {}", if g.passed { "PASS" } else { "FAIL" }, g.name, g.detail);
    }
    gates.iter().all(|g| g.passed)
}

fn run(scenario: Scenario, a: RunArgs, out: &Path) -> anyhow::Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::for_scenario(scenario),
    };
    if cfg.scenario != scenario {
        anyhow::bail!("config is for the {} scenario, not {scenario}", cfg.scenario);
    }
    if let Some(m) = a.mode {
        cfg.mode = m;
    }
    if let Some(s) = a.shots {
        cfg.shots = s;
    }
    if let Some(r) = a.repeats {
        cfg.repeats = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(f) = a.init {
        cfg.init = f;
    }
    if let Some(n) = a.points {
        cfg.grid.points = n;
    }
    if let Some(r) = a.min_r2 {
        cfg.min_r2 = r;
    }
    if a.no_mitigate {
        cfg.mitigate = false;
    }
    if let Some(p) = &a.device {
        cfg.device = Some(MockTransmon::load(p)?);
    }

    let t0 = Instant::now();
    let table = run_scenario(&cfg)?;
    let report = score(&table);
    let checks = gates(&table, &report);
    let paths = emit(&table, Some(&report), &checks, out)?;
    println!(
        "{} {}: {} points in {:.2} s → {}",
        cfg.scenario,
        cfg.mode,
        table.rows.len(),
        t0.elapsed().as_secs_f64(),
        paths.csv.display()
    );
    for c in &report.curves {
        println!(
            "  curve {} (vm {:e}, δ {:+.4}) → {}: R² {} mean Δy {:.3}",
            c.curve,
            c.vm_ev2,
            c.delta_rad,
            c.final_flavor,
            c.r2.map_or("n/a".into(), |r| format!("{r:.4}")),
            c.mean_rel_err
        );
    }
    Ok(print_gates(&checks))
}

fn calibration_gates(r: &CalibrationReport, plan: &CalibrationPlan) -> Vec<Gate> {
    let (lo, hi, n) = plan.spectroscopy_ghz;
    let step = (hi - lo) / (n - 1) as f64;
    let (dl, dh, dn) = plan.readout_durations_us;
    let (al, ah, an) = plan.readout_amplitudes;
    let rel = |e: &nuqutrit_device::calibrate::Estimate| (e.error / e.truth).abs();
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        out.push(Gate {
            name: name.into(),
            passed,
            detail,
        })
    };
    push("f12", r.f12_ghz.error.abs() <= step, format!("error {:.2e} GHz (step {step:.2e})", r.f12_ghz.error));
    for (name, e) in [("A_pi 01", &r.a_pi_01), ("A_pi 12", &r.a_pi_12)] {
        push(name, rel(e) <= 0.03, format!("relative error {:.2e}", rel(e)));
    }
    let dstep = (dh - dl) / (dn.max(2) - 1) as f64;
    let astep = (ah - al) / (an.max(2) - 1) as f64;
    push(
        "readout optimum",
        r.readout_duration_us.error.abs() <= dstep + 1e-9 && r.readout_amplitude.error.abs() <= astep + 1e-9,
        format!("({} μs, {})", r.readout_duration_us.estimate, r.readout_amplitude.estimate),
    );
    for (name, e) in [("under-rotation", &r.under_rotation_rad), ("decay rate", &r.decay_rate_khz)] {
        let ok = if e.truth == 0.0 { e.error.abs() < 1e-3 } else { rel(e) <= 0.2 };
        push(name, ok, format!("{:.5} vs {:.5}", e.estimate, e.truth));
    }
    out
}

fn run_calibration(a: CalibrateArgs, out: &Path) -> anyhow::Result<bool> {
    let device = match &a.device {
        Some(p) => MockTransmon::load(p)?,
        None => MockTransmon::default(),
    };
    let mut plan = CalibrationPlan::default();
    if let Some(s) = a.shots {
        plan.shots = s;
    }
    let report = calibrate(&device, &plan, a.seed)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    report.write_json(&out.join("calibration.json"))?;
    report.heatmap.write_csv(&out.join("readout_heatmap.csv"))?;
    device.save(&out.join("device.json"))?;
    println!("{}", report.to_json());
    Ok(print_gates(&calibration_gates(&report, &plan)))
}

fn run_score(a: ScoreArgs) -> anyhow::Result<bool> {
    let records = read_csv(&a.csv)?;
    let first = records.first().context("CSV has no rows")?;
    let cfg = match &a.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => {
            let scenario: Scenario = first.scenario.parse()?;
            ScenarioConfig {
                mode: first.mode,
                init: first.init.parse()?,
                ..ScenarioConfig::for_scenario(scenario)
            }
        }
    };
    let table = table_from_csv(cfg, &records);
    let report = score(&table);
    let checks = gates(&table, &report);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(print_gates(&checks))
}
