use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nuqutrit_device::CalibrationReport;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, ScenarioConfig, SweepAxis};
use crate::error::{io_err, Result, RunError};
use crate::run::{JobRecord, ResultTable, Row, Status};
use crate::score::{Gate, ScoreReport};

/// Flat CSV record; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub scenario: String,
    pub mode: Mode,
    pub init: String,
    pub curve: usize,
    pub point: usize,
    pub job: usize,
    pub vm_ev2: f64,
    pub delta_rad: f64,
    pub l_km: f64,
    pub e_gev: f64,
    pub l_over_e: f64,
    pub p_e: f64,
    pub p_mu: f64,
    pub p_tau: f64,
    pub err_e: f64,
    pub err_mu: f64,
    pub err_tau: f64,
    pub analytic_e: f64,
    pub analytic_mu: f64,
    pub analytic_tau: f64,
    pub exact_e: Option<f64>,
    pub exact_mu: Option<f64>,
    pub exact_tau: Option<f64>,
    pub counts_e: Option<u64>,
    pub counts_mu: Option<u64>,
    pub counts_tau: Option<u64>,
    pub shots: u64,
    pub status: String,
}

pub const COLUMNS: [&str; 28] = [
    "scenario", "mode", "init", "curve", "point", "job", "vm_ev2", "delta_rad", "l_km", "e_gev", "l_over_e", "p_e",
    "p_mu", "p_tau", "err_e", "err_mu", "err_tau", "analytic_e", "analytic_mu", "analytic_tau", "exact_e", "exact_mu",
    "exact_tau", "counts_e", "counts_mu", "counts_tau", "shots", "status",
];

impl CsvRecord {
    pub fn from_row(cfg: &ScenarioConfig, r: &Row) -> Self {
        Self {
            scenario: cfg.scenario.label().into(),
            mode: cfg.mode,
            init: cfg.init.label().into(),
            curve: r.curve,
            point: r.point,
            job: r.job,
            vm_ev2: r.vm_ev2,
            delta_rad: r.delta_rad,
            l_km: r.l_km,
            e_gev: r.e_gev,
            l_over_e: r.l_over_e,
            p_e: r.p[0],
            p_mu: r.p[1],
            p_tau: r.p[2],
            err_e: r.err[0],
            err_mu: r.err[1],
            err_tau: r.err[2],
            analytic_e: r.analytic[0],
            analytic_mu: r.analytic[1],
            analytic_tau: r.analytic[2],
            exact_e: r.exact.map(|e| e[0]),
            exact_mu: r.exact.map(|e| e[1]),
            exact_tau: r.exact.map(|e| e[2]),
            counts_e: r.counts.map(|c| c[0]),
            counts_mu: r.counts.map(|c| c[1]),
            counts_tau: r.counts.map(|c| c[2]),
            shots: r.shots,
            status: match &r.status {
                Status::Ok => "ok".into(),
                Status::Failed(m) => format!("failed: {m}"),
            },
        }
    }

    pub fn to_row(&self) -> Row {
        let exact = match (self.exact_e, self.exact_mu, self.exact_tau) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => None,
        };
        let counts = match (self.counts_e, self.counts_mu, self.counts_tau) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => None,
        };
        Row {
            curve: self.curve,
            point: self.point,
            job: self.job,
            vm_ev2: self.vm_ev2,
            delta_rad: self.delta_rad,
            l_km: self.l_km,
            e_gev: self.e_gev,
            l_over_e: self.l_over_e,
            p: [self.p_e, self.p_mu, self.p_tau],
            err: [self.err_e, self.err_mu, self.err_tau],
            analytic: [self.analytic_e, self.analytic_mu, self.analytic_tau],
            exact,
            counts,
            shots: self.shots,
            status: match self.status.strip_prefix("failed: ") {
                Some(m) => Status::Failed(m.into()),
                None => Status::Ok,
            },
        }
    }
}

pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let csv_err = |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in &table.rows {
        w.serialize(CsvRecord::from_row(&table.config, r)).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRecord>> {
    let csv_err = |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<Vec<CsvRecord>, _>>().map_err(csv_err)
}

/// Rebuilds a result table from emitted CSV rows and the run's config.
pub fn table_from_csv(config: ScenarioConfig, records: &[CsvRecord]) -> ResultTable {
    ResultTable {
        config,
        rows: records.iter().map(CsvRecord::to_row).collect(),
        jobs: Vec::new(),
        calibration: None,
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub created_unix: u64,
    pub config: &'a ScenarioConfig,
    pub rows: usize,
    pub failed_points: usize,
    pub files: Vec<String>,
    pub jobs: &'a [JobRecord],
    pub calibration: Option<&'a CalibrationReport>,
    pub score: Option<&'a ScoreReport>,
    pub gates: &'a [Gate],
}

#[derive(Debug, Clone)]
pub struct EmitPaths {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub curves: Vec<PathBuf>,
}

fn run_stem(cfg: &ScenarioConfig) -> String {
    format!("{}_{}", cfg.scenario.label(), cfg.mode.label())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Writes the CSV table, one gnuplot data file per curve and the JSON manifest into `dir`,
/// creating it if needed.
pub fn emit(table: &ResultTable, score: Option<&ScoreReport>, gates: &[Gate], dir: &Path) -> Result<EmitPaths> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let cfg = &table.config;
    let stem = run_stem(cfg);
    let csv = dir.join(format!("{stem}.csv"));
    write_csv(table, &csv)?;

    let mut curves = Vec::new();
    for (c, (vm, delta)) in cfg.curves().into_iter().enumerate() {
        let path = dir.join(format!("{stem}_curve{c}.dat"));
        write_text(&path, &gnuplot_curve(table, c, vm, delta))?;
        curves.push(path);
    }

    let manifest = dir.join(format!("{stem}.manifest.json"));
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut files = vec![name(&csv)];
    files.extend(curves.iter().map(|p| name(p)));
    let m = Manifest {
        tool: "nuqutrit",
        version: env!("CARGO_PKG_VERSION"),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        config: cfg,
        rows: table.rows.len(),
        failed_points: table.failures(),
        files,
        jobs: &table.jobs,
        calibration: table.calibration.as_ref(),
        score,
        gates,
    };
    write_text(&manifest, &serde_json::to_string_pretty(&m).expect("manifest serialises"))?;
    Ok(EmitPaths { csv, manifest, curves })
}

fn gnuplot_curve(table: &ResultTable, curve: usize, vm: f64, delta: f64) -> String {
    let cfg = &table.config;
    let x = match cfg.axis {
        SweepAxis::LOverE => "l_over_e_km_per_gev",
        SweepAxis::Energy => "e_gev",
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} {} init={} vm_ev2={vm} delta_rad={delta}",
        cfg.scenario, cfg.mode, cfg.init
    );
    let _ = writeln!(
        s,
        "# {x} p_e err_e p_mu err_mu p_tau err_tau analytic_e analytic_mu analytic_tau"
    );
    for r in table.curve_rows(curve).filter(|r| r.status.is_ok()) {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {} {}",
            r.x(cfg.axis),
            r.p[0],
            r.err[0],
            r.p[1],
            r.err[1],
            r.p[2],
            r.err[2],
            r.analytic[0],
            r.analytic[1],
            r.analytic[2]
        );
    }
    s
}
