use std::fmt;
use std::path::{Path, PathBuf};

use aoa_jam::io::{Config, Table};
use aoa_jam::seed::{stream, Seed};
use aoa_jam::sim::{crb_sweep, run_scenario, ScenarioSummary};
use aoa_jam::Error;

const RAD2_TO_DEG2: f64 = (180.0 / std::f64::consts::PI) * (180.0 / std::f64::consts::PI);

pub struct Source {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

pub fn load(src: Source) -> Outcome<Config> {
    let mut cfg = Config::load(&src.config)?;
    if let Some(seed) = src.seed {
        cfg = cfg.with_seed(seed)?;
    }
    if let Some(trials) = src.trials {
        cfg = cfg.with_trials(trials)?;
    }
    Ok(cfg)
}

pub fn crb(cfg: &Config, out: &Path) -> Outcome<()> {
    let s = &cfg.scenario;
    let sweep = crb_sweep(s, s.grid.angles())?;
    let mut table = Table::new(["theta_deg", "crb_free", "crb_uniform", "crb_optimal"]);
    for (i, &deg) in s.grid.degrees_values().iter().enumerate() {
        table.push(vec![deg, sweep.free.values[i], sweep.uniform.values[i], sweep.optimal.values[i]])?;
    }
    table.write(out)?;
    Ok(())
}

const SUMMARY_COLUMNS: [&str; 9] = [
    "trials",
    "mean_theta_hat_deg",
    "var_theta_hat_deg2",
    "crb_deg2",
    "capture_rate",
    "hit_rate",
    "dual_peak_rate",
    "mean_sjnr_db",
    "efficiency",
];

fn summary_row(s: &ScenarioSummary) -> Vec<f64> {
    vec![
        s.trials as f64,
        s.mean_theta_hat.to_degrees(),
        s.var_theta_hat * RAD2_TO_DEG2,
        s.crb_at_theta_t * RAD2_TO_DEG2,
        s.capture_rate,
        s.hit_rate,
        s.dual_peak_rate,
        s.mean_sjnr_db,
        s.efficiency(),
    ]
}

/// `dir/name.csv` becomes `dir/name.summary.csv`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

pub fn spectrum(cfg: &Config, out: &Path) -> Outcome<()> {
    let s = &cfg.scenario;
    let run = run_scenario(s)?;
    let spectrum = run
        .first_spectrum()
        .ok_or_else(|| Failure::Runtime("first trial kept no spectrum".into()))?;
    let mut table = Table::new(["theta_deg", "normalized_value"]);
    for (deg, v) in s.grid.degrees_values().iter().zip(&spectrum.values) {
        table.push(vec![*deg, *v])?;
    }
    let mut header = vec!["theta_hat_deg"];
    header.extend(SUMMARY_COLUMNS);
    let mut summary = Table::new(header);
    let mut row = vec![run.records[0].theta_hat.to_degrees()];
    row.extend(summary_row(&run.summary));
    summary.push(row)?;
    table.write(out)?;
    summary.write(&sidecar_path(out))?;
    Ok(())
}

pub fn sweep(cfg: &Config, param: &str, values: &[f64], out: &Path) -> Outcome<()> {
    if values.is_empty() {
        return Err(Failure::Config("sweep needs at least one value".into()));
    }
    let base = Seed(cfg.file.seed);
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let seed = base.path(&[stream::SWEEP, i as u64]).0;
            cfg.with_value(param, v).and_then(|c| c.with_seed(seed))
        })
        .collect::<aoa_jam::Result<Vec<_>>>()?;
    let mut header = vec![param];
    header.extend(SUMMARY_COLUMNS);
    let mut table = Table::new(header);
    for (row_cfg, &v) in rows.iter().zip(values) {
        let run = run_scenario(&row_cfg.scenario)?;
        let mut row = vec![v];
        row.extend(summary_row(&run.summary));
        table.push(row)?;
    }
    table.write(out)?;
    Ok(())
}
