//! Run configuration and the five analysis commands.
//!
//! Config frequencies are linear Hz; internally everything is angular
//! (rad/s) with ħ = m = 1. Tabular output is CSV with a `# sqlent <version>
//! <command>` comment line, scalar output is pretty JSON carrying the same
//! two fields.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::entangle::{assemble, ellipse_axes, ellipse_points, log_negativity, physicality_check};
use crate::error::{Error, Result};
use crate::optimize::{linspace, sweep, OptimizeConfig};
use crate::params::{ModeParams, UnitSystem};
use crate::spectra::budget;
use crate::wiener::{conditional_moments, uncertainty_product, ConditionalMoments, Method};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Boundary points per mode written by `ellipse`.
pub const ELLIPSE_POINTS: usize = 360;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mass_kg: Option<f64>,
    pub omega_m_hz: Option<f64>,
    pub gamma_m_hz: Option<f64>,
    pub omega_alpha_c_hz: Option<f64>,
    pub omega_alpha_d_hz: Option<f64>,
    pub omega_f_hz: Option<f64>,
    pub omega_x_hz: Option<f64>,
    /// Technical laser noise above vacuum, common mode only.
    #[serde(default)]
    pub laser_amp_db: f64,
    #[serde(default)]
    pub laser_phase_db: f64,
    #[serde(default)]
    pub phi_c: f64,
    #[serde(default)]
    pub phi_d: f64,
    pub grid: Option<GridConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ratio_start: f64,
    pub ratio_stop: f64,
    pub ratio_points: usize,
    pub noise_db_list: Vec<f64>,
}

fn config_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn positive(key: &str, v: Option<f64>) -> Result<f64> {
    match v {
        None => Err(config_err(key, "required by this command")),
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(v) => Err(config_err(key, format!("must be positive, got {v}"))),
    }
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, "must be finite"))
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| config_err("<document>", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Common and differential channels in rad/s.
    pub fn modes(&self) -> Result<(ModeParams, ModeParams)> {
        let wc = TAU * positive("omega_alpha_c_hz", self.omega_alpha_c_hz)?;
        let wd = TAU * positive("omega_alpha_d_hz", self.omega_alpha_d_hz)?;
        let (wf, wx) = self.noise_corners()?;
        finite("laser_amp_db", self.laser_amp_db)?;
        finite("laser_phase_db", self.laser_phase_db)?;
        finite("phi_c", self.phi_c)?;
        finite("phi_d", self.phi_d)?;
        if let Some(m) = self.mass_kg {
            positive("mass_kg", Some(m))?;
        }
        let pendulum = match (self.omega_m_hz, self.gamma_m_hz) {
            (None, None) => None,
            (om, g) => {
                let om = om.unwrap_or(0.0);
                if !(om >= 0.0 && om.is_finite()) {
                    return Err(config_err("omega_m_hz", format!("must be non-negative, got {om}")));
                }
                Some((TAU * om, TAU * positive("gamma_m_hz", g)?))
            }
        };
        let build = |w: f64, phi: f64| {
            let m = ModeParams::new(w, wf, wx).with_phi(phi);
            match pendulum {
                Some((om, g)) => m.with_pendulum(om, g),
                None => m,
            }
        };
        let common = build(wc, self.phi_c).with_laser_db(self.laser_amp_db, self.laser_phase_db);
        let differential = build(wd, self.phi_d);
        common.validate()?;
        differential.validate()?;
        Ok((common, differential))
    }

    fn noise_corners(&self) -> Result<(f64, f64)> {
        let wf = match self.omega_f_hz {
            Some(v) if v >= 0.0 && v.is_finite() => TAU * v,
            Some(v) => return Err(config_err("omega_f_hz", format!("must be non-negative, got {v}"))),
            None => return Err(config_err("omega_f_hz", "required by this command")),
        };
        Ok((wf, TAU * positive("omega_x_hz", self.omega_x_hz)?))
    }

    pub fn grid_hz(&self) -> Result<Vec<f64>> {
        let g = self.grid.as_ref().ok_or_else(|| config_err("grid", "empty frequency grid"))?;
        if g.points == 0 {
            return Err(config_err("grid.points", "empty frequency grid"));
        }
        let start = positive("grid.start_hz", Some(g.start_hz))?;
        let stop = positive("grid.stop_hz", Some(g.stop_hz))?;
        if stop < start {
            return Err(config_err("grid.stop_hz", format!("must be ≥ start_hz ({start}), got {stop}")));
        }
        if g.log {
            Ok(linspace(start.ln(), stop.ln(), g.points).into_iter().map(f64::exp).collect())
        } else {
            Ok(linspace(start, stop, g.points))
        }
    }

    pub fn sweep_axes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let s = self.sweep.as_ref().ok_or_else(|| config_err("sweep", "required by this command"))?;
        if s.ratio_points == 0 {
            return Err(config_err("sweep.ratio_points", "must be at least 1"));
        }
        let a = positive("sweep.ratio_start", Some(s.ratio_start))?;
        let b = positive("sweep.ratio_stop", Some(s.ratio_stop))?;
        if b < a {
            return Err(config_err("sweep.ratio_stop", format!("must be ≥ ratio_start ({a}), got {b}")));
        }
        if s.noise_db_list.is_empty() {
            return Err(config_err("sweep.noise_db_list", "must not be empty"));
        }
        for &db in &s.noise_db_list {
            finite("sweep.noise_db_list", db)?;
        }
        Ok((linspace(a, b, s.ratio_points), s.noise_db_list.clone()))
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(cmd: &str) -> String {
    format!("# sqlent {VERSION} {cmd}\r\n")
}

fn csv_table(cmd: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let body = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(header(cmd) + &String::from_utf8(body).expect("csv output is ASCII"))
}

fn json_doc<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// SQL-normalized noise budget over the configured grid. `s_force` and
/// `s_sens` are the classical terms; laser noise enters `s_total_c` only.
pub fn cmd_budget(cfg: &RunConfig) -> Result<String> {
    let (c, d) = cfg.modes()?;
    let grid = cfg.grid_hz()?;
    let mut rows = Vec::with_capacity(grid.len());
    for f in grid {
        let w = TAU * f;
        let bc = budget(&c, w)?;
        let bd = budget(&d, w)?;
        rows.push(
            [f, bc.s_quant, bd.s_quant, bd.s_force, bd.s_sens, bc.s_total, bd.s_total]
                .map(fmt_f64)
                .to_vec(),
        );
    }
    csv_table(
        "budget",
        &["freq_hz", "s_quant_c", "s_quant_d", "s_force", "s_sens", "s_total_c", "s_total_d"],
        rows,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsRecord {
    pub v_xx: f64,
    pub v_pp: f64,
    pub v_xp: f64,
    /// (V_xx V_pp − V_xp²)/(ħ²/4).
    pub uncertainty_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub si: Option<MomentsSi>,
}

/// The same moments in m², (kg m/s)² and J s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentsSi {
    pub v_xx: f64,
    pub v_pp: f64,
    pub v_xp: f64,
}

impl MomentsRecord {
    fn new(m: &ConditionalMoments, units: Option<&UnitSystem>) -> Self {
        Self {
            v_xx: m.v_xx,
            v_pp: m.v_pp,
            v_xp: m.v_xp,
            uncertainty_ratio: 4.0 * uncertainty_product(m),
            si: units.map(|u| MomentsSi {
                v_xx: u.xx_to_si(m.v_xx),
                v_pp: u.pp_to_si(m.v_pp),
                v_xp: u.xp_to_si(m.v_xp),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRecord {
    pub method: Method,
    pub common: MomentsRecord,
    pub differential: MomentsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub sqlent: &'static str,
    pub command: &'static str,
    pub units: &'static str,
    pub results: Vec<MethodRecord>,
}

pub fn conditional_report(cfg: &RunConfig, methods: &[Method]) -> Result<ConditionalReport> {
    let (c, d) = cfg.modes()?;
    let units = cfg.mass_kg.map(|m| UnitSystem::new(m, 1.0)).transpose()?;
    let results = methods
        .iter()
        .map(|&method| {
            Ok(MethodRecord {
                method,
                common: MomentsRecord::new(&conditional_moments(&c, method)?, units.as_ref()),
                differential: MomentsRecord::new(&conditional_moments(&d, method)?, units.as_ref()),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConditionalReport {
        sqlent: VERSION,
        command: "conditional",
        units: "hbar = m = 1, angular frequency in rad/s",
        results,
    })
}

pub fn cmd_conditional(cfg: &RunConfig, methods: &[Method]) -> Result<String> {
    json_doc(&conditional_report(cfg, methods)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Blocks {
    pub v_ee: [[f64; 2]; 2],
    pub v_nn: [[f64; 2]; 2],
    pub v_en: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntangleReport {
    pub sqlent: &'static str,
    pub command: &'static str,
    pub method: Method,
    #[serde(rename = "E_N")]
    pub e_n: f64,
    pub sigma_minus: f64,
    #[serde(rename = "Sigma")]
    pub sigma: f64,
    pub det_v: f64,
    pub symplectic_eigenvalues: [f64; 2],
    pub blocks: Blocks,
}

fn block(m: nalgebra::Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn entangle_report(cfg: &RunConfig, method: Method) -> Result<EntangleReport> {
    let (c, d) = cfg.modes()?;
    let v = assemble(&conditional_moments(&c, method)?, &conditional_moments(&d, method)?)?;
    let ln = log_negativity(&v)?;
    Ok(EntangleReport {
        sqlent: VERSION,
        command: "entangle",
        method,
        e_n: ln.e_n,
        sigma_minus: ln.sigma_minus,
        sigma: ln.sigma,
        det_v: ln.det_v,
        symplectic_eigenvalues: physicality_check(&v).symplectic_eigenvalues,
        blocks: Blocks {
            v_ee: block(v.v_ee()),
            v_nn: block(v.v_nn()),
            v_en: block(v.v_en()),
        },
    })
}

pub fn cmd_entangle(cfg: &RunConfig, method: Method) -> Result<String> {
    json_doc(&entangle_report(cfg, method)?)
}

/// Maximized-E_N table. Optimal strengths are in units of Ω_F.
pub fn cmd_sweep(cfg: &RunConfig, method: Method) -> Result<String> {
    let (ratios, levels) = cfg.sweep_axes()?;
    let opt = OptimizeConfig {
        method,
        ..OptimizeConfig::default()
    };
    let points = sweep(&ratios, &levels, &opt)?;
    csv_table(
        "sweep",
        &["ratio_xF", "laser_db", "E_N_max", "omega_alpha_c_opt", "omega_alpha_d_opt"],
        points.iter().map(|p| {
            [p.ratio_xf, p.laser_db, p.e_n_max, p.omega_alpha_c_opt, p.omega_alpha_d_opt]
                .map(fmt_f64)
                .to_vec()
        }),
    )
}

/// One-σ ellipses normalized to the oscillator ground state at
/// (Ω_α^c + Ω_α^d)/2.
pub fn cmd_ellipse(cfg: &RunConfig, method: Method) -> Result<String> {
    let (c, d) = cfg.modes()?;
    let omega_norm = 0.5 * (c.omega_alpha + d.omega_alpha);
    let mut rows = Vec::new();
    for (name, mode) in [("common", &c), ("differential", &d)] {
        let m = conditional_moments(mode, method)?;
        let axes = ellipse_axes(&m, omega_norm)?;
        log::info!("{name}: semi-axes {} / {}, angle {}", axes.major, axes.minor, axes.angle);
        for (k, (x, p)) in ellipse_points(&m, omega_norm, ELLIPSE_POINTS)?.into_iter().enumerate() {
            rows.push(vec![name.to_string(), k.to_string(), fmt_f64(x), fmt_f64(p)]);
        }
    }
    csv_table("ellipse", &["mode", "index", "x", "p"], rows)
}

#[derive(Debug, Parser)]
#[command(name = "sqlent", version, about = "Conditional test-mass states and their entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Moment computation route. `conditional` reports all three when absent.
    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,
    /// Worker threads for `sweep`.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// SQL-normalized noise budget (CSV).
    Budget,
    /// Conditional second moments per mode and method (JSON).
    Conditional,
    /// Two-mode covariance and logarithmic negativity (JSON).
    Entangle,
    /// Maximized E_N against Ω_x/Ω_F and laser noise (CSV).
    Sweep,
    /// Normalized squeezing-ellipse boundaries (CSV).
    Ellipse,
}

/// Produce the command's output text.
pub fn execute(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| config_err("--config", "a config file is required"))?;
    let cfg = RunConfig::from_path(path)?;
    let method = cli.method.unwrap_or_default();
    match cli.command {
        Command::Budget => cmd_budget(&cfg),
        Command::Conditional => match cli.method {
            Some(m) => cmd_conditional(&cfg, &[m]),
            None => cmd_conditional(&cfg, &[Method::Closed, Method::Numeric, Method::Riccati]),
        },
        Command::Entangle => cmd_entangle(&cfg, method),
        Command::Sweep => match cli.jobs {
            Some(0) => Err(config_err("--jobs", "must be at least 1")),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| config_err("--jobs", e.to_string()))?
                .install(|| cmd_sweep(&cfg, method)),
            None => cmd_sweep(&cfg, method),
        },
        Command::Ellipse => cmd_ellipse(&cfg, method),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let text = execute(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
