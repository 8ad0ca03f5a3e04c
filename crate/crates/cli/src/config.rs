//! Run configuration: defaults, config-file parsing, flag overrides, and
//! validation. Precedence is defaults < config file < flags.
//!
//! Config files are flat `key = value` lines, `#` starts a comment, UTF-8.
//! Recognized keys mirror the flags (gamma, lambda, delta, tau, rx, ry, rz,
//! c0, sz0, grid, horizon, out, jobs, regime) plus scan-range overrides
//! (delta_min, delta_max, lambda_min, lambda_max, tau_max, c0_min, c0_max).

use std::path::{Path, PathBuf};

use qsljc_core::dynamics::BlochState;
use qsljc_core::model::ModelParams;
use qsljc_core::nonmarkov::Horizon;
use qsljc_core::qsl::CoherenceParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Regime {
    Markovian,
    Nonmarkovian,
}

impl Regime {
    /// Spectral width in units of γ conventionally attached to the regime.
    pub fn lambda_over_gamma(&self) -> f64 {
        match self {
            Regime::Markovian => 3.0,
            Regime::Nonmarkovian => 0.1,
        }
    }
}

/// Initial state, either as Bloch components or as (coherence, ⟨σ_z⟩₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Bloch(BlochState),
    Coherence(CoherenceParams),
}

impl StateSpec {
    /// Bloch representation (coherence states use phase r_y = 0; all
    /// emitted quantities are phase independent).
    pub fn bloch(&self) -> BlochState {
        match self {
            StateSpec::Bloch(b) => *b,
            StateSpec::Coherence(cp) => {
                BlochState::new(cp.c0(), 0.0, cp.sz0()).expect("validated at construction")
            }
        }
    }
}

/// Optional scan-range overrides, all in units of γ.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScanRanges {
    pub delta: Option<(f64, f64)>,
    pub lambda: Option<(f64, f64)>,
    pub tau_max: Option<f64>,
    pub c0: Option<(f64, f64)>,
}

/// Layered raw values before validation. `None` means "not specified".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub rx: Option<f64>,
    pub ry: Option<f64>,
    pub rz: Option<f64>,
    pub c0: Option<f64>,
    pub sz0: Option<f64>,
    pub grid: Option<usize>,
    pub horizon: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub regime: Option<Regime>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub tau_max: Option<f64>,
    pub c0_min: Option<f64>,
    pub c0_max: Option<f64>,
}

impl RawConfig {
    /// Overlay `other` (higher precedence) onto `self`.
    pub fn overlay(&mut self, other: RawConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            gamma, lambda, delta, tau, rx, ry, rz, c0, sz0, grid, horizon, out, jobs, regime,
            delta_min, delta_max, lambda_min, lambda_max, tau_max, c0_min, c0_max
        );
    }
}

/// Parse a flat `key = value` config file.
pub fn parse_config_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut raw = RawConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let stripped = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{lineno}: expected `key = value`, got `{stripped}`",
                path.display()
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        set_key(&mut raw, key, value)
            .map_err(|msg| CliError::Config(format!("{}:{lineno}: {msg}", path.display())))?;
    }
    Ok(raw)
}

fn set_key(raw: &mut RawConfig, key: &str, value: &str) -> Result<(), String> {
    fn num(key: &str, value: &str) -> Result<f64, String> {
        value
            .parse::<f64>()
            .map_err(|_| format!("malformed number for `{key}`: `{value}`"))
    }
    fn int(key: &str, value: &str) -> Result<usize, String> {
        value
            .parse::<usize>()
            .map_err(|_| format!("malformed integer for `{key}`: `{value}`"))
    }
    match key {
        "gamma" => raw.gamma = Some(num(key, value)?),
        "lambda" => raw.lambda = Some(num(key, value)?),
        "delta" => raw.delta = Some(num(key, value)?),
        "tau" => raw.tau = Some(num(key, value)?),
        "rx" => raw.rx = Some(num(key, value)?),
        "ry" => raw.ry = Some(num(key, value)?),
        "rz" => raw.rz = Some(num(key, value)?),
        "c0" => raw.c0 = Some(num(key, value)?),
        "sz0" => raw.sz0 = Some(num(key, value)?),
        "grid" => raw.grid = Some(int(key, value)?),
        "horizon" => raw.horizon = Some(value.to_string()),
        "out" => raw.out = Some(PathBuf::from(value)),
        "jobs" => raw.jobs = Some(int(key, value)?),
        "regime" => {
            raw.regime = Some(match value {
                "markovian" => Regime::Markovian,
                "nonmarkovian" => Regime::Nonmarkovian,
                other => return Err(format!("unknown regime `{other}`")),
            })
        }
        "delta_min" => raw.delta_min = Some(num(key, value)?),
        "delta_max" => raw.delta_max = Some(num(key, value)?),
        "lambda_min" => raw.lambda_min = Some(num(key, value)?),
        "lambda_max" => raw.lambda_max = Some(num(key, value)?),
        "tau_max" => raw.tau_max = Some(num(key, value)?),
        "c0_min" => raw.c0_min = Some(num(key, value)?),
        "c0_max" => raw.c0_max = Some(num(key, value)?),
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub state: StateSpec,
    pub tau: f64,
    pub grid: Option<usize>,
    /// Horizon override; commands pick their own default when `None`.
    pub horizon: Option<Horizon>,
    pub out_dir: PathBuf,
    pub oracle: bool,
    pub jobs: Option<usize>,
    pub regime: Option<Regime>,
    pub ranges: ScanRanges,
    /// Whether λ was given explicitly (fig4/fig5 have different defaults).
    pub lambda_explicit: bool,
}

impl RunConfig {
    /// Defaults: γ=1, λ=3, δ=0, r=(0.5, 0.5, 0.5), τ=10.
    pub fn from_raw(raw: &RawConfig, oracle: bool) -> Result<RunConfig, CliError> {
        let gamma = raw.gamma.unwrap_or(1.0);
        let lambda = raw.lambda.unwrap_or(3.0);
        let delta = raw.delta.unwrap_or(0.0);
        // flags are in units of γ
        let params = ModelParams::new(gamma, lambda * gamma, delta * gamma)
            .map_err(|e| CliError::Config(e.to_string()))?;

        let bloch_given = raw.rx.is_some() || raw.ry.is_some() || raw.rz.is_some();
        let coh_given = raw.c0.is_some() || raw.sz0.is_some();
        let state = if bloch_given && coh_given {
            return Err(CliError::Config(
                "state given both as Bloch components (rx/ry/rz) and coherence \
                 parameters (c0/sz0); use one form"
                    .into(),
            ));
        } else if coh_given {
            StateSpec::Coherence(
                CoherenceParams::new(raw.c0.unwrap_or(0.0), raw.sz0.unwrap_or(0.0))
                    .map_err(|e| CliError::Config(e.to_string()))?,
            )
        } else {
            StateSpec::Bloch(
                BlochState::new(
                    raw.rx.unwrap_or(0.5),
                    raw.ry.unwrap_or(0.5),
                    raw.rz.unwrap_or(0.5),
                )
                .map_err(|e| CliError::Config(e.to_string()))?,
            )
        };

        let tau = raw.tau.unwrap_or(10.0) / gamma;
        if tau.is_nan() || tau <= 0.0 {
            return Err(CliError::Config(format!(
                "tau must be positive, got {tau}"
            )));
        }

        let horizon = match raw.horizon.as_deref() {
            None => None,
            Some("auto") => Some(Horizon::Auto),
            Some(text) => {
                let h: f64 = text.parse().map_err(|_| {
                    CliError::Config(format!("horizon must be a number or `auto`, got `{text}`"))
                })?;
                if h.is_nan() || h <= 0.0 {
                    return Err(CliError::Config(format!(
                        "horizon must be positive, got {h}"
                    )));
                }
                Some(Horizon::Fixed(h / gamma))
            }
        };

        if let Some(0) = raw.grid {
            return Err(CliError::Config("grid must be at least 1".into()));
        }
        if let Some(0) = raw.jobs {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }

        let range = |min: Option<f64>, max: Option<f64>, default: (f64, f64), name: &str| {
            let lo = min.unwrap_or(default.0);
            let hi = max.unwrap_or(default.1);
            if hi <= lo {
                return Err(CliError::Config(format!(
                    "{name} range is empty: [{lo}, {hi}]"
                )));
            }
            Ok(Some((lo, hi)))
        };
        let ranges = ScanRanges {
            delta: if raw.delta_min.is_some() || raw.delta_max.is_some() {
                range(raw.delta_min, raw.delta_max, (0.0, 10.0), "delta")?
            } else {
                None
            },
            lambda: if raw.lambda_min.is_some() || raw.lambda_max.is_some() {
                let r = range(raw.lambda_min, raw.lambda_max, (0.05, 2.0), "lambda")?;
                if r.unwrap().0 <= 0.0 {
                    return Err(CliError::Config("lambda range must be positive".into()));
                }
                r
            } else {
                None
            },
            tau_max: match raw.tau_max {
                Some(t) if t > 0.0 => Some(t),
                Some(t) => {
                    return Err(CliError::Config(format!(
                        "tau_max must be positive, got {t}"
                    )))
                }
                None => None,
            },
            c0: if raw.c0_min.is_some() || raw.c0_max.is_some() {
                let r = range(raw.c0_min, raw.c0_max, (0.0, 1.0), "c0")?;
                let (lo, hi) = r.unwrap();
                if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
                    return Err(CliError::Config("c0 range must lie in [0, 1]".into()));
                }
                r
            } else {
                None
            },
        };

        Ok(RunConfig {
            params,
            state,
            tau,
            grid: raw.grid,
            horizon,
            out_dir: raw.out.clone().unwrap_or_else(|| PathBuf::from(".")),
            oracle,
            jobs: raw.jobs,
            regime: raw.regime,
            ranges,
            lambda_explicit: raw.lambda.is_some(),
        })
    }
}
