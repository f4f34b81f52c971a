use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use spinpump::dynamics::{PropagationConfig, PropagationMethod};
use spinpump::pulses::{DEFAULT_CARRIER, DEFAULT_RABI};
use spinpump::{KGrid, ModelParams, ProtocolKind, RampProtocol, TauSampling};

use crate::CliError;

/// Run parameters. Every field can come from the JSON config file or from a
/// flag of the same name; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Off-diagonal drive ω in rad/μs [default: 2π×20]
    #[arg(global = true, long)]
    pub omega: Option<f64>,
    /// δ₁ in rad/μs [default: 2π×10]
    #[arg(global = true, long)]
    pub delta1: Option<f64>,
    /// δ₂ in rad/μs [default: 0]; ignored by `sweep`
    #[arg(global = true, long, allow_hyphen_values = true)]
    pub delta2: Option<f64>,
    /// δ₂/δ₁ values for `sweep`: `start:step:stop` or a comma list [default: 0:0.01:2]
    #[arg(global = true, long)]
    pub ratio_grid: Option<String>,
    /// Cycle durations in μs, comma separated [default: 1]
    #[arg(global = true, long = "T")]
    #[serde(rename = "T")]
    pub t: Option<String>,
    /// Ramp protocols, comma separated: linear, quadratic [default: linear]
    #[arg(global = true, long)]
    pub protocol: Option<String>,
    /// k grid: experiment, uniform:N, full:N or two-segment:COARSE:FINE [default: experiment]
    #[arg(global = true, long)]
    pub k_grid: Option<String>,
    /// τ sampling step in ns [default: 10]
    #[arg(global = true, long)]
    pub tau_step_ns: Option<f64>,
    /// Propagator steps per cycle [default: 10000]
    #[arg(global = true, long)]
    pub steps_per_cycle: Option<usize>,
    /// Propagator: midpoint or analytic (linear ramp only) [default: midpoint]
    #[arg(global = true, long)]
    pub method: Option<String>,
    /// Quasimomenta for `qk` and `pulses`, comma separated
    #[arg(global = true, long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Scaled measurement time for `pulses` [default: 0.5]
    #[arg(global = true, long)]
    pub tau_e: Option<f64>,
    /// Carrier ω₀ in rad/μs for `pulses` [default: 2π×200]
    #[arg(global = true, long)]
    pub omega0: Option<f64>,
    /// Rabi frequency ω₁ in rad/μs for `pulses` [default: 2π×2]
    #[arg(global = true, long)]
    pub omega1: Option<f64>,
    /// Cycle count for `apt` [default: 1]
    #[arg(global = true, long)]
    pub n_cycles: Option<u32>,
    /// Output directory [default: out]
    #[arg(global = true, long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available cores]
    #[arg(global = true, long)]
    pub threads: Option<usize>,
    /// Run the lab-frame fidelity check in `pulses`
    #[arg(global = true, long)]
    #[serde(default)]
    pub verify: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Usage(format!(
                "config {} does not match the schema: {e}",
                path.display()
            ))
        })
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(self, flags: RunConfig) -> Self {
        Self {
            omega: flags.omega.or(self.omega),
            delta1: flags.delta1.or(self.delta1),
            delta2: flags.delta2.or(self.delta2),
            ratio_grid: flags.ratio_grid.or(self.ratio_grid),
            t: flags.t.or(self.t),
            protocol: flags.protocol.or(self.protocol),
            k_grid: flags.k_grid.or(self.k_grid),
            tau_step_ns: flags.tau_step_ns.or(self.tau_step_ns),
            steps_per_cycle: flags.steps_per_cycle.or(self.steps_per_cycle),
            method: flags.method.or(self.method),
            k: flags.k.or(self.k),
            tau_e: flags.tau_e.or(self.tau_e),
            omega0: flags.omega0.or(self.omega0),
            omega1: flags.omega1.or(self.omega1),
            n_cycles: flags.n_cycles.or(self.n_cycles),
            out: flags.out.or(self.out),
            threads: flags.threads.or(self.threads),
            verify: flags.verify || self.verify,
        }
    }

    pub fn params(&self) -> Result<ModelParams<f64>, CliError> {
        Ok(ModelParams::new(
            self.omega.unwrap_or(2.0 * PI * 20.0),
            self.delta1.unwrap_or(2.0 * PI * 10.0),
            self.delta2.unwrap_or(0.0),
        )?)
    }

    pub fn ratios(&self) -> Result<Vec<f64>, CliError> {
        parse_ratio_grid(self.ratio_grid.as_deref().unwrap_or("0:0.01:2"))
    }

    pub fn periods(&self) -> Result<Vec<f64>, CliError> {
        let ts = parse_list(self.t.as_deref().unwrap_or("1"), "T")?;
        if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::Usage(format!("T must be positive, got {t}")));
        }
        Ok(ts)
    }

    pub fn protocols(&self) -> Result<Vec<RampProtocol<f64>>, CliError> {
        let text = self.protocol.as_deref().unwrap_or("linear");
        let mut out = Vec::new();
        for name in text.split(',').map(str::trim) {
            let kind = match name {
                "linear" => ProtocolKind::Linear,
                "quadratic" => ProtocolKind::Quadratic,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown protocol '{other}' (expected linear or quadratic)"
                    )))
                }
            };
            out.push(RampProtocol::from_kind(kind)?);
        }
        Ok(out)
    }

    /// The single protocol and period of a point command.
    pub fn single_curve(&self) -> Result<(RampProtocol<f64>, f64), CliError> {
        let (ps, ts) = (self.protocols()?, self.periods()?);
        if ps.len() != 1 || ts.len() != 1 {
            return Err(CliError::Usage(
                "this command takes exactly one protocol and one T".into(),
            ));
        }
        Ok((ps[0].clone(), ts[0]))
    }

    pub fn k_grid(&self) -> Result<KGrid<f64>, CliError> {
        parse_k_grid(self.k_grid.as_deref().unwrap_or("experiment"))
    }

    pub fn ks(&self) -> Result<Option<Vec<f64>>, CliError> {
        self.k.as_deref().map(|s| parse_list(s, "k")).transpose()
    }

    pub fn propagation(&self) -> Result<PropagationConfig, CliError> {
        let method = match self.method.as_deref().unwrap_or("midpoint") {
            "midpoint" => PropagationMethod::MidpointExponential,
            "analytic" => PropagationMethod::AnalyticLinear,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown method '{other}' (expected midpoint or analytic)"
                )))
            }
        };
        let mut cfg = PropagationConfig {
            method,
            ..PropagationConfig::default()
        };
        if let Some(n) = self.steps_per_cycle {
            cfg.steps_per_cycle = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sampling(&self) -> Result<TauSampling<f64>, CliError> {
        let ns = self.tau_step_ns.unwrap_or(10.0);
        if !(ns > 0.0 && ns.is_finite()) {
            return Err(CliError::Usage(format!(
                "tau-step-ns must be positive, got {ns}"
            )));
        }
        Ok(TauSampling::step(ns * 1e-3, self.propagation()?))
    }

    pub fn omega0(&self) -> f64 {
        self.omega0.unwrap_or(DEFAULT_CARRIER)
    }

    pub fn omega1(&self) -> f64 {
        self.omega1.unwrap_or(DEFAULT_RABI)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn parse_number(s: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse {what} value '{s}'")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{what} value '{s}' is not finite")));
    }
    Ok(v)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let v = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| parse_number(x, what))
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("{what} list is empty")));
    }
    Ok(v)
}

/// `start:step:stop` (inclusive, values `start + i·step`) or a comma list.
pub fn parse_ratio_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, h, b] => {
            let (a, h, b) = (
                parse_number(a, "ratio-grid")?,
                parse_number(h, "ratio-grid")?,
                parse_number(b, "ratio-grid")?,
            );
            if !(h > 0.0) || b < a {
                return Err(CliError::Usage(format!(
                    "ratio-grid needs start <= stop and a positive step, got {s}"
                )));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + h * i as f64).collect())
        }
        [_] => {
            let mut v = parse_list(s, "ratio-grid")?;
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
        _ => Err(CliError::Usage(format!("malformed ratio-grid '{s}'"))),
    }
}

pub fn parse_k_grid(s: &str) -> Result<KGrid<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let count = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("cannot parse k-grid size '{x}'")))
    };
    Ok(match parts.as_slice() {
        ["experiment"] => KGrid::experiment(),
        ["uniform", n] => KGrid::uniform(count(n)?)?,
        ["full", n] => KGrid::full_zone(count(n)?)?,
        ["two-segment", c, f] => {
            let (c, f) = (count(c)?, count(f)?);
            if c == 0 || f == 0 || c % 2 == 1 || f % 2 == 1 {
                return Err(CliError::Usage(
                    "two-segment k-grid needs even positive sizes".into(),
                ));
            }
            KGrid::two_segment(c, f)
        }
        _ => return Err(CliError::Usage(format!("malformed k-grid '{s}'"))),
    })
}
