use rayon::prelude::*;
use serde::Serialize;
use spinpump::apt::{designed_components, linear_ramp_split, q_ibc_linear, q_os, q_st};
use spinpump::charge::{charge_profile, q_of_k, sweep, velocity_map, SweepCurve, SweepOptions};
use spinpump::dynamics::uniform_tau_grid;
use spinpump::pulses::{compile_sequence, rwa_fidelity};
use spinpump::{peak_finder, ModelParams, ProtocolKind, RampProtocol};

use crate::config::RunConfig;
use crate::output::{opt, sci, write_file, write_json, Csv, Sci};
use crate::CliError;

/// Fidelity a verified sequence must reach.
pub const FIDELITY_THRESHOLD: f64 = 0.999;

/// Lab-frame step as a fraction of the carrier period over 2π.
const LAB_STEP_PER_CARRIER: f64 = 0.02;

#[derive(Serialize)]
struct ParamsOut {
    omega: Sci,
    delta1: Sci,
    delta2: Sci,
    delta_ratio: Sci,
}

fn params_out(p: &ModelParams<f64>) -> ParamsOut {
    ParamsOut {
        omega: sci(p.omega),
        delta1: sci(p.delta1),
        delta2: sci(p.delta2),
        delta_ratio: sci(p.ratio()),
    }
}

/// Sampling times for maps: any whole number of τ steps per cycle.
fn map_tau_grid(cfg: &RunConfig, period: f64) -> Result<Vec<f64>, CliError> {
    let ns = cfg.tau_step_ns.unwrap_or(10.0);
    if !(ns > 0.0 && ns.is_finite()) {
        return Err(CliError::Usage(format!(
            "tau-step-ns must be positive, got {ns}"
        )));
    }
    let ratio = period / (ns * 1e-3);
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-6 * n {
        return Err(CliError::Usage(format!(
            "tau step of {ns} ns gives an empty or fractional tau grid for T = {period} us"
        )));
    }
    Ok(uniform_tau_grid(n as usize))
}

pub fn velmap(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let (protocol, period) = cfg.single_curve()?;
    let tau = map_tau_grid(cfg, period)?;
    let ks = match cfg.ks()? {
        Some(ks) => ks,
        None => cfg.k_grid()?.points(),
    };
    let map = velocity_map(&params, &protocol, period, &ks, &tau, &cfg.propagation()?)?;
    let mut csv = Csv::new(&["k", "tau", "v_normalized"]);
    for (k, row) in map.k.iter().zip(&map.values) {
        for (t, v) in map.tau.iter().zip(row) {
            csv.row(None, &[*k, *t, *v]);
        }
    }
    write_file(&cfg.out_dir(), "velmap.csv", &csv.into_string())
}

#[derive(Serialize)]
struct QkReport {
    params: ParamsOut,
    protocol: &'static str,
    #[serde(rename = "T")]
    period: Sci,
    n_k: usize,
    #[serde(rename = "Q")]
    total: Option<Sci>,
}

pub fn qk(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let (protocol, period) = cfg.single_curve()?;
    let sampling = cfg.sampling()?;
    let (ks, qs, total) = match cfg.ks()? {
        Some(ks) => {
            let qs = ks
                .par_iter()
                .map(|&k| q_of_k(&params, &protocol, k, period, &sampling))
                .collect::<Result<Vec<_>, _>>()?;
            (ks, qs, None)
        }
        None => {
            let prof = charge_profile(&params, &protocol, period, &cfg.k_grid()?, &sampling)?;
            (prof.k, prof.q, Some(prof.total))
        }
    };
    let mut csv = Csv::new(&["k", "q"]);
    for (k, q) in ks.iter().zip(&qs) {
        csv.row(None, &[*k, *q]);
    }
    let dir = cfg.out_dir();
    write_file(&dir, "qk.csv", &csv.into_string())?;
    write_json(
        &dir,
        "qk.json",
        &QkReport {
            params: params_out(&params),
            protocol: protocol.kind().name(),
            period: sci(period),
            n_k: ks.len(),
            total: opt(total),
        },
    )
}

#[derive(Serialize)]
struct PeakOut {
    delta_ratio: Sci,
    #[serde(rename = "Q")]
    value: Sci,
    index: usize,
    at_boundary: bool,
}

#[derive(Serialize)]
struct CurveOut {
    protocol: &'static str,
    #[serde(rename = "T")]
    period: Sci,
    peak: Option<PeakOut>,
}

#[derive(Serialize)]
struct RowOut {
    protocol: &'static str,
    #[serde(rename = "T")]
    period: Sci,
    delta_ratio: Sci,
    #[serde(rename = "Q")]
    q: Sci,
    q_ibc_linear: Option<Sci>,
    q_st: Option<Sci>,
    q_os: Option<Sci>,
}

#[derive(Serialize)]
struct SweepReport {
    omega: Sci,
    delta1: Sci,
    curves: Vec<CurveOut>,
    rows: Vec<RowOut>,
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let base = cfg.params()?;
    let curves = SweepCurve::product(&cfg.protocols()?, &cfg.periods()?);
    let ratios = cfg.ratios()?;
    let options = SweepOptions {
        k_grid: cfg.k_grid()?,
        sampling: cfg.sampling()?,
        keep_profiles: false,
    };
    let result = sweep(&base, &curves, &ratios, &options)?;

    let mut csv = Csv::new(&["protocol", "T", "delta_ratio", "Q"]);
    for r in &result.rows {
        csv.row(Some(r.protocol.name()), &[r.period, r.ratio, r.q]);
    }

    // linear-ramp reference values; a gapless or unresolved point is null
    let rows = result
        .rows
        .par_iter()
        .map(|r| {
            let reference = (r.protocol == ProtocolKind::Linear)
                .then(|| base.with_ratio(r.ratio).ok())
                .flatten();
            let (ibc, st, os) = match reference {
                Some(p) => (
                    q_ibc_linear(&p).ok(),
                    q_st(&p, r.period).ok(),
                    q_os(&p, r.period).ok(),
                ),
                None => (None, None, None),
            };
            RowOut {
                protocol: r.protocol.name(),
                period: sci(r.period),
                delta_ratio: sci(r.ratio),
                q: sci(r.q),
                q_ibc_linear: opt(ibc),
                q_st: opt(st),
                q_os: opt(os),
            }
        })
        .collect();
    let curves = result
        .curves()
        .into_iter()
        .map(|(p, t)| {
            let points = result.curve(p, t);
            let peak = (points.len() >= 3)
                .then(|| peak_finder(&points))
                .transpose()?
                .map(|pk| PeakOut {
                    delta_ratio: sci(pk.x),
                    value: sci(pk.value),
                    index: pk.index,
                    at_boundary: pk.at_boundary,
                });
            Ok(CurveOut {
                protocol: p.name(),
                period: sci(t),
                peak,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let dir = cfg.out_dir();
    write_file(&dir, "sweep.csv", &csv.into_string())?;
    write_json(
        &dir,
        "sweep.json",
        &SweepReport {
            omega: sci(base.omega),
            delta1: sci(base.delta1),
            curves,
            rows,
        },
    )
}

#[derive(Serialize)]
struct AptReport {
    params: ParamsOut,
    protocol: &'static str,
    #[serde(rename = "T")]
    period: Sci,
    n_cycles: u32,
    divergent: bool,
    q_tp: Option<Sci>,
    q_ibc: Option<Sci>,
    q_ng: Option<Sci>,
    q_st: Option<Sci>,
    q_os: Option<Sci>,
    q_per_cycle: Option<Sci>,
    q_n_cycles: Option<Sci>,
}

fn apt_report(
    params: &ModelParams<f64>,
    protocol: &RampProtocol<f64>,
    period: f64,
    n: u32,
) -> Result<AptReport, CliError> {
    let mut report = AptReport {
        params: params_out(params),
        protocol: protocol.kind().name(),
        period: sci(period),
        n_cycles: n,
        divergent: !params.is_gapped(),
        q_tp: None,
        q_ibc: None,
        q_ng: None,
        q_st: None,
        q_os: None,
        q_per_cycle: None,
        q_n_cycles: None,
    };
    if report.divergent {
        return Ok(report);
    }
    let c = designed_components(params, protocol, n)?;
    report.q_tp = Some(sci(c.q_tp));
    report.q_ibc = Some(sci(c.q_ibc));
    report.q_ng = Some(sci(c.q_ng));
    report.q_per_cycle = Some(sci(c.q_tp + c.q_ibc));
    report.q_n_cycles = Some(sci(c.total()));
    if protocol.is_linear() {
        let split = linear_ramp_split(params, period)?;
        report.q_st = Some(sci(split.q_st));
        report.q_os = Some(sci(split.q_os));
    }
    Ok(report)
}

pub fn apt(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let (protocol, period) = cfg.single_curve()?;
    let n = cfg.n_cycles.unwrap_or(1);
    if n == 0 {
        return Err(CliError::Usage("n-cycles must be at least 1".into()));
    }
    let report = apt_report(&params, &protocol, period, n)?;
    write_json(&cfg.out_dir(), "apt.json", &report)
}

#[derive(Serialize)]
struct Durations {
    prepare: Sci,
    evolve: Sci,
    readout: Sci,
}

#[derive(Serialize)]
struct PulseReport {
    params: ParamsOut,
    protocol: &'static str,
    #[serde(rename = "T")]
    period: Sci,
    k: Sci,
    tau_e: Sci,
    omega0: Sci,
    omega1: Sci,
    alpha: Sci,
    beta: Sci,
    durations: Durations,
    verified: bool,
    lab_step: Option<Sci>,
    fidelity: Option<Sci>,
    threshold: Sci,
    pass: Option<bool>,
}

pub fn pulses(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.params()?;
    let (protocol, period) = cfg.single_curve()?;
    let k = match cfg.ks()?.as_deref() {
        Some([k]) => *k,
        Some(_) => return Err(CliError::Usage("pulses takes a single k".into())),
        None => return Err(CliError::Usage("pulses needs --k".into())),
    };
    let tau_e = cfg.tau_e.unwrap_or(0.5);
    let (w0, w1) = (cfg.omega0(), cfg.omega1());
    let seq = compile_sequence(&params, k, tau_e, &protocol, period, w0, w1)?;
    let (fidelity, lab_step) = if cfg.verify {
        let dt = LAB_STEP_PER_CARRIER / w0;
        (Some(rwa_fidelity(&seq, dt)?), Some(dt))
    } else {
        (None, None)
    };
    let dir = cfg.out_dir();
    write_file(&dir, "pulses.txt", &seq.to_text())?;
    write_json(
        &dir,
        "pulses.json",
        &PulseReport {
            params: params_out(&params),
            protocol: protocol.kind().name(),
            period: sci(period),
            k: sci(k),
            tau_e: sci(tau_e),
            omega0: sci(w0),
            omega1: sci(w1),
            alpha: sci(seq.alpha),
            beta: sci(seq.beta),
            durations: Durations {
                prepare: sci(seq.prepare().duration),
                evolve: sci(seq.evolve().duration),
                readout: sci(seq.readout().duration),
            },
            verified: cfg.verify,
            lab_step: opt(lab_step),
            fidelity: opt(fidelity),
            threshold: sci(FIDELITY_THRESHOLD),
            pass: fidelity.map(|f| f >= FIDELITY_THRESHOLD),
        },
    )
}
