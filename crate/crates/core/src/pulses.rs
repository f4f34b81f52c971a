//! Three-segment microwave sequence (prepare, evolve, read out) that realises
//! the model on a driven two-level system, a full-wave lab-frame simulator to
//! check it, and the Rabi-frequency calibration fit.
//!
//! Drive convention: a segment of carrier `ω_c`, phase `φ₀` and amplitude `A`
//! applies `f(t) σx` with `f(t) = A cos(ω_c t' + φ₀ + m(t'))`, where `t'` is
//! the time since the segment started and `m` is the phase modulation (the
//! ramp `φ(t'/T)` during Evolve, zero otherwise). The qubit splitting is
//! `ω₀ σz / 2`.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{propagate, PropagationConfig};
use crate::error::{Error, Result};
use crate::model::{velocity_field, velocity_norm, ModelParams, QubitState, RampProtocol};
use crate::scalar::Real;
use crate::spin::{cross3, exp_neg_i_pauli, norm3, z_rotation, SpinOperator, Spinor, Vec3};

/// Default qubit splitting for verification runs, 2π × 200 rad/μs.
pub const DEFAULT_CARRIER: f64 = 2.0 * std::f64::consts::PI * 200.0;
/// Default Rabi frequency of the prepare and readout pulses, 2π × 2 rad/μs.
pub const DEFAULT_RABI: f64 = 2.0 * std::f64::consts::PI * 2.0;
/// Minimum ratio of the carrier to every other frequency in the sequence.
pub const MIN_CARRIER_RATIO: f64 = 10.0;
/// Largest admissible `ω₀ · dt` for the lab-frame integrator.
pub const MAX_CARRIER_PHASE_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Prepare,
    Evolve,
    Readout,
}

impl Purpose {
    pub fn name(self) -> &'static str {
        match self {
            Purpose::Prepare => "Prepare",
            Purpose::Evolve => "Evolve",
            Purpose::Readout => "Readout",
        }
    }
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Purpose {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Prepare" => Ok(Purpose::Prepare),
            "Evolve" => Ok(Purpose::Evolve),
            "Readout" => Ok(Purpose::Readout),
            other => Err(Error::Precondition(format!(
                "unknown segment purpose {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment<T> {
    pub purpose: Purpose,
    /// rad/μs
    pub carrier_freq: T,
    /// rad
    pub initial_phase: T,
    /// Rabi frequency in rad/μs; for Evolve the envelope `|ω sin k|`.
    pub amplitude: T,
    /// μs
    pub duration: T,
}

/// Compiled sequence with the model context it was built from.
#[derive(Clone)]
pub struct PulseSequence<T> {
    pub segments: [PulseSegment<T>; 3],
    pub params: ModelParams<T>,
    pub k: T,
    pub tau_e: T,
    pub protocol: RampProtocol<T>,
    pub period: T,
    pub omega0: T,
    pub omega1: T,
    /// Inclination of the initial state, `t_ini = α/ω₁`.
    pub alpha: T,
    /// Inclination of the velocity axis, `t_fin = β/ω₁`.
    pub beta: T,
    pub phi_ini: T,
    /// `ω₀ t_ini`
    pub phi_i: T,
    /// `(ω₀ - δ₁ cos k - δ₂) t_e + φ(τ_e)`
    pub phi_ii: T,
    pub phi_fin: T,
}

impl<T: Real> PulseSequence<T> {
    pub fn prepare(&self) -> &PulseSegment<T> {
        &self.segments[0]
    }

    pub fn evolve(&self) -> &PulseSegment<T> {
        &self.segments[1]
    }

    pub fn readout(&self) -> &PulseSegment<T> {
        &self.segments[2]
    }

    pub fn total_duration(&self) -> T {
        self.segments
            .iter()
            .fold(T::zero(), |acc, s| acc + s.duration)
    }

    /// One line per segment, `purpose carrier_freq initial_phase amplitude
    /// duration`, numbers with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            out.push_str(&format!(
                "{} {:.16e} {:.16e} {:.16e} {:.16e}\n",
                s.purpose, s.carrier_freq, s.initial_phase, s.amplitude, s.duration
            ));
        }
        out
    }

    /// Phase modulation of segment `index` at local time `t`.
    fn modulation(&self, index: usize, t: T) -> T {
        if index == 1 {
            self.protocol.phi(t / self.period)
        } else {
            T::zero()
        }
    }

    /// Drive `f(t)` of segment `index` at local time `t`.
    pub fn drive(&self, index: usize, t: T) -> T {
        let s = &self.segments[index];
        s.amplitude * (s.carrier_freq * t + s.initial_phase + self.modulation(index, t)).cos()
    }

    /// Segment start times.
    fn starts(&self) -> [T; 3] {
        let d = self.segments.map(|s| s.duration);
        [T::zero(), d[0], d[0] + d[1]]
    }
}

/// Parses the text format written by [`PulseSequence::to_text`].
pub fn parse_segments<T: Real>(text: &str) -> Result<Vec<PulseSegment<T>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::Precondition(format!(
                    "segment line needs 5 fields: {line:?}"
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::Precondition(format!("bad number {s:?}")))
            };
            Ok(PulseSegment {
                purpose: fields[0].parse()?,
                carrier_freq: num(fields[1])?,
                initial_phase: num(fields[2])?,
                amplitude: num(fields[3])?,
                duration: num(fields[4])?,
            })
        })
        .collect()
}

/// Inclination `α` of the initial state, zero at band touching.
fn prepare_angle<T: Real>(params: &ModelParams<T>, k: T) -> T {
    if params.is_band_touching(k) {
        return T::zero();
    }
    let gap = params.gap(k);
    (params.nu(k) / gap).max(-T::one()).min(T::one()).acos()
}

/// Inclination `β` of the velocity axis.
fn readout_angle<T: Real>(params: &ModelParams<T>, k: T) -> T {
    let norm = T::lit(2.0) * velocity_norm(params, k);
    (-params.delta1 * k.sin() / norm)
        .max(-T::one())
        .min(T::one())
        .acos()
}

/// Builds the prepare / evolve / readout sequence that measures `v/‖v‖` at
/// scaled time `tau_e`.
#[allow(clippy::too_many_arguments)]
pub fn compile_sequence<T: Real>(
    params: &ModelParams<T>,
    k: T,
    tau_e: T,
    protocol: &RampProtocol<T>,
    period: T,
    omega0: T,
    omega1: T,
) -> Result<PulseSequence<T>> {
    let ratio = T::lit(MIN_CARRIER_RATIO);
    let others = [
        ("omega", params.omega),
        ("delta1", params.delta1),
        ("delta2", params.delta2),
        ("omega1", omega1),
    ];
    for (name, value) in others {
        if !(omega0 >= ratio * value.abs()) {
            return Err(Error::Precondition(format!(
                "carrier omega0 = {omega0} must be at least {MIN_CARRIER_RATIO} x |{name}| = {}",
                value.abs()
            )));
        }
    }
    compile_sequence_unchecked(params, k, tau_e, protocol, period, omega0, omega1)
}

/// [`compile_sequence`] without the carrier-separation check, for probing
/// the regime where the rotating-wave approximation fails.
#[allow(clippy::too_many_arguments)]
pub fn compile_sequence_unchecked<T: Real>(
    params: &ModelParams<T>,
    k: T,
    tau_e: T,
    protocol: &RampProtocol<T>,
    period: T,
    omega0: T,
    omega1: T,
) -> Result<PulseSequence<T>> {
    if !(tau_e >= T::zero() && tau_e <= T::one()) {
        return Err(Error::Precondition(format!(
            "tau_e must lie in [0, 1], got {tau_e}"
        )));
    }
    if !(period > T::zero()) {
        return Err(Error::Precondition(format!(
            "cycle duration T must be positive, got {period}"
        )));
    }
    if !(omega1 > T::zero()) {
        return Err(Error::Precondition(format!(
            "Rabi frequency omega1 must be positive, got {omega1}"
        )));
    }
    let half_pi = T::FRAC_PI_2();
    let (sk, ck) = k.sin_cos();
    let delta = params.delta_eff(k);

    let alpha = prepare_angle(params, k);
    let phi_ini = if delta >= T::zero() {
        -half_pi
    } else {
        half_pi
    };
    let t_ini = alpha / omega1;
    let phi_i = omega0 * t_ini;

    let t_e = period * tau_e;
    let evolve_carrier = omega0 - delta;
    let envelope = params.omega * sk;
    // a negative envelope is a π phase flip of the drive
    let evolve_phase = if envelope < T::zero() {
        phi_i + T::PI()
    } else {
        phi_i
    };
    let phi_ii = evolve_carrier * t_e + protocol.phi(tau_e);

    let beta = readout_angle(params, k);
    let phi_fin = if ck >= T::zero() { -half_pi } else { half_pi };

    let segments = [
        PulseSegment {
            purpose: Purpose::Prepare,
            carrier_freq: omega0,
            initial_phase: phi_ini,
            amplitude: omega1,
            duration: t_ini,
        },
        PulseSegment {
            purpose: Purpose::Evolve,
            carrier_freq: evolve_carrier,
            initial_phase: evolve_phase,
            amplitude: envelope.abs(),
            duration: t_e,
        },
        PulseSegment {
            purpose: Purpose::Readout,
            carrier_freq: omega0,
            initial_phase: phi_i + phi_ii + phi_fin,
            amplitude: omega1,
            duration: beta / omega1,
        },
    ];
    Ok(PulseSequence {
        segments,
        params: *params,
        k,
        tau_e,
        protocol: protocol.clone(),
        period,
        omega0,
        omega1,
        alpha,
        beta,
        phi_ini,
        phi_i,
        phi_ii,
        phi_fin,
    })
}

/// Unit Bloch axis of `v(k, φ)`.
pub fn measurement_axis<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> Vec3<T> {
    let v = velocity_field(params, k, phi);
    let n = norm3(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Rotating-frame unitary of the Readout segment, `exp(-i β b̂·σ/2)` with
/// `b̂` at azimuth `φ(τ_e) + φ_fin`.
pub fn readout_unitary<T: Real>(seq: &PulseSequence<T>) -> SpinOperator<T> {
    let psi = seq.protocol.phi(seq.tau_e) + seq.phi_fin;
    let h = T::lit(0.5) * seq.beta;
    exp_neg_i_pauli(T::zero(), [h * psi.cos(), h * psi.sin(), T::zero()])
}

/// Rotating-frame unitary of the Prepare segment.
pub fn prepare_unitary<T: Real>(seq: &PulseSequence<T>) -> SpinOperator<T> {
    let h = T::lit(0.5) * seq.alpha;
    exp_neg_i_pauli(
        T::zero(),
        [h * seq.phi_ini.cos(), h * seq.phi_ini.sin(), T::zero()],
    )
}

/// Rotating-wave part of segment `index` at local time `t`, expressed in
/// the model frame: the lab Hamiltonian is moved to the frame rotating at
/// `ω₀` (anchored at the sequence start), the counter-rotating terms are
/// dropped, and the result is conjugated by the detuning frame
/// `exp(iδ t_e' σz/2)` accumulated since the Evolve segment started.
pub fn rwa_segment_hamiltonian<T: Real>(
    seq: &PulseSequence<T>,
    index: usize,
    t: T,
) -> SpinOperator<T> {
    let s = &seq.segments[index];
    let start = seq.starts()[index];
    let t_abs = start + t;
    let h = T::lit(0.5);
    // A cos(a) σx in a frame rotating at ω₀: keeps (A/2)(σx cos(a-b) + σy sin(a-b))
    let a = s.carrier_freq * t + s.initial_phase + seq.modulation(index, t);
    let rel = a - seq.omega0 * t_abs;
    let frame_h = SpinOperator::from_pauli(
        T::zero(),
        h * s.amplitude * rel.cos(),
        h * s.amplitude * rel.sin(),
        T::zero(),
    );
    let delta = seq.params.delta_eff(seq.k);
    let elapsed = match index {
        0 => T::zero(),
        1 => t,
        _ => seq.segments[1].duration,
    };
    // ψ₀ = U ψ_model with U = exp(iδ t' σz/2) = z_rotation(-δ t')
    let u = z_rotation(-delta * elapsed);
    let mut out = frame_h.conjugate_by(&u);
    if index == 1 {
        out = out + SpinOperator::from_pauli(T::zero(), T::zero(), T::zero(), h * delta);
    }
    out
}

/// Target rotating-frame Hamiltonian of segment `index` at local time `t`.
pub fn target_segment_hamiltonian<T: Real>(
    seq: &PulseSequence<T>,
    index: usize,
    t: T,
) -> SpinOperator<T> {
    let h = T::lit(0.5);
    match index {
        0 => SpinOperator::from_pauli(
            T::zero(),
            h * seq.omega1 * seq.phi_ini.cos(),
            h * seq.omega1 * seq.phi_ini.sin(),
            T::zero(),
        ),
        1 => crate::model::hamiltonian(&seq.params, seq.k, seq.protocol.phi(t / seq.period)),
        _ => {
            let psi = seq.protocol.phi(seq.tau_e) + seq.phi_fin;
            SpinOperator::from_pauli(
                T::zero(),
                h * seq.omega1 * psi.cos(),
                h * seq.omega1 * psi.sin(),
                T::zero(),
            )
        }
    }
}

/// Outcome of a lab-frame run.
#[derive(Debug, Clone, Copy)]
pub struct LabFrameResult<T> {
    pub state: QubitState<T>,
    /// Lab-frame propagator of the whole sequence.
    pub propagator: SpinOperator<T>,
    pub steps: usize,
}

fn lab_field<T: Real>(omega0: T, drive: T) -> Vec3<T> {
    [drive, T::zero(), T::lit(0.5) * omega0]
}

/// Integrates `H_lab = ω₀σz/2 + f(t)σx` from `|0⟩` through all three
/// segments, keeping the counter-rotating terms. Uses the fourth-order
/// two-point Gauss-Magnus step; every segment is split into equal steps no
/// longer than `dt`.
pub fn simulate_lab_frame<T: Real>(seq: &PulseSequence<T>, dt: T) -> Result<LabFrameResult<T>> {
    if !(dt > T::zero()) || seq.omega0 * dt > T::lit(MAX_CARRIER_PHASE_STEP) {
        return Err(Error::Precondition(format!(
            "time step dt = {dt} does not resolve the carrier: need omega0*dt <= {MAX_CARRIER_PHASE_STEP}"
        )));
    }
    let c = T::lit(3.0).sqrt() / T::lit(6.0);
    let (g1, g2) = (T::lit(0.5) - c, T::lit(0.5) + c);
    let mut u = SpinOperator::identity();
    let mut steps = 0;
    for (index, seg) in seq.segments.iter().enumerate() {
        if seg.duration <= T::zero() {
            continue;
        }
        let n = (seg.duration / dt).ceil().max(T::one());
        let h = seg.duration / n;
        let n = n.to_f64_lossy() as usize;
        for s in 0..n {
            let t0 = h * T::from_usize_lossy(s);
            let b1 = lab_field(seq.omega0, seq.drive(index, t0 + g1 * h));
            let b2 = lab_field(seq.omega0, seq.drive(index, t0 + g2 * h));
            // Ω = -i[h/2 (H₁+H₂) + (√3 h²/6)(b₂ × b₁)·σ]
            let cr = cross3(b2, b1);
            let k2 = c * h * h;
            let theta = [0, 1, 2].map(|j| T::lit(0.5) * h * (b1[j] + b2[j]) + k2 * cr[j]);
            u = exp_neg_i_pauli(T::zero(), theta) * u;
        }
        steps += n;
    }
    let psi = u.apply(&Spinor::up());
    Ok(LabFrameResult {
        state: QubitState::from_spinor(&psi)?,
        propagator: u,
        steps,
    })
}

/// Lab-frame state mapped to the model frame after the Readout segment:
/// undo the `ω₀` rotation over the whole sequence and the detuning frame
/// accumulated during Evolve.
pub fn lab_to_model_frame<T: Real>(seq: &PulseSequence<T>, lab: &QubitState<T>) -> QubitState<T> {
    let delta = seq.params.delta_eff(seq.k);
    let frame = z_rotation(-seq.omega0 * seq.total_duration());
    let detuning = z_rotation(delta * seq.evolve().duration);
    lab.evolve(&(detuning * frame))
}

/// Ideal readout state: exact model dynamics to `τ_e` followed by the
/// Readout rotation.
pub fn ideal_final_state<T: Real>(seq: &PulseSequence<T>) -> Result<QubitState<T>> {
    let traj = propagate(
        &seq.params,
        &seq.protocol,
        seq.k,
        seq.period,
        &[seq.tau_e],
        &PropagationConfig::midpoint(100_000),
    )?;
    Ok(traj.samples[0].state.evolve(&readout_unitary(seq)))
}

/// Fidelity between the lab-frame simulation and the rotating-frame target.
pub fn rwa_fidelity<T: Real>(seq: &PulseSequence<T>, dt: T) -> Result<T> {
    let lab = simulate_lab_frame(seq, dt)?;
    let actual = lab_to_model_frame(seq, &lab.state);
    let ideal = ideal_final_state(seq)?;
    // both states are pure, so tr(ρσ) is the fidelity
    let f = actual.density().trace_product(ideal.density()).re;
    Ok(f.max(T::zero()).min(T::one()))
}

/// `ω_R = a V^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationFit<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> CalibrationFit<T> {
    pub fn rabi_frequency(&self, amplitude: T) -> T {
        self.a * amplitude.powf(self.b)
    }

    /// Output amplitude that gives Rabi frequency `omega_r`.
    pub fn amplitude_for(&self, omega_r: T) -> T {
        (omega_r / self.a).powf(T::one() / self.b)
    }
}

/// Least-squares fit of `ln ω_R = ln a + b ln V` to `(V, ω_R)` samples.
pub fn calibrate_rabi<T: Real>(samples: &[(T, T)]) -> Result<CalibrationFit<T>> {
    if samples.len() < 2 {
        return Err(Error::Calibration(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(v, w)) = samples
        .iter()
        .find(|&&(v, w)| !(v > T::zero() && w > T::zero() && v.is_finite() && w.is_finite()))
    {
        return Err(Error::Calibration(format!(
            "samples must be positive and finite, got (V = {v}, omega_R = {w})"
        )));
    }
    let n = T::from_usize_lossy(samples.len());
    let xs: Vec<T> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let sxx = xs.iter().fold(T::zero(), |a, &x| a + (x - mx) * (x - mx));
    let sxy = xs
        .iter()
        .zip(&ys)
        .fold(T::zero(), |a, (&x, &y)| a + (x - mx) * (y - my));
    if !(sxx > T::lit(1e-300)) {
        return Err(Error::Calibration(
            "all amplitudes are equal; exponent undetermined".into(),
        ));
    }
    let b = sxy / sxx;
    let a = (my - b * mx).exp();
    Ok(CalibrationFit { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn seq(ratio: f64, k: f64, tau_e: f64) -> PulseSequence<f64> {
        let p = ModelParams::experiment(ratio).unwrap();
        compile_sequence(
            &p,
            k,
            tau_e,
            &RampProtocol::linear(),
            1.0,
            DEFAULT_CARRIER,
            DEFAULT_RABI,
        )
        .unwrap()
    }

    #[test]
    fn prepare_is_empty_when_state_is_already_up() {
        let s = seq(0.0, PI / 2.0, 0.3);
        assert_eq!(s.prepare().duration, 0.0);
        assert!((s.readout().duration - PI / DEFAULT_RABI).abs() < 1e-12);
    }

    #[test]
    fn singular_point_has_zero_alpha() {
        let s = seq(1.0, PI, 0.5);
        assert_eq!(s.alpha, 0.0);
    }

    #[test]
    fn carrier_ratio_is_enforced() {
        let p = ModelParams::experiment(0.5).unwrap();
        let r = compile_sequence(
            &p,
            1.0,
            0.5,
            &RampProtocol::linear(),
            1.0,
            2.0 * PI * 150.0,
            DEFAULT_RABI,
        );
        assert!(matches!(r, Err(Error::Precondition(m)) if m.contains("omega")));
        let r = compile_sequence(
            &p,
            1.0,
            1.5,
            &RampProtocol::linear(),
            1.0,
            DEFAULT_CARRIER,
            DEFAULT_RABI,
        );
        assert!(r.is_err());
    }

    #[test]
    fn measurement_axis_examples() {
        let p = ModelParams::experiment(0.3f64).unwrap();
        let a = measurement_axis(&p, 0.0, 0.0);
        assert!((a[0] - 1.0).abs() < 1e-15 && a[1].abs() < 1e-15 && a[2].abs() < 1e-15);
        let a = measurement_axis(&p, PI / 2.0, 1.3);
        assert!((a[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn readout_unitary_rotates_velocity_axis_to_z() {
        let p = ModelParams::experiment(0.7).unwrap();
        for (k, tau) in [
            (0.3, 0.1),
            (2.0, 0.45),
            (-1.1, 0.8),
            (3.0, 0.99),
            (-2.7, 0.0),
        ] {
            let s = compile_sequence(
                &p,
                k,
                tau,
                &RampProtocol::linear(),
                1.0,
                DEFAULT_CARRIER,
                DEFAULT_RABI,
            )
            .unwrap();
            let u = readout_unitary(&s);
            let measured = SpinOperator::sigma_z().conjugate_by(&u);
            let a = measurement_axis(&p, k, s.protocol.phi(tau));
            let expected = SpinOperator::from_pauli(0.0, a[0], a[1], a[2]);
            assert!((measured - expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn prepare_unitary_builds_initial_state() {
        let p = ModelParams::experiment(1.4).unwrap();
        for k in [0.4, 1.9, -2.2, 3.1] {
            let s = compile_sequence(
                &p,
                k,
                0.0,
                &RampProtocol::linear(),
                1.0,
                DEFAULT_CARRIER,
                DEFAULT_RABI,
            )
            .unwrap();
            let n = prepare_unitary(&s).apply(&Spinor::up()).bloch();
            let target = crate::model::initial_bloch(&p, k);
            for j in 0..3 {
                assert!((n[j] - target[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn text_format_round_trips() {
        let s = seq(0.5, 2.2, 0.4);
        let text = s.to_text();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("Prepare "));
        let back = parse_segments::<f64>(&text).unwrap();
        assert_eq!(back.as_slice(), &s.segments[..]);
    }

    #[test]
    fn rejects_coarse_lab_step() {
        let s = seq(0.5, 2.2, 0.4);
        assert!(simulate_lab_frame(&s, 0.2 / DEFAULT_CARRIER).is_err());
    }

    #[test]
    fn calibration_recovers_power_law() {
        let data: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let v = 0.1 * i as f64;
                (v, 0.5 * v.powf(1.3))
            })
            .collect();
        let fit = calibrate_rabi(&data).unwrap();
        assert!((fit.a - 0.5).abs() < 1e-12);
        assert!((fit.b - 1.3).abs() < 1e-12);
        assert!((fit.amplitude_for(fit.rabi_frequency(0.37)) - 0.37).abs() < 1e-12);
        assert!(calibrate_rabi(&data[..1]).is_err());
        assert!(calibrate_rabi(&[(1.0, 2.0), (-1.0, 2.0)]).is_err());
        assert!(calibrate_rabi(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
