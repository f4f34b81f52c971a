//! Exact propagation of the driven qubit over a pumping cycle.
//!
//! The scaled-time Schrödinger equation `i dψ/dτ = T·H(k, τ) ψ` is stepped
//! with the exponential of the midpoint Hamiltonian (first-order Magnus).
//! For the linear ramp the rotating-frame Hamiltonian is static and the
//! propagator is available in closed form.

use crate::error::{Error, Result};
use crate::model::{
    hamiltonian, initial_state, velocity_norm, velocity_operator, ModelParams, QubitState,
    RampProtocol,
};
use crate::scalar::Real;
use crate::spin::{z_rotation, SpinOperator};

/// Smallest admissible `steps_per_cycle` for midpoint stepping.
pub const MIN_STEPS_PER_CYCLE: usize = 100;

/// Default number of midpoint steps per pumping cycle.
pub const DEFAULT_STEPS_PER_CYCLE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    MidpointExponential,
    AnalyticLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationConfig {
    pub steps_per_cycle: usize,
    pub method: PropagationMethod,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            steps_per_cycle: DEFAULT_STEPS_PER_CYCLE,
            method: PropagationMethod::MidpointExponential,
        }
    }
}

impl PropagationConfig {
    pub fn midpoint(steps_per_cycle: usize) -> Self {
        Self {
            steps_per_cycle,
            method: PropagationMethod::MidpointExponential,
        }
    }

    pub fn analytic() -> Self {
        Self {
            steps_per_cycle: DEFAULT_STEPS_PER_CYCLE,
            method: PropagationMethod::AnalyticLinear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == PropagationMethod::MidpointExponential
            && self.steps_per_cycle < MIN_STEPS_PER_CYCLE
        {
            return Err(Error::InvalidConfig(format!(
                "steps_per_cycle = {} is below the floor of {MIN_STEPS_PER_CYCLE}",
                self.steps_per_cycle
            )));
        }
        Ok(())
    }
}

/// State and velocity at one sampled scaled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub tau: T,
    pub state: QubitState<T>,
    /// `⟨v⟩ = tr(ρ v)`.
    pub v_expect: T,
    /// `‖v‖`.
    pub v_norm: T,
}

impl<T: Real> TrajectorySample<T> {
    /// `⟨v⟩/‖v‖`, the quantity read out after the measurement rotation.
    pub fn v_normalized(&self) -> T {
        self.v_expect / self.v_norm
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub samples: Vec<TrajectorySample<T>>,
    /// Propagator from τ = 0 to the last sample.
    pub propagator: SpinOperator<T>,
    /// Largest `‖U†U - I‖` seen at the samples.
    pub unitarity_defect: T,
}

fn check_grid<T: Real>(tau_grid: &[T], period: T) -> Result<()> {
    if !(period > T::zero() && period.is_finite()) {
        return Err(Error::Precondition(format!(
            "cycle duration T must be positive, got {period}"
        )));
    }
    if tau_grid.is_empty() {
        return Err(Error::InvalidGrid("empty tau grid".into()));
    }
    let mut prev = T::zero();
    for &t in tau_grid {
        if !(t >= prev && t <= T::one()) {
            return Err(Error::InvalidGrid(
                "tau grid must be sorted and lie within [0, 1]".into(),
            ));
        }
        prev = t;
    }
    Ok(())
}

/// Evolves [`initial_state`] under `H(k, τ)` for a cycle of duration
/// `period` (μs) and records the state and `⟨v⟩` at every `tau_grid` point.
pub fn propagate<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    tau_grid: &[T],
    config: &PropagationConfig,
) -> Result<Trajectory<T>> {
    config.validate()?;
    check_grid(tau_grid, period)?;
    if config.method == PropagationMethod::AnalyticLinear && !protocol.is_linear() {
        return Err(Error::NotLinear(protocol.kind().to_string()));
    }
    let rho0 = initial_state(params, k);
    let v_norm = velocity_norm(params, k);
    let steps = T::from_usize_lossy(config.steps_per_cycle);

    let mut u = SpinOperator::identity();
    let mut tau_now = T::zero();
    let mut defect = T::zero();
    let mut samples = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        match config.method {
            PropagationMethod::MidpointExponential => {
                let span = tau - tau_now;
                if span > T::zero() {
                    let n = (span * steps - T::lit(1e-9)).ceil().max(T::one());
                    let dtau = span / n;
                    let n = n.to_f64_lossy() as usize;
                    let dt = period * dtau;
                    for s in 0..n {
                        let mid = tau_now + dtau * (T::from_usize_lossy(s) + T::lit(0.5));
                        u = hamiltonian(params, k, protocol.phi(mid)).exp_neg_i(dt) * u;
                    }
                }
            }
            PropagationMethod::AnalyticLinear => {
                u = analytic_linear_propagator(params, k, period, tau);
            }
        }
        tau_now = tau;
        defect = defect.max(u.unitarity_defect());
        let state = rho0.evolve(&u);
        let v = velocity_operator(params, k, protocol.phi(tau));
        samples.push(TrajectorySample {
            tau,
            state,
            v_expect: state.expectation(&v),
            v_norm,
        });
    }
    Ok(Trajectory {
        samples,
        propagator: u,
        unitarity_defect: defect,
    })
}

/// `R(φ) = exp(-i φ σz / 2)`.
pub fn frame_rotation<T: Real>(phi: T) -> SpinOperator<T> {
    z_rotation(phi)
}

/// `R†(φ) · op · R(φ)`.
pub fn rotating_frame_transform<T: Real>(op: &SpinOperator<T>, phi: T) -> SpinOperator<T> {
    op.conjugate_by(&frame_rotation(phi))
}

/// Rotating-frame Hamiltonian `ν σx/2 + (δ - φ̇(τ)/T) σz/2`.
pub fn rotating_frame_hamiltonian<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    tau: T,
) -> SpinOperator<T> {
    let h = T::lit(0.5);
    let detuning = params.delta_eff(k) - protocol.phi_rate(tau) / period;
    SpinOperator::from_pauli(T::zero(), h * params.nu(k), T::zero(), h * detuning)
}

/// Lab-frame propagator from τ = 0 for the linear ramp,
/// `R(2πτ) · exp(-i H̃ T τ)` with the static `H̃ = ν σx/2 + (δ - 2π/T) σz/2`.
pub fn analytic_linear_propagator<T: Real>(
    params: &ModelParams<T>,
    k: T,
    period: T,
    tau: T,
) -> SpinOperator<T> {
    let h_rot = rotating_frame_hamiltonian(params, &RampProtocol::linear(), k, period, tau);
    frame_rotation(T::two_pi() * tau) * h_rot.exp_neg_i(period * tau)
}

/// `n_intervals + 1` uniformly spaced points on `[0, 1]`.
pub fn uniform_tau_grid<T: Real>(n_intervals: usize) -> Vec<T> {
    let n = T::from_usize_lossy(n_intervals);
    (0..=n_intervals)
        .map(|i| T::from_usize_lossy(i) / n)
        .collect()
}
