//! The two-band model: Hamiltonian, velocity operator, gauged eigensystem,
//! designed initial states and Berry-curvature machinery.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{sgn, Real};
use crate::spin::{bloch_of, norm3, SpinOperator, Spinor, Vec3};

/// Tolerance defining the band-touching point, relative to `delta1` for the
/// frequency condition and absolute (radians) for the momentum condition.
pub const BAND_TOUCHING_TOL: f64 = 1e-9;

/// Drive frequencies of the two-band model, in rad/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub omega: T,
    pub delta1: T,
    pub delta2: T,
}

impl<T: Real> ModelParams<T> {
    /// Requires `omega > 0` and `delta1 > 0`; `delta2` may be any finite value.
    pub fn new(omega: T, delta1: T, delta2: T) -> Result<Self> {
        if !(omega > T::zero() && omega.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !(delta1 > T::zero() && delta1.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta1 must be positive, got {delta1}"
            )));
        }
        if !delta2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "delta2 must be finite, got {delta2}"
            )));
        }
        Ok(Self {
            omega,
            delta1,
            delta2,
        })
    }

    /// Experiment values ω = 2π×20, δ₁ = 2π×10 rad/μs with δ₂ = ratio·δ₁.
    pub fn experiment(ratio: T) -> Result<Self> {
        let tau = T::two_pi();
        let d1 = tau * T::lit(10.0);
        Self::new(tau * T::lit(20.0), d1, ratio * d1)
    }

    pub fn with_delta2(self, delta2: T) -> Result<Self> {
        Self::new(self.omega, self.delta1, delta2)
    }

    pub fn with_ratio(self, ratio: T) -> Result<Self> {
        self.with_delta2(ratio * self.delta1)
    }

    pub fn ratio(&self) -> T {
        self.delta2 / self.delta1
    }

    /// `delta2 ≥ 0`, the range explored experimentally.
    pub fn is_experimental_range(&self) -> bool {
        self.delta2 >= T::zero()
    }

    /// Transverse field magnitude `ν = ω sin k`.
    #[inline]
    pub fn nu(&self, k: T) -> T {
        self.omega * k.sin()
    }

    /// Longitudinal field `δ = δ₁ cos k + δ₂`.
    #[inline]
    pub fn delta_eff(&self, k: T) -> T {
        self.delta1 * k.cos() + self.delta2
    }

    /// Level spacing `Δ = √(ν² + δ²)`.
    #[inline]
    pub fn gap(&self, k: T) -> T {
        self.nu(k).hypot(self.delta_eff(k))
    }

    /// Scale used for relative gap tests.
    pub fn frequency_scale(&self) -> T {
        self.omega + self.delta1 + self.delta2.abs()
    }

    /// True at `δ₁ = δ₂, k = π` (or `δ₁ = -δ₂, k = 0`) within
    /// [`BAND_TOUCHING_TOL`].
    pub fn is_band_touching(&self, k: T) -> bool {
        let tol = T::lit(BAND_TOUCHING_TOL);
        let at_pi = (k.abs() - T::PI()).abs() < tol;
        let at_zero = k.abs() < tol;
        (at_pi && (self.delta1 - self.delta2).abs() < tol * self.delta1)
            || (at_zero && (self.delta1 + self.delta2).abs() < tol * self.delta1)
    }

    /// True when the instantaneous spectrum is gapped for every `k`.
    pub fn is_gapped(&self) -> bool {
        let tol = T::lit(BAND_TOUCHING_TOL) * self.delta1;
        (self.delta1 - self.delta2).abs() >= tol && (self.delta1 + self.delta2).abs() >= tol
    }
}

/// Shape of the pumping schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Linear,
    Quadratic,
    Custom,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Linear => "linear",
            ProtocolKind::Quadratic => "quadratic",
            ProtocolKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type PhaseFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Pumping schedule `φ(τ)` over scaled time `τ ∈ [0, 1]`.
#[derive(Clone)]
pub struct RampProtocol<T> {
    kind: ProtocolKind,
    custom: Option<(PhaseFn<T>, PhaseFn<T>)>,
}

impl<T: Real> fmt::Debug for RampProtocol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RampProtocol")
            .field("kind", &self.kind)
            .field("phi_rate_at_zero", &self.phi_rate_at_zero())
            .finish()
    }
}

impl<T: Real> RampProtocol<T> {
    /// `φ(τ) = 2πτ`.
    pub fn linear() -> Self {
        Self {
            kind: ProtocolKind::Linear,
            custom: None,
        }
    }

    /// `φ(τ) = 2πτ²`.
    pub fn quadratic() -> Self {
        Self {
            kind: ProtocolKind::Quadratic,
            custom: None,
        }
    }

    /// Custom schedule with its derivative. Must complete one cycle,
    /// `φ(0) = 0` and `φ(1) = 2π`.
    pub fn custom(
        phi: impl Fn(T) -> T + Send + Sync + 'static,
        phi_rate: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let tol = T::lit(1e-9);
        if phi(T::zero()).abs() > tol || (phi(T::one()) - T::two_pi()).abs() > tol {
            return Err(Error::InvalidProtocol(
                "custom schedule must satisfy phi(0) = 0 and phi(1) = 2π".into(),
            ));
        }
        Ok(Self::custom_unchecked(phi, phi_rate))
    }

    /// Constant `φ = phi0`: the field never rotates. Not a pumping cycle;
    /// used for stationary-Hamiltonian checks.
    pub fn frozen(phi0: T) -> Self {
        Self::custom_unchecked(move |_| phi0, |_| T::zero())
    }

    fn custom_unchecked(
        phi: impl Fn(T) -> T + Send + Sync + 'static,
        phi_rate: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: ProtocolKind::Custom,
            custom: Some((Arc::new(phi), Arc::new(phi_rate))),
        }
    }

    pub fn from_kind(kind: ProtocolKind) -> Result<Self> {
        match kind {
            ProtocolKind::Linear => Ok(Self::linear()),
            ProtocolKind::Quadratic => Ok(Self::quadratic()),
            ProtocolKind::Custom => Err(Error::InvalidProtocol(
                "custom protocols need an explicit schedule".into(),
            )),
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn is_linear(&self) -> bool {
        self.kind == ProtocolKind::Linear
    }

    #[inline]
    pub fn phi(&self, tau: T) -> T {
        match (&self.kind, &self.custom) {
            (ProtocolKind::Linear, _) => T::two_pi() * tau,
            (ProtocolKind::Quadratic, _) => T::two_pi() * tau * tau,
            (_, Some((phi, _))) => phi(tau),
            _ => unreachable!(),
        }
    }

    /// `dφ/dτ`.
    #[inline]
    pub fn phi_rate(&self, tau: T) -> T {
        match (&self.kind, &self.custom) {
            (ProtocolKind::Linear, _) => T::two_pi(),
            (ProtocolKind::Quadratic, _) => T::lit(2.0) * T::two_pi() * tau,
            (_, Some((_, rate))) => rate(tau),
            _ => unreachable!(),
        }
    }

    pub fn phi_rate_at_zero(&self) -> T {
        self.phi_rate(T::zero())
    }
}

/// `H(k, φ) = (ω sin k / 2)(cos φ σx + sin φ σy) + ((δ₁ cos k + δ₂)/2) σz`.
pub fn hamiltonian<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> SpinOperator<T> {
    SpinOperator::from_field(field(params, k, phi))
}

/// Field vector `b` with `H = b·σ/2`.
#[inline]
pub fn field<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> Vec3<T> {
    let nu = params.nu(k);
    let (s, c) = phi.sin_cos();
    [nu * c, nu * s, params.delta_eff(k)]
}

/// Velocity field vector `w` with `v = ∂ₖH = w·σ/2`.
#[inline]
pub fn velocity_field<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> Vec3<T> {
    let (sk, ck) = k.sin_cos();
    let (s, c) = phi.sin_cos();
    let t = params.omega * ck;
    [t * c, t * s, -params.delta1 * sk]
}

/// `v(k, φ) = ∂ₖH`.
pub fn velocity_operator<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> SpinOperator<T> {
    SpinOperator::from_field(velocity_field(params, k, phi))
}

/// Spectral norm `‖v‖ = ½√(ω² cos²k + δ₁² sin²k)`, independent of φ.
pub fn velocity_norm<T: Real>(params: &ModelParams<T>, k: T) -> T {
    let (sk, ck) = k.sin_cos();
    T::lit(0.5) * (params.omega * ck).hypot(params.delta1 * sk)
}

/// Instantaneous eigensystem in the sgn(ν/Δ) gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem<T> {
    pub e_plus: T,
    pub e_minus: T,
    pub gap: T,
    pub nu: T,
    pub delta_eff: T,
    pub vec_plus: Spinor<T>,
    pub vec_minus: Spinor<T>,
}

/// Energy band label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Plus,
    Minus,
}

impl<T: Real> EigenSystem<T> {
    pub fn vector(&self, band: Band) -> &Spinor<T> {
        match band {
            Band::Plus => &self.vec_plus,
            Band::Minus => &self.vec_minus,
        }
    }

    pub fn energy(&self, band: Band) -> T {
        match band {
            Band::Plus => self.e_plus,
            Band::Minus => self.e_minus,
        }
    }
}

/// Eigenenergies `±Δ/2` and the gauged eigenvectors
///
/// `|+⟩ = (√(1+δ/Δ), s e^{iφ} √(1-δ/Δ))/√2`,
/// `|-⟩ = (s √(1-δ/Δ), -e^{iφ} √(1+δ/Δ))/√2`, `s = sgn(ν)`, `sgn(0) = +1`.
///
/// At a band-touching point the limits `(1, ±e^{iφ})/√2` are returned.
pub fn eigensystem<T: Real>(params: &ModelParams<T>, k: T, phi: T) -> EigenSystem<T> {
    let nu = params.nu(k);
    let delta = params.delta_eff(k);
    let gap = nu.hypot(delta);
    let half = T::lit(0.5);
    let (sp, cp) = phi.sin_cos();
    let phase = Complex::new(cp, sp);
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let real = |x: T| Complex::new(x, T::zero());

    let degenerate = params.is_band_touching(k) || gap <= T::min_positive_value().sqrt();
    let (a, b, s) = if degenerate {
        (T::one(), T::one(), T::one())
    } else {
        // a² = 1 + δ/Δ and b² = 1 - δ/Δ, each formed without cancellation
        let (num_a, num_b) = if delta >= T::zero() {
            let big = gap + delta;
            (big, nu * nu / big)
        } else {
            let big = gap - delta;
            (nu * nu / big, big)
        };
        ((num_a / gap).sqrt(), (num_b / gap).sqrt(), sgn(nu))
    };
    let vec_plus = Spinor([real(inv_sqrt2 * a), phase * (inv_sqrt2 * s * b)]);
    let vec_minus = Spinor([real(inv_sqrt2 * s * b), phase * (-inv_sqrt2 * a)]);
    EigenSystem {
        e_plus: half * gap,
        e_minus: -half * gap,
        gap,
        nu,
        delta_eff: delta,
        vec_plus,
        vec_minus,
    }
}

/// Qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState<T> {
    rho: SpinOperator<T>,
}

impl<T: Real> QubitState<T> {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(rho: SpinOperator<T>) -> Result<Self> {
        let tol = T::lit(1e-9);
        if !rho.is_hermitian(tol) {
            return Err(Error::Precondition(
                "density matrix is not Hermitian".into(),
            ));
        }
        if (rho.trace().re - T::one()).abs() > tol || rho.trace().im.abs() > tol {
            return Err(Error::Precondition(
                "density matrix trace differs from 1".into(),
            ));
        }
        let state = Self { rho };
        if state.bloch_length() > T::one() + tol {
            return Err(Error::Precondition("density matrix is not positive".into()));
        }
        Ok(state)
    }

    /// `ρ = (1 + n·σ)/2`; requires `|n| ≤ 1`.
    pub fn from_bloch(n: Vec3<T>) -> Result<Self> {
        let h = T::lit(0.5);
        Self::new(SpinOperator::from_pauli(h, h * n[0], h * n[1], h * n[2]))
    }

    /// Pure state `|ψ⟩⟨ψ|` of a (normalised on entry) spinor.
    pub fn from_spinor(psi: &Spinor<T>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > T::zero()) {
            return Err(Error::Precondition("zero state vector".into()));
        }
        let u = psi.scale(Complex::new(T::one() / norm, T::zero()));
        Self::new(u.outer(&u))
    }

    pub(crate) fn from_matrix_unchecked(rho: SpinOperator<T>) -> Self {
        Self { rho }
    }

    pub fn density(&self) -> &SpinOperator<T> {
        &self.rho
    }

    pub fn bloch(&self) -> Vec3<T> {
        bloch_of(&self.rho)
    }

    pub fn bloch_length(&self) -> T {
        norm3(self.bloch())
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        self.rho.trace_product(&self.rho).re
    }

    /// `tr(ρ·op)` (real part; exact for Hermitian `op`).
    pub fn expectation(&self, op: &SpinOperator<T>) -> T {
        self.rho.trace_product(op).re
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &SpinOperator<T>) -> Self {
        Self {
            rho: *u * self.rho * u.adjoint(),
        }
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalised spinor.
    pub fn population(&self, psi: &Spinor<T>) -> T {
        psi.inner(&self.rho.apply(psi)).re
    }

    /// Trace distance `½ tr|ρ - σ|`, which for qubits is `½ |n_ρ - n_σ|`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let a = self.bloch();
        let b = other.bloch();
        T::lit(0.5) * norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }
}

/// Bloch vector of the designed initial state,
/// `n = (-δ₁cos k - δ₂, 0, ω sin k)/Δ`, or `(0, 0, 1)` at band touching.
pub fn initial_bloch<T: Real>(params: &ModelParams<T>, k: T) -> Vec3<T> {
    let nu = params.nu(k);
    let delta = params.delta_eff(k);
    let gap = nu.hypot(delta);
    if params.is_band_touching(k) || gap <= T::min_positive_value().sqrt() {
        return [T::zero(), T::zero(), T::one()];
    }
    [-delta / gap, T::zero(), nu / gap]
}

/// Designed initial state: equal superposition of the two bands of `H(k, 0)`.
pub fn initial_state<T: Real>(params: &ModelParams<T>, k: T) -> QubitState<T> {
    let n = initial_bloch(params, k);
    let h = T::lit(0.5);
    QubitState::from_matrix_unchecked(SpinOperator::from_pauli(h, h * n[0], h * n[1], h * n[2]))
}

/// `(|+(k,0)⟩ + |-(k,0)⟩)/√2`, or `(1, 0)` at band touching.
pub fn initial_spinor<T: Real>(params: &ModelParams<T>, k: T) -> Spinor<T> {
    if params.is_band_touching(k) {
        return Spinor::up();
    }
    let es = eigensystem(params, k, T::zero());
    let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    es.vec_plus.add(&es.vec_minus).scale(r)
}

/// Default plaquette edge for [`berry_curvature`].
pub const DEFAULT_PLAQUETTE: f64 = 1e-2;

/// Gauge-invariant phase of the link loop around an elementary plaquette,
/// ordered `(τ₀,k₀) → (τ₁,k₀) → (τ₁,k₁) → (τ₀,k₁)`.
fn plaquette_phase<T: Real>(
    u00: &Spinor<T>,
    u10: &Spinor<T>,
    u11: &Spinor<T>,
    u01: &Spinor<T>,
) -> T {
    let w = u00.inner(u10) * u10.inner(u11) * u11.inner(u01) * u01.inner(u00);
    -w.arg()
}

/// Berry curvature `Ω_τk = i⟨∂τ n|∂ₖ n⟩ + c.c.` of `band` at `(k, τ)`.
///
/// The loop phase of a centred square plaquette of edge `s` is even in `s`,
/// so the estimates at `s`, `s/2` and `s/4` (with `s = plaquette`) are
/// Richardson-extrapolated to remove the `s²` and `s⁴` terms. A large base
/// edge keeps the rounding error of the tiny loop phase small.
pub fn berry_curvature<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    tau: T,
    band: Band,
    plaquette: T,
) -> Result<T> {
    let scale = params.frequency_scale();
    let h = T::lit(0.5) * plaquette;
    if params.is_band_touching(k)
        || [k - h, k + h]
            .iter()
            .any(|&kk| params.gap(kk) <= T::lit(1e-9) * scale)
    {
        return Err(Error::BandTouching {
            k: k.to_f64_lossy(),
        });
    }
    let vec = |kk: T, tt: T| *eigensystem(params, kk, protocol.phi(tt)).vector(band);
    let single = |edge: T| {
        let h = T::lit(0.5) * edge;
        let (t0, t1, k0, k1) = (tau - h, tau + h, k - h, k + h);
        plaquette_phase(&vec(k0, t0), &vec(k0, t1), &vec(k1, t1), &vec(k1, t0)) / (edge * edge)
    };
    let (w1, w2, w4) = (
        single(plaquette),
        single(h),
        single(T::lit(0.25) * plaquette),
    );
    let (three, fifteen) = (T::lit(3.0), T::lit(15.0));
    let r1 = (T::lit(4.0) * w2 - w1) / three;
    let r2 = (T::lit(4.0) * w4 - w2) / three;
    Ok((T::lit(16.0) * r2 - r1) / fifteen)
}

/// Chern number with the summed (pre-rounding) curvature flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernNumber<T> {
    pub value: i64,
    /// `Σ F / 2π` before rounding.
    pub raw: T,
}

impl<T: Real> ChernNumber<T> {
    pub fn residue(&self) -> T {
        (self.raw - T::lit(self.value as f64)).abs()
    }
}

/// Eigenvectors of `band` on a periodic `n_tau × n_k` lattice covering the
/// `(τ, k)` torus; the seam rows reuse the first row so every site has a
/// single gauge.
pub(crate) fn band_lattice<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    band: Band,
    n_tau: usize,
    n_k: usize,
) -> Vec<Vec<Spinor<T>>> {
    let dk = T::two_pi() / T::from_usize_lossy(n_k);
    let dt = T::one() / T::from_usize_lossy(n_tau);
    (0..n_tau)
        .map(|i| {
            let phi = protocol.phi(dt * T::from_usize_lossy(i));
            (0..n_k)
                .map(|j| {
                    let k = -T::PI() + dk * T::from_usize_lossy(j);
                    *eigensystem(params, k, phi).vector(band)
                })
                .collect()
        })
        .collect()
}

/// Plaquette fluxes `F[i][j]` over the lattice from [`band_lattice`].
pub(crate) fn lattice_fluxes<T: Real>(lattice: &[Vec<Spinor<T>>]) -> Vec<Vec<T>> {
    let n_tau = lattice.len();
    let n_k = lattice[0].len();
    (0..n_tau)
        .map(|i| {
            let ip = (i + 1) % n_tau;
            (0..n_k)
                .map(|j| {
                    let jp = (j + 1) % n_k;
                    plaquette_phase(
                        &lattice[i][j],
                        &lattice[ip][j],
                        &lattice[ip][jp],
                        &lattice[i][jp],
                    )
                })
                .collect()
        })
        .collect()
}

/// First Chern number of `band` over the `(k, τ)` torus by summing plaquette
/// fluxes on an `n × n` lattice.
pub fn chern_number<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    band: Band,
    n: usize,
) -> Result<ChernNumber<T>> {
    if n < 4 {
        return Err(Error::InvalidGrid(
            "Chern lattice needs at least 4 sites per side".into(),
        ));
    }
    let scale = params.frequency_scale();
    let dk = T::two_pi() / T::from_usize_lossy(n);
    let min_gap = (0..n)
        .map(|j| params.gap(-T::PI() + dk * T::from_usize_lossy(j)))
        .fold(T::infinity(), T::min);
    if !params.is_gapped() || min_gap <= T::lit(1e-9) * scale {
        return Err(Error::GapClosed {
            min_gap: min_gap.to_f64_lossy(),
        });
    }
    let lattice = band_lattice(params, protocol, band, n, n);
    let total = lattice_fluxes(&lattice)
        .iter()
        .flatten()
        .fold(T::zero(), |a, &b| a + b);
    let raw = total / T::two_pi();
    Ok(ChernNumber {
        value: raw.round().to_f64_lossy() as i64,
        raw,
    })
}
