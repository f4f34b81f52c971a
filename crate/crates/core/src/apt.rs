//! First-order adiabatic perturbation theory and closed-form pumping
//! components.
//!
//! The pumped charge over `N` cycles splits into a Berry-curvature term
//! `q_tp`, an interband-coherence term `q_ibc` (both accumulate per cycle)
//! and a boundary term `q_ng` that does not grow with `N`. For the linear ramp
//! the exact charge is also available as a stationary part `q_st` plus an
//! oscillatory part `q_os`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{
    band_lattice, eigensystem, initial_state, lattice_fluxes, velocity_operator, Band, ModelParams,
    QubitState, RampProtocol,
};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::Real;
use crate::spin::{SpinOperator, Spinor};

/// Per-cycle pumping components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpComponents<T> {
    pub q_tp: T,
    pub q_ibc: T,
    pub q_ng: T,
    pub n_cycles: u32,
}

impl<T: Real> PumpComponents<T> {
    /// `N (q_tp + q_ibc) + q_ng` for the stored cycle count.
    pub fn total(&self) -> T {
        n_cycle_charge(self, self.n_cycles)
    }
}

/// Charge after `n` cycles, `n (q_tp + q_ibc) + q_ng`.
pub fn n_cycle_charge<T: Real>(components: &PumpComponents<T>, n: u32) -> T {
    T::lit(n as f64) * (components.q_tp + components.q_ibc) + components.q_ng
}

/// Stationary and oscillatory parts of the exact linear-ramp charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRampSplit<T> {
    pub q_st: T,
    pub q_os: T,
}

impl<T: Real> LinearRampSplit<T> {
    pub fn total(&self) -> T {
        self.q_st + self.q_os
    }
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-13,
        max_subdivisions: 20_000,
        initial_panels: 16,
    }
}

fn require_gap<T: Real>(params: &ModelParams<T>) -> Result<()> {
    if params.is_gapped() {
        Ok(())
    } else {
        let k = if (params.delta1 - params.delta2).abs() < params.delta1 {
            std::f64::consts::PI
        } else {
            0.0
        };
        Err(Error::BandTouching { k })
    }
}

/// Density matrix through first order in `1/T`, split into the adiabatically
/// transported part and the `O(1/T)` correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderDensity<T> {
    pub zeroth: SpinOperator<T>,
    pub correction: SpinOperator<T>,
}

impl<T: Real> FirstOrderDensity<T> {
    pub fn total(&self) -> SpinOperator<T> {
        self.zeroth + self.correction
    }
}

/// First-order APT density matrix at `(k, τ)` for the designed initial state.
///
/// The gauged eigenvectors are parallel transported along `τ` (their Berry
/// phase is removed analytically), then the boundary terms of the
/// amplitude expansion are evaluated with dynamical phases
/// `Θₙ = T ∫ Eₙ dτ'`.
pub fn first_order_density<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    tau: T,
) -> Result<FirstOrderDensity<T>> {
    first_order_density_from(params, protocol, k, period, tau, &initial_state(params, k))
}

/// As [`first_order_density`] for an arbitrary initial state `rho0`.
pub fn first_order_density_from<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    tau: T,
    rho0: &QubitState<T>,
) -> Result<FirstOrderDensity<T>> {
    if !(period > T::zero()) {
        return Err(Error::Precondition(
            "cycle duration T must be positive".into(),
        ));
    }
    let phi0 = protocol.phi(T::zero());
    let phi = protocol.phi(tau);
    let es0 = eigensystem(params, k, phi0);
    let es = eigensystem(params, k, phi);
    if params.is_band_touching(k) || es.gap <= T::lit(1e-9) * params.frequency_scale() {
        return Err(Error::BandTouching {
            k: k.to_f64_lossy(),
        });
    }
    let energies = [es.e_plus, es.e_minus];
    let zero = Complex::new(T::zero(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let expi = |x: T| Complex::new(x.cos(), x.sin());

    // In this gauge only the lower component carries e^{iφ}, so the Berry
    // connection is -φ̇ |n₂|² and parallel transport multiplies by
    // exp(-i |n₂|² (φ(τ) - φ(0))).
    let transported = |es: &crate::model::EigenSystem<T>, dphi: T| -> [Spinor<T>; 2] {
        [es.vec_plus, es.vec_minus].map(|v| v.scale(expi(-v.0[1].norm_sqr() * dphi)))
    };
    let basis0 = transported(&es0, T::zero());
    let basis = transported(&es, phi - phi0);

    // ⟨ℓ̃|∂τ ñ⟩ in the transported basis at the given scaled time
    let coupling = |b: &[Spinor<T>; 2], t: T, l: usize, n: usize| -> Complex<T> {
        let dn = Spinor([zero, i * b[n].0[1]]);
        b[l].inner(&dn) * protocol.phi_rate(t)
    };
    let theta = |a: usize, b: usize, t: T| period * (energies[a] - energies[b]) * t;
    // i ⟨a|∂τ b⟩ / (E_b - E_a) · exp(iΘ_ab), the boundary term with bra a and ket b
    let boundary_ket = |bset: &[Spinor<T>; 2], t: T, a: usize, b: usize| {
        i * coupling(bset, t, a, b) / (energies[b] - energies[a]) * expi(theta(a, b, t))
    };
    let boundary_bra = |bset: &[Spinor<T>; 2], t: T, m: usize, l: usize| {
        i * coupling(bset, t, m, l) / (energies[m] - energies[l]) * expi(theta(m, l, t))
    };

    let mut c0 = [[zero; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            c0[m][n] = basis0[m].inner(&rho0.density().apply(&basis0[n]));
        }
    }
    let inv_t = T::one() / period;
    let mut dc = [[zero; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            let mut acc = zero;
            for l in (0..2).filter(|&l| l != n) {
                acc = acc
                    + c0[m][l]
                        * (boundary_ket(&basis, tau, l, n)
                            - boundary_ket(&basis0, T::zero(), l, n));
            }
            for l in (0..2).filter(|&l| l != m) {
                acc = acc
                    + c0[l][n]
                        * (boundary_bra(&basis, tau, m, l)
                            - boundary_bra(&basis0, T::zero(), m, l));
            }
            dc[m][n] = acc * inv_t;
        }
    }

    let assemble = |c: &[[Complex<T>; 2]; 2]| {
        let mut rho = SpinOperator::zero();
        for m in 0..2 {
            for n in 0..2 {
                let w = c[m][n] * expi(-theta(m, n, tau));
                rho = rho + basis[m].outer(&basis[n]).scale_complex(w);
            }
        }
        rho
    };
    Ok(FirstOrderDensity {
        zeroth: assemble(&c0),
        correction: assemble(&dc),
    })
}

/// `2 Im[ρ₊₋ v₋₊] / (E₊ - E₋)` at τ = 0.
fn ng_integrand<T: Real>(params: &ModelParams<T>, k: T, rho: &QubitState<T>) -> T {
    let es = eigensystem(params, k, T::zero());
    let v = velocity_operator(params, k, T::zero());
    let rho_pm = es.vec_plus.inner(&rho.density().apply(&es.vec_minus));
    let v_mp = es.vec_minus.inner(&v.apply(&es.vec_plus));
    T::lit(2.0) * (rho_pm * v_mp).im / es.gap
}

/// Non-accumulating boundary term
/// `(1/2π) ∫dk Σ_{m<n} 2 Im[ρ_mn v_nm] / (E_m - E_n)` at τ = 0.
pub fn q_ng<T: Real, F>(params: &ModelParams<T>, rho0_family: F) -> Result<T>
where
    F: Fn(T) -> QubitState<T>,
{
    require_gap(params)?;
    let r = integrate(
        |k| ng_integrand(params, k, &rho0_family(k)),
        -T::PI(),
        T::PI(),
        quad_opts(),
    )?;
    Ok(r.value / T::two_pi())
}

/// Band populations `(ρ₊₊, ρ₋₋)` of `rho` in the eigenbasis of `H(k, 0)`.
pub fn band_populations<T: Real>(params: &ModelParams<T>, k: T, rho: &QubitState<T>) -> (T, T) {
    let es = eigensystem(params, k, T::zero());
    (rho.population(&es.vec_plus), rho.population(&es.vec_minus))
}

/// Default `(τ, k)` lattice size for [`q_tp`].
pub const DEFAULT_TP_LATTICE: usize = 128;

/// Thouless term `(1/2π) ∫dk Σₙ ρₙₙ(k,0) ∫dτ Ω⁽ⁿ⁾`, with the curvature
/// integrated as plaquette fluxes on an `n × n` lattice and the weights taken
/// at each plaquette's central momentum.
pub fn q_tp<T: Real, F>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    populations: F,
    n: usize,
) -> Result<T>
where
    F: Fn(T) -> (T, T),
{
    if n < 4 {
        return Err(Error::InvalidGrid(
            "curvature lattice needs at least 4 sites per side".into(),
        ));
    }
    if !params.is_gapped() {
        return Err(Error::GapClosed { min_gap: 0.0 });
    }
    let flux_plus = lattice_fluxes(&band_lattice(params, protocol, Band::Plus, n, n));
    let flux_minus = lattice_fluxes(&band_lattice(params, protocol, Band::Minus, n, n));
    let dk = T::two_pi() / T::from_usize_lossy(n);
    let weights: Vec<(T, T)> = (0..n)
        .map(|j| populations(-T::PI() + dk * (T::from_usize_lossy(j) + T::lit(0.5))))
        .collect();
    let mut total = T::zero();
    for i in 0..n {
        for (j, &(pp, pm)) in weights.iter().enumerate() {
            total = total + pp * flux_plus[i][j] + pm * flux_minus[i][j];
        }
    }
    Ok(total / T::two_pi())
}

/// Checker for the assumption that removes the order-`T` diagonal transport,
/// returning `(1/2π) ∫dk Σₙ ρₙₙ(k,0) ∫ T vₙₙ dτ`. Uses `v₊₊ = -v₋₋ = ∂ₖΔ/2`.
pub fn diagonal_transport<T: Real, F>(
    params: &ModelParams<T>,
    period: T,
    populations: F,
) -> Result<T>
where
    F: Fn(T) -> (T, T),
{
    let integrand = |k: T| {
        let nu = params.nu(k);
        let delta = params.delta_eff(k);
        let gap = nu.hypot(delta);
        if gap == T::zero() {
            return T::zero();
        }
        let dgap = (nu * params.omega * k.cos() - delta * params.delta1 * k.sin()) / gap;
        let (pp, pm) = populations(k);
        T::lit(0.5) * dgap * (pp - pm) * period
    };
    let r = integrate(integrand, -T::PI(), T::PI(), quad_opts())?;
    Ok(r.value / T::two_pi())
}

/// `[(ω² - δ₁²) cos k - δ₁δ₂] ω sin²k / (ω² sin²k + (δ₁ cos k + δ₂)²)^{3/2}`.
fn ibc_integrand<T: Real>(params: &ModelParams<T>, k: T) -> T {
    let (sk, ck) = k.sin_cos();
    let (w, d1, d2) = (params.omega, params.delta1, params.delta2);
    let gap2 = (w * sk).powi(2) + (d1 * ck + d2).powi(2);
    ((w * w - d1 * d1) * ck - d1 * d2) * w * sk * sk / (gap2 * gap2.sqrt())
}

fn ibc_integral<T: Real>(params: &ModelParams<T>) -> Result<T> {
    if !params.is_gapped() {
        return Err(Error::Divergent(
            "interband-coherence charge diverges logarithmically at the band-touching point".into(),
        ));
    }
    match integrate(
        |k| ibc_integrand(params, k),
        T::zero(),
        T::PI(),
        quad_opts(),
    ) {
        Ok(r) => Ok(r.value),
        Err(Error::NonConvergence { .. }) => Err(Error::Divergent(
            "interband-coherence integral failed to converge near the gap minimum".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Interband-coherence charge for a general ramp (designed initial states),
/// `-(φ̇(0)/2π) ∫₀^π dk [(ω²-δ₁²)cos k - δ₁δ₂] ω sin²k / Δ³`.
pub fn q_ibc_general<T: Real>(params: &ModelParams<T>, protocol: &RampProtocol<T>) -> Result<T> {
    let integral = ibc_integral(params)?;
    let rate = protocol.phi_rate_at_zero();
    if rate == T::zero() {
        return Ok(T::zero());
    }
    Ok(-(rate / T::two_pi()) * integral)
}

/// [`q_ibc_general`] for the linear ramp, `-∫₀^π dk (…)/Δ³`.
pub fn q_ibc_linear<T: Real>(params: &ModelParams<T>) -> Result<T> {
    Ok(-ibc_integral(params)?)
}

/// Panels needed to put at least 20 quadrature panels in every oscillation
/// period of `sin(Δ̃(k) T)` over `[0, π]`.
fn oscillation_panels<T: Real>(params: &ModelParams<T>, period: T) -> usize {
    // |∂ₖΔ̃| ≤ √(ω² + δ₁²), so the phase advances at most π T √(ω² + δ₁²)
    let max_phase = T::PI() * period * params.omega.hypot(params.delta1);
    let periods = (max_phase / T::two_pi()).ceil().to_f64_lossy() as usize;
    (20 * periods).max(16)
}

fn check_period<T: Real>(period: T) -> Result<()> {
    if period > T::zero() && period.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "cycle duration T must be positive, got {period}"
        )))
    }
}

/// Stationary part of the exact linear-ramp charge,
/// `-∫₀^π dk ν ∂ₖΔ̃ / (Δ Δ̃) = -∫₀^π dk ω sin²k [(ω²-δ₁²) cos k - δ₁δ₂ + 2πδ₁/T] / (Δ Δ̃²)`
/// with `δ̃ = δ - 2π/T`, `Δ̃ = √(ν² + δ̃²)`.
pub fn q_st<T: Real>(params: &ModelParams<T>, period: T) -> Result<T> {
    check_period(period)?;
    let (w, d1, d2) = (params.omega, params.delta1, params.delta2);
    let shift = T::two_pi() / period;
    let integrand = |k: T| {
        let (sk, ck) = k.sin_cos();
        let nu = w * sk;
        let delta = d1 * ck + d2;
        let delta_rot = delta - shift;
        let gap = nu.hypot(delta);
        let gap_rot2 = nu * nu + delta_rot * delta_rot;
        let numer = ((w * w - d1 * d1) * ck - d1 * d2 + shift * d1) * w * sk * sk;
        numer / (gap * gap_rot2)
    };
    let opts = QuadOptions {
        initial_panels: 64,
        ..quad_opts()
    };
    Ok(-integrate(integrand, T::zero(), T::PI(), opts)?.value)
}

/// Oscillatory part of the exact linear-ramp charge,
/// `-(1/2π) ∫₀^π dk ω[δ₁ + (δ₂ - 2π/T) cos k](δ̃δ + ν²) sin(Δ̃T) / (Δ Δ̃³)`.
pub fn q_os<T: Real>(params: &ModelParams<T>, period: T) -> Result<T> {
    check_period(period)?;
    let (w, d1, d2) = (params.omega, params.delta1, params.delta2);
    let shift = T::two_pi() / period;
    let integrand = |k: T| {
        let (sk, ck) = k.sin_cos();
        let nu = w * sk;
        let delta = d1 * ck + d2;
        let delta_rot = delta - shift;
        let gap = nu.hypot(delta);
        let gap_rot = nu.hypot(delta_rot);
        w * (d1 + (d2 - shift) * ck) * (delta_rot * delta + nu * nu) * (gap_rot * period).sin()
            / (gap * gap_rot * gap_rot * gap_rot)
    };
    let opts = QuadOptions {
        initial_panels: oscillation_panels(params, period),
        ..quad_opts()
    };
    Ok(-integrate(integrand, T::zero(), T::PI(), opts)?.value / T::two_pi())
}

pub fn linear_ramp_split<T: Real>(
    params: &ModelParams<T>,
    period: T,
) -> Result<LinearRampSplit<T>> {
    Ok(LinearRampSplit {
        q_st: q_st(params, period)?,
        q_os: q_os(params, period)?,
    })
}

/// APT components for the designed initial-state family (equal band
/// populations, coherence chosen so that `q_ng` vanishes).
pub fn designed_components<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    n_cycles: u32,
) -> Result<PumpComponents<T>> {
    let q_tp = q_tp(
        params,
        protocol,
        |k| band_populations(params, k, &initial_state(params, k)),
        DEFAULT_TP_LATTICE,
    )?;
    let q_ng = q_ng(params, |k| initial_state(params, k))?;
    let q_ibc = q_ibc_general(params, protocol)?;
    Ok(PumpComponents {
        q_tp,
        q_ibc,
        q_ng,
        n_cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ratio: f64) -> ModelParams<f64> {
        ModelParams::experiment(ratio).unwrap()
    }

    #[test]
    fn n_cycle_arithmetic() {
        let c = PumpComponents {
            q_tp: 0.0f64,
            q_ibc: 0.5,
            q_ng: 0.2,
            n_cycles: 3,
        };
        assert!((c.total() - 1.7).abs() < 1e-15);
        assert!((n_cycle_charge(&c, 1) - 0.7).abs() < 1e-15);
        let twice = n_cycle_charge(&c, 6) - c.q_ng;
        assert!((twice - 2.0 * (c.total() - c.q_ng)).abs() < 1e-15);
    }

    #[test]
    fn quadratic_ramp_has_no_ibc() {
        assert_eq!(
            q_ibc_general(&params(0.5), &RampProtocol::quadratic()).unwrap(),
            0.0
        );
    }

    #[test]
    fn ibc_vanishes_when_numerator_does() {
        let p = ModelParams::new(3.0, 3.0, 0.0).unwrap();
        assert_eq!(q_ibc_linear(&p).unwrap(), 0.0);
    }

    #[test]
    fn ibc_linear_equals_general() {
        for ratio in [0.0, 0.5, 1.5, 2.0] {
            let p = params(ratio);
            let a = q_ibc_linear(&p).unwrap();
            let b = q_ibc_general(&p, &RampProtocol::linear()).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn ibc_is_divergent_at_band_touching() {
        assert!(matches!(
            q_ibc_linear(&params(1.0)),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn ibc_is_linear_in_switch_on_rate() {
        let p = params(0.5);
        let base = q_ibc_linear(&p).unwrap();
        // φ(τ) = 2πτ + a sin(2πτ) has φ̇(0) = 2π(1 + a)
        let a = 0.37;
        let proto = RampProtocol::custom(
            move |t: f64| {
                2.0 * std::f64::consts::PI * t + a * (2.0 * std::f64::consts::PI * t).sin()
            },
            move |t: f64| {
                2.0 * std::f64::consts::PI * (1.0 + a * (2.0 * std::f64::consts::PI * t).cos())
            },
        )
        .unwrap();
        let scaled = q_ibc_general(&p, &proto).unwrap();
        assert!((scaled - (1.0 + a) * base).abs() < 1e-14 * base.abs());
    }

    #[test]
    fn designed_family_has_only_ibc() {
        let p = params(0.5);
        let c = designed_components(&p, &RampProtocol::linear(), 1).unwrap();
        assert!(c.q_tp.abs() < 1e-9);
        assert!(c.q_ng.abs() < 1e-10);
        assert!((c.total() - c.q_ibc).abs() < 1e-9);
    }

    #[test]
    fn diagonal_transport_vanishes_for_equal_populations() {
        let p = params(0.8);
        let r = diagonal_transport(&p, 1.0, |_| (0.5, 0.5)).unwrap();
        assert!(r.abs() < 1e-14);
        // an imbalance odd in k does not cancel
        let r = diagonal_transport(&p, 1.0, |k: f64| (0.5 + 0.1 * k.sin(), 0.5 - 0.1 * k.sin()))
            .unwrap();
        assert!(r.abs() > 1e-3);
    }

    #[test]
    fn first_order_density_has_unit_trace() {
        let p = params(0.5);
        for tau in [0.0, 0.3, 0.77, 1.0] {
            let d = first_order_density(&p, &RampProtocol::linear(), 1.1, 2.0, tau).unwrap();
            assert!((d.total().trace().re - 1.0).abs() < 1e-12);
            assert!(d.total().trace().im.abs() < 1e-12);
            assert!(d.correction.is_hermitian(1e-12));
        }
    }

    #[test]
    fn first_order_correction_decays_as_inverse_period() {
        let p = params(0.0);
        let proto = RampProtocol::linear();
        let k = std::f64::consts::FRAC_PI_2;
        let norms: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&t| {
                (0..=20)
                    .map(|i| {
                        first_order_density(&p, &proto, k, t, i as f64 / 20.0)
                            .unwrap()
                            .correction
                            .max_abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in norms.windows(2) {
            assert!((w[0] / w[1] - 10.0).abs() < 1e-6);
        }
    }

    #[test]
    fn first_order_density_rejects_band_touching() {
        let p = params(1.0);
        let r = first_order_density(&p, &RampProtocol::linear(), std::f64::consts::PI, 1.0, 0.5);
        assert!(matches!(r, Err(Error::BandTouching { .. })));
    }

    #[test]
    fn q_ng_flags_gapless_params() {
        let p = params(1.0);
        assert!(q_ng(&p, |k| initial_state(&p, k)).is_err());
    }
}
