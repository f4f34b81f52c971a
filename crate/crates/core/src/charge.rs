//! Pumped charge from exact dynamics: `q(k) = T ∫₀¹ ⟨v(k,τ)⟩ dτ` by Simpson
//! integration over τ, and `Q = ∫ q(k) dk / π` over half the Brillouin zone
//! by piecewise-uniform Simpson integration in k.

use rayon::prelude::*;

use crate::dynamics::{propagate, uniform_tau_grid, PropagationConfig};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ProtocolKind, RampProtocol};
use crate::quad::{simpson, uniform_spacing};
use crate::scalar::Real;

/// τ spacing used in the experiment, in μs.
pub const EXPERIMENT_TAU_STEP: f64 = 0.01;

/// How the cycle is sampled for the τ integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSpacing<T> {
    /// Real-time step in μs; must divide the cycle into an even number of
    /// intervals.
    Step(T),
    /// Even number of uniform intervals on `[0, 1]`.
    Intervals(usize),
}

/// τ sampling plus the propagator used between samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSampling<T> {
    pub spacing: TauSpacing<T>,
    pub propagation: PropagationConfig,
}

impl<T: Real> TauSampling<T> {
    /// 10 ns sampling with the default propagator.
    pub fn experiment() -> Self {
        Self {
            spacing: TauSpacing::Step(T::lit(EXPERIMENT_TAU_STEP)),
            propagation: PropagationConfig::default(),
        }
    }

    pub fn intervals(n: usize, propagation: PropagationConfig) -> Self {
        Self {
            spacing: TauSpacing::Intervals(n),
            propagation,
        }
    }

    pub fn step(step_us: T, propagation: PropagationConfig) -> Self {
        Self {
            spacing: TauSpacing::Step(step_us),
            propagation,
        }
    }

    /// Number of τ intervals for a cycle of duration `period`.
    pub fn n_intervals(&self, period: T) -> Result<usize> {
        let n = match self.spacing {
            TauSpacing::Intervals(n) => n,
            TauSpacing::Step(step) => {
                if !(step > T::zero()) || !step.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "tau step must be positive, got {step}"
                    )));
                }
                let ratio = period / step;
                let n = ratio.round();
                if n < T::one() || (ratio - n).abs() > T::lit(1e-6) * n {
                    return Err(Error::InvalidGrid(format!(
                        "tau step {step} does not divide T = {period} into whole intervals"
                    )));
                }
                n.to_f64_lossy() as usize
            }
        };
        if n < 2 || n % 2 == 1 {
            return Err(Error::InvalidGrid(format!(
                "Simpson rule needs an even number of tau intervals, got {n}"
            )));
        }
        Ok(n)
    }

    pub fn grid(&self, period: T) -> Result<Vec<T>> {
        Ok(uniform_tau_grid(self.n_intervals(period)?))
    }

    /// Same spacing with twice as many intervals.
    pub fn refined(&self, period: T) -> Result<Self> {
        Ok(Self {
            spacing: TauSpacing::Intervals(2 * self.n_intervals(period)?),
            propagation: self.propagation,
        })
    }
}

/// `q(k)` on an explicit τ grid (uniform, odd number of points).
pub fn q_of_k_on_grid<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    tau_grid: &[T],
    propagation: &PropagationConfig,
) -> Result<T> {
    let h = uniform_spacing(tau_grid)?;
    if tau_grid.len().is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "Simpson rule needs an odd number of tau points, got {}",
            tau_grid.len()
        )));
    }
    let traj = propagate(params, protocol, k, period, tau_grid, propagation)?;
    let v: Vec<T> = traj.samples.iter().map(|s| s.v_expect).collect();
    Ok(period * simpson(&v, h)?)
}

/// Charge density `q(k) = T ∫₀¹ ⟨v(k,τ)⟩ dτ`.
pub fn q_of_k<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    k: T,
    period: T,
    sampling: &TauSampling<T>,
) -> Result<T> {
    let grid = sampling.grid(period)?;
    q_of_k_on_grid(params, protocol, k, period, &grid, &sampling.propagation)
}

/// One uniform Simpson segment of a k grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSegment<T> {
    pub start: T,
    pub end: T,
    /// Even number of intervals.
    pub intervals: usize,
}

impl<T: Real> KSegment<T> {
    pub fn points(&self) -> Vec<T> {
        let n = T::from_usize_lossy(self.intervals);
        (0..=self.intervals)
            .map(|i| {
                if i == self.intervals {
                    self.end
                } else {
                    self.start + (self.end - self.start) * T::from_usize_lossy(i) / n
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> T {
        (self.end - self.start) / T::from_usize_lossy(self.intervals)
    }
}

/// Piecewise-uniform k grid covering `[0, π]` or `[-π, π]`, integrated
/// segment by segment with the composite Simpson rule.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid<T> {
    segments: Vec<KSegment<T>>,
}

impl<T: Real> KGrid<T> {
    pub fn new(segments: Vec<KSegment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidGrid("k grid has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.intervals < 2 || s.intervals % 2 == 1 {
                return Err(Error::InvalidGrid(format!(
                    "k segment {i} has {} intervals; Simpson needs an even count",
                    s.intervals
                )));
            }
            if !(s.end > s.start) {
                return Err(Error::InvalidGrid(format!(
                    "k segment {i} is empty or reversed"
                )));
            }
            if i > 0 && segments[i - 1].end != s.start {
                return Err(Error::InvalidGrid(format!(
                    "k segment {i} does not start where segment {} ends",
                    i - 1
                )));
            }
        }
        let grid = Self { segments };
        grid.measure()?;
        Ok(grid)
    }

    /// The experiment's scheme: spacing π/18 on `[0, 8π/9]` and π/90 on
    /// `[8π/9, π]`.
    pub fn experiment() -> Self {
        Self::two_segment(16, 10)
    }

    /// Uniform Simpson segments of `coarse` intervals on `[0, 8π/9]` and
    /// `fine` intervals on `[8π/9, π]`.
    pub fn two_segment(coarse: usize, fine: usize) -> Self {
        let stitch = T::PI() * T::lit(8.0) / T::lit(9.0);
        Self {
            segments: vec![
                KSegment {
                    start: T::zero(),
                    end: stitch,
                    intervals: coarse,
                },
                KSegment {
                    start: stitch,
                    end: T::PI(),
                    intervals: fine,
                },
            ],
        }
    }

    /// `n` uniform intervals on `[0, π]`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![KSegment {
            start: T::zero(),
            end: T::PI(),
            intervals: n,
        }])
    }

    /// `n` uniform intervals on the full zone `[-π, π]`.
    pub fn full_zone(n: usize) -> Result<Self> {
        Self::new(vec![KSegment {
            start: -T::PI(),
            end: T::PI(),
            intervals: n,
        }])
    }

    pub fn segments(&self) -> &[KSegment<T>] {
        &self.segments
    }

    /// Every segment with twice the intervals.
    pub fn refined(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| KSegment {
                    intervals: 2 * s.intervals,
                    ..*s
                })
                .collect(),
        }
    }

    /// Length of the covered interval, π or 2π.
    pub fn measure(&self) -> Result<T> {
        let lo = self.segments[0].start;
        let hi = self.segments[self.segments.len() - 1].end;
        let tol = T::lit(1e-12);
        if (hi - T::PI()).abs() > tol || !(lo.abs() <= tol || (lo + T::PI()).abs() <= tol) {
            return Err(Error::InvalidGrid(format!(
                "k grid must cover [0, pi] or [-pi, pi], got [{lo}, {hi}]"
            )));
        }
        Ok(hi - lo)
    }

    /// Distinct grid points in increasing order (stitch points once).
    pub fn points(&self) -> Vec<T> {
        let mut out = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            let pts = s.points();
            out.extend(pts.into_iter().skip(usize::from(i > 0)));
        }
        out
    }

    /// `∫ f dk / measure` from samples at [`KGrid::points`].
    pub fn integrate_samples(&self, values: &[T]) -> Result<T> {
        let mut offset = 0;
        let mut total = T::zero();
        for s in &self.segments {
            let seg = values
                .get(offset..=offset + s.intervals)
                .ok_or_else(|| Error::InvalidGrid("too few samples for k grid".into()))?;
            total = total + simpson(seg, s.spacing())?;
            offset += s.intervals;
        }
        if offset + 1 != values.len() {
            return Err(Error::InvalidGrid(
                "sample count does not match k grid".into(),
            ));
        }
        Ok(total / self.measure()?)
    }
}

/// Charge profile and its integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeProfile<T> {
    pub k: Vec<T>,
    pub q: Vec<T>,
    pub total: T,
}

/// `q(k)` at every point of `k_grid` (concurrently) and `Q = ∫q dk / measure`.
pub fn charge_profile<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    period: T,
    k_grid: &KGrid<T>,
    sampling: &TauSampling<T>,
) -> Result<ChargeProfile<T>> {
    let tau_grid = sampling.grid(period)?;
    let ks = k_grid.points();
    let q = ks
        .par_iter()
        .map(|&k| {
            q_of_k_on_grid(
                params,
                protocol,
                k,
                period,
                &tau_grid,
                &sampling.propagation,
            )
        })
        .collect::<Result<Vec<T>>>()?;
    let total = k_grid.integrate_samples(&q)?;
    Ok(ChargeProfile { k: ks, q, total })
}

/// Pumped charge per cycle `Q`.
pub fn total_charge<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    period: T,
    k_grid: &KGrid<T>,
    sampling: &TauSampling<T>,
) -> Result<T> {
    Ok(charge_profile(params, protocol, period, k_grid, sampling)?.total)
}

/// Map of `⟨v⟩/‖v‖` over a k × τ grid, stored row-major in k.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityMap<T> {
    pub k: Vec<T>,
    pub tau: Vec<T>,
    pub values: Vec<Vec<T>>,
}

impl<T: Real> VelocityMap<T> {
    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .flatten()
            .fold(T::zero(), |m, &v| m.max(v.abs()))
    }
}

pub fn velocity_map<T: Real>(
    params: &ModelParams<T>,
    protocol: &RampProtocol<T>,
    period: T,
    ks: &[T],
    tau_grid: &[T],
    propagation: &PropagationConfig,
) -> Result<VelocityMap<T>> {
    if ks.is_empty() || tau_grid.is_empty() {
        return Err(Error::InvalidGrid(
            "velocity map needs non-empty k and tau grids".into(),
        ));
    }
    let values = ks
        .par_iter()
        .map(|&k| {
            let traj = propagate(params, protocol, k, period, tau_grid, propagation)?;
            Ok(traj.samples.iter().map(|s| s.v_normalized()).collect())
        })
        .collect::<Result<Vec<Vec<T>>>>()?;
    let map = VelocityMap {
        k: ks.to_vec(),
        tau: tau_grid.to_vec(),
        values,
    };
    debug_assert!(map.max_abs() <= T::one() + T::lit(1e-9));
    Ok(map)
}

/// One ramp and cycle duration within a sweep.
#[derive(Clone)]
pub struct SweepCurve<T> {
    pub protocol: RampProtocol<T>,
    pub period: T,
}

impl<T: Real> SweepCurve<T> {
    pub fn new(protocol: RampProtocol<T>, period: T) -> Self {
        Self { protocol, period }
    }

    /// Every protocol paired with every period.
    pub fn product(protocols: &[RampProtocol<T>], periods: &[T]) -> Vec<Self> {
        protocols
            .iter()
            .flat_map(|p| periods.iter().map(move |&t| Self::new(p.clone(), t)))
            .collect()
    }
}

/// Integration settings shared by all rows of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions<T> {
    pub k_grid: KGrid<T>,
    pub sampling: TauSampling<T>,
    pub keep_profiles: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub protocol: ProtocolKind,
    pub period: T,
    pub ratio: T,
    pub q: T,
    pub profile: Option<ChargeProfile<T>>,
}

/// Rows ordered by `(protocol, T, δ₂/δ₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepResult<T> {
    /// Distinct `(protocol, T)` pairs in table order.
    pub fn curves(&self) -> Vec<(ProtocolKind, T)> {
        let mut out: Vec<(ProtocolKind, T)> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|&(p, t)| p == r.protocol && t == r.period) {
                out.push((r.protocol, r.period));
            }
        }
        out
    }

    /// `(δ₂/δ₁, Q)` points of one curve.
    pub fn curve(&self, protocol: ProtocolKind, period: T) -> Vec<(T, T)> {
        self.rows
            .iter()
            .filter(|r| r.protocol == protocol && r.period == period)
            .map(|r| (r.ratio, r.q))
            .collect()
    }

    /// [`peak_finder`] applied to every curve.
    pub fn peaks(&self) -> Result<Vec<(ProtocolKind, T, Peak<T>)>> {
        self.curves()
            .into_iter()
            .map(|(p, t)| Ok((p, t, peak_finder(&self.curve(p, t))?)))
            .collect()
    }
}

fn protocol_rank(kind: ProtocolKind) -> u8 {
    match kind {
        ProtocolKind::Linear => 0,
        ProtocolKind::Quadratic => 1,
        ProtocolKind::Custom => 2,
    }
}

/// Computes `Q` for every curve at every `δ₂/δ₁` in `ratios`, holding `ω`
/// and `δ₁` of `base` fixed. Rows evaluate concurrently; the table is sorted
/// by `(protocol, T, δ₂/δ₁)` and does not depend on scheduling.
pub fn sweep<T: Real>(
    base: &ModelParams<T>,
    curves: &[SweepCurve<T>],
    ratios: &[T],
    options: &SweepOptions<T>,
) -> Result<SweepResult<T>> {
    if curves.is_empty() || ratios.is_empty() {
        return Err(Error::InvalidGrid(
            "sweep needs at least one curve and one ratio".into(),
        ));
    }
    let mut jobs: Vec<(usize, T)> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        if !c.period.is_finite() || !(c.period > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "non-positive or non-finite T = {}",
                c.period
            )));
        }
        for &r in ratios {
            if !r.is_finite() {
                return Err(Error::InvalidGrid(
                    "non-finite delta2/delta1 in sweep".into(),
                ));
            }
            jobs.push((ci, r));
        }
    }
    jobs.sort_by(|a, b| {
        let (ca, cb) = (&curves[a.0], &curves[b.0]);
        protocol_rank(ca.protocol.kind())
            .cmp(&protocol_rank(cb.protocol.kind()))
            .then(ca.period.partial_cmp(&cb.period).unwrap())
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    for w in jobs.windows(2) {
        let (ca, cb) = (&curves[w[0].0], &curves[w[1].0]);
        if ca.protocol.kind() == cb.protocol.kind() && ca.period == cb.period && w[0].1 == w[1].1 {
            return Err(Error::DuplicateRow {
                protocol: ca.protocol.kind().to_string(),
                period: ca.period.to_f64_lossy(),
                ratio: w[0].1.to_f64_lossy(),
            });
        }
    }

    let rows = jobs
        .par_iter()
        .map(|&(ci, ratio)| {
            let c = &curves[ci];
            let fail = |e: Error| Error::RowFailed {
                protocol: c.protocol.kind().to_string(),
                period: c.period.to_f64_lossy(),
                ratio: ratio.to_f64_lossy(),
                source: Box::new(e),
            };
            let params = base.with_ratio(ratio).map_err(fail)?;
            let profile = charge_profile(
                &params,
                &c.protocol,
                c.period,
                &options.k_grid,
                &options.sampling,
            )
            .map_err(fail)?;
            Ok(SweepRow {
                protocol: c.protocol.kind(),
                period: c.period,
                ratio,
                q: profile.total,
                profile: options.keep_profiles.then_some(profile),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// Location and height of the maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    /// Refined abscissa of the maximum.
    pub x: T,
    /// Refined maximum.
    pub value: T,
    /// Index of the largest sample.
    pub index: usize,
    /// The largest sample sits at an end of the grid, so no refinement was
    /// possible and the true maximum may lie outside.
    pub at_boundary: bool,
}

/// Argmax of `(x, y)` samples (sorted by `x`) refined by the parabola
/// through the maximum and its two neighbours.
pub fn peak_finder<T: Real>(points: &[(T, T)]) -> Result<Peak<T>> {
    if points.len() < 3 {
        return Err(Error::InvalidGrid(
            "peak search needs at least three points".into(),
        ));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidGrid(
            "peak search needs strictly increasing abscissae".into(),
        ));
    }
    let mut index = 0;
    for (i, p) in points.iter().enumerate() {
        if p.1 > points[index].1 {
            index = i;
        }
    }
    let (x1, y1) = points[index];
    if index == 0 || index == points.len() - 1 {
        return Ok(Peak {
            x: x1,
            value: y1,
            index,
            at_boundary: true,
        });
    }
    let (x0, y0) = points[index - 1];
    let (x2, y2) = points[index + 1];
    // vertex of the interpolating parabola
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if !(curv < T::zero()) {
        return Ok(Peak {
            x: x1,
            value: y1,
            index,
            at_boundary: false,
        });
    }
    let x = (x0 + x1) / T::lit(2.0) - d0 / (T::lit(2.0) * curv);
    let value = y1 + (x - x1) * (d0 + curv * (x - x0));
    Ok(Peak {
        x,
        value,
        index,
        at_boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(ratio: f64) -> ModelParams<f64> {
        ModelParams::experiment(ratio).unwrap()
    }

    #[test]
    fn experiment_tau_grid() {
        let s = TauSampling::<f64>::experiment();
        assert_eq!(s.n_intervals(1.0).unwrap(), 100);
        assert_eq!(s.n_intervals(0.5).unwrap(), 50);
        assert!(s.n_intervals(0.25).is_err());
        assert!(s.n_intervals(0.333).is_err());
        assert!(
            TauSampling::<f64>::intervals(7, PropagationConfig::default())
                .n_intervals(1.0)
                .is_err()
        );
    }

    #[test]
    fn rejects_bad_tau_grids() {
        let p = params(0.5);
        let proto = RampProtocol::linear();
        let cfg = PropagationConfig::default();
        let even: Vec<f64> = uniform_tau_grid(3);
        assert!(q_of_k_on_grid(&p, &proto, 1.0, 1.0, &even, &cfg).is_err());
        let ragged = [0.0, 0.1, 0.5, 0.6, 1.0];
        assert!(q_of_k_on_grid(&p, &proto, 1.0, 1.0, &ragged, &cfg).is_err());
    }

    #[test]
    fn experiment_k_grid() {
        let g = KGrid::<f64>::experiment();
        let pts = g.points();
        assert_eq!(pts.len(), 27);
        assert!((pts[1] - PI / 18.0).abs() < 1e-15);
        assert!((pts[16] - 8.0 * PI / 9.0).abs() < 1e-15);
        assert!((pts[17] - pts[16] - PI / 90.0).abs() < 1e-14);
        assert_eq!(pts[26], PI);
        // stitched Simpson is exact on cubics
        let vals: Vec<f64> = pts.iter().map(|k| k * k * k - 2.0 * k).collect();
        let exact = (PI.powi(4) / 4.0 - PI * PI) / PI;
        assert!((g.integrate_samples(&vals).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn k_grid_validation() {
        assert!(KGrid::<f64>::uniform(5).is_err());
        assert!(KGrid::new(vec![KSegment {
            start: 0.0,
            end: 2.0,
            intervals: 4
        }])
        .is_err());
        assert!(KGrid::new(vec![
            KSegment {
                start: 0.0,
                end: 1.0,
                intervals: 4
            },
            KSegment {
                start: 1.5,
                end: PI,
                intervals: 4
            },
        ])
        .is_err());
        assert_eq!(
            KGrid::<f64>::full_zone(8).unwrap().measure().unwrap(),
            2.0 * PI
        );
    }

    #[test]
    fn simpson_on_constant_samples() {
        let c = -PI * 10.0;
        let v = vec![c; 101];
        assert!((1.0 * simpson(&v, 0.01).unwrap() - c).abs() < 1e-13);
    }

    #[test]
    fn peak_finder_recovers_parabola_vertex() {
        let pts: Vec<(f64, f64)> = (0..21)
            .map(|i| {
                let x = i as f64 * 0.1;
                (x, 3.0 - 2.0 * (x - 1.234).powi(2))
            })
            .collect();
        let pk = peak_finder(&pts).unwrap();
        assert!((pk.x - 1.234).abs() < 1e-12);
        assert!((pk.value - 3.0).abs() < 1e-12);
        assert!(!pk.at_boundary);
    }

    #[test]
    fn peak_finder_nonuniform_and_boundary() {
        let f = |x: f64| -(x - 0.37).powi(2);
        let xs = [0.0, 0.1, 0.3, 0.45, 0.9];
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f(x))).collect();
        assert!((peak_finder(&pts).unwrap().x - 0.37).abs() < 1e-12);
        let rising: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x)).collect();
        let pk = peak_finder(&rising).unwrap();
        assert!(pk.at_boundary);
        assert_eq!(pk.index, 4);
        assert!(peak_finder(&rising[..2]).is_err());
    }

    fn quick_options() -> SweepOptions<f64> {
        SweepOptions {
            k_grid: KGrid::experiment(),
            sampling: TauSampling::step(0.01, PropagationConfig::midpoint(1000)),
            keep_profiles: false,
        }
    }

    #[test]
    fn single_row_sweep_matches_total_charge() {
        let base = params(0.0);
        let opts = quick_options();
        let curves = [SweepCurve::new(RampProtocol::linear(), 1.0)];
        let res = sweep(&base, &curves, &[0.7], &opts).unwrap();
        let direct = total_charge(
            &params(0.7),
            &RampProtocol::linear(),
            1.0,
            &opts.k_grid,
            &opts.sampling,
        )
        .unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].q, direct);
    }

    #[test]
    fn sweep_rejects_duplicates() {
        let base = params(0.0);
        let curves = [SweepCurve::new(RampProtocol::linear(), 1.0)];
        let err = sweep(&base, &curves, &[0.5, 0.2, 0.5], &quick_options()).unwrap_err();
        assert!(matches!(err, Error::DuplicateRow { .. }));
    }

    #[test]
    fn sweep_rows_are_ordered() {
        let base = params(0.0);
        let curves = vec![
            SweepCurve::new(RampProtocol::quadratic(), 1.0),
            SweepCurve::new(RampProtocol::linear(), 1.0),
            SweepCurve::new(RampProtocol::linear(), 0.5),
        ];
        let mut opts = quick_options();
        opts.k_grid = KGrid::uniform(4).unwrap();
        let res = sweep(&base, &curves, &[0.4, 0.0], &opts).unwrap();
        let keys: Vec<(ProtocolKind, f64, f64)> = res
            .rows
            .iter()
            .map(|r| (r.protocol, r.period, r.ratio))
            .collect();
        assert_eq!(
            keys,
            vec![
                (ProtocolKind::Linear, 0.5, 0.0),
                (ProtocolKind::Linear, 0.5, 0.4),
                (ProtocolKind::Linear, 1.0, 0.0),
                (ProtocolKind::Linear, 1.0, 0.4),
                (ProtocolKind::Quadratic, 1.0, 0.0),
                (ProtocolKind::Quadratic, 1.0, 0.4),
            ]
        );
    }

    #[test]
    fn failing_row_is_identified() {
        let base = params(0.0);
        let mut opts = quick_options();
        opts.sampling = TauSampling::step(0.03, PropagationConfig::default());
        let curves = [SweepCurve::new(RampProtocol::linear(), 1.0)];
        match sweep(&base, &curves, &[0.3], &opts).unwrap_err() {
            Error::RowFailed { ratio, period, .. } => {
                assert_eq!(ratio, 0.3);
                assert_eq!(period, 1.0);
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn velocity_map_is_normalized() {
        let p = params(1.0);
        let ks: Vec<f64> = (0..7).map(|i| i as f64 * PI / 6.0).collect();
        let taus = uniform_tau_grid(20);
        let map = velocity_map(
            &p,
            &RampProtocol::linear(),
            1.0,
            &ks,
            &taus,
            &PropagationConfig::midpoint(2000),
        )
        .unwrap();
        assert_eq!(map.values.len(), 7);
        assert_eq!(map.values[0].len(), 21);
        assert!(map.max_abs() <= 1.0 + 1e-9);
        assert!(velocity_map(
            &p,
            &RampProtocol::linear(),
            1.0,
            &[],
            &taus,
            &PropagationConfig::default()
        )
        .is_err());
    }
}
