//! Quadrature: composite Simpson on uniform samples and adaptive
//! Gauss–Kronrod (7/15) for smooth or near-singular integrands.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Composite Simpson rule on uniformly spaced samples.
///
/// `values` must hold an odd number (≥ 3) of samples spaced by `h`.
pub fn simpson<T: Real>(values: &[T], h: T) -> Result<T> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "Simpson rule needs an odd number of samples (at least 3), got {n}"
        )));
    }
    let mut odd = T::zero();
    let mut even = T::zero();
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd = odd + v;
        } else {
            even = even + v;
        }
    }
    let sum = values[0] + values[n - 1] + T::lit(4.0) * odd + T::lit(2.0) * even;
    Ok(sum * h / T::lit(3.0))
}

/// Checks that `points` are uniformly spaced and returns the spacing.
pub fn uniform_spacing<T: Real>(points: &[T]) -> Result<T> {
    if points.len() < 2 {
        return Err(Error::InvalidGrid("fewer than two sample points".into()));
    }
    let n = points.len() - 1;
    let h = (points[n] - points[0]) / T::from_usize_lossy(n);
    if !(h > T::zero()) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    let tol = (T::lit(1e-9) + T::epsilon() * T::from_usize_lossy(8 * points.len())) * h;
    for (i, &p) in points.iter().enumerate() {
        let expected = points[0] + h * T::from_usize_lossy(i);
        if (p - expected).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "grid is not uniform at index {i}"
            )));
        }
    }
    Ok(h)
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the number of interval bisections.
    pub max_subdivisions: usize,
    /// Number of equal panels the interval is split into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            max_subdivisions: 20_000,
            initial_panels: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

// Kronrod 15-point abscissae on [0, 1] (symmetric), with Kronrod and
// embedded Gauss 7-point weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half_len;
    let err = ((kron - gauss) * half_len).abs();
    (value, err)
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the total
/// error satisfies `max(abs_tol, rel_tol·|I|)`; hitting the subdivision cap
/// yields [`Error::NonConvergence`].
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    opts: QuadOptions,
) -> Result<QuadEstimate<T>> {
    if a == b {
        return Ok(QuadEstimate {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / T::from_usize_lossy(n0);
    let mut panels: Vec<Panel<T>> = (0..n0)
        .map(|i| {
            let pa = a + width * T::from_usize_lossy(i);
            let pb = if i + 1 == n0 { b } else { pa + width };
            let (value, error) = kronrod15(&f, pa, pb);
            Panel {
                a: pa,
                b: pb,
                value,
                error,
            }
        })
        .collect();
    let mut evaluations = 15 * n0;
    let rel = T::lit(opts.rel_tol);
    let abs = T::lit(opts.abs_tol);

    for subdivisions in 0..=opts.max_subdivisions {
        let (value, error) = panels.iter().fold((T::zero(), T::zero()), |(v, e), p| {
            (v + p.value, e + p.error)
        });
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                error: f64::INFINITY,
                subdivisions,
            });
        }
        if error <= abs.max(rel * value.abs()) {
            return Ok(QuadEstimate {
                value,
                error,
                evaluations,
            });
        }
        if subdivisions == opts.max_subdivisions {
            return Err(Error::NonConvergence {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval collapsed to machine resolution
            return Err(Error::NonConvergence {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions,
            });
        }
        let (lv, le) = kronrod15(&f, p.a, mid);
        let (rv, re) = kronrod15(&f, mid, p.b);
        evaluations += 30;
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: rv,
            error: re,
        });
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_exact_on_cubics() {
        let h = 0.25;
        let vals: Vec<f64> = (0..9)
            .map(|i| {
                let x = i as f64 * h;
                x * x * x - 2.0 * x + 1.0
            })
            .collect();
        // ∫_0^2 x³ - 2x + 1 dx = 4 - 4 + 2
        assert!((simpson(&vals, h).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_exact_on_constants() {
        let vals = vec![-3.5f64; 101];
        assert!((simpson(&vals, 0.01).unwrap() + 3.5).abs() < 1e-14);
    }

    #[test]
    fn simpson_rejects_even_counts() {
        assert!(matches!(
            simpson(&[1.0, 2.0], 0.1),
            Err(Error::InvalidGrid(_))
        ));
        assert!(simpson(&[1.0; 10], 0.1).is_err());
    }

    #[test]
    fn uniform_spacing_detects_irregular_grid() {
        assert!(uniform_spacing(&[0.0, 0.1, 0.2]).is_ok());
        assert!(uniform_spacing(&[0.0, 0.1, 0.25]).is_err());
    }

    #[test]
    fn kronrod_integrates_smooth_and_peaked() {
        let r = integrate(|x: f64| x.sin(), 0.0, PI, QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        // ∫_0^1 eps / (x² + eps²) = atan(1/eps)
        let eps = 1e-4;
        let r = integrate(
            |x: f64| eps / (x * x + eps * eps),
            0.0,
            1.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - (1.0 / eps).atan()).abs() < 1e-8);
    }

    #[test]
    fn kronrod_reports_nonintegrable() {
        let r = integrate(
            |x: f64| 1.0 / x,
            0.0,
            1.0,
            QuadOptions {
                max_subdivisions: 500,
                ..QuadOptions::default()
            },
        );
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
