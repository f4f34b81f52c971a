//! Two-level linear algebra: 2×2 complex operators and spinors.
//!
//! Hermitian operators are handled through their Pauli decomposition
//! `a0·I + ax·σx + ay·σy + az·σz`, which gives exponentials and norms in
//! closed form.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Bloch-space direction or Pauli coefficient triple.
pub type Vec3<T> = [T; 3];

pub fn dot3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3<T: Real>(a: Vec3<T>) -> T {
    dot3(a, a).sqrt()
}

/// A 2×2 complex matrix acting on the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperator<T> {
    pub m: [[Complex<T>; 2]; 2],
}

/// A two-component state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T>(pub [Complex<T>; 2]);

#[inline]
fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

impl<T: Real> SpinOperator<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            m: [[z, z], [z, z]],
        }
    }

    pub fn identity() -> Self {
        Self::from_pauli(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn sigma_x() -> Self {
        Self::from_pauli(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn sigma_y() -> Self {
        Self::from_pauli(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn sigma_z() -> Self {
        Self::from_pauli(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Builds the Hermitian operator `a0·I + a·σ`.
    pub fn from_pauli(a0: T, ax: T, ay: T, az: T) -> Self {
        let zero = T::zero();
        Self {
            m: [
                [c(a0 + az, zero), c(ax, -ay)],
                [c(ax, ay), c(a0 - az, zero)],
            ],
        }
    }

    /// Builds `a·σ / 2` for a real field vector `a`.
    pub fn from_field(a: Vec3<T>) -> Self {
        let h = T::lit(0.5);
        Self::from_pauli(T::zero(), h * a[0], h * a[1], h * a[2])
    }

    /// Pauli coefficients `(a0, ax, ay, az)` of the Hermitian part.
    pub fn pauli_components(&self) -> [T; 4] {
        let h = T::lit(0.5);
        let [[m00, m01], [m10, m11]] = self.m;
        [
            h * (m00.re + m11.re),
            h * (m01.re + m10.re),
            h * (m10.im - m01.im),
            h * (m00.re - m11.re),
        ]
    }

    pub fn adjoint(&self) -> Self {
        let [[m00, m01], [m10, m11]] = self.m;
        Self {
            m: [[m00.conj(), m10.conj()], [m01.conj(), m11.conj()]],
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let [[a, b], [cc, d]] = self.m;
        Self {
            m: [[f(a), f(b)], [f(cc), f(d)]],
        }
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        let [a, b] = v.0;
        Spinor([
            self.m[0][0] * a + self.m[0][1] * b,
            self.m[1][0] * a + self.m[1][1] * b,
        ])
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Deviation from hermiticity, `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Deviation from unitarity, `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        // Eigenvalues of the Hermitian A†A are (t ± sqrt(t² - 4 det)) / 2.
        let g = self.adjoint() * *self;
        let t = g.trace().re;
        let det = (g.m[0][0] * g.m[1][1] - g.m[0][1] * g.m[1][0]).re;
        let disc = (t * t - T::lit(4.0) * det).max(T::zero());
        (T::lit(0.5) * (t + disc.sqrt())).sqrt()
    }

    /// `exp(-i·H·t)` for Hermitian `H = self`, evaluated in closed form.
    pub fn exp_neg_i(&self, t: T) -> Self {
        let [a0, ax, ay, az] = self.pauli_components();
        exp_neg_i_pauli(a0 * t, [ax * t, ay * t, az * t])
    }

    /// `U† · self · U`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.adjoint() * *self * *u
    }

    /// `tr(self · op)`.
    pub fn trace_product(&self, op: &Self) -> Complex<T> {
        let a = &self.m;
        let b = &op.m;
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }
}

/// `exp(-i (phase·I + θ·σ))`.
pub fn exp_neg_i_pauli<T: Real>(phase: T, theta: Vec3<T>) -> SpinOperator<T> {
    let angle = norm3(theta);
    let (s, cs) = angle.sin_cos();
    // sin(angle)/angle with the removable singularity at zero
    let sinc = if angle > T::lit(1e-8) {
        s / angle
    } else {
        T::one() - angle * angle / T::lit(6.0)
    };
    let zero = T::zero();
    let (nx, ny, nz) = (theta[0] * sinc, theta[1] * sinc, theta[2] * sinc);
    let core = SpinOperator {
        m: [[c(cs, -nz), c(-ny, -nx)], [c(ny, -nx), c(cs, nz)]],
    };
    if phase == zero {
        core
    } else {
        let (ps, pc) = phase.sin_cos();
        core.scale_complex(c(pc, -ps))
    }
}

/// `exp(-i φ σz / 2)`, the rotation about z by angle φ.
pub fn z_rotation<T: Real>(phi: T) -> SpinOperator<T> {
    let (s, cs) = (T::lit(0.5) * phi).sin_cos();
    let zero = c(T::zero(), T::zero());
    SpinOperator {
        m: [[c(cs, -s), zero], [zero, c(cs, s)]],
    }
}

impl<T: Real> Add for SpinOperator<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = *z + o.m[i][j];
            }
        }
        Self { m }
    }
}

impl<T: Real> Sub for SpinOperator<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for SpinOperator<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for SpinOperator<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }
}

impl<T: Real> Spinor<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Self {
        Self([a, b])
    }

    pub fn up() -> Self {
        Self([c(T::one(), T::zero()), c(T::zero(), T::zero())])
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> T {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> SpinOperator<T> {
        let a = self.0;
        let b = other.0;
        SpinOperator {
            m: [
                [a[0] * b[0].conj(), a[0] * b[1].conj()],
                [a[1] * b[0].conj(), a[1] * b[1].conj()],
            ],
        }
    }

    /// Bloch vector of the normalized state.
    pub fn bloch(&self) -> Vec3<T> {
        let rho = self.outer(self);
        bloch_of(&rho)
    }
}

/// Bloch vector `n` of `ρ = (1 + n·σ)/2` (ρ normalised to unit trace).
pub fn bloch_of<T: Real>(rho: &SpinOperator<T>) -> Vec3<T> {
    let two = T::lit(2.0);
    let r01 = rho.m[0][1];
    [two * r01.re, -two * r01.im, rho.m[0][0].re - rho.m[1][1].re]
}
