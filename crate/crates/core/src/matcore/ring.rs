//! Exact arithmetic in the ring `Z[ω, 1/√2]`, `ω = exp(iπ/4)`.
//!
//! Every entry of a product of `H, X, Z, T, S, S†` lies in this ring, so
//! sequence matrices can be compared for exact equality instead of through
//! a floating-point tolerance.
//!
//! A scalar is stored as `(a0 + a1 ω + a2 ω² + a3 ω³) / √2^k`.
//!
//! Canonical form: `k` is the smallest non-negative exponent for which the
//! numerator has integer coefficients. The numerator is divisible by `√2`
//! in `Z[ω]` exactly when `a0 ≡ a2` and `a1 ≡ a3 (mod 2)`; the quotient is
//! `x (ω - ω³) / 2`. Reduction runs after every operation, and zero is
//! always stored with `k = 0`. Two canonical values are equal iff their
//! fields are equal.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Powers `ω^0..ω^3` as floats.
const OMEGA_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(0.0, 1.0),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingScalar {
    coeffs: [i128; 4],
    k: u32,
}

impl RingScalar {
    pub const ZERO: RingScalar = RingScalar {
        coeffs: [0; 4],
        k: 0,
    };
    pub const ONE: RingScalar = RingScalar {
        coeffs: [1, 0, 0, 0],
        k: 0,
    };

    /// Builds `(a0 + a1 ω + a2 ω² + a3 ω³) / √2^k` in canonical form.
    pub fn new(coeffs: [i128; 4], k: u32) -> Result<Self> {
        RingScalar { coeffs, k }.reduced()
    }

    /// `ω^n`, any integer `n`.
    pub fn omega_pow(n: i64) -> Self {
        let n = n.rem_euclid(8) as usize;
        let mut coeffs = [0i128; 4];
        if n < 4 {
            coeffs[n] = 1;
        } else {
            coeffs[n - 4] = -1;
        }
        RingScalar { coeffs, k: 0 }
    }

    /// `1/√2`.
    pub fn inv_sqrt2() -> Self {
        RingScalar {
            coeffs: [1, 0, 0, 0],
            k: 1,
        }
    }

    pub fn coeffs(&self) -> [i128; 4] {
        self.coeffs
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0; 4]
    }

    fn reduced(mut self) -> Result<Self> {
        if self.is_zero() {
            self.k = 0;
            return Ok(self);
        }
        while self.k > 0 && divisible_by_sqrt2(&self.coeffs) {
            self.coeffs = div_sqrt2(&self.coeffs)?;
            self.k -= 1;
        }
        Ok(self)
    }

    /// Numerator rescaled to denominator `√2^k` with `k >= self.k`.
    fn numerator_at(&self, k: u32) -> Result<[i128; 4]> {
        let mut c = self.coeffs;
        for _ in self.k..k {
            c = mul_sqrt2(&c)?;
        }
        Ok(c)
    }

    pub fn checked_add(&self, rhs: &RingScalar) -> Result<Self> {
        let k = self.k.max(rhs.k);
        let a = self.numerator_at(k)?;
        let b = rhs.numerator_at(k)?;
        let mut c = [0i128; 4];
        for i in 0..4 {
            c[i] = a[i].checked_add(b[i]).ok_or(Error::Overflow)?;
        }
        RingScalar { coeffs: c, k }.reduced()
    }

    pub fn checked_sub(&self, rhs: &RingScalar) -> Result<Self> {
        self.checked_add(&rhs.neg())
    }

    pub fn checked_mul(&self, rhs: &RingScalar) -> Result<Self> {
        let a = &self.coeffs;
        let b = &rhs.coeffs;
        let mut c = [0i128; 4];
        for i in 0..4 {
            for j in 0..4 {
                let term = a[i].checked_mul(b[j]).ok_or(Error::Overflow)?;
                let slot = (i + j) % 4;
                c[slot] = if i + j < 4 {
                    c[slot].checked_add(term)
                } else {
                    // ω^4 = -1
                    c[slot].checked_sub(term)
                }
                .ok_or(Error::Overflow)?;
            }
        }
        let k = self.k.checked_add(rhs.k).ok_or(Error::Overflow)?;
        RingScalar { coeffs: c, k }.reduced()
    }

    pub fn neg(&self) -> Self {
        RingScalar {
            coeffs: self.coeffs.map(|x| -x),
            k: self.k,
        }
    }

    /// Complex conjugate: `ω* = -ω³`.
    pub fn conj(&self) -> Self {
        let [a0, a1, a2, a3] = self.coeffs;
        RingScalar {
            coeffs: [a0, -a3, -a2, -a1],
            k: self.k,
        }
    }

    /// Multiplies by `ω^n` (exact, never changes `k`).
    pub fn mul_omega_pow(&self, n: i64) -> Self {
        let mut c = self.coeffs;
        for _ in 0..n.rem_euclid(8) {
            c = mul_omega(&c);
        }
        RingScalar { coeffs: c, k: self.k }
    }

    pub fn to_complex(&self) -> Complex64 {
        let num = self
            .coeffs
            .iter()
            .zip(OMEGA_POWERS.iter())
            .fold(Complex64::new(0.0, 0.0), |acc, (&a, w)| acc + w * a as f64);
        num * FRAC_1_SQRT_2.powi(self.k as i32)
    }
}

impl fmt::Display for RingScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2, a3] = self.coeffs;
        write!(f, "({a0} + {a1}ω + {a2}ω² + {a3}ω³)/√2^{}", self.k)
    }
}

pub(crate) fn divisible_by_sqrt2<T>(c: &[T; 4]) -> bool
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Rem<Output = T> + PartialEq + From<i8>,
{
    (c[0] - c[2]) % T::from(2) == T::from(0) && (c[1] - c[3]) % T::from(2) == T::from(0)
}

fn mul_omega(c: &[i128; 4]) -> [i128; 4] {
    [-c[3], c[0], c[1], c[2]]
}

/// `x · √2 = x (ω - ω³)`.
fn mul_sqrt2(c: &[i128; 4]) -> Result<[i128; 4]> {
    let [a0, a1, a2, a3] = *c;
    let f = |x: i128, y: i128| x.checked_sub(y).ok_or(Error::Overflow);
    let g = |x: i128, y: i128| x.checked_add(y).ok_or(Error::Overflow);
    Ok([f(a1, a3)?, g(a0, a2)?, g(a1, a3)?, f(a2, a0)?])
}

fn div_sqrt2(c: &[i128; 4]) -> Result<[i128; 4]> {
    let m = mul_sqrt2(c)?;
    Ok(m.map(|x| x / 2))
}

/// Exact 2×2 matrix over the ring, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring2x2 {
    pub entries: [RingScalar; 4],
}

impl Ring2x2 {
    pub fn identity() -> Self {
        Ring2x2 {
            entries: [
                RingScalar::ONE,
                RingScalar::ZERO,
                RingScalar::ZERO,
                RingScalar::ONE,
            ],
        }
    }

    pub fn new(m00: RingScalar, m01: RingScalar, m10: RingScalar, m11: RingScalar) -> Self {
        Ring2x2 {
            entries: [m00, m01, m10, m11],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> RingScalar {
        self.entries[2 * row + col]
    }

    /// Exact product `self · rhs`.
    pub fn checked_mul(&self, rhs: &Ring2x2) -> Result<Ring2x2> {
        let mut out = [RingScalar::ZERO; 4];
        for i in 0..2 {
            for j in 0..2 {
                let a = self.get(i, 0).checked_mul(&rhs.get(0, j))?;
                let b = self.get(i, 1).checked_mul(&rhs.get(1, j))?;
                out[2 * i + j] = a.checked_add(&b)?;
            }
        }
        Ok(Ring2x2 { entries: out })
    }

    pub fn to_complex(&self) -> [[Complex64; 2]; 2] {
        let e = self.entries.map(|x| x.to_complex());
        [[e[0], e[1]], [e[2], e[3]]]
    }
}

/// Exact product of two 2×2 ring matrices.
pub fn ring_mul(x: &Ring2x2, y: &Ring2x2) -> Result<Ring2x2> {
    x.checked_mul(y)
}
