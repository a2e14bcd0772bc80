//! Dense univariate polynomials over nonnegative big integers.
//!
//! Descent generating functions are short (degree below the vertex count)
//! and dense, so the representation is a plain coefficient vector in
//! ascending powers with no trailing zeros. Subtraction is deliberately
//! absent: nothing in this crate ever needs a negative coefficient.

use num_bigint::BigUint;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

/// Polynomial in `x` whose coefficient of `x^k` counts objects with `k`
/// descents. The zero polynomial is stored as an empty coefficient vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DescentPoly {
    coeffs: Vec<BigUint>,
}

impl DescentPoly {
    pub fn zero() -> Self {
        DescentPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DescentPoly::from_u64_coeffs(&[1])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        DescentPoly::from_u64_coeffs(&[0, 1])
    }

    /// Builds a polynomial from ascending-power coefficients, trimming
    /// trailing zeros so equality is structural.
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DescentPoly { coeffs }
    }

    pub fn from_u64_coeffs(coeffs: &[u64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigUint {
        self.coeffs.get(k).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Sum of all coefficients, i.e. the evaluation at `x = 1`. For a
    /// descent generating function this is the total object count.
    pub fn eval_one(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// Multiplication by `x^k`.
    pub fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigUint::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        DescentPoly { coeffs }
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = DescentPoly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients as decimal strings, for lossless JSON output.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Add for &DescentPoly {
    type Output = DescentPoly;

    fn add(self, rhs: &DescentPoly) -> DescentPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        // no trailing zeros can appear: coefficients are nonnegative
        DescentPoly { coeffs }
    }
}

impl Add for DescentPoly {
    type Output = DescentPoly;

    fn add(self, rhs: DescentPoly) -> DescentPoly {
        &self + &rhs
    }
}

impl AddAssign<&DescentPoly> for DescentPoly {
    fn add_assign(&mut self, rhs: &DescentPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigUint::zero());
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            self.coeffs[i] += c;
        }
    }
}

impl Mul for &DescentPoly {
    type Output = DescentPoly;

    fn mul(self, rhs: &DescentPoly) -> DescentPoly {
        if self.is_zero() || rhs.is_zero() {
            return DescentPoly::zero();
        }
        let mut coeffs = vec![BigUint::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DescentPoly { coeffs }
    }
}

impl Mul for DescentPoly {
    type Output = DescentPoly;

    fn mul(self, rhs: DescentPoly) -> DescentPoly {
        &self * &rhs
    }
}

/// Renders in the table style used throughout: ascending powers, zero
/// terms skipped, unit coefficients elided, e.g. `1+4x+4x^2+x^3`.
impl fmt::Display for DescentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let one = BigUint::from(1u32);
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 if *c == one => f.write_str("x")?,
                1 => write!(f, "{c}x")?,
                _ if *c == one => write!(f, "x^{k}")?,
                _ => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}
