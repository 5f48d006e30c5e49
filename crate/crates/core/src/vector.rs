//! Dense real vectors of dimension 1 through 8.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use arrayvec::ArrayVec;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// A point of ℝᵈ, 1 ≤ d ≤ [`MAX_DIM`], stored inline.
///
/// Checked constructors reject empty, oversized and non-finite input.
/// Arithmetic does not re-check finiteness; orbit generation does that.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(ArrayVec<f64, MAX_DIM>);

impl Vector {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "vector dimension must be in 1..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {i} is not finite"
            )));
        }
        Ok(Self::from_slice_unchecked(coords))
    }

    pub(crate) fn from_slice_unchecked(coords: &[f64]) -> Self {
        Vector(coords.iter().copied().collect())
    }

    pub(crate) fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..dim).map(f).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_| 0.0)
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        Self::from_fn(dim, |j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn scalar(x: f64) -> Self {
        Self::from_slice_unchecked(&[x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + t * dir`
    pub fn axpy(&self, t: f64, dir: &Vector) -> Vector {
        self.zip_map(dir, |a, b| a + t * b)
    }

    pub fn scale(&self, t: f64) -> Vector {
        self.map(|a| a * t)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&a| f(a)).collect())
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub(crate) fn expect_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Vector::new(&coords).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, t: f64) -> Vector {
        self.scale(t)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.map(|a| -a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(Vector::new(&[]).is_err());
        assert!(Vector::new(&[0.0; 9]).is_err());
        assert!(Vector::new(&[1.0, f64::NAN]).is_err());
        assert!(Vector::new(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn basic_arithmetic() {
        let a = Vector::new(&[3.0, 4.0]).unwrap();
        let b = Vector::new(&[1.0, -1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), -1.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 5.0]);
        assert_eq!(a.axpy(2.0, &b).as_slice(), &[5.0, 2.0]);
        assert_eq!(a.dist(&b), (4.0_f64 + 25.0).sqrt());
    }

    #[test]
    fn serde_is_a_plain_array() {
        let a = Vector::new(&[0.5, -2.0]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[0.5,-2.0]");
        let back: Vector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
    }
}
