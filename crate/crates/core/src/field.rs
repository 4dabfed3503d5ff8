use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::math;

/// A real-valued function on the points of a space, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFunction(Vec<f64>);

impl FieldFunction {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field function",
                index,
            });
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(alloc::vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(alloc::vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(math::abs)
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|v| t * v)
    }

    pub fn shifted(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Pointwise product. Panics on length mismatch.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    /// `a·self + other`. Panics on length mismatch.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Self(self.0.iter().zip(&other.0).map(|(x, y)| a * x + y).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    /// Largest pointwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max(math::abs(a - b)))
    }

    /// Whether every value equals the first one.
    pub fn is_constant(&self) -> bool {
        match self.0.first() {
            Some(&v0) => self.0.iter().all(|&v| v == v0),
            None => true,
        }
    }

    pub(crate) fn check_len(&self, n: usize, what: &'static str) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for FieldFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for FieldFunction {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        assert_eq!(
            FieldFunction::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { what: "field function", index: 1 })
        );
        assert!(FieldFunction::try_from(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn pointwise_helpers() {
        let f = FieldFunction::new(vec![1.0, -2.0, 3.0]).unwrap();
        let g = FieldFunction::constant(3, 2.0);
        assert_eq!(f.product(&g).values(), &[2.0, -4.0, 6.0]);
        assert_eq!(f.axpy(2.0, &g).values(), &[4.0, -2.0, 8.0]);
        assert_eq!(f.abs().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(f.shifted(1.0).values(), &[2.0, -1.0, 4.0]);
        assert_eq!(f.max_abs(), 3.0);
        assert_eq!(f.max_abs_diff(&g), 4.0);
        assert!(g.is_constant() && !f.is_constant());
        assert!(f.check_len(4, "f").is_err());
    }
}
