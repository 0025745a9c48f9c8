use crate::error::{GqError, Result};

/// Dense real-valued feature vector. Used both for feature activations
/// phi(s,a) and for the learned weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(GqError::InvalidParameter {
                name: "feature vector",
                message: format!("non-finite entry {bad}"),
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    /// One-hot vector with a 1 at `index`.
    pub fn one_hot(n: usize, index: usize) -> Self {
        let mut values = vec![0.0; n];
        values[index] = 1.0;
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dot(&self, other: &FeatureVector) -> Result<f64> {
        other.check_dim(self.dim())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// self += c * other
    pub fn add_scaled(&mut self, c: f64, other: &FeatureVector) -> Result<()> {
        other.check_dim(self.dim())?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    /// self[i] += outer * (c1 * v1[i] + c2 * v2[i]), fused per entry so the
    /// rounding matches a straight-line transcription of the update rules.
    pub fn add_combination(
        &mut self,
        outer: f64,
        c1: f64,
        v1: &FeatureVector,
        c2: f64,
        v2: &FeatureVector,
    ) -> Result<()> {
        v1.check_dim(self.dim())?;
        v2.check_dim(self.dim())?;
        for i in 0..self.values.len() {
            self.values[i] += outer * (c1 * v1.values[i] + c2 * v2.values[i]);
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn fill_zero(&mut self) {
        self.values.fill(0.0);
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max-norm.
    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(GqError::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_product() {
        let a = FeatureVector::new(vec![1.0, 2.0]).unwrap();
        let b = FeatureVector::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(a.dot(&b).unwrap(), 11.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(FeatureVector::new(vec![f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let a = FeatureVector::zeros(2);
        let b = FeatureVector::zeros(3);
        assert!(matches!(
            a.dot(&b),
            Err(GqError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn one_hot_is_unit() {
        let v = FeatureVector::one_hot(4, 2);
        assert_eq!(v.values(), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(v.norm(), 1.0);
    }
}
