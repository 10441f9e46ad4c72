use super::chart::{ChartDomain, Point};
use super::field::{GridField, TensorField};
use super::linalg::{asymmetry, inverse, is_positive_definite, Mat};
use crate::error::{GeoError, Result};
use std::sync::Arc;

/// Symmetric positive-definite (0,2)-tensor field.
#[derive(Clone)]
pub struct MetricField<const D: usize> {
    inner: TensorField<D>,
}

/// Metric with inverse and first (optionally second) coordinate derivatives.
#[derive(Clone, Debug)]
pub struct MetricJet<const D: usize> {
    pub g: Mat<D>,
    pub ginv: Mat<D>,
    pub dg: [Mat<D>; D],
    pub ddg: Option<[[Mat<D>; D]; D]>,
}

fn singular<const D: usize>(x: &Point<D>) -> GeoError {
    GeoError::SingularMetric { point: x.iter().copied().collect() }
}

impl<const D: usize> MetricField<D> {
    pub fn new(inner: TensorField<D>) -> Self {
        Self { inner }
    }

    /// Euclidean metric on `domain`.
    pub fn euclidean(domain: ChartDomain<D>) -> Self {
        Self::new(Arc::new(super::field::Constant::new(domain, Mat::<D>::identity())))
    }

    /// Node-sampled metric; every sample must be symmetric positive definite.
    pub fn grid(domain: ChartDomain<D>, samples: Vec<Mat<D>>) -> Result<Self> {
        for (k, m) in samples.iter().enumerate() {
            if asymmetry(m) > 1e-12 || !is_positive_definite(m) {
                return Err(singular(&domain.point(k)));
            }
        }
        Ok(Self::new(Arc::new(GridField::new(domain, samples)?)))
    }

    pub fn field(&self) -> &TensorField<D> {
        &self.inner
    }

    pub fn domain(&self) -> &ChartDomain<D> {
        self.inner.domain()
    }

    pub fn value(&self, x: &Point<D>) -> Result<Mat<D>> {
        let g = self.inner.value(x)?;
        if asymmetry(&g) > 1e-12 || !is_positive_definite(&g) {
            return Err(singular(x));
        }
        Ok(g)
    }

    pub fn inverse(&self, x: &Point<D>) -> Result<Mat<D>> {
        inverse(&self.value(x)?).ok_or_else(|| singular(x))
    }

    pub fn jet1(&self, x: &Point<D>) -> Result<MetricJet<D>> {
        let g = self.value(x)?;
        let ginv = inverse(&g).ok_or_else(|| singular(x))?;
        Ok(MetricJet { g, ginv, dg: self.inner.gradient(x)?, ddg: None })
    }

    pub fn jet2(&self, x: &Point<D>) -> Result<MetricJet<D>> {
        let mut j = self.jet1(x)?;
        j.ddg = Some(self.inner.hessian(x)?);
        Ok(j)
    }

    pub fn norm_sq_vector(&self, x: &Point<D>, v: &Point<D>) -> Result<f64> {
        Ok(v.dot(&(self.value(x)? * v)))
    }

    pub fn norm_sq_covector(&self, x: &Point<D>, w: &Point<D>) -> Result<f64> {
        Ok(w.dot(&(self.inverse(x)? * w)))
    }
}
