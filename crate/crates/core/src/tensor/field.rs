use super::chart::{ChartDomain, Point};
use crate::error::{GeoError, Result};
use nalgebra::SMatrix;
use num_complex::Complex64;
use std::sync::Arc;

/// Values that can be stored in a field and differentiated by stencils.
pub trait FieldValue: Copy + Send + Sync + 'static {
    fn zero() -> Self;
    /// `self + a * x`
    fn axpy(self, a: f64, x: Self) -> Self;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + a * x
    }
}

impl<const R: usize, const C: usize> FieldValue for SMatrix<f64, R, C> {
    fn zero() -> Self {
        Self::zeros()
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + x * a
    }
}

impl<const R: usize, const C: usize> FieldValue for SMatrix<Complex64, R, C> {
    fn zero() -> Self {
        Self::zeros()
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + x.map(|z| z * a)
    }
}

pub type Gradient<const D: usize, T> = [T; D];
pub type Hessian<const D: usize, T> = [[T; D]; D];

/// A tensor-valued map on a coordinate chart together with its first and
/// second coordinate derivatives.
pub trait Field<const D: usize, T: FieldValue>: Send + Sync {
    fn domain(&self) -> &ChartDomain<D>;
    fn value(&self, x: &Point<D>) -> Result<T>;
    fn gradient(&self, x: &Point<D>) -> Result<Gradient<D, T>>;
    fn hessian(&self, x: &Point<D>) -> Result<Hessian<D, T>>;
}

pub type ScalarField<const D: usize> = Arc<dyn Field<D, f64>>;
pub type VectorField<const D: usize> = Arc<dyn Field<D, Point<D>>>;
pub type TensorField<const D: usize> = Arc<dyn Field<D, SMatrix<f64, D, D>>>;

/// Value, gradient and Hessian at one point.
#[derive(Clone, Copy, Debug)]
pub struct Jet<const D: usize, T> {
    pub value: T,
    pub gradient: Gradient<D, T>,
    pub hessian: Hessian<D, T>,
}

type JetFn<const D: usize, T> = dyn Fn(&Point<D>) -> Jet<D, T> + Send + Sync;

/// Field given in closed form together with its exact derivatives.
pub struct Analytic<const D: usize, T> {
    domain: ChartDomain<D>,
    jet: Arc<JetFn<D, T>>,
}

impl<const D: usize, T: FieldValue> Analytic<D, T> {
    pub fn new(domain: ChartDomain<D>, jet: impl Fn(&Point<D>) -> Jet<D, T> + Send + Sync + 'static) -> Self {
        Self { domain, jet: Arc::new(jet) }
    }

    pub fn jet(&self, x: &Point<D>) -> Result<Jet<D, T>> {
        self.domain.check_contains(x)?;
        Ok((self.jet)(x))
    }
}

impl<const D: usize, T: FieldValue> Field<D, T> for Analytic<D, T> {
    fn domain(&self) -> &ChartDomain<D> {
        &self.domain
    }
    fn value(&self, x: &Point<D>) -> Result<T> {
        Ok(self.jet(x)?.value)
    }
    fn gradient(&self, x: &Point<D>) -> Result<Gradient<D, T>> {
        Ok(self.jet(x)?.gradient)
    }
    fn hessian(&self, x: &Point<D>) -> Result<Hessian<D, T>> {
        Ok(self.jet(x)?.hessian)
    }
}

/// Constant field.
pub struct Constant<const D: usize, T> {
    domain: ChartDomain<D>,
    value: T,
}

impl<const D: usize, T: FieldValue> Constant<D, T> {
    pub fn new(domain: ChartDomain<D>, value: T) -> Self {
        Self { domain, value }
    }
}

impl<const D: usize, T: FieldValue> Field<D, T> for Constant<D, T> {
    fn domain(&self) -> &ChartDomain<D> {
        &self.domain
    }
    fn value(&self, x: &Point<D>) -> Result<T> {
        self.domain.check_contains(x)?;
        Ok(self.value)
    }
    fn gradient(&self, x: &Point<D>) -> Result<Gradient<D, T>> {
        self.domain.check_contains(x)?;
        Ok([T::zero(); D])
    }
    fn hessian(&self, x: &Point<D>) -> Result<Hessian<D, T>> {
        self.domain.check_contains(x)?;
        Ok([[T::zero(); D]; D])
    }
}

type PointFn<const D: usize, T> = dyn Fn(&Point<D>) -> T + Send + Sync;

/// Field given by a callback; derivatives by central differences.
///
/// First derivatives use step `h`, second derivatives step `10 h`, which keeps
/// the rounding error of the second difference near `eps / h^2 * 1e-2`.
pub struct Callback<const D: usize, T> {
    domain: ChartDomain<D>,
    f: Arc<PointFn<D, T>>,
    step: [f64; D],
}

impl<const D: usize, T: FieldValue> Callback<D, T> {
    pub fn new(domain: ChartDomain<D>, f: impl Fn(&Point<D>) -> T + Send + Sync + 'static) -> Self {
        let step = std::array::from_fn(|a| 1e-5 * domain.width(a));
        Self { domain, f: Arc::new(f), step }
    }

    pub fn with_step(mut self, step: [f64; D]) -> Self {
        self.step = step;
        self
    }

    fn shifted(&self, x: &Point<D>, a: usize, s: f64) -> T {
        let mut y = *x;
        y[a] += s;
        (self.f)(&y)
    }
}

impl<const D: usize, T: FieldValue> Field<D, T> for Callback<D, T> {
    fn domain(&self) -> &ChartDomain<D> {
        &self.domain
    }
    fn value(&self, x: &Point<D>) -> Result<T> {
        self.domain.check_contains(x)?;
        Ok((self.f)(x))
    }
    fn gradient(&self, x: &Point<D>) -> Result<Gradient<D, T>> {
        self.domain.check_contains(x)?;
        Ok(std::array::from_fn(|a| {
            let h = self.step[a];
            self.shifted(x, a, h).axpy(-1.0, self.shifted(x, a, -h)).scale_by(0.5 / h)
        }))
    }
    fn hessian(&self, x: &Point<D>) -> Result<Hessian<D, T>> {
        self.domain.check_contains(x)?;
        let f0 = (self.f)(x);
        let mut out = [[T::zero(); D]; D];
        for a in 0..D {
            let s = 10.0 * self.step[a];
            out[a][a] = self.shifted(x, a, s).axpy(-2.0, f0).axpy(1.0, self.shifted(x, a, -s)).scale_by(1.0 / (s * s));
            for b in 0..a {
                let t = 10.0 * self.step[b];
                let at = |sa: f64, sb: f64| {
                    let mut y = *x;
                    y[a] += sa;
                    y[b] += sb;
                    (self.f)(&y)
                };
                let v = at(s, t)
                    .axpy(-1.0, at(s, -t))
                    .axpy(-1.0, at(-s, t))
                    .axpy(1.0, at(-s, -t))
                    .scale_by(0.25 / (s * t));
                out[a][b] = v;
                out[b][a] = v;
            }
        }
        Ok(out)
    }
}

trait ScaleBy {
    fn scale_by(self, s: f64) -> Self;
}

impl<T: FieldValue> ScaleBy for T {
    fn scale_by(self, s: f64) -> Self {
        T::zero().axpy(s, self)
    }
}

/// Field known only at the nodes of its chart grid. Derivatives use
/// second-order central stencils, one-sided second-order stencils at closed
/// edges and wrap-around on periodic axes.
#[derive(Clone, Debug)]
pub struct GridField<const D: usize, T> {
    domain: ChartDomain<D>,
    data: Vec<T>,
}

/// Up to four (node index along an axis, weight) pairs.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    pub len: usize,
    pub taps: [(usize, f64); 4],
}

impl Stencil {
    fn new(taps: &[(usize, f64)]) -> Self {
        let mut s = Stencil { len: taps.len(), taps: [(0, 0.0); 4] };
        s.taps[..taps.len()].copy_from_slice(taps);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.taps[..self.len].iter().copied()
    }
}

/// First-derivative stencil along `axis` at node index `i`.
pub fn first_stencil<const D: usize>(domain: &ChartDomain<D>, axis: usize, i: usize) -> Stencil {
    let n = domain.nodes()[axis];
    let h = domain.spacing(axis);
    if domain.periodic()[axis] {
        return Stencil::new(&[((i + 1) % n, 0.5 / h), ((i + n - 1) % n, -0.5 / h)]);
    }
    if i == 0 {
        Stencil::new(&[(0, -1.5 / h), (1, 2.0 / h), (2, -0.5 / h)])
    } else if i == n - 1 {
        Stencil::new(&[(n - 1, 1.5 / h), (n - 2, -2.0 / h), (n - 3, 0.5 / h)])
    } else {
        Stencil::new(&[(i + 1, 0.5 / h), (i - 1, -0.5 / h)])
    }
}

/// Second-derivative stencil along `axis` at node index `i`.
pub fn second_stencil<const D: usize>(domain: &ChartDomain<D>, axis: usize, i: usize) -> Stencil {
    let n = domain.nodes()[axis];
    let h2 = domain.spacing(axis).powi(2);
    if domain.periodic()[axis] {
        return Stencil::new(&[((i + 1) % n, 1.0 / h2), (i, -2.0 / h2), ((i + n - 1) % n, 1.0 / h2)]);
    }
    let edge = |o: [usize; 4]| {
        if n >= 4 {
            Stencil::new(&[(o[0], 2.0 / h2), (o[1], -5.0 / h2), (o[2], 4.0 / h2), (o[3], -1.0 / h2)])
        } else {
            Stencil::new(&[(o[0], 1.0 / h2), (o[1], -2.0 / h2), (o[2], 1.0 / h2)])
        }
    };
    if i == 0 {
        edge([0, 1, 2, 3])
    } else if i == n - 1 {
        edge([n - 1, n - 2, n - 3, n.saturating_sub(4)])
    } else {
        Stencil::new(&[(i + 1, 1.0 / h2), (i, -2.0 / h2), (i - 1, 1.0 / h2)])
    }
}

/// Derivatives of node samples on a chart grid.
pub fn grid_gradient<const D: usize, T: FieldValue>(domain: &ChartDomain<D>, data: &[T], idx: &[usize; D]) -> Gradient<D, T> {
    std::array::from_fn(|a| {
        let mut acc = T::zero();
        for (j, w) in first_stencil(domain, a, idx[a]).iter() {
            let mut m = *idx;
            m[a] = j;
            acc = acc.axpy(w, data[domain.linear_index(&m)]);
        }
        acc
    })
}

pub fn grid_hessian<const D: usize, T: FieldValue>(domain: &ChartDomain<D>, data: &[T], idx: &[usize; D]) -> Hessian<D, T> {
    let mut out = [[T::zero(); D]; D];
    for a in 0..D {
        let mut acc = T::zero();
        for (j, w) in second_stencil(domain, a, idx[a]).iter() {
            let mut m = *idx;
            m[a] = j;
            acc = acc.axpy(w, data[domain.linear_index(&m)]);
        }
        out[a][a] = acc;
        for b in 0..a {
            let mut acc = T::zero();
            for (ja, wa) in first_stencil(domain, a, idx[a]).iter() {
                for (jb, wb) in first_stencil(domain, b, idx[b]).iter() {
                    let mut m = *idx;
                    m[a] = ja;
                    m[b] = jb;
                    acc = acc.axpy(wa * wb, data[domain.linear_index(&m)]);
                }
            }
            out[a][b] = acc;
            out[b][a] = acc;
        }
    }
    out
}

impl<const D: usize, T: FieldValue> GridField<D, T> {
    pub fn new(domain: ChartDomain<D>, data: Vec<T>) -> Result<Self> {
        if data.len() != domain.node_count() {
            return Err(GeoError::InvalidData(format!(
                "grid field has {} samples, chart has {} nodes",
                data.len(),
                domain.node_count()
            )));
        }
        Ok(Self { domain, data })
    }

    /// Samples `f` at every node of `domain`.
    pub fn sample(domain: ChartDomain<D>, f: &dyn Field<D, T>) -> Result<Self> {
        let data = (0..domain.node_count()).map(|k| f.value(&domain.point(k))).collect::<Result<Vec<_>>>()?;
        Self::new(domain, data)
    }

    pub fn from_fn(domain: ChartDomain<D>, f: impl Fn(&Point<D>) -> T) -> Self {
        let data = (0..domain.node_count()).map(|k| f(&domain.point(k))).collect();
        Self { domain, data }
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn at(&self, idx: &[usize; D]) -> T {
        self.data[self.domain.linear_index(idx)]
    }

    fn node(&self, x: &Point<D>) -> Result<[usize; D]> {
        self.domain.check_contains(x)?;
        self.domain.locate_node(x).ok_or_else(|| GeoError::OffGrid { point: x.iter().copied().collect() })
    }
}

impl<const D: usize, T: FieldValue> Field<D, T> for GridField<D, T> {
    fn domain(&self) -> &ChartDomain<D> {
        &self.domain
    }
    fn value(&self, x: &Point<D>) -> Result<T> {
        Ok(self.at(&self.node(x)?))
    }
    fn gradient(&self, x: &Point<D>) -> Result<Gradient<D, T>> {
        Ok(grid_gradient(&self.domain, &self.data, &self.node(x)?))
    }
    fn hessian(&self, x: &Point<D>) -> Result<Hessian<D, T>> {
        Ok(grid_hessian(&self.domain, &self.data, &self.node(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(x: &Point<2>) -> f64 {
        x[0].powi(3) + 2.0 * x[0] * x[1] - x[1].powi(2)
    }

    #[test]
    fn callback_derivatives() {
        let dom = ChartDomain::<2>::closed([-1.0, -1.0], [1.0, 1.0], [5, 5]).unwrap();
        let f = Callback::new(dom, cubic);
        let x = Point::<2>::new(0.3, -0.4);
        let g = f.gradient(&x).unwrap();
        assert!((g[0] - (3.0 * 0.09 - 0.8)).abs() < 1e-8);
        assert!((g[1] - (0.6 + 0.8)).abs() < 1e-8);
        let h = f.hessian(&x).unwrap();
        assert!((h[0][0] - 1.8).abs() < 1e-5);
        assert!((h[0][1] - 2.0).abs() < 1e-5);
        assert!((h[1][1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn grid_stencils_exact_on_quadratics() {
        let dom = ChartDomain::<2>::closed([0.0, 0.0], [1.0, 2.0], [6, 9]).unwrap();
        let q = |x: &Point<2>| 1.0 + x[0] - 3.0 * x[1] + x[0] * x[0] + 0.5 * x[0] * x[1] - 2.0 * x[1] * x[1];
        let f = GridField::from_fn(dom.clone(), q);
        for k in 0..dom.node_count() {
            let p = dom.point(k);
            let g = f.gradient(&p).unwrap();
            let h = f.hessian(&p).unwrap();
            assert!((g[0] - (1.0 + 2.0 * p[0] + 0.5 * p[1])).abs() < 1e-11);
            assert!((g[1] - (-3.0 + 0.5 * p[0] - 4.0 * p[1])).abs() < 1e-11);
            assert!((h[0][0] - 2.0).abs() < 1e-9);
            assert!((h[0][1] - 0.5).abs() < 1e-9);
            assert!((h[1][1] + 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_rejects_off_node() {
        let dom = ChartDomain::<1>::closed([0.0], [1.0], [5]).unwrap();
        let f = GridField::from_fn(dom, |x| x[0]);
        assert!(matches!(f.value(&Point::<1>::new(0.3)), Err(GeoError::OffGrid { .. })));
        assert!(matches!(f.value(&Point::<1>::new(1.5)), Err(GeoError::PointOutsideChart { .. })));
        assert_eq!(f.value(&Point::<1>::new(0.75)).unwrap(), 0.75);
    }

    #[test]
    fn periodic_stencil_wraps() {
        let n = 64;
        let dom = ChartDomain::<1>::new([0.0], [std::f64::consts::TAU], [n], [true]).unwrap();
        let f = GridField::from_fn(dom.clone(), |x| x[0].sin());
        let g = f.gradient(&Point::<1>::new(0.0)).unwrap();
        let h = dom.spacing(0);
        assert!((g[0] - h.sin() / h).abs() < 1e-14);
    }
}
