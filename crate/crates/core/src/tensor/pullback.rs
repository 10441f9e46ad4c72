use super::chart::{ChartDomain, Point};
use super::field::{Field, Gradient, Hessian, TensorField};
use super::linalg::Mat;
use crate::error::Result;
use std::sync::Arc;

/// Smooth change of coordinates `y -> x(y)`.
pub trait CoordinateMap: Send + Sync {
    fn point(&self, y: &Point<3>) -> Point<3>;
    /// `J[(i, a)] = dx^i / dy^a`
    fn jacobian(&self, y: &Point<3>) -> Mat<3>;
    /// `second[i][(a, b)] = d^2 x^i / dy^a dy^b`
    fn second(&self, y: &Point<3>) -> [Mat<3>; 3];
}

/// Spherical coordinates `(r, theta, phi)` about `center`.
#[derive(Clone, Copy, Debug)]
pub struct SphericalMap {
    pub center: Point<3>,
}

impl CoordinateMap for SphericalMap {
    fn point(&self, y: &Point<3>) -> Point<3> {
        let (st, ct) = y[1].sin_cos();
        let (sp, cp) = y[2].sin_cos();
        self.center + Point::<3>::new(st * cp, st * sp, ct) * y[0]
    }

    fn jacobian(&self, y: &Point<3>) -> Mat<3> {
        let r = y[0];
        let (st, ct) = y[1].sin_cos();
        let (sp, cp) = y[2].sin_cos();
        Mat::<3>::new(
            st * cp, r * ct * cp, -r * st * sp,
            st * sp, r * ct * sp, r * st * cp,
            ct, -r * st, 0.0,
        )
    }

    fn second(&self, y: &Point<3>) -> [Mat<3>; 3] {
        let r = y[0];
        let (st, ct) = y[1].sin_cos();
        let (sp, cp) = y[2].sin_cos();
        // rows of each matrix: (r, theta, phi) x (r, theta, phi)
        [
            Mat::<3>::new(
                0.0, ct * cp, -st * sp,
                ct * cp, -r * st * cp, -r * ct * sp,
                -st * sp, -r * ct * sp, -r * st * cp,
            ),
            Mat::<3>::new(
                0.0, ct * sp, st * cp,
                ct * sp, -r * st * sp, r * ct * cp,
                st * cp, r * ct * cp, -r * st * sp,
            ),
            Mat::<3>::new(
                0.0, -st, 0.0,
                -st, -r * ct, 0.0,
                0.0, 0.0, 0.0,
            ),
        ]
    }
}

/// Pullback `J^T T(x(y)) J` of a covariant 2-tensor field.
///
/// Values and first derivatives are exact given those of the base field;
/// second derivatives are central differences of the exact first derivatives.
pub struct Pullback {
    domain: ChartDomain<3>,
    base: TensorField<3>,
    map: Arc<dyn CoordinateMap>,
}

impl Pullback {
    pub fn new(domain: ChartDomain<3>, base: TensorField<3>, map: Arc<dyn CoordinateMap>) -> Self {
        Self { domain, base, map }
    }

    fn grad_unchecked(&self, y: &Point<3>) -> Result<Gradient<3, Mat<3>>> {
        let x = self.map.point(y);
        let t = self.base.value(&x)?;
        let dt = self.base.gradient(&x)?;
        let j = self.map.jacobian(y);
        let sec = self.map.second(y);
        Ok(std::array::from_fn(|c| {
            let dj = Mat::<3>::from_fn(|i, a| sec[i][(a, c)]);
            let mut dtc = Mat::<3>::zeros();
            for k in 0..3 {
                dtc += dt[k] * j[(k, c)];
            }
            dj.transpose() * t * j + j.transpose() * t * dj + j.transpose() * dtc * j
        }))
    }
}

impl Field<3, Mat<3>> for Pullback {
    fn domain(&self) -> &ChartDomain<3> {
        &self.domain
    }

    fn value(&self, y: &Point<3>) -> Result<Mat<3>> {
        self.domain.check_contains(y)?;
        let j = self.map.jacobian(y);
        Ok(j.transpose() * self.base.value(&self.map.point(y))? * j)
    }

    fn gradient(&self, y: &Point<3>) -> Result<Gradient<3, Mat<3>>> {
        self.domain.check_contains(y)?;
        self.grad_unchecked(y)
    }

    fn hessian(&self, y: &Point<3>) -> Result<Hessian<3, Mat<3>>> {
        self.domain.check_contains(y)?;
        let mut out = [[Mat::<3>::zeros(); 3]; 3];
        for b in 0..3 {
            let h = 1e-5 * self.domain.width(b).max(1e-3);
            let mut yp = *y;
            let mut ym = *y;
            yp[b] += h;
            ym[b] -= h;
            let gp = self.grad_unchecked(&yp)?;
            let gm = self.grad_unchecked(&ym)?;
            for a in 0..3 {
                out[a][b] = (gp[a] - gm[a]) / (2.0 * h);
            }
        }
        for a in 0..3 {
            for b in 0..a {
                let s = (out[a][b] + out[b][a]) * 0.5;
                out[a][b] = s;
                out[b][a] = s;
            }
        }
        Ok(out)
    }
}
