use super::clifford::{CliffordRep, Spinor, Vec3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Spinor field on flat space in the global Cartesian spinor frame, with
/// exact first derivatives.
pub trait SpinorField: Send + Sync {
    fn value(&self, x: &Vec3) -> Spinor;
    fn gradient(&self, x: &Vec3) -> [Spinor; 3];
}

/// Spinor with polynomial components `sum c_alpha x^alpha`.
#[derive(Clone, Debug, Default)]
pub struct PolynomialSpinor {
    pub terms: Vec<([u32; 3], Spinor)>,
}

fn monomial(e: &[u32; 3], x: &Vec3) -> f64 {
    x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
}

impl PolynomialSpinor {
    pub fn constant(psi0: Spinor) -> Self {
        Self { terms: vec![([0, 0, 0], psi0)] }
    }

    /// `gamma(x) psi0`.
    pub fn clifford_linear(rep: &CliffordRep, psi0: Spinor) -> Self {
        let g = rep.generators();
        Self { terms: (0..3).map(|k| (std::array::from_fn(|a| (a == k) as u32), g[k] * psi0)).collect() }
    }

    /// One quadratic component, the other constant.
    pub fn one_quadratic() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        Self {
            terms: vec![
                ([2, 0, 0], Spinor::new(c(1.0, 0.0), z)),
                ([0, 1, 1], Spinor::new(c(0.0, -0.5), z)),
                ([0, 0, 2], Spinor::new(c(0.3, 0.2), z)),
                ([0, 0, 0], Spinor::new(c(0.1, 0.0), c(1.0, 0.0))),
            ],
        }
    }

    /// Random polynomial of total degree at most `degree` with coefficients
    /// of a `scale^-|alpha|` size, so that values stay of unit order on
    /// `|x| <= scale`.
    pub fn random(seed: u64, degree: u32, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for i in 0..=degree {
            for j in 0..=degree - i {
                for k in 0..=degree - i - j {
                    let s = scale.powi(-((i + j + k) as i32));
                    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0) * s, rng.gen_range(-1.0..1.0) * s);
                    terms.push(([i, j, k], Spinor::new(c(), c())));
                }
            }
        }
        Self { terms }
    }

    /// Flat Dirac operator `sum_k gamma(e_k) d_k`.
    pub fn dirac(&self, rep: &CliffordRep, x: &Vec3) -> Spinor {
        let g = self.gradient(x);
        let gen = rep.generators();
        gen[0] * g[0] + gen[1] * g[1] + gen[2] * g[2]
    }
}

impl SpinorField for PolynomialSpinor {
    fn value(&self, x: &Vec3) -> Spinor {
        self.terms.iter().fold(Spinor::zeros(), |acc, (e, c)| acc + c * Complex64::from(monomial(e, x)))
    }

    fn gradient(&self, x: &Vec3) -> [Spinor; 3] {
        std::array::from_fn(|k| {
            self.terms.iter().fold(Spinor::zeros(), |acc, (e, c)| {
                if e[k] == 0 {
                    return acc;
                }
                let mut d = *e;
                d[k] -= 1;
                acc + c * Complex64::from(e[k] as f64 * monomial(&d, x))
            })
        })
    }
}
