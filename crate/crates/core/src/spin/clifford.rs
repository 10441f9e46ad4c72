use crate::error::{GeoError, Result};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub type Spinor = Vector2<Complex64>;
pub type Endo = Matrix2<Complex64>;
pub type Vec3 = nalgebra::Vector3<f64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Hermitian product, linear in the first slot.
pub fn inner(a: &Spinor, b: &Spinor) -> Complex64 {
    b.dotc(a)
}

pub fn norm_sq(a: &Spinor) -> f64 {
    a.norm_squared()
}

/// Rank-2 Clifford representation of Euclidean 3-space with
/// `gamma(e_i) gamma(e_j) + gamma(e_j) gamma(e_i) = -2 delta_ij`.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    gens: [Endo; 3],
}

impl CliffordRep {
    /// `gamma(e_k) = i sigma_k`.
    pub fn standard() -> Self {
        let s1 = Endo::new(C0, C1, C1, C0);
        let s2 = Endo::new(C0, -CI, CI, C0);
        let s3 = Endo::new(C1, C0, C0, -C1);
        Self { gens: [s1 * CI, s2 * CI, s3 * CI] }
    }

    /// Validates the Clifford relations and skew-hermiticity of the
    /// generators, which makes Clifford multiplication by unit vectors an
    /// isometry.
    pub fn new(gens: [Endo; 3]) -> Result<Self> {
        for i in 0..3 {
            if (gens[i] + gens[i].adjoint()).camax() > 1e-14 {
                return Err(GeoError::InvalidData(format!("generator {i} is not skew-Hermitian")));
            }
            for j in 0..3 {
                let ac = gens[i] * gens[j] + gens[j] * gens[i];
                let expect = if i == j { Endo::identity() * Complex64::new(-2.0, 0.0) } else { Endo::zeros() };
                if (ac - expect).camax() > 1e-14 {
                    return Err(GeoError::InvalidData(format!("generators {i}, {j} violate the Clifford relation")));
                }
            }
        }
        Ok(Self { gens })
    }

    pub fn generators(&self) -> &[Endo; 3] {
        &self.gens
    }

    pub fn gamma(&self, v: &Vec3) -> Endo {
        self.gens[0] * Complex64::from(v[0]) + self.gens[1] * Complex64::from(v[1]) + self.gens[2] * Complex64::from(v[2])
    }

    /// `P_pm = (Id pm i gamma(N)) / 2` for a unit normal `N`.
    pub fn projections(&self, n: &Vec3) -> (Endo, Endo) {
        let ign = self.gamma(n) * CI;
        let half = Complex64::new(0.5, 0.0);
        ((Endo::identity() + ign) * half, (Endo::identity() - ign) * half)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_defect: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub trials: usize,
    pub tolerance: f64,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

fn random_spinor(rng: &mut ChaCha8Rng) -> Spinor {
    Spinor::new(
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    )
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = random_vector(rng);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Algebraic identities of the representation on random inputs: Clifford
/// relations, metric compatibility, the Leibniz rule for the flat
/// connection, the projection identities and the symbol-level relations
/// `D gamma(N) = -gamma(N) D` and `D P_pm = P_mp D`.
pub fn clifford_identities(rep: &CliffordRep, trials: usize, seed: u64) -> IdentityReport {
    let tolerance = 1e-14;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 7];
    let names = [
        "anticommutator",
        "metric_compatibility",
        "leibniz_rule",
        "projection_sum",
        "projection_idempotent",
        "projection_orthogonal",
        "symbol_relations",
    ];
    let id = Endo::identity();
    for i in 0..3 {
        for j in 0..3 {
            let g = rep.generators();
            let expect = if i == j { id * Complex64::from(-2.0) } else { Endo::zeros() };
            worst[0] = worst[0].max((g[i] * g[j] + g[j] * g[i] - expect).camax());
        }
    }
    for _ in 0..trials {
        let x = random_vector(&mut rng);
        let (psi, phi) = (random_spinor(&mut rng), random_spinor(&mut rng));
        let gx = rep.gamma(&x);
        // <gamma(X) psi, gamma(X) phi> = |X|^2 <psi, phi> and skew-adjointness
        let d1 = (inner(&(gx * psi), &(gx * phi)) - inner(&psi, &phi) * x.norm_squared()).norm();
        let d2 = (inner(&(gx * psi), &phi) + inner(&psi, &(gx * phi))).norm();
        worst[1] = worst[1].max(d1).max(d2);
        // X<psi, phi> for affine fields: central difference of the quadratic
        // t -> <psi(t), phi(t)> with unit step is exact
        let (dpsi, dphi) = (random_spinor(&mut rng), random_spinor(&mut rng));
        let at = |t: f64| inner(&(psi + dpsi * Complex64::from(t)), &(phi + dphi * Complex64::from(t)));
        let deriv = (at(1.0) - at(-1.0)) * 0.5;
        worst[2] = worst[2].max((deriv - inner(&dpsi, &phi) - inner(&psi, &dphi)).norm());
        // projections
        let n = random_unit(&mut rng);
        let (pp, pm) = rep.projections(&n);
        worst[3] = worst[3].max((pp + pm - id).camax());
        worst[4] = worst[4].max((pp * pp - pp).camax()).max((pm * pm - pm).camax());
        worst[5] = worst[5].max((pp * pm).camax()).max((pm * pp).camax());
        // principal symbol -gamma(N) gamma(xi) for tangent xi
        let xi = {
            let v = random_vector(&mut rng);
            v - n * n.dot(&v)
        };
        let gn = rep.gamma(&n);
        let sym = -(gn * rep.gamma(&xi));
        let s1 = ((sym * gn + gn * sym) * psi).norm();
        let s2 = ((sym * pp - pm * sym) * psi).norm() + ((sym * pm - pp * sym) * psi).norm();
        worst[6] = worst[6].max(s1).max(s2);
    }
    let checks: Vec<IdentityCheck> = names
        .iter()
        .zip(worst)
        .map(|(name, d)| IdentityCheck { name: name.to_string(), max_defect: d, pass: d <= tolerance })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    IdentityReport { trials, tolerance, checks, pass }
}
