//! Small dense helpers for fixed-size matrices.

use nalgebra::SMatrix;

pub type Mat<const D: usize> = SMatrix<f64, D, D>;

/// Gauss-Jordan inverse with partial pivoting. `None` if a pivot falls below
/// `1e-14` times the largest entry.
pub fn inverse<const D: usize>(m: &Mat<D>) -> Option<Mat<D>> {
    let scale = m.amax();
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let mut a = *m;
    let mut inv = Mat::<D>::identity();
    for c in 0..D {
        let p = (c..D).max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs()))?;
        if a[(p, c)].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap_rows(c, p);
        inv.swap_rows(c, p);
        let d = 1.0 / a[(c, c)];
        for j in 0..D {
            a[(c, j)] *= d;
            inv[(c, j)] *= d;
        }
        for r in 0..D {
            if r != c {
                let f = a[(r, c)];
                if f != 0.0 {
                    for j in 0..D {
                        a[(r, j)] -= f * a[(c, j)];
                        inv[(r, j)] -= f * inv[(c, j)];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Cholesky test for positive definiteness of the symmetric part.
pub fn is_positive_definite<const D: usize>(m: &Mat<D>) -> bool {
    if !m.iter().all(|v| v.is_finite()) {
        return false;
    }
    let mut l = Mat::<D>::zeros();
    for i in 0..D {
        for j in 0..=i {
            let mut s = 0.5 * (m[(i, j)] + m[(j, i)]);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    true
}

pub fn determinant<const D: usize>(m: &Mat<D>) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..D {
        let Some(p) = (c..D).max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs())) else {
            return 0.0;
        };
        if a[(p, c)] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap_rows(c, p);
            det = -det;
        }
        det *= a[(c, c)];
        for r in c + 1..D {
            let f = a[(r, c)] / a[(c, c)];
            for j in c..D {
                a[(r, j)] -= f * a[(c, j)];
            }
        }
    }
    det
}

/// Largest asymmetry relative to the largest entry.
pub fn asymmetry<const D: usize>(m: &Mat<D>) -> f64 {
    let s = m.amax().max(f64::MIN_POSITIVE);
    (m - m.transpose()).amax() / s
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let m = Mat::<3>::new(4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 2.0);
        let inv = inverse(&m).unwrap();
        assert!((m * inv - Mat::<3>::identity()).amax() < 1e-14);
        assert!((determinant(&m) - m.determinant()).abs() < 1e-12);
        assert!(is_positive_definite(&m));
        let sing = Mat::<2>::new(1.0, 2.0, 2.0, 4.0);
        assert!(inverse(&sing).is_none());
        assert!(!is_positive_definite(&Mat::<2>::new(1.0, 0.0, 0.0, -1.0)));
    }

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }
}
