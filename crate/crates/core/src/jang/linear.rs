//! Sparse matrices and a preconditioned BiCGSTAB for the Newton systems.

use crate::error::{GeoError, Result};

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Builds from per-row entry lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }
}

/// Incomplete LU factorization without fill, stored in the sparsity of `a`.
pub struct Ilu0 {
    lu: Csr,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &Csr) -> Result<Self> {
        let mut lu = a.clone();
        let n = a.n;
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for p in lu.row_ptr[i]..lu.row_ptr[i + 1] {
                if lu.cols[p] == i {
                    diag[i] = p;
                }
            }
            if diag[i] == usize::MAX {
                return Err(GeoError::SingularJacobian(format!("row {i} has no diagonal entry")));
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (lu.row_ptr[i], lu.row_ptr[i + 1]);
            for p in start..end {
                pos[lu.cols[p]] = p;
            }
            for p in start..end {
                let k = lu.cols[p];
                if k >= i {
                    break;
                }
                let pivot = lu.vals[diag[k]];
                let factor = lu.vals[p] / pivot;
                lu.vals[p] = factor;
                for q in diag[k] + 1..lu.row_ptr[k + 1] {
                    let j = lu.cols[q];
                    if pos[j] != usize::MAX {
                        let t = pos[j];
                        lu.vals[t] -= factor * lu.vals[q];
                    }
                }
            }
            for p in start..end {
                pos[lu.cols[p]] = usize::MAX;
            }
            let d = lu.vals[diag[i]];
            if !(d.abs() > 0.0) || !d.is_finite() {
                return Err(GeoError::SingularJacobian(format!("zero pivot in row {i}")));
            }
        }
        Ok(Ilu0 { lu, diag })
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.lu.n;
        for i in 0..n {
            let mut s = b[i];
            for p in self.lu.row_ptr[i]..self.diag[i] {
                s -= self.lu.vals[p] * x[self.lu.cols[p]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for p in self.diag[i] + 1..self.lu.row_ptr[i + 1] {
                s -= self.lu.vals[p] * x[self.lu.cols[p]];
            }
            x[i] = s / self.lu.vals[self.diag[i]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug)]
pub struct LinearStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Right-preconditioned BiCGSTAB for `a x = b` starting from zero.
pub fn bicgstab(a: &Csr, b: &[f64], rtol: f64, max_iter: usize) -> Result<(Vec<f64>, LinearStats)> {
    let n = a.n;
    let m = Ilu0::new(a)?;
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, LinearStats { iterations: 0, relative_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(GeoError::SingularJacobian(format!("BiCGSTAB breakdown at iteration {it}")));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.solve(&p, &mut phat);
        a.mul_vec(&phat, &mut v);
        let r0v = dot(&r0, &v);
        if r0v == 0.0 {
            return Err(GeoError::SingularJacobian(format!("BiCGSTAB breakdown at iteration {it}")));
        }
        alpha = rho / r0v;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let snorm = dot(&s, &s).sqrt();
        if snorm <= rtol * bnorm {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok((x, LinearStats { iterations: it, relative_residual: snorm / bnorm }));
        }
        m.solve(&s, &mut shat);
        a.mul_vec(&shat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        if !rel.is_finite() {
            return Err(GeoError::SingularJacobian("BiCGSTAB produced non-finite iterate".into()));
        }
        if rel <= rtol {
            return Ok((x, LinearStats { iterations: it, relative_residual: rel }));
        }
    }
    Ok((x, LinearStats { iterations: max_iter, relative_residual: rel }))
}
