//! Small dense complex matrices (g ≤ 3 in practice) at working precision.

use rug::{Complex, Float};

use crate::algebra::determinant;
use crate::num::{cabs, Precision};

#[derive(Clone, Debug)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(prec: Precision, rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![prec.czero(); rows * cols] }
    }

    pub fn identity(prec: Precision, n: usize) -> Self {
        let mut m = CMatrix::zeros(prec, n, n);
        for i in 0..n {
            m.data[i * n + i] = prec.cone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        CMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<Complex>]) -> Self {
        let c = cols.len();
        let r = cols[0].len();
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col[i].clone());
            }
        }
        CMatrix { rows: r, cols: c, data }
    }

    pub fn prec(&self) -> Precision {
        Precision::bits(self.data[0].prec().0)
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Complex> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        CMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows);
        let p = self.prec();
        let mut out = CMatrix::zeros(p, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = p.czero();
                for k in 0..self.cols {
                    acc += Complex::with_val(p.bits, self.get(i, k) * o.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        let p = self.prec();
        (0..self.cols)
            .map(|j| {
                let mut acc = p.czero();
                for (i, vi) in v.iter().enumerate() {
                    acc += Complex::with_val(p.bits, vi * self.get(i, j));
                }
                acc
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        let p = self.prec();
        (0..self.rows)
            .map(|i| {
                let mut acc = p.czero();
                for (j, vj) in v.iter().enumerate() {
                    acc += Complex::with_val(p.bits, self.get(i, j) * vj);
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &Complex) -> CMatrix {
        let p = self.prec();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| Complex::with_val(p.bits, a * s)).collect(),
        }
    }

    pub fn neg(&self) -> CMatrix {
        let p = self.prec();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| Complex::with_val(p.bits, -a)).collect(),
        }
    }

    pub fn det(&self) -> Complex {
        assert_eq!(self.rows, self.cols);
        let rows: Vec<Vec<Complex>> = (0..self.rows).map(|i| self.row(i)).collect();
        determinant(rows)
    }

    /// Solve `self · X = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &CMatrix) -> Option<CMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.prec();
        let mut a: Vec<Vec<Complex>> = (0..n).map(|i| self.row(i)).collect();
        let mut x: Vec<Vec<Complex>> = (0..n).map(|i| b.row(i)).collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| cabs(&a[i][col]).partial_cmp(&cabs(&a[j][col])).unwrap())?;
            if a[piv][col].is_zero() {
                return None;
            }
            a.swap(piv, col);
            x.swap(piv, col);
            let pv = a[col][col].clone();
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = Complex::with_val(p.bits, &a[r][col] / &pv);
                for c in col..n {
                    let t = Complex::with_val(p.bits, &f * &a[col][c]);
                    a[r][c] -= t;
                }
                for c in 0..b.cols {
                    let t = Complex::with_val(p.bits, &f * &x[col][c]);
                    x[r][c] -= t;
                }
            }
        }
        for r in 0..n {
            for c in 0..b.cols {
                x[r][c] = Complex::with_val(p.bits, &x[r][c] / &a[r][r]);
            }
        }
        Some(CMatrix::from_rows(x))
    }

    pub fn inverse(&self) -> Option<CMatrix> {
        self.solve(&CMatrix::identity(self.prec(), self.rows))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| cabs(a).to_f64()).fold(0.0, f64::max)
    }

    /// Condition number in the max-entry norm (cheap, adequate for g ≤ 3).
    pub fn condition(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.max_abs() * inv.max_abs() * self.rows as f64,
            None => f64::INFINITY,
        }
    }

    pub fn real_part(&self) -> Vec<Float> {
        self.data.iter().map(|a| a.real().clone()).collect()
    }

    pub fn imag_part(&self) -> Vec<Float> {
        self.data.iter().map(|a| a.imag().clone()).collect()
    }
}

/// Eigenvalues of a small real symmetric matrix (cyclic Jacobi, f64).
pub fn sym_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Cholesky factor `L` (lower triangular, row-major) of a symmetric positive
/// definite f64 matrix; `None` when not positive definite.
pub fn cholesky_f64(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Cholesky at working precision; used as the positive-definiteness probe.
pub fn cholesky_mp(a: &[Float], n: usize) -> Option<Vec<Float>> {
    let bits = a[0].prec();
    let mut l = vec![Float::new(bits); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j].clone();
            for k in 0..j {
                s -= Float::with_val(bits, &l[i * n + k] * &l[j * n + k]);
            }
            if i == j {
                if s <= 0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / &l[j * n + j];
            }
        }
    }
    Some(l)
}
