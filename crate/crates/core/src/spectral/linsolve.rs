//! Dense complex linear algebra for resolvent entries: partial-pivot LU,
//! used to form G(z) = (H - z)^{-1} columnwise from one factorization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    data: Vec<Complex64>,
    n: usize,
}

impl ComplexMatrix {
    pub fn new(data: Vec<Complex64>, n: usize) -> Self {
        assert_eq!(data.len(), n * n);
        Self { data, n }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        crate::sum::sum_kahan_c((0..self.n).map(|i| self.data[i * self.n + i]))
    }
}

/// LU factorization with partial pivoting, PA = LU.
pub struct LuFactors {
    lu: Vec<Complex64>,
    piv: Vec<usize>,
    n: usize,
}

pub fn lu_factor(mut a: Vec<Complex64>, n: usize) -> Result<LuFactors> {
    assert_eq!(a.len(), n * n);
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // Pivot on the largest modulus in column k.
        let mut p = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::numerical(format!(
                "singular matrix in LU factorization at pivot {k}"
            )));
        }
        if p != k {
            piv.swap(k, p);
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let pivot = a[k * n + k];
        let inv_pivot = pivot.inv();
        for i in (k + 1)..n {
            let factor = a[i * n + k] * inv_pivot;
            a[i * n + k] = factor;
            if factor != Complex64::new(0.0, 0.0) {
                let (head, tail) = a.split_at_mut((i) * n);
                let row_k = &head[k * n + k + 1..k * n + n];
                let row_i = &mut tail[k + 1..n];
                for (x, y) in row_i.iter_mut().zip(row_k.iter()) {
                    *x -= factor * y;
                }
            }
        }
    }
    Ok(LuFactors { lu: a, piv, n })
}

impl LuFactors {
    /// Solve A x = b for one right-hand side.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        // Forward substitution (unit lower triangle).
        for i in 1..n {
            let (head, tail) = x.split_at_mut(i);
            let row = &self.lu[i * n..i * n + i];
            let mut acc = tail[0];
            for (l, xv) in row.iter().zip(head.iter()) {
                acc -= l * xv;
            }
            tail[0] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut(i + 1);
            let row = &self.lu[i * n + i + 1..i * n + n];
            let mut acc = head[i];
            for (l, xv) in row.iter().zip(tail.iter()) {
                acc -= l * xv;
            }
            head[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Full inverse, solved column by column from the single factorization.
    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut out = vec![zero; n * n];
        let mut col = vec![zero; n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if i == j { one } else { zero };
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[i * n + j] = x[i];
            }
        }
        ComplexMatrix::new(out, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        // A = [[2, i], [-i, 1]], x = [1, i] => b = A x = [2 + i*i, -i + i] = [1, 0] ... compute directly.
        let i = Complex64::new(0.0, 1.0);
        let a = vec![
            Complex64::new(2.0, 0.0),
            i,
            -i,
            Complex64::new(1.0, 0.0),
        ];
        let x_true = [Complex64::new(1.0, 0.0), i];
        let b = [
            a[0] * x_true[0] + a[1] * x_true[1],
            a[2] * x_true[0] + a[3] * x_true[1],
        ];
        let lu = lu_factor(a, 2).unwrap();
        let x = lu.solve(&b);
        for (xi, ti) in x.iter().zip(x_true.iter()) {
            assert!((xi - ti).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let n = 8;
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let re = ((3 * i + 5 * j) % 7) as f64 - 3.0;
                let im = ((2 * i + j) % 5) as f64 - 2.0;
                a[i * n + j] = Complex64::new(re, im);
            }
            a[i * n + i] += Complex64::new(10.0, 0.0);
        }
        let lu = lu_factor(a.clone(), n).unwrap();
        let inv = lu.inverse();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += a[i * n + k] * inv.entry(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (acc - expect).norm() < 1e-12,
                    "residual at ({i},{j}): {acc}"
                );
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let zero = Complex64::new(0.0, 0.0);
        let a = vec![zero; 4];
        assert!(matches!(lu_factor(a, 2), Err(Error::Numerical(_))));
    }
}
