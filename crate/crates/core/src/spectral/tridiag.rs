//! Householder reduction to real symmetric tridiagonal form and
//! implicit-shift QL eigenvalue iteration.
//!
//! The reduction works on the full dense matrix (both triangles) so the hot
//! loops are contiguous row traversals; no transformation vectors are
//! accumulated since the Monte Carlo pipeline only needs eigenvalues. The
//! complex Hermitian path uses complex reflectors and records off-diagonal
//! magnitudes: the resulting real tridiagonal matrix is unitarily similar
//! to the input via a diagonal phase matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix: `diag` of length n, `offdiag[i]`
/// couples entries i and i+1.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

/// Householder reduction of a real symmetric matrix (row-major, destroyed).
pub fn tridiagonalize_real(a: &mut [f64], n: usize) -> Tridiagonal {
    assert_eq!(a.len(), n * n);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    if n == 1 {
        diag[0] = a[0];
        return Tridiagonal {
            diag,
            offdiag: off,
        };
    }

    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;

        let mut norm2 = 0.0;
        for i in 0..m {
            let x = a[(base + i) * n + k];
            u[i] = x;
            norm2 += x * x;
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = u[0];
        let sign = if x0 >= 0.0 { 1.0 } else { -1.0 };
        off[k] = -sign * norm;
        u[0] = x0 + sign * norm;
        let beta = 1.0 / (norm * (norm + x0.abs()));

        // p = beta * B u over the trailing block B = a[base.., base..].
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + base + m];
            let mut acc = 0.0;
            for (aij, uj) in row.iter().zip(u[..m].iter()) {
                acc += aij * uj;
            }
            p[i] = beta * acc;
        }
        // w = p - (beta/2)(u.p) u
        let mut up = 0.0;
        for i in 0..m {
            up += u[i] * p[i];
        }
        let kappa = 0.5 * beta * up;
        for i in 0..m {
            p[i] -= kappa * u[i];
        }
        // B -= u w^T + w u^T
        for i in 0..m {
            let ui = u[i];
            let wi = p[i];
            let row = &mut a[(base + i) * n + base..(base + i) * n + base + m];
            for ((aij, &uj), &wj) in row.iter_mut().zip(u[..m].iter()).zip(p[..m].iter()) {
                *aij -= ui * wj + wi * uj;
            }
        }
    }

    for i in 0..n {
        diag[i] = a[i * n + i];
    }
    off[n - 2] = a[(n - 1) * n + (n - 2)];
    Tridiagonal {
        diag,
        offdiag: off,
    }
}

/// Householder reduction of a complex Hermitian matrix (row-major,
/// destroyed). Off-diagonals are stored as magnitudes.
pub fn tridiagonalize_hermitian(a: &mut [Complex64], n: usize) -> Tridiagonal {
    assert_eq!(a.len(), n * n);
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    if n == 1 {
        diag[0] = a[0].re;
        return Tridiagonal {
            diag,
            offdiag: off,
        };
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;

        let mut norm2 = 0.0;
        for i in 0..m {
            let x = a[(base + i) * n + k];
            u[i] = x;
            norm2 += x.norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = u[0];
        let x0_abs = x0.norm();
        let phase = if x0_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0_abs
        };
        off[k] = norm;
        u[0] = x0 + phase * norm;
        let beta = 1.0 / (norm * (norm + x0_abs));

        // p = beta * B u
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + base + m];
            let mut acc = zero;
            for (aij, uj) in row.iter().zip(u[..m].iter()) {
                acc += aij * uj;
            }
            p[i] = beta * acc;
        }
        // w = p - (beta/2)(u* p) u; the Hermitian form u* B u is real.
        let mut up = zero;
        for i in 0..m {
            up += u[i].conj() * p[i];
        }
        let kappa = 0.5 * beta * up.re;
        for i in 0..m {
            p[i] -= kappa * u[i];
        }
        // B -= u w* + w u*
        for i in 0..m {
            let ui = u[i];
            let wi = p[i];
            let row = &mut a[(base + i) * n + base..(base + i) * n + base + m];
            for ((aij, &uj), &wj) in row.iter_mut().zip(u[..m].iter()).zip(p[..m].iter()) {
                *aij -= ui * wj.conj() + wi * uj.conj();
            }
        }
    }

    for i in 0..n {
        diag[i] = a[i * n + i].re;
    }
    off[n - 2] = a[(n - 1) * n + (n - 2)].norm();
    Tridiagonal {
        diag,
        offdiag: off,
    }
}

const MAX_SWEEPS: usize = 50;

/// Eigenvalues of a real symmetric tridiagonal matrix by the implicit-shift
/// QL iteration with Wilkinson shift. Deflation uses the criterion
/// |e_i| <= (|d_i| + |d_{i+1}|) * machine epsilon. Returns the eigenvalues
/// sorted ascending.
pub fn tridiagonal_eigenvalues(t: &Tridiagonal) -> Result<Vec<f64>> {
    let n = t.diag.len();
    let mut d = t.diag.clone();
    // Sentinel slot keeps the sweep indexing uniform.
    let mut e = vec![0.0; n];
    e[..n - 1.min(n)].copy_from_slice(&t.offdiag[..n.saturating_sub(1)]);

    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= dd * eps {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::numerical(format!(
                    "tridiagonal QL failed to converge for eigenvalue {l} after {MAX_SWEEPS} sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    d.sort_unstable_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}
