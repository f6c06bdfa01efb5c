//! Small dense and banded linear algebra: 2×2 matrices for mode analysis and
//! a pivoted tridiagonal solver for the elliptic Newton step.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[f64; 2]; 2]);

/// Eigenvalues of a real 2×2 matrix as `(re, im)` pairs, larger real part first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Matrix2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2([[a11, a12], [a21, a22]])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Matrix2::new(a, 0.0, 0.0, b)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn sub(&self, other: &Matrix2) -> Matrix2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= other.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix2 {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|a| *a *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Eigenvalues from the characteristic polynomial `λ² - tr λ + det`.
    pub fn eigenvalues(&self) -> Eigen2 {
        let tr = self.trace();
        let det = self.det();
        let disc = 0.25 * tr * tr - det;
        if disc >= 0.0 {
            let s = libm::sqrt(disc);
            // avoid cancellation in the smaller root
            let big = 0.5 * tr + if tr >= 0.0 { s } else { -s };
            let small = if big != 0.0 { det / big } else { 0.0 };
            let (a, b) = if big >= small { (big, small) } else { (small, big) };
            Eigen2 { re: [a, b], im: [0.0, 0.0] }
        } else {
            let s = libm::sqrt(-disc);
            Eigen2 { re: [0.5 * tr, 0.5 * tr], im: [s, -s] }
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        let e = self.eigenvalues();
        (0..2)
            .map(|k| libm::hypot(e.re[k], e.im[k]))
            .fold(0.0, f64::max)
    }

    /// Largest eigenvalue of the symmetric part; bounds the real parts of
    /// the spectrum of `self - D` for any `D ≥ 0`.
    pub fn log_norm(&self) -> f64 {
        let a = self.0[0][0];
        let d = self.0[1][1];
        let b = 0.5 * (self.0[0][1] + self.0[1][0]);
        0.5 * (a + d) + libm::hypot(0.5 * (a - d), b)
    }
}

impl Eigen2 {
    pub fn max_re(&self) -> f64 {
        self.re[0].max(self.re[1])
    }
}

/// Solves a tridiagonal system with partial pivoting (LAPACK `gtsv` layout).
///
/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to
/// column `i + 1`. Returns `None` when a pivot vanishes.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n || rhs.len() != n {
        return None;
    }
    let mut dl = sub.to_vec();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .fold(0.0_f64, |m, a| m.max(a.abs()));
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() <= tiny {
                return None;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    if d[n - 1].abs() <= tiny {
        return None;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(sub: &[f64], diag: &[f64], sup: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn tridiagonal_needs_pivoting() {
        // zero leading diagonal entry forces a row swap
        let sub = [1.0, 2.0, -1.0];
        let diag = [0.0, 1.0, -3.0, 2.0];
        let sup = [4.0, 1.0, 0.5];
        let x = [1.0, -2.0, 0.5, 3.0];
        let b = dense_mul(&sub, &diag, &sup, &x);
        let sol = solve_tridiagonal(&sub, &diag, &sup, &b).unwrap();
        for (a, e) in sol.iter().zip(x) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn tridiagonal_singular() {
        let sol = solve_tridiagonal(&[1.0], &[1.0, 1.0], &[1.0], &[1.0, 2.0]);
        assert!(sol.is_none());
    }

    #[test]
    fn eigenvalues_real_and_complex() {
        let m = Matrix2::new(2.0, 0.0, 0.0, -3.0);
        let e = m.eigenvalues();
        assert_eq!(e.re, [2.0, -3.0]);
        let rot = Matrix2::new(-1.0, -2.0, 2.0, -1.0);
        let e = rot.eigenvalues();
        assert_eq!(e.re, [-1.0, -1.0]);
        assert!((e.im[0] - 2.0).abs() < 1e-15);
        assert!((rot.spectral_radius() - libm::sqrt(5.0)).abs() < 1e-14);
    }

    #[test]
    fn log_norm_bounds_real_parts() {
        let m = Matrix2::new(-0.62, -0.81, 0.02, -0.09);
        assert!(m.eigenvalues().max_re() <= m.log_norm());
    }
}
