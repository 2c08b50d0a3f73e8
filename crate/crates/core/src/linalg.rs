//! Dense complex matrices and the small-matrix eigensolvers the rest of the
//! crate is built on: a cyclic Jacobi diagonalizer for Hermitian matrices, a
//! singular value routine based on the Hermitian block embedding, and rank of
//! real constraint matrices by row elimination.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = CMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Projector |v><v| of a (not necessarily normalized) vector.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = CMat::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= s;
        }
        m
    }

    pub fn add(&self, other: &CMat) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        m
    }

    pub fn sub(&self, other: &CMat) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v -= w;
        }
        m
    }

    pub fn matmul(&self, other: &CMat) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut m = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v = v.conj();
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn kron(&self, other: &CMat) -> Self {
        let mut m = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matrix of eigenvectors
/// (columns), so that `a = V diag(w) V^dagger` up to roundoff.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    // symmetrize against tiny input noise
    for i in 0..n {
        for j in 0..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
        }
    }
    let mut v = CMat::identity(n);
    let scale = m.max_abs().max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let napq = apq.norm();
                if napq < 1e-18 * scale {
                    continue;
                }
                // phase that makes the pivot real, then a real Jacobi rotation
                let phase = apq / napq;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * napq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p,q of the unitary: |p'> = c|p> - s*conj(phase)|q>, |q'> = s*phase|p> + c|q>
                let sp = phase * s;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * sp.conj();
                    m[(k, q)] = mkp * sp + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * sp;
                    m[(q, k)] = mpk * sp.conj() + mqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sp.conj();
                    v[(k, q)] = vkp * sp + vkq * c;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let w: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    idx.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap());
    let ws: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
    let mut vs = CMat::zeros(n, n);
    for (newc, &oldc) in idx.iter().enumerate() {
        for r in 0..n {
            vs[(r, newc)] = v[(r, oldc)];
        }
    }
    (ws, vs)
}

/// Eigenvalues only, descending.
pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    eigh(a).0
}

/// Hermitian square root of a PSD matrix; small negative eigenvalues are
/// clamped to zero.
pub fn sqrtm_psd(a: &CMat) -> CMat {
    let n = a.rows;
    let (w, v) = eigh(a);
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        let s = w[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += v[(i, k)] * v[(j, k)].conj() * s;
            }
        }
    }
    m
}

/// Singular values of a square complex matrix, descending, by one-sided
/// Jacobi orthogonalization of the columns.
///
/// Never forms K^dagger K, so small singular values keep absolute accuracy at
/// machine precision instead of the sqrt(eps) loss of the squared route.
pub fn singular_values(k: &CMat) -> Vec<f64> {
    let n = k.cols;
    let mut u = k.clone();
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = C64::new(0.0, 0.0);
                for r in 0..u.rows {
                    let up = u[(r, p)];
                    let uq = u[(r, q)];
                    app += up.norm_sqr();
                    aqq += uq.norm_sqr();
                    apq += up.conj() * uq;
                }
                let napq = apq.norm();
                if napq <= 1e-15 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                converged = false;
                let phase = apq / napq;
                let tau = (aqq - app) / (2.0 * napq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s;
                for r in 0..u.rows {
                    let up = u[(r, p)];
                    let uq = u[(r, q)];
                    u[(r, p)] = up * c - uq * sp.conj();
                    u[(r, q)] = up * sp + uq * c;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n)
        .map(|j| (0..u.rows).map(|r| u[(r, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Rank of a complex matrix as the number of singular values above
/// `tol * max_singular_value`, computed from eig(A^dagger A) with a squared
/// threshold (adequate for rank counting at tolerances well above sqrt(eps)).
pub fn rank_complex(a: &CMat, tol: f64) -> usize {
    let h = a.dagger().matmul(a);
    let w = eigvalsh(&h);
    let top = w.first().copied().unwrap_or(0.0).max(0.0);
    if top == 0.0 {
        return 0;
    }
    w.iter().filter(|&&x| x > tol * tol * top).count()
}

/// Rank of a real matrix (rows are constraints) by Gaussian elimination with
/// partial pivoting.
pub fn rank_real(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let ncols = a[0].len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        let mut piv = row;
        for r in row..a.len() {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if piv >= a.len() || a[piv][col].abs() <= tol * scale {
            continue;
        }
        a.swap(row, piv);
        let lead = a[row][col];
        let pivot_row = a[row].clone();
        for below in a.iter_mut().skip(row + 1) {
            let f = below[col] / lead;
            if f != 0.0 {
                for (x, p) in below[col..ncols].iter_mut().zip(&pivot_row[col..ncols]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == a.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_diagonal_is_identity_transform() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(-1.0, 0.0);
        a[(2, 2)] = c(0.5, 0.0);
        let (w, _) = eigh(&a);
        assert_abs_diff_eq!(w[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w[2], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        // pseudo random Hermitian matrix, fixed entries
        let vals = [
            [c(1.3, 0.0), c(0.2, 0.7), c(-0.4, 0.1), c(0.0, -0.9)],
            [c(0.2, -0.7), c(-0.5, 0.0), c(0.8, 0.3), c(0.1, 0.0)],
            [c(-0.4, -0.1), c(0.8, -0.3), c(2.1, 0.0), c(-0.6, 0.2)],
            [c(0.0, 0.9), c(0.1, 0.0), c(-0.6, -0.2), c(0.9, 0.0)],
        ];
        let a = CMat::from_rows(&[&vals[0], &vals[1], &vals[2], &vals[3]]);
        let (w, v) = eigh(&a);
        // residual of A v_k = w_k v_k
        for k in 0..4 {
            let col: Vec<C64> = (0..4).map(|i| v[(i, k)]).collect();
            let av = a.apply(&col);
            for i in 0..4 {
                assert!((av[i] - col[i] * w[k]).norm() < 1e-12, "eigpair residual too large");
            }
        }
        // trace and Frobenius checks
        let tr: f64 = w.iter().sum();
        assert_abs_diff_eq!(tr, a.trace().re, epsilon = 1e-12);
    }

    #[test]
    fn singular_values_of_projector_scale() {
        let mut k = CMat::zeros(2, 2);
        k[(0, 0)] = c(3.0, 0.0);
        k[(1, 1)] = c(0.0, -2.0);
        let s = singular_values(&k);
        assert_abs_diff_eq!(s[0], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s[1], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn sqrtm_squares_back() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(0, 1)] = c(0.5, 0.5);
        a[(1, 0)] = c(0.5, -0.5);
        a[(1, 1)] = c(1.0, 0.0);
        let s = sqrtm_psd(&a);
        let s2 = s.matmul(&s);
        assert!(s2.sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn rank_real_detects_dependent_rows() {
        let rows = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, 1.0],
        ];
        assert_eq!(rank_real(&rows, 1e-10), 2);
        assert_eq!(rank_real(&[], 1e-10), 0);
    }

    #[test]
    fn rank_complex_counts_support() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1e-14, 0.0);
        assert_eq!(rank_complex(&a, 1e-10), 1);
    }
}
