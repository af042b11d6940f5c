//! Dense matrices over a scalar backend, exact linear solving, and a small
//! self-contained symmetric eigensolver for the float-mode positivity checks.
//!
//! Design notes:
//! - The exact solver is plain Gauss-Jordan over the field with
//!   largest-|pivot| selection. Over big rationals this is exact; rank and
//!   consistency fall out of the elimination and are reported honestly
//!   instead of being patched over.
//! - The eigensolver (Householder tridiagonalization + Sturm-count bisection)
//!   only ever sees matrices of size <= 32, so clarity wins over blocking.

use crate::error::{DunklError, Result};
use crate::poly::{Polynomial, Vector};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vector(&self, j: usize) -> Vector<S> {
        Vector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    /// Columns as vectors; for an orthogonal `g` these are the rows of
    /// `g^-1 = g^T`, which is what the polynomial action needs.
    pub fn col_vectors(&self) -> Vec<Vector<S>> {
        (0..self.cols).map(|j| self.col_vector(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.mul_ref(other.get(k, j));
                    out.get_mut(i, j).add_assign_ref(&prod);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() {
                        acc.add_assign_ref(&a.mul_ref(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn matvec_vector(&self, v: &Vector<S>) -> Vector<S> {
        Vector(self.matvec(&v.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        }
    }

    /// Entrywise match modulo the mode's negligibility tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.sub_ref(b).is_negligible())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && self.approx_eq(&Self::identity(self.rows))
    }

    /// `M^T M == I` up to the mode tolerance.
    pub fn is_orthogonal(&self) -> bool {
        self.rows == self.cols && self.transpose().mul(self).is_identity()
    }

    /// Apply as a linear change of variables: returns `x -> p(self^-1 x)`,
    /// valid for orthogonal matrices (inverse = transpose).
    pub fn act_on_polynomial(&self, p: &Polynomial<S>) -> Polynomial<S> {
        debug_assert!(
            self.is_orthogonal(),
            "polynomial action needs orthogonality"
        );
        p.substitute_linear(&self.col_vectors())
    }

    /// Total order on matrices for exact-mode dedup maps.
    pub fn key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter().zip(&other.data) {
            let ord = a.key_cmp(b);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Outcome of an exact linear solve with multiple right-hand sides.
pub enum SolveOutcome<S> {
    /// Full column rank and consistent: one solution vector per RHS column.
    Unique { solutions: Vec<Vec<S>> },
    /// Rank-deficient or inconsistent system.
    Singular { rank: usize, inconsistent: bool },
}

/// Gauss-Jordan elimination of `a` against many right-hand sides.
/// `rhs` holds columns, each of length `a.rows()`.
pub fn solve_columns<S: Scalar>(a: &Matrix<S>, rhs: &[Vec<S>]) -> Result<SolveOutcome<S>> {
    let m = a.rows();
    let n = a.cols();
    let k = rhs.len();
    for (j, col) in rhs.iter().enumerate() {
        if col.len() != m {
            return Err(DunklError::DimensionMismatch(format!(
                "rhs column {j} has length {} but the matrix has {m} rows",
                col.len()
            )));
        }
    }
    // working augmented matrix [A | B]
    let mut w: Vec<Vec<S>> = (0..m)
        .map(|i| {
            let mut row: Vec<S> = a.row(i).to_vec();
            for col in rhs {
                row.push(col[i].clone());
            }
            row
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0usize;
    for col in 0..n {
        // largest |entry| at or below next_row
        let mut best: Option<usize> = None;
        for (r, row) in w.iter().enumerate().skip(next_row) {
            if row[col].is_negligible() {
                continue;
            }
            match best {
                None => best = Some(r),
                Some(b) => {
                    if w[b][col].abs().key_cmp(&row[col].abs()) == std::cmp::Ordering::Less {
                        best = Some(r);
                    }
                }
            }
        }
        let Some(prow) = best else { continue };
        w.swap(next_row, prow);
        // eliminate everywhere else
        let pivot_row = w[next_row].clone();
        let pivot = pivot_row[col].clone();
        for (r, row) in w.iter_mut().enumerate() {
            if r == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].div_ref(&pivot);
            for (rv, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                let delta = factor.mul_ref(pv);
                *rv = rv.sub_ref(&delta);
            }
            row[col] = S::zero(); // exact by construction; clears float dust
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == m {
            break;
        }
    }

    let rank = pivots.len();
    // consistency: a zero row of A with nonzero RHS entries is a contradiction
    let mut inconsistent = false;
    for row in w.iter().skip(rank) {
        let lhs_zero = row[..n].iter().all(|v| v.is_negligible());
        let rhs_nonzero = row[n..].iter().any(|v| !v.is_negligible());
        if lhs_zero && rhs_nonzero {
            inconsistent = true;
            break;
        }
    }
    if rank < n || inconsistent {
        return Ok(SolveOutcome::Singular { rank, inconsistent });
    }
    let mut solutions = vec![vec![S::zero(); n]; k];
    for &(prow, pcol) in &pivots {
        let pivot = &w[prow][pcol];
        for (j, sol) in solutions.iter_mut().enumerate() {
            sol[pcol] = w[prow][n + j].div_ref(pivot);
        }
    }
    Ok(SolveOutcome::Unique { solutions })
}

// ---------------------------------------------------------------------------
// symmetric f64 eigenvalues (tridiagonalization + bisection)
// ---------------------------------------------------------------------------

/// Householder reduction of a symmetric matrix to tridiagonal form;
/// returns (diagonal, subdiagonal).
fn tridiagonalize(a: &Matrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "square matrix required");
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for k in 0..n.saturating_sub(2) {
        // column below the subdiagonal
        let norm_below: f64 = (k + 1..n).map(|i| m[i][k] * m[i][k]).sum::<f64>().sqrt();
        if norm_below < 1e-300 {
            continue;
        }
        let mut v = vec![0.0f64; n];
        let sign = if m[k + 1][k] >= 0.0 { 1.0 } else { -1.0 };
        v[k + 1] = m[k + 1][k] + sign * norm_below;
        for i in k + 2..n {
            v[i] = m[i][k];
        }
        let vnorm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // m := H m H with H = I - 2 v v^T
        // left: m -= 2 v (v^T m)
        let vt_m: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| v[i] * m[i][j]).sum())
            .collect();
        for i in 0..n {
            for j in 0..n {
                m[i][j] -= 2.0 * v[i] * vt_m[j];
            }
        }
        // right: m -= 2 (m v) v^T
        let m_v: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * v[j]).sum())
            .collect();
        for i in 0..n {
            for j in 0..n {
                m[i][j] -= 2.0 * m_v[i] * v[j];
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| m[i + 1][i]).collect();
    (d, e)
}

/// Number of eigenvalues strictly below `x` (Sturm count via LDL^T signs).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    const PIVMIN: f64 = 1e-290;
    let mut count = 0usize;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        let e2 = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        let denom = if q.abs() < PIVMIN {
            if q < 0.0 {
                -PIVMIN
            } else {
                PIVMIN
            }
        } else {
            q
        };
        q = d[i] - x - e2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric matrix, ascending. Accurate to roughly
/// machine precision relative to the spectral radius; intended for n <= 32.
pub fn symmetric_eigenvalues(a: &Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![*a.get(0, 0)];
    }
    let (d, e) = tridiagonalize(a);
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r =
            if i == 0 { 0.0 } else { e[i - 1].abs() } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    lo -= pad;
    hi += pad;
    (0..n)
        .map(|j| {
            let mut a = lo;
            let mut b = hi;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if sturm_count(&d, &e, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn symmetric_eigen_min(a: &Matrix<f64>) -> f64 {
    symmetric_eigenvalues(a)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn matrix_basics() {
        let a: Matrix<Rat> =
            Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]]);
        let i2: Matrix<Rat> = Matrix::identity(2);
        assert_eq!(a.mul(&i2), a);
        assert_eq!(
            a.matvec(&[rat(1, 1), rat(1, 1)]),
            vec![rat(3, 1), rat(7, 1)]
        );
        assert_eq!(a.transpose().get(0, 1), &rat(3, 1));
        assert!(!a.is_orthogonal());
        // a rotation by integer right angle is orthogonal
        let rot: Matrix<Rat> = Matrix::from_rows(vec![
            vec![rat(0, 1), rat(-1, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ]);
        assert!(rot.is_orthogonal());
    }

    #[test]
    fn solve_unique_exact() {
        // x + 2y = 5, 3x + 4y = 11  =>  x = 1, y = 2
        let a: Matrix<Rat> =
            Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]]);
        match solve_columns(&a, &[vec![rat(5, 1), rat(11, 1)]]).unwrap() {
            SolveOutcome::Unique { solutions } => {
                assert_eq!(solutions[0], vec![rat(1, 1), rat(2, 1)]);
            }
            _ => panic!("expected unique solution"),
        }
    }

    #[test]
    fn solve_overdetermined_consistent_and_not() {
        // rows: [1,0],[0,1],[1,1]; b = (1,2,3) consistent; (1,2,4) not
        let a: Matrix<Rat> = Matrix::from_rows(vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ]);
        match solve_columns(&a, &[vec![rat(1, 1), rat(2, 1), rat(3, 1)]]).unwrap() {
            SolveOutcome::Unique { solutions } => {
                assert_eq!(solutions[0], vec![rat(1, 1), rat(2, 1)])
            }
            _ => panic!("expected unique"),
        }
        match solve_columns(&a, &[vec![rat(1, 1), rat(2, 1), rat(4, 1)]]).unwrap() {
            SolveOutcome::Singular { rank, inconsistent } => {
                assert_eq!(rank, 2);
                assert!(inconsistent);
            }
            _ => panic!("expected inconsistency to be detected"),
        }
    }

    #[test]
    fn solve_rank_deficient() {
        let a: Matrix<Rat> =
            Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]);
        match solve_columns(&a, &[vec![rat(1, 1), rat(2, 1)]]).unwrap() {
            SolveOutcome::Singular { rank, inconsistent } => {
                assert_eq!(rank, 1);
                assert!(!inconsistent); // b is in the column space
            }
            _ => panic!("rank deficiency must be reported"),
        }
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let ev = symmetric_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        // all-ones 3x3: eigenvalues {0, 0, 3}
        let ones = Matrix::from_rows(vec![vec![1.0; 3]; 3]);
        let ev = symmetric_eigenvalues(&ones);
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - 3.0).abs() < 1e-12);
        // diagonal passthrough, unsorted input
        let d = Matrix::from_rows(vec![
            vec![5.0, 0.0, 0.0],
            vec![0.0, -2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let ev = symmetric_eigenvalues(&d);
        assert!((ev[0] + 2.0).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12);
        assert!((ev[2] - 5.0).abs() < 1e-12);
        assert!((symmetric_eigen_min(&d) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_tough_case_4x4() {
        // tridiagonal with known spectrum: second-difference matrix,
        // eigenvalues 2 - 2 cos(k pi / 5), k = 1..4
        let mut a = Matrix::zero(4, 4);
        for i in 0..4 {
            a.set(i, i, 2.0);
            if i + 1 < 4 {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let ev = symmetric_eigenvalues(&a);
        for (k, v) in ev.iter().enumerate() {
            let expect = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 5.0).cos();
            assert!((v - expect).abs() < 1e-12, "k={k}: {v} vs {expect}");
        }
    }
}
