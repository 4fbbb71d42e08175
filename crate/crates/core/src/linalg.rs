//! Dense complex matrices and the handful of factorizations the simulator needs.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::Config;
use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    /// Convenience for real-valued matrices.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub(crate) fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<_> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        c: &ComplexMatrix,
        d: &ComplexMatrix,
    ) -> Result<Self> {
        let n = a.rows;
        for blk in [a, b, c, d] {
            if blk.rows != n || blk.cols != n {
                return Err(Error::Dimension("blocks must share one square shape".into()));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, true) => c[(i - n, j)],
            (false, false) => d[(i - n, j - n)],
        }))
    }

    /// Direct sum `a ⊕ b`.
    pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let (r, c) = (a.rows + b.rows, a.cols + b.cols);
        Self::from_fn(r, c, |i, j| {
            if i < a.rows && j < a.cols {
                a[(i, j)]
            } else if i >= a.rows && j >= a.cols {
                b[(i - a.rows, j - a.cols)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Copies out the square block starting at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        Self::from_fn(size, size, |i, j| self[(row + i, col + j)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Largest entry modulus (the max-norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance; `f64::INFINITY` when shapes differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Infinity norm: largest absolute row sum.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn max_non_hermiticity(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::try_mul`] for checked products.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Shared wire format: a matrix is an array of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// In-place LU factors with partial pivoting: `P·m = L·U`, unit-diagonal `L`.
struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    /// +1 or -1 from row swaps.
    sign: f64,
    /// Smallest pivot magnitude met during elimination.
    min_pivot: f64,
}

fn lu_factor(m: &ComplexMatrix) -> Lu {
    let n = m.rows;
    let mut lu = m.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let (p, mag) = (k..n)
            .map(|i| (i, lu[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        min_pivot = min_pivot.min(mag);
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[k * n + k];
        if mag == 0.0 {
            // Column already eliminated; det is zero, nothing to divide by.
            continue;
        }
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            for j in k + 1..n {
                let ukj = lu[k * n + j];
                lu[i * n + j] -= factor * ukj;
            }
        }
    }
    Lu {
        n,
        lu,
        perm,
        sign,
        min_pivot,
    }
}

/// Determinant by LU with partial pivoting. The 0x0 determinant is 1.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    m.require_square("determinant")?;
    let f = lu_factor(m);
    let diag = (0..f.n).map(|i| f.lu[i * f.n + i]);
    Ok(diag.fold(Complex64::new(f.sign, 0.0), |acc, u| acc * u))
}

/// `ln|det m|`, for prefactors that would underflow in linear space.
pub fn log_abs_determinant(m: &ComplexMatrix) -> Result<f64> {
    m.require_square("determinant")?;
    let f = lu_factor(m);
    Ok((0..f.n).map(|i| f.lu[i * f.n + i].norm().ln()).sum())
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    inverse_with(m, &Config::DEFAULT)
}

/// Inverse via LU; aborts when a pivot falls below
/// `cfg.singular_pivot_rel` times the infinity norm of `m`.
pub fn inverse_with(m: &ComplexMatrix, cfg: &Config) -> Result<ComplexMatrix> {
    m.require_square("inverse")?;
    let n = m.rows;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let f = lu_factor(m);
    let threshold = cfg.singular_pivot_rel * m.max_row_norm();
    if !(f.min_pivot > threshold) {
        return Err(Error::Singular { pivot: f.min_pivot });
    }

    let mut inv = ComplexMatrix::zeros(n, n);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        // Solve L·U·x = P·e_c.
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = if f.perm[i] == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        for i in 0..n {
            let mut acc = col[i];
            for k in 0..i {
                acc -= f.lu[i * n + k] * col[k];
            }
            col[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = col[i];
            for k in i + 1..n {
                acc -= f.lu[i * n + k] * col[k];
            }
            col[i] = acc / f.lu[i * n + i];
        }
        for i in 0..n {
            inv[(i, c)] = col[i];
        }
    }
    Ok(inv)
}

/// True iff `m` is Hermitian within `tol` and its Hermitian part has a
/// Cholesky factorization whose pivots all exceed `tol`.
pub fn is_hermitian_positive_definite(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() || m.max_non_hermiticity() > tol {
        return false;
    }
    let n = m.rows;
    let herm = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = herm[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > tol) {
            return false;
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = herm[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    true
}

/// Picks rows and columns by index lists that may repeat; entry `(i, j)` of
/// the result is `m[(rows[i], cols[j])]`.
pub fn submatrix_by_multiset(
    m: &ComplexMatrix,
    row_indices: &[usize],
    col_indices: &[usize],
) -> Result<ComplexMatrix> {
    if let Some(&bad) = row_indices.iter().find(|&&i| i >= m.rows) {
        return Err(Error::Index {
            index: bad,
            bound: m.rows,
        });
    }
    if let Some(&bad) = col_indices.iter().find(|&&j| j >= m.cols) {
        return Err(Error::Index {
            index: bad,
            bound: m.cols,
        });
    }
    Ok(ComplexMatrix::from_fn(
        row_indices.len(),
        col_indices.len(),
        |i, j| m[(row_indices[i], col_indices[j])],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pseudo_random(n: usize, salt: u64) -> ComplexMatrix {
        let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    // Cofactor expansion along the first row.
    fn det_cofactor(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        if n == 0 {
            return c(1.0, 0.0);
        }
        let mut total = c(0.0, 0.0);
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
            let minor = submatrix_by_multiset(m, &rows, &cols).unwrap();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += m[(0, j)] * det_cofactor(&minor) * sign;
        }
        total
    }

    #[test]
    fn determinant_identity_and_diagonal() {
        assert_eq!(determinant(&ComplexMatrix::identity(3)).unwrap(), c(1.0, 0.0));
        let d = ComplexMatrix::from_real_diagonal(&[2.0, 3.0]);
        assert!((determinant(&d).unwrap() - c(6.0, 0.0)).norm() < 1e-15);
        assert_eq!(determinant(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        for salt in 1..6 {
            let m = pseudo_random(4, salt);
            let lu = determinant(&m).unwrap();
            let oracle = det_cofactor(&m);
            assert!((lu - oracle).norm() <= 1e-12 * oracle.norm(), "{lu} vs {oracle}");
        }
    }

    #[test]
    fn determinant_of_singular_matrix_is_zero() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(determinant(&m).unwrap().norm() < 1e-15);
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(determinant(&z).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn non_square_rejected() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(determinant(&m), Err(Error::Dimension(_))));
        assert!(matches!(inverse(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn inverse_small_cases() {
        let id = ComplexMatrix::identity(4);
        assert_eq!(inverse(&id).unwrap().max_abs_diff(&id), 0.0);
        let d = ComplexMatrix::from_real_diagonal(&[2.0, 4.0]);
        let want = ComplexMatrix::from_real_diagonal(&[0.5, 0.25]);
        assert!(inverse(&d).unwrap().max_abs_diff(&want) < 1e-16);
    }

    #[test]
    fn inverse_residual() {
        let m = &pseudo_random(6, 42) + &ComplexMatrix::identity(6).scale(c(2.0, 0.0));
        let inv = inverse(&m).unwrap();
        let resid = (&m * &inv).max_abs_diff(&ComplexMatrix::identity(6));
        assert!(resid <= 1e-10, "residual {resid}");
    }

    #[test]
    fn singular_inverse_reports_pivot() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0 + 1e-14]]).unwrap();
        match inverse(&m) {
            Err(Error::Singular { pivot }) => assert!(pivot < 1e-12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn positive_definiteness() {
        assert!(is_hermitian_positive_definite(&ComplexMatrix::identity(3), 1e-10));
        let indefinite = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(!is_hermitian_positive_definite(&indefinite, 1e-10));
        let non_herm = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(!is_hermitian_positive_definite(&non_herm, 1e-10));
        let herm = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(is_hermitian_positive_definite(&herm, 1e-10));
        assert!(!is_hermitian_positive_definite(&ComplexMatrix::zeros(2, 3), 1e-10));
    }

    #[test]
    fn submatrix_selection() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| c((4 * i + j) as f64, 0.0));
        let s = submatrix_by_multiset(&m, &[0, 2], &[0, 2]).unwrap();
        let want = ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![8.0, 10.0]]).unwrap();
        assert_eq!(s, want);

        let rep = submatrix_by_multiset(&m, &[1, 1], &[1, 1]).unwrap();
        assert!(rep.entries().iter().all(|&z| z == c(5.0, 0.0)));

        assert_eq!(
            submatrix_by_multiset(&m, &[0, 4], &[0]),
            Err(Error::Index { index: 4, bound: 4 })
        );
    }

    #[test]
    fn submatrix_repetition_on_single_mode_sampling_matrix() {
        let t = 0.5f64.tanh();
        let a = ComplexMatrix::from_real_diagonal(&[t, t]);
        let s = submatrix_by_multiset(&a, &[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap();
        let want = ComplexMatrix::from_real_rows(&[
            vec![t, t, 0.0, 0.0],
            vec![t, t, 0.0, 0.0],
            vec![0.0, 0.0, t, t],
            vec![0.0, 0.0, t, t],
        ])
        .unwrap();
        assert_eq!(s, want);
    }

    #[test]
    fn construction_rejects_non_finite() {
        let data = vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(
            ComplexMatrix::new(2, 2, data),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn serde_wire_format() {
        let m = ComplexMatrix::from_rows(vec![vec![c(1.0, -2.0), c(0.5, 0.0)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[1,0],[2,0]]]").is_err());
    }
}
