//! Exact hafnians and permanents.
//!
//! Two hafnian routines are kept on purpose: [`hafnian_pmp`] walks every perfect
//! matching one by one, while [`hafnian_recursive`] expands along the lowest
//! remaining index and memoizes on the set of indices still unmatched. They share
//! no code beyond input validation, so each serves as an oracle for the other.

use num_complex::Complex64;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Validated hafnian input; `None` means the dimension is odd and the hafnian is 0.
fn prepare(a: &ComplexMatrix, cfg: &Config) -> Result<Option<ComplexMatrix>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "hafnian needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dim = a.rows();
    if dim % 2 == 1 {
        return Ok(None);
    }
    let asymmetry = a.max_asymmetry();
    if asymmetry > cfg.symmetry_tol {
        return Err(Error::Asymmetric { asymmetry });
    }
    if dim > cfg.hafnian_cap {
        return Err(Error::HafnianCap {
            dim,
            cap: cfg.hafnian_cap,
        });
    }
    if asymmetry == 0.0 {
        Ok(Some(a.clone()))
    } else {
        Ok(Some(ComplexMatrix::from_fn(dim, dim, |i, j| {
            (a[(i, j)] + a[(j, i)]) * 0.5
        })))
    }
}

/// Hafnian used by the probability code (memoized expansion, default config).
pub fn hafnian(a: &ComplexMatrix) -> Result<Complex64> {
    hafnian_recursive_with(a, &Config::DEFAULT)
}

pub fn hafnian_pmp(a: &ComplexMatrix) -> Result<Complex64> {
    hafnian_pmp_with(a, &Config::DEFAULT)
}

/// Sum over all `(2n-1)!!` perfect matchings of the product of matched entries.
///
/// Matchings are produced depth-first, always pairing the lowest unmatched
/// index first, so the summation order is fixed and results are bit-reproducible.
pub fn hafnian_pmp_with(a: &ComplexMatrix, cfg: &Config) -> Result<Complex64> {
    let Some(a) = prepare(a, cfg)? else {
        return Ok(ZERO);
    };
    let dim = a.rows();
    let mut matched = vec![false; dim];
    let mut total = ZERO;
    enumerate_matchings(&a, &mut matched, ONE, &mut total);
    Ok(total)
}

fn enumerate_matchings(a: &ComplexMatrix, matched: &mut [bool], product: Complex64, total: &mut Complex64) {
    let Some(first) = matched.iter().position(|&m| !m) else {
        *total += product;
        return;
    };
    matched[first] = true;
    for partner in first + 1..matched.len() {
        if matched[partner] {
            continue;
        }
        matched[partner] = true;
        enumerate_matchings(a, matched, product * a[(first, partner)], total);
        matched[partner] = false;
    }
    matched[first] = false;
}

pub fn hafnian_recursive(a: &ComplexMatrix) -> Result<Complex64> {
    hafnian_recursive_with(a, &Config::DEFAULT)
}

/// First-row expansion `Haf(a) = Σ_j a(0, j) · Haf(a without rows/cols 0 and j)`,
/// memoized on the bitmask of indices that are still unmatched.
pub fn hafnian_recursive_with(a: &ComplexMatrix, cfg: &Config) -> Result<Complex64> {
    let Some(a) = prepare(a, cfg)? else {
        return Ok(ZERO);
    };
    let dim = a.rows();
    if dim == 0 {
        return Ok(ONE);
    }
    let mut memo: Vec<Option<Complex64>> = vec![None; 1usize << dim];
    memo[0] = Some(ONE);
    let full = (1u32 << dim) - 1;
    Ok(expand(&a, full, &mut memo))
}

fn expand(a: &ComplexMatrix, remaining: u32, memo: &mut [Option<Complex64>]) -> Complex64 {
    if let Some(v) = memo[remaining as usize] {
        return v;
    }
    let first = remaining.trailing_zeros() as usize;
    let rest = remaining & !(1 << first);
    let mut sum = ZERO;
    let mut candidates = rest;
    while candidates != 0 {
        let j = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let entry = a[(first, j)];
        if entry != ZERO {
            sum += entry * expand(a, rest & !(1 << j), memo);
        }
    }
    memo[remaining as usize] = Some(sum);
    sum
}

/// Ryser's inclusion-exclusion formula, visiting column subsets in Gray-code
/// order so each step updates the row sums with a single column.
pub fn permanent_ryser(g: &ComplexMatrix) -> Result<Complex64> {
    if !g.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows();
    if n == 0 {
        return Ok(ONE);
    }
    if n >= 63 {
        return Err(Error::Dimension(format!("{n}x{n} permanent is out of reach")));
    }
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += g[(i, col)];
            } else {
                *s -= g[(i, col)];
            }
        }
        gray = next;
        let prod = row_sums.iter().fold(ONE, |acc, &s| acc * s);
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// `[[0, g], [gᵗ, 0]]`, whose hafnian is the permanent of `g`.
pub fn permanent_embedding(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !g.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows();
    let zero = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(&zero, g, &g.transpose(), &zero)
}

/// Permanent of `g` evaluated as the hafnian of its bipartite embedding.
pub fn hafnian_via_permanent_embedding(g: &ComplexMatrix) -> Result<Complex64> {
    hafnian_pmp(&permanent_embedding(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| ONE)
    }

    #[test]
    fn empty_and_two_by_two() {
        let empty = ComplexMatrix::zeros(0, 0);
        assert_eq!(hafnian_pmp(&empty).unwrap(), ONE);
        assert_eq!(hafnian_recursive(&empty).unwrap(), ONE);
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(hafnian_pmp(&m).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(hafnian_recursive(&m).unwrap(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn all_ones_counts_matchings() {
        // (2n-1)!! for 2n = 4, 6, 8
        for (dim, count) in [(4, 3.0), (6, 15.0), (8, 105.0)] {
            assert_eq!(hafnian_pmp(&ones(dim)).unwrap(), Complex64::new(count, 0.0));
            assert_eq!(hafnian_recursive(&ones(dim)).unwrap(), Complex64::new(count, 0.0));
        }
    }

    #[test]
    fn odd_dimension_is_zero() {
        assert_eq!(hafnian_pmp(&ones(3)).unwrap(), ZERO);
        assert_eq!(hafnian_recursive(&ones(5)).unwrap(), ZERO);
    }

    #[test]
    fn non_square_is_an_error() {
        let m = ComplexMatrix::zeros(2, 4);
        assert!(matches!(hafnian_pmp(&m), Err(Error::Dimension(_))));
        assert!(matches!(hafnian_recursive(&m), Err(Error::Dimension(_))));
        assert!(matches!(permanent_ryser(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn symmetry_tolerance() {
        let slightly = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-12, 0.0]]).unwrap();
        let h = hafnian_pmp(&slightly).unwrap();
        assert!((h.re - (1.0 + 5e-13)).abs() < 1e-15);
        let grossly = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(hafnian_pmp(&grossly), Err(Error::Asymmetric { .. })));
        assert!(matches!(hafnian_recursive(&grossly), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn cap_is_enforced_and_configurable() {
        let big = ones(18);
        assert_eq!(
            hafnian_pmp(&big),
            Err(Error::HafnianCap { dim: 18, cap: 16 })
        );
        let cfg = Config::DEFAULT.with_hafnian_cap(18);
        // 17!! = 34_459_425
        assert_eq!(
            hafnian_recursive_with(&big, &cfg).unwrap(),
            Complex64::new(34_459_425.0, 0.0)
        );
        assert_eq!(Config::DEFAULT.with_hafnian_cap(40).hafnian_cap, 20);
    }

    #[test]
    fn permanent_small_cases() {
        assert_eq!(permanent_ryser(&ComplexMatrix::identity(3)).unwrap(), ONE);
        assert!((permanent_ryser(&ones(3)).unwrap() - Complex64::new(6.0, 0.0)).norm() < 1e-12);
        assert_eq!(permanent_ryser(&ComplexMatrix::zeros(0, 0)).unwrap(), ONE);
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!((permanent_ryser(&m).unwrap() - Complex64::new(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn embedding_small_cases() {
        assert_eq!(
            hafnian_via_permanent_embedding(&ComplexMatrix::identity(2)).unwrap(),
            ONE
        );
        assert_eq!(
            hafnian_via_permanent_embedding(&ones(3)).unwrap(),
            Complex64::new(6.0, 0.0)
        );
    }
}
