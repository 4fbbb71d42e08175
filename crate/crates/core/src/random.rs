//! Seeded random-matrix ensembles.
//!
//! The stream generator is SplitMix64: the k-th output is a fixed bijective mix
//! of `seed + k·0x9E3779B97F4A7C15`, so any language can reproduce it. Uniforms
//! take the top 53 bits; normals come from the Marsaglia polar method, consuming
//! uniform pairs until one lands strictly inside the unit disc.

use num_complex::Complex64;

use crate::gaussian::InterferometerUnitary;
use crate::linalg::ComplexMatrix;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals (polar method).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    /// Standard complex normal: `E|z|² = 1`, independent real and imaginary parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        let (x, y) = self.normal_pair();
        Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Haar-distributed `modes x modes` unitary.
///
/// A matrix of i.i.d. complex normals (filled row by row) is orthonormalized
/// column by column with twice-iterated Gram-Schmidt. That is a QR factorization
/// whose triangular factor has a positive real diagonal, which is what makes
/// the orthonormal factor Haar distributed.
pub fn haar_unitary(modes: usize, seed: u64) -> InterferometerUnitary {
    assert!(modes >= 1, "a unitary needs at least one mode");
    let mut rng = SplitMix64::new(seed);
    let z = ComplexMatrix::from_fn(modes, modes, |_, _| rng.complex_normal());

    let mut cols: Vec<Vec<Complex64>> = (0..modes)
        .map(|j| (0..modes).map(|i| z[(i, j)]).collect())
        .collect();
    for j in 0..modes {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let q = ComplexMatrix::from_fn(modes, modes, |i, j| cols[j][i]);
    InterferometerUnitary::from_matrix_unchecked(q)
}

/// Circular-orthogonal-ensemble matrix `T·Tᵗ` for a Haar `T` drawn with `seed`.
pub fn coe_matrix(modes: usize, seed: u64) -> ComplexMatrix {
    let t = haar_unitary(modes, seed);
    t.matrix() * &t.matrix().transpose()
}
