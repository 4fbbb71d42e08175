//! Numerical thresholds shared by every module.
//!
//! Tolerances are absolute and measured in the max-norm unless the field says
//! otherwise.

/// Largest hafnian dimension the enumeration code will ever attempt.
pub const HARD_HAFNIAN_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// LU pivots below `singular_pivot_rel * ‖m‖_∞` abort inversion.
    pub singular_pivot_rel: f64,
    /// Hermiticity and Cholesky pivot tolerance for covariance checks.
    pub hermitian_tol: f64,
    /// Asymmetry up to this level is symmetrized away before a hafnian.
    pub symmetry_tol: f64,
    /// Largest matrix dimension accepted by the hafnian routines (≤ `HARD_HAFNIAN_CAP`).
    pub hafnian_cap: usize,
    /// Imaginary part tolerated (and clamped) in a probability.
    pub imag_tol: f64,
    /// Below this value the `|σ_Q|^{-1/2}` prefactor is handled in log space.
    pub prefactor_underflow: f64,
    /// Allowed deviation of `Σp + residual` from one in a distribution table.
    pub table_mass_tol: f64,
}

impl Config {
    pub const DEFAULT: Config = Config {
        singular_pivot_rel: 1e-12,
        hermitian_tol: 1e-10,
        symmetry_tol: 1e-10,
        hafnian_cap: 16,
        imag_tol: 1e-10,
        prefactor_underflow: 1e-300,
        table_mass_tol: 1e-6,
    };

    /// Returns a copy with a different hafnian cap, clamped to `HARD_HAFNIAN_CAP`.
    pub fn with_hafnian_cap(mut self, cap: usize) -> Self {
        self.hafnian_cap = cap.min(HARD_HAFNIAN_CAP);
        self
    }
}

impl Default for Config {
    fn default() -> Self {
        Self::DEFAULT
    }
}
