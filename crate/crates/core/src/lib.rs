//! Exact, desk-scale Gaussian boson sampling.
//!
//! Squeezed vacua enter a linear interferometer and every output mode is
//! counted. The probability of a photon pattern is a hafnian of a submatrix of
//! the state's sampling matrix, so this crate provides:
//!
//! - [`linalg`]: a small dense complex-matrix kernel (LU determinant/inverse,
//!   definiteness test, multiset submatrices).
//! - [`hafnian`]: two independent exact hafnian algorithms and Ryser's permanent.
//! - [`gaussian`]: covariance matrices, `σ_Q`, the sampling matrices `A` and `B`.
//! - [`probability`]: pattern probabilities, pattern enumeration and the
//!   photon-number statistics used to compare sampling protocols.
//! - [`random`]: seeded Haar unitaries and circular-orthogonal-ensemble matrices.
//! - [`sampler`]: tabulated distributions and exact categorical sampling.
//!
//! ```
//! use gbs_core::gaussian::{InterferometerUnitary, SqueezeParams};
//! use gbs_core::probability::{pattern_probability_squeezed, PhotonPattern};
//!
//! let t = InterferometerUnitary::identity(1);
//! let r = SqueezeParams::new(vec![0.5]).unwrap();
//! let p = pattern_probability_squeezed(&t, &r, &PhotonPattern::new(vec![2])).unwrap();
//! assert!((p - 0.094_69).abs() < 1e-5);
//! ```

pub mod config;
pub mod error;
pub mod gaussian;
pub mod hafnian;
pub mod io;
pub mod linalg;
pub mod probability;
pub mod random;
pub mod sampler;

pub use config::Config;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
