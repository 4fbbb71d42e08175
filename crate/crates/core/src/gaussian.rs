//! Zero-mean Gaussian states of `M` optical modes.
//!
//! Covariances are `2M x 2M` over the operator vector `(a_1..a_M, a_1†..a_M†)`
//! with entries `½⟨{ξ_i, ξ_j†}⟩`, so the vacuum is exactly `I/2` and
//! `σ_Q = σ + I/2` is Hermitian positive definite for every physical state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{determinant, inverse_with, is_hermitian_positive_definite, ComplexMatrix};

/// Max-norm tolerance for `T†T = I`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Non-negative squeezing parameters, one per input mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SqueezeParams {
    r: Vec<f64>,
}

impl SqueezeParams {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if let Some(bad) = r.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Domain(format!(
                "squeezing parameters must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self { r })
    }

    /// `active` equal squeezers with parameter `r` in the first modes, vacuum elsewhere.
    pub fn uniform(modes: usize, active: usize, r: f64) -> Result<Self> {
        if active > modes {
            return Err(Error::Domain(format!(
                "{active} squeezers do not fit into {modes} modes"
            )));
        }
        Self::new((0..modes).map(|j| if j < active { r } else { 0.0 }).collect())
    }

    pub fn modes(&self) -> usize {
        self.r.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    /// Number of squeezed inputs `K` (nonzero parameters).
    pub fn active_count(&self) -> usize {
        self.r.iter().filter(|&&x| x != 0.0).count()
    }

    /// `∏ cosh² r_j`, the determinant of `σ_Q` for these inputs.
    pub fn sigma_q_determinant(&self) -> f64 {
        self.r.iter().map(|x| x.cosh().powi(2)).product()
    }
}

impl TryFrom<Vec<f64>> for SqueezeParams {
    type Error = Error;

    fn try_from(r: Vec<f64>) -> Result<Self> {
        Self::new(r)
    }
}

impl From<SqueezeParams> for Vec<f64> {
    fn from(p: SqueezeParams) -> Self {
        p.r
    }
}

#[derive(Serialize, Deserialize)]
struct UnitaryRecord {
    modes: usize,
    t: ComplexMatrix,
}

/// An `M x M` unitary describing a lossless linear interferometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryRecord", into = "UnitaryRecord")]
pub struct InterferometerUnitary {
    t: ComplexMatrix,
}

impl InterferometerUnitary {
    pub fn new(t: ComplexMatrix) -> Result<Self> {
        if !t.is_square() || t.rows() == 0 {
            return Err(Error::Dimension(format!(
                "interferometer must be a non-empty square matrix, got {}x{}",
                t.rows(),
                t.cols()
            )));
        }
        let resid = (&t.adjoint() * &t).max_abs_diff(&ComplexMatrix::identity(t.rows()));
        if resid > UNITARITY_TOL {
            return Err(Error::Domain(format!(
                "matrix is not unitary (‖T†T - I‖ = {resid:e})"
            )));
        }
        Ok(Self { t })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            t: ComplexMatrix::identity(modes),
        }
    }

    /// The symmetric 50:50 beamsplitter `[[1, i], [i, 1]]/√2`.
    pub fn balanced_beamsplitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            vec![Complex64::new(0.0, h), Complex64::new(h, 0.0)],
        ])
        .expect("finite entries");
        Self { t }
    }

    pub(crate) fn from_matrix_unchecked(t: ComplexMatrix) -> Self {
        Self { t }
    }

    pub fn modes(&self) -> usize {
        self.t.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.t
    }

    /// Largest entry of `T†T - I`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.t.adjoint() * &self.t).max_abs_diff(&ComplexMatrix::identity(self.modes()))
    }

    /// Relabels output ports: output `i` of the result is output `perm[i]` of `self`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.modes())?;
        let n = self.modes();
        Ok(Self {
            t: ComplexMatrix::from_fn(n, n, |i, j| self.t[(perm[i], j)]),
        })
    }
}

impl TryFrom<UnitaryRecord> for InterferometerUnitary {
    type Error = Error;

    fn try_from(rec: UnitaryRecord) -> Result<Self> {
        if rec.t.rows() != rec.modes {
            return Err(Error::Dimension(format!(
                "record says {} modes but matrix is {}x{}",
                rec.modes,
                rec.t.rows(),
                rec.t.cols()
            )));
        }
        Self::new(rec.t)
    }
}

impl From<InterferometerUnitary> for UnitaryRecord {
    fn from(u: InterferometerUnitary) -> Self {
        UnitaryRecord {
            modes: u.modes(),
            t: u.t,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    modes: usize,
    sigma: ComplexMatrix,
}

/// Zero-displacement Gaussian state given by its covariance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct GaussianState {
    modes: usize,
    sigma: ComplexMatrix,
}

impl GaussianState {
    /// Validates shape, Hermiticity and positive definiteness of `σ + I/2`.
    pub fn from_covariance(sigma: ComplexMatrix) -> Result<Self> {
        if !sigma.is_square() || sigma.rows() == 0 || !sigma.rows().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "covariance must be 2M x 2M with M ≥ 1, got {}x{}",
                sigma.rows(),
                sigma.cols()
            )));
        }
        let herm = sigma.max_non_hermiticity();
        if herm > Config::DEFAULT.hermitian_tol {
            return Err(Error::InvalidState(format!(
                "covariance is not Hermitian (max deviation {herm:e})"
            )));
        }
        let state = Self {
            modes: sigma.rows() / 2,
            sigma,
        };
        sigma_q(&state)?;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    /// Reorders modes: mode `i` of the result is mode `perm[i]` of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.modes)?;
        let idx = doubled_indices(perm, self.modes);
        Ok(Self {
            modes: self.modes,
            sigma: ComplexMatrix::from_fn(2 * self.modes, 2 * self.modes, |i, j| {
                self.sigma[(idx[i], idx[j])]
            }),
        })
    }
}

impl TryFrom<StateRecord> for GaussianState {
    type Error = Error;

    fn try_from(rec: StateRecord) -> Result<Self> {
        if rec.sigma.rows() != 2 * rec.modes {
            return Err(Error::Dimension(format!(
                "record says {} modes but covariance is {}x{}",
                rec.modes,
                rec.sigma.rows(),
                rec.sigma.cols()
            )));
        }
        Self::from_covariance(rec.sigma)
    }
}

impl From<GaussianState> for StateRecord {
    fn from(s: GaussianState) -> Self {
        StateRecord {
            modes: s.modes,
            sigma: s.sigma,
        }
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Dimension(format!(
            "permutation of length {} for {n} modes",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n {
            return Err(Error::Index { index: p, bound: n });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Domain(format!("mode {p} listed twice")));
        }
    }
    Ok(())
}

/// Mode list `[j..]` expanded to covariance indices `[j.., j+M..]`.
fn doubled_indices(modes_list: &[usize], modes: usize) -> Vec<usize> {
    modes_list
        .iter()
        .copied()
        .chain(modes_list.iter().map(|&j| j + modes))
        .collect()
}

pub fn vacuum(modes: usize) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::Dimension("a state needs at least one mode".into()));
    }
    Ok(GaussianState {
        modes,
        sigma: ComplexMatrix::from_real_diagonal(&vec![0.5; 2 * modes]),
    })
}

/// `S = [[⊕cosh r, ⊕sinh r], [⊕sinh r, ⊕cosh r]]`.
pub fn squeeze_matrix(params: &SqueezeParams) -> ComplexMatrix {
    let ch: Vec<f64> = params.values().iter().map(|r| r.cosh()).collect();
    let sh: Vec<f64> = params.values().iter().map(|r| r.sinh()).collect();
    let c = ComplexMatrix::from_real_diagonal(&ch);
    let s = ComplexMatrix::from_real_diagonal(&sh);
    ComplexMatrix::from_blocks(&c, &s, &s, &c).expect("equal block shapes")
}

fn check_modes(t: &InterferometerUnitary, params: &SqueezeParams) -> Result<()> {
    if t.modes() != params.modes() {
        return Err(Error::Dimension(format!(
            "interferometer has {} modes but {} squeezing parameters were given",
            t.modes(),
            params.modes()
        )));
    }
    Ok(())
}

/// Covariance after squeezing the vacuum and sending it through `t`:
/// `σ = ½ · diag(T, T*) · S S† · diag(T†, Tᵗ)`.
pub fn output_state(t: &InterferometerUnitary, params: &SqueezeParams) -> Result<GaussianState> {
    check_modes(t, params)?;
    let m = t.matrix();
    let zero = ComplexMatrix::zeros(m.rows(), m.rows());
    let left = ComplexMatrix::from_blocks(m, &zero, &zero, &m.conj())?;
    let right = left.adjoint();
    let s = squeeze_matrix(params);
    let ss = &s * &s.adjoint();
    let sigma = (&(&left * &ss) * &right).scale(Complex64::new(0.5, 0.0));
    Ok(GaussianState {
        modes: m.rows(),
        sigma,
    })
}

/// `σ_Q = σ + I/2`, checked for positive definiteness.
pub fn sigma_q(state: &GaussianState) -> Result<ComplexMatrix> {
    let half = ComplexMatrix::from_real_diagonal(&vec![0.5; 2 * state.modes]);
    let q = &state.sigma + &half;
    if !is_hermitian_positive_definite(&q, Config::DEFAULT.hermitian_tol) {
        return Err(Error::InvalidState(
            "σ + I/2 is not positive definite".into(),
        ));
    }
    Ok(q)
}

/// `det σ_Q`; real and positive for valid states.
pub fn sigma_q_determinant(state: &GaussianState) -> Result<f64> {
    Ok(determinant(&sigma_q(state)?)?.re)
}

/// Sampling matrix `A`, the block swap `X = [[0, I], [I, 0]]` combined with `I - σ_Q⁻¹`.
///
/// `X` is applied on the right. For every valid covariance `(I - σ_Q⁻¹)·X` is
/// the complex conjugate of `X·(I - σ_Q⁻¹)`; hafnians of its submatrices are
/// real, so probabilities are the same either way, and this orientation puts
/// `B` (not `B*`) in the upper-left block: `A = B ⊕ B*` for squeezed vacua.
pub fn sampling_matrix_a(state: &GaussianState) -> Result<ComplexMatrix> {
    let q = sigma_q(state)?;
    let q_inv = inverse_with(&q, &Config::DEFAULT).map_err(|e| match e {
        Error::Singular { pivot } => {
            Error::InvalidState(format!("σ_Q is singular (pivot {pivot:e})"))
        }
        other => other,
    })?;
    let n = 2 * state.modes;
    let m = state.modes;
    let one = Complex64::new(1.0, 0.0);
    // Column j of Y·X is column (j + M) mod 2M of Y.
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let src = (j + m) % n;
        let id = if src == i { one } else { Complex64::new(0.0, 0.0) };
        id - q_inv[(i, src)]
    }))
}

/// `B = T · diag(tanh r_j) · Tᵗ`, the squeezing-only sampling matrix.
pub fn b_matrix(t: &InterferometerUnitary, params: &SqueezeParams) -> Result<ComplexMatrix> {
    check_modes(t, params)?;
    let tanh: Vec<f64> = params.values().iter().map(|r| r.tanh()).collect();
    let m = t.matrix();
    let scaled = ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * tanh[j]);
    Ok(&scaled * &m.transpose())
}

/// Traces out every mode not listed in `keep`; kept modes appear in the order given.
pub fn reduce_modes(state: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    if keep.is_empty() {
        return Err(Error::Domain("at least one mode must be kept".into()));
    }
    let mut seen = vec![false; state.modes];
    for &k in keep {
        if k >= state.modes {
            return Err(Error::Index {
                index: k,
                bound: state.modes,
            });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Domain(format!("mode {k} listed twice")));
        }
    }
    let idx = doubled_indices(keep, state.modes);
    let sigma = ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| state.sigma[(idx[i], idx[j])]);
    Ok(GaussianState {
        modes: keep.len(),
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn vacuum_covariance() {
        let v = vacuum(1).unwrap();
        assert_eq!(v.sigma(), &ComplexMatrix::from_real_diagonal(&[0.5, 0.5]));
        assert_eq!(vacuum(3).unwrap().sigma(), &ComplexMatrix::from_real_diagonal(&[0.5; 6]));
        assert!(matches!(vacuum(0), Err(Error::Dimension(_))));
    }

    #[test]
    fn squeeze_matrix_shape() {
        let zero = SqueezeParams::new(vec![0.0; 3]).unwrap();
        assert_eq!(squeeze_matrix(&zero), ComplexMatrix::identity(6));
        let r = 0.7;
        let s = squeeze_matrix(&SqueezeParams::new(vec![r]).unwrap());
        let want = ComplexMatrix::from_real_rows(&[vec![r.cosh(), r.sinh()], vec![r.sinh(), r.cosh()]]).unwrap();
        assert_eq!(s, want);
        let multi = SqueezeParams::new(vec![0.3, 1.1, 0.0]).unwrap();
        let det = determinant(&squeeze_matrix(&multi)).unwrap();
        assert!((det - real(1.0)).norm() < 1e-12);
    }

    #[test]
    fn squeeze_params_validation() {
        assert!(SqueezeParams::new(vec![-0.1]).is_err());
        assert!(SqueezeParams::new(vec![f64::NAN]).is_err());
        let p = SqueezeParams::uniform(4, 2, 0.4).unwrap();
        assert_eq!(p.values(), &[0.4, 0.4, 0.0, 0.0]);
        assert_eq!(p.active_count(), 2);
        assert!(SqueezeParams::uniform(2, 3, 0.4).is_err());
    }

    #[test]
    fn unsqueezed_output_is_vacuum() {
        let t = InterferometerUnitary::balanced_beamsplitter();
        let state = output_state(&t, &SqueezeParams::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert!(state.sigma().max_abs_diff(vacuum(2).unwrap().sigma()) < 1e-15);
    }

    #[test]
    fn single_mode_squeezed_covariance() {
        let state = output_state(
            &InterferometerUnitary::identity(1),
            &SqueezeParams::new(vec![0.5]).unwrap(),
        )
        .unwrap();
        let want = ComplexMatrix::from_real_rows(&[
            vec![0.5 * 1f64.cosh(), 0.5 * 1f64.sinh()],
            vec![0.5 * 1f64.sinh(), 0.5 * 1f64.cosh()],
        ])
        .unwrap();
        assert!(state.sigma().max_abs_diff(&want) < 1e-14);
        let det = sigma_q_determinant(&state).unwrap();
        assert!((det - 0.5f64.cosh().powi(2)).abs() < 1e-12);
        assert!((det - 1.271_54).abs() < 1e-5);
    }

    #[test]
    fn single_mode_sampling_matrix() {
        let r = 0.9;
        let state = output_state(
            &InterferometerUnitary::identity(1),
            &SqueezeParams::new(vec![r]).unwrap(),
        )
        .unwrap();
        let a = sampling_matrix_a(&state).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[r.tanh(), r.tanh()])) < 1e-14);
        let vac = sampling_matrix_a(&vacuum(2).unwrap()).unwrap();
        assert_eq!(vac.max_abs(), 0.0);
    }

    #[test]
    fn b_matrix_identity_interferometer() {
        let p = SqueezeParams::new(vec![0.2, 0.0, 0.8]).unwrap();
        let b = b_matrix(&InterferometerUnitary::identity(3), &p).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[0.2f64.tanh(), 0.0, 0.8f64.tanh()]);
        assert!(b.max_abs_diff(&want) < 1e-16);
    }

    #[test]
    fn dimension_mismatch() {
        let t = InterferometerUnitary::identity(2);
        let p = SqueezeParams::new(vec![0.1; 3]).unwrap();
        assert!(matches!(output_state(&t, &p), Err(Error::Dimension(_))));
        assert!(matches!(b_matrix(&t, &p), Err(Error::Dimension(_))));
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(InterferometerUnitary::new(m).is_err());
        assert!(InterferometerUnitary::new(ComplexMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn reduce_two_mode_squeezed_to_thermal() {
        let r = 0.6;
        let state = output_state(
            &InterferometerUnitary::balanced_beamsplitter(),
            &SqueezeParams::new(vec![r, r]).unwrap(),
        )
        .unwrap();
        let n_mean = r.sinh().powi(2);
        for keep in [0, 1] {
            let single = reduce_modes(&state, &[keep]).unwrap();
            let want = ComplexMatrix::from_real_diagonal(&[n_mean + 0.5, n_mean + 0.5]);
            assert!(single.sigma().max_abs_diff(&want) < 1e-14, "{:?}", single.sigma());
        }
        let all = reduce_modes(&state, &[0, 1]).unwrap();
        assert_eq!(all, state);
        assert!(reduce_modes(&state, &[]).is_err());
        assert!(reduce_modes(&state, &[2]).is_err());
        assert!(reduce_modes(&state, &[1, 1]).is_err());
    }

    #[test]
    fn reduced_vacuum_is_vacuum() {
        let v = vacuum(4).unwrap();
        assert_eq!(reduce_modes(&v, &[3, 1]).unwrap(), vacuum(2).unwrap());
    }

    #[test]
    fn invalid_covariance_rejected() {
        let too_small = ComplexMatrix::from_real_diagonal(&[-0.6, -0.6]);
        assert!(matches!(
            GaussianState::from_covariance(too_small),
            Err(Error::InvalidState(_))
        ));
        assert!(GaussianState::from_covariance(ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn state_serialization_round_trip() {
        let state = output_state(
            &InterferometerUnitary::balanced_beamsplitter(),
            &SqueezeParams::new(vec![0.3, 0.1]).unwrap(),
        )
        .unwrap();
        let json = serde_json::to_string(&state).unwrap();
        assert!(json.starts_with("{\"modes\":2,\"sigma\":[["));
        let back: GaussianState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, state);
        let bad = r#"{"modes":3,"sigma":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        assert!(serde_json::from_str::<GaussianState>(bad).is_err());
    }
}
