//! Photon-pattern probabilities of Gaussian states.
//!
//! For a zero-mean state the probability of pattern `n̄` is
//! `Haf(A_S) / (n̄! · √det σ_Q)`, where `A_S` keeps row/column `j` and `j + M`
//! of the sampling matrix `n_j` times each. When the input is pure squeezed
//! vacuum, `A = B ⊕ B*` and the hafnian factorizes into `|Haf(B_S)|²`.

mod patterns;
mod photon_stats;

pub use patterns::{
    enumerate_bounded_patterns, enumerate_collision_free_patterns, patterns_with_total,
    PhotonPattern,
};
pub use photon_stats::{
    generation_ratio, mean_and_modal, pair_number_law, pair_tail_above, pfbs_probability,
    ppe_distribution, ppe_tail_above, sampling_space_sizes, PpeDistributionSpec,
};

use num_complex::Complex64;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::gaussian::{
    b_matrix, sampling_matrix_a, sigma_q, GaussianState, InterferometerUnitary, SqueezeParams,
};
use crate::hafnian::hafnian_recursive_with;
use crate::linalg::{log_abs_determinant, submatrix_by_multiset, ComplexMatrix};

/// `prefactor · value / n̄!`, switching to log space when the prefactor underflows.
fn scale_by_prefactor(ln_prefactor: f64, value: Complex64, ln_nfact: f64, cfg: &Config) -> Complex64 {
    let prefactor = ln_prefactor.exp();
    if prefactor >= cfg.prefactor_underflow {
        return value * prefactor / ln_nfact.exp();
    }
    let mag = value.norm();
    if mag == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = value / mag;
    phase * (ln_prefactor + mag.ln() - ln_nfact).exp()
}

/// Turns a nominally real, nonnegative complex number into a probability.
fn clamp_probability(p: Complex64, cfg: &Config) -> Result<f64> {
    if p.im.abs() > cfg.imag_tol {
        return Err(Error::ImaginaryResidue { imag: p.im });
    }
    if p.re < -cfg.imag_tol || p.re > 1.0 + 1e-9 {
        return Err(Error::InvalidState(format!(
            "pattern probability {} lies outside [0, 1]",
            p.re
        )));
    }
    Ok(p.re.max(0.0))
}

fn check_pattern(modes: usize, pattern: &PhotonPattern) -> Result<()> {
    if pattern.modes() != modes {
        return Err(Error::Dimension(format!(
            "pattern has {} modes, experiment has {modes}",
            pattern.modes()
        )));
    }
    Ok(())
}

/// Evaluates patterns of one general Gaussian state, reusing `A` and `det σ_Q`.
#[derive(Debug, Clone)]
pub struct GeneralEvaluator {
    modes: usize,
    a: ComplexMatrix,
    ln_prefactor: f64,
    cfg: Config,
}

impl GeneralEvaluator {
    pub fn new(state: &GaussianState, cfg: &Config) -> Result<Self> {
        let q = sigma_q(state)?;
        let ln_det = log_abs_determinant(&q)?;
        Ok(Self {
            modes: state.modes(),
            a: sampling_matrix_a(state)?,
            ln_prefactor: -0.5 * ln_det,
            cfg: *cfg,
        })
    }

    pub fn sampling_matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn probability(&self, pattern: &PhotonPattern) -> Result<f64> {
        check_pattern(self.modes, pattern)?;
        let rows = pattern.mode_multiset();
        let idx: Vec<usize> = rows
            .iter()
            .copied()
            .chain(rows.iter().map(|&j| j + self.modes))
            .collect();
        let a_s = submatrix_by_multiset(&self.a, &idx, &idx)?;
        let haf = hafnian_recursive_with(&a_s, &self.cfg)?;
        let p = scale_by_prefactor(self.ln_prefactor, haf, pattern.ln_factorial(), &self.cfg);
        clamp_probability(p, &self.cfg)
    }
}

/// Evaluates patterns of a squeezed-vacuum experiment, reusing `B`.
#[derive(Debug, Clone)]
pub struct SqueezedEvaluator {
    b: ComplexMatrix,
    ln_prefactor: f64,
    cfg: Config,
}

impl SqueezedEvaluator {
    pub fn new(t: &InterferometerUnitary, params: &SqueezeParams, cfg: &Config) -> Result<Self> {
        let b = b_matrix(t, params)?;
        // det σ_Q = ∏ cosh² r_j for every interferometer.
        let ln_prefactor = -params.values().iter().map(|r| r.cosh().ln()).sum::<f64>();
        Ok(Self {
            b,
            ln_prefactor,
            cfg: *cfg,
        })
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn modes(&self) -> usize {
        self.b.rows()
    }

    pub fn probability(&self, pattern: &PhotonPattern) -> Result<f64> {
        check_pattern(self.modes(), pattern)?;
        let idx = pattern.mode_multiset();
        let b_s = submatrix_by_multiset(&self.b, &idx, &idx)?;
        let haf = hafnian_recursive_with(&b_s, &self.cfg)?;
        let p = scale_by_prefactor(
            self.ln_prefactor,
            Complex64::new(haf.norm_sqr(), 0.0),
            pattern.ln_factorial(),
            &self.cfg,
        );
        clamp_probability(p, &self.cfg)
    }
}

/// `Pr(n̄) = Haf(A_S) / (n̄! · √det σ_Q)` for any zero-mean Gaussian state.
pub fn pattern_probability_general(state: &GaussianState, pattern: &PhotonPattern) -> Result<f64> {
    GeneralEvaluator::new(state, &Config::DEFAULT)?.probability(pattern)
}

/// `Pr(n̄) = |Haf(B_S)|² / (n̄! · √det σ_Q)` for squeezed vacua entering `t`.
pub fn pattern_probability_squeezed(
    t: &InterferometerUnitary,
    params: &SqueezeParams,
    pattern: &PhotonPattern,
) -> Result<f64> {
    SqueezedEvaluator::new(t, params, &Config::DEFAULT)?.probability(pattern)
}

/// Diagnostic for patterns carrying more photons than there are squeezed
/// inputs: `B` then has rank below the photon number, so the instance is not
/// a hard one. The probability itself is still exact; never an error.
pub fn rank_deficiency_warning(params: &SqueezeParams, pattern: &PhotonPattern) -> Option<String> {
    let k = params.active_count();
    let n = pattern.total();
    (n > k).then(|| {
        format!("pattern has {n} photons but B has rank {k} (squeezed inputs); the probability is exact but the instance is below the rank needed for hardness")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{output_state, vacuum};

    fn single_mode_law(n: usize, r: f64) -> f64 {
        if n % 2 == 1 {
            return 0.0;
        }
        let m = n / 2;
        let ln_fact = |k: usize| (2..=k).map(|i| (i as f64).ln()).sum::<f64>();
        let coeff = (ln_fact(2 * m) - 2.0 * (m as f64 * 2f64.ln() + ln_fact(m))).exp();
        coeff * r.tanh().powi(2 * m as i32) / r.cosh()
    }

    #[test]
    fn vacuum_pattern_is_certain() {
        let p = pattern_probability_general(&vacuum(3).unwrap(), &PhotonPattern::vacuum(3)).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn single_mode_values() {
        let r = 0.5;
        let state = output_state(
            &InterferometerUnitary::identity(1),
            &SqueezeParams::new(vec![r]).unwrap(),
        )
        .unwrap();
        let p2 = pattern_probability_general(&state, &PhotonPattern::new(vec![2])).unwrap();
        assert!((p2 - single_mode_law(2, r)).abs() < 1e-12);
        assert!((p2 - 0.094_69).abs() < 1e-5);
        assert_eq!(pattern_probability_general(&state, &PhotonPattern::new(vec![1])).unwrap(), 0.0);
        let sq = pattern_probability_squeezed(
            &InterferometerUnitary::identity(1),
            &SqueezeParams::new(vec![r]).unwrap(),
            &PhotonPattern::new(vec![2]),
        )
        .unwrap();
        assert!((sq - p2).abs() < 1e-12);
    }

    #[test]
    fn two_mode_squeezed_values() {
        let r = 0.5f64;
        let t = InterferometerUnitary::balanced_beamsplitter();
        let params = SqueezeParams::new(vec![r, r]).unwrap();
        let p11 = pattern_probability_squeezed(&t, &params, &PhotonPattern::new(vec![1, 1])).unwrap();
        assert!((p11 - r.tanh().powi(2) / r.cosh().powi(2)).abs() < 1e-12);
        assert!((p11 - 0.167_95).abs() < 1e-5);
        let p10 = pattern_probability_squeezed(&t, &params, &PhotonPattern::new(vec![1, 0])).unwrap();
        assert_eq!(p10, 0.0);
    }

    #[test]
    fn thermal_marginal_via_repetition() {
        // One arm of a two-mode squeezed state is thermal with mean sinh² r.
        let r = 0.6f64;
        let state = output_state(
            &InterferometerUnitary::balanced_beamsplitter(),
            &SqueezeParams::new(vec![r, r]).unwrap(),
        )
        .unwrap();
        let arm = crate::gaussian::reduce_modes(&state, &[0]).unwrap();
        let nbar = r.sinh().powi(2);
        for n in 0..6 {
            let p = pattern_probability_general(&arm, &PhotonPattern::new(vec![n])).unwrap();
            let want = nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1);
            assert!((p - want).abs() < 1e-12, "n={n}: {p} vs {want}");
        }
    }

    #[test]
    fn pattern_mode_mismatch() {
        let err = pattern_probability_general(&vacuum(2).unwrap(), &PhotonPattern::vacuum(3));
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn hafnian_cap_surfaces() {
        let state = output_state(
            &InterferometerUnitary::identity(1),
            &SqueezeParams::new(vec![0.3]).unwrap(),
        )
        .unwrap();
        // 10 photons → 20x20 A_S, above the default cap of 16.
        let err = pattern_probability_general(&state, &PhotonPattern::new(vec![10]));
        assert_eq!(err, Err(Error::HafnianCap { dim: 20, cap: 16 }));
    }

    #[test]
    fn log_space_prefactor() {
        // e^{-800} underflows to zero; the hafnian-sized factor brings it back.
        let cfg = Config::DEFAULT;
        let p = scale_by_prefactor(-800.0, Complex64::new(1e300, 0.0), 2f64.ln(), &cfg);
        let want = (-800.0 + 1e300f64.ln() - 2f64.ln()).exp();
        assert!(want > 1e-50);
        assert!((p.re - want).abs() < 1e-12 * want);
        assert_eq!(scale_by_prefactor(-800.0, Complex64::new(0.0, 0.0), 0.0, &cfg).re, 0.0);

        // Many strongly squeezed modes: prefactor below 1e-300, still a finite answer.
        let modes = 230;
        let params = SqueezeParams::new(vec![4.0; modes]).unwrap();
        let ev = SqueezedEvaluator::new(&InterferometerUnitary::identity(modes), &params, &cfg).unwrap();
        let ln_p0 = -(modes as f64) * 4f64.cosh().ln();
        assert!(ln_p0.exp() < 1e-300);
        let p0 = ev.probability(&PhotonPattern::vacuum(modes)).unwrap();
        assert_eq!(p0, ln_p0.exp());
    }

    #[test]
    fn rank_warning() {
        let params = SqueezeParams::uniform(4, 2, 0.3).unwrap();
        assert!(rank_deficiency_warning(&params, &PhotonPattern::new(vec![1, 1, 0, 0])).is_none());
        assert!(rank_deficiency_warning(&params, &PhotonPattern::new(vec![1, 1, 1, 1])).is_some());
    }
}
