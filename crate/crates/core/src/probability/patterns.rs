use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon count per output mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhotonPattern(Vec<usize>);

impl PhotonPattern {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// True when no mode holds more than one photon.
    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&n| n <= 1)
    }

    /// `ln(n_1! n_2! … n_M!)`.
    pub fn ln_factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (2..=n).map(|k| (k as f64).ln()).sum::<f64>())
            .sum()
    }

    /// Mode `j` repeated `n_j` times, in mode order.
    pub fn mode_multiset(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
            .collect()
    }

    /// Reorders modes: entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&p| self.0[p]).collect())
    }
}

impl From<Vec<usize>> for PhotonPattern {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for PhotonPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// All `C(M, N)` patterns with `N` photons and at most one per mode, in
/// ascending lexicographic order.
pub fn enumerate_collision_free_patterns(modes: usize, photons: usize) -> Result<Vec<PhotonPattern>> {
    if photons > modes {
        return Err(Error::Domain(format!(
            "{photons} photons cannot occupy {modes} modes without collisions"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(modes);
    fill_binary(modes, photons, &mut current, &mut out);
    Ok(out)
}

fn fill_binary(modes: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<PhotonPattern>) {
    let slots = modes - current.len();
    if slots == 0 {
        out.push(PhotonPattern(current.clone()));
        return;
    }
    for bit in [0, 1] {
        if bit > left || left - bit > slots - 1 {
            continue;
        }
        current.push(bit);
        fill_binary(modes, left - bit, current, out);
        current.pop();
    }
}

/// Every pattern with at most `max_total` photons and at most `max_per_mode`
/// in any mode, ordered by total photon number and lexicographically within
/// each total.
pub fn enumerate_bounded_patterns(modes: usize, max_total: usize, max_per_mode: usize) -> Vec<PhotonPattern> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(modes);
    for total in 0..=max_total {
        fill_composition(modes, total, max_per_mode, &mut current, &mut out);
    }
    out
}

/// Patterns with exactly `total` photons, each mode capped at `max_per_mode`.
pub fn patterns_with_total(modes: usize, total: usize, max_per_mode: usize) -> Vec<PhotonPattern> {
    let mut out = Vec::new();
    fill_composition(modes, total, max_per_mode, &mut Vec::with_capacity(modes), &mut out);
    out
}

fn fill_composition(
    modes: usize,
    left: usize,
    cap: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<PhotonPattern>,
) {
    let slots = modes - current.len();
    if slots == 0 {
        if left == 0 {
            out.push(PhotonPattern(current.clone()));
        }
        return;
    }
    // The remaining modes can absorb at most (slots - 1) * cap photons.
    let min_here = left.saturating_sub((slots - 1).saturating_mul(cap));
    for n in min_here..=left.min(cap) {
        current.push(n);
        fill_composition(modes, left - n, cap, current, out);
        current.pop();
    }
}
