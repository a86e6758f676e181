//! Thermal field model: Bose-Einstein weights over Fock states and
//! principled truncation of the infinite ladder.

use crate::error::{Error, Result};

/// Extra field levels kept above the weight cutoff. The interaction couples
/// `|n>` to `|n +- 1>` and the two-photon transitions reach `n +- 2`, so the
/// joint space needs headroom for the top weighted level to evolve
/// undistorted by the truncation boundary.
pub const GUARD_LEVELS: usize = 4;

/// A truncated diagonal field state: weights `P_0..P_N` plus the discarded
/// tail mass. Thermal by default, but any nonnegative diagonal weight vector
/// (e.g. a single Fock state) fits the same shape.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    nbar: f64,
    cutoff: usize,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl FockTruncation {
    /// Mean photon number of the underlying thermal distribution.
    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Largest Fock index carrying weight.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Weight of Fock level `n`; zero above the cutoff.
    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability mass discarded above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Field dimension used for joint-space simulation (cutoff plus guard).
    pub fn field_dim(&self) -> usize {
        self.cutoff + GUARD_LEVELS
    }

    /// Field in the single Fock state `|ell>`: weight one at `ell`, no tail.
    pub fn fock(ell: usize) -> Self {
        let mut weights = vec![0.0; ell + 1];
        weights[ell] = 1.0;
        FockTruncation {
            nbar: ell as f64,
            cutoff: ell,
            weights,
            tail_mass: 0.0,
        }
    }
}

/// Bose-Einstein weight `P_n = nbar^n / (1 + nbar)^(n+1)`.
pub fn thermal_weight(n: usize, nbar: f64) -> Result<f64> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean photon number must be nonnegative, got {nbar}"
        )));
    }
    if nbar == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let ratio = nbar / (1.0 + nbar);
    Ok(ratio.powi(n as i32) / (1.0 + nbar))
}

/// Smallest cutoff `N` whose geometric tail `(nbar/(1+nbar))^(N+1)` is at
/// most `epsilon`, with the weights filled in by the stable recursion
/// `P_{n+1} = P_n * nbar/(1+nbar)`.
pub fn choose_truncation(nbar: f64, epsilon: f64) -> Result<FockTruncation> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean photon number must be nonnegative, got {nbar}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if nbar == 0.0 {
        return Ok(FockTruncation {
            nbar,
            cutoff: 0,
            weights: vec![1.0],
            tail_mass: 0.0,
        });
    }
    let ratio = nbar / (1.0 + nbar);
    // N from the closed form, then nudged to the exact minimum in case the
    // log landed on a representability edge.
    let mut n = ((epsilon.ln() / ratio.ln()).ceil() as i64 - 1).max(0) as usize;
    let tail = |n: usize| -> f64 { (((n + 1) as f64) * ratio.ln()).exp() };
    while tail(n) > epsilon {
        n += 1;
    }
    while n > 0 && tail(n - 1) <= epsilon {
        n -= 1;
    }
    let mut weights = Vec::with_capacity(n + 1);
    let mut p = 1.0 / (1.0 + nbar);
    for _ in 0..=n {
        weights.push(p);
        p *= ratio;
    }
    Ok(FockTruncation {
        nbar,
        cutoff: n,
        weights,
        tail_mass: tail(n),
    })
}
