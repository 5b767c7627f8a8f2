//! Satellite link-budget calculator.
//!
//! A squeezed source of known input level is sent through a pure-loss
//! channel; the receiver must certify squeezing (against the coherent
//! alternative) with at most a target error probability. This module maps
//! the scenario onto the multi-copy machinery: effective hypothesis
//! variances after loss, the minimum sample count meeting the error target,
//! the acquisition time at the link's sample rate, and the full
//! error-versus-N curve.

use crate::error::{Error, Result};
use crate::multicopy::error_probability;
use crate::states::{apply_loss, db_to_variance};

/// A complete downlink scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkScenario {
    loss_db: f64,
    squeezing_db_in: f64,
    target_error: f64,
    sample_rate_hz: f64,
    link_time_s: f64,
}

impl LinkScenario {
    /// Validates and builds a scenario. All fields must be finite;
    /// `loss_db ≥ 0`, `squeezing_db_in > 0`, `target_error ∈ (0, 0.5)`,
    /// `sample_rate_hz > 0`, `link_time_s > 0`.
    pub fn new(
        loss_db: f64,
        squeezing_db_in: f64,
        target_error: f64,
        sample_rate_hz: f64,
        link_time_s: f64,
    ) -> Result<Self> {
        if !loss_db.is_finite() || loss_db < 0.0 {
            return Err(Error::InvalidInput(format!(
                "loss must be finite and ≥ 0 dB, got {loss_db}"
            )));
        }
        if !squeezing_db_in.is_finite() || squeezing_db_in <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "input squeezing must be finite and > 0 dB, got {squeezing_db_in}"
            )));
        }
        if !target_error.is_finite() || target_error <= 0.0 || target_error >= 0.5 {
            return Err(Error::InvalidInput(format!(
                "target error must lie in (0, 0.5), got {target_error}"
            )));
        }
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if !link_time_s.is_finite() || link_time_s <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "link time must be positive, got {link_time_s}"
            )));
        }
        Ok(LinkScenario {
            loss_db,
            squeezing_db_in,
            target_error,
            sample_rate_hz,
            link_time_s,
        })
    }

    /// Channel loss in dB.
    pub fn loss_db(&self) -> f64 {
        self.loss_db
    }

    /// Source squeezing level in dB below shot noise, before the channel.
    pub fn squeezing_db_in(&self) -> f64 {
        self.squeezing_db_in
    }

    /// Maximum acceptable average error probability.
    pub fn target_error(&self) -> f64 {
        self.target_error
    }

    /// Receiver sample rate in Hz.
    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    /// Available link (pass) duration in seconds.
    pub fn link_time_s(&self) -> f64 {
        self.link_time_s
    }
}

/// Hypothesis variances seen by the receiver: the coherent reference stays
/// at shot noise (loss fixed point), the squeezed variance is degraded by
/// the channel.
pub fn effective_hypotheses(s: &LinkScenario) -> Result<(f64, f64)> {
    let v_in = db_to_variance(s.squeezing_db_in)?;
    Ok((1.0, apply_loss(v_in, s.loss_db)?))
}

/// Effective squeezing parameter after loss, `r = −½·ln(V_sqz)`; errors if
/// the loss has erased the distinguishability entirely.
fn effective_r(s: &LinkScenario) -> Result<f64> {
    let (_, v_sqz) = effective_hypotheses(s)?;
    if v_sqz >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "degenerate scenario: effective squeezed variance {v_sqz} is \
             indistinguishable from shot noise at loss {} dB",
            s.loss_db
        )));
    }
    Ok(-0.5 * v_sqz.ln())
}

/// Smallest sample count whose optimized error probability meets the
/// scenario target: exponential bracketing followed by integer bisection on
/// `N` (the optimized error is nonincreasing in `N`). At link-budget scales
/// this runs entirely in the normal-approximation branch of
/// [`error_probability`].
pub fn required_samples(s: &LinkScenario) -> Result<u64> {
    let r = effective_r(s)?;
    let target = s.target_error;
    if error_probability(1, r)? <= target {
        return Ok(1);
    }
    let mut lo = 1u64; // error(lo) > target
    let mut hi = 2u64;
    loop {
        if error_probability(hi, r)? <= target {
            break;
        }
        lo = hi;
        if hi > 1 << 50 {
            return Err(Error::NoConvergence(format!(
                "error target {target} not reached by N = {hi}"
            )));
        }
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if error_probability(mid, r)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Time to acquire `N` samples at the scenario's rate, and whether that fits
/// within the link window.
pub fn acquisition_time(n: u64, s: &LinkScenario) -> Result<(f64, bool)> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count N must be ≥ 1".to_string()));
    }
    let seconds = n as f64 / s.sample_rate_hz;
    Ok((seconds, seconds <= s.link_time_s))
}

/// Optimized error probability at each grid point; the grid must be
/// nonempty and strictly ascending.
pub fn error_curve(s: &LinkScenario, n_grid: &[u64]) -> Result<Vec<(u64, f64)>> {
    if n_grid.is_empty() {
        return Err(Error::InvalidInput("N grid must be nonempty".to_string()));
    }
    let mut prev = 0u64;
    for &n in n_grid {
        if n <= prev {
            return Err(Error::InvalidInput(format!(
                "N grid must be strictly ascending (saw {n} after {prev})"
            )));
        }
        prev = n;
    }
    let r = effective_r(s)?;
    n_grid
        .iter()
        .map(|&n| Ok((n, error_probability(n, r)?)))
        .collect()
}
