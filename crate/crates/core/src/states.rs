//! Gaussian quadrature model: the two hypotheses, their marginal variances,
//! squeezing/decibel conversions, the pure-loss channel, and marginal
//! densities.
//!
//! Shot-noise convention: the coherent-state quadrature variance is exactly 1.
//! A squeezing parameter `r ≥ 0` narrows the measured quadrature to
//! `V = e^{−2r}`; displacement adds a pure mean offset to the marginal. No
//! operator-level formalism appears anywhere — every quantity downstream
//! depends on the marginals alone.

use crate::error::{Error, Result};

/// The two equiprobable state hypotheses to be discriminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Coherent state: quadrature variance 1 (shot noise).
    Coherent,
    /// Squeezed state: quadrature variance `e^{−2r} < 1` along the measured
    /// quadrature.
    Squeezed,
}

impl Hypothesis {
    /// Fixed prior probability of each hypothesis.
    pub const PRIOR: f64 = 0.5;
}

/// Posterior probabilities over the two hypotheses; always sums to 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisPosterior {
    /// Posterior probability of the coherent hypothesis.
    pub coherent: f64,
    /// Posterior probability of the squeezed hypothesis.
    pub squeezed: f64,
}

impl HypothesisPosterior {
    /// Maximum-a-posteriori decision. Exact ties go to
    /// [`Hypothesis::Coherent`]; the squeezed call requires strictly greater
    /// posterior weight.
    pub fn map_decision(&self) -> Hypothesis {
        if self.squeezed > self.coherent {
            Hypothesis::Squeezed
        } else {
            Hypothesis::Coherent
        }
    }
}

/// A one-dimensional Gaussian quadrature marginal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureModel {
    variance: f64,
    mean: f64,
}

impl QuadratureModel {
    /// Creates a marginal model; requires `variance > 0` and a finite mean.
    pub fn new(variance: f64, mean: f64) -> Result<Self> {
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "quadrature variance must be positive, got {variance}"
            )));
        }
        if !mean.is_finite() {
            return Err(Error::InvalidInput(format!(
                "quadrature mean must be finite, got {mean}"
            )));
        }
        Ok(QuadratureModel { variance, mean })
    }

    /// The undisplaced coherent-state marginal (variance 1, mean 0).
    pub fn coherent() -> Self {
        QuadratureModel {
            variance: 1.0,
            mean: 0.0,
        }
    }

    /// The undisplaced squeezed-state marginal (variance `e^{−2r}`, mean 0).
    pub fn squeezed(r: f64) -> Result<Self> {
        Ok(QuadratureModel {
            variance: variance_of_r(r)?,
            mean: 0.0,
        })
    }

    /// Marginal variance in shot-noise units.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Marginal mean in shot-noise units.
    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// Preparation and measurement parameters shared by a detection run: the
/// squeezing parameter, the displacement, and the two hypothesis variances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionSetup {
    r: f64,
    alpha: f64,
    coh_variance: f64,
    sqz_variance: f64,
}

impl DetectionSetup {
    /// Creates a lossless setup: coherent variance exactly 1, squeezed
    /// variance `e^{−2r}`. The analysis is restricted to real, nonnegative
    /// displacement amplitudes.
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidInput(format!(
                "displacement must be finite and ≥ 0, got {alpha}"
            )));
        }
        Ok(DetectionSetup {
            r,
            alpha,
            coh_variance: 1.0,
            sqz_variance: variance_of_r(r)?,
        })
    }

    /// Returns the setup with both hypothesis variances pushed through the
    /// pure-loss channel. The coherent variance stays 1 (fixed point); the
    /// squeezed variance degrades toward 1.
    pub fn after_loss(self, loss_db: f64) -> Result<Self> {
        Ok(DetectionSetup {
            r: self.r,
            alpha: self.alpha,
            coh_variance: apply_loss(self.coh_variance, loss_db)?,
            sqz_variance: apply_loss(self.sqz_variance, loss_db)?,
        })
    }

    /// Squeezing parameter.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Displacement amplitude.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Coherent-hypothesis variance.
    pub fn coh_variance(&self) -> f64 {
        self.coh_variance
    }

    /// Squeezed-hypothesis variance.
    pub fn sqz_variance(&self) -> f64 {
        self.sqz_variance
    }

    /// Variance of the marginal under the given hypothesis.
    pub fn variance_of(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::Coherent => self.coh_variance,
            Hypothesis::Squeezed => self.sqz_variance,
        }
    }
}

/// Squeezed-quadrature variance `e^{−2r}` for squeezing parameter `r ≥ 0`.
///
/// `r = 0` gives the coherent value 1; antisqueezing (negative `r`) is out of
/// scope and rejected.
pub fn variance_of_r(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezing parameter must be finite and ≥ 0, got {r}"
        )));
    }
    Ok((-2.0 * r).exp())
}

/// Squeezing level in decibels below shot noise: `−10·log10(V)`.
///
/// Inverse of [`db_to_variance`].
pub fn variance_to_db(v: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "variance must be positive, got {v}"
        )));
    }
    Ok(-10.0 * v.log10())
}

/// Variance for a squeezing level in dB below shot noise: `10^{−dB/10}`.
///
/// Inverse of [`variance_to_db`].
pub fn db_to_variance(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::InvalidInput(format!(
            "squeezing level must be finite, got {db} dB"
        )));
    }
    Ok(10f64.powf(-db / 10.0))
}

/// Pure-loss Gaussian channel acting on a quadrature variance:
///
/// ```text
/// V ↦ η·V + (1 − η),    η = 10^{−loss_db/10}
/// ```
///
/// The shot-noise variance 1 is a fixed point; any squeezed variance decays
/// toward 1 as the loss grows. `loss_db = +∞` is accepted and returns the
/// vacuum value exactly.
pub fn apply_loss(v: f64, loss_db: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "variance must be positive, got {v}"
        )));
    }
    if loss_db.is_nan() || loss_db < 0.0 {
        return Err(Error::InvalidInput(format!(
            "loss must be ≥ 0 dB, got {loss_db}"
        )));
    }
    if loss_db.is_infinite() {
        return Ok(1.0);
    }
    let eta = 10f64.powf(-loss_db / 10.0);
    Ok(eta * v + (1.0 - eta))
}

/// Normal probability density of the model's marginal at `x`.
pub fn marginal_pdf(model: &QuadratureModel, x: f64) -> f64 {
    let v = model.variance();
    let z = x - model.mean();
    (-z * z / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_halfline, ToleranceSpec};

    fn assert_abs(got: f64, want: f64, abs: f64) {
        assert!(
            (got - want).abs() <= abs,
            "abs err {:e} > {abs:e} (got {got:?}, want {want:?})",
            (got - want).abs()
        );
    }

    #[test]
    fn variance_of_r_values() {
        assert_eq!(variance_of_r(0.0).unwrap(), 1.0);
        assert_abs(variance_of_r(0.085).unwrap(), 0.8436648165963837, 1e-15);
        assert_abs(variance_of_r(0.69).unwrap(), 0.25158, 5e-6);
        assert!(variance_of_r(-0.01).is_err());
        assert!(variance_of_r(f64::NAN).is_err());
    }

    #[test]
    fn variance_of_r_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        let mut r = 0.0;
        while r <= 3.0 {
            let v = variance_of_r(r).unwrap();
            assert!(v < prev || r == 0.0);
            prev = v;
            r += 0.05;
        }
    }

    #[test]
    fn db_conversions() {
        assert_eq!(variance_to_db(1.0).unwrap(), 0.0);
        assert_abs(variance_to_db(0.25158).unwrap(), 5.99, 5e-3);
        assert_abs(variance_to_db(0.5).unwrap(), 3.0103, 1e-4);
        assert!(variance_to_db(0.0).is_err());
        assert!(variance_to_db(-1.0).is_err());
        // Round trip both ways across several decades.
        for &v in &[1e-3, 0.01, 0.2516, 0.5, 0.9999, 1.0, 2.0] {
            let db = variance_to_db(v).unwrap();
            assert_abs(db_to_variance(db).unwrap() / v, 1.0, 1e-12);
        }
        for &db in &[-3.0, 0.0, 0.37, 6.0, 40.0] {
            let v = db_to_variance(db).unwrap();
            assert_abs(variance_to_db(v).unwrap(), db, 1e-12);
        }
    }

    #[test]
    fn loss_channel() {
        // Lossless channel is the identity.
        assert_eq!(apply_loss(0.3, 0.0).unwrap(), 0.3);
        // Full loss returns vacuum statistics exactly.
        assert_eq!(apply_loss(0.3, f64::INFINITY).unwrap(), 1.0);
        // 40 dB on a 6 dB squeezed input: η = 1e-4.
        assert_abs(apply_loss(0.25158, 40.0).unwrap(), 0.999925158, 1e-12);
        // Shot noise is a fixed point for any loss.
        for &l in &[0.0, 1.0, 17.3, 45.0] {
            assert_abs(apply_loss(1.0, l).unwrap(), 1.0, 1e-15);
        }
        assert!(apply_loss(0.3, -1.0).is_err());
        assert!(apply_loss(0.0, 3.0).is_err());
    }

    #[test]
    fn loss_is_monotone_toward_vacuum() {
        for &v in &[0.01, 0.2516, 0.8437, 0.99] {
            let mut prev = v;
            let mut l = 0.0;
            while l <= 60.0 {
                let out = apply_loss(v, l).unwrap();
                assert!(out >= prev - 1e-15 && out <= 1.0);
                prev = out;
                l += 1.5;
            }
        }
    }

    #[test]
    fn marginal_pdf_peak_and_normalization() {
        let m = QuadratureModel::coherent();
        assert_abs(
            marginal_pdf(&m, 0.0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            1e-16,
        );
        // Normalization over the whole line, split at the mean.
        let sq = QuadratureModel::new(0.8437, 0.3).unwrap();
        let tol = ToleranceSpec::default();
        let right = integrate_halfline(|s| marginal_pdf(&sq, 0.3 + s), tol).unwrap();
        let left = integrate_halfline(|s| marginal_pdf(&sq, 0.3 - s), tol).unwrap();
        assert_abs(left + right, 1.0, 1e-9);
    }

    #[test]
    fn marginal_densities_cross_at_closed_form_point() {
        // The coherent (V=1) and squeezed (V=e^{−2r}) densities intersect at
        // x = √(2r/(e^{2r}−1)). Locate the crossing independently by
        // bisection on the density difference and compare.
        for &r in &[0.05, 0.085, 0.3, 0.69] {
            let coh = QuadratureModel::coherent();
            let sqz = QuadratureModel::squeezed(r).unwrap();
            let d = |x: f64| marginal_pdf(&coh, x) - marginal_pdf(&sqz, x);
            // Squeezed is taller at 0, coherent fatter in the tail.
            let (mut lo, mut hi) = (1e-6, 5.0);
            assert!(d(lo) < 0.0 && d(hi) > 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if d(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            let closed = (2.0 * r / ((2.0 * r).exp_m1())).sqrt();
            assert_abs(root, closed, 1e-10);
        }
    }

    #[test]
    fn detection_setup_invariants() {
        let s = DetectionSetup::new(0.69, 1.2).unwrap();
        assert_eq!(s.coh_variance(), 1.0);
        assert!(s.sqz_variance() <= s.coh_variance());
        assert_eq!(s.variance_of(Hypothesis::Coherent), 1.0);
        assert_eq!(s.variance_of(Hypothesis::Squeezed), s.sqz_variance());
        let lossy = s.after_loss(40.0).unwrap();
        assert!(lossy.sqz_variance() > s.sqz_variance());
        assert!(lossy.sqz_variance() <= lossy.coh_variance() + 1e-15);
        assert!(DetectionSetup::new(0.1, -0.5).is_err());
        assert!(DetectionSetup::new(-0.1, 0.5).is_err());
    }

    #[test]
    fn map_decision_tie_goes_coherent() {
        let tie = HypothesisPosterior {
            coherent: 0.5,
            squeezed: 0.5,
        };
        assert_eq!(tie.map_decision(), Hypothesis::Coherent);
        let sq = HypothesisPosterior {
            coherent: 0.4,
            squeezed: 0.6,
        };
        assert_eq!(sq.map_decision(), Hypothesis::Squeezed);
    }

    #[test]
    fn model_validation() {
        assert!(QuadratureModel::new(0.0, 0.0).is_err());
        assert!(QuadratureModel::new(-1.0, 0.0).is_err());
        assert!(QuadratureModel::new(1.0, f64::NAN).is_err());
        assert!(QuadratureModel::squeezed(-0.1).is_err());
    }
}
