//! Single-copy binary homodyne statistics.
//!
//! One copy of the state is displaced by `α` and measured with a homodyne
//! detector whose output is reduced to one bit: the sign of the quadrature
//! sample. Everything observable then lives in the two Bernoulli
//! probabilities `P(+|h) = Φ(α/√V_h)`; this module computes their
//! difference, the Bayesian average posterior, the success probability of
//! the induced decision rule, and the displacement optimizations of both.

use crate::error::{Error, Result};
use crate::numerics::{maximize_scalar, std_normal_cdf, Interval, ToleranceSpec};
use crate::states::variance_of_r;

/// One-bit measurement record: the sign of the homodyne sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOutcome {
    /// Nonnegative quadrature projection.
    Plus,
    /// Negative quadrature projection.
    Minus,
}

/// Everything the single-copy analysis produces for one `(r, α)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleCopyReport {
    /// Displacement amplitude the row was evaluated at.
    pub alpha: f64,
    /// `P(+|coherent)`.
    pub p_plus_coh: f64,
    /// `P(+|squeezed)`.
    pub p_plus_sqz: f64,
    /// `ΔΠ₊ = P(+|sqz) − P(+|coh)`; nonnegative for α ≥ 0.
    pub delta_pi: f64,
    /// Average a-posteriori probability; in [1/2, 2/3].
    pub avg_posterior: f64,
    /// Success probability `(1 + ΔΠ₊)/2` of the sign decision rule; in
    /// [1/2, 3/4].
    pub success_prob: f64,
}

/// Fixed search domain for displacement optimizations: both objectives decay
/// to their trivial values well before α = 10 for every squeezing strength of
/// interest.
pub(crate) fn alpha_domain() -> Interval {
    Interval::new(0.0, 10.0).expect("static domain")
}

/// Probability of the '+' outcome for a marginal of variance `V` displaced by
/// `α`: `Φ(α/√V)`.
///
/// # Errors
///
/// Nonpositive `V` and non-finite `α` are rejected.
pub fn p_plus(v: f64, alpha: f64) -> Result<f64> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "variance must be positive, got {v}"
        )));
    }
    std_normal_cdf(alpha / v.sqrt())
}

fn validate_r_alpha(r: f64, alpha: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezing parameter must be finite and ≥ 0, got {r}"
        )));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidInput(format!(
            "displacement must be finite and ≥ 0, got {alpha}"
        )));
    }
    Ok(())
}

/// Outcome-probability difference `ΔΠ₊(α) = P(+|sqz) − P(+|coh)`.
///
/// Vanishes at `α = 0` and as `α → ∞`, and is strictly positive in between
/// for `r > 0`: the narrower squeezed marginal concentrates more weight on
/// the positive side of the displaced threshold, which is what makes the '+'
/// outcome evidence for squeezing.
pub fn delta_pi(r: f64, alpha: f64) -> Result<f64> {
    validate_r_alpha(r, alpha)?;
    let b = p_plus(variance_of_r(r)?, alpha)?;
    let a = p_plus(1.0, alpha)?;
    Ok(b - a)
}

/// Sum over outcomes of `Σ_h P(y|h)² / (2·Σ_{h'} P(y|h'))`, the average
/// posterior for equal priors. Terms whose outcome has zero probability under
/// both hypotheses are skipped (their limit contribution is zero).
fn posterior_from_p_plus(a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for (pa, pb) in [(a, b), (1.0 - a, 1.0 - b)] {
        let denom = pa + pb;
        if denom > 0.0 {
            total += (pa * pa + pb * pb) / (2.0 * denom);
        }
    }
    total
}

/// Average a-posteriori probability of a correct single-copy Bayes update:
///
/// ```text
/// ⟨P⟩ = Σ_y Σ_h P(y|h)² / (4·P_Y(y)),   P_Y(y) = ½·Σ_h P(y|h)
/// ```
///
/// Equals 1/2 at `r = 0` (indistinguishable hypotheses) and is bounded above
/// by 2/3, the best a single yes/no question can do on an equal-prior binary
/// hypothesis.
pub fn single_posterior(r: f64, alpha: f64) -> Result<f64> {
    validate_r_alpha(r, alpha)?;
    let b = p_plus(variance_of_r(r)?, alpha)?;
    let a = p_plus(1.0, alpha)?;
    Ok(posterior_from_p_plus(a, b))
}

/// Closed-form displacement maximizing the single-copy success probability:
///
/// ```text
/// α_opt(r) = √(2r / (e^{2r} − 1))
/// ```
///
/// which is also the abscissa where the two undisplaced marginal densities
/// intersect. The removable singularity at `r = 0` is filled with its limit 1.
pub fn optimal_displacement_success(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezing parameter must be finite and ≥ 0, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * r / (2.0 * r).exp_m1()).sqrt())
}

/// Maximum single-copy success probability and its maximizing displacement,
/// returned as `(probability, alpha)`.
///
/// Maximizes `(1 + ΔΠ₊(α))/2` over α ∈ [0, 10]; the numeric maximizer
/// coincides with [`optimal_displacement_success`] up to optimizer tolerance.
/// At `r = 0` the objective is flat at 1/2 and the tie-break returns the
/// smallest α.
pub fn single_success(r: f64) -> Result<(f64, f64)> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezing parameter must be finite and ≥ 0, got {r}"
        )));
    }
    let v = variance_of_r(r)?;
    let obj = |alpha: f64| {
        let b = std_normal_cdf(alpha / v.sqrt()).expect("finite alpha");
        let a = std_normal_cdf(alpha).expect("finite alpha");
        0.5 * (1.0 + (b - a))
    };
    let (alpha, p) = maximize_scalar(obj, alpha_domain(), ToleranceSpec::default())?;
    Ok((p, alpha))
}

/// Displacement maximizing the single-copy average posterior, returned as
/// `(alpha, probability)`.
///
/// The posterior-optimal displacement is *larger* than the success-optimal
/// one at small `r` (the posterior rewards confident late errors differently
/// than the hard decision does); the two coincide only for strong squeezing.
pub fn optimize_single_posterior(r: f64) -> Result<(f64, f64)> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezing parameter must be finite and ≥ 0, got {r}"
        )));
    }
    let v = variance_of_r(r)?;
    let obj = |alpha: f64| {
        let b = std_normal_cdf(alpha / v.sqrt()).expect("finite alpha");
        let a = std_normal_cdf(alpha).expect("finite alpha");
        posterior_from_p_plus(a, b)
    };
    maximize_scalar(obj, alpha_domain(), ToleranceSpec::default())
}

/// Assembles the full single-copy report for one `(r, α)` point.
pub fn single_copy_report(r: f64, alpha: f64) -> Result<SingleCopyReport> {
    validate_r_alpha(r, alpha)?;
    let p_plus_sqz = p_plus(variance_of_r(r)?, alpha)?;
    let p_plus_coh = p_plus(1.0, alpha)?;
    let delta = p_plus_sqz - p_plus_coh;
    Ok(SingleCopyReport {
        alpha,
        p_plus_coh,
        p_plus_sqz,
        delta_pi: delta,
        avg_posterior: posterior_from_p_plus(p_plus_coh, p_plus_sqz),
        success_prob: 0.5 * (1.0 + delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_rel(got: f64, want: f64, rel: f64) {
        let err = ((got - want) / want).abs();
        assert!(err <= rel, "rel err {err:e} > {rel:e} (got {got:?}, want {want:?})");
    }

    fn assert_abs(got: f64, want: f64, abs: f64) {
        assert!(
            (got - want).abs() <= abs,
            "abs err {:e} > {abs:e} (got {got:?}, want {want:?})",
            (got - want).abs()
        );
    }

    #[test]
    fn p_plus_values() {
        assert_eq!(p_plus(1.0, 0.0).unwrap(), 0.5);
        assert_rel(p_plus(1.0, 1.0).unwrap(), 0.8413447460685429485852, 1e-14);
        assert_rel(
            p_plus((-0.17f64).exp(), 1.0).unwrap(),
            0.8618606633396573972627,
            1e-14,
        );
        assert!(p_plus(0.0, 1.0).is_err());
        assert!(p_plus(-1.0, 1.0).is_err());
        assert!(p_plus(1.0, f64::NAN).is_err());
    }

    #[test]
    fn squeezed_plus_probability_dominates() {
        // For α ≥ 0 the narrower marginal puts at least as much mass on '+'.
        for &r in &[0.05, 0.085, 0.3, 0.69, 2.0] {
            let v = variance_of_r(r).unwrap();
            let mut alpha = 0.0;
            while alpha <= 6.0 {
                assert!(p_plus(v, alpha).unwrap() >= p_plus(1.0, alpha).unwrap());
                alpha += 0.13;
            }
        }
    }

    #[test]
    fn delta_pi_values() {
        assert_eq!(delta_pi(0.0, 1.3).unwrap(), 0.0);
        assert_eq!(delta_pi(0.4, 0.0).unwrap(), 0.0);
        assert_rel(
            delta_pi(0.085, 0.9578137470912955).unwrap(),
            0.0205551379126554861771,
            1e-12,
        );
        assert!(delta_pi(0.085, -0.1).is_err());
        assert!(delta_pi(-0.085, 0.1).is_err());
        // Positive in between, vanishing in the far tail.
        assert!(delta_pi(0.3, 1.0).unwrap() > 0.0);
        assert!(delta_pi(0.3, 9.5).unwrap() < 1e-15);
    }

    #[test]
    fn single_posterior_frozen_values() {
        // Monte Carlo cross-checks for these live in the oracle test suite;
        // the references here were frozen from high-precision evaluation.
        assert_rel(single_posterior(0.085, 1.501).unwrap(), 0.5005464187955179, 1e-12);
        assert_rel(single_posterior(0.3, 1.2).unwrap(), 0.5063429570413403, 1e-12);
        for alpha in [0.0, 0.5, 1.501, 4.0] {
            assert_eq!(single_posterior(0.0, alpha).unwrap(), 0.5);
        }
    }

    #[test]
    fn single_posterior_approaches_two_thirds() {
        // Strong squeezing with a vanishing displacement: the '+' outcome
        // becomes certain under squeezing while staying a coin flip under the
        // coherent hypothesis — the 2/3 bound is approached.
        let p = single_posterior(20.0, 1e-6).unwrap();
        assert_abs(p, 2.0 / 3.0, 1e-5);
        // And the bound is never exceeded anywhere.
        for &r in &[0.085, 0.69, 3.0, 20.0] {
            let mut alpha = 0.0;
            while alpha <= 10.0 {
                let v = single_posterior(r, alpha).unwrap();
                assert!((0.5..=2.0 / 3.0 + 1e-12).contains(&v));
                alpha += 0.37;
            }
        }
    }

    #[test]
    fn posterior_symmetric_under_sign_flip_with_relabeling() {
        // Flipping α ↦ −α swaps the roles of '+' and '−'; the average
        // posterior built from the relabeled probabilities is identical,
        // which is what justifies restricting to α ≥ 0.
        for &(r, alpha) in &[(0.085, 1.501), (0.3, 0.7), (0.69, 2.2)] {
            let v = variance_of_r(r).unwrap();
            let a_neg = std_normal_cdf(-alpha).unwrap();
            let b_neg = std_normal_cdf(-alpha / v.sqrt()).unwrap();
            // Relabeled: treat '−' as the squeezing-evidence outcome.
            let relabeled = posterior_from_p_plus(1.0 - a_neg, 1.0 - b_neg);
            let direct = single_posterior(r, alpha).unwrap();
            assert_abs(relabeled, direct, 1e-15);
        }
    }

    #[test]
    fn optimal_displacement_closed_form() {
        assert_eq!(optimal_displacement_success(0.0).unwrap(), 1.0);
        assert_rel(
            optimal_displacement_success(0.085).unwrap(),
            0.9578137470912955102677,
            1e-14,
        );
        // Decays to zero for strong squeezing.
        assert!(optimal_displacement_success(10.0).unwrap() < 1e-3);
        let mut prev = 1.0;
        let mut r = 0.01;
        while r <= 5.0 {
            let a = optimal_displacement_success(r).unwrap();
            assert!(a < prev);
            prev = a;
            r += 0.07;
        }
        assert!(optimal_displacement_success(-1e-9).is_err());
    }

    #[test]
    fn single_success_values() {
        let (p, alpha) = single_success(0.085).unwrap();
        assert_rel(p, 0.5102775689563277430885, 1e-10);
        assert_abs(alpha, 0.9578137470912955, 1e-4);
        let (p0, a0) = single_success(0.0).unwrap();
        assert_eq!(p0, 0.5);
        assert_eq!(a0, 0.0); // flat objective ties to the smallest α
        // Strong squeezing approaches the 3/4 ceiling.
        let (p_large, _) = single_success(8.0).unwrap();
        assert_abs(p_large, 0.75, 1e-3);
    }

    #[test]
    fn single_success_maximizer_matches_closed_form() {
        for &r in &[0.01, 0.085, 0.3, 0.69, 2.0] {
            let (_, alpha) = single_success(r).unwrap();
            let closed = optimal_displacement_success(r).unwrap();
            assert_abs(alpha, closed, 1e-4);
        }
    }

    #[test]
    fn optimize_single_posterior_values() {
        let (alpha, p) = optimize_single_posterior(0.085).unwrap();
        // The optimum sits at 1.5034; the reported working point 1.501 is
        // within the objective's flat top.
        assert_abs(alpha, 1.501, 5e-3);
        assert_rel(p, 0.5005464217054072, 1e-9);
        let (a0, p0) = optimize_single_posterior(0.0).unwrap();
        assert_eq!((a0, p0), (0.0, 0.5));
    }

    #[test]
    fn optimize_single_posterior_matches_dense_grid() {
        // Independent dense-grid scan (10^5 points) at r = 1.
        let r = 1.0;
        let mut best = (0.0, 0.0);
        for i in 0..=100_000 {
            let alpha = 10.0 * i as f64 / 100_000.0;
            let v = single_posterior(r, alpha).unwrap();
            if v > best.1 {
                best = (alpha, v);
            }
        }
        let (alpha, p) = optimize_single_posterior(r).unwrap();
        assert_abs(alpha, best.0, 1e-3);
        assert!(p >= best.1 - 1e-12);
    }

    #[test]
    fn posterior_alpha_exceeds_success_alpha_at_small_r() {
        for &r in &[0.05, 0.085, 0.2, 0.35, 0.5] {
            let (alpha_p, _) = optimize_single_posterior(r).unwrap();
            let (_, alpha_s) = single_success(r).unwrap();
            assert!(
                alpha_p > alpha_s,
                "posterior-optimal α should exceed success-optimal α at r = {r}"
            );
        }
    }

    #[test]
    fn report_respects_bounds() {
        for &r in &[0.0, 0.085, 0.69, 3.0] {
            let mut alpha = 0.0;
            while alpha <= 10.0 {
                let rep = single_copy_report(r, alpha).unwrap();
                assert!(rep.delta_pi >= 0.0);
                assert!((0.5..=2.0 / 3.0 + 1e-12).contains(&rep.avg_posterior));
                assert!((0.5..=0.75 + 1e-12).contains(&rep.success_prob));
                assert_abs(rep.delta_pi, rep.p_plus_sqz - rep.p_plus_coh, 1e-16);
                alpha += 0.41;
            }
        }
    }
}
