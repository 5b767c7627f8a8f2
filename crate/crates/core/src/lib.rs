//! Discrimination statistics for one-bit (binary) homodyne detection of
//! Gaussian quadratures.
//!
//! The library answers one family of questions: given repeated quadrature
//! measurements of a state that is either coherent (shot-noise variance 1)
//! or squeezed (variance `e^{−2r} < 1`), how well can the two be told apart
//! — and how much of that distinguishability survives when each homodyne
//! sample is crushed to a single sign bit?
//!
//! Module map:
//!
//! * [`numerics`] — scalar kernels: normal CDF, log-binomial PMF, scaled
//!   chi-squared log-density, 1-D maximization, half-line quadrature.
//! * [`states`] — hypotheses, variances, dB conversions, loss channel,
//!   marginal densities.
//! * [`single`] — one-copy statistics: outcome probabilities, average
//!   posterior, success probability, displacement optimization.
//! * [`multicopy`] — `N`-copy counting statistics: binomial outcome law,
//!   count/sequence posteriors, thresholded decisions, jointly optimized
//!   `(α, τ)` rules, error probability at any scale.
//! * [`ideal`] — the continuous-readout baseline (variance statistic,
//!   MAP rule) and the one-bit sample-overhead ratio against it.
//! * [`pipeline`] — deterministic sample generation, quantization, file
//!   I/O, binarization, empirical posterior traces.
//! * [`link`] — satellite scenario calculator built on the above.
//!
//! Commonly used types and functions are re-exported at the crate root.
//!
//! # Example
//!
//! ```
//! use bhd_core::{optimize_multicopy_success, single_success};
//!
//! // One copy: the sign of one displaced homodyne sample is right just
//! // over half the time at weak squeezing…
//! let (p1, _alpha) = single_success(0.085).unwrap();
//! assert!(p1 > 0.5 && p1 < 0.52);
//!
//! // …but a thousand copies with the jointly optimized threshold rule are
//! // already close to certain.
//! let (_alpha, _tau, p1000) = optimize_multicopy_success(1000, 0.085).unwrap();
//! assert!(p1000 > 0.85);
//! ```

pub mod error;
pub mod numerics;
pub mod states;
pub mod single;
pub mod multicopy;
pub mod ideal;
pub mod pipeline;
pub mod link;

pub use error::{Error, Result};
pub use ideal::{
    ideal_avg_posterior, ideal_error_prob, ideal_map_decide, overhead_ratio, variance_likelihood,
    variance_posterior, VarianceStatistic,
};
pub use link::{
    acquisition_time, effective_hypotheses, error_curve, required_samples, LinkScenario,
};
pub use multicopy::{
    count_posterior, error_probability, multicopy_posterior, multicopy_success,
    optimize_multicopy_posterior, optimize_multicopy_success, outcome_distribution,
    sequence_posterior, DecisionPolicy, OutcomeCount,
};
pub use numerics::{
    integrate_halfline, log_binomial_pmf, maximize_scalar, scaled_chi2_logpdf, std_normal_cdf,
    Interval, ToleranceSpec,
};
pub use pipeline::{
    binarize, default_checkpoints, generate_samples, ingest, posterior_trace, quantize,
    sidecar_path, write_samples, PosteriorTrace, SampleSet, SampleSource,
};
pub use single::{
    delta_pi, optimal_displacement_success, optimize_single_posterior, p_plus, single_copy_report,
    single_posterior, single_success, BinaryOutcome, SingleCopyReport,
};
pub use states::{
    apply_loss, db_to_variance, marginal_pdf, variance_of_r, variance_to_db, DetectionSetup,
    Hypothesis, HypothesisPosterior, QuadratureModel,
};
