//! `bhd` — batch front end for the one-bit homodyne detection library.
//!
//! Each subcommand computes one analysis with `bhd-core` and emits a CSV or
//! JSON artifact (stdout by default, `--out` for a file). Outputs are
//! deterministic for identical invocations, carry a metadata header echoing
//! the request, and are written atomically. Exit codes: 0 success, 2 invalid
//! request, 3 computation failure.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use bhd_core::{
    acquisition_time, default_checkpoints, delta_pi, effective_hypotheses, generate_samples,
    ideal_avg_posterior, ideal_error_prob, ingest, optimize_multicopy_posterior,
    optimize_multicopy_success, overhead_ratio, posterior_trace, required_samples, sidecar_path,
    single_posterior, variance_of_r, variance_to_db, write_samples, Error, LinkScenario, Result,
    SampleSet,
};
use output::{emit, Artifact, Cell, Format};

/// Sample count used when a trace input is seeded rather than ingested.
const TRACE_SEEDED_COUNT: u64 = 1_000_000;
/// Hard cap on swept-grid sizes, to catch runaway step values early.
const MAX_SWEEP_POINTS: u64 = 1_000_001;

#[derive(Parser)]
#[command(
    name = "bhd",
    version,
    about = "One-bit homodyne detection: discrimination statistics, baselines, and sample pipelines"
)]
struct Cli {
    /// Output file (written atomically); stdout when omitted. For
    /// `montecarlo` this is the binary sample payload path (required there).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Artifact format; defaults to CSV for tabular subcommands (single,
    /// multicopy, ideal, trace) and JSON for record subcommands.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    /// Maximize the average a-posteriori probability.
    Posterior,
    /// Maximize the success probability of the thresholded decision.
    Success,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-copy discrimination figures at a fixed or swept displacement.
    #[command(allow_negative_numbers = true, group(ArgGroup::new("alpha_mode").required(true).args(["alpha_sweep", "alpha"])))]
    Single {
        /// Squeezing parameter r (variance e^{-2r}).
        #[arg(long)]
        r: f64,
        /// Displacement sweep start:stop:step, e.g. 0:3:0.01.
        #[arg(long, value_name = "START:STOP:STEP")]
        alpha_sweep: Option<String>,
        /// Single displacement value.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Optimized multi-copy discrimination at each requested copy count.
    #[command(allow_negative_numbers = true)]
    Multicopy {
        /// Squeezing parameter r (variance e^{-2r}).
        #[arg(long)]
        r: f64,
        /// Comma-separated copy counts, e.g. 1,10,100.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        /// Figure of merit to optimize per copy count.
        #[arg(long, value_enum)]
        objective: Objective,
    },
    /// Sample overhead of one-bit detection relative to the ideal receiver.
    #[command(allow_negative_numbers = true)]
    Overhead {
        /// Squeezing parameter r (variance e^{-2r}).
        #[arg(long)]
        r: f64,
        /// Comma-separated posterior targets in (0.55, 0.999), e.g. 0.6,0.9.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<f64>,
    },
    /// Ideal (full-resolution) receiver baseline at each copy count.
    #[command(allow_negative_numbers = true)]
    Ideal {
        /// Squeezing parameter r (variance e^{-2r}).
        #[arg(long)]
        r: f64,
        /// Comma-separated copy counts, e.g. 1,10,100.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Satellite link budget: samples and time needed under channel loss.
    #[command(allow_negative_numbers = true)]
    Link {
        /// One-way channel loss in dB (≥ 0).
        #[arg(long)]
        loss_db: f64,
        /// Squeezing at the transmitter in dB below shot noise (> 0).
        #[arg(long)]
        squeezing_db: f64,
        /// Target error probability in (0, 0.5).
        #[arg(long)]
        target_error: f64,
        /// Detector sample rate in Hz.
        #[arg(long)]
        rate_hz: f64,
        /// Available link window in seconds.
        #[arg(long)]
        link_time_s: f64,
    },
    /// Draw seeded Gaussian quadrature samples and write a binary payload.
    #[command(allow_negative_numbers = true)]
    Montecarlo {
        /// Quadrature variance of the generated samples (> 0).
        #[arg(long)]
        variance: f64,
        /// Number of samples (≥ 1).
        #[arg(long)]
        count: u64,
        /// RNG seed; identical seeds reproduce the payload bit for bit.
        #[arg(long)]
        seed: u64,
    },
    /// Validate a sample payload (and optionally summarize it).
    Ingest {
        /// Payload path; its `<name>.meta` sidecar must sit alongside.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Emit a summary artifact instead of validating quietly.
        #[arg(long)]
        summary: bool,
    },
    /// Empirical posterior convergence traces for a coherent/squeezed pair.
    #[command(
        allow_negative_numbers = true,
        group(ArgGroup::new("coh_source").required(true).args(["coh_file", "coh_seed"])),
        group(ArgGroup::new("sqz_source").required(true).args(["sqz_file", "sqz_seed"]))
    )]
    Trace {
        /// Ingest the coherent-truth samples from this payload.
        #[arg(long, value_name = "PATH")]
        coh_file: Option<PathBuf>,
        /// Generate the coherent-truth samples (variance 1) from this seed.
        #[arg(long)]
        coh_seed: Option<u64>,
        /// Ingest the squeezed-truth samples from this payload.
        #[arg(long, value_name = "PATH")]
        sqz_file: Option<PathBuf>,
        /// Generate the squeezed-truth samples (variance e^{-2r}) from this seed.
        #[arg(long)]
        sqz_seed: Option<u64>,
        /// Squeezing parameter r assumed by the inference.
        #[arg(long)]
        r: f64,
        /// Fixed displacement applied before binarization.
        #[arg(long)]
        alpha: f64,
        /// Comma-separated checkpoint counts; defaults to a 1-2-5 ladder.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bhd: error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let request = echo_request(&cli);
    let default = default_format(&cli.cmd);
    let artifact = match &cli.cmd {
        Cmd::Single { r, alpha_sweep, alpha } => {
            Some(run_single(request, *r, alpha_sweep.as_deref(), *alpha)?)
        }
        Cmd::Multicopy { r, n_list, objective } => {
            Some(run_multicopy(request, *r, n_list, *objective)?)
        }
        Cmd::Overhead { r, targets } => Some(run_overhead(request, *r, targets)?),
        Cmd::Ideal { r, n_list } => Some(run_ideal(request, *r, n_list)?),
        Cmd::Link { loss_db, squeezing_db, target_error, rate_hz, link_time_s } => {
            Some(run_link(request, *loss_db, *squeezing_db, *target_error, *rate_hz, *link_time_s)?)
        }
        Cmd::Montecarlo { variance, count, seed } => {
            let payload = cli.out.as_deref().ok_or_else(|| {
                Error::InvalidInput(
                    "montecarlo requires --out <PATH> for the sample payload".to_string(),
                )
            })?;
            let artifact = run_montecarlo(request, *variance, *count, *seed, payload)?;
            // The payload occupies --out, so the summary goes to stdout.
            emit(&artifact, cli.format.unwrap_or(default), None)?;
            return Ok(());
        }
        Cmd::Ingest { input, summary } => run_ingest(request, input, *summary)?,
        Cmd::Trace { coh_file, coh_seed, sqz_file, sqz_seed, r, alpha, checkpoints } => {
            Some(run_trace(
                request,
                coh_file.as_deref(),
                *coh_seed,
                sqz_file.as_deref(),
                *sqz_seed,
                *r,
                *alpha,
                checkpoints.as_deref(),
            )?)
        }
    };
    if let Some(artifact) = artifact {
        emit(&artifact, cli.format.unwrap_or(default), cli.out.as_deref())?;
    }
    Ok(())
}

fn default_format(cmd: &Cmd) -> Format {
    match cmd {
        Cmd::Single { .. } | Cmd::Multicopy { .. } | Cmd::Ideal { .. } | Cmd::Trace { .. } => {
            Format::Csv
        }
        Cmd::Overhead { .. } | Cmd::Link { .. } | Cmd::Montecarlo { .. } | Cmd::Ingest { .. } => {
            Format::Json
        }
    }
}

/// Canonical one-line echo of the parsed request, stable across runs.
fn echo_request(cli: &Cli) -> String {
    let mut s = match &cli.cmd {
        Cmd::Single { r, alpha_sweep, alpha } => {
            let mut s = format!("single --r {r}");
            if let Some(sweep) = alpha_sweep {
                s.push_str(&format!(" --alpha-sweep {sweep}"));
            }
            if let Some(a) = alpha {
                s.push_str(&format!(" --alpha {a}"));
            }
            s
        }
        Cmd::Multicopy { r, n_list, objective } => format!(
            "multicopy --r {r} --n-list {} --objective {}",
            join(n_list),
            match objective {
                Objective::Posterior => "posterior",
                Objective::Success => "success",
            }
        ),
        Cmd::Overhead { r, targets } => {
            format!("overhead --r {r} --targets {}", join(targets))
        }
        Cmd::Ideal { r, n_list } => format!("ideal --r {r} --n-list {}", join(n_list)),
        Cmd::Link { loss_db, squeezing_db, target_error, rate_hz, link_time_s } => format!(
            "link --loss-db {loss_db} --squeezing-db {squeezing_db} \
             --target-error {target_error} --rate-hz {rate_hz} --link-time-s {link_time_s}"
        ),
        Cmd::Montecarlo { variance, count, seed } => {
            format!("montecarlo --variance {variance} --count {count} --seed {seed}")
        }
        Cmd::Ingest { input, summary } => {
            let mut s = format!("ingest --in {}", input.display());
            if *summary {
                s.push_str(" --summary");
            }
            s
        }
        Cmd::Trace { coh_file, coh_seed, sqz_file, sqz_seed, r, alpha, checkpoints } => {
            let mut s = "trace".to_string();
            if let Some(p) = coh_file {
                s.push_str(&format!(" --coh-file {}", p.display()));
            }
            if let Some(seed) = coh_seed {
                s.push_str(&format!(" --coh-seed {seed}"));
            }
            if let Some(p) = sqz_file {
                s.push_str(&format!(" --sqz-file {}", p.display()));
            }
            if let Some(seed) = sqz_seed {
                s.push_str(&format!(" --sqz-seed {seed}"));
            }
            s.push_str(&format!(" --r {r} --alpha {alpha}"));
            if let Some(cps) = checkpoints {
                s.push_str(&format!(" --checkpoints {}", join(cps)));
            }
            s
        }
    };
    if let Some(f) = cli.format {
        s.push_str(match f {
            Format::Csv => " --format csv",
            Format::Json => " --format json",
        });
    }
    if let Some(out) = &cli.out {
        s.push_str(&format!(" --out {}", out.display()));
    }
    s
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a `start:stop:step` sweep into its displacement grid.
fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(Error::InvalidInput(format!(
            "--alpha-sweep must be START:STOP:STEP, got {spec:?}"
        )));
    };
    let parse = |name: &str, text: &str| -> Result<f64> {
        text.parse::<f64>().map_err(|_| {
            Error::InvalidInput(format!("--alpha-sweep {name} is not a number: {text:?}"))
        })
    };
    let (start, stop, step) = (parse("start", start)?, parse("stop", stop)?, parse("step", step)?);
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step <= 0.0 || stop < start
    {
        return Err(Error::InvalidInput(format!(
            "--alpha-sweep needs finite bounds with stop ≥ start and step > 0, got {spec:?}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(Error::InvalidInput(format!(
            "--alpha-sweep would produce {count} points (cap {MAX_SWEEP_POINTS})"
        )));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn run_single(
    request: String,
    r: f64,
    alpha_sweep: Option<&str>,
    alpha: Option<f64>,
) -> Result<Artifact> {
    let (grid, strategy) = match (alpha_sweep, alpha) {
        (Some(spec), None) => (
            parse_sweep(spec)?,
            format!("swept displacement grid {spec} (no optimization)"),
        ),
        (None, Some(a)) => (vec![a], format!("fixed displacement alpha = {a}")),
        _ => unreachable!("clap group enforces exactly one alpha mode"),
    };
    let mut rows = Vec::with_capacity(grid.len());
    for a in grid {
        let gap = delta_pi(r, a)?;
        let posterior = single_posterior(r, a)?;
        let success = 0.5 * (1.0 + gap);
        rows.push(vec![Cell::Real(a), Cell::Real(gap), Cell::Real(posterior), Cell::Real(success)]);
    }
    Ok(Artifact {
        request,
        alpha_strategy: strategy,
        columns: vec!["alpha", "delta_pi", "avg_posterior", "success_prob"],
        rows,
    })
}

fn run_multicopy(request: String, r: f64, n_list: &[u64], objective: Objective) -> Result<Artifact> {
    match objective {
        Objective::Posterior => {
            let mut rows = Vec::with_capacity(n_list.len());
            for &n in n_list {
                let (alpha, posterior) = optimize_multicopy_posterior(n, r)?;
                rows.push(vec![Cell::Count(n), Cell::Real(alpha), Cell::Real(posterior)]);
            }
            Ok(Artifact {
                request,
                alpha_strategy: "displacement re-optimized per copy count for the average \
                                 posterior"
                    .to_string(),
                columns: vec!["N", "alpha_opt", "avg_posterior"],
                rows,
            })
        }
        Objective::Success => {
            let mut rows = Vec::with_capacity(n_list.len());
            for &n in n_list {
                let (alpha, tau, success) = optimize_multicopy_success(n, r)?;
                rows.push(vec![
                    Cell::Count(n),
                    Cell::Real(alpha),
                    Cell::Count(tau),
                    Cell::Real(success),
                ]);
            }
            Ok(Artifact {
                request,
                alpha_strategy: "displacement and count threshold re-optimized per copy count \
                                 for the success probability"
                    .to_string(),
                columns: vec!["N", "alpha_opt", "tau_opt", "success_prob"],
                rows,
            })
        }
    }
}

fn run_overhead(request: String, r: f64, targets: &[f64]) -> Result<Artifact> {
    let mut rows = Vec::with_capacity(targets.len());
    for &target in targets {
        let ratio = overhead_ratio(target, r)?;
        rows.push(vec![Cell::Real(target), Cell::Real(ratio)]);
    }
    Ok(Artifact {
        request,
        alpha_strategy: "displacement re-optimized at every probed copy count during the \
                         sample-requirement search"
            .to_string(),
        columns: vec!["target", "overhead_ratio"],
        rows,
    })
}

fn run_ideal(request: String, r: f64, n_list: &[u64]) -> Result<Artifact> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let posterior = ideal_avg_posterior(n, r)?;
        let error = ideal_error_prob(n, r)?;
        rows.push(vec![Cell::Count(n), Cell::Real(posterior), Cell::Real(error)]);
    }
    Ok(Artifact {
        request,
        alpha_strategy: "not applicable (full-resolution baseline uses no displacement)"
            .to_string(),
        columns: vec!["N", "avg_posterior", "error_prob"],
        rows,
    })
}

fn run_link(
    request: String,
    loss_db: f64,
    squeezing_db: f64,
    target_error: f64,
    rate_hz: f64,
    link_time_s: f64,
) -> Result<Artifact> {
    let scenario = LinkScenario::new(loss_db, squeezing_db, target_error, rate_hz, link_time_s)?;
    let (_, v_eff) = effective_hypotheses(&scenario)?;
    let n = required_samples(&scenario)?;
    let (seconds, fits) = acquisition_time(n, &scenario)?;
    let row = vec![
        Cell::Real(loss_db),
        Cell::Real(squeezing_db),
        Cell::Real(v_eff),
        Cell::Real(variance_to_db(v_eff)?),
        Cell::Count(n),
        Cell::Real(seconds),
        Cell::Flag(fits),
    ];
    Ok(Artifact {
        request,
        alpha_strategy: "displacement re-optimized per candidate sample count".to_string(),
        columns: vec![
            "loss_db",
            "squeezing_db_in",
            "effective_sqz_variance",
            "effective_sqz_db",
            "required_samples",
            "acquisition_time_s",
            "fits_link",
        ],
        rows: vec![row],
    })
}

fn run_montecarlo(
    request: String,
    variance: f64,
    count: u64,
    seed: u64,
    payload: &Path,
) -> Result<Artifact> {
    let set = generate_samples(variance, count, seed)?;
    write_samples(&set, payload)?;
    let row = vec![
        Cell::Text(payload.display().to_string()),
        Cell::Text(sidecar_path(payload).display().to_string()),
        Cell::Text(format_name(&set).to_string()),
        Cell::Count(count),
        Cell::Real(variance),
        Cell::Count(seed),
    ];
    Ok(Artifact {
        request,
        alpha_strategy: "not applicable (raw quadrature samples)".to_string(),
        columns: vec!["payload", "sidecar", "format", "count", "variance", "seed"],
        rows: vec![row],
    })
}

fn run_ingest(request: String, input: &Path, summary: bool) -> Result<Option<Artifact>> {
    let set = ingest(input)?;
    if !summary {
        // Quiet validation: the exit status is the whole answer.
        return Ok(None);
    }
    let samples = set.samples();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let quad_var = samples.iter().map(|x| x * x).sum::<f64>() / n;
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let row = vec![
        Cell::Text(input.display().to_string()),
        Cell::Text(format_name(&set).to_string()),
        Cell::Count(samples.len() as u64),
        set.scale().map_or(Cell::Missing, Cell::Real),
        Cell::Real(mean),
        Cell::Real(quad_var),
        Cell::Real(min),
        Cell::Real(max),
    ];
    Ok(Some(Artifact {
        request,
        alpha_strategy: "not applicable (raw payload summary)".to_string(),
        columns: vec![
            "path",
            "format",
            "count",
            "scale",
            "mean",
            "quadrature_variance",
            "min",
            "max",
        ],
        rows: vec![row],
    }))
}

fn format_name(set: &SampleSet) -> &'static str {
    if set.quantization_bits().is_some() {
        "i16le"
    } else {
        "f64le"
    }
}

#[allow(clippy::too_many_arguments)]
fn run_trace(
    request: String,
    coh_file: Option<&Path>,
    coh_seed: Option<u64>,
    sqz_file: Option<&Path>,
    sqz_seed: Option<u64>,
    r: f64,
    alpha: f64,
    checkpoints: Option<&[u64]>,
) -> Result<Artifact> {
    let coh = match (coh_file, coh_seed) {
        (Some(path), None) => ingest(path)?,
        (None, Some(seed)) => generate_samples(1.0, TRACE_SEEDED_COUNT, seed)?,
        _ => unreachable!("clap group enforces exactly one coherent source"),
    };
    let sqz = match (sqz_file, sqz_seed) {
        (Some(path), None) => ingest(path)?,
        (None, Some(seed)) => generate_samples(variance_of_r(r)?, TRACE_SEEDED_COUNT, seed)?,
        _ => unreachable!("clap group enforces exactly one squeezed source"),
    };
    let default_cps;
    let cps = match checkpoints {
        Some(list) => list,
        None => {
            default_cps = default_checkpoints(coh.len().min(sqz.len()) as u64);
            &default_cps
        }
    };
    let (trace_coh, trace_sqz) = posterior_trace(&coh, &sqz, r, alpha, cps)?;
    let rows = trace_coh
        .records()
        .iter()
        .zip(trace_sqz.records())
        .map(|(&(n, pc), &(_, ps))| vec![Cell::Count(n), Cell::Real(pc), Cell::Real(ps)])
        .collect();
    Ok(Artifact {
        request,
        alpha_strategy: format!("fixed displacement alpha = {alpha} at every checkpoint"),
        columns: vec!["N", "posterior_coh_trace", "posterior_sqz_trace"],
        rows,
    })
}
