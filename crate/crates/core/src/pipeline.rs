//! Sample data plane: deterministic synthetic quadrature generation,
//! 16-bit quantization, file emission/ingestion, post-detection displacement
//! + binarization, and empirical posterior traces.
//!
//! # Sample file format
//!
//! A sample *payload* is a flat little-endian binary file, either
//!
//! * `f64le` — one IEEE-754 double per sample, already in shot-noise units, or
//! * `i16le` — one signed 16-bit integer per sample in detector counts,
//!   converted to shot-noise units as `x = q / scale`.
//!
//! Every payload `<file>` is accompanied by a mandatory textual sidecar
//! `<file>.meta` of `key: value` lines:
//!
//! ```text
//! format: i16le
//! count: 1000000
//! scale: 1000
//! description: synthetic squeezed-vacuum samples
//! ```
//!
//! `format` and `count` are required; `scale` is required for `i16le`
//! (optional for `f64le`, default 1); `description` is free text. Ingestion
//! validates the payload length against `count` and reports missing sidecars,
//! contradictory sidecars, and truncated/oversized payloads as distinct
//! errors.

use crate::error::{Error, Result};
use crate::multicopy::{count_posterior, OutcomeCount};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Where a sample set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    /// Generated in-process by the seeded Monte Carlo path.
    Synthetic,
    /// Loaded from an external payload (or built directly from values).
    Ingested,
}

/// A sequence of quadrature samples in shot-noise units, plus provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    samples: Vec<f64>,
    quantization_bits: Option<u32>,
    scale: Option<f64>,
    source: SampleSource,
    seed: Option<u64>,
}

impl SampleSet {
    /// Wraps raw values (shot-noise units) as an unquantized, unseeded set.
    pub fn from_values(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput(
                "sample set must be nonempty".to_string(),
            ));
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "samples must be finite, found {bad}"
            )));
        }
        Ok(SampleSet {
            samples,
            quantization_bits: None,
            scale: None,
            source: SampleSource::Ingested,
            seed: None,
        })
    }

    /// The samples in shot-noise units.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false by construction (sets are validated nonempty).
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Quantizer resolution, if the set passed through one.
    pub fn quantization_bits(&self) -> Option<u32> {
        self.quantization_bits
    }

    /// Detector counts per shot-noise unit, if quantized (or declared on
    /// ingestion).
    pub fn scale(&self) -> Option<f64> {
        self.scale
    }

    /// Provenance tag.
    pub fn source(&self) -> SampleSource {
        self.source
    }

    /// Generator seed for synthetic sets.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// One empirical posterior trajectory: `(N, posterior of the true
/// hypothesis)` at strictly increasing checkpoint counts.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorTrace {
    records: Vec<(u64, f64)>,
}

impl PosteriorTrace {
    /// The `(N, posterior)` records in checkpoint order.
    pub fn records(&self) -> &[(u64, f64)] {
        &self.records
    }
}

/// Draws `count` independent zero-mean normal samples of variance `v`,
/// deterministically for a given `seed`.
///
/// The generator is a seedable counter-based stream cipher RNG feeding a
/// standard normal transform, so sequences are reproducible bit for bit
/// across runs and platforms.
pub fn generate_samples(v: f64, count: u64, seed: u64) -> Result<SampleSet> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "variance must be positive, got {v}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be ≥ 1".to_string()));
    }
    let normal = Normal::new(0.0, v.sqrt())
        .map_err(|e| Error::InvalidInput(format!("normal distribution: {e}")))?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let samples = (0..count).map(|_| normal.sample(&mut rng)).collect();
    Ok(SampleSet {
        samples,
        quantization_bits: None,
        scale: None,
        source: SampleSource::Synthetic,
        seed: Some(seed),
    })
}

/// Passes a sample set through a 16-bit midtread quantizer with `scale`
/// counts per shot-noise unit: `x ↦ round(x·scale)/scale`, saturating at the
/// i16 range.
pub fn quantize(set: &SampleSet, scale: f64) -> Result<SampleSet> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "quantizer scale must be positive, got {scale}"
        )));
    }
    let samples = set
        .samples
        .iter()
        .map(|&x| {
            let q = (x * scale).round().clamp(i16::MIN as f64, i16::MAX as f64);
            q / scale
        })
        .collect();
    Ok(SampleSet {
        samples,
        quantization_bits: Some(16),
        scale: Some(scale),
        source: set.source,
        seed: set.seed,
    })
}

/// Applies the post-detection displacement and reduces each sample to one
/// bit in a single streaming pass: `k` counts samples with `x + α ≥ 0` (the
/// measure-zero exact tie maps to '+').
pub fn binarize(set: &SampleSet, alpha: f64) -> Result<OutcomeCount> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput(format!(
            "displacement must be finite, got {alpha}"
        )));
    }
    let k = set.samples.iter().filter(|&&x| x + alpha >= 0.0).count() as u64;
    OutcomeCount::new(set.len() as u64, k)
}

/// Sidecar path for a payload file: `.meta` appended to the full file name
/// (`samples.bin` → `samples.bin.meta`).
pub fn sidecar_path(payload: &Path) -> PathBuf {
    let mut name = payload
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".meta");
    payload.with_file_name(name)
}

/// Writes `bytes` to `path` atomically: a sibling temp file is written,
/// flushed, and renamed into place, so a crash never leaves a partial file
/// under the target name.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_file_name(format!(
        "{}.tmp.{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Emits a sample set as payload + sidecar (see the module docs for the
/// format). Quantized sets are written as `i16le` detector counts; others as
/// `f64le` shot-noise values. Both files are written atomically.
pub fn write_samples(set: &SampleSet, path: &Path) -> Result<()> {
    let mut meta = String::new();
    let payload: Vec<u8> = match (set.quantization_bits, set.scale) {
        (Some(_), Some(scale)) => {
            meta.push_str("format: i16le\n");
            meta.push_str(&format!("count: {}\n", set.len()));
            meta.push_str(&format!("scale: {scale}\n"));
            let mut bytes = Vec::with_capacity(set.len() * 2);
            for &x in &set.samples {
                let q = (x * scale).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                bytes.extend_from_slice(&q.to_le_bytes());
            }
            bytes
        }
        _ => {
            meta.push_str("format: f64le\n");
            meta.push_str(&format!("count: {}\n", set.len()));
            let mut bytes = Vec::with_capacity(set.len() * 8);
            for &x in &set.samples {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
            bytes
        }
    };
    meta.push_str(match set.source {
        SampleSource::Synthetic => "description: synthetic quadrature samples\n",
        SampleSource::Ingested => "description: quadrature samples\n",
    });
    write_atomic(path, &payload)?;
    write_atomic(&sidecar_path(path), meta.as_bytes())?;
    Ok(())
}

/// Loads a sample payload and its sidecar, rescaling to shot-noise units.
///
/// Error cases are reported distinctly: missing sidecar, unusable sidecar
/// (unknown format, bad or duplicate keys, nonpositive scale, zero count,
/// payload size contradicting the declared width), and payload/count
/// mismatches.
pub fn ingest(path: &Path) -> Result<SampleSet> {
    let sidecar = sidecar_path(path);
    if !sidecar.exists() {
        return Err(Error::SidecarMissing {
            payload: path.display().to_string(),
            sidecar: sidecar.display().to_string(),
        });
    }
    let text = fs::read_to_string(&sidecar)?;
    let invalid = |problem: String| Error::SidecarInvalid {
        path: sidecar.display().to_string(),
        problem,
    };
    let mut format: Option<String> = None;
    let mut count: Option<u64> = None;
    let mut scale: Option<f64> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| invalid(format!("line without 'key: value' shape: '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "format" => {
                if format.replace(value.to_string()).is_some() {
                    return Err(invalid("duplicate key 'format'".to_string()));
                }
            }
            "count" => {
                let parsed = value
                    .parse::<u64>()
                    .map_err(|_| invalid(format!("unparsable count '{value}'")))?;
                if count.replace(parsed).is_some() {
                    return Err(invalid("duplicate key 'count'".to_string()));
                }
            }
            "scale" => {
                let parsed = value
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("unparsable scale '{value}'")))?;
                if scale.replace(parsed).is_some() {
                    return Err(invalid("duplicate key 'scale'".to_string()));
                }
            }
            "description" => {}
            other => return Err(invalid(format!("unknown key '{other}'"))),
        }
    }
    let format = format.ok_or_else(|| invalid("missing key 'format'".to_string()))?;
    let count = count.ok_or_else(|| invalid("missing key 'count'".to_string()))?;
    if count == 0 {
        return Err(invalid("count must be ≥ 1".to_string()));
    }
    if let Some(s) = scale {
        if !s.is_finite() || s <= 0.0 {
            return Err(invalid(format!("scale must be positive, got {s}")));
        }
    }
    let width: usize = match format.as_str() {
        "i16le" => 2,
        "f64le" => 8,
        other => return Err(invalid(format!("unknown format '{other}'"))),
    };
    let bytes = fs::read(path)?;
    if bytes.len() % width != 0 {
        return Err(invalid(format!(
            "payload size {} bytes is not a whole number of {width}-byte samples",
            bytes.len()
        )));
    }
    let actual = bytes.len() / width;
    if actual as u64 != count {
        return Err(Error::PayloadCount {
            path: path.display().to_string(),
            expected: count as usize,
            actual,
        });
    }
    let (samples, bits, scale_out) = match format.as_str() {
        "i16le" => {
            let s = scale.ok_or_else(|| invalid("i16le payload requires 'scale'".to_string()))?;
            let samples = bytes
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / s)
                .collect();
            (samples, Some(16), Some(s))
        }
        _ => {
            let s = scale.unwrap_or(1.0);
            let samples = bytes
                .chunks_exact(8)
                .map(|c| {
                    f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]) / s
                })
                .collect();
            (samples, None, scale)
        }
    };
    Ok(SampleSet {
        samples,
        quantization_bits: bits,
        scale: scale_out,
        source: SampleSource::Ingested,
        seed: None,
    })
}

/// Default logarithmic checkpoint grid: 1, 2, 5 per decade up to and
/// including `max`.
pub fn default_checkpoints(max: u64) -> Vec<u64> {
    let mut cps = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1u64, 2, 5] {
            match m.checked_mul(decade) {
                Some(c) if c < max => cps.push(c),
                _ => break 'outer,
            }
        }
        match decade.checked_mul(10) {
            Some(d) => decade = d,
            None => break,
        }
    }
    cps.push(max);
    cps
}

/// Runs the empirical posterior trace for one coherent-truth and one
/// squeezed-truth sample set: at each checkpoint `N`, the first `N` samples
/// are displaced, binarized, and fed to the count posterior; the recorded
/// value is the posterior assigned to the set's true hypothesis.
///
/// Returns `(coherent trace, squeezed trace)`.
pub fn posterior_trace(
    coh_set: &SampleSet,
    sqz_set: &SampleSet,
    r: f64,
    alpha: f64,
    checkpoints: &[u64],
) -> Result<(PosteriorTrace, PosteriorTrace)> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidInput(
            "checkpoint list must be nonempty".to_string(),
        ));
    }
    let mut prev = 0u64;
    for &cp in checkpoints {
        if cp == 0 {
            return Err(Error::InvalidInput("checkpoints must be ≥ 1".to_string()));
        }
        if cp <= prev {
            return Err(Error::InvalidInput(format!(
                "checkpoints must be strictly increasing (saw {cp} after {prev})"
            )));
        }
        prev = cp;
    }
    let last = *checkpoints.last().expect("nonempty");
    for (set, name) in [(coh_set, "coherent"), (sqz_set, "squeezed")] {
        if last > set.len() as u64 {
            return Err(Error::InvalidInput(format!(
                "checkpoint {last} exceeds {name} set size {}",
                set.len()
            )));
        }
    }
    let trace_one = |set: &SampleSet, squeezed_truth: bool| -> Result<PosteriorTrace> {
        let mut records = Vec::with_capacity(checkpoints.len());
        let mut k = 0u64;
        let mut next = 0usize;
        for (i, &x) in set.samples.iter().enumerate() {
            if x + alpha >= 0.0 {
                k += 1;
            }
            let n = i as u64 + 1;
            if n == checkpoints[next] {
                let post = count_posterior(OutcomeCount::new(n, k)?, r, alpha)?;
                records.push((
                    n,
                    if squeezed_truth {
                        post.squeezed
                    } else {
                        post.coherent
                    },
                ));
                next += 1;
                if next == checkpoints.len() {
                    break;
                }
            }
        }
        Ok(PosteriorTrace { records })
    };
    Ok((trace_one(coh_set, false)?, trace_one(sqz_set, true)?))
}
