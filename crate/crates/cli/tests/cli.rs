//! Integration tests driving the compiled `bhd` binary: artifact shape,
//! value fidelity against the library, exit-code contract, atomic output,
//! and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bhd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn bhd")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

/// Data lines of a CSV artifact (everything after the `#` header block and
/// the column line).
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let _columns = lines.next().expect("column line");
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn single_sweep_matches_library_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhd(&["single", "--r", "0.085", "--alpha-sweep", "0:3:0.5"], dir.path());
    let text = stdout_of(&out);
    assert!(text.starts_with("# tool: bhd "));
    assert!(text.contains("# request: single --r 0.085 --alpha-sweep 0:3:0.5\n"));
    assert!(text.contains("alpha,delta_pi,avg_posterior,success_prob\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 7);
    // Shortest-roundtrip float printing: parsed cells equal the library
    // values bit for bit.
    let row = &rows[3];
    assert_eq!(row[0], "1.5");
    let posterior: f64 = row[2].parse().unwrap();
    assert_eq!(posterior, bhd_core::single_posterior(0.085, 1.5).unwrap());
    let gap: f64 = row[1].parse().unwrap();
    let success: f64 = row[3].parse().unwrap();
    assert_eq!(success, 0.5 * (1.0 + gap));
}

#[test]
fn single_json_format_carries_meta_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhd(
        &["single", "--r", "0.3", "--alpha", "0.9", "--format", "json"],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["meta"]["tool"], "bhd");
    assert_eq!(
        doc["meta"]["request"],
        "single --r 0.3 --alpha 0.9 --format json"
    );
    let data = doc["data"].as_array().unwrap();
    assert_eq!(data.len(), 1);
    assert_eq!(
        data[0]["avg_posterior"].as_f64().unwrap(),
        bhd_core::single_posterior(0.3, 0.9).unwrap()
    );
}

#[test]
fn invalid_domain_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhd(
        &["single", "--r", "-1", "--alpha", "1", "--out", "artifact.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("squeezing parameter"));
    assert!(!dir.path().join("artifact.csv").exists());
    // No stray temp files either.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // Both displacement modes at once.
    let both = bhd(
        &["single", "--r", "0.1", "--alpha", "1", "--alpha-sweep", "0:1:0.5"],
        dir.path(),
    );
    assert_eq!(both.status.code(), Some(2));
    // Neither mode.
    let neither = bhd(&["single", "--r", "0.1"], dir.path());
    assert_eq!(neither.status.code(), Some(2));
    // Unknown flag, reported by name.
    let unknown = bhd(&["single", "--r", "0.1", "--alpha", "1", "--bogus"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("--bogus"));
    // Malformed sweep reaches the sweep parser.
    let sweep = bhd(&["single", "--r", "0.1", "--alpha-sweep", "0:1"], dir.path());
    assert_eq!(sweep.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&sweep.stderr).contains("START:STOP:STEP"));
}

#[test]
fn multicopy_success_exposes_threshold_jump() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhd(
        &["multicopy", "--r", "0.085", "--n-list", "20,21", "--objective", "success"],
        dir.path(),
    );
    let text = stdout_of(&out);
    assert!(text.contains("N,alpha_opt,tau_opt,success_prob\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "19");
    assert_eq!(rows[1][2], "19");
    let a20: f64 = rows[0][1].parse().unwrap();
    let a21: f64 = rows[1][1].parse().unwrap();
    assert!((1.7..=1.9).contains(&a20));
    assert!((1.35..=1.50).contains(&a21));
}

#[test]
fn stdout_and_file_artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["single", "--r", "0.085", "--alpha-sweep", "0:2:0.01"];
    let first = bhd(&args, dir.path());
    let second = bhd(&args, dir.path());
    assert_eq!(stdout_of(&first), stdout_of(&second));

    let file_args = ["ideal", "--r", "0.085", "--n-list", "1,10,100", "--out", "ideal.csv"];
    stdout_of(&bhd(&file_args, dir.path()));
    let once = std::fs::read(dir.path().join("ideal.csv")).unwrap();
    stdout_of(&bhd(&file_args, dir.path()));
    let twice = std::fs::read(dir.path().join("ideal.csv")).unwrap();
    assert_eq!(once, twice);
    assert!(!once.is_empty());
}

#[test]
fn montecarlo_payloads_are_seed_deterministic_and_ingestable() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str| {
        stdout_of(&bhd(
            &["montecarlo", "--variance", "0.8437", "--count", "4096", "--seed", "9", "--out", name],
            dir.path(),
        ))
    };
    let summary = gen("a.bin");
    assert!(summary.contains("\"payload\": \"a.bin\""));
    assert!(summary.contains("\"sidecar\": \"a.bin.meta\""));
    gen("b.bin");
    let a = std::fs::read(dir.path().join("a.bin")).unwrap();
    let b = std::fs::read(dir.path().join("b.bin")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 4096 * 8);

    // Quiet validation: exit 0, no output at all.
    let quiet = bhd(&["ingest", "--in", "a.bin"], dir.path());
    assert!(quiet.status.success());
    assert!(quiet.stdout.is_empty());

    // Summary for the same payload reports the generation parameters.
    let sum = stdout_of(&bhd(&["ingest", "--in", "a.bin", "--summary"], dir.path()));
    let doc: serde_json::Value = serde_json::from_str(&sum).unwrap();
    assert_eq!(doc["data"][0]["count"], 4096);
    assert_eq!(doc["data"][0]["format"], "f64le");
    assert!(doc["data"][0]["scale"].is_null());
    let qv = doc["data"][0]["quadrature_variance"].as_f64().unwrap();
    assert!((qv - 0.8437).abs() < 0.05);
}

#[test]
fn ingest_without_sidecar_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("orphan.bin"), vec![0u8; 64]).unwrap();
    let out = bhd(&["ingest", "--in", "orphan.bin"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("orphan.bin.meta"));
}

#[test]
fn trace_from_files_honors_checkpoints_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    for (name, var, seed) in [("c.bin", "1.0", "5"), ("s.bin", "0.8437", "6")] {
        stdout_of(&bhd(
            &["montecarlo", "--variance", var, "--count", "2000", "--seed", seed, "--out", name],
            dir.path(),
        ));
    }
    let out = bhd(
        &[
            "trace", "--coh-file", "c.bin", "--sqz-file", "s.bin", "--r", "0.085", "--alpha",
            "1.501", "--checkpoints", "1,10,100,2000",
        ],
        dir.path(),
    );
    let text = stdout_of(&out);
    assert!(text.contains("N,posterior_coh_trace,posterior_sqz_trace\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3][0], "2000");
    for row in &rows {
        for cell in &row[1..] {
            let p: f64 = cell.parse().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }
    // A checkpoint beyond the payload length is a validation error.
    let too_far = bhd(
        &[
            "trace", "--coh-file", "c.bin", "--sqz-file", "s.bin", "--r", "0.085", "--alpha",
            "1.501", "--checkpoints", "1,4000",
        ],
        dir.path(),
    );
    assert_eq!(too_far.status.code(), Some(2));
}

#[test]
fn link_lossless_needs_few_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhd(
        &[
            "link", "--loss-db", "0", "--squeezing-db", "6", "--target-error", "0.01",
            "--rate-hz", "1e6", "--link-time-s", "300",
        ],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let n = doc["data"][0]["required_samples"].as_u64().unwrap();
    assert!(n <= 1000, "lossless 6 dB scenario needed {n} samples");
    assert_eq!(doc["data"][0]["fits_link"], true);
}

#[test]
fn unreachable_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // 60 dB of loss erodes 0.5 dB of squeezing to an effective variance gap
    // of ~1e-7; the sample search overflows its bracket cap and reports a
    // computation (not validation) failure.
    let out = bhd(
        &[
            "link", "--loss-db", "60", "--squeezing-db", "0.5", "--target-error", "0.001",
            "--rate-hz", "1e9", "--link-time-s", "300",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}
