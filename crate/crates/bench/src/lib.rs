//! Benchmark-only crate; see `benches/kernels.rs` for the measured paths.
