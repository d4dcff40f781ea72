//! Benchmark-only crate; see `benches/amplification.rs`.
