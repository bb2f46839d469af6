//! Benchmark-only crate; see `benches/geometry.rs`.
