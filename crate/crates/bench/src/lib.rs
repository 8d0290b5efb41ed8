//! Criterion benchmarks for `skewk-core`; see `benches/skewk.rs`.
