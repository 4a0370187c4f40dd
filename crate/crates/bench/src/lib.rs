//! Criterion benchmarks for lroof; see `benches/`.
