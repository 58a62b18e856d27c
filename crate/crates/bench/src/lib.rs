//! Criterion benchmarks for cqed-spectrokit; see `benches/`.
