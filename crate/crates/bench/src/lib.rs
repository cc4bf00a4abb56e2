//! Benchmarks for the csqc engines live under `benches/`.
