//! Benchmarks for `nepv-core`; see `benches/`.
