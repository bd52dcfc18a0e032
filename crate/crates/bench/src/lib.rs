//! Benchmarks for menger-core; see `benches/search.rs`.
