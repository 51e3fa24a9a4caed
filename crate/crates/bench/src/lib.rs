//! Criterion benchmarks for the hexstruct pipeline; see `benches/pipeline.rs`.
