//! Criterion benchmarks for the `pisot-core` kernels live in `benches/`.
