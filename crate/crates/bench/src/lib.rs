//! Criterion benchmarks of the hot numerical kernels; see `benches/kernels.rs`.
//!
//! Run with `cargo bench -p minisuper-bench`.
