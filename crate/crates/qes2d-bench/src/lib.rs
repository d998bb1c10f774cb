//! Benchmark-only crate; see `benches/solvers.rs`. Run with `cargo bench`.
