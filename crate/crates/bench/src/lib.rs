//! Criterion benchmarks live in `benches/`; run with `cargo bench -p spooky-bench`.
