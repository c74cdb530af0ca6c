//! Criterion benchmarks for the `emppi` crate; see `benches/controller.rs`.
//! This library target is intentionally empty.
