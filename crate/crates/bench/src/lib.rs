//! Criterion benchmarks for the simulator, the layer optimizer and the
//! analytic model; see `benches/`.
