//! Quantum cat maps on the two-torus.
//!
//! The crate covers the classical map and its periodic orbits, the quantized
//! propagator on `H_{N,θ}`, squeezed coherent states and Husimi densities,
//! Weyl and anti-Wick quantization, and quasimodes built on short periodic
//! orbits together with their diagnostics.

pub mod classical;
pub mod coherent;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod quantization;
pub mod quantum;
pub mod quasimode;
pub mod selftest;

pub use classical::{
    best_orbit_for_measure, decompose_hyperbolic, delta_measure_integrate,
    enumerate_prime_orbits, fixed_point_count, validate_cat_map, CatMap, Hyperbolic, Orbit,
    RationalPoint,
};
pub use coherent::{husimi, torus_coherent, HusimiGrid, PlaneGaussian};
pub use error::{CatError, Context, Result};
pub use experiment::{
    run_experiment, run_sweep, ExperimentConfig, Report, SweepConfig, SweepKind, SweepTable,
};
pub use num_complex::Complex64 as C64;
pub use quantization::{
    antiwick_expectation, bump_symbols, position_interval_mass, weyl_antiwick_gap, weyl_quantize,
    FourierSymbol, MassPath, Symbol,
};
pub use quasimode::{
    build_quasimode, choose_n, husimi_ball_report, nonequidistribution_report, residual,
    scmeasure_error, BallReport, NonequiReport, QuasimodeSpec, Space,
};
pub use quantum::{
    choose_theta, egorov_defect, propagator, translation, LinearMap, PlanckGrid, Propagator,
    unitarity_defect, QuantumState, Translation,
};
