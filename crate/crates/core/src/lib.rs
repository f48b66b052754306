//! Global Riemann solvers for mixed-type 3x3 conservation laws: polymer
//! flooding (plain, adsorption, gravity) and Aw-Rascle traffic on a rough road.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod conservation;
pub mod envelope;
pub mod error;
pub mod fan;
pub mod flux;
pub mod full;
pub mod gravity;
pub mod lagrangian;
pub mod numerics;
pub mod problems;
pub mod reduced;
pub mod simulate;

pub use checks::{check_fan, self_similarity_defect, wave_property_residual, InvariantReport};
pub use conservation::{conserved, flux_vector, max_rh_residual, rh_residual};
pub use envelope::{
    build_envelope, critical_points, minimum_jump, scalar_riemann, Direction, JumpPath,
    MonotoneEnvelope, ScalarFn, ScalarPiece,
};
pub use error::{Result, RiemannError};
pub use fan::{Family, PolymerState, Profile, Speed, State, TrafficState, Wave, WaveFan, WaveKind};
pub use flux::{
    adsorption, polymer_flux, polymer_flux_ds, traffic_flux, AdsorptionParams, FluxModel,
    PolymerFluxParams, TrafficParams,
};
pub use full::{solve_adsorption3, solve_polymer3, solve_riemann, solve_traffic3, traffic_middle};
pub use gravity::{
    build_i1, build_i2, c_wave_sign, solve_gravity3, TraceLabel, TraceSet, WaveSign,
};
pub use lagrangian::{
    initial_curve, jacobian_det, potential, verify_decoupling, Chart, CurveSegment, DecouplingGrid,
    DecouplingReport, LagrangianProfile, PathOrder, PotentialField, Sampler,
};
pub use problems::{random_gravity_case1, random_riemann, ModelKind};
pub use reduced::{
    solve_adsorption2, solve_polymer2, solve_sk2, solve_traffic2, PolymerState2, SkState,
    TrafficState2,
};
