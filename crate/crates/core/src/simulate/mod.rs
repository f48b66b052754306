//! Cauchy-problem machinery: fan sampling, a vanishing-viscosity reference
//! solver and wave-front tracking for the traffic 2x2 system.

mod front;
mod sample;
mod viscous;

pub use front::{
    front_tracking, Front, FrontEvent, FrontFamily, FrontRun, FrontState, FrontTrackingConfig,
    DEFAULT_EPS_FRAC,
};
pub use sample::{
    l1_distance, l1_primary, primary, sample_fan, uniform_centers, PiecewiseConstant,
};
pub use viscous::{viscous_solve, ViscousConfig, ViscousModel, ViscousRun};
