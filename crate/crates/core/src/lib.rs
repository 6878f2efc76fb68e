//! Sliced rotated sphere packing designs and adaptive sequential sampling.
//!
//! Designs are built from the `A_p` / `A_p*` lattice pair: a lattice is
//! scaled, rotated and shifted, and its points inside the unit cube form the
//! design. Coset labels of the fine lattice slice the design, and the
//! parent/child relation between cosets drives the adaptive strategies.

pub mod adaptive;
pub mod benchmarks;
pub mod error;
pub mod experiment;
pub mod gp;
pub mod lattice;
pub mod lhd;
pub mod metrics;
pub mod optim;
pub mod rspd;
pub mod slicing;
pub mod srspd;

pub use adaptive::{
    run_emulation_session, run_optimization_session, run_session, Objective, Phase, RunRecord, Session, SessionConfig,
    SessionTrace, Strategy,
};
pub use benchmarks::Benchmark;
pub use error::{Error, Result};
pub use gp::{GpConfig, GpModel, LooMode, Prediction};
pub use lattice::{LatticeFamily, LatticeSpec, Quantizer};
pub use metrics::{CriterionReport, SeparationKind};
pub use rspd::{Design, PsiDirection, RotationPolicy, RspdConfig};
pub use slicing::{Coord, SlicedLatticeSpec};
pub use srspd::{SliceMode, SlicedDesign};
