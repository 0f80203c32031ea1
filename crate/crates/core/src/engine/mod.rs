//! Lattices, transforms and the joint-amplitude sums.

pub mod compare;
pub mod grid;
pub mod joint;
pub mod oracle;
pub mod rates;
pub mod transform;

pub use compare::{agreement, agreement_real, Agreement};
pub use grid::{GridSpec, QAxis, SimulationGrid, UniformLattice, WindowSpec, MIN_PADDING};
pub use joint::{joint_spectrum, joint_spectrum_via, JointInput, KernelPath, SecondArm};
pub use oracle::{brute_force_joint, ORACLE_MAX_POINTS};
pub use rates::{
    Geometry, JointMethod, JointSpectrum, Normalization, Provenance, RateMap, RateProfile,
    Warning,
};
pub use transform::{forward_transform, inverse_transform, Spectrum};
