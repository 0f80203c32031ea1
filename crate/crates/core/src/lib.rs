//! Far-field diffraction of spatially correlated photon pairs through
//! one-dimensional apertures.
//!
//! The joint far-field amplitude of a pair with object-plane amplitude
//! `F(x, x') = A(x) B(x') G(x - x')` is
//!
//! ```text
//! F~(q, q') = c int int F(x, x') exp(i(qx + q'x')) dx dx'
//! ```
//!
//! with `c = 1/2 pi` when both photons cross the same object and `1/4 pi`
//! for the two-arm geometry. Coincidence and singles rates follow as
//! `R2 = |F~|^2` and `R1(q) = int R2(q, q') dq'`.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the precision the tolerances are quoted for.

pub mod analysis;
pub mod aperture;
pub mod biphoton;
pub mod correlation;
pub mod engine;
pub mod error;
pub mod ghost;
pub mod scalar;

pub use analysis::{envelope_fwhm, principal_maxima, spacings, visibility, Peak};
pub use aperture::{
    aperture_eval, grating_fourier, sample_product, ApertureKind, ApertureProfile, GratingSpec,
};
pub use biphoton::{
    coincidence_map, diagonal_cut, first_order_coherence, joint_amplitude, one_photon_marginal,
    r_sweep, sweep_kernel, Coherence, CutSign, Scenario, SweepPoint,
};
pub use correlation::{
    correlation_eval, correlation_fourier, CorrelationKernel, FourierImage, WidthConvention,
};
pub use engine::{
    brute_force_joint, forward_transform, inverse_transform, Geometry, GridSpec, JointMethod,
    JointSpectrum, KernelPath, Normalization, QAxis, RateMap, RateProfile, SimulationGrid, UniformLattice,
    Warning, WindowSpec,
};
pub use error::{Error, Result};
pub use ghost::{
    classical_coincidence_map, classical_coincidence_map_on, cross_section, ghost_joint_amplitude, mirrored, Arm, Line,
    SourceModel, TwoArmScenario,
};
pub use scalar::Real;

pub type Grating64 = GratingSpec<f64>;
pub type Aperture64 = ApertureProfile<f64>;
pub type Kernel64 = CorrelationKernel<f64>;
pub type Grid64 = SimulationGrid<f64>;
pub type Scenario64 = Scenario<f64>;
pub type TwoArm64 = TwoArmScenario<f64>;
pub type Spectrum64 = JointSpectrum<f64>;
pub type RateMap64 = RateMap<f64>;
pub type Profile64 = RateProfile<f64>;

pub type Grating32 = GratingSpec<f32>;
pub type Aperture32 = ApertureProfile<f32>;
pub type Kernel32 = CorrelationKernel<f32>;
pub type Grid32 = SimulationGrid<f32>;
pub type Scenario32 = Scenario<f32>;
pub type TwoArm32 = TwoArmScenario<f32>;
