//! Single-photon scattering off a driven three-level emitter in a
//! multi-mode rectangular waveguide.

pub mod analysis;
pub mod config;
pub mod error;
pub mod presets;
pub mod quadrature;
pub mod scattering;
pub mod selfenergy;
pub mod validation;
pub mod waveguide;

pub use analysis::{
    count_ctp, dressed_states, find_crp, phase_map, spectrum, Band, CrpInput, DressedStates, FrequencyGrid,
    PeakReport, PhaseMap, ScanConfig,
};
pub use config::{BandSelector, Command, OmegaE, OutputFormat, RunConfig};
pub use error::{Error, Result};
pub use scattering::{scatter, InputKind, InputState, Resolvent, ScatteringResult, SystemParams};
pub use selfenergy::{QuadConfig, SelfEnergy, TruncationPolicy};
pub use waveguide::{Mode, WaveguideGeometry};
