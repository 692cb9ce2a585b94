//! Physical model: parameters, truncated Tavis–Cummings basis, rung
//! Hamiltonians, their spectra and the restricted Lindblad generator.

pub mod basis;
pub mod hamiltonian;
pub mod operators;
pub mod params;
pub mod spectrum;
pub mod superop;

pub use basis::{BasisState, LadderBasis};
pub use hamiltonian::{build_h1, build_h2};
pub use operators::{OperatorMatrix, OperatorRole};
pub use params::{SystemParams, TemperatureModel, TunedParams};
pub use spectrum::{
    rung_spectrum, rung_spectrum_with, spectrum_of, transition_frequencies, DiagonalizeOptions, RungSpectrum,
    Transition, TransitionLabel, TransitionSet,
};
pub use superop::{lindblad_superoperator, CoherenceLabel, LindbladGenerator, SuperoperatorMatrix};
