//! Exact state-vector simulation of periodically kicked quantum spin
//! networks with region-dependent drive errors.
//!
//! The drive alternates a transverse pulse layer (near-pi rotations with
//! region-dependent errors) with an Ising-plus-field phase layer. The
//! crate provides the fast bitmask kernels for that evolution, dense
//! effective-Hamiltonian oracles to validate them, entanglement and
//! magnetization observables, and a deterministic disorder-ensemble
//! runner with figure presets.

pub mod effective;
pub mod ensemble;
pub mod evolution;
pub mod network;
pub mod observables;

pub use ensemble::{ExperimentConfig, EnsembleResult};
pub use evolution::{DriveProtocol, StateVector, StroboscopicTrace};
pub use network::{DisorderField, RegionPartition, SpinNetwork};
