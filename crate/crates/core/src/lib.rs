//! Game-theoretic toolkit for classical environments, games of private
//! information, quantum environments and quantum communication protocols.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

#![allow(clippy::needless_range_loop)]

pub mod builtin;
pub mod environment;
pub mod error;
pub mod ewl;
pub mod game;
pub mod linalg;
pub mod penny;
pub mod private_info;
pub mod quantum;
pub mod quantum_eq;
pub mod scalar;

pub use environment::{
    chain_disagreement_bound, close_environment, env_payoff, is_correlated_equilibrium, is_env_nash,
    joint_distribution, realize_joint, ChainBound, Deviation, EquilibriumReport,
};
pub use error::{Error, Result};
pub use ewl::{
    best_response_matrix, calibrate, ewl_direct, is_quat_equilibrium, mixed_quat_payoff, quat_mul, quat_payoff,
    CalibrationOutcome, Cell, OutcomeAssignment,
};
pub use game::{Player, Profile};
pub use private_info::{check_commute, game_of_env, sharp_environment, sharp_game};
pub use quantum::{entangled_pair, measure_joint, rotation};
pub use quantum_eq::{
    best_response_rotation, classical_value_bound, is_private_quantum_equilibrium, is_quantum_equilibrium,
    private_quantum_payoff, qgame_payoff, quantum_profile_joint, StrategyFamily, StrategyParam,
};
pub use scalar::Real;

pub type Game = game::Game<f64>;
pub type MixedStrategy = game::MixedStrategy<f64>;
pub type SampleSpace = environment::SampleSpace<f64>;
pub type RandomVariable = environment::RandomVariable<f64>;
pub type Environment = environment::Environment<f64>;
pub type PrivateInfoGame = private_info::PrivateInfoGame<f64>;
pub type StateVector = quantum::StateVector<f64>;
pub type UnitaryOp = quantum::UnitaryOp<f64>;
pub type QuantumEnvironment = quantum_eq::QuantumEnvironment<f64>;
pub type InfoStrategy = quantum_eq::InfoStrategy<f64>;
pub type Quaternion = ewl::Quaternion<f64>;
pub type MixedQuatStrategy = ewl::MixedQuatStrategy<f64>;
