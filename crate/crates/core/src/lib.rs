//! Optimal unitary heat engines on finite products of thermal systems, and
//! the computing machines they realize.

pub mod circuits;
pub mod embed;
pub mod engine;
pub mod ensemble;
pub mod feasibility;
pub mod machines;
pub mod error;
pub mod perm;
pub mod scalar;
pub mod schema;
pub mod thermal;

pub use ensemble::{ensemble_energy, ensemble_logweight, enumerate_support, Ensemble, LogWeight};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use scalar::{Real, Scalar, DEFAULT_PRECISION};
pub use thermal::{gibbs_probabilities, LevelSystem, Temperature, ThermalState};
pub use engine::{energy_gain, optimal_engine, rank_orders, EngineReport, OrderKind, RankOrders, TieBlock};
pub use feasibility::{
    copies_witness, gap_engine_exists, gap_threshold, is_equilibrium, swap_engine_feasible, CopiesResult, Equilibrium,
    GapWitness, OccupationVector,
};
pub use circuits::{circuit_gain, search_min_circuit, simulate, Circuit, Gate, GateSet, SearchOptions, SearchResult};
pub use embed::{build_embedding, fidelity_series, EmbeddedEngine, RestrictedChannel, TargetWavefunction};
pub use machines::flow::{term_order_flow, FlowField};
pub use machines::knapsack::{knapsack_solve, KnapsackInstance, KnapsackReport};
pub use machines::majority::{depth_lower_bound, majority_engine, refrigerator, MajorityReport};
pub use machines::oscillator::{power_engine_all, root_engine, root_engine_all, sqrt_engine, square_engine, TruncatedOscillator};
pub use machines::radix::{radix_convert, RadixConversion};
pub use machines::three_level::{three_level_engine, three_level_gates, ThreeLevelPair};
pub use schema::{parse_ensemble, EnsembleSpec, ScalarMode};
