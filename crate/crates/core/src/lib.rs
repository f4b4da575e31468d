//! Simulators for two-tape one-way quantum finite automata, the classical
//! multi-head models they are compared against, a DFA compiler, and brute-force
//! language oracles.

pub mod amplitude;
pub mod classical;
pub mod cli;
pub mod compile;
pub mod error;
pub mod format;
pub mod lang;
pub mod matrix;
pub mod operator;
pub mod quantum;
pub mod random;
pub mod registry;
pub mod relation;
pub mod superposition;
pub mod unitarity;

pub use amplitude::{parse_amplitude, Amplitude};
pub use error::{AmplitudeError, Error, Result};
pub use operator::{apply_operator, HeadMove, Operator, OperatorTable, Symbol};
pub use relation::{rho_expand, SymbolRelation};
pub use superposition::Superposition;
pub use unitarity::{check_gram_wellformed, unitary_complete, GramReport};
