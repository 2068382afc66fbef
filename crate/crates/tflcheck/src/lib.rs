//! A verification toolkit for concurrent systems with partial order
//! semantics. Safe Petri nets, transition systems with independence and
//! event structures share one hub representation; on top of it live a
//! fixpoint logic with causal and trace modalities, its denotational
//! evaluator and model-checking game, a family of bisimulation games
//! (strong, history-preserving, hereditary, trace history-preserving), and
//! a folding construction that turns regular infinite event structures into
//! finite systems.

pub mod error;
pub mod tsi;
pub mod net;
pub mod es;
pub mod poset;
pub mod run;
pub mod order;
pub mod classify;
pub mod logic;
pub mod semantics;
pub mod game;
pub mod bisim;
pub mod ccs;
pub mod folding;
pub mod gen;
pub mod fixtures;
pub mod cli;

pub use error::{Error, Result};
