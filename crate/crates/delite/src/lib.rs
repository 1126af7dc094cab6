//! A reasoner for DL-Lite_R knowledge bases with defeasible axioms under
//! justified-exception semantics.
//!
//! The pipeline: parse a `.dkb` file ([`dkbtext`]), bring it into normal form
//! ([`normalize`]), verify exception safety ([`safety`]), compile it to a
//! datalog program with strong and default negation ([`dlprog`]), enumerate
//! the program's answer sets ([`asp`]), and answer satisfiability, instance
//! and conjunctive-query questions ([`reason`]). An independent brute-force
//! model builder ([`oracle`]) implements the same semantics directly over
//! Skolem terms and is used for differential testing and query matching.

pub mod asp;
pub mod cli;
pub mod corpus;
pub mod dkbtext;
pub mod dlprog;
pub mod kb;
pub mod normalize;
pub mod oracle;
pub mod reason;
pub mod safety;

pub use kb::{Dkb, Vocabulary};
