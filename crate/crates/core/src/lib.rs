//! Generation of syntactic-transformation datasets (question formation and
//! passivization in English and German), hierarchical and linear rule
//! oracles, evaluation metrics for model predictions, and a corpus miner for
//! naturally occurring declarative/question pairs.

pub mod features;
pub mod grammar;
pub mod lexicon;
pub mod seed;
pub mod tokenize;
pub mod transform;
pub mod dataset;
pub mod eval;
pub mod miner;
