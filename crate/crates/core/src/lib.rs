//! Sense-forest annotation toolkit: data model and validation, corpus
//! ingestion, annotation counting, agreement statistics, tree decoding,
//! polysemy parsers and their evaluation.

pub mod agreement;
pub mod combinatorics;
pub mod corpus;
pub mod decoding;
pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod parse;
pub mod parsers;
pub mod preprocess;
pub mod sense;

pub use error::{Error, Result};
pub use model::{
    validate, Feature, FeatureJudgement, SenseAnnotation, SenseKind, SenseLabel, SenseRecord,
    ValidationReport, Verdict, Violation, WordAnnotation,
};
pub use parse::{partition, HomonymyPartition, Parse};
pub use sense::{Half, SenseId, SenseIndex};
