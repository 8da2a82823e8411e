//! Semantic templates and compositional construction of sentence meanings.

mod compose;
mod templates;

pub use compose::{
    check_units, compose, compose_clausal, compose_differential, compose_equative, compose_measure, compose_sem,
    one_point, project, MultiSem,
};
pub use templates::{instantiate_template, template, Dimension, Template, TEMPLATES};

use thiserror::Error;

use crate::terms::TermError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("unit `{unit}` does not measure `{adjective}` (expects {expected})")]
    UnitMismatch { unit: String, adjective: String, expected: String },
    #[error("derivation is not a {0}")]
    WrongConstruction(&'static str),
    #[error(transparent)]
    Term(TermError),
}
