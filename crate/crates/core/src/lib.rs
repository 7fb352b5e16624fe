//! Bibliometric mobility analytics: author-panel construction from publication
//! corpora, cross-border movement detection, two-step matching (exact pre-filter
//! plus synthetic-control / coarsened-exact / optimal-pair refiners), panel
//! difference-in-differences and event-study estimation, and logistic modeling
//! of post-move outcomes, with a synthetic-corpus generator for end-to-end
//! validation against planted effects.

pub mod corpus;
pub mod econ;
pub mod env_metrics;
pub mod error;
pub mod matching;
pub mod mobility;
pub mod pipeline;
pub mod stats;
pub mod synthgen;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// The two outcome families tracked throughout the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Publications,
    Citations,
}

impl OutcomeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeKind::Publications => "publications",
            OutcomeKind::Citations => "citations",
        }
    }
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OutcomeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "publications" | "pubs" => Ok(OutcomeKind::Publications),
            "citations" | "cites" => Ok(OutcomeKind::Citations),
            other => Err(Error::validation(format!("unknown outcome kind '{other}'"))),
        }
    }
}
