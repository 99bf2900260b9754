use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Three-valued answer of a budgeted decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }

    pub fn is_no(self) -> bool {
        self == Decision::No
    }

    /// Conjunction where a definite `No` dominates `Unknown`.
    pub fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::No, _) | (_, Decision::No) => Decision::No,
            (Decision::Yes, Decision::Yes) => Decision::Yes,
            _ => Decision::Unknown,
        }
    }
}

/// Limits for a single search.
#[derive(Clone, Debug)]
pub struct Budget {
    /// Maximum number of search nodes (states, branches) a single query may visit.
    pub max_nodes: usize,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 2_000_000,
            deadline: None,
        }
    }
}

impl Budget {
    pub fn nodes(max_nodes: usize) -> Self {
        Budget { max_nodes, deadline: None }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.deadline = timeout.map(|t| Instant::now() + t);
        self
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}
