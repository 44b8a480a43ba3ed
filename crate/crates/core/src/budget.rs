use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Caps on enumeration size and on branch-and-bound work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Largest state space an exhaustive enumeration may produce.
    pub max_states: usize,
    /// Node expansions allowed to one exact solver call.
    pub max_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1 << 16,
            max_nodes: 20_000_000,
        }
    }
}

/// Node counter handed to the branch-and-bound solvers.
#[derive(Debug)]
pub(crate) struct NodeMeter {
    used: u64,
    limit: u64,
}

impl NodeMeter {
    pub(crate) fn new(limit: u64) -> Self {
        NodeMeter { used: 0, limit }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded {
                what: "solver node expansions",
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}
