use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Engine caps. Exceeding any of them is a hard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of objects in any enumerated skeleton or index category.
    pub max_objects: usize,
    /// Maximum number of morphisms in a single hom-set or index category.
    pub max_morphisms: usize,
    /// Maximum number of points (or dimension) of any object built by a colimit.
    pub max_set_size: usize,
    /// Maximum cube dimension.
    pub max_dim: usize,
    /// Maximum number of results produced by a single enumeration.
    pub max_results: usize,
    /// Maximum number of search nodes visited by a single enumeration.
    pub max_search: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_objects: 4096,
            max_morphisms: 200_000,
            max_set_size: 64,
            max_dim: 6,
            max_results: 200_000,
            max_search: 50_000_000,
        }
    }
}

impl Limits {
    pub fn check(what: &str, value: usize, limit: usize) -> Result<()> {
        if value > limit {
            Err(Error::CapExceeded {
                what: what.to_string(),
                limit,
            })
        } else {
            Ok(())
        }
    }
}
