use serde::{Deserialize, Serialize};

/// A non-fatal problem discovered while validating a document.
///
/// Validators collect findings instead of stopping at the first problem, so
/// one run reports everything that needs fixing. An empty finding list means
/// the document is clean.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFinding {
    /// Where the problem sits: a location reference, entity id, or file area.
    pub location: String,
    /// Human-readable description of the problem.
    pub message: String,
}

impl ValidationFinding {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}
