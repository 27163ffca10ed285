//! Outcome record for a checked identity.

/// Verdict of one identity check: holds, or fails with the first discrepancy.
///
/// The witness is a canonically rendered description of the first discrepant
/// term (deterministic for fixed input, suitable for machine comparison).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub holds: bool,
    pub witness: Option<String>,
}

impl IdentityReport {
    pub fn holds(name: impl Into<String>) -> Self {
        IdentityReport {
            name: name.into(),
            holds: true,
            witness: None,
        }
    }

    pub fn fails(name: impl Into<String>, witness: impl Into<String>) -> Self {
        IdentityReport {
            name: name.into(),
            holds: false,
            witness: Some(witness.into()),
        }
    }
}

impl std::fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.holds {
            write!(f, "{}: holds", self.name)
        } else {
            write!(
                f,
                "{}: FAILS ({})",
                self.name,
                self.witness.as_deref().unwrap_or("no witness")
            )
        }
    }
}
