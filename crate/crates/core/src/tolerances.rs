use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the checks in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// POVM positivity and completeness.
    pub povm: f64,
    /// Eigensolver residual `||hV - VΛ||`.
    pub eig_residual: f64,
    /// Eigenvalues with `|λ| <= rank_cutoff` are dropped from spectral decompositions.
    pub rank_cutoff: f64,
    /// Hermiticity, normalization and other arithmetic identities.
    pub arithmetic: f64,
    /// Slack applied to strict inequalities so they survive rounding.
    pub strict_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            povm: 1e-9,
            eig_residual: 1e-10,
            rank_cutoff: 1e-10,
            arithmetic: 1e-12,
            strict_slack: 1e-9,
        }
    }
}
