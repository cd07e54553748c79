//! Distances between pure states and between POVMs.
//!
//! `D(φ, ψ) = √(1 - |⟨φ|ψ⟩|²)`; the trace norm in
//! [`crate::linalg`] is the usual sum of singular values, under which
//! `|| |φ⟩⟨φ| - |ψ⟩⟨ψ| ||_1 = 2 D(φ, ψ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianOperator, Povm, PureState};
use crate::rng;

/// Largest outcome count evaluated by exhaustive sign patterns.
pub const EXACT_OUTCOME_LIMIT: usize = 16;

/// `D(φ, ψ)`, evaluated as the norm of the part of `ψ` orthogonal to `φ`.
/// This equals `√(1 - |⟨φ|ψ⟩|²)` but keeps full relative precision near 0.
pub fn pure_state_distance(phi: &PureState, psi: &PureState) -> Result<f64> {
    let overlap = phi.inner(psi)?;
    let a = phi.amplitudes();
    let b = psi.amplitudes();
    let scale = overlap / linalg::inner(a, a);
    let perp: f64 = b.iter().zip(a).map(|(y, x)| (y - scale * x).norm_sqr()).sum();
    Ok((perp / linalg::inner(b, b).re).sqrt().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistMethod {
    SignPatternExact,
    SampledBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistReport {
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub method: DistMethod,
}

impl DistReport {
    /// Exact value when available, else the upper bound.
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or(self.upper)
    }
}

/// Knobs for [`povm_dist_with`]; only the sampled path uses them.
#[derive(Debug, Clone, Copy)]
pub struct DistOptions {
    pub exact_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for DistOptions {
    fn default() -> Self {
        Self { exact_limit: EXACT_OUTCOME_LIMIT, samples: 4096, seed: 0 }
    }
}

/// `max_ρ Σ_j |tr(ρ(P^j - G^j))|`.
pub fn povm_dist(p: &Povm, g: &Povm) -> Result<DistReport> {
    povm_dist_with(p, g, &DistOptions::default())
}

pub fn povm_dist_with(p: &Povm, g: &Povm, opts: &DistOptions) -> Result<DistReport> {
    if p.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: g.dim() });
    }
    if p.outcomes() != g.outcomes() {
        return Err(Error::DimensionMismatch { expected: p.outcomes(), got: g.outcomes() });
    }
    let deltas: Vec<HermitianOperator> =
        p.elements().iter().zip(g.elements()).map(|(a, b)| a.sub(b)).collect();
    dist_of_differences(&deltas, p.dim(), opts)
}

/// `dist` for an explicit list of differences `Δ_j`.
pub fn dist_of_differences(deltas: &[HermitianOperator], dim: usize, opts: &DistOptions) -> Result<DistReport> {
    let norms = deltas.iter().map(linalg::op_norm).collect::<Result<Vec<_>>>()?;
    let max_norm = norms.iter().copied().fold(0.0f64, f64::max);
    // Σ_j ||Δ_j||_∞, at most (outcomes) · max_j ||Δ_j||_∞
    let sandwich_upper: f64 = norms.iter().sum();
    let k = deltas.len();

    if k <= opts.exact_limit {
        let exact = sign_pattern_max(deltas)?.max(max_norm);
        return Ok(DistReport {
            exact: Some(exact),
            lower: max_norm,
            upper: sandwich_upper.max(exact),
            method: DistMethod::SignPatternExact,
        });
    }

    let mut r = rng::seeded(opts.seed);
    let mut best = 0.0f64;
    for _ in 0..opts.samples {
        let rho = linalg::random_pure_state_from(&mut r, dim);
        best = best.max(outcome_l1(deltas, &rho));
    }
    Ok(DistReport {
        exact: None,
        lower: best.max(max_norm),
        upper: sandwich_upper,
        method: DistMethod::SampledBounds,
    })
}

/// `Σ_j |⟨ρ|Δ_j|ρ⟩|` for a pure input.
pub fn outcome_l1(deltas: &[HermitianOperator], rho: &PureState) -> f64 {
    deltas.iter().map(|d| d.expectation(rho).abs()).sum()
}

// Σ_j |x_j| = max_s Σ_j s_j x_j, so dist = max_s λ_max(Σ_j s_j Δ_j). Patterns
// s and -s share one eigendecomposition: λ_max(-M) = -λ_min(M). Fixing
// s_0 = +1 leaves 2^(k-1) patterns.
fn sign_pattern_max(deltas: &[HermitianOperator]) -> Result<f64> {
    let k = deltas.len();
    if k == 0 {
        return Ok(0.0);
    }
    let patterns: u64 = 1 << (k - 1);
    let values = (0..patterns)
        .into_par_iter()
        .map(|bits| {
            let mut m = deltas[0].clone();
            for (j, d) in deltas.iter().enumerate().skip(1) {
                m = if bits >> (j - 1) & 1 == 1 { m.sub(d) } else { m.add(d) };
            }
            let (lo, hi) = linalg::eig_extremes(&m)?;
            Ok(hi.max(-lo))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}
