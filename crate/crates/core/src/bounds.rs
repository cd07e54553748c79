//! Closed-form lower bounds on the ancilla dimension.
//!
//! Constants are used exactly as stated (`12800`, `6400`, `20√8`, `10`); none of
//! them is tight and none is tuned here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit bound `m ≥ (1/12800)(1/δ)`.
pub const QUBIT_BOUND_CONSTANT: f64 = 12800.0;
/// Qubit net size `A ≥ (1/6400)(1/δ)`.
pub const QUBIT_NET_CONSTANT: f64 = 6400.0;
/// Packing constant in `1/(10ε)^(n-1)`.
pub const LEMMA2_CONSTANT: f64 = 10.0;

/// Smallest integer `>= x`, treating values within a relative `1e-9` of an
/// integer as that integer so that e.g. `1/(12800 · 1/12800)` ceils to 1.
pub fn robust_ceil(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// Theorem-level bound `m ≥ A/d`, ceiled.
pub fn theorem1_bound(net_size: u64, d: u64) -> Result<u64> {
    if net_size == 0 || d < 2 {
        return Err(Error::InvalidArgument(format!("need A >= 1 and d >= 2, got A = {net_size}, d = {d}")));
    }
    Ok(net_size.div_ceil(d))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

/// `⌈1/(12800 δ)⌉`, at least 1.
pub fn qubit_bound(delta: f64) -> Result<u64> {
    check_delta(delta)?;
    Ok(robust_ceil(1.0 / (QUBIT_BOUND_CONSTANT * delta)).max(1))
}

/// Real-valued qubit net size `1/(6400 δ)`.
pub fn qubit_net_count(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(1.0 / (QUBIT_NET_CONSTANT * delta))
}

/// `k(d) = 1 / (2 (20√8)^(d-1) d^((d-1)/2))`.
pub fn k_constant(d: u32) -> f64 {
    let e = (d - 1) as f64;
    1.0 / (2.0 * (20.0 * 8f64.sqrt()).powf(e) * (d as f64).powf(e / 2.0))
}

/// `k'(d) = k(d)/d`.
pub fn k_prime(d: u32) -> f64 {
    k_constant(d) / d as f64
}

/// `⌈k'(d) (1/δ)^((d-1)/2)⌉`, at least 1.
pub fn general_bound(d: u32, delta: f64) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("need d >= 2, got {d}")));
    }
    check_delta(delta)?;
    let exponent = (d - 1) as f64 / 2.0;
    Ok(robust_ceil(k_prime(d) * delta.powf(-exponent)).max(1))
}

/// Packing count `1/(10ε)^(n-1)` without the hypothesis check.
pub fn lemma2_formula(n: u32, eps: f64) -> f64 {
    (LEMMA2_CONSTANT * eps).powi(-((n - 1) as i32))
}

/// Packing count `1/(10ε)^(n-1)` on the unit sphere of `R^n`, valid for `0 < ε < 1/10`.
pub fn lemma2_count(n: u32, eps: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !(eps > 0.0 && eps < 0.1) {
        return Err(Error::InvalidArgument(format!("packing count needs 0 < eps < 1/10, got {eps}")));
    }
    Ok(lemma2_formula(n, eps))
}

/// Covering-volume count `(1/3^n)(1/ε^n - (1/ε - 1)^n)`.
pub fn lemma2_volume_bound(n: u32, eps: f64) -> f64 {
    let inv = 1.0 / eps;
    (inv.powi(n as i32) - (inv - 1.0).powi(n as i32)) / 3f64.powi(n as i32)
}

/// `(1/3^n)(1/ε - 1)^(n-1)`, the step between the volume count and the final count.
pub fn lemma2_chain_bound(n: u32, eps: f64) -> f64 {
    (1.0 / eps - 1.0).powi(n as i32 - 1) / 3f64.powi(n as i32)
}

/// Required pairwise separation `√(8dδ)` of a net of pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetThreshold {
    pub value: f64,
    /// `D ≤ 1` always, so a threshold of 1 or more admits no pair.
    pub vacuous: bool,
}

pub fn net_threshold(d: u32, delta: f64) -> NetThreshold {
    let value = (8.0 * d as f64 * delta).sqrt();
    NetThreshold { value, vacuous: !(value < 1.0) }
}

/// Inputs to the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: u32,
    pub delta: f64,
    pub m: Option<u64>,
    pub net_size: Option<u64>,
}

/// One evaluated row: the closed-form bound for `(d, δ)` and the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub d: u32,
    pub delta: f64,
    pub formula: BoundFormula,
    pub m_bound: u64,
    pub threshold: f64,
    pub vacuous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundFormula {
    Qubit,
    General,
}

impl BoundFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundFormula::Qubit => "qubit",
            BoundFormula::General => "general",
        }
    }
}

impl BoundParams {
    pub fn new(d: u32, delta: f64) -> Result<Self> {
        let p = Self { d, delta, m: None, net_size: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidArgument(format!("need d >= 2, got {}", self.d)));
        }
        check_delta(self.delta)?;
        if self.m == Some(0) || self.net_size == Some(0) {
            return Err(Error::InvalidArgument("m and A must be at least 1".into()));
        }
        Ok(())
    }

    /// Qubit bound for `d = 2`, general bound otherwise.
    pub fn evaluate(&self) -> Result<BoundRow> {
        self.validate()?;
        let (formula, m_bound) = if self.d == 2 {
            (BoundFormula::Qubit, qubit_bound(self.delta)?)
        } else {
            (BoundFormula::General, general_bound(self.d, self.delta)?)
        };
        let t = net_threshold(self.d, self.delta);
        Ok(BoundRow { d: self.d, delta: self.delta, formula, m_bound, threshold: t.value, vacuous: t.vacuous })
    }

    /// `⌈A/d⌉` when a net size is present.
    pub fn net_bound(&self) -> Result<Option<u64>> {
        self.net_size.map(|a| theorem1_bound(a, self.d as u64)).transpose()
    }

    /// Whether a supplied ancilla dimension meets the net-derived bound.
    pub fn m_consistent(&self) -> Result<Option<bool>> {
        Ok(match (self.m, self.net_bound()?) {
            (Some(m), Some(b)) => Some(m >= b),
            _ => None,
        })
    }
}
