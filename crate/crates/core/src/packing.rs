//! Separated nets on real unit spheres and the pure-state nets built on them.
//!
//! Nets are grown greedily from a seeded stream of uniform sphere samples.
//! A run stops after `stop_after` consecutive rejections; true maximality is
//! never certified, so callers that need the packing count use
//! [`certified_packing`], which keeps extending the same stream with a
//! doubled rejection budget until the count is met or the cap is hit.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::linalg::{PureState, C64};
use crate::metrics::pure_state_distance;
use crate::rng::{self, SeededRng};

pub const DEFAULT_STOP_AFTER: usize = 10_000;
/// Budget doublings allowed before [`certified_packing`] gives up.
pub const MAX_BUDGET_DOUBLINGS: u32 = 6;
/// Relative margin that keeps the strict net inequality alive in floating point.
pub const SEPARATION_MARGIN: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;
const MAX_GRID_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingNet {
    pub n: usize,
    pub min_dist: f64,
    pub antipodal: bool,
    pub points: Vec<Vec<f64>>,
}

impl PackingNet {
    /// Validates norms, separation and (when flagged) closure under negation.
    pub fn new(n: usize, min_dist: f64, antipodal: bool, points: Vec<Vec<f64>>) -> Result<Self> {
        let net = Self { n, min_dist, antipodal, points };
        net.validate()?;
        Ok(net)
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if p.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: p.len() });
            }
            let norm = euclid(p);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotNormalized { norm });
            }
        }
        let sep = min_pairwise_euclid(&self.points);
        if sep < self.min_dist - 1e-12 {
            return Err(Error::ThresholdViolated { min_pairwise: sep, threshold: self.min_dist });
        }
        if self.antipodal {
            for p in &self.points {
                let neg: Vec<f64> = p.iter().map(|x| -x).collect();
                if !self.points.iter().any(|q| q == &neg) {
                    return Err(Error::InvalidArgument("net flagged antipodal is not closed under negation".into()));
                }
            }
        }
        Ok(())
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exhaustive minimum pairwise Euclidean distance; `2.0` (the sphere diameter) for fewer than two points.
pub fn min_pairwise_euclid(points: &[Vec<f64>]) -> f64 {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            points[i + 1..]
                .iter()
                .map(|q| dist_sq(&points[i], q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
        .sqrt()
        .min(2.0)
}

/// Uniform grid over `[-1, 1]^n` with cell side `min_dist`, used for
/// neighbor queries during greedy acceptance.
struct Grid {
    cell: f64,
    n: usize,
    bits: u32,
    offset: i64,
    cells: HashMap<u64, Vec<u32>>,
}

impl Grid {
    fn new(n: usize, cell: f64) -> Option<Self> {
        if n > MAX_GRID_DIM {
            return None;
        }
        let per_axis = (2.0 / cell).ceil() as i64 + 3;
        let bits = 64 - (per_axis as u64).leading_zeros();
        if bits as usize * n > 64 {
            return None;
        }
        Some(Self { cell, n, bits, offset: (1.0 / cell).ceil() as i64 + 1, cells: HashMap::new() })
    }

    fn coords(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64 + self.offset).collect()
    }

    fn key(&self, c: &[i64]) -> u64 {
        c.iter().fold(0u64, |acc, &v| (acc << self.bits) | v as u64)
    }

    fn insert(&mut self, x: &[f64], index: u32) {
        let key = self.key(&self.coords(x));
        self.cells.entry(key).or_default().push(index);
    }

    /// True when some stored point lies strictly closer than `radius` to `x`.
    fn any_within(&self, x: &[f64], radius: f64, points: &[Vec<f64>]) -> bool {
        let base = self.coords(x);
        let frac: Vec<f64> = x
            .iter()
            .zip(&base)
            .map(|(v, &c)| v / self.cell - (c - self.offset) as f64)
            .collect();
        let r2 = radius * radius;
        let mut offsets = vec![0i64; self.n];
        self.visit(0, 0.0, &base, &frac, &mut offsets, &|key| {
            self.cells
                .get(&key)
                .is_some_and(|bucket| bucket.iter().any(|&i| dist_sq(x, &points[i as usize]) < r2))
        })
    }

    // Depth-first over neighbor offsets in {-1, 0, 1}^n, pruning cells whose
    // box lies farther than one cell side from the query point.
    fn visit(
        &self,
        axis: usize,
        gap2: f64,
        base: &[i64],
        frac: &[f64],
        offsets: &mut Vec<i64>,
        probe: &dyn Fn(u64) -> bool,
    ) -> bool {
        if gap2 >= 1.0 {
            return false;
        }
        if axis == self.n {
            let c: Vec<i64> = base.iter().zip(offsets.iter()).map(|(b, o)| b + o).collect();
            return probe(self.key(&c));
        }
        for o in [0i64, -1, 1] {
            let g = match o {
                0 => 0.0,
                -1 => frac[axis],
                _ => 1.0 - frac[axis],
            };
            offsets[axis] = o;
            if self.visit(axis + 1, gap2 + g * g, base, frac, offsets, probe) {
                return true;
            }
        }
        false
    }
}

/// Resumable greedy packer over a seeded candidate stream.
pub struct GreedyPacker {
    n: usize,
    min_dist: f64,
    antipodal: bool,
    rng: SeededRng,
    points: Vec<Vec<f64>>,
    grid: Option<Grid>,
    consecutive_rejections: usize,
    candidates: u64,
}

impl GreedyPacker {
    pub fn new(n: usize, min_dist: f64, seed: u64, antipodal: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("sphere packing needs n >= 2, got {n}")));
        }
        if !(min_dist > 0.0 && min_dist < 2.0) {
            return Err(Error::InvalidArgument(format!("min_dist must lie in (0, 2), got {min_dist}")));
        }
        Ok(Self {
            n,
            min_dist,
            antipodal,
            rng: rng::seeded(seed),
            points: Vec::new(),
            grid: Grid::new(n, min_dist),
            consecutive_rejections: 0,
            candidates: 0,
        })
    }

    fn too_close(&self, x: &[f64]) -> bool {
        match &self.grid {
            Some(g) => g.any_within(x, self.min_dist, &self.points),
            None => {
                let r2 = self.min_dist * self.min_dist;
                self.points.iter().any(|p| dist_sq(x, p) < r2)
            }
        }
    }

    fn push(&mut self, x: Vec<f64>) {
        if let Some(g) = &mut self.grid {
            g.insert(&x, self.points.len() as u32);
        }
        self.points.push(x);
    }

    /// Draws candidates until `stop_after` consecutive rejections have accrued.
    pub fn run(&mut self, stop_after: usize) {
        while self.consecutive_rejections < stop_after {
            let x = rng::unit_vector(&mut self.rng, self.n);
            self.candidates += 1;
            let accept = if self.antipodal {
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                !self.too_close(&x) && !self.too_close(&neg)
            } else {
                !self.too_close(&x)
            };
            if accept {
                self.consecutive_rejections = 0;
                if self.antipodal {
                    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                    self.push(x);
                    self.push(neg);
                } else {
                    self.push(x);
                }
            } else {
                self.consecutive_rejections += 1;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn candidates(&self) -> u64 {
        self.candidates
    }

    pub fn finish(self) -> PackingNet {
        PackingNet { n: self.n, min_dist: self.min_dist, antipodal: self.antipodal, points: self.points }
    }
}

/// Greedy packing on the unit sphere of `R^n` with pairwise distance `>= min_dist`.
pub fn greedy_maximal_packing(n: usize, min_dist: f64, seed: u64, stop_after: usize) -> Result<PackingNet> {
    run_packing(n, min_dist, seed, stop_after, false)
}

/// Greedy packing closed under `x ↦ -x`; candidates are accepted in pairs.
pub fn antipodal_packing(n: usize, min_dist: f64, seed: u64, stop_after: usize) -> Result<PackingNet> {
    run_packing(n, min_dist, seed, stop_after, true)
}

fn run_packing(n: usize, min_dist: f64, seed: u64, stop_after: usize, antipodal: bool) -> Result<PackingNet> {
    if stop_after == 0 {
        return Err(Error::InvalidArgument("stop_after must be at least 1".into()));
    }
    let mut packer = GreedyPacker::new(n, min_dist, seed, antipodal)?;
    packer.run(stop_after);
    Ok(packer.finish())
}

/// Packing that must reach `target` points; the rejection budget doubles up
/// to [`MAX_BUDGET_DOUBLINGS`] times on the same stream before failing.
pub fn certified_packing(
    n: usize,
    min_dist: f64,
    seed: u64,
    stop_after: usize,
    antipodal: bool,
    target: f64,
) -> Result<PackingNet> {
    if stop_after == 0 {
        return Err(Error::InvalidArgument("stop_after must be at least 1".into()));
    }
    let mut packer = GreedyPacker::new(n, min_dist, seed, antipodal)?;
    let mut budget = stop_after;
    for round in 0..=MAX_BUDGET_DOUBLINGS {
        packer.run(budget);
        if packer.count() as f64 >= target {
            return Ok(packer.finish());
        }
        if round < MAX_BUDGET_DOUBLINGS {
            budget = budget.saturating_mul(2);
        }
    }
    Err(Error::BudgetExhausted { count: packer.count(), needed: target, budget })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub radius: f64,
    pub samples: usize,
    pub covered_fraction: f64,
    /// Largest distance from a sample to its nearest net point.
    pub worst_gap: f64,
}

/// Monte-Carlo check that balls of `radius` around the net cover the sphere.
pub fn verify_covering(net: &PackingNet, radius: f64, n_samples: usize, seed: u64) -> Result<CoveringReport> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("covering radius must be nonnegative, got {radius}")));
    }
    if net.points.is_empty() {
        return Err(Error::InvalidArgument("empty net".into()));
    }
    let mut r = rng::seeded(seed);
    let samples: Vec<Vec<f64>> = (0..n_samples).map(|_| rng::unit_vector(&mut r, net.n)).collect();
    let nearest: Vec<f64> = samples
        .par_iter()
        .map(|x| net.points.iter().map(|p| dist_sq(x, p)).fold(f64::INFINITY, f64::min).sqrt())
        .collect();
    // radius 0 covers only exact hits
    let covered = nearest.iter().filter(|&&g| g <= radius && (radius > 0.0 || g == 0.0)).count();
    Ok(CoveringReport {
        radius,
        samples: n_samples,
        covered_fraction: if n_samples == 0 { 1.0 } else { covered as f64 / n_samples as f64 },
        worst_gap: nearest.iter().copied().fold(0.0, f64::max),
    })
}

/// One representative per antipodal pair: the member whose first nonzero coordinate is positive.
pub fn select_half(net: &PackingNet) -> Result<Vec<Vec<f64>>> {
    if !net.antipodal {
        return Err(Error::InvalidArgument("select_half needs an antipodal net".into()));
    }
    let half: Vec<Vec<f64>> = net
        .points
        .iter()
        .filter(|p| p.iter().find(|v| **v != 0.0).is_some_and(|v| *v > 0.0))
        .cloned()
        .collect();
    if 2 * half.len() != net.count() {
        return Err(Error::InvalidArgument(format!(
            "antipodal net of {} points yields {} representatives",
            net.count(),
            half.len()
        )));
    }
    Ok(half)
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = euclid(x);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// The pure state `Σ_i x_i |i⟩` with real amplitudes.
pub fn real_embed(x: &[f64]) -> Result<PureState> {
    check_unit(x)?;
    PureState::new(x.iter().map(|&v| C64::new(v, 0.0)).collect())
}

/// `(cos(θ/2), e^{iϕ} sin(θ/2))` for the Bloch vector `(sinθ cosϕ, sinθ sinϕ, cosθ)`.
pub fn bloch_to_qubit(b: &[f64]) -> Result<PureState> {
    if b.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: b.len() });
    }
    check_unit(b)?;
    let (x, y, z) = (b[0], b[1], b[2]);
    let cos_half = ((1.0 + z) / 2.0).max(0.0).sqrt();
    let sin_half = ((1.0 - z) / 2.0).max(0.0).sqrt();
    let rho = x.hypot(y);
    let phase = if rho > 0.0 { C64::new(x / rho, y / rho) } else { C64::new(1.0, 0.0) };
    PureState::normalized(vec![C64::new(cos_half, 0.0), phase * sin_half])
}

/// A net of pure states with certified pairwise distance above `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateNet {
    pub d: usize,
    pub threshold: f64,
    pub min_pairwise_d: f64,
    pub states: Vec<PureState>,
}

impl StateNet {
    /// Certifies `states` by an exhaustive pairwise scan.
    pub fn certify(d: usize, threshold: f64, states: Vec<PureState>) -> Result<Self> {
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        let min_pairwise_d = min_pairwise_distance(&states);
        if !(min_pairwise_d > threshold) {
            return Err(Error::ThresholdViolated { min_pairwise: min_pairwise_d, threshold });
        }
        Ok(Self { d, threshold, min_pairwise_d, states })
    }

    pub fn count(&self) -> usize {
        self.states.len()
    }
}

/// Exhaustive `min_{α<β} D(φ_α, φ_β)`; `1.0` (the largest possible D) for fewer than two states.
pub fn min_pairwise_distance(states: &[PureState]) -> f64 {
    (0..states.len())
        .into_par_iter()
        .map(|i| {
            states[i + 1..]
                .iter()
                .map(|s| pure_state_distance(&states[i], s).unwrap_or(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
        .min(1.0)
}

/// Size the packing argument guarantees for a state net in dimension `d`.
pub fn state_net_target(d: usize, delta: f64) -> Result<f64> {
    let t = bounds::net_threshold(d as u32, delta).value;
    if d == 2 {
        bounds::qubit_net_count(delta)
    } else {
        Ok(bounds::lemma2_formula(d as u32, t) / 2.0)
    }
}

/// Net of pure states in dimension `d` with pairwise `D > √(8dδ)`.
///
/// Qubits use a Bloch-sphere packing at separation `2·(2√(8dδ))`; larger `d`
/// uses an antipodal packing of the real sphere at `2√(8dδ)`, keeps one
/// vector per pair and embeds it with real amplitudes.
pub fn build_state_net(d: usize, delta: f64, seed: u64, stop_after: usize) -> Result<StateNet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("state nets need d >= 2, got {d}")));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let t = bounds::net_threshold(d as u32, delta);
    if t.vacuous {
        return Err(Error::VacuousThreshold { threshold: t.value });
    }
    let target = state_net_target(d, delta)?;
    let states = if d == 2 {
        // D = |a - b|/2 on the Bloch sphere; keep min_dist below the diameter.
        let min_dist = (4.0 * t.value).min(1.0 + t.value);
        let net = certified_packing(3, min_dist, seed, stop_after, false, target)?;
        net.points.iter().map(|b| bloch_to_qubit(b)).collect::<Result<Vec<_>>>()?
    } else {
        let min_dist = 2.0 * t.value * (1.0 + SEPARATION_MARGIN);
        let net = certified_packing(d, min_dist, seed, stop_after, true, 2.0 * target)?;
        select_half(&net)?.iter().map(|x| real_embed(x)).collect::<Result<Vec<_>>>()?
    };
    StateNet::certify(d, t.value, states)
}
