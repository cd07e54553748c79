//! Programmable measurement devices and the net-versus-rank certificate.
//!
//! A device is a POVM `(F^j)` on `system ⊗ ancilla`; a program state `σ`
//! yields the system POVM `G^j = Tr_a((1 ⊗ σ) F^j)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig_with, random_pure_state, random_pure_state_from, HermitianOperator, Matrix, Povm, PureState,
    C64,
};
use crate::metrics::{self, pure_state_distance, DistOptions};
use crate::packing::{min_pairwise_distance, StateNet};
use crate::rng;
use crate::Tolerances;

/// Contractions with norm at or below this are dropped from `ρ_α`.
const CONTRACTION_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ProgrammableDevice {
    d: usize,
    m: usize,
    povm: Povm,
}

impl ProgrammableDevice {
    pub fn new(d: usize, m: usize, elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::new_with_tol(d, m, elements, Tolerances::default().povm)
    }

    pub fn new_with_tol(d: usize, m: usize, elements: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidArgument("device dimensions must be positive".into()));
        }
        if let Some(bad) = elements.iter().find(|e| e.dim() != d * m) {
            return Err(Error::DimensionMismatch { expected: d * m, got: bad.dim() });
        }
        Ok(Self { d, m, povm: Povm::new_with_tol(elements, tol)? })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        self.povm.elements()
    }

    /// `F^j = P^j ⊗ 1_m`: the program has no effect.
    pub fn program_independent(povm: &Povm, m: usize) -> Result<Self> {
        let id = HermitianOperator::identity(m);
        Self::new(povm.dim(), m, povm.elements().iter().map(|p| p.tensor(&id)).collect())
    }

    /// `F^j = 1_{dm}/k` for a `k`-outcome device.
    pub fn trivial(d: usize, m: usize, outcomes: usize) -> Result<Self> {
        let e = HermitianOperator::identity(d * m).scale(1.0 / outcomes as f64);
        Self::new(d, m, vec![e; outcomes])
    }

    /// `F^j = Σ_α P^j_α ⊗ |α⟩⟨α|`: program `|α⟩` reproduces observable `α` exactly.
    pub fn clock(observables: &[TargetObservable]) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::InvalidArgument("clock device needs at least one observable".into()))?;
        let d = first.dim();
        let k = first.outcomes();
        let m = observables.len();
        if let Some(bad) = observables.iter().find(|o| o.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        let mut elements = vec![HermitianOperator::zeros(d * m); k];
        for (alpha, obs) in observables.iter().enumerate() {
            let program = PureState::basis(m, alpha).projector();
            for (j, state) in obs.states.iter().enumerate() {
                elements[j] = elements[j].add(&state.projector().tensor(&program));
            }
        }
        Self::new(d, m, elements)
    }

    /// Clock device whose stored observables are the completed targets of `net`.
    pub fn clock_for_net(net: &StateNet, seed: u64) -> Result<Self> {
        Self::clock(&net_targets(net, seed)?)
    }

    /// Random `k`-outcome device: `F^j = S^{-1/2} X_j X_j† S^{-1/2}` with `S = Σ_j X_j X_j†`.
    pub fn random(d: usize, m: usize, outcomes: usize, seed: u64) -> Result<Self> {
        let n = d * m;
        let mut r = rng::seeded(seed);
        let raw: Vec<HermitianOperator> = (0..outcomes)
            .map(|_| {
                let x = Matrix::from_fn(n, |_, _| C64::new(rng::gaussian(&mut r), rng::gaussian(&mut r)));
                HermitianOperator::hermitian_part(&(&x * &x.adjoint()))
            })
            .collect();
        let sum = raw.iter().fold(HermitianOperator::zeros(n), |acc, e| acc.add(e));
        let sd = linalg::hermitian_eig(&sum, 0.0)?;
        let mut inv_sqrt = Matrix::zeros(n);
        for (lambda, v) in sd.eigenvalues.iter().zip(&sd.eigenvectors) {
            inv_sqrt = &inv_sqrt + &v.projector().into_matrix().scale_real(lambda.powf(-0.5));
        }
        let elements = raw
            .iter()
            .map(|e| HermitianOperator::hermitian_part(&(&(&inv_sqrt * e.matrix()) * &inv_sqrt)))
            .collect();
        Self::new(d, m, elements)
    }

    /// Programmed element `(1 ⊗ ⟨φ|) F^j (1 ⊗ |φ⟩)` for each outcome.
    pub fn programmed_elements(&self, program: &[C64]) -> Result<Vec<HermitianOperator>> {
        if program.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: program.len() });
        }
        self.elements()
            .iter()
            .map(|f| Ok(HermitianOperator::hermitian_part(&f.matrix().compress_ancilla(self.d, program)?)))
            .collect()
    }
}

/// Checks that `sigma` is a density operator on the ancilla.
pub fn check_program_state(sigma: &HermitianOperator, m: usize, tol: f64) -> Result<()> {
    if sigma.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: sigma.dim() });
    }
    let (lo, _) = linalg::eig_extremes(sigma)?;
    if lo < -tol {
        return Err(Error::InvalidProgram(format!("negative eigenvalue {lo:.3e}")));
    }
    let tr = sigma.trace();
    if (tr - 1.0).abs() > tol {
        return Err(Error::InvalidProgram(format!("trace {tr} differs from 1")));
    }
    Ok(())
}

/// `G^j = Tr_a((1_d ⊗ σ) F^j)`.
pub fn program_povm(dev: &ProgrammableDevice, sigma: &HermitianOperator) -> Result<Povm> {
    let tol = Tolerances::default().povm;
    check_program_state(sigma, dev.m, tol)?;
    let lift = HermitianOperator::identity(dev.d).tensor(sigma);
    let elements = dev
        .elements()
        .iter()
        .map(|f| {
            let joint = lift.matrix() * f.matrix();
            Ok(HermitianOperator::hermitian_part(&joint.partial_trace_ancilla(dev.d, dev.m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Povm::new_with_tol(elements, tol)
}

/// [`program_povm`] for a pure program `|φ⟩⟨φ|`.
pub fn program_povm_pure(dev: &ProgrammableDevice, program: &PureState) -> Result<Povm> {
    Povm::new(dev.programmed_elements(program.amplitudes())?)
}

/// Rank-one projective measurement onto an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetObservable {
    pub states: Vec<PureState>,
}

impl TargetObservable {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        let d = states.first().map(|s| s.dim()).unwrap_or(0);
        if states.len() != d || d == 0 {
            return Err(Error::InvalidArgument(format!("need {d} basis states, got {}", states.len())));
        }
        for i in 0..d {
            for j in 0..i {
                let ov = states[i].inner(&states[j])?.norm();
                if ov > 1e-10 {
                    return Err(Error::InvalidArgument(format!("basis states {j} and {i} overlap by {ov:.3e}")));
                }
            }
        }
        Ok(Self { states })
    }

    /// Completes `phi` to an orthonormal basis by Gram-Schmidt over seeded
    /// random candidates; `phi` stays first.
    pub fn complete(phi: &PureState, seed: u64) -> Result<Self> {
        let d = phi.dim();
        let mut r = rng::seeded(seed);
        let mut basis = vec![phi.clone()];
        while basis.len() < d {
            let cand = random_pure_state_from(&mut r, d);
            let mut v = cand.amplitudes().to_vec();
            // two passes keep the result orthogonal to rounding level
            for _ in 0..2 {
                for b in &basis {
                    let c = linalg::inner(b.amplitudes(), &v);
                    for (x, y) in v.iter_mut().zip(b.amplitudes()) {
                        *x -= c * y;
                    }
                }
            }
            if linalg::vec_norm(&v) > 1e-6 {
                basis.push(PureState::normalized(v)?);
            }
        }
        Self::new(basis)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.states.len()
    }

    pub fn projectors(&self) -> Vec<HermitianOperator> {
        self.states.iter().map(PureState::projector).collect()
    }

    pub fn povm(&self) -> Result<Povm> {
        Povm::new(self.projectors())
    }
}

/// Seed used to complete net state `alpha` into its target observable.
pub fn target_seed(seed: u64, alpha: usize) -> u64 {
    rng::derive_seed(seed, alpha as u64)
}

fn search_seed(seed: u64, alpha: usize) -> u64 {
    rng::derive_seed(seed ^ 0x5EA5_C4ED_0F00_0000, alpha as u64)
}

/// Target observables for every state of a net, completed deterministically.
pub fn net_targets(net: &StateNet, seed: u64) -> Result<Vec<TargetObservable>> {
    net.states
        .iter()
        .enumerate()
        .map(|(alpha, s)| TargetObservable::complete(s, target_seed(seed, alpha)))
        .collect()
}

fn program_error(dev: &ProgrammableDevice, targets: &[HermitianOperator], program: &[C64]) -> Result<f64> {
    let g = dev.programmed_elements(program)?;
    let deltas: Vec<HermitianOperator> = targets.iter().zip(&g).map(|(p, q)| p.sub(q)).collect();
    Ok(metrics::dist_of_differences(&deltas, dev.d, &DistOptions::default())?.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramSearch {
    pub program: PureState,
    pub achieved: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
    /// Stop as soon as the error is at or below this value.
    pub good_enough: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, min_step: 1e-9, max_evaluations: 20_000, good_enough: 1e-12 }
    }
}

/// Multi-start coordinate search over pure programs minimizing `dist(G, target)`.
///
/// Starts are the best computational-basis program followed by `restarts`
/// seeded random programs; restart `r` depends only on `(seed, r)`, so more
/// restarts never give a worse result.
pub fn optimize_program(
    dev: &ProgrammableDevice,
    target: &TargetObservable,
    restarts: usize,
    seed: u64,
) -> Result<ProgramSearch> {
    optimize_program_with(dev, target, restarts, seed, &SearchOptions::default())
}

pub fn optimize_program_with(
    dev: &ProgrammableDevice,
    target: &TargetObservable,
    restarts: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<ProgramSearch> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if target.dim() != dev.d || target.outcomes() != dev.elements().len() {
        return Err(Error::DimensionMismatch { expected: dev.d, got: target.dim() });
    }
    let projectors = target.projectors();
    let m = dev.m;

    let mut best_basis = (f64::INFINITY, 0usize);
    for k in 0..m {
        let v = program_error(dev, &projectors, PureState::basis(m, k).amplitudes())?;
        if v < best_basis.0 {
            best_basis = (v, k);
        }
    }
    if best_basis.0 <= opts.good_enough {
        return Ok(ProgramSearch { program: PureState::basis(m, best_basis.1), achieved: best_basis.0 });
    }
    let mut starts = vec![PureState::basis(m, best_basis.1)];
    starts.extend((0..restarts).map(|r| random_pure_state(m, rng::derive_seed(seed, r as u64))));

    let results = starts
        .par_iter()
        .map(|s| local_search(dev, &projectors, s, opts))
        .collect::<Result<Vec<_>>>()?;
    let (achieved, program) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one start");
    Ok(ProgramSearch { program, achieved })
}

fn local_search(
    dev: &ProgrammableDevice,
    targets: &[HermitianOperator],
    start: &PureState,
    opts: &SearchOptions,
) -> Result<(f64, PureState)> {
    let mut x: Vec<f64> = start.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect();
    let to_program = |x: &[f64]| -> Option<PureState> {
        PureState::normalized(x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()).ok()
    };
    let eval = |x: &[f64]| -> Result<f64> {
        match to_program(x) {
            Some(p) => program_error(dev, targets, p.amplitudes()),
            None => Ok(f64::INFINITY),
        }
    };
    let mut best = eval(&x)?;
    let mut step = opts.initial_step;
    let mut evaluations = 1;
    while step >= opts.min_step && evaluations < opts.max_evaluations && best > opts.good_enough {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + sign * step;
                let v = eval(&x)?;
                evaluations += 1;
                if v < best {
                    best = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
        // rescaling leaves the program unchanged and keeps step sizes meaningful
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
    }
    let program = to_program(&x).expect("search stays away from the zero vector");
    Ok((best, program))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResult {
    pub alpha: usize,
    pub achieved: f64,
    pub program: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpmEvaluation {
    pub d: usize,
    pub m: usize,
    pub targets: Vec<TargetResult>,
    /// `max_α` of the achieved distances.
    pub worst: f64,
}

/// Worst achieved `dist` over the targets generated from `net`.
pub fn evaluate_upm(dev: &ProgrammableDevice, net: &StateNet, restarts: usize, seed: u64) -> Result<UpmEvaluation> {
    if net.d != dev.d {
        return Err(Error::DimensionMismatch { expected: dev.d, got: net.d });
    }
    let targets = net_targets(net, seed)?;
    let results = targets
        .par_iter()
        .enumerate()
        .map(|(alpha, t)| {
            let found = optimize_program(dev, t, restarts, search_seed(seed, alpha))?;
            Ok(TargetResult { alpha, achieved: found.achieved, program: found.program.amplitudes().to_vec() })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|r| r.achieved).fold(0.0, f64::max);
    Ok(UpmEvaluation { d: dev.d, m: dev.m, targets: results, worst })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Witness {
    pub index: usize,
    /// `D(φ, ψ_index)`.
    pub distance: f64,
    /// `√(2ε)`.
    pub bound: f64,
    /// Measured `||Σ λ_i |ψ_i⟩⟨ψ_i| - |φ⟩⟨φ| ||_1`.
    pub trace_norm_gap: f64,
    /// `1 - Σ λ̃_i |⟨φ|ψ_i⟩|²` after renormalizing the weights.
    pub mixture_defect: f64,
}

/// Finds a mixture component close to `phi` when the mixture approximates
/// `|φ⟩⟨φ|` within `eps` in trace norm.
pub fn lemma1_extract(weights: &[f64], states: &[PureState], phi: &PureState, eps: f64) -> Result<Lemma1Witness> {
    lemma1_extract_with(weights, states, phi, eps, &Tolerances::default())
}

pub fn lemma1_extract_with(
    weights: &[f64],
    states: &[PureState],
    phi: &PureState,
    eps: f64,
    tol: &Tolerances,
) -> Result<Lemma1Witness> {
    if weights.len() != states.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), got: states.len() });
    }
    if states.is_empty() {
        return Err(Error::InvalidArgument("empty mixture".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= -tol.arithmetic && **w <= 1.0 + tol.arithmetic)) {
        return Err(Error::InvalidArgument(format!("mixture weight {w} outside [0, 1]")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be nonnegative, got {eps}")));
    }
    let d = phi.dim();
    let mut mixture = HermitianOperator::zeros(d);
    for (w, s) in weights.iter().zip(states) {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
        }
        mixture = mixture.add(&s.projector().scale(*w));
    }
    let gap = linalg::trace_norm(&mixture.sub(&phi.projector()))?;
    if gap > eps + tol.arithmetic {
        return Err(Error::Lemma1Precondition { measured: gap, eps });
    }

    let overlaps: Vec<f64> = states.iter().map(|s| phi.inner(s).map(|z| z.norm_sqr())).collect::<Result<_>>()?;
    let total: f64 = weights.iter().sum();
    let mixture_defect = if total > 0.0 {
        1.0 - weights.iter().zip(&overlaps).map(|(w, o)| w / total * o).sum::<f64>()
    } else {
        1.0
    };
    let index = overlaps
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &o)| if o > acc.1 { (i, o) } else { acc })
        .0;
    Ok(Lemma1Witness {
        index,
        distance: pure_state_distance(phi, &states[index])?,
        bound: (2.0 * eps).sqrt(),
        trace_norm_gap: gap,
        mixture_defect,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CertificateOptions {
    /// Which POVM element anchors the argument (0 is `F^1`).
    pub element: usize,
    pub tolerances: Tolerances,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpmCertificate {
    pub d: usize,
    pub m: usize,
    pub delta: f64,
    pub threshold: f64,
    pub element: usize,
    /// Net size `A`.
    pub a: usize,
    /// Retained spectral rank `I` of the anchoring element.
    pub i: usize,
    /// `α ↦ i_α`; `None` where the approximation check failed.
    pub assignment: Vec<Option<usize>>,
    pub injective: bool,
    /// `||ρ_α - |φ_α⟩⟨φ_α| ||_1` per net state.
    pub per_alpha_error: Vec<f64>,
    pub witness_distance: Vec<Option<f64>>,
    pub failing_alpha: Option<usize>,
    /// Smallest `D(ψ̃_{i_α}, ψ̃_{i_β}) - (D(φ_α⊗π_α, φ_β⊗π_β) - 2√(2dδ))` over pairs.
    pub chain_margin: Option<f64>,
    /// Every pair satisfies the triangle-inequality chain and its right side is positive.
    pub chain_holds: Option<bool>,
    pub m_bound: u64,
    pub pass: bool,
}

/// Runs the rank argument on a concrete device, net and program list.
pub fn theorem1_certificate(
    dev: &ProgrammableDevice,
    net: &StateNet,
    delta: f64,
    programs: &[PureState],
) -> Result<UpmCertificate> {
    theorem1_certificate_with(dev, net, delta, programs, &CertificateOptions::default())
}

pub fn theorem1_certificate_with(
    dev: &ProgrammableDevice,
    net: &StateNet,
    delta: f64,
    programs: &[PureState],
    opts: &CertificateOptions,
) -> Result<UpmCertificate> {
    let tol = &opts.tolerances;
    let (d, m) = (dev.d, dev.m);
    if net.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: net.d });
    }
    if programs.len() != net.count() {
        return Err(Error::InvalidArgument(format!(
            "{} programs supplied for a net of {} states",
            programs.len(),
            net.count()
        )));
    }
    if let Some(bad) = programs.iter().find(|p| p.dim() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: bad.dim() });
    }
    if net.count() == 0 {
        return Err(Error::InvalidArgument("empty net".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let threshold = bounds::net_threshold(d as u32, delta).value;
    let separation = min_pairwise_distance(&net.states);
    if !(separation > threshold) {
        return Err(Error::ThresholdViolated { min_pairwise: separation, threshold });
    }
    let anchor = dev
        .elements()
        .get(opts.element)
        .ok_or_else(|| Error::InvalidArgument(format!("device has no element {}", opts.element)))?;

    let spectrum = hermitian_eig_with(anchor, tol.rank_cutoff, tol)?;
    let eps = d as f64 * delta;

    struct AlphaOutcome {
        error: f64,
        assigned: Option<(usize, f64)>,
    }

    let outcomes = net
        .states
        .par_iter()
        .zip(programs.par_iter())
        .map(|(phi, program)| -> Result<AlphaOutcome> {
            let mut weights = Vec::new();
            let mut states = Vec::new();
            let mut source = Vec::new();
            for (i, (lambda, psi)) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors).enumerate() {
                let v = contract(psi.amplitudes(), program.amplitudes(), d, m);
                let norm = linalg::vec_norm(&v);
                if norm <= CONTRACTION_FLOOR {
                    continue;
                }
                weights.push(lambda * norm * norm);
                states.push(PureState::normalized(v)?);
                source.push(i);
            }
            let mut rho = HermitianOperator::zeros(d);
            for (w, s) in weights.iter().zip(&states) {
                rho = rho.add(&s.projector().scale(*w));
            }
            let error = linalg::trace_norm(&rho.sub(&phi.projector()))?;
            if error > eps + tol.arithmetic || states.is_empty() {
                return Ok(AlphaOutcome { error, assigned: None });
            }
            // eigenvalues of a valid POVM element sit in [0, 1] up to the POVM tolerance
            let clamped: Vec<f64> = weights.iter().map(|w| w.clamp(0.0, 1.0)).collect();
            let witness = lemma1_extract_with(&clamped, &states, phi, eps, tol)?;
            Ok(AlphaOutcome { error, assigned: Some((source[witness.index], witness.distance)) })
        })
        .collect::<Result<Vec<_>>>()?;

    let per_alpha_error: Vec<f64> = outcomes.iter().map(|o| o.error).collect();
    let assignment: Vec<Option<usize>> = outcomes.iter().map(|o| o.assigned.map(|a| a.0)).collect();
    let witness_distance: Vec<Option<f64>> = outcomes.iter().map(|o| o.assigned.map(|a| a.1)).collect();
    let failing_alpha = assignment.iter().position(Option::is_none);

    let injective = failing_alpha.is_none() && {
        let mut seen = assignment.iter().flatten().copied().collect::<Vec<_>>();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    };

    let (chain_margin, chain_holds) = if failing_alpha.is_none() {
        let slack = 2.0 * (2.0 * eps).sqrt();
        let joint: Vec<PureState> = net.states.iter().zip(programs).map(|(p, q)| p.tensor(q)).collect();
        let mut margin = f64::INFINITY;
        let mut holds = true;
        for a in 0..net.count() {
            for b in (a + 1)..net.count() {
                let (ia, ib) = (assignment[a].unwrap(), assignment[b].unwrap());
                let lhs = pure_state_distance(&spectrum.eigenvectors[ia], &spectrum.eigenvectors[ib])?;
                let rhs = pure_state_distance(&joint[a], &joint[b])? - slack;
                margin = margin.min(lhs - rhs);
                holds &= lhs >= rhs - tol.arithmetic && rhs > tol.strict_slack;
            }
        }
        (Some(if margin.is_finite() { margin } else { 0.0 }), Some(holds))
    } else {
        (None, None)
    };

    let a = net.count();
    let i = spectrum.rank();
    Ok(UpmCertificate {
        d,
        m,
        delta,
        threshold,
        element: opts.element,
        a,
        i,
        assignment,
        injective,
        per_alpha_error,
        witness_distance,
        failing_alpha,
        chain_margin,
        chain_holds,
        m_bound: bounds::theorem1_bound(a as u64, d as u64)?,
        pass: failing_alpha.is_none() && injective && a <= i,
    })
}

/// `v[s] = Σ_k conj(π[k]) ψ[s·m + k]`, the partial inner product with the program.
pub fn contract(psi: &[C64], program: &[C64], d: usize, m: usize) -> Vec<C64> {
    (0..d)
        .map(|s| (0..m).map(|k| program[k].conj() * psi[s * m + k]).sum())
        .collect()
}
