//! Inequality margins, seeded random states and parameter sweeps.
//!
//! Every random draw comes from ChaCha8 seeded with the root seed and put on
//! stream `index`, so sample `i` is the same whether samples are generated
//! serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::channels::ChannelPair;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Subsystem, C64};
use crate::measures::{entanglement_of_formation, relative_entropy_coherence};
use crate::protocols::{
    average_fidelity, dense_coding_capacity, dense_coding_capacity_noisy, fidelity_bound_entropy,
};
use crate::states::{
    bell_state, densify, resource_state, BellKind, DensityMatrix, PureState, StateFile,
};

/// Margins below this count as violations.
pub const VIOLATION_THRESHOLD: f64 = -1e-9;

/// Fidelity reachable without entanglement.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Whether `f` is at or above the classical limit (with `1e-12` slack).
pub fn beats_classical(f: f64) -> bool {
    f >= CLASSICAL_FIDELITY - 1e-12
}

/// `2 log₂d - [χ + C_re(ρ_B)]`, or its noisy counterpart with `Λ_B(ρ_B)`.
pub fn check_theorem1(rho: &DensityMatrix, channels: Option<&ChannelPair>) -> Result<f64> {
    let (d, _) = rho.bipartite_dims()?;
    let (capacity, coherence_b) = match channels {
        None => (
            dense_coding_capacity(rho)?.capacity,
            relative_entropy_coherence(&rho.reduced(Subsystem::B)?),
        ),
        Some(pair) => {
            let cap = dense_coding_capacity_noisy(rho, pair)?.capacity;
            let out_b = pair.bob().apply(&rho.reduced(Subsystem::B)?)?;
            (cap, relative_entropy_coherence(&out_b))
        }
    };
    Ok(2.0 * (d as f64).log2() - (capacity + coherence_b))
}

/// `1 - [h-bound(F) + C_re(ρ_A)]` with `F` the circuit average fidelity;
/// `None` when the state does not beat the classical fidelity.
pub fn check_theorem2(rho: &DensityMatrix) -> Result<Option<f64>> {
    let f = average_fidelity(rho)?;
    if !beats_classical(f) {
        return Ok(None);
    }
    let coherence_a = relative_entropy_coherence(&rho.reduced(Subsystem::A)?);
    Ok(Some(
        1.0 - (fidelity_bound_entropy(f.min(1.0))? + coherence_a),
    ))
}

/// `1 - [E_F(ρ_AB) + C_re(ρ_A)]` for two qubits.
pub fn check_ef_coherence(rho: &DensityMatrix) -> Result<f64> {
    let ef = entanglement_of_formation(rho)?;
    let coherence_a = relative_entropy_coherence(&rho.reduced(Subsystem::A)?);
    Ok(1.0 - (ef + coherence_a))
}

// ---------------------------------------------------------------------------
// random states

/// ChaCha8 for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state: a normalized vector of complex Gaussians.
pub fn random_pure_with(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

pub fn sample_random_pure(dims: (usize, usize), seed: u64) -> PureState {
    random_pure_with(&mut sample_rng(seed, 0), dims.0 * dims.1)
}

/// `G G† / tr(G G†)` with `G` a `dim x rank` complex Gaussian matrix.
/// Full-rank requests re-draw until the smallest eigenvalue exceeds `1e-14`.
pub fn random_mixed_with(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::DomainError(format!(
            "rank {rank} outside [1, {dim}]"
        )));
    }
    loop {
        let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
        let gg = &g * &g.dagger();
        let tr = gg.trace().re;
        let rho = DensityMatrix::new(gg.scale_real(1.0 / tr))?;
        if rank < dim || rho.eigenvalues()[0] > 1e-14 {
            return Ok(rho);
        }
    }
}

pub fn sample_random_mixed(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_mixed_with(&mut sample_rng(seed, 0), dim, rank)
}

/// Families random two-qubit test states are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatePool {
    /// Cycles Haar pure states and Ginibre states of rank 1 to 4.
    General,
    /// `General` plus mixtures `w |Φ⁺><Φ⁺| + (1 - w) σ`, which populate the
    /// region where teleportation beats the classical limit.
    Teleportation,
}

/// Sample `index` of `pool` under `seed`, a two-qubit state.
pub fn sample_two_qubit(pool: StatePool, seed: u64, index: u64) -> Result<DensityMatrix> {
    let mut rng = sample_rng(seed, index);
    let families = match pool {
        StatePool::General => 5,
        StatePool::Teleportation => 6,
    };
    let rho = match index % families {
        0 => densify(&random_pure_with(&mut rng, 4)),
        5 => {
            let w: f64 = Uniform::new_inclusive(0.0, 1.0).unwrap().sample(&mut rng);
            let sigma = random_mixed_with(&mut rng, 4, 4)?;
            let bell = densify(&bell_state(BellKind::PhiPlus));
            let m = &bell.matrix().scale_real(w) + &sigma.matrix().scale_real(1.0 - w);
            DensityMatrix::new(m)?
        }
        rank => random_mixed_with(&mut rng, 4, rank as usize)?,
    };
    rho.tagged((2, 2))
}

// ---------------------------------------------------------------------------
// margin reports

/// Which inequality a [`MarginReport`] covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `χ + C_re(ρ_B) ≤ 2 log₂d`.
    Theorem1,
    /// `h-bound(F) + C_re(ρ_A) ≤ 1` for `F ≥ 2/3`.
    Theorem2,
    /// `E_F + C_re(ρ_A) ≤ 1`.
    EfCoherence,
}

impl Check {
    fn margin(self, rho: &DensityMatrix) -> Result<Option<f64>> {
        match self {
            Check::Theorem1 => check_theorem1(rho, None).map(Some),
            Check::Theorem2 => check_theorem2(rho),
            Check::EfCoherence => check_ef_coherence(rho).map(Some),
        }
    }

    fn pool(self) -> StatePool {
        match self {
            Check::Theorem2 => StatePool::Teleportation,
            _ => StatePool::General,
        }
    }
}

/// Aggregate of margins over many states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub check: Check,
    /// States the inequality applied to.
    pub samples: usize,
    /// States drawn, including those filtered out.
    pub draws: usize,
    pub min_margin: Option<f64>,
    pub violations: usize,
    pub worst_state: Option<StateFile>,
    pub seed: u64,
}

#[derive(Default)]
struct Tally {
    samples: usize,
    violations: usize,
    worst: Option<(f64, DensityMatrix)>,
}

impl Tally {
    fn push(&mut self, margin: f64, rho: DensityMatrix) {
        self.samples += 1;
        if margin < VIOLATION_THRESHOLD {
            self.violations += 1;
        }
        if self.worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            self.worst = Some((margin, rho));
        }
    }

    fn report(self, check: Check, draws: usize, seed: u64) -> MarginReport {
        MarginReport {
            check,
            samples: self.samples,
            draws,
            min_margin: self.worst.as_ref().map(|(m, _)| *m),
            violations: self.violations,
            worst_state: self
                .worst
                .as_ref()
                .map(|(_, rho)| StateFile::from_density(rho)),
            seed,
        }
    }
}

const CHUNK: usize = 2048;
/// Cap on draws per accepted sample for filtered checks.
const MAX_DRAWS_PER_SAMPLE: usize = 1000;

/// Runs `check` on `samples` seeded random two-qubit states. Checks that
/// filter (Theorem 2) keep drawing until `samples` states qualify.
pub fn run_margin_check(check: Check, samples: usize, seed: u64) -> Result<MarginReport> {
    let pool = check.pool();
    let max_draws = samples.saturating_mul(MAX_DRAWS_PER_SAMPLE);
    let mut tally = Tally::default();
    let mut draws = 0usize;
    while tally.samples < samples && draws < max_draws {
        let start = draws;
        let end = (start + CHUNK).min(max_draws);
        let results: Vec<(DensityMatrix, Option<f64>)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let rho = sample_two_qubit(pool, seed, i as u64)?;
                let margin = check.margin(&rho)?;
                Ok((rho, margin))
            })
            .collect::<Result<_>>()?;
        for (rho, margin) in results {
            draws += 1;
            if let Some(m) = margin {
                tally.push(m, rho);
            }
            if tally.samples == samples {
                break;
            }
        }
    }
    Ok(tally.report(check, draws, seed))
}

/// Runs `check` on explicit states.
pub fn margin_report_for_states(
    check: Check,
    states: &[DensityMatrix],
    seed: u64,
) -> Result<MarginReport> {
    let mut tally = Tally::default();
    for rho in states {
        if let Some(m) = check.margin(rho)? {
            tally.push(m, rho.clone());
        }
    }
    Ok(tally.report(check, states.len(), seed))
}

// ---------------------------------------------------------------------------
// sweeps

/// One `(θ, p)` point: resource `cos θ|Φ⁺> + sin θ|Ψ⁺>` through two-sided
/// depolarizing noise `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Absent when the record comes from an explicit state.
    pub theta: Option<f64>,
    pub p: f64,
    pub capacity: f64,
    pub coherence_b: f64,
    pub fidelity: f64,
    /// Absent when the fidelity is below 2/3.
    pub h_of_f: Option<f64>,
    pub coherence_a: f64,
    pub margin_t1: f64,
    pub margin_t2: Option<f64>,
}

/// All record fields for `rho` sent through two-sided depolarizing noise.
pub fn evaluate_state(rho: &DensityMatrix, p: f64, theta: Option<f64>) -> Result<SweepRecord> {
    let dims = rho.bipartite_dims()?;
    if dims != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "records need a two-qubit state, got {dims:?}"
        )));
    }
    let pair = ChannelPair::two_sided_depolarizing(p, 2)?;
    let noisy = pair.apply(rho)?;
    let capacity = dense_coding_capacity_noisy(rho, &pair)?.capacity;
    let coherence_b = relative_entropy_coherence(&noisy.reduced(Subsystem::B)?);
    let coherence_a = relative_entropy_coherence(&noisy.reduced(Subsystem::A)?);
    let fidelity = average_fidelity(&noisy)?;
    let h_of_f = if beats_classical(fidelity) {
        Some(fidelity_bound_entropy(fidelity.min(1.0))?)
    } else {
        None
    };
    Ok(SweepRecord {
        theta,
        p,
        capacity,
        coherence_b,
        fidelity,
        h_of_f,
        coherence_a,
        margin_t1: 2.0 - (capacity + coherence_b),
        margin_t2: h_of_f.map(|h| 1.0 - (h + coherence_a)),
    })
}

pub fn evaluate_point(theta: f64, p: f64) -> Result<SweepRecord> {
    evaluate_state(&densify(&resource_state(theta)), p, Some(theta))
}

/// `steps` uniform points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::DomainError(format!(
            "grid needs at least 2 steps, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / last)
        .collect())
}

/// Records over `θ ∈ [0, π]` × `p ∈ [0, 1]`, θ-major.
pub fn sweep(theta_steps: usize, p_steps: usize) -> Result<Vec<SweepRecord>> {
    let thetas = uniform_grid(0.0, PI, theta_steps)?;
    let ps = uniform_grid(0.0, 1.0, p_steps)?;
    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| ps.iter().map(move |&p| (t, p)))
        .collect();
    points
        .into_par_iter()
        .map(|(t, p)| evaluate_point(t, p))
        .collect()
}

/// Records over `θ ∈ [0, π]` at a single noise level.
pub fn sweep_theta(theta_steps: usize, p: f64) -> Result<Vec<SweepRecord>> {
    uniform_grid(0.0, PI, theta_steps)?
        .into_par_iter()
        .map(|t| evaluate_point(t, p))
        .collect()
}
