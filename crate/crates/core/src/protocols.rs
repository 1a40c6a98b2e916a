//! Dense coding and teleportation.
//!
//! Dense coding uses the `d²` equiprobable encodings `U_{m,n} ⊗ I` on
//! Alice's half. Noisy dense coding sends B through `Λ_B` before encoding
//! and A through `Λ_A` after it; the joint action is `Λ_A ⊗ Λ_B` on every
//! encoded signal.
//!
//! Teleportation runs on three qubits `(a, A, B)`, `a` being the most
//! significant index: the unknown qubit `a`, and the resource pair `A`, `B`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::channels::{encoding_unitary, ChannelPair};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, ComplexMatrix, Subsystem, C64};
use crate::states::{
    binary_entropy, bloch_pure_state, overlap, von_neumann_entropy, DensityMatrix,
};

/// Largest allowed spread (bits) of signal-state entropies across encodings
/// before the closed-form noisy capacity is refused.
pub const COVARIANCE_TOL: f64 = 1e-8;

/// Terms of `χ = S(ρ̄) - S(signal)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    pub capacity: f64,
    pub entropy_avg_state: f64,
    pub entropy_signal: f64,
    pub log2_d: f64,
}

impl CapacityBreakdown {
    fn new(log2_d: f64, entropy_avg_state: f64, entropy_signal: f64) -> Self {
        Self {
            capacity: entropy_avg_state - entropy_signal,
            entropy_avg_state,
            entropy_signal,
            log2_d,
        }
    }
}

/// Local dimension `d` of a `d x d` state, checked against `channels`.
fn local_dim(rho: &DensityMatrix, channels: Option<&ChannelPair>) -> Result<usize> {
    let (da, db) = rho.bipartite_dims()?;
    if da != db {
        return Err(Error::DimensionMismatch(format!(
            "dense coding needs equal local dimensions, got ({da}, {db})"
        )));
    }
    if let Some(pair) = channels {
        if pair.dims() != (da, db) {
            return Err(Error::DimensionMismatch(format!(
                "channels act on {:?}, state on ({da}, {db})",
                pair.dims()
            )));
        }
    }
    Ok(da)
}

/// All `d²` encoded signal states, after the channels when given.
fn signal_states(
    rho: &DensityMatrix,
    channels: Option<&ChannelPair>,
) -> Result<Vec<ComplexMatrix>> {
    let d = local_dim(rho, channels)?;
    let id = ComplexMatrix::identity(d);
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let u = kron(&encoding_unitary(m, n, d)?, &id);
            let encoded = u.conjugate(rho.matrix());
            out.push(match channels {
                Some(pair) => pair.joint().apply_operator(&encoded)?,
                None => encoded,
            });
        }
    }
    Ok(out)
}

fn entropy_of_operator(m: ComplexMatrix) -> Result<f64> {
    Ok(von_neumann_entropy(&DensityMatrix::new(m)?))
}

/// Brute-force average `(1/d²) Σ Λ[(U_{m,n} ⊗ I) ρ (U_{m,n}† ⊗ I)]`.
pub fn ensemble_average_state(
    rho: &DensityMatrix,
    channels: Option<&ChannelPair>,
) -> Result<DensityMatrix> {
    let d = local_dim(rho, channels)?;
    let signals = signal_states(rho, channels)?;
    let sum = signals
        .iter()
        .fold(ComplexMatrix::zeros(d * d, d * d), |acc, s| &acc + s);
    DensityMatrix::with_subsystems(sum.scale_real(1.0 / (d * d) as f64), (d, d))
}

/// Noiseless capacity `log₂d + S(ρ_B) - S(ρ_AB)`.
pub fn dense_coding_capacity(rho: &DensityMatrix) -> Result<CapacityBreakdown> {
    let d = local_dim(rho, None)?;
    let log2_d = (d as f64).log2();
    let s_b = von_neumann_entropy(&rho.reduced(Subsystem::B)?);
    Ok(CapacityBreakdown::new(
        log2_d,
        log2_d + s_b,
        von_neumann_entropy(rho),
    ))
}

/// Capacity through unital local noise, `log₂d + S(Λ_B(ρ_B)) - S(Λ_AB(ρ_AB))`.
///
/// Refuses non-unital channels and states whose output entropy depends on
/// the encoding by more than [`COVARIANCE_TOL`].
pub fn dense_coding_capacity_noisy(
    rho: &DensityMatrix,
    channels: &ChannelPair,
) -> Result<CapacityBreakdown> {
    let d = local_dim(rho, Some(channels))?;
    for side in [channels.alice(), channels.bob()] {
        if !side.is_unital() {
            return Err(Error::NotUnital(side.label().to_string()));
        }
    }
    let spread = verify_entropy_covariance(rho, channels)?;
    if spread > COVARIANCE_TOL {
        return Err(Error::CovarianceViolation { spread });
    }
    let log2_d = (d as f64).log2();
    let out = channels.apply(rho)?;
    let s_b = von_neumann_entropy(&channels.bob().apply(&rho.reduced(Subsystem::B)?)?);
    Ok(CapacityBreakdown::new(
        log2_d,
        log2_d + s_b,
        von_neumann_entropy(&out),
    ))
}

/// Spread `max - min` of `S(Λ_AB(ρ_{m,n}))` over all encodings.
pub fn verify_entropy_covariance(rho: &DensityMatrix, channels: &ChannelPair) -> Result<f64> {
    let entropies = signal_states(rho, Some(channels))?
        .into_iter()
        .map(entropy_of_operator)
        .collect::<Result<Vec<_>>>()?;
    let max = entropies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = entropies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Holevo quantity of the equiprobable `U_{m,n}` ensemble, computed from
/// every signal state.
pub fn holevo_from_ensemble(rho: &DensityMatrix, channels: Option<&ChannelPair>) -> Result<f64> {
    let signals = signal_states(rho, channels)?;
    let count = signals.len() as f64;
    let n = rho.dim();
    let avg = signals
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, s| &acc + s)
        .scale_real(1.0 / count);
    let mean_signal_entropy = signals
        .into_iter()
        .map(entropy_of_operator)
        .sum::<Result<f64>>()?
        / count;
    Ok(entropy_of_operator(avg)? - mean_signal_entropy)
}

// ---------------------------------------------------------------------------
// teleportation

const WIRE_A_IN: usize = 4;
const WIRE_A_RES: usize = 2;
const WIRE_B: usize = 1;

fn controlled_x(control: usize, target: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |row, col| {
        let image = if col & control != 0 {
            col ^ target
        } else {
            col
        };
        C64::new(if row == image { 1.0 } else { 0.0 }, 0.0)
    })
}

fn controlled_z(control: usize, target: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |row, col| {
        if row != col {
            C64::new(0.0, 0.0)
        } else if col & control != 0 && col & target != 0 {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    })
}

fn hadamard_on_input() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real(2, 2, &[r, r, r, -r]).unwrap();
    kron(&h, &ComplexMatrix::identity(4))
}

/// `U_t = CZ(a→B) · CX(A→B) · H(a) · CX(a→A)`, rightmost gate first.
pub fn teleportation_unitary() -> &'static ComplexMatrix {
    static UT: OnceLock<ComplexMatrix> = OnceLock::new();
    UT.get_or_init(|| {
        let gates = [
            controlled_x(WIRE_A_IN, WIRE_A_RES),
            hadamard_on_input(),
            controlled_x(WIRE_A_RES, WIRE_B),
            controlled_z(WIRE_A_IN, WIRE_B),
        ];
        gates
            .iter()
            .fold(ComplexMatrix::identity(8), |acc, g| g * &acc)
    })
}

fn check_resource(resource: &DensityMatrix) -> Result<()> {
    if resource.dim() != 4 || resource.subsystem_dims().is_some_and(|d| d != (2, 2)) {
        return Err(Error::DimensionMismatch(format!(
            "teleportation needs a two-qubit resource, got dimension {}",
            resource.dim()
        )));
    }
    Ok(())
}

/// Runs the circuit on `input ⊗ resource` and traces out `a` and `A`.
fn circuit_on(input: &ComplexMatrix, resource: &DensityMatrix) -> Result<ComplexMatrix> {
    let joint = kron(input, resource.matrix());
    let evolved = teleportation_unitary().conjugate(&joint);
    partial_trace(&evolved, (4, 2), Subsystem::B)
}

/// Bob's qubit after teleporting the Bloch state `(α, β)`.
pub fn teleport_output(resource: &DensityMatrix, alpha: f64, beta: f64) -> Result<DensityMatrix> {
    check_resource(resource)?;
    let psi = bloch_pure_state(alpha, beta);
    let input = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
    DensityMatrix::new(circuit_on(&input, resource)?)
}

/// `<ψ|ρ_out|ψ>` for the Bloch state `(α, β)`.
pub fn teleportation_fidelity_point(
    resource: &DensityMatrix,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let out = teleport_output(resource, alpha, beta)?;
    overlap(&bloch_pure_state(alpha, beta), &out)
}

/// The circuit as a linear map on the input qubit: `blocks[i][j]` is the
/// output for the input operator `|i><j|`.
struct TeleportMap {
    blocks: [[ComplexMatrix; 2]; 2],
}

impl TeleportMap {
    fn new(resource: &DensityMatrix) -> Result<Self> {
        check_resource(resource)?;
        let unit = |i: usize, j: usize| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(i, j)] = C64::new(1.0, 0.0);
            circuit_on(&m, resource)
        };
        Ok(Self {
            blocks: [[unit(0, 0)?, unit(0, 1)?], [unit(1, 0)?, unit(1, 1)?]],
        })
    }

    fn fidelity(&self, alpha: f64, beta: f64) -> f64 {
        let psi = bloch_pure_state(alpha, beta);
        let amp = psi.amplitudes();
        let mut f = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                let coeff = amp[i] * amp[j].conj();
                let block = &self.blocks[i][j];
                for k in 0..2 {
                    for l in 0..2 {
                        f += amp[k].conj() * coeff * block[(k, l)] * amp[l];
                    }
                }
            }
        }
        f.re
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Node counts for the Bloch-sphere average: Gauss–Legendre in the polar
/// angle and the periodic trapezoid rule in the azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub alpha_nodes: usize,
    pub beta_nodes: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            alpha_nodes: 32,
            beta_nodes: 32,
        }
    }
}

/// `(1/4π) ∫dβ ∫ sin α F(α, β) dα` with the default rule.
pub fn average_fidelity(resource: &DensityMatrix) -> Result<f64> {
    average_fidelity_with(resource, QuadratureRule::default())
}

pub fn average_fidelity_with(resource: &DensityMatrix, rule: QuadratureRule) -> Result<f64> {
    let map = TeleportMap::new(resource)?;
    let (x, w) = gauss_legendre(rule.alpha_nodes);
    let beta_step = 2.0 * PI / rule.beta_nodes as f64;
    let mut total = 0.0;
    for j in 0..rule.beta_nodes {
        let beta = beta_step * j as f64;
        for (xk, wk) in x.iter().zip(&w) {
            let alpha = PI / 2.0 * (xk + 1.0);
            total += wk * PI / 2.0 * alpha.sin() * map.fidelity(alpha, beta);
        }
    }
    Ok(total * beta_step / (4.0 * PI))
}

/// Average fidelity of the circuit on `cos θ|Φ⁺> + sin θ|Ψ⁺>` after two-sided
/// depolarizing noise `p`: `(1/6)[4 + (p - 2)p + 2(1 - p)² cos 2θ]`.
pub fn fidelity_closed_form(theta: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!(
            "noise parameter {p} outside [0, 1]"
        )));
    }
    Ok((4.0 + (p - 2.0) * p + 2.0 * (1.0 - p).powi(2) * (2.0 * theta).cos()) / 6.0)
}

/// `h((1 + √(1 - (3F - 2)²)) / 2)` for `F ∈ [2/3, 1]`.
pub fn fidelity_bound_entropy(f: f64) -> Result<f64> {
    if !(2.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&f) {
        return Err(Error::DomainError(format!("fidelity {f} outside [2/3, 1]")));
    }
    let x = (3.0 * f - 2.0).clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - x * x).sqrt()) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing_channel, KrausChannel};
    use crate::states::{bell_state, densify, resource_state, BellKind};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn bell() -> DensityMatrix {
        densify(&bell_state(BellKind::PhiPlus))
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 32, 64] {
            let (x, w) = gauss_legendre(n);
            close(w.iter().sum::<f64>(), 2.0, 1e-13);
            // exact up to degree 2n - 1
            let even = 2 * n as i32 - 2;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(even)).sum();
            close(integral, 2.0 / (even + 1) as f64, 1e-13);
            let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(even + 1)).sum();
            close(odd, 0.0, 1e-13);
        }
        let (x, _) = gauss_legendre(3);
        close(x[2], (0.6f64).sqrt(), 1e-15);
    }

    #[test]
    fn unitary_is_unitary_and_circuit_is_deterministic() {
        let u = teleportation_unitary();
        assert!((&u.dagger() * u).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
    }

    #[test]
    fn bell_resource_teleports_perfectly() {
        for i in 0..7 {
            for j in 0..7 {
                let (alpha, beta) = (0.45 * i as f64, 0.9 * j as f64);
                let out = teleport_output(&bell(), alpha, beta).unwrap();
                let psi = bloch_pure_state(alpha, beta);
                let target = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
                assert!(out.matrix().max_abs_diff(&target) < 1e-14);
                close(
                    teleportation_fidelity_point(&bell(), alpha, beta).unwrap(),
                    1.0,
                    1e-14,
                );
            }
        }
    }

    #[test]
    fn mixed_resource_erases_input() {
        let mixed = DensityMatrix::maximally_mixed(4);
        for (alpha, beta) in [(0.1, 0.2), (1.5, 4.0), (3.0, 6.0)] {
            let out = teleport_output(&mixed, alpha, beta).unwrap();
            assert!(
                out.matrix()
                    .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                    < 1e-15
            );
            close(
                teleportation_fidelity_point(&mixed, alpha, beta).unwrap(),
                0.5,
                1e-15,
            );
        }
        close(average_fidelity(&mixed).unwrap(), 0.5, 1e-9);
        close(average_fidelity(&bell()).unwrap(), 1.0, 1e-9);
    }

    #[test]
    fn transfer_map_matches_direct_circuit() {
        let resource = ChannelPair::two_sided_depolarizing(0.35, 2)
            .unwrap()
            .apply(&densify(&resource_state(0.9)))
            .unwrap();
        let map = TeleportMap::new(&resource).unwrap();
        for (alpha, beta) in [(0.3, 0.1), (1.2, 2.2), (2.9, 5.5)] {
            close(
                map.fidelity(alpha, beta),
                teleportation_fidelity_point(&resource, alpha, beta).unwrap(),
                1e-14,
            );
        }
    }

    #[test]
    fn closed_form_anchors_and_quadrature() {
        close(fidelity_closed_form(0.0, 0.0).unwrap(), 1.0, 1e-15);
        close(
            fidelity_closed_form(FRAC_PI_4, 0.0).unwrap(),
            2.0 / 3.0,
            1e-15,
        );
        close(
            fidelity_closed_form(FRAC_PI_2, 0.0).unwrap(),
            1.0 / 3.0,
            1e-15,
        );
        assert!(fidelity_closed_form(0.0, 1.2).is_err());
        for (theta, p) in [(0.0, 0.0), (0.3, 0.2), (1.1, 0.9), (2.5, 0.5)] {
            let resource = ChannelPair::two_sided_depolarizing(p, 2)
                .unwrap()
                .apply(&densify(&resource_state(theta)))
                .unwrap();
            close(
                average_fidelity(&resource).unwrap(),
                fidelity_closed_form(theta, p).unwrap(),
                1e-9,
            );
        }
    }

    #[test]
    fn quadrature_is_converged() {
        let resource = densify(&resource_state(0.77));
        let base = average_fidelity(&resource).unwrap();
        let doubled = average_fidelity_with(
            &resource,
            QuadratureRule {
                alpha_nodes: 64,
                beta_nodes: 64,
            },
        )
        .unwrap();
        close(base, doubled, 1e-10);
    }

    #[test]
    fn fidelity_bound_entropy_values() {
        close(fidelity_bound_entropy(1.0).unwrap(), 1.0, 1e-15);
        close(fidelity_bound_entropy(2.0 / 3.0).unwrap(), 0.0, 1e-15);
        let expected = binary_entropy((1.0 + 3f64.sqrt() / 2.0) / 2.0).unwrap();
        close(fidelity_bound_entropy(5.0 / 6.0).unwrap(), expected, 1e-15);
        assert!(fidelity_bound_entropy(0.6).is_err());
        assert!(fidelity_bound_entropy(1.01).is_err());
    }

    #[test]
    fn noiseless_capacity_values() {
        close(dense_coding_capacity(&bell()).unwrap().capacity, 2.0, 1e-12);
        close(
            dense_coding_capacity(&densify(&resource_state(FRAC_PI_4)))
                .unwrap()
                .capacity,
            1.0,
            1e-12,
        );
        for k in 0..=30 {
            let theta = PI * k as f64 / 30.0;
            let rho = densify(&resource_state(theta));
            let cap = dense_coding_capacity(&rho).unwrap();
            let expected = 1.0 + binary_entropy((1.0 + (2.0 * theta).sin().abs()) / 2.0).unwrap();
            close(cap.capacity, expected, 1e-12);
            close(
                cap.capacity,
                cap.entropy_avg_state - cap.entropy_signal,
                1e-12,
            );
            close(
                holevo_from_ensemble(&rho, None).unwrap(),
                cap.capacity,
                1e-10,
            );
        }
    }

    #[test]
    fn ensemble_average_closed_forms() {
        let rho = densify(&resource_state(0.6));
        let avg = ensemble_average_state(&rho, None).unwrap();
        let rho_b = rho.reduced(Subsystem::B).unwrap();
        let expected = kron(&ComplexMatrix::identity(2), rho_b.matrix()).scale_real(0.5);
        assert!(avg.matrix().max_abs_diff(&expected) < 1e-12);
        close(avg.matrix().trace().re, 1.0, 1e-14);

        let pair = ChannelPair::two_sided_depolarizing(0.4, 2).unwrap();
        let avg = ensemble_average_state(&rho, Some(&pair)).unwrap();
        let lb = pair.bob().apply(&rho_b).unwrap();
        let expected = kron(&ComplexMatrix::identity(2), lb.matrix()).scale_real(0.5);
        assert!(avg.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn noisy_capacity_limits() {
        let rho = densify(&resource_state(0.4));
        let clean = dense_coding_capacity(&rho).unwrap();
        let p0 = ChannelPair::two_sided_depolarizing(0.0, 2).unwrap();
        close(
            dense_coding_capacity_noisy(&rho, &p0).unwrap().capacity,
            clean.capacity,
            1e-12,
        );
        let p1 = ChannelPair::two_sided_depolarizing(1.0, 2).unwrap();
        close(
            dense_coding_capacity_noisy(&bell(), &p1).unwrap().capacity,
            0.0,
            1e-12,
        );

        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let pair = ChannelPair::two_sided_depolarizing(k as f64 / 20.0, 2).unwrap();
            let cap = dense_coding_capacity_noisy(&bell(), &pair)
                .unwrap()
                .capacity;
            assert!(cap < last + 1e-12);
            last = cap;
        }
    }

    #[test]
    fn noisy_capacity_rejects_non_unital() {
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let reset = KrausChannel::new("reset", vec![k0, k1]).unwrap();
        let pair = ChannelPair::new(KrausChannel::identity(2), reset);
        assert!(matches!(
            dense_coding_capacity_noisy(&bell(), &pair),
            Err(Error::NotUnital(_))
        ));
    }

    #[test]
    fn noisy_capacity_rejects_encoding_dependent_entropy() {
        // A random rotation kick on A is unital but does not commute with
        // the shift/phase encodings.
        let q = 0.3f64;
        let (s, c) = 0.45f64.sin_cos();
        let phase = C64::from_polar(1.0, 0.4);
        let w = ComplexMatrix::new(
            2,
            2,
            vec![phase * c, -phase * s, phase.conj() * s, phase.conj() * c],
        )
        .unwrap();
        let kick = KrausChannel::new(
            "rotation-kick",
            vec![
                ComplexMatrix::identity(2).scale_real((1.0 - q).sqrt()),
                w.scale_real(q.sqrt()),
            ],
        )
        .unwrap();
        assert!(kick.is_unital());
        let pair = ChannelPair::new(kick, KrausChannel::identity(2));
        let psi = crate::states::PureState::normalized(vec![
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.2),
            C64::new(0.1, -0.3),
            C64::new(0.7, 0.1),
        ])
        .unwrap();
        let rho = densify(&psi);
        let spread = verify_entropy_covariance(&rho, &pair).unwrap();
        assert!(spread > COVARIANCE_TOL);
        assert!(matches!(
            dense_coding_capacity_noisy(&rho, &pair),
            Err(Error::CovarianceViolation { .. })
        ));
    }

    #[test]
    fn covariance_spread_small_for_depolarizing_and_identity() {
        let rho = densify(&resource_state(1.1));
        close(
            verify_entropy_covariance(&rho, &ChannelPair::identity(2)).unwrap(),
            0.0,
            1e-12,
        );
        for k in 0..=10 {
            let theta = PI * k as f64 / 10.0;
            for j in 0..=5 {
                let pair = ChannelPair::two_sided_depolarizing(j as f64 / 5.0, 2).unwrap();
                let rho = densify(&resource_state(theta));
                assert!(verify_entropy_covariance(&rho, &pair).unwrap() <= 1e-10);
                let cap = dense_coding_capacity_noisy(&rho, &pair).unwrap();
                close(
                    holevo_from_ensemble(&rho, Some(&pair)).unwrap(),
                    cap.capacity,
                    1e-10,
                );
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let qubit = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            dense_coding_capacity(&qubit),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(teleport_output(&DensityMatrix::maximally_mixed(9), 0.0, 0.0).is_err());
        let pair = ChannelPair::two_sided_depolarizing(0.1, 3).unwrap();
        assert!(ensemble_average_state(&bell(), Some(&pair)).is_err());
        let side = depolarizing_channel(0.1, 2).unwrap();
        let asym = DensityMatrix::maximally_mixed(6).tagged((2, 3)).unwrap();
        assert!(dense_coding_capacity(&asym).is_err());
        assert!(side.is_unital());
    }
}
