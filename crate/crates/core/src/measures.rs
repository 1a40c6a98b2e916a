//! Coherence and two-qubit entanglement quantifiers.

use crate::error::{Error, Result};
use crate::linalg::{eigh, partial_transpose, trace_norm_hermitian, ComplexMatrix, Subsystem};
use crate::states::{binary_entropy, shannon_entropy, von_neumann_entropy, DensityMatrix};

/// `S(ρ_diag) - S(ρ)` with the computational basis as incoherent basis.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> f64 {
    (shannon_entropy(&rho.populations()) - von_neumann_entropy(rho)).max(0.0)
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    let dims_ok = rho.subsystem_dims().is_none_or(|dims| dims == (2, 2));
    if rho.dim() != 4 || !dims_ok {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit state required, got dimension {} with subsystems {:?}",
            rho.dim(),
            rho.subsystem_dims()
        )));
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`; real in the computational basis.
fn spin_flip() -> ComplexMatrix {
    #[rustfmt::skip]
    let entries = [
         0.0, 0.0, 0.0, -1.0,
         0.0, 0.0, 1.0,  0.0,
         0.0, 1.0, 0.0,  0.0,
        -1.0, 0.0, 0.0,  0.0,
    ];
    ComplexMatrix::from_real(4, 4, &entries).unwrap()
}

/// Wootters concurrence `max(0, λ₁ - λ₂ - λ₃ - λ₄)`.
///
/// The `λ_i` (square roots of the spectrum of `ρ ρ̃`) are obtained as the
/// singular values of `τ = Wᵀ (σ_y ⊗ σ_y) W`, where `ρ = W W†` with `W` the
/// eigenvectors scaled by `√λ`. The singular values come from the Hermitian
/// dilation `[[0, τ], [τ†, 0]]`, so no square root of a near-zero eigenvalue
/// is ever taken on the final quantities.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let spectrum = eigh(rho.matrix())?;
    let v = &spectrum.eigenvectors;
    let weights: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    let w = ComplexMatrix::from_fn(4, 4, |i, k| v[(i, k)] * weights[k]);
    let tau = &(&w.transpose() * &spin_flip()) * &w;

    let tau_dag = tau.dagger();
    let dilation = ComplexMatrix::from_fn(8, 8, |i, j| match (i < 4, j < 4) {
        (true, false) => tau[(i, j - 4)],
        (false, true) => tau_dag[(i - 4, j)],
        _ => Default::default(),
    });
    let eig = eigh(&dilation)?.eigenvalues;
    let sv: Vec<f64> = eig[4..].iter().rev().map(|&x| x.max(0.0)).collect();
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0))
}

/// `max(0, ‖ρ^{T_A}‖₁ - 1)`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let pt = partial_transpose(rho.matrix(), (2, 2), Subsystem::A)?;
    Ok((trace_norm_hermitian(&pt)? - 1.0).max(0.0))
}

/// Entanglement of formation from the concurrence, in bits.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    entanglement_of_formation_from_concurrence(c)
}

/// `h((1 + √(1 - C²)) / 2)`.
pub fn entanglement_of_formation_from_concurrence(c: f64) -> Result<f64> {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}
