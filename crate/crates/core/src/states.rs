//! Validated quantum states, named constructors and entropies.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, kron, kron_vec, ComplexMatrix, Subsystem, C64};

/// Tolerance for Hermiticity, unit trace and positivity of density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance on the norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose Euclidean norm is within `1e-12` of one.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::ValidationFailure(format!(
                "state vector has norm {norm}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DomainError("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite operator, validated once at
/// construction. The spectrum computed during validation is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    subsystem_dims: Option<(usize, usize)>,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::validate(mat, None)
    }

    pub fn with_subsystems(mat: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        Self::validate(mat, Some(dims))
    }

    fn validate(mat: ComplexMatrix, dims: Option<(usize, usize)>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if let Some((da, db)) = dims {
            if da * db != mat.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem dims ({da}, {db}) do not match dimension {}",
                    mat.rows()
                )));
            }
        }
        let deviation = mat.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::ValidationFailure(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::ValidationFailure(format!(
                "trace is {}{:+}i",
                tr.re, tr.im
            )));
        }
        let mat = mat.hermitian_part();
        let eigenvalues = eigh(&mat)?.eigenvalues;
        if let Some(&min) = eigenvalues.first() {
            if min < -STATE_TOL {
                return Err(Error::ValidationFailure(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self {
            mat,
            subsystem_dims: dims,
            eigenvalues,
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            subsystem_dims: None,
            eigenvalues: vec![1.0 / d as f64; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn subsystem_dims(&self) -> Option<(usize, usize)> {
        self.subsystem_dims
    }

    /// Ascending eigenvalues as computed at validation (unclamped).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Declared subsystem dimensions, or `(d, d)` when the dimension is a
    /// perfect square `d²` and nothing was declared.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if let Some(dims) = self.subsystem_dims {
            return Ok(dims);
        }
        let n = self.dim();
        let d = (n as f64).sqrt().round() as usize;
        if d >= 2 && d * d == n {
            Ok((d, d))
        } else {
            Err(Error::DimensionMismatch(format!(
                "dimension {n} is not a bipartite d x d system"
            )))
        }
    }

    /// Same operator tagged with subsystem dimensions.
    pub fn tagged(mut self, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dims ({}, {}) do not match dimension {}",
                dims.0,
                dims.1,
                self.dim()
            )));
        }
        self.subsystem_dims = Some(dims);
        Ok(self)
    }

    /// Reduced state of the `keep` factor.
    pub fn reduced(&self, keep: Subsystem) -> Result<DensityMatrix> {
        let dims = self.bipartite_dims()?;
        DensityMatrix::new(linalg::partial_trace(&self.mat, dims, keep)?)
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::with_subsystems(kron(&self.mat, &other.mat), (self.dim(), other.dim()))
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Real diagonal in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }
}

/// On-disk form of a density matrix: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    #[serde(default)]
    pub subsystem_dims: Option<[usize; 2]>,
    pub entries: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            subsystem_dims: rho.subsystem_dims().map(|(a, b)| [a, b]),
            entries: rho
                .matrix()
                .as_slice()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let mat = ComplexMatrix::new(self.dim, self.dim, data)?;
        match self.subsystem_dims {
            Some([a, b]) => DensityMatrix::with_subsystems(mat, (a, b)),
            None => DensityMatrix::new(mat),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

fn real_state(amps: [f64; 4]) -> PureState {
    PureState {
        amplitudes: amps.iter().map(|&x| C64::new(x, 0.0)).collect(),
    }
}

pub fn bell_state(kind: BellKind) -> PureState {
    let r = FRAC_1_SQRT_2;
    match kind {
        BellKind::PhiPlus => real_state([r, 0.0, 0.0, r]),
        BellKind::PhiMinus => real_state([r, 0.0, 0.0, -r]),
        BellKind::PsiPlus => real_state([0.0, r, r, 0.0]),
        BellKind::PsiMinus => real_state([0.0, r, -r, 0.0]),
    }
}

/// `cos θ |Φ⁺> + sin θ |Ψ⁺>`.
pub fn resource_state(theta: f64) -> PureState {
    let (s, c) = theta.sin_cos();
    let r = FRAC_1_SQRT_2;
    PureState::normalized(
        [c * r, s * r, s * r, c * r]
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect(),
    )
    .expect("cos²θ + sin²θ = 1")
}

/// `cos(α/2) e^{iβ/2} |0> + sin(α/2) e^{-iβ/2} |1>`.
pub fn bloch_pure_state(alpha: f64, beta: f64) -> PureState {
    let half_beta = C64::from_polar(1.0, beta / 2.0);
    PureState {
        amplitudes: vec![
            half_beta * (alpha / 2.0).cos(),
            half_beta.conj() * (alpha / 2.0).sin(),
        ],
    }
}

/// `|ψ><ψ|`.
pub fn densify(psi: &PureState) -> DensityMatrix {
    let amps = psi.amplitudes();
    DensityMatrix::new(ComplexMatrix::outer(amps, amps))
        .expect("projector onto a normalized vector is a valid state")
}

/// Shannon entropy in bits with `0 log 0 = 0`; entries clamped to `[0, 1]`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `-tr(ρ log₂ ρ)`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.eigenvalues())
}

/// `h(x) = -x log₂ x - (1-x) log₂(1-x)`; inputs within `1e-12` outside
/// `[0, 1]` are clamped.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) || x.is_nan() {
        return Err(Error::DomainError(format!("binary entropy of {x}")));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(shannon_entropy(&[x, 1.0 - x]))
}

/// `<ψ|ρ|ψ>`.
pub fn overlap(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} against operator of dimension {}",
            psi.dim(),
            rho.dim()
        )));
    }
    let rho_psi = rho.matrix().mul_vec(psi.amplitudes());
    let value: C64 = psi
        .amplitudes()
        .iter()
        .zip(&rho_psi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn assert_state_close(a: &PureState, b: &PureState, tol: f64) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() <= tol, "{a:?} vs {b:?}");
        }
    }

    /// Fidelity |<a|b>|², insensitive to global phase.
    fn same_ray(a: &PureState, b: &PureState) -> bool {
        (a.inner(b).norm_sqr() - 1.0).abs() < 1e-12
    }

    #[test]
    fn bell_vectors() {
        let r = FRAC_1_SQRT_2;
        let phi = bell_state(BellKind::PhiPlus);
        let psi = bell_state(BellKind::PsiPlus);
        assert_eq!(phi, real_state([r, 0.0, 0.0, r]));
        assert_eq!(psi, real_state([0.0, r, r, 0.0]));
        assert_eq!(phi.inner(&psi), C64::new(0.0, 0.0));
        let all = [
            BellKind::PhiPlus,
            BellKind::PhiMinus,
            BellKind::PsiPlus,
            BellKind::PsiMinus,
        ];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let ip = bell_state(*a).inner(&bell_state(*b)).norm();
                assert_close(ip, if i == j { 1.0 } else { 0.0 }, 1e-15);
            }
        }
    }

    #[test]
    fn resource_state_endpoints() {
        assert_state_close(&resource_state(0.0), &bell_state(BellKind::PhiPlus), 1e-15);
        assert_state_close(
            &resource_state(FRAC_PI_2),
            &bell_state(BellKind::PsiPlus),
            1e-15,
        );
        let plus = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_state_close(&resource_state(FRAC_PI_4), &plus.kron(&plus), 1e-15);
        for k in 0..50 {
            let theta = -3.0 + 0.17 * k as f64;
            assert_close(norm(resource_state(theta).amplitudes()), 1.0, 1e-14);
        }
    }

    #[test]
    fn bloch_states() {
        let zero = real_state([1.0, 0.0, 0.0, 0.0]);
        let zero = PureState::new(zero.amplitudes()[..2].to_vec()).unwrap();
        let one = PureState::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(same_ray(&bloch_pure_state(0.0, 1.3), &zero));
        assert!(same_ray(&bloch_pure_state(PI, 0.4), &one));
        let plus = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_state_close(&bloch_pure_state(FRAC_PI_2, 0.0), &plus, 1e-15);
    }

    #[test]
    fn densify_cases() {
        let zero = PureState::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert_eq!(
            densify(&zero).matrix(),
            &ComplexMatrix::from_diagonal(&[1.0, 0.0])
        );
        let bell = densify(&bell_state(BellKind::PhiPlus));
        assert_close(bell.matrix().trace().re, 1.0, 1e-15);
        assert_close(bell.purity(), 1.0, 1e-15);
        assert_close(*bell.eigenvalues().last().unwrap(), 1.0, 1e-14);
    }

    #[test]
    fn entropy_values() {
        assert_close(
            von_neumann_entropy(&densify(&bell_state(BellKind::PsiMinus))),
            0.0,
            1e-13,
        );
        assert_close(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(2)),
            1.0,
            1e-15,
        );
        assert_close(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(4)),
            2.0,
            1e-15,
        );
    }

    #[test]
    fn reduced_resource_state_entropy_closed_form() {
        for k in 0..=40 {
            let theta = PI * k as f64 / 40.0;
            let rho_b = densify(&resource_state(theta))
                .reduced(Subsystem::B)
                .unwrap();
            let s2t = (2.0 * theta).sin();
            let expected =
                ComplexMatrix::from_real(2, 2, &[0.5, s2t / 2.0, s2t / 2.0, 0.5]).unwrap();
            assert!(rho_b.matrix().max_abs_diff(&expected) < 1e-15);
            let h = binary_entropy((1.0 + s2t.abs()) / 2.0).unwrap();
            assert_close(von_neumann_entropy(&rho_b), h, 1e-12);
        }
    }

    #[test]
    fn binary_entropy_cases() {
        assert_close(binary_entropy(0.5).unwrap(), 1.0, 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(-1e-13).unwrap(), 0.0);
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            assert_close(
                binary_entropy(x).unwrap(),
                binary_entropy(1.0 - x).unwrap(),
                1e-15,
            );
        }
        assert!(matches!(binary_entropy(1.01), Err(Error::DomainError(_))));
        assert!(matches!(binary_entropy(-0.2), Err(Error::DomainError(_))));
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn overlap_cases() {
        let psi = bloch_pure_state(1.1, 0.3);
        assert_close(overlap(&psi, &densify(&psi)).unwrap(), 1.0, 1e-15);
        let zero = bloch_pure_state(0.0, 0.0);
        let one = densify(&bloch_pure_state(PI, 0.0));
        assert_close(overlap(&zero, &one).unwrap(), 0.0, 1e-15);
        assert_close(
            overlap(&psi, &DensityMatrix::maximally_mixed(2)).unwrap(),
            0.5,
            1e-15,
        );
        assert!(matches!(
            overlap(&psi, &DensityMatrix::maximally_mixed(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let not_unit = ComplexMatrix::from_diagonal(&[0.5, 0.4]);
        assert!(matches!(
            DensityMatrix::new(not_unit),
            Err(Error::ValidationFailure(_))
        ));
        let negative = ComplexMatrix::from_diagonal(&[1.2, -0.2]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::ValidationFailure(_))
        ));
        let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, -0.1, 0.5]).unwrap();
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::ValidationFailure(_))
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            DensityMatrix::new(rect),
            Err(Error::DimensionMismatch(_))
        ));
        let tiny_negative = ComplexMatrix::from_diagonal(&[1.0 + 5e-11, -5e-11]);
        assert!(DensityMatrix::new(tiny_negative).is_ok());
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)]).is_err());
    }

    #[test]
    fn state_file_round_trip_and_rejection() {
        let rho = densify(&bloch_pure_state(0.4, 2.0))
            .kron(&DensityMatrix::maximally_mixed(2))
            .unwrap();
        let file = StateFile::from_density(&rho);
        assert_eq!(file.subsystem_dims, Some([2, 2]));
        let json = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        let back = back.to_density().unwrap();
        assert_eq!(back.subsystem_dims(), Some((2, 2)));
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let bad = StateFile {
            dim: 2,
            subsystem_dims: None,
            entries: vec![[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7, 0.0]],
        };
        assert!(matches!(bad.to_density(), Err(Error::ValidationFailure(_))));
        let short = StateFile {
            dim: 2,
            subsystem_dims: None,
            entries: vec![[1.0, 0.0]],
        };
        assert!(matches!(
            short.to_density(),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bipartite_dims_inference() {
        assert_eq!(
            DensityMatrix::maximally_mixed(4).bipartite_dims().unwrap(),
            (2, 2)
        );
        assert_eq!(
            DensityMatrix::maximally_mixed(9).bipartite_dims().unwrap(),
            (3, 3)
        );
        assert!(DensityMatrix::maximally_mixed(6).bipartite_dims().is_err());
        let tagged = DensityMatrix::maximally_mixed(6).tagged((2, 3)).unwrap();
        assert_eq!(tagged.bipartite_dims().unwrap(), (2, 3));
    }
}
