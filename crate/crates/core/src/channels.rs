//! Kraus channels and the shift/clock operator families.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64};
use crate::states::DensityMatrix;

/// Max-entry tolerance for `Σ K†K = I` and `Σ KK† = I`.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
///
/// Probability weights are folded into the operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(label: impl Into<String>, kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let label = label.into();
        let Some(first) = kraus_ops.first() else {
            return Err(Error::ValidationFailure(format!(
                "channel '{label}' has no Kraus operators"
            )));
        };
        let dim = first.rows();
        if kraus_ops.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of channel '{label}' must all be {dim}x{dim}"
            )));
        }
        let channel = Self {
            dim,
            kraus_ops,
            label,
        };
        let deviation = channel
            .sum_of(|k| &k.dagger() * k)
            .max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > CHANNEL_TOL {
            return Err(Error::ValidationFailure(format!(
                "channel '{}' is not trace preserving (deviation {deviation:.3e})",
                channel.label
            )));
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            kraus_ops: vec![ComplexMatrix::identity(d)],
            label: format!("identity({d})"),
        }
    }

    /// Conjugation by a single unitary.
    pub fn unitary(label: impl Into<String>, u: ComplexMatrix) -> Result<Self> {
        Self::new(label, vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn sum_of(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
        self.kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                &acc + &f(k)
            })
    }

    /// `Σ K m K†` on an arbitrary operator, without state validation.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel '{}' acts on dimension {}, operator is {}x{}",
                self.label,
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        Ok(self.sum_of(|k| k.conjugate(m)))
    }

    /// Applies the channel and revalidates the output, keeping any subsystem
    /// dimensions of the input.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.matrix())?;
        match rho.subsystem_dims() {
            Some(dims) => DensityMatrix::with_subsystems(out, dims),
            None => DensityMatrix::new(out),
        }
    }

    /// `Σ K K† = I` within [`CHANNEL_TOL`].
    pub fn is_unital(&self) -> bool {
        self.sum_of(|k| k * &k.dagger())
            .max_abs_diff(&ComplexMatrix::identity(self.dim))
            <= CHANNEL_TOL
    }
}

fn check_index(index: usize, d: usize) -> Result<()> {
    if index >= d {
        return Err(Error::IndexOutOfRange { index, dim: d });
    }
    Ok(())
}

/// Dense-coding encoding `U_{m,n}|j> = e^{2πi mj/d} |j+n mod d>`.
pub fn encoding_unitary(m: usize, n: usize, d: usize) -> Result<ComplexMatrix> {
    check_index(m, d)?;
    check_index(n, d)?;
    let mut u = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        u[((j + n) % d, j)] = C64::from_polar(1.0, 2.0 * PI * (m * j) as f64 / d as f64);
    }
    Ok(u)
}

/// `V_{μν} = Σ_k e^{2πi kν/d} |k><k+μ mod d|`.
pub fn heisenberg_weyl(mu: usize, nu: usize, d: usize) -> Result<ComplexMatrix> {
    check_index(mu, d)?;
    check_index(nu, d)?;
    let mut v = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        v[(k, (k + mu) % d)] = C64::from_polar(1.0, 2.0 * PI * (k * nu) as f64 / d as f64);
    }
    Ok(v)
}

/// Weyl-twirl depolarizing channel with weights `q_00 = 1 - (d²-1)p/d²` and
/// `q_μν = p/d²` otherwise. Zero-weight operators are dropped.
pub fn depolarizing_channel(p: f64, d: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!(
            "depolarizing parameter {p} outside [0, 1]"
        )));
    }
    if d == 0 {
        return Err(Error::DomainError("dimension must be positive".into()));
    }
    let d2 = (d * d) as f64;
    let mut ops = Vec::with_capacity(d * d);
    for mu in 0..d {
        for nu in 0..d {
            let q = if mu == 0 && nu == 0 {
                1.0 - (d2 - 1.0) * p / d2
            } else {
                p / d2
            };
            if q > 0.0 {
                ops.push(heisenberg_weyl(mu, nu, d)?.scale_real(q.sqrt()));
            }
        }
    }
    KrausChannel::new(format!("depolarizing(p={p}, d={d})"), ops)
}

/// `Λ_A ⊗ Λ_B` with Kraus operators `K_i ⊗ L_j`.
pub fn tensor_channel(lambda_a: &KrausChannel, lambda_b: &KrausChannel) -> KrausChannel {
    let ops = lambda_a
        .kraus_ops
        .iter()
        .flat_map(|k| lambda_b.kraus_ops.iter().map(move |l| kron(k, l)))
        .collect();
    KrausChannel {
        dim: lambda_a.dim * lambda_b.dim,
        kraus_ops: ops,
        label: format!("{} ⊗ {}", lambda_a.label, lambda_b.label),
    }
}

/// Local channels on the two halves of a bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    alice: KrausChannel,
    bob: KrausChannel,
    joint: KrausChannel,
}

impl ChannelPair {
    pub fn new(alice: KrausChannel, bob: KrausChannel) -> Self {
        let joint = tensor_channel(&alice, &bob);
        Self { alice, bob, joint }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(KrausChannel::identity(d), KrausChannel::identity(d))
    }

    /// Depolarizing noise with the same `p` on both sides.
    pub fn two_sided_depolarizing(p: f64, d: usize) -> Result<Self> {
        let side = depolarizing_channel(p, d)?;
        Ok(Self::new(side.clone(), side))
    }

    pub fn alice(&self) -> &KrausChannel {
        &self.alice
    }

    pub fn bob(&self) -> &KrausChannel {
        &self.bob
    }

    pub fn joint(&self) -> &KrausChannel {
        &self.joint
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.alice.dim, self.bob.dim)
    }

    pub fn is_unital(&self) -> bool {
        self.alice.is_unital() && self.bob.is_unital()
    }

    /// `(Λ_A ⊗ Λ_B)(ρ)`, tagged with the pair's subsystem dimensions.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.joint.apply_operator(rho.matrix())?;
        DensityMatrix::with_subsystems(out, self.dims())
    }
}
