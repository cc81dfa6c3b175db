//! Von Neumann entropy, quantum relative entropy and mutual information, all
//! in bits.

use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{self, BipartiteState, DensityMatrix, Subsystem};

/// Eigenvalues at or below this are treated as exact zeros.
pub const EIG_CUTOFF: f64 = 1e-12;
/// Weight of `ρ` on `ker σ` above which the relative entropy is infinite.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Allowed disagreement between the additive and relative-entropy forms of
/// mutual information.
pub const XCHECK_TOL: f64 = 1e-9;

/// Relative entropy value; infinite when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn is_finite(self) -> bool {
        matches!(self, EntropyValue::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::Infinite => None,
        }
    }

    /// Value in bits, `f64::INFINITY` for the infinite case.
    pub fn bits(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyValue::Finite(v) => write!(f, "{v} bits"),
            EntropyValue::Infinite => f.write_str("+inf"),
        }
    }
}

/// `-Σ λ log₂ λ` over eigenvalues above [`EIG_CUTOFF`].
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIG_CUTOFF)
        .map(|&l| -l * libm::log2(l))
        .sum();
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    matrix_entropy(rho.matrix()).min(libm::log2(rho.dim() as f64))
}

/// Entropy of a raw Hermitian PSD matrix (no trace check).
pub(crate) fn matrix_entropy(m: &CMatrix) -> f64 {
    spectrum_entropy(&linalg::hermitian_eigenvalues(m))
}

/// `S(ρ‖σ) = -S(ρ) - tr(ρ log₂ σ)`, evaluated in the eigenbasis of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            context: "relative entropy",
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(matrix_relative_entropy(rho.matrix(), sigma.matrix()))
}

pub(crate) fn matrix_relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> EntropyValue {
    let eig = linalg::hermitian_eigen(sigma);
    let mut kernel_weight = 0.0;
    let mut cross = 0.0;
    for (j, &mu) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(j);
        let w = (v.adjoint() * rho * v)[(0, 0)].re;
        if mu <= EIG_CUTOFF {
            kernel_weight += w;
        } else {
            cross -= w * libm::log2(mu);
        }
    }
    if kernel_weight > SUPPORT_TOL {
        return EntropyValue::Infinite;
    }
    EntropyValue::Finite((cross - matrix_entropy(rho)).max(0.0))
}

/// `I(A:B) = S(A) + S(B) - S(AB)`, cross-checked against
/// `S(ρ_AB ‖ ρ_A ⊗ ρ_B)`.
pub fn mutual_information(s: &BipartiteState) -> Result<f64> {
    let rho_a = s.marginal(Subsystem::A);
    let rho_b = s.marginal(Subsystem::B);
    let additive = (von_neumann_entropy(&rho_a) + von_neumann_entropy(&rho_b) - von_neumann_entropy(s.state())).max(0.0);
    let product = state::tensor(&rho_a, &rho_b);
    let relative = matrix_relative_entropy(s.matrix(), product.matrix()).bits();
    if !((additive - relative).abs() <= XCHECK_TOL) {
        return Err(Error::NumericalConsistency {
            quantity: "mutual information",
            first: additive,
            second: relative,
            tolerance: XCHECK_TOL,
        });
    }
    Ok(additive)
}
