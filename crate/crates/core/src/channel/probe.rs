//! Randomized search for commuting input pairs whose images fail to commute.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::KrausChannel;
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::state::DensityMatrix;

/// Below `tol / INCONCLUSIVE_BAND` the largest observed commutator counts as
/// clean; between that and `tol` the probe reports `Inconclusive`.
pub const INCONCLUSIVE_BAND: f64 = 100.0;

/// A commuting input pair `(ρ, σ)` with `‖[Λρ, Λσ]‖_max > tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorWitness {
    pub trial: usize,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub input_commutator: f64,
    pub output_commutator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeVerdict {
    /// No violation in `trials` samples; a statistical verdict, not a proof.
    Preserves { trials: usize, tol: f64, max_commutator: f64 },
    Violates(CommutatorWitness),
    /// No sample crossed `tol` but some came within [`INCONCLUSIVE_BAND`] of it.
    Inconclusive { trials: usize, tol: f64, max_commutator: f64 },
}

impl ProbeVerdict {
    pub fn preserves(&self) -> bool {
        matches!(self, ProbeVerdict::Preserves { .. })
    }

    pub fn violates(&self) -> bool {
        matches!(self, ProbeVerdict::Violates(_))
    }
}

/// Draws a Hermitian with generic spectrum, or one with a forced degenerate
/// pair on every third call.
fn shared_hermitian<R: Rng + ?Sized>(d: usize, degenerate: bool, rng: &mut R) -> HermitianEigen {
    let mut eig = linalg::hermitian_eigen(&linalg::random_hermitian(d, rng));
    if degenerate && d >= 2 {
        eig.values[1] = eig.values[0];
    }
    eig
}

/// `f(H)²/tr` for a random polynomial `f` of degree `< d`, so the result is a
/// state that is a spectral function of `H`.
fn spectral_state<R: Rng + ?Sized>(eig: &HermitianEigen, rng: &mut R) -> DensityMatrix {
    let d = eig.values.len();
    let coeffs: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let weights: Vec<f64> = eig
        .values
        .iter()
        .map(|&h| {
            let f = coeffs.iter().rev().fold(0.0, |acc, &a| acc * h + a);
            f * f
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut it = weights.iter().map(|w| w / total);
    let m = eig.map(|_| it.next().unwrap_or(0.0));
    DensityMatrix::from_noisy(&m).expect("normalized spectral function of a Hermitian is a state")
}

/// Samples commuting state pairs `(f(H), g(H))` and checks whether their images
/// under `ch` commute. Deterministic in `seed`.
pub fn preserves_commutativity_probe(ch: &KrausChannel, trials: usize, seed: u64, tol: f64) -> ProbeVerdict {
    let d = ch.dim_in();
    let mut rng = linalg::seeded_rng(seed);
    let mut max_commutator: f64 = 0.0;
    for trial in 0..trials {
        let eig = shared_hermitian(d, trial % 3 == 2, &mut rng);
        let rho = spectral_state(&eig, &mut rng);
        let sigma = spectral_state(&eig, &mut rng);
        let out_rho: CMatrix = ch.apply_matrix(rho.matrix());
        let out_sigma: CMatrix = ch.apply_matrix(sigma.matrix());
        let norm = linalg::max_abs(&linalg::commutator(&out_rho, &out_sigma));
        if norm > tol {
            let input_commutator = linalg::max_abs(&linalg::commutator(rho.matrix(), sigma.matrix()));
            return ProbeVerdict::Violates(CommutatorWitness {
                trial,
                rho,
                sigma,
                input_commutator,
                output_commutator: norm,
            });
        }
        max_commutator = max_commutator.max(norm);
    }
    if max_commutator > tol / INCONCLUSIVE_BAND {
        ProbeVerdict::Inconclusive { trials, tol, max_commutator }
    } else {
        ProbeVerdict::Preserves { trials, tol, max_commutator }
    }
}
