//! Named channels: unitaries, depolarizing, completely decohering, isotropic
//! and measure-and-prepare maps, plus random Kraus channels for testing.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{KrausChannel, CHOI_PSD_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::state::DensityMatrix;

/// Tolerance on `U†U = I` for unitaries and bases handed to the zoo.
pub const UNITARY_TOL: f64 = 1e-10;

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in [0, 1]")));
    }
    Ok(())
}

/// Kraus set `{|i⟩⟨j| / √d}` of `ρ ↦ tr(ρ) I/d`, scaled by `√weight`.
fn full_depolarization_kraus(d: usize, weight: f64) -> Vec<CMatrix> {
    let amp = libm::sqrt(weight / d as f64);
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut k = CMatrix::zeros(d, d);
            k[(i, j)] = c(amp, 0.0);
            out.push(k);
        }
    }
    out
}

pub fn identity(d: usize) -> KrausChannel {
    KrausChannel::new(alloc::vec![linalg::identity(d)])
        .expect("identity is trace preserving")
        .with_label("identity")
}

/// `ρ ↦ U ρ U†`.
pub fn unitary(u: CMatrix) -> Result<KrausChannel> {
    linalg::ensure_unitary(&u, UNITARY_TOL)?;
    Ok(KrausChannel::new(alloc::vec![u])?.with_label("unitary"))
}

/// `ρ ↦ (1-p) ρ + p I/d`; `p = 1` is full depolarization.
pub fn depolarizing(p: f64, d: usize) -> Result<KrausChannel> {
    check_probability(p)?;
    let mut kraus = Vec::new();
    if p < 1.0 {
        kraus.push(linalg::identity(d) * c(libm::sqrt(1.0 - p), 0.0));
    }
    if p > 0.0 {
        kraus.extend(full_depolarization_kraus(d, p));
    }
    Ok(KrausChannel::new(kraus)?.with_label(format!("depolarizing(p={p})")))
}

/// Kraus set `{|b_i⟩⟨b_i|}` for the orthonormal columns `b_i` of `basis`.
pub fn completely_decohering(basis: &CMatrix) -> Result<KrausChannel> {
    linalg::ensure_unitary(basis, UNITARY_TOL)?;
    let kraus = (0..basis.ncols())
        .map(|i| linalg::outer(&basis.column(i).into_owned()))
        .collect();
    Ok(KrausChannel::new(kraus)?.with_label("completely_decohering"))
}

/// Spectrum-preserving map mixed into an isotropic channel.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumPreserving {
    Unitary(CMatrix),
    Transpose,
}

/// `ρ ↦ p Γ(ρ) + (1-p) I/d`.
///
/// A unitary `Γ` gives the Kraus set `{√p U} ∪ √(1-p)·{|i⟩⟨j|/√d}`. With
/// `Γ` the transpose the map is only completely positive for small `p`
/// (`p ≤ 1/(d+1)`); it is built from its Choi matrix and rejected otherwise.
pub fn isotropic(p: f64, gamma: &SpectrumPreserving, d: usize) -> Result<KrausChannel> {
    check_probability(p)?;
    match gamma {
        SpectrumPreserving::Unitary(u) => {
            if u.shape() != (d, d) {
                return Err(Error::DimensionMismatch { context: "isotropic unitary", expected: d, found: u.nrows() });
            }
            linalg::ensure_unitary(u, UNITARY_TOL)?;
            let mut kraus = Vec::new();
            if p > 0.0 {
                kraus.push(u * c(libm::sqrt(p), 0.0));
            }
            if p < 1.0 {
                kraus.extend(full_depolarization_kraus(d, 1.0 - p));
            }
            Ok(KrausChannel::new(kraus)?.with_label(format!("isotropic(p={p}, unitary)")))
        }
        SpectrumPreserving::Transpose => {
            let choi = choi_of_linear_map(d, d, |x| {
                x.transpose() * c(p, 0.0) + linalg::identity(d) * (linalg::trace(x) * c((1.0 - p) / d as f64, 0.0))
            });
            let min_eigenvalue = linalg::hermitian_eigen(&choi).min();
            if min_eigenvalue < -CHOI_PSD_TOL {
                return Err(Error::NotCompletelyPositive { min_eigenvalue });
            }
            Ok(KrausChannel::from_choi(&choi, d, d)?.with_label(format!("isotropic(p={p}, transpose)")))
        }
    }
}

/// `ρ ↦ Σ_i ⟨b_i|ρ|b_i⟩ σ_i`: measure in the columns of `basis`, prepare
/// `prepared[i]` on outcome `i`.
pub fn measure_and_prepare(basis: &CMatrix, prepared: &[DensityMatrix]) -> Result<KrausChannel> {
    linalg::ensure_unitary(basis, UNITARY_TOL)?;
    if prepared.len() != basis.ncols() {
        return Err(Error::DimensionMismatch {
            context: "prepared states per outcome",
            expected: basis.ncols(),
            found: prepared.len(),
        });
    }
    let d_out = prepared[0].dim();
    let mut kraus = Vec::new();
    for (i, sigma) in prepared.iter().enumerate() {
        if sigma.dim() != d_out {
            return Err(Error::DimensionMismatch { context: "prepared state", expected: d_out, found: sigma.dim() });
        }
        let bra = basis.column(i).adjoint();
        let eig = linalg::hermitian_eigen(sigma.matrix());
        for (k, &s) in eig.values.iter().enumerate() {
            if s > 1e-14 {
                let ket = eig.vectors.column(k) * c(libm::sqrt(s), 0.0);
                kraus.push(ket * &bra);
            }
        }
    }
    Ok(KrausChannel::new(kraus)?.with_label("measure_and_prepare"))
}

/// Random channel with `n_kraus` operators: Ginibre draws `G_i`, normalized as
/// `K_i = G_i S^{-1/2}` with `S = Σ G_i† G_i`.
pub fn random<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, n_kraus: usize, rng: &mut R) -> Result<KrausChannel> {
    if n_kraus == 0 || n_kraus * dim_out < dim_in {
        return Err(Error::InvalidArgument(format!(
            "{n_kraus} Kraus operators of shape {dim_out}x{dim_in} cannot be trace preserving"
        )));
    }
    let gs: Vec<CMatrix> = (0..n_kraus).map(|_| linalg::ginibre(dim_out, dim_in, rng)).collect();
    let s: CMatrix = gs.iter().map(|g| g.adjoint() * g).sum();
    let inv_sqrt = linalg::hermitian_eigen(&s).map(|l| 1.0 / libm::sqrt(l));
    let kraus = gs.iter().map(|g| g * &inv_sqrt).collect();
    Ok(KrausChannel::new(kraus)?.with_label(format!("random({n_kraus} Kraus)")))
}

/// Choi matrix of an arbitrary linear map given by its action, output factor
/// first, normalized by `1/d_in`.
pub fn choi_of_linear_map(dim_in: usize, dim_out: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let n = dim_out * dim_in;
    let mut choi = CMatrix::zeros(n, n);
    let scale = c(1.0 / dim_in as f64, 0.0);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let mut eij = CMatrix::zeros(dim_in, dim_in);
            eij[(i, j)] = linalg::ONE;
            let img = f(&eij);
            for a in 0..dim_out {
                for b in 0..dim_out {
                    choi[(a * dim_in + i, b * dim_in + j)] = img[(a, b)] * scale;
                }
            }
        }
    }
    choi
}
