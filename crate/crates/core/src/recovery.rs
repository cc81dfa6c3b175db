//! Petz recovery map and the relative-entropy sufficiency check.
//!
//! For a channel `T` with Kraus operators `K_i` and a reference state `σ`, the
//! recovery map is
//!
//! ```text
//! R(X) = σ^{1/2} T†( (Tσ)^{-1/2} X (Tσ)^{-1/2} ) σ^{1/2}
//! ```
//!
//! with Kraus operators `σ^{1/2} K_i† (Tσ)^{-1/2}`. It always satisfies
//! `R(Tσ) = σ`, and `R(Tρ) = ρ` exactly when `S(ρ‖σ) = S(Tρ‖Tσ)`.
//!
//! Square roots and inverse square roots are spectral, with eigenvalues at or
//! below [`EIG_CUTOFF`] treated as zero. When `Tσ` is rank deficient the map is
//! built on its support and annihilates the orthogonal complement, so it is
//! only trace preserving on `supp(Tσ)`; [`PetzMap::support_restricted`] flags
//! that case.

use crate::channel::KrausChannel;
use crate::entropy::{self, EntropyValue, EIG_CUTOFF};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PetzMap {
    pub channel: KrausChannel,
    /// `σ` or `Tσ` had eigenvalues at or below the cutoff.
    pub support_restricted: bool,
}

impl PetzMap {
    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.channel.apply_matrix(x)
    }
}

pub fn petz_map(ch: &KrausChannel, sigma: &DensityMatrix) -> Result<PetzMap> {
    if sigma.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch { context: "Petz reference state", expected: ch.dim_in(), found: sigma.dim() });
    }
    let mut support_restricted = false;

    let sigma_eig = linalg::hermitian_eigen(sigma.matrix());
    let sqrt_sigma = sigma_eig.map(|l| {
        if l > EIG_CUTOFF {
            libm::sqrt(l)
        } else {
            support_restricted = true;
            0.0
        }
    });

    let t_sigma = ch.apply_matrix(sigma.matrix());
    let out_eig = linalg::hermitian_eigen(&t_sigma);
    if out_eig.values.iter().all(|&l| l <= EIG_CUTOFF) {
        return Err(Error::Singular);
    }
    let inv_sqrt_out = out_eig.map(|l| {
        if l > EIG_CUTOFF {
            1.0 / libm::sqrt(l)
        } else {
            support_restricted = true;
            0.0
        }
    });

    let kraus = ch
        .kraus()
        .iter()
        .map(|k| &sqrt_sigma * k.adjoint() * &inv_sqrt_out)
        .collect();
    let channel = KrausChannel::from_kraus_unchecked(kraus)?.with_label(alloc::format!("petz[{}]", ch.label()));
    Ok(PetzMap { channel, support_restricted })
}

/// `½‖a - b‖₁`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * linalg::trace_norm(&(a - b))
}

/// `‖M_R M_T - I‖_max` where `R` is the recovery map of `T` for the maximally
/// mixed reference. Zero exactly when `T` has a CPTP left inverse.
pub fn reversibility_deviation(ch: &KrausChannel) -> Result<f64> {
    let reference = DensityMatrix::maximally_mixed(ch.dim_in());
    let petz = petz_map(ch, &reference)?;
    let composed = petz.channel.superoperator_matrix() * ch.superoperator_matrix();
    let n = composed.nrows();
    Ok(linalg::max_abs(&(composed - linalg::identity(n))))
}

/// Whether `ch` is undone on every state by a CPTP map, judged by the recovery
/// map for the maximally mixed reference composed with `ch`.
pub fn is_reversible_cptp(ch: &KrausChannel, tol: f64) -> bool {
    reversibility_deviation(ch).is_ok_and(|dev| dev <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficiencyTolerances {
    /// `gap` at or below this counts as equality of relative entropies.
    pub equality: f64,
    /// Trace-distance threshold for "recovered".
    pub recovery: f64,
}

impl Default for SufficiencyTolerances {
    fn default() -> Self {
        Self { equality: 1e-9, recovery: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SufficiencyReport {
    pub s_before: f64,
    pub s_after: f64,
    /// `s_before - s_after`.
    pub gap: f64,
    pub rho_recovered: bool,
    pub sigma_recovered: bool,
    pub recovery_error_rho: f64,
    pub recovery_error_sigma: f64,
    pub support_restricted: bool,
    pub tolerances: SufficiencyTolerances,
}

impl SufficiencyReport {
    pub fn gap_is_zero(&self) -> bool {
        self.gap <= self.tolerances.equality
    }

    /// Data processing holds and equal entropies came with exact recovery.
    pub fn consistent(&self) -> bool {
        let dpi = self.gap >= -self.tolerances.equality;
        let forward = !self.gap_is_zero() || (self.rho_recovered && self.sigma_recovered);
        dpi && forward
    }
}

/// Compares `S(ρ‖σ)` with `S(Tρ‖Tσ)` and measures how well the recovery map
/// built on `σ` restores both states.
pub fn check_sufficiency(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tols: &SufficiencyTolerances,
) -> Result<SufficiencyReport> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { context: "sufficiency states", expected: rho.dim(), found: sigma.dim() });
    }
    let s_before = match entropy::relative_entropy(rho, sigma)? {
        EntropyValue::Finite(v) => v,
        EntropyValue::Infinite => return Err(Error::Unsupported("S(rho||sigma) is infinite")),
    };
    let t_rho = ch.apply(rho)?;
    let t_sigma = ch.apply(sigma)?;
    let s_after = match entropy::relative_entropy(&t_rho, &t_sigma)? {
        EntropyValue::Finite(v) => v,
        EntropyValue::Infinite => return Err(Error::Unsupported("S(T rho||T sigma) is infinite")),
    };
    let petz = petz_map(ch, sigma)?;
    let recovery_error_rho = trace_distance(&petz.apply_matrix(t_rho.matrix()), rho.matrix());
    let recovery_error_sigma = trace_distance(&petz.apply_matrix(t_sigma.matrix()), sigma.matrix());
    Ok(SufficiencyReport {
        s_before,
        s_after,
        gap: s_before - s_after,
        rho_recovered: recovery_error_rho <= tols.recovery,
        sigma_recovered: recovery_error_sigma <= tols.recovery,
        recovery_error_rho,
        recovery_error_sigma,
        support_restricted: petz.support_restricted,
        tolerances: *tols,
    })
}
