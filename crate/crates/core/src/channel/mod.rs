//! CPTP maps in Kraus form, their Choi and superoperator representations, and
//! local product channels.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{BipartiteState, DensityMatrix};

mod probe;
pub mod zoo;

pub use probe::{preserves_commutativity_probe, CommutatorWitness, ProbeVerdict};

/// Allowed `‖Σ K†K - I‖_max`.
pub const CPTP_TOL: f64 = 1e-10;
/// Allowed negativity of Choi eigenvalues.
pub const CHOI_PSD_TOL: f64 = 1e-10;

/// A channel given by Kraus operators `K_i : C^{dim_in} → C^{dim_out}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    completeness_deviation: f64,
    label: String,
}

impl KrausChannel {
    /// Builds a channel and checks `Σ K†K = I` within [`CPTP_TOL`].
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        if ch.completeness_deviation > CPTP_TOL {
            return Err(Error::NotTracePreserving { deviation: ch.completeness_deviation });
        }
        Ok(ch)
    }

    /// Shape checks only; the completeness defect is recorded, not enforced.
    /// Trace-non-increasing maps (support-restricted recovery maps) use this.
    pub(crate) fn from_kraus_unchecked(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("a channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidArgument("Kraus operators must be non-empty".into()));
        }
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shapes",
                    expected: dim_out * dim_in,
                    found: k.nrows() * k.ncols(),
                });
            }
        }
        let sum: CMatrix = kraus.iter().map(|k| k.adjoint() * k).sum();
        let completeness_deviation = linalg::max_abs(&(sum - linalg::identity(dim_in)));
        Ok(Self { dim_in, dim_out, kraus, completeness_deviation, label: String::from("kraus") })
    }

    /// Reconstructs a channel from a Choi matrix laid out as
    /// [`KrausChannel::choi_matrix`] produces it (output factor first).
    pub fn from_choi(choi: &CMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = dim_in * dim_out;
        if choi.shape() != (n, n) {
            return Err(Error::DimensionMismatch { context: "Choi matrix", expected: n, found: choi.nrows() });
        }
        let eig = linalg::hermitian_eigen(choi);
        if eig.min() < -CHOI_PSD_TOL {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: eig.min() });
        }
        let kraus: Vec<CMatrix> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 1e-14)
            .map(|(j, &l)| {
                let w = libm::sqrt(dim_in as f64 * l);
                let v = eig.vectors.column(j);
                CMatrix::from_fn(dim_out, dim_in, |a, i| v[a * dim_in + i] * w)
            })
            .collect();
        Self::new(kraus)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_deviation
    }

    /// `Σ K_i ρ K_i†`, symmetrized and validated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch { context: "channel input", expected: self.dim_in, found: rho.dim() });
        }
        if self.completeness_deviation > CPTP_TOL {
            return Err(Error::NotTracePreserving { deviation: self.completeness_deviation });
        }
        DensityMatrix::from_noisy(&self.apply_matrix(rho.matrix()))
    }

    /// The linear action on an arbitrary operator, no validation.
    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.kraus.iter().map(|k| k * x * k.adjoint()).sum()
    }

    /// Heisenberg-picture dual `Σ K_i† X K_i`.
    pub fn adjoint_apply(&self, x: &CMatrix) -> CMatrix {
        self.kraus.iter().map(|k| k.adjoint() * x * k).sum()
    }

    /// `(Λ ⊗ id)(|Ω⟩⟨Ω|)` with `|Ω⟩ = Σ_i |ii⟩/√d_in`. Output factor first.
    pub fn choi_matrix(&self) -> CMatrix {
        let d = self.dim_in;
        let mut omega = linalg::CVector::zeros(d * d);
        let amp = linalg::c(1.0 / libm::sqrt(d as f64), 0.0);
        for i in 0..d {
            omega[i * d + i] = amp;
        }
        let omega = linalg::outer(&omega);
        let id = linalg::identity(d);
        self.kraus
            .iter()
            .map(|k| {
                let big = linalg::kron(k, &id);
                &big * &omega * big.adjoint()
            })
            .sum()
    }

    /// `M = Σ conj(K) ⊗ K`, so that `vec(Λρ) = M vec(ρ)` under column stacking.
    pub fn superoperator_matrix(&self) -> CMatrix {
        self.kraus.iter().map(|k| linalg::kron(&k.conjugate(), k)).sum()
    }

    /// `Λ(I/d) = I/d` within `tol`; only meaningful when `dim_in == dim_out`.
    pub fn is_unital(&self, tol: f64) -> bool {
        if self.dim_in != self.dim_out {
            return false;
        }
        let mixed = DensityMatrix::maximally_mixed(self.dim_in);
        linalg::max_abs(&(self.apply_matrix(mixed.matrix()) - mixed.matrix())) <= tol
    }

    /// `self ⊗ other`, Kraus set `{A_i ⊗ B_j}`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(linalg::kron(a, b));
            }
        }
        let mut ch = Self::from_kraus_unchecked(kraus).expect("product of well-shaped Kraus sets");
        ch.label = alloc::format!("{}⊗{}", self.label, other.label);
        ch
    }

    /// `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if other.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch { context: "channel composition", expected: self.dim_out, found: other.dim_in });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Self::from_kraus_unchecked(kraus)
    }
}

/// Channels acting independently on the two factors of a bipartite state.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalChannelPair {
    pub channel_a: KrausChannel,
    pub channel_b: KrausChannel,
}

impl LocalChannelPair {
    pub fn new(channel_a: KrausChannel, channel_b: KrausChannel) -> Result<Self> {
        for ch in [&channel_a, &channel_b] {
            if ch.dim_in != ch.dim_out {
                return Err(Error::DimensionMismatch {
                    context: "local channels must preserve dimension",
                    expected: ch.dim_in,
                    found: ch.dim_out,
                });
            }
        }
        Ok(Self { channel_a, channel_b })
    }

    pub fn product(&self) -> KrausChannel {
        self.channel_a.tensor(&self.channel_b)
    }

    pub fn label(&self) -> String {
        alloc::format!("{} ⊗ {}", self.channel_a.label(), self.channel_b.label())
    }
}

/// `(Λ_a ⊗ Λ_b) ρ_AB`.
pub fn apply_local(pair: &LocalChannelPair, s: &BipartiteState) -> Result<BipartiteState> {
    if pair.channel_a.dim_in != s.dim_a() {
        return Err(Error::DimensionMismatch { context: "channel on A", expected: s.dim_a(), found: pair.channel_a.dim_in });
    }
    if pair.channel_b.dim_in != s.dim_b() {
        return Err(Error::DimensionMismatch { context: "channel on B", expected: s.dim_b(), found: pair.channel_b.dim_in });
    }
    let out = pair.product().apply(s.state())?;
    BipartiteState::new(out, pair.channel_a.dim_out, pair.channel_b.dim_out)
}

/// Summary of structural properties of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVerdict {
    pub cptp_valid: bool,
    pub completeness_deviation: f64,
    pub min_choi_eigenvalue: f64,
    pub unital: bool,
    /// Numerical rank of the superoperator matrix.
    pub linear_rank: usize,
    pub reversible_cptp: bool,
    /// `‖M_petz M_ch - I‖_max` behind `reversible_cptp`.
    pub reversibility_deviation: f64,
    pub commutativity: ProbeVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub probe_trials: usize,
    pub probe_seed: u64,
    pub probe_tol: f64,
    pub reversibility_tol: f64,
    pub unital_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { probe_trials: 200, probe_seed: 0, probe_tol: 1e-9, reversibility_tol: 1e-9, unital_tol: 1e-10 }
    }
}

pub fn classify(ch: &KrausChannel, cfg: &ClassifyConfig) -> Result<ChannelVerdict> {
    let min_choi_eigenvalue = linalg::hermitian_eigen(&ch.choi_matrix()).min();
    let cptp_valid = ch.completeness_deviation <= CPTP_TOL && min_choi_eigenvalue >= -CHOI_PSD_TOL;
    let reversibility_deviation = crate::recovery::reversibility_deviation(ch)?;
    Ok(ChannelVerdict {
        cptp_valid,
        completeness_deviation: ch.completeness_deviation,
        min_choi_eigenvalue,
        unital: ch.is_unital(cfg.unital_tol),
        linear_rank: linalg::numerical_rank(&ch.superoperator_matrix(), 1e-10),
        reversible_cptp: reversibility_deviation <= cfg.reversibility_tol,
        reversibility_deviation,
        commutativity: preserves_commutativity_probe(ch, cfg.probe_trials, cfg.probe_seed, cfg.probe_tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, seeded_rng};
    use crate::state::{random_density, tensor};

    fn pauli_x() -> CMatrix {
        linalg::from_rows(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])
    }

    #[test]
    fn identity_channel_fixes_states() {
        let rho = random_density(3, 3, 2).unwrap();
        let out = zoo::identity(3).apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn full_depolarizing_outputs_maximally_mixed() {
        let rho = random_density(2, 2, 8).unwrap();
        let out = zoo::depolarizing(1.0, 2).unwrap().apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);
    }

    #[test]
    fn bit_flip() {
        let out = zoo::unitary(pauli_x()).unwrap().apply(&DensityMatrix::basis_projector(2, 0)).unwrap();
        assert_eq!(out.matrix(), DensityMatrix::basis_projector(2, 1).matrix());
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let err = zoo::identity(2).apply(&DensityMatrix::maximally_mixed(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn new_rejects_incomplete_kraus_set() {
        let half = linalg::identity(2) * c(0.5, 0.0);
        assert!(matches!(KrausChannel::new(alloc::vec![half]), Err(Error::NotTracePreserving { .. })));
        assert!(KrausChannel::new(alloc::vec![]).is_err());
    }

    #[test]
    fn local_identity_and_unitaries() {
        let mut rng = seeded_rng(4);
        let ra = random_density(2, 2, 1).unwrap();
        let rb = random_density(3, 3, 2).unwrap();
        let s = tensor(&ra, &rb);
        let id = LocalChannelPair::new(zoo::identity(2), zoo::identity(3)).unwrap();
        assert!(max_abs(&(apply_local(&id, &s).unwrap().matrix() - s.matrix())) < 1e-15);

        let u = linalg::random_unitary(2, &mut rng);
        let v = linalg::random_unitary(3, &mut rng);
        let pair = LocalChannelPair::new(zoo::unitary(u.clone()).unwrap(), zoo::unitary(v.clone()).unwrap()).unwrap();
        let expect = tensor(&ra.conjugate_by(&u).unwrap(), &rb.conjugate_by(&v).unwrap());
        assert!(max_abs(&(apply_local(&pair, &s).unwrap().matrix() - expect.matrix())) < 1e-12);
    }

    #[test]
    fn local_pair_rejects_dimension_changing_maps() {
        let mut rng = seeded_rng(0);
        let ch = zoo::random(2, 3, 2, &mut rng).unwrap();
        assert!(LocalChannelPair::new(ch, zoo::identity(2)).is_err());
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let choi = zoo::identity(2).choi_matrix();
        let bell = BipartiteState::bell();
        assert!(max_abs(&(choi - bell.matrix())) < 1e-15);
    }

    #[test]
    fn choi_of_unitary_has_rank_one() {
        let mut rng = seeded_rng(12);
        let ch = zoo::unitary(linalg::random_unitary(3, &mut rng)).unwrap();
        assert_eq!(linalg::numerical_rank(&ch.choi_matrix(), 1e-10), 1);
    }

    #[test]
    fn choi_roundtrip() {
        let mut rng = seeded_rng(5);
        let ch = zoo::random(2, 3, 3, &mut rng).unwrap();
        let back = KrausChannel::from_choi(&ch.choi_matrix(), 2, 3).unwrap();
        assert!(max_abs(&(back.superoperator_matrix() - ch.superoperator_matrix())) < 1e-12);
    }

    #[test]
    fn superoperator_of_identity_and_unitary() {
        assert_eq!(zoo::identity(3).superoperator_matrix(), linalg::identity(9));
        let mut rng = seeded_rng(6);
        let u = linalg::random_unitary(2, &mut rng);
        let m = zoo::unitary(u.clone()).unwrap().superoperator_matrix();
        assert!(max_abs(&(&m - linalg::kron(&u.conjugate(), &u))) < 1e-15);
        assert!(linalg::unitarity_defect(&m).unwrap() < 1e-12);
    }

    #[test]
    fn unital_flags() {
        let mut rng = seeded_rng(9);
        assert!(zoo::depolarizing(0.3, 3).unwrap().is_unital(1e-10));
        let mp = zoo::measure_and_prepare(&linalg::identity(2), &[DensityMatrix::basis_projector(2, 0), DensityMatrix::basis_projector(2, 0)]).unwrap();
        assert!(!mp.is_unital(1e-10));
        assert!(zoo::unitary(linalg::random_unitary(2, &mut rng)).unwrap().is_unital(1e-10));
    }

    #[test]
    fn classify_depolarizing() {
        let v = classify(&zoo::depolarizing(0.5, 2).unwrap(), &ClassifyConfig::default()).unwrap();
        assert!(v.cptp_valid && v.unital && !v.reversible_cptp);
        assert_eq!(v.linear_rank, 4);
        assert!(matches!(v.commutativity, ProbeVerdict::Preserves { .. }));
    }

    #[test]
    fn classify_decohering_has_rank_d() {
        let v = classify(&zoo::completely_decohering(&linalg::identity(3)).unwrap(), &ClassifyConfig::default()).unwrap();
        assert_eq!(v.linear_rank, 3);
        assert!(!v.reversible_cptp);
    }
}
