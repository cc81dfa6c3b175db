//! Classical correlation, quantum discord and classical-quantum states.
//!
//! The classical correlation with respect to measurements on one side is
//!
//! ```text
//! C = max_{Π} [ S(ρ_other) - Σ_i p_i S(ρ^i_other) ]
//!   = max_{Π} Σ_i p_i S(ρ^i_other ‖ ρ_other)
//! ```
//!
//! and the discord is `D = I - C`. The maximum runs over rank-1 projective
//! measurements `{U|i⟩⟨i|U†}`; `U` is charted by `d² - d` angles (a product of
//! complex Givens rotations, which covers every basis up to the column phases
//! the measurement ignores) and searched by multi-start Nelder-Mead. For a
//! qubit measured side rank-1 projective measurements are optimal; for larger
//! dimensions this is a restriction, and every result records it.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::entropy::{self, EntropyValue};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::optimize::NelderMead;
use crate::state::{BipartiteState, DensityMatrix, Subsystem};

/// Outcomes with probability at or below this are dropped from ensembles.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;
/// Allowed disagreement between the two Holevo forms.
pub const HOLEVO_XCHECK_TOL: f64 = 1e-9;
/// Negative discord down to `-CLAMP_TOL` is clamped to zero.
pub const CLAMP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementClass {
    Projective,
}

impl MeasurementClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementClass::Projective => "projective",
        }
    }
}

/// Rank-1 projective measurement `{U|i⟩⟨i|U†}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    rotation: CMatrix,
}

impl MeasurementSetting {
    pub fn new(rotation: CMatrix) -> Result<Self> {
        linalg::ensure_unitary(&rotation, 1e-10)?;
        Ok(Self { rotation })
    }

    pub fn computational(d: usize) -> Self {
        Self { rotation: linalg::identity(d) }
    }

    /// Number of chart angles for dimension `d`.
    pub fn chart_len(d: usize) -> usize {
        d * d - d
    }

    /// `U = Π_{p<q} G_pq(θ, φ)` with `(θ, φ)` pairs taken from `angles` in
    /// lexicographic `(p, q)` order.
    pub fn from_angles(d: usize, angles: &[f64]) -> Self {
        debug_assert_eq!(angles.len(), Self::chart_len(d));
        let mut u = linalg::identity(d);
        let mut k = 0;
        for p in 0..d {
            for q in (p + 1)..d {
                let (theta, phi) = (angles[k], angles[k + 1]);
                k += 2;
                let (s, co) = (libm::sin(theta), libm::cos(theta));
                let phase = c(libm::cos(phi), libm::sin(phi));
                // right-multiply by the Givens rotation acting on columns p, q
                for i in 0..d {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = up * co + uq * phase * s;
                    u[(i, q)] = -(up * phase.conj() * s) + uq * co;
                }
            }
        }
        Self { rotation: u }
    }

    pub fn dim(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn rotation(&self) -> &CMatrix {
        &self.rotation
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.rotation.column(i).into_owned()
    }

    pub fn projector(&self, i: usize) -> CMatrix {
        linalg::outer(&self.vector(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    /// Conditional state of the unmeasured side.
    pub state: DensityMatrix,
}

/// Post-measurement ensemble `{p_i, ρ^i}` on the unmeasured side.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredEnsemble {
    pub outcomes: Vec<Outcome>,
    /// Outcome indices dropped for probability at or below
    /// [`MIN_OUTCOME_PROBABILITY`].
    pub omitted: Vec<usize>,
    pub measured_side: Subsystem,
}

impl MeasuredEnsemble {
    /// Builds an ensemble from explicit weights and states.
    pub fn new(outcomes: Vec<(f64, DensityMatrix)>, measured_side: Subsystem) -> Result<Self> {
        let first_dim = outcomes
            .first()
            .map(|(_, s)| s.dim())
            .ok_or_else(|| Error::InvalidProbabilities("empty ensemble".into()))?;
        let total: f64 = outcomes.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 || outcomes.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::InvalidProbabilities(alloc::format!("weights must be nonnegative and sum to 1 (sum {total})")));
        }
        if let Some((_, s)) = outcomes.iter().find(|(_, s)| s.dim() != first_dim) {
            return Err(Error::DimensionMismatch { context: "ensemble states", expected: first_dim, found: s.dim() });
        }
        Ok(Self {
            outcomes: outcomes
                .into_iter()
                .enumerate()
                .map(|(index, (probability, state))| Outcome { index, probability, state })
                .collect(),
            omitted: Vec::new(),
            measured_side,
        })
    }

    /// `Σ p_i ρ^i`.
    pub fn average(&self) -> CMatrix {
        let d = self.outcomes.first().map_or(0, |o| o.state.dim());
        self.outcomes
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, o| acc + o.state.matrix() * c(o.probability, 0.0))
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Blocks `B[k*d_m + l]` of `ρ` indexed by the measured side, each a matrix on
/// the other side, so that `⟨u|ρ|u⟩_measured = Σ_{k,l} conj(u_k) u_l B_{kl}`.
struct MeasuredBlocks {
    measured_dim: usize,
    other_dim: usize,
    blocks: Vec<CMatrix>,
}

impl MeasuredBlocks {
    fn new(s: &BipartiteState, side: Subsystem) -> Self {
        let (da, db) = (s.dim_a(), s.dim_b());
        let rho = s.matrix();
        let (measured_dim, other_dim) = match side {
            Subsystem::A => (da, db),
            Subsystem::B => (db, da),
        };
        let mut blocks = Vec::with_capacity(measured_dim * measured_dim);
        for k in 0..measured_dim {
            for l in 0..measured_dim {
                blocks.push(CMatrix::from_fn(other_dim, other_dim, |i, j| match side {
                    Subsystem::A => rho[(k * db + i, l * db + j)],
                    Subsystem::B => rho[(i * db + k, j * db + l)],
                }));
            }
        }
        Self { measured_dim, other_dim, blocks }
    }

    /// Unnormalized conditional state `tr_measured((|u⟩⟨u| ⊗ I) ρ)`.
    fn conditional(&self, u: &CVector) -> CMatrix {
        let dm = self.measured_dim;
        let mut out = CMatrix::zeros(self.other_dim, self.other_dim);
        for k in 0..dm {
            for l in 0..dm {
                let w = u[k].conj() * u[l];
                if w != linalg::ZERO {
                    out += &self.blocks[k * dm + l] * w;
                }
            }
        }
        out
    }

    /// `Σ_i p_i S(ρ^i)` for the given rotation.
    fn average_conditional_entropy(&self, rotation: &CMatrix) -> f64 {
        (0..self.measured_dim)
            .map(|i| {
                let m = self.conditional(&rotation.column(i).into_owned());
                let p = linalg::trace(&m).re;
                if p <= MIN_OUTCOME_PROBABILITY {
                    return 0.0;
                }
                let spectrum: Vec<f64> = linalg::hermitian_eigenvalues(&m).iter().map(|l| l / p).collect();
                p * entropy::spectrum_entropy(&spectrum)
            })
            .sum()
    }
}

fn conditional_state(m: &CMatrix, p: f64) -> DensityMatrix {
    let scaled = m / c(p, 0.0);
    DensityMatrix::from_noisy(&scaled).unwrap_or_else(|_| {
        // tiny p amplifies rounding; project back onto the state space
        let eig = linalg::hermitian_eigen(&scaled);
        let total: f64 = eig.values.iter().map(|l| l.max(0.0)).sum();
        DensityMatrix::from_trusted(linalg::hermitian_part(&eig.map(|l| l.max(0.0) / total)))
    })
}

/// Measures `side` with `m` and returns the conditional states of the other
/// side.
pub fn measure_ensemble(s: &BipartiteState, m: &MeasurementSetting, side: Subsystem) -> Result<MeasuredEnsemble> {
    let measured_dim = s.dim_of(side);
    if m.dim() != measured_dim {
        return Err(Error::DimensionMismatch { context: "measurement on measured side", expected: measured_dim, found: m.dim() });
    }
    let blocks = MeasuredBlocks::new(s, side);
    let mut outcomes = Vec::new();
    let mut omitted = Vec::new();
    for i in 0..measured_dim {
        let cond = blocks.conditional(&m.vector(i));
        let p = linalg::trace(&cond).re;
        if p <= MIN_OUTCOME_PROBABILITY {
            omitted.push(i);
            continue;
        }
        outcomes.push(Outcome { index: i, probability: p, state: conditional_state(&cond, p) });
    }
    Ok(MeasuredEnsemble { outcomes, omitted, measured_side: side })
}

/// Holevo quantity of the ensemble, evaluated as `S(ρ̄) - Σ p_i S(ρ^i)` and
/// cross-checked against `Σ p_i S(ρ^i ‖ ρ̄)`.
pub fn holevo_value(e: &MeasuredEnsemble) -> Result<f64> {
    let (difference, divergence) = holevo_forms(e);
    if !((difference - divergence).abs() <= HOLEVO_XCHECK_TOL) {
        return Err(Error::NumericalConsistency {
            quantity: "Holevo quantity",
            first: difference,
            second: divergence,
            tolerance: HOLEVO_XCHECK_TOL,
        });
    }
    Ok(difference)
}

/// Both Holevo expressions: `(entropy difference, average divergence)`.
pub fn holevo_forms(e: &MeasuredEnsemble) -> (f64, f64) {
    let avg = e.average();
    let s_avg = entropy::matrix_entropy(&avg);
    let mut mean_entropy = 0.0;
    let mut divergence = 0.0;
    for o in &e.outcomes {
        mean_entropy += o.probability * entropy::von_neumann_entropy(&o.state);
        divergence += o.probability
            * match entropy::matrix_relative_entropy(o.state.matrix(), &avg) {
                EntropyValue::Finite(v) => v,
                EntropyValue::Infinite => f64::INFINITY,
            };
    }
    ((s_avg - mean_entropy).max(0.0), divergence)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub ftol: f64,
    pub measurement_class: MeasurementClass,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 32, seed: 0, max_iters: 500, ftol: 1e-10, measurement_class: MeasurementClass::Projective }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    pub best_measurement: MeasurementSetting,
    pub restarts_used: usize,
    /// Max minus min over the per-restart optima.
    pub spread: f64,
    pub evaluations: usize,
    pub measured_side: Subsystem,
    pub measurement_class: MeasurementClass,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = linalg::seeded_rng(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Maximizes the Holevo quantity over projective measurements on `side`.
///
/// Restart 0 starts from the computational basis, the rest from uniformly
/// random chart angles drawn from per-restart streams of `cfg.seed`. The best
/// restart wins, ties going to the lowest index.
pub fn classical_correlation(s: &BipartiteState, side: Subsystem, cfg: &OptimizerConfig) -> Result<CorrelationResult> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("optimizer needs at least one restart".into()));
    }
    let blocks = MeasuredBlocks::new(s, side);
    let d = blocks.measured_dim;
    let s_other = entropy::von_neumann_entropy(&s.marginal(side.other()));
    let nm = NelderMead { max_iters: cfg.max_iters, ftol: cfg.ftol, initial_step: 0.4 };
    let n = MeasurementSetting::chart_len(d);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut worst_optimum = f64::INFINITY;
    let mut evaluations = 0;
    for r in 0..cfg.restarts {
        let x0: Vec<f64> = if r == 0 {
            alloc::vec![0.0; n]
        } else {
            let mut rng = restart_rng(cfg.seed, r);
            (0..n).map(|_| rng.random::<f64>() * core::f64::consts::PI).collect()
        };
        let min = nm.minimize(
            |x| blocks.average_conditional_entropy(MeasurementSetting::from_angles(d, x).rotation()),
            &x0,
        );
        evaluations += min.evaluations;
        let value = s_other - min.value;
        worst_optimum = worst_optimum.min(value);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, min.point));
        }
    }
    let (best_value, angles) = best.expect("at least one restart ran");
    let best_measurement = MeasurementSetting::from_angles(d, &angles);
    let ensemble = measure_ensemble(s, &best_measurement, side)?;
    let value = holevo_value(&ensemble)?.max(0.0);
    Ok(CorrelationResult {
        value,
        best_measurement,
        restarts_used: cfg.restarts,
        spread: best_value - worst_optimum,
        evaluations,
        measured_side: side,
        measurement_class: cfg.measurement_class,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub mutual_information: f64,
    pub classical: CorrelationResult,
    pub discord: f64,
}

/// `D = I - C`, with negatives down to `-CLAMP_TOL` clamped to zero.
pub fn quantum_discord(s: &BipartiteState, side: Subsystem, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    let mutual_information = entropy::mutual_information(s)?;
    let classical = classical_correlation(s, side, cfg)?;
    let raw = mutual_information - classical.value;
    if raw < -CLAMP_TOL {
        return Err(Error::OptimizationFailure { discord: raw });
    }
    Ok(DiscordResult { mutual_information, classical, discord: raw.max(0.0) })
}

/// `Σ_i p_i |b_i⟩⟨b_i| ⊗ ρ_i` with `b_i` the columns of `basis`.
pub fn classical_quantum_state(probs: &[f64], basis: &CMatrix, states: &[DensityMatrix]) -> Result<BipartiteState> {
    linalg::ensure_unitary(basis, 1e-10)?;
    let da = basis.ncols();
    if probs.len() != da || states.len() != da {
        return Err(Error::DimensionMismatch { context: "classical-quantum components", expected: da, found: probs.len().max(states.len()) });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 || probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidProbabilities(alloc::format!("weights must be nonnegative and sum to 1 (sum {total})")));
    }
    let db = states[0].dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != db) {
        return Err(Error::DimensionMismatch { context: "conditional states", expected: db, found: bad.dim() });
    }
    let mut m = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        let proj = linalg::outer(&basis.column(i).into_owned());
        m += linalg::kron(&proj, states[i].matrix()) * c(probs[i], 0.0);
    }
    BipartiteState::new(DensityMatrix::from_noisy(&m)?, da, db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, seeded_rng};
    use crate::state::{random_density, tensor};

    #[test]
    fn chart_yields_unitaries() {
        let mut rng = seeded_rng(1);
        for d in 1..=4 {
            let angles: Vec<f64> = (0..MeasurementSetting::chart_len(d)).map(|_| rng.random::<f64>() * 6.0).collect();
            let m = MeasurementSetting::from_angles(d, &angles);
            assert!(linalg::unitarity_defect(m.rotation()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let m = MeasurementSetting::from_angles(3, &[0.3, 1.0, 2.0, 0.1, 0.7, 4.0]);
        let sum: CMatrix = (0..3).map(|i| m.projector(i)).sum();
        assert!(max_abs(&(sum - linalg::identity(3))) < 1e-12);
    }

    #[test]
    fn product_state_ensemble() {
        let ra = random_density(2, 2, 1).unwrap();
        let rb = random_density(3, 3, 2).unwrap();
        let e = measure_ensemble(&tensor(&ra, &rb), &MeasurementSetting::computational(2), Subsystem::A).unwrap();
        for o in &e.outcomes {
            assert!((o.probability - ra.matrix()[(o.index, o.index)].re).abs() < 1e-14);
            assert!(max_abs(&(o.state.matrix() - rb.matrix())) < 1e-12);
        }
        assert!(holevo_value(&e).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_ensemble() {
        let e = measure_ensemble(&BipartiteState::bell(), &MeasurementSetting::computational(2), Subsystem::A).unwrap();
        assert_eq!(e.outcomes.len(), 2);
        for o in &e.outcomes {
            assert!((o.probability - 0.5).abs() < 1e-15);
            assert!(max_abs(&(o.state.matrix() - DensityMatrix::basis_projector(2, o.index).matrix())) < 1e-15);
        }
        assert!((holevo_value(&e).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_outcomes_are_omitted() {
        let s = tensor(&DensityMatrix::basis_projector(2, 0), &random_density(2, 2, 3).unwrap());
        let e = measure_ensemble(&s, &MeasurementSetting::computational(2), Subsystem::A).unwrap();
        assert_eq!(e.omitted, [1]);
        assert_eq!(e.outcomes.len(), 1);
    }

    #[test]
    fn measuring_b_conditions_a() {
        let s = random_density(6, 6, 4).unwrap();
        let s = BipartiteState::new(s, 2, 3).unwrap();
        let m = MeasurementSetting::from_angles(3, &[0.4, 0.2, 1.1, 2.0, 0.9, 0.3]);
        let e = measure_ensemble(&s, &m, Subsystem::B).unwrap();
        assert!(max_abs(&(e.average() - s.marginal(Subsystem::A).matrix())) < 1e-12);
    }

    #[test]
    fn measurement_dimension_mismatch() {
        let err = measure_ensemble(&BipartiteState::bell(), &MeasurementSetting::computational(3), Subsystem::A);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn optimizer_basics() {
        let cfg = OptimizerConfig::default();
        let p = tensor(&random_density(2, 2, 1).unwrap(), &random_density(2, 2, 2).unwrap());
        assert!(classical_correlation(&p, Subsystem::A, &cfg).unwrap().value.abs() < 1e-8);
        let bell = classical_correlation(&BipartiteState::bell(), Subsystem::A, &cfg).unwrap();
        assert!((bell.value - 1.0).abs() < 1e-4);
        assert_eq!(bell.restarts_used, 32);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let s = BipartiteState::new(random_density(4, 3, 8).unwrap(), 2, 2).unwrap();
        let cfg = OptimizerConfig::default().with_seed(99);
        let a = classical_correlation(&s, Subsystem::A, &cfg).unwrap();
        let b = classical_correlation(&s, Subsystem::A, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_restarts_rejected() {
        let cfg = OptimizerConfig { restarts: 0, ..Default::default() };
        assert!(classical_correlation(&BipartiteState::bell(), Subsystem::A, &cfg).is_err());
    }

    #[test]
    fn classical_quantum_examples() {
        let rb = random_density(2, 2, 5).unwrap();
        let single = classical_quantum_state(&[1.0], &linalg::identity(1), &[rb.clone()]).unwrap();
        assert!(max_abs(&(single.matrix() - rb.matrix())) < 1e-15);

        let cc = classical_quantum_state(
            &[0.5, 0.5],
            &linalg::identity(2),
            &[DensityMatrix::basis_projector(2, 0), DensityMatrix::basis_projector(2, 1)],
        )
        .unwrap();
        let d = quantum_discord(&cc, Subsystem::A, &OptimizerConfig::default()).unwrap();
        assert!((d.mutual_information - 1.0).abs() < 1e-12);
        assert!((d.classical.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn classical_quantum_rejects_bad_probabilities() {
        let states = [DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)];
        let err = classical_quantum_state(&[0.7, 0.7], &linalg::identity(2), &states);
        assert!(matches!(err, Err(Error::InvalidProbabilities(_))));
        let err = classical_quantum_state(&[1.2, -0.2], &linalg::identity(2), &states);
        assert!(matches!(err, Err(Error::InvalidProbabilities(_))));
    }
}
