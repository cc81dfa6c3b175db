//! Before/after experiments for local channels and the randomized suite that
//! exercises the invariance results.
//!
//! Every experiment records mutual information `I`, classical correlation `C`
//! and discord `D` (all with respect to measurements on `side`) before and
//! after `Λ_a ⊗ Λ_b`, plus whether each local channel is CPTP-reversible.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::zoo::{self, SpectrumPreserving};
use crate::channel::{self, KrausChannel, LocalChannelPair, ProbeVerdict};
use crate::discord::{self, OptimizerConfig};
use crate::entropy;
use crate::error::{Error, Result};
use crate::linalg;
use crate::recovery;
use crate::state::{self, BipartiteState, DensityMatrix, Subsystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlations {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
}

impl Correlations {
    pub fn measure(s: &BipartiteState, side: Subsystem, cfg: &OptimizerConfig) -> Result<Self> {
        let d = discord::quantum_discord(s, side, cfg)?;
        Ok(Self { mutual_information: d.mutual_information, classical_correlation: d.classical.value, discord: d.discord })
    }

    fn minus(&self, other: &Self) -> Self {
        Self {
            mutual_information: self.mutual_information - other.mutual_information,
            classical_correlation: self.classical_correlation - other.classical_correlation,
            discord: self.discord - other.discord,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Invariant,
    Decreased,
    /// Flagged in reports; not an error for non-reversible channels.
    Increased,
}

impl Verdict {
    fn from_delta(delta: f64, tol: f64) -> Self {
        if delta.abs() <= tol {
            Verdict::Invariant
        } else if delta < 0.0 {
            Verdict::Decreased
        } else {
            Verdict::Increased
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Invariant => "invariant",
            Verdict::Decreased => "decreased",
            Verdict::Increased => "increased",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessTolerances {
    /// `|ΔI|` at or below this is "invariant".
    pub mutual_information: f64,
    /// `|ΔC|` at or below this is "invariant".
    pub classical: f64,
    /// `|ΔD|` at or below this is "invariant".
    pub discord: f64,
    /// Allowed optimizer overshoot when checking that `C` does not grow.
    pub classical_slack: f64,
}

impl Default for HarnessTolerances {
    fn default() -> Self {
        Self { mutual_information: 1e-9, classical: 1e-3, discord: 1e-3, classical_slack: 2e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub optimizer: OptimizerConfig,
    pub side: Subsystem,
    pub tolerances: HarnessTolerances,
    pub reversibility_tol: f64,
    pub probe_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            side: Subsystem::A,
            tolerances: HarnessTolerances::default(),
            reversibility_tol: 1e-9,
            probe_trials: 200,
        }
    }
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        self.optimizer.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.optimizer.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    pub mutual_information: Verdict,
    pub classical_correlation: Verdict,
    pub discord: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub state_spec: String,
    pub channel_spec: String,
    pub side: Subsystem,
    pub before: Correlations,
    pub after: Correlations,
    /// `after - before`.
    pub deltas: Correlations,
    pub reversible_a: bool,
    pub reversible_b: bool,
    pub verdicts: Verdicts,
    pub tolerances: HarnessTolerances,
    pub optimizer: OptimizerConfig,
}

impl InvarianceReport {
    pub fn seed(&self) -> u64 {
        self.optimizer.seed
    }

    /// Every quantity judged invariant.
    pub fn invariant(&self) -> bool {
        self.verdicts.mutual_information == Verdict::Invariant
            && self.verdicts.classical_correlation == Verdict::Invariant
            && self.verdicts.discord == Verdict::Invariant
    }

    /// `I` did not grow and `C` did not grow beyond optimizer slack.
    pub fn monotone(&self) -> bool {
        self.deltas.mutual_information <= self.tolerances.mutual_information
            && self.deltas.classical_correlation <= self.tolerances.classical_slack
    }

    pub fn discord_increased(&self) -> bool {
        self.verdicts.discord == Verdict::Increased
    }
}

fn state_description(s: &BipartiteState) -> String {
    format!("{}x{} state", s.dim_a(), s.dim_b())
}

/// Measures `I, C, D` before and after `pair` and attaches reversibility
/// verdicts for both local channels.
pub fn run_invariance_experiment(s: &BipartiteState, pair: &LocalChannelPair, cfg: &ExperimentConfig) -> Result<InvarianceReport> {
    let after_state = channel::apply_local(pair, s)?;
    let before = Correlations::measure(s, cfg.side, &cfg.optimizer)?;
    let after = Correlations::measure(&after_state, cfg.side, &cfg.optimizer)?;
    let deltas = after.minus(&before);
    let tol = cfg.tolerances;
    Ok(InvarianceReport {
        state_spec: state_description(s),
        channel_spec: pair.label(),
        side: cfg.side,
        before,
        after,
        deltas,
        reversible_a: recovery::is_reversible_cptp(&pair.channel_a, cfg.reversibility_tol),
        reversible_b: recovery::is_reversible_cptp(&pair.channel_b, cfg.reversibility_tol),
        verdicts: Verdicts {
            mutual_information: Verdict::from_delta(deltas.mutual_information, tol.mutual_information),
            classical_correlation: Verdict::from_delta(deltas.classical_correlation, tol.classical),
            discord: Verdict::from_delta(deltas.discord, tol.discord),
        },
        tolerances: tol,
        optimizer: cfg.optimizer,
    })
}

/// Maximum entry deviation allowed between the channel output and the Werner
/// mixture in [`bell_isotropic_demo`].
pub const WERNER_MATCH_TOL: f64 = 1e-12;

/// Applies `id ⊗ Λ_iso` (with `Γ` the identity) to `(|00⟩+|11⟩)/√2`.
///
/// The output must be `p|Φ⁺⟩⟨Φ⁺| + (1-p) I/4`; a mismatch beyond
/// [`WERNER_MATCH_TOL`] is reported as a consistency error.
pub fn bell_isotropic_demo(p: f64, cfg: &ExperimentConfig) -> Result<InvarianceReport> {
    let bell = BipartiteState::bell();
    let iso = zoo::isotropic(p, &SpectrumPreserving::Unitary(linalg::identity(2)), 2)?;
    let pair = LocalChannelPair::new(zoo::identity(2), iso)?;
    let out = channel::apply_local(&pair, &bell)?;
    let werner = BipartiteState::werner(p)?;
    let mismatch = linalg::max_abs(&(out.matrix() - werner.matrix()));
    if mismatch > WERNER_MATCH_TOL {
        return Err(Error::NumericalConsistency { quantity: "Werner output", first: mismatch, second: 0.0, tolerance: WERNER_MATCH_TOL });
    }
    let mut report = run_invariance_experiment(&bell, &pair, cfg)?;
    report.state_spec = String::from("bell");
    Ok(report)
}

/// Threshold on both trace distances for "recovered" in [`mi_recovery_check`].
pub const MI_RECOVERY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MiRecoveryReport {
    pub i_before: f64,
    pub i_after: f64,
    /// `i_after - i_before`.
    pub delta: f64,
    pub equal: bool,
    /// Trace distance between `ρ_AB` and its recovery.
    pub recovery_error_joint: f64,
    /// Trace distance between `ρ_A ⊗ ρ_B` and its recovery.
    pub recovery_error_product: f64,
    pub joint_recovered: bool,
    pub product_recovered: bool,
    pub support_restricted: bool,
}

impl MiRecoveryReport {
    /// Equality of mutual information matches joint recoverability of both
    /// states.
    pub fn consistent(&self) -> bool {
        !self.equal || (self.joint_recovered && self.product_recovered)
    }
}

/// Mutual information before and after `pair`, and whether the recovery map
/// of `Λ_a ⊗ Λ_b` for the reference `ρ_A ⊗ ρ_B` restores both `ρ_AB` and
/// `ρ_A ⊗ ρ_B`.
pub fn mi_recovery_check(s: &BipartiteState, pair: &LocalChannelPair) -> Result<MiRecoveryReport> {
    let product_channel = pair.product();
    let after_state = channel::apply_local(pair, s)?;
    let i_before = entropy::mutual_information(s)?;
    let i_after = entropy::mutual_information(&after_state)?;
    let reference = state::tensor(&s.marginal(Subsystem::A), &s.marginal(Subsystem::B));
    let petz = recovery::petz_map(&product_channel, reference.state())?;
    let recovered_joint = petz.apply_matrix(after_state.matrix());
    let recovered_product = petz.apply_matrix(&product_channel.apply_matrix(reference.matrix()));
    let recovery_error_joint = recovery::trace_distance(&recovered_joint, s.matrix());
    let recovery_error_product = recovery::trace_distance(&recovered_product, reference.matrix());
    let delta = i_after - i_before;
    Ok(MiRecoveryReport {
        i_before,
        i_after,
        delta,
        equal: delta.abs() <= HarnessTolerances::default().mutual_information,
        recovery_error_joint,
        recovery_error_product,
        joint_recovered: recovery_error_joint <= MI_RECOVERY_TOL,
        product_recovered: recovery_error_product <= MI_RECOVERY_TOL,
        support_restricted: petz.support_restricted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsuite {
    LocalUnitaryInvariance,
    DecoheringNullification,
    IsotropicBellDecrease,
    CommutativityProbes,
    MutualInformationRecovery,
    ClassicalMonotonicity,
}

impl Subsuite {
    pub const ALL: [Subsuite; 6] = [
        Subsuite::LocalUnitaryInvariance,
        Subsuite::DecoheringNullification,
        Subsuite::IsotropicBellDecrease,
        Subsuite::CommutativityProbes,
        Subsuite::MutualInformationRecovery,
        Subsuite::ClassicalMonotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subsuite::LocalUnitaryInvariance => "local_unitary_invariance",
            Subsuite::DecoheringNullification => "decohering_nullification",
            Subsuite::IsotropicBellDecrease => "isotropic_bell_decrease",
            Subsuite::CommutativityProbes => "commutativity_probes",
            Subsuite::MutualInformationRecovery => "mutual_information_recovery",
            Subsuite::ClassicalMonotonicity => "classical_monotonicity",
        }
    }

    fn index(self) -> u64 {
        Subsuite::ALL.iter().position(|&s| s == self).unwrap_or(0) as u64
    }

    /// Number of trial records this subsuite produces for a `trials` budget.
    pub fn trial_count(self, trials: usize) -> usize {
        match self {
            Subsuite::CommutativityProbes => PROBE_CASES,
            _ => trials,
        }
    }
}

impl fmt::Display for Subsuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub subsuite: Subsuite,
    pub trial: usize,
    pub seed: u64,
    pub passed: bool,
    /// The subsuite's figure of merit for this trial (see [`suite_trial`]).
    pub delta: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsuiteSummary {
    pub subsuite: Subsuite,
    pub pass: usize,
    pub fail: usize,
    /// Largest `|delta|` over the subsuite's trials.
    pub worst_delta: f64,
}

impl SubsuiteSummary {
    pub fn passed(&self) -> bool {
        self.fail == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub seed: u64,
    pub trials: usize,
    pub config: ExperimentConfig,
    pub subsuites: Vec<SubsuiteSummary>,
    pub records: Vec<TrialRecord>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.subsuites.iter().all(SubsuiteSummary::passed)
    }
}

fn trial_rng(seed: u64, subsuite: Subsuite) -> ChaCha8Rng {
    let mut rng = linalg::seeded_rng(seed);
    rng.set_stream(subsuite.index());
    rng
}

/// Random bipartite state: 2x2 mostly, 2x3 on every fourth trial, random rank.
fn random_bipartite(trial: usize, rng: &mut ChaCha8Rng) -> Result<BipartiteState> {
    let (da, db) = if trial % 4 == 3 { (2, 3) } else { (2, 2) };
    let rank = rng.random_range(1..=da * db);
    BipartiteState::new(state::random_density_with(da * db, rank, rng)?, da, db)
}

fn random_two_qubit(rng: &mut ChaCha8Rng) -> Result<BipartiteState> {
    let rank = rng.random_range(1..=4);
    BipartiteState::new(state::random_density_with(4, rank, rng)?, 2, 2)
}

/// A random member of the channel zoo on dimension `d`.
fn random_zoo_channel(d: usize, rng: &mut ChaCha8Rng) -> Result<KrausChannel> {
    let p: f64 = rng.random();
    Ok(match rng.random_range(0..7) {
        0 => zoo::unitary(linalg::random_unitary(d, rng))?,
        1 => zoo::depolarizing(p, d)?,
        2 => zoo::completely_decohering(&linalg::random_unitary(d, rng))?,
        3 => zoo::isotropic(p, &SpectrumPreserving::Unitary(linalg::random_unitary(d, rng)), d)?,
        4 => zoo::isotropic(p / (d as f64 + 1.0), &SpectrumPreserving::Transpose, d)?,
        5 => {
            let basis = linalg::random_unitary(d, rng);
            let prepared = (0..d)
                .map(|_| {
                    let rank = rng.random_range(1..=d);
                    state::random_density_with(d, rank, rng)
                })
                .collect::<Result<Vec<_>>>()?;
            zoo::measure_and_prepare(&basis, &prepared)?
        }
        _ => zoo::random(d, d, 2, rng)?,
    })
}

const PROBE_CASES: usize = 8;

/// Probe case `k`: the channel and whether it is expected to preserve
/// commutativity.
fn probe_case(k: usize, rng: &mut ChaCha8Rng) -> Result<(KrausChannel, bool)> {
    let plus = DensityMatrix::new(linalg::from_rows(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]))?;
    Ok(match k {
        0 => (zoo::unitary(linalg::random_unitary(2, rng))?, true),
        1 => (zoo::unitary(linalg::random_unitary(3, rng))?, true),
        2 => (zoo::completely_decohering(&linalg::random_unitary(2, rng))?, true),
        3 => (zoo::completely_decohering(&linalg::random_unitary(3, rng))?, true),
        4 => (zoo::depolarizing(0.5, 2)?, true),
        5 => (zoo::isotropic(0.6, &SpectrumPreserving::Unitary(linalg::random_unitary(3, rng)), 3)?, true),
        6 => (zoo::measure_and_prepare(&linalg::identity(2), &[DensityMatrix::basis_projector(2, 0), plus])?, false),
        _ => (zoo::random(2, 2, 2, rng)?, false),
    })
}

/// Runs one trial of one subsuite with trial seed `seed + trial`.
///
/// `delta` per subsuite: `|ΔD|` for local unitaries, post-channel `D` for
/// decohering, `D_after - D_before` for the isotropic Bell case, the largest
/// output commutator for probes, `|ΔI|` of the unitary leg for the mutual
/// information check, and `ΔC` for monotonicity.
pub fn suite_trial(subsuite: Subsuite, seed: u64, trial: usize, cfg: &ExperimentConfig) -> TrialRecord {
    let trial_seed = seed.wrapping_add(trial as u64);
    let cfg = cfg.with_seed(trial_seed);
    let outcome = run_trial(subsuite, trial, &mut trial_rng(trial_seed, subsuite), &cfg);
    let (passed, delta, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, 0.0, format!("error: {e}")),
    };
    TrialRecord { subsuite, trial, seed: trial_seed, passed, delta, detail }
}

fn run_trial(subsuite: Subsuite, trial: usize, rng: &mut ChaCha8Rng, cfg: &ExperimentConfig) -> Result<(bool, f64, String)> {
    let tol = cfg.tolerances;
    match subsuite {
        Subsuite::LocalUnitaryInvariance => {
            let s = random_bipartite(trial, rng)?;
            let pair = LocalChannelPair::new(
                zoo::unitary(linalg::random_unitary(s.dim_a(), rng))?,
                zoo::unitary(linalg::random_unitary(s.dim_b(), rng))?,
            )?;
            let r = run_invariance_experiment(&s, &pair, cfg)?;
            let ok = r.deltas.discord.abs() <= tol.discord
                && r.deltas.mutual_information.abs() <= tol.mutual_information
                && r.reversible_a
                && r.reversible_b;
            Ok((ok, r.deltas.discord.abs(), format!("{}: D {} -> {}", r.state_spec, r.before.discord, r.after.discord)))
        }
        Subsuite::DecoheringNullification => {
            let s = random_bipartite(trial, rng)?;
            let d_measured = s.dim_of(cfg.side);
            let dec = zoo::completely_decohering(&linalg::random_unitary(d_measured, rng))?;
            let id = zoo::identity(s.dim_of(cfg.side.other()));
            let pair = match cfg.side {
                Subsystem::A => LocalChannelPair::new(dec, id)?,
                Subsystem::B => LocalChannelPair::new(id, dec)?,
            };
            let r = run_invariance_experiment(&s, &pair, cfg)?;
            let ok = r.after.discord <= tol.discord && !r.reversible_a;
            Ok((ok, r.after.discord, format!("{}: D {} -> {}", r.state_spec, r.before.discord, r.after.discord)))
        }
        Subsuite::IsotropicBellDecrease => {
            let u: f64 = rng.random();
            let (gamma, p) = if trial % 2 == 0 {
                (SpectrumPreserving::Unitary(linalg::random_unitary(2, rng)), 0.9 * u)
            } else {
                (SpectrumPreserving::Transpose, u / 3.0)
            };
            let iso = zoo::isotropic(p, &gamma, 2)?;
            let label = String::from(iso.label());
            let pair = LocalChannelPair::new(zoo::identity(2), iso)?;
            let r = run_invariance_experiment(&BipartiteState::bell(), &pair, cfg)?;
            let ok = -r.deltas.discord > tol.discord && !r.reversible_b;
            Ok((ok, r.deltas.discord, format!("{label}: D {} -> {}", r.before.discord, r.after.discord)))
        }
        Subsuite::CommutativityProbes => {
            let (ch, expect_preserves) = probe_case(trial, rng)?;
            let verdict = channel::preserves_commutativity_probe(&ch, cfg.probe_trials, cfg.seed(), 1e-9);
            let (ok, delta) = match &verdict {
                ProbeVerdict::Preserves { max_commutator, .. } => (expect_preserves, *max_commutator),
                ProbeVerdict::Violates(w) => (!expect_preserves, w.output_commutator),
                ProbeVerdict::Inconclusive { max_commutator, .. } => (false, *max_commutator),
            };
            let word = match verdict {
                ProbeVerdict::Preserves { .. } => "preserves",
                ProbeVerdict::Violates(_) => "violates",
                ProbeVerdict::Inconclusive { .. } => "inconclusive",
            };
            Ok((ok, delta, format!("{} (d={}): {word}", ch.label(), ch.dim_in())))
        }
        Subsuite::MutualInformationRecovery => {
            let s = random_bipartite(trial, rng)?;
            let unitaries = LocalChannelPair::new(
                zoo::unitary(linalg::random_unitary(s.dim_a(), rng))?,
                zoo::unitary(linalg::random_unitary(s.dim_b(), rng))?,
            )?;
            let inv = mi_recovery_check(&s, &unitaries)?;
            let inv_ok = inv.equal && inv.recovery_error_joint <= 1e-9 && inv.recovery_error_product <= 1e-9;

            // a generic full-rank correlated state for the strict-decrease leg
            let generic = BipartiteState::new(state::random_density_with(s.dim_a() * s.dim_b(), s.dim_a() * s.dim_b(), rng)?, s.dim_a(), s.dim_b())?;
            let noisy = LocalChannelPair::new(zoo::depolarizing(0.5, s.dim_a())?, zoo::identity(s.dim_b()))?;
            let dec = mi_recovery_check(&generic, &noisy)?;
            let dec_ok = dec.delta < -1e-6 && !dec.joint_recovered && dec.consistent();
            Ok((
                inv_ok && dec_ok,
                inv.delta.abs(),
                format!("unitary dI={:e}, depolarizing dI={:e} joint err {:e}", inv.delta, dec.delta, dec.recovery_error_joint),
            ))
        }
        Subsuite::ClassicalMonotonicity => {
            let s = random_two_qubit(rng)?;
            let pair = LocalChannelPair::new(random_zoo_channel(2, rng)?, random_zoo_channel(2, rng)?)?;
            let after = channel::apply_local(&pair, &s)?;
            let before_c = discord::classical_correlation(&s, cfg.side, &cfg.optimizer)?.value;
            let after_c = discord::classical_correlation(&after, cfg.side, &cfg.optimizer)?.value;
            let delta = after_c - before_c;
            Ok((delta <= tol.classical_slack, delta, format!("{}: C {before_c} -> {after_c}", pair.label())))
        }
    }
}

/// Folds trial records into per-subsuite counts, in [`Subsuite::ALL`] order.
pub fn summarize(seed: u64, trials: usize, config: ExperimentConfig, mut records: Vec<TrialRecord>) -> SuiteSummary {
    records.sort_by(|a, b| (a.subsuite, a.trial).cmp(&(b.subsuite, b.trial)));
    let subsuites = Subsuite::ALL
        .iter()
        .map(|&sub| {
            let mine = records.iter().filter(|r| r.subsuite == sub);
            let (mut pass, mut fail, mut worst) = (0, 0, 0.0f64);
            for r in mine {
                if r.passed {
                    pass += 1;
                } else {
                    fail += 1;
                }
                worst = worst.max(r.delta.abs());
            }
            SubsuiteSummary { subsuite: sub, pass, fail, worst_delta: worst }
        })
        .collect();
    SuiteSummary { seed, trials, config, subsuites, records }
}

/// All `(subsuite, trial)` jobs for a run, in canonical order.
pub fn suite_jobs(trials: usize) -> Vec<(Subsuite, usize)> {
    Subsuite::ALL
        .iter()
        .flat_map(|&s| (0..s.trial_count(trials)).map(move |t| (s, t)))
        .collect()
}

/// Runs every subsuite sequentially. Trials are independent, so callers with
/// threads can run [`suite_jobs`] through [`suite_trial`] in parallel and
/// [`summarize`] the records to the same result.
pub fn invariance_suite(seed: u64, trials: usize, cfg: &ExperimentConfig) -> Result<SuiteSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let records = suite_jobs(trials)
        .into_iter()
        .map(|(sub, t)| suite_trial(sub, seed, t, cfg))
        .collect();
    Ok(summarize(seed, trials, *cfg, records))
}
