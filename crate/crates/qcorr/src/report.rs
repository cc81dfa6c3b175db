//! Serializable report documents. Every report carries the effective run
//! configuration, including the seed.

use serde::Serialize;

use qcorr_core::channel::{ChannelVerdict, ProbeVerdict};
use qcorr_core::discord::{CorrelationResult, DiscordResult};
use qcorr_core::harness::{Correlations, HarnessTolerances, InvarianceReport, MiRecoveryReport, SuiteSummary, TrialRecord};
use qcorr_core::recovery::SufficiencyReport;
use qcorr_core::Subsystem;

use crate::formats::{encode_matrix, MatrixJson, OptimizerJson, StateFile};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ToleranceJson {
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
    pub classical_slack: f64,
    pub reversibility: f64,
    pub probe: f64,
    pub sufficiency_equality: f64,
    pub sufficiency_recovery: f64,
}

/// Effective configuration of a command invocation.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub side: String,
    pub optimizer: OptimizerJson,
    pub tolerances: ToleranceJson,
    pub probe_trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

pub fn side_name(s: Subsystem) -> String {
    s.to_string()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MeasurementJson {
    pub measurement_class: String,
    /// Columns are the measurement basis vectors.
    pub rotation: MatrixJson,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClassicalJson {
    pub value: f64,
    pub best_measurement: MeasurementJson,
    pub restarts_used: usize,
    pub spread: f64,
    pub evaluations: usize,
    pub measured_side: String,
}

impl From<&CorrelationResult> for ClassicalJson {
    fn from(c: &CorrelationResult) -> Self {
        Self {
            value: c.value,
            best_measurement: MeasurementJson { measurement_class: c.measurement_class.as_str().into(), rotation: encode_matrix(c.best_measurement.rotation()) },
            restarts_used: c.restarts_used,
            spread: c.spread,
            evaluations: c.evaluations,
            measured_side: side_name(c.measured_side),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiscordReport {
    pub config: RunConfig,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub classical: ClassicalJson,
}

impl DiscordReport {
    pub fn new(config: RunConfig, d: &DiscordResult) -> Self {
        Self {
            config,
            mutual_information: d.mutual_information,
            classical_correlation: d.classical.value,
            discord: d.discord,
            classical: (&d.classical).into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MutinfoReport {
    pub config: RunConfig,
    pub mutual_information: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub entropy_ab: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidateReport {
    pub config: RunConfig,
    pub label: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus_count: usize,
    pub cptp_valid: bool,
    pub completeness_deviation: f64,
    pub min_choi_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessJson {
    pub trial: usize,
    pub rho: MatrixJson,
    pub sigma: MatrixJson,
    pub input_commutator: f64,
    pub output_commutator: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ProbeJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_commutator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

impl From<&ProbeVerdict> for ProbeJson {
    fn from(v: &ProbeVerdict) -> Self {
        match v {
            ProbeVerdict::Preserves { trials, tol, max_commutator } => {
                Self { verdict: "preserves", trials: Some(*trials), tol: Some(*tol), max_commutator: Some(*max_commutator), witness: None }
            }
            ProbeVerdict::Inconclusive { trials, tol, max_commutator } => {
                Self { verdict: "inconclusive", trials: Some(*trials), tol: Some(*tol), max_commutator: Some(*max_commutator), witness: None }
            }
            ProbeVerdict::Violates(w) => Self {
                verdict: "violates",
                trials: None,
                tol: None,
                max_commutator: None,
                witness: Some(WitnessJson {
                    trial: w.trial,
                    rho: encode_matrix(w.rho.matrix()),
                    sigma: encode_matrix(w.sigma.matrix()),
                    input_commutator: w.input_commutator,
                    output_commutator: w.output_commutator,
                }),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClassifyReport {
    pub config: RunConfig,
    pub label: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub cptp_valid: bool,
    pub completeness_deviation: f64,
    pub min_choi_eigenvalue: f64,
    pub unital: bool,
    pub linear_rank: usize,
    pub reversible_cptp: bool,
    pub reversibility_deviation: f64,
    pub commutativity_preserving: ProbeJson,
}

impl ClassifyReport {
    pub fn new(config: RunConfig, label: &str, dims: (usize, usize), v: &ChannelVerdict) -> Self {
        Self {
            config,
            label: label.into(),
            dim_in: dims.0,
            dim_out: dims.1,
            cptp_valid: v.cptp_valid,
            completeness_deviation: v.completeness_deviation,
            min_choi_eigenvalue: v.min_choi_eigenvalue,
            unital: v.unital,
            linear_rank: v.linear_rank,
            reversible_cptp: v.reversible_cptp,
            reversibility_deviation: v.reversibility_deviation,
            commutativity_preserving: (&v.commutativity).into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AppliedState {
    pub config: RunConfig,
    #[serde(flatten)]
    pub state: StateFile,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct CorrelationsJson {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
}

impl From<Correlations> for CorrelationsJson {
    fn from(c: Correlations) -> Self {
        Self { mutual_information: c.mutual_information, classical_correlation: c.classical_correlation, discord: c.discord }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerdictsJson {
    pub mutual_information: &'static str,
    pub classical_correlation: &'static str,
    pub discord: &'static str,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InvarianceJson {
    pub config: RunConfig,
    pub state_spec: String,
    pub channel_spec: String,
    pub side: String,
    pub before: CorrelationsJson,
    pub after: CorrelationsJson,
    pub deltas: CorrelationsJson,
    pub reversible_a: bool,
    pub reversible_b: bool,
    pub verdicts: VerdictsJson,
    pub invariant: bool,
    pub monotone: bool,
    pub discord_increased: bool,
    pub mutual_information_recovery: MiRecoveryJson,
}

impl InvarianceJson {
    pub fn new(config: RunConfig, r: &InvarianceReport, mi_recovery: &MiRecoveryReport) -> Self {
        Self {
            config,
            state_spec: r.state_spec.clone(),
            channel_spec: r.channel_spec.clone(),
            side: side_name(r.side),
            before: r.before.into(),
            after: r.after.into(),
            deltas: r.deltas.into(),
            reversible_a: r.reversible_a,
            reversible_b: r.reversible_b,
            verdicts: VerdictsJson {
                mutual_information: r.verdicts.mutual_information.as_str(),
                classical_correlation: r.verdicts.classical_correlation.as_str(),
                discord: r.verdicts.discord.as_str(),
            },
            invariant: r.invariant(),
            monotone: r.monotone(),
            discord_increased: r.discord_increased(),
            mutual_information_recovery: mi_recovery.into(),
        }
    }

    pub const CSV_HEADER: [&'static str; 15] = [
        "state", "channels", "side", "seed", "i_before", "c_before", "d_before", "i_after", "c_after", "d_after", "reversible_a", "reversible_b",
        "verdict_i", "verdict_c", "verdict_d",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.state_spec.clone(),
            self.channel_spec.clone(),
            self.side.clone(),
            self.config.seed.to_string(),
            self.before.mutual_information.to_string(),
            self.before.classical_correlation.to_string(),
            self.before.discord.to_string(),
            self.after.mutual_information.to_string(),
            self.after.classical_correlation.to_string(),
            self.after.discord.to_string(),
            self.reversible_a.to_string(),
            self.reversible_b.to_string(),
            self.verdicts.mutual_information.into(),
            self.verdicts.classical_correlation.into(),
            self.verdicts.discord.into(),
        ]
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MiRecoveryJson {
    pub i_before: f64,
    pub i_after: f64,
    pub delta: f64,
    pub equal: bool,
    pub recovery_error_joint: f64,
    pub recovery_error_product: f64,
    pub joint_recovered: bool,
    pub product_recovered: bool,
    pub support_restricted: bool,
}

impl From<&MiRecoveryReport> for MiRecoveryJson {
    fn from(r: &MiRecoveryReport) -> Self {
        Self {
            i_before: r.i_before,
            i_after: r.i_after,
            delta: r.delta,
            equal: r.equal,
            recovery_error_joint: r.recovery_error_joint,
            recovery_error_product: r.recovery_error_product,
            joint_recovered: r.joint_recovered,
            product_recovered: r.product_recovered,
            support_restricted: r.support_restricted,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SubsuiteJson {
    pub subsuite: &'static str,
    pub pass: usize,
    pub fail: usize,
    pub worst_delta: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TrialJson {
    pub subsuite: &'static str,
    pub trial: usize,
    pub seed: u64,
    pub passed: bool,
    pub delta: f64,
    pub detail: String,
}

impl From<&TrialRecord> for TrialJson {
    fn from(r: &TrialRecord) -> Self {
        Self { subsuite: r.subsuite.name(), trial: r.trial, seed: r.seed, passed: r.passed, delta: r.delta, detail: r.detail.clone() }
    }
}

impl TrialJson {
    pub const CSV_HEADER: [&'static str; 6] = ["subsuite", "trial", "seed", "passed", "delta", "detail"];

    pub fn csv_row(&self) -> Vec<String> {
        vec![self.subsuite.into(), self.trial.to_string(), self.seed.to_string(), self.passed.to_string(), self.delta.to_string(), self.detail.clone()]
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteJson {
    pub config: RunConfig,
    pub passed: bool,
    pub subsuites: Vec<SubsuiteJson>,
    pub records: Vec<TrialJson>,
}

impl SuiteJson {
    pub fn new(config: RunConfig, s: &SuiteSummary) -> Self {
        Self {
            config,
            passed: s.passed(),
            subsuites: s
                .subsuites
                .iter()
                .map(|x| SubsuiteJson { subsuite: x.subsuite.name(), pass: x.pass, fail: x.fail, worst_delta: x.worst_delta })
                .collect(),
            records: s.records.iter().map(TrialJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PetzReport {
    pub config: RunConfig,
    pub s_before: f64,
    pub s_after: f64,
    pub gap: f64,
    pub gap_is_zero: bool,
    pub rho_recovered: bool,
    pub sigma_recovered: bool,
    pub recovery_error_rho: f64,
    pub recovery_error_sigma: f64,
    pub support_restricted: bool,
    pub consistent: bool,
}

impl PetzReport {
    pub fn new(config: RunConfig, r: &SufficiencyReport) -> Self {
        Self {
            config,
            s_before: r.s_before,
            s_after: r.s_after,
            gap: r.gap,
            gap_is_zero: r.gap_is_zero(),
            rho_recovered: r.rho_recovered,
            sigma_recovered: r.sigma_recovered,
            recovery_error_rho: r.recovery_error_rho,
            recovery_error_sigma: r.recovery_error_sigma,
            support_restricted: r.support_restricted,
            consistent: r.consistent(),
        }
    }
}

pub fn tolerance_json(h: &HarnessTolerances, reversibility: f64, probe: f64, equality: f64, recovery: f64) -> ToleranceJson {
    ToleranceJson {
        mutual_information: h.mutual_information,
        classical: h.classical,
        discord: h.discord,
        classical_slack: h.classical_slack,
        reversibility,
        probe,
        sufficiency_equality: equality,
        sufficiency_recovery: recovery,
    }
}
