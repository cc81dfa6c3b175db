//! Command-line surface.
//!
//! Exit codes: 0 success, 1 suite failure, 2 usage or parse error, 3 domain
//! validation error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use qcorr_core::channel::{classify, zoo, ClassifyConfig, LocalChannelPair};
use qcorr_core::discord::quantum_discord;
use qcorr_core::entropy::{mutual_information, von_neumann_entropy};
use qcorr_core::harness::{self, ExperimentConfig, HarnessTolerances};
use qcorr_core::recovery::{check_sufficiency, SufficiencyTolerances};
use qcorr_core::{BipartiteState, KrausChannel, OptimizerConfig, Subsystem};

use crate::error::{CliError, CliResult};
use crate::formats::{OptimizerJson, StateFile};
use crate::report::*;
use crate::specs::{load_channel, load_state};

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Quantum mutual information, classical correlation and discord under local channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    A,
    B,
}

impl From<Side> for Subsystem {
    fn from(s: Side) -> Self {
        match s {
            Side::A => Subsystem::A,
            Side::B => Subsystem::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice; `QCORR_SEED` applies when absent.
    #[arg(long, global = true, env = "QCORR_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Measured subsystem for classical correlation and discord.
    #[arg(long, global = true, value_enum, ignore_case = true, default_value = "a")]
    pub side: Side,

    /// Optimizer restarts.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,

    /// Primary tolerance of the command: probe tolerance for `channel`,
    /// equality tolerance for `petz`, D and C invariance threshold for
    /// `invariance` and `suite`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Optimizer config as JSON; `--seed` and `--restarts` given explicitly win.
    #[arg(long, global = true)]
    pub optimizer: Option<PathBuf>,

    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information, classical correlation and discord of a state.
    Discord(StateArgs),
    /// Mutual information and the entropies behind it.
    Mutinfo(StateArgs),
    /// Validate, classify or apply a channel.
    Channel(ChannelArgs),
    /// Correlations before and after a pair of local channels.
    Invariance(InvarianceArgs),
    /// The randomized invariance suite.
    Suite(SuiteArgs),
    /// Relative-entropy sufficiency check with the Petz recovery map.
    Petz(PetzArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State file or inline spec (`bell`, `random:2x2[:rank=r]`, ...).
    #[arg(long)]
    pub state: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelAction {
    Validate,
    Classify,
    Apply,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(value_enum)]
    pub action: ChannelAction,

    /// Channel file or `zoo:<name>[:key=value,...]`.
    #[arg(long, alias = "channel-a")]
    pub channel: String,

    /// Input state for `apply`.
    #[arg(long)]
    pub state: Option<String>,

    /// Commutativity probe samples for `classify`.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    BellIsotropic,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    #[arg(long, required_unless_present = "demo")]
    pub state: Option<String>,

    /// Channel on A; identity when absent.
    #[arg(long)]
    pub channel_a: Option<String>,

    /// Channel on B; identity when absent.
    #[arg(long)]
    pub channel_b: Option<String>,

    #[arg(long, value_enum, conflicts_with_all = ["state", "channel_a", "channel_b"], requires = "p")]
    pub demo: Option<Demo>,

    /// Mixing weight for the demo.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct PetzArgs {
    #[arg(long, alias = "channel-a")]
    pub channel: String,

    /// The state `ρ`.
    #[arg(long)]
    pub state: String,

    /// The reference state `σ` the recovery map is built on.
    #[arg(long)]
    pub sigma: String,
}

/// Effective settings shared by every command.
struct Settings {
    common: Common,
    optimizer: OptimizerConfig,
    harness: HarnessTolerances,
    classify: ClassifyConfig,
    sufficiency: SufficiencyTolerances,
    reversibility_tol: f64,
}

impl Settings {
    fn new(common: &Common, restarts_explicit: bool, seed_explicit: bool) -> CliResult<Self> {
        let mut optimizer = OptimizerConfig::default();
        if let Some(path) = &common.optimizer {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
            let j: OptimizerJson = crate::formats::parse_json(&text, &path.display().to_string())?;
            optimizer = OptimizerConfig::try_from(&j)?;
            if j.restarts == 0 {
                return Err(CliError::Usage("optimizer restarts must be at least 1".into()));
            }
        }
        if restarts_explicit || common.optimizer.is_none() {
            optimizer.restarts = common.restarts as usize;
        }
        if seed_explicit || common.optimizer.is_none() {
            optimizer.seed = common.seed;
        }
        if let Some(t) = common.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Usage(format!("--tol must be a nonnegative number, found {t}")));
            }
        }
        let mut s = Self {
            common: common.clone(),
            optimizer,
            harness: HarnessTolerances::default(),
            classify: ClassifyConfig { probe_seed: optimizer.seed, ..ClassifyConfig::default() },
            sufficiency: SufficiencyTolerances::default(),
            reversibility_tol: 1e-9,
        };
        s.common.seed = optimizer.seed;
        Ok(s)
    }

    fn seed(&self) -> u64 {
        self.optimizer.seed
    }

    fn side(&self) -> Subsystem {
        self.common.side.into()
    }

    fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            optimizer: self.optimizer,
            side: self.side(),
            tolerances: self.harness,
            reversibility_tol: self.reversibility_tol,
            probe_trials: self.classify.probe_trials,
        }
    }

    fn run_config(&self, command: &str) -> RunConfig {
        RunConfig {
            command: command.into(),
            seed: self.seed(),
            side: side_name(self.side()),
            optimizer: OptimizerJson::from(&self.optimizer),
            tolerances: tolerance_json(&self.harness, self.reversibility_tol, self.classify.probe_tol, self.sufficiency.equality, self.sufficiency.recovery),
            probe_trials: self.classify.probe_trials,
            trials: None,
            state: None,
            sigma: None,
            channel_a: None,
            channel_b: None,
            demo: None,
            p: None,
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Write(std::io::Error::other(e)))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, out: &Option<PathBuf>) -> CliResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let to_io = |e: csv::Error| CliError::Write(std::io::Error::other(e));
    w.write_record(header).map_err(to_io)?;
    for row in rows {
        w.write_record(&row).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

fn json_only(s: &Settings, command: &str) -> CliResult<()> {
    match s.common.format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Usage(format!("--format csv is not available for '{command}'"))),
    }
}

fn cmd_discord(s: &Settings, a: &StateArgs) -> CliResult<()> {
    json_only(s, "discord")?;
    let state = load_state(&a.state, s.seed())?;
    let d = quantum_discord(&state, s.side(), &s.optimizer)?;
    let mut config = s.run_config("discord");
    config.state = Some(a.state.clone());
    emit_json(&DiscordReport::new(config, &d), &s.common.out)
}

fn cmd_mutinfo(s: &Settings, a: &StateArgs) -> CliResult<()> {
    json_only(s, "mutinfo")?;
    let state = load_state(&a.state, s.seed())?;
    let mut config = s.run_config("mutinfo");
    config.state = Some(a.state.clone());
    let report = MutinfoReport {
        config,
        mutual_information: mutual_information(&state)?,
        entropy_a: von_neumann_entropy(&state.marginal(Subsystem::A)),
        entropy_b: von_neumann_entropy(&state.marginal(Subsystem::B)),
        entropy_ab: von_neumann_entropy(state.state()),
    };
    emit_json(&report, &s.common.out)
}

fn cmd_channel(s: &Settings, a: &ChannelArgs) -> CliResult<()> {
    json_only(s, "channel")?;
    let ch = load_channel(&a.channel, s.seed())?;
    let mut config = s.run_config("channel");
    config.channel_a = Some(a.channel.clone());
    let mut classify_cfg = s.classify;
    classify_cfg.probe_trials = a.trials as usize;
    if let Some(t) = s.common.tol {
        classify_cfg.probe_tol = t;
    }
    config.probe_trials = classify_cfg.probe_trials;
    config.tolerances.probe = classify_cfg.probe_tol;
    match a.action {
        ChannelAction::Validate => {
            let min_choi = qcorr_core::linalg::hermitian_eigen(&ch.choi_matrix()).min();
            let report = ValidateReport {
                config,
                label: ch.label().into(),
                dim_in: ch.dim_in(),
                dim_out: ch.dim_out(),
                kraus_count: ch.kraus().len(),
                cptp_valid: ch.completeness_deviation() <= qcorr_core::channel::CPTP_TOL && min_choi >= -qcorr_core::channel::CHOI_PSD_TOL,
                completeness_deviation: ch.completeness_deviation(),
                min_choi_eigenvalue: min_choi,
            };
            emit_json(&report, &s.common.out)
        }
        ChannelAction::Classify => {
            let v = classify(&ch, &classify_cfg)?;
            emit_json(&ClassifyReport::new(config, ch.label(), (ch.dim_in(), ch.dim_out()), &v), &s.common.out)
        }
        ChannelAction::Apply => {
            let spec = a.state.as_ref().ok_or_else(|| CliError::Usage("channel apply needs --state".into()))?;
            let input = load_state(spec, s.seed())?;
            config.state = Some(spec.clone());
            let out = ch.apply(input.state())?;
            let keep_factors = ch.dim_in() == ch.dim_out();
            let (da, db) = if keep_factors { (input.dim_a(), input.dim_b()) } else { (ch.dim_out(), 1) };
            let state = BipartiteState::new(out, da, db)?;
            emit_json(&AppliedState { config, state: StateFile::from_state(&state) }, &s.common.out)
        }
    }
}

fn resolve_channel(spec: &Option<String>, d: usize, seed: u64) -> CliResult<KrausChannel> {
    match spec {
        Some(spec) => load_channel(spec, seed),
        None => Ok(zoo::identity(d)),
    }
}

fn cmd_invariance(s: &Settings, a: &InvarianceArgs) -> CliResult<()> {
    let mut exp = s.experiment();
    if let Some(t) = s.common.tol {
        exp.tolerances.discord = t;
        exp.tolerances.classical = t;
    }
    let mut config = s.run_config("invariance");
    config.tolerances = tolerance_json(&exp.tolerances, exp.reversibility_tol, s.classify.probe_tol, s.sufficiency.equality, s.sufficiency.recovery);
    let (report, mi_recovery) = match a.demo {
        Some(Demo::BellIsotropic) => {
            let p = a.p.ok_or_else(|| CliError::Usage("--demo bell-isotropic needs --p".into()))?;
            config.demo = Some("bell-isotropic".into());
            config.p = Some(p);
            let r = harness::bell_isotropic_demo(p, &exp)?;
            let pair = LocalChannelPair::new(
                zoo::identity(2),
                zoo::isotropic(p, &zoo::SpectrumPreserving::Unitary(qcorr_core::linalg::identity(2)), 2)?,
            )?;
            (r, harness::mi_recovery_check(&BipartiteState::bell(), &pair)?)
        }
        None => {
            let spec = a.state.as_ref().ok_or_else(|| CliError::Usage("invariance needs --state or --demo".into()))?;
            let state = load_state(spec, s.seed())?;
            // derive distinct streams so zoo:random on both sides differ
            let ca = resolve_channel(&a.channel_a, state.dim_a(), s.seed())?;
            let cb = resolve_channel(&a.channel_b, state.dim_b(), s.seed().wrapping_add(1))?;
            let pair = LocalChannelPair::new(ca, cb)?;
            config.state = Some(spec.clone());
            config.channel_a = Some(a.channel_a.clone().unwrap_or_else(|| "identity".into()));
            config.channel_b = Some(a.channel_b.clone().unwrap_or_else(|| "identity".into()));
            let mut r = harness::run_invariance_experiment(&state, &pair, &exp)?;
            r.state_spec = spec.clone();
            (r, harness::mi_recovery_check(&state, &pair)?)
        }
    };
    let json = InvarianceJson::new(config, &report, &mi_recovery);
    match s.common.format {
        Format::Json => emit_json(&json, &s.common.out),
        Format::Csv => emit_csv(&InvarianceJson::CSV_HEADER, [json.csv_row()], &s.common.out),
    }
}

/// Runs the suite with trials spread over the rayon pool; the fold is
/// order-independent so the summary matches a sequential run.
pub fn run_suite_parallel(seed: u64, trials: usize, exp: &ExperimentConfig) -> qcorr_core::harness::SuiteSummary {
    let records = harness::suite_jobs(trials)
        .into_par_iter()
        .map(|(sub, t)| harness::suite_trial(sub, seed, t, exp))
        .collect();
    harness::summarize(seed, trials, *exp, records)
}

fn cmd_suite(s: &Settings, a: &SuiteArgs) -> CliResult<()> {
    let mut exp = s.experiment();
    if let Some(t) = s.common.tol {
        exp.tolerances.discord = t;
        exp.tolerances.classical = t;
    }
    let summary = run_suite_parallel(s.seed(), a.trials as usize, &exp);
    let mut config = s.run_config("suite");
    config.trials = Some(a.trials as usize);
    config.tolerances = tolerance_json(&exp.tolerances, exp.reversibility_tol, s.classify.probe_tol, s.sufficiency.equality, s.sufficiency.recovery);
    let json = SuiteJson::new(config, &summary);
    match s.common.format {
        Format::Json => emit_json(&json, &s.common.out)?,
        Format::Csv => emit_csv(&TrialJson::CSV_HEADER, json.records.iter().map(TrialJson::csv_row), &s.common.out)?,
    }
    if summary.passed() {
        Ok(())
    } else {
        let failing: Vec<_> = json.subsuites.iter().filter(|x| x.fail > 0).map(|x| format!("{} ({} failed)", x.subsuite, x.fail)).collect();
        Err(CliError::SuiteFailed(failing.join(", ")))
    }
}

fn cmd_petz(s: &Settings, a: &PetzArgs) -> CliResult<()> {
    json_only(s, "petz")?;
    let ch = load_channel(&a.channel, s.seed())?;
    let rho = load_state(&a.state, s.seed())?;
    let sigma = load_state(&a.sigma, s.seed().wrapping_add(1))?;
    let mut tols = s.sufficiency;
    if let Some(t) = s.common.tol {
        tols.equality = t;
    }
    let r = check_sufficiency(&ch, rho.state(), sigma.state(), &tols)?;
    let mut config = s.run_config("petz");
    config.tolerances.sufficiency_equality = tols.equality;
    config.state = Some(a.state.clone());
    config.sigma = Some(a.sigma.clone());
    config.channel_a = Some(a.channel.clone());
    emit_json(&PetzReport::new(config, &r), &s.common.out)
}

fn explicit(matches: &clap::ArgMatches, id: &str) -> bool {
    let here = matches!(matches.value_source(id), Some(clap::parser::ValueSource::CommandLine | clap::parser::ValueSource::EnvVariable));
    here || matches.subcommand().is_some_and(|(_, sub)| explicit(sub, id))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cmd = <Cli as clap::CommandFactory>::command();
    let matches = match cmd.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let cli = match <Cli as clap::FromArgMatches>::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let result = Settings::new(&cli.common, explicit(&matches, "restarts"), explicit(&matches, "seed")).and_then(|s| match &cli.command {
        Command::Discord(a) => cmd_discord(&s, a),
        Command::Mutinfo(a) => cmd_mutinfo(&s, a),
        Command::Channel(a) => cmd_channel(&s, a),
        Command::Invariance(a) => cmd_invariance(&s, a),
        Command::Suite(a) => cmd_suite(&s, a),
        Command::Petz(a) => cmd_petz(&s, a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qcorr: {e}");
            e.exit_code()
        }
    }
}
