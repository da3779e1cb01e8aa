//! File formats.
//!
//! * payoff sequences: plain text, `horizon T` and `n N` header lines then
//!   `T` rows of `N` whitespace-separated reals; `#` starts a comment;
//! * games and experiment configs: TOML;
//! * traces: CSV `t,mean_regret,mean_avg_regret` with 17 significant digits;
//! * run summaries: TOML carrying the resolved config and effective seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use regretlab_core::adversaries::{AdversaryKind, AdversarySpec};
use regretlab_core::harness::{ExperimentConfig, RunSummary};
use regretlab_core::learners::{LearnerConfig, LearnerKind};
use regretlab_core::{PayoffVector, StrategicGame};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub fn read_text(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> AppResult<()> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

fn parse_real(token: &str, line: usize) -> AppResult<f64> {
    token.parse::<f64>().map_err(|_| {
        AppError::invalid("payoffs", format!("line {line}: `{token}` is not a number"))
    })
}

fn header_value(line: &str, key: &str, lineno: usize) -> AppResult<usize> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v.parse().map_err(|_| {
            AppError::invalid(
                key,
                format!("line {lineno}: `{v}` is not a nonnegative integer"),
            )
        }),
        _ => Err(AppError::invalid(
            key,
            format!("line {lineno}: expected `{key} <integer>`"),
        )),
    }
}

/// Parses a payoff-sequence file body.
pub fn parse_payoff_sequence(text: &str) -> AppResult<Vec<PayoffVector>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, first) = lines
        .next()
        .ok_or_else(|| AppError::invalid("horizon", "empty payoff file"))?;
    let horizon = header_value(first, "horizon", ln)?;
    let (ln, second) = lines
        .next()
        .ok_or_else(|| AppError::invalid("n", "missing `n` line"))?;
    let n = header_value(second, "n", ln)?;
    if n == 0 {
        return Err(AppError::invalid("n", "need at least one strategy"));
    }
    let mut rows = Vec::with_capacity(horizon);
    for (ln, line) in lines {
        let row = line
            .split_whitespace()
            .map(|tok| parse_real(tok, ln))
            .collect::<AppResult<Vec<_>>>()?;
        if row.len() != n {
            return Err(AppError::invalid(
                "n",
                format!("line {ln}: {} entries, expected {n}", row.len()),
            ));
        }
        let row = PayoffVector::new(row)
            .map_err(|e| AppError::invalid("payoffs", format!("line {ln}: {e}")))?;
        rows.push(row);
    }
    if rows.len() != horizon {
        return Err(AppError::invalid(
            "horizon",
            format!("header says {horizon} rows, found {}", rows.len()),
        ));
    }
    Ok(rows)
}

pub fn format_payoff_sequence(rows: &[PayoffVector]) -> String {
    let n = rows.first().map_or(0, PayoffVector::len);
    let mut out = format!("horizon {}\nn {n}\n", rows.len());
    for row in rows {
        let cells: Vec<String> = row.as_slice().iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_payoff_sequence(path: &Path) -> AppResult<Vec<PayoffVector>> {
    parse_payoff_sequence(&read_text(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    strategies: usize,
    /// One flattened row-major tensor per player.
    payoffs: Vec<Vec<f64>>,
}

fn toml_error(e: toml::de::Error) -> AppError {
    // serde names the offending key first, e.g. "unknown field `m`, expected ...".
    let field = e
        .message()
        .split('`')
        .nth(1)
        .unwrap_or("config")
        .to_string();
    AppError::invalid(field, e.to_string().trim().to_string())
}

pub fn parse_game(text: &str) -> AppResult<StrategicGame> {
    let file: GameFile = toml::from_str(text).map_err(toml_error)?;
    Ok(StrategicGame::new(
        file.players,
        file.strategies,
        file.payoffs,
    )?)
}

pub fn format_game(game: &StrategicGame) -> String {
    let file = GameFile {
        players: game.num_players(),
        strategies: game.num_strategies(),
        payoffs: game.payoff_tables().to_vec(),
    };
    toml::to_string(&file).expect("game tables serialize")
}

/// Seeds are stored as TOML integers when they fit in `i64`, and as decimal
/// strings otherwise.
pub(crate) mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }

    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(seed: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
            match seed {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] u64);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSection {
    pub kind: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "seed_repr::opt"
    )]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

/// The experiment config file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub horizon: usize,
    pub replications: u32,
    #[serde(with = "seed_repr")]
    pub seed: u64,
    pub learner: LearnerSection,
    pub adversary: AdversarySection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<u32>,
}

/// A validated experiment plus its file form with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub file: ExperimentFile,
}

pub fn parse_experiment(text: &str) -> AppResult<ExperimentFile> {
    toml::from_str(text).map_err(toml_error)
}

/// Applies overrides and defaults and validates. Relative payoff-file paths
/// are resolved against `base_dir`.
pub fn resolve_experiment(
    mut file: ExperimentFile,
    base_dir: &Path,
    overrides: Overrides,
) -> AppResult<ResolvedExperiment> {
    if let Some(seed) = overrides.seed {
        file.seed = seed;
    }
    if let Some(reps) = overrides.replications {
        file.replications = reps;
    }
    let learner_kind: LearnerKind = file
        .learner
        .kind
        .parse()
        .map_err(|e| with_field(e, "learner.kind"))?;
    let adversary_kind: AdversaryKind = file
        .adversary
        .kind
        .parse()
        .map_err(|e| with_field(e, "adversary.kind"))?;
    let section = &mut file.adversary;
    let horizon = *section.horizon.get_or_insert(file.horizon);
    let spec = match adversary_kind {
        AdversaryKind::FixedSequence => {
            let rel = section.file.as_deref().ok_or_else(|| {
                AppError::invalid("file", "fixed adversaries need a payoff `file`")
            })?;
            let path: PathBuf = base_dir.join(rel);
            let rows = read_payoff_sequence(&path)?;
            let n = rows.first().map_or(0, PayoffVector::len);
            let declared_n = *section.n.get_or_insert(n);
            let mut spec = AdversarySpec::fixed(rows)?;
            spec.n = declared_n;
            spec.horizon = horizon;
            spec
        }
        kind => {
            if section.file.is_some() {
                return Err(AppError::invalid(
                    "file",
                    "only fixed adversaries read a payoff file",
                ));
            }
            let n = match kind {
                AdversaryKind::TieExploiter => *section.n.get_or_insert(2),
                _ => section
                    .n
                    .ok_or_else(|| AppError::invalid("n", "adversary needs `n`"))?,
            };
            AdversarySpec {
                kind,
                n,
                horizon,
                sequence: None,
                seed: None,
            }
        }
    };
    let spec = AdversarySpec {
        seed: section.seed,
        ..spec
    };
    let config = ExperimentConfig {
        learner: LearnerConfig {
            kind: learner_kind,
            alpha: file.learner.alpha,
            num_strategies: spec.n,
        },
        adversary: spec,
        horizon: file.horizon,
        replications: file.replications,
        master_seed: file.seed,
    };
    config.validate()?;
    Ok(ResolvedExperiment { config, file })
}

fn with_field(e: regretlab_core::Error, field: &str) -> AppError {
    match e {
        regretlab_core::Error::InvalidConfig { reason, .. } => AppError::invalid(field, reason),
        other => AppError::invalid(field, other.to_string()),
    }
}

pub fn load_experiment(path: &Path, overrides: Overrides) -> AppResult<ResolvedExperiment> {
    let file = parse_experiment(&read_text(path)?)?;
    resolve_experiment(file, path.parent().unwrap_or(Path::new(".")), overrides)
}

/// Averaged regret curves as stored in `trace.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub mean_regret: Vec<f64>,
    pub mean_avg_regret: Vec<f64>,
}

impl TraceTable {
    pub fn from_summary(summary: &RunSummary) -> Self {
        TraceTable {
            mean_regret: summary.mean_regret_curve.clone(),
            mean_avg_regret: summary.mean_avg_regret_curve.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.mean_regret.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_regret.is_empty()
    }
}

pub const TRACE_HEADER: &str = "t,mean_regret,mean_avg_regret";

pub fn format_trace(trace: &TraceTable) -> String {
    let mut out = String::with_capacity(48 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (i, (r, a)) in trace
        .mean_regret
        .iter()
        .zip(&trace.mean_avg_regret)
        .enumerate()
    {
        writeln!(out, "{},{r:.16e},{a:.16e}", i + 1).expect("writing to a String");
    }
    out
}

pub fn parse_trace(text: &str) -> AppResult<TraceTable> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(AppError::invalid(
            "trace",
            format!("first line must be `{TRACE_HEADER}`"),
        ));
    }
    let mut table = TraceTable {
        mean_regret: Vec::new(),
        mean_avg_regret: Vec::new(),
    };
    for (i, line) in lines.enumerate() {
        let bad = || AppError::invalid("trace", format!("row {}: `{line}`", i + 1));
        let mut cells = line.split(',');
        let (Some(t), Some(r), Some(a), None) =
            (cells.next(), cells.next(), cells.next(), cells.next())
        else {
            return Err(bad());
        };
        if t.parse::<usize>().map_err(|_| bad())? != i + 1 {
            return Err(bad());
        }
        table.mean_regret.push(r.parse().map_err(|_| bad())?);
        table.mean_avg_regret.push(a.parse().map_err(|_| bad())?);
    }
    Ok(table)
}

pub fn read_trace(path: &Path) -> AppResult<TraceTable> {
    parse_trace(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarySection {
    pub mean_regret: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub final_avg_regret: f64,
    pub replications: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_value: Option<f64>,
}

/// Contents of `summary.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    #[serde(with = "seed_repr")]
    pub seed: u64,
    pub summary: SummarySection,
    pub config: ExperimentFile,
}

impl SummaryFile {
    pub fn new(resolved: &ResolvedExperiment, summary: &RunSummary) -> Self {
        SummaryFile {
            seed: resolved.config.master_seed,
            summary: SummarySection {
                mean_regret: summary.mean_regret,
                std_error: summary.std_error,
                ci95: [summary.ci95.0, summary.ci95.1],
                final_avg_regret: summary.mean_avg_regret_curve.last().copied().unwrap_or(0.0),
                replications: summary.replications,
                bound_kind: summary.bound_kind.map(|k| k.as_str().to_string()),
                bound_value: summary.bound_value,
            },
            config: resolved.file.clone(),
        }
    }
}

pub fn format_summary(summary: &SummaryFile) -> String {
    toml::to_string(summary).expect("summary serializes")
}

pub fn parse_summary(text: &str) -> AppResult<SummaryFile> {
    toml::from_str(text).map_err(toml_error)
}
