//! Experiment configuration, seeded end-to-end trials, rate-scale sweeps
//! and result emission.
//!
//! A sweep multiplies every rate `Q_T` by each configured scale factor and
//! runs `trials` independent trials per scale. Trial `t` at sweep point `s`
//! uses the seed [`derive_seed`]`(master, s, t)`, so results do not depend
//! on scheduling; aggregation always folds in `(scale, trial)` order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::misclassification;
use crate::model::{enumerate_assignments, gch_threshold, in_xi, ModelParams, XI_TOLERANCE};
use crate::refine::refine_all;
use crate::rng::derive_seed;
use crate::sampler::{sample_hsbm, sample_labels, split_hypergraph, Strategy};
use crate::spectral::{stage_one, StageOneSettings, DEFAULT_RADIUS_MULTIPLIER, DEFAULT_TRIM_CONSTANT};

pub const CSV_HEADER: &str = "scale,gch,trials,exact_rate,stage1_err_mean,final_err_mean,seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateSpec {
    /// `q_in` when all members share a community, `q_out` otherwise.
    Symmetric { q_in: f64, q_out: f64 },
    Constant { rate: f64 },
    /// Explicit rate for every order-`d` assignment vector.
    Table { entries: Vec<RateEntry> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub assignment: Vec<u32>,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Uniform when omitted.
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    pub rates: RateSpec,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ModelParams> {
        let prior = self
            .prior
            .clone()
            .unwrap_or_else(|| vec![1.0 / self.k as f64; self.k]);
        match &self.rates {
            RateSpec::Symmetric { q_in, q_out } => {
                let (q_in, q_out) = (*q_in, *q_out);
                ModelParams::from_fn(self.n, self.k, self.d, prior, |t| {
                    if t.iter().filter(|&&c| c > 0).count() == 1 {
                        q_in
                    } else {
                        q_out
                    }
                })
            }
            RateSpec::Constant { rate } => ModelParams::from_fn(self.n, self.k, self.d, prior, |_| *rate),
            RateSpec::Table { entries } => {
                let classes = enumerate_assignments(self.k, self.d as u32);
                let mut rates = vec![None; classes.len()];
                for entry in entries {
                    let idx = classes
                        .iter()
                        .position(|t| t.counts() == entry.assignment.as_slice())
                        .ok_or_else(|| {
                            Error::Config(format!(
                                "{:?} is not a length-{} vector summing to {}",
                                entry.assignment, self.k, self.d
                            ))
                        })?;
                    if rates[idx].replace(entry.rate).is_some() {
                        return Err(Error::Config(format!("duplicate rate for {:?}", entry.assignment)));
                    }
                }
                let rates = rates
                    .into_iter()
                    .zip(&classes)
                    .map(|(r, t)| r.ok_or_else(|| Error::Config(format!("missing rate for {t}"))))
                    .collect::<Result<Vec<_>>>()?;
                ModelParams::new(self.n, self.k, self.d, prior, rates)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaFormula {
    /// `multiplier * sqrt(ln n)`
    #[default]
    SqrtLogN,
    /// `multiplier * ln ln n`
    LogLogN,
    /// `multiplier`
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaChoice {
    #[serde(default)]
    pub formula: GammaFormula,
    #[serde(default = "one")]
    pub multiplier: f64,
}

impl Default for GammaChoice {
    fn default() -> Self {
        Self { formula: GammaFormula::SqrtLogN, multiplier: 1.0 }
    }
}

impl GammaChoice {
    pub fn value(&self, n: usize) -> f64 {
        let ln = (n as f64).ln();
        self.multiplier
            * match self.formula {
                GammaFormula::SqrtLogN => ln.sqrt(),
                GammaFormula::LogLogN => ln.ln(),
                GammaFormula::Constant => 1.0,
            }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv|json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn one() -> f64 {
    1.0
}

fn default_trim_constant() -> f64 {
    DEFAULT_TRIM_CONSTANT
}

fn default_radius_multiplier() -> f64 {
    DEFAULT_RADIUS_MULTIPLIER
}

fn default_trials() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub gamma: GammaChoice,
    /// `C` in `tau = C * Q_max * gamma_n`.
    #[serde(default = "default_trim_constant")]
    pub trim_constant: f64,
    /// Multiplier on `gamma_n^2 / (n ln gamma_n)`.
    #[serde(default = "default_radius_multiplier")]
    pub radius_multiplier: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Rate scale factors; a single scale of 1 when omitted.
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
    /// Sampling strategy; chosen from the candidate count when omitted.
    #[serde(default)]
    pub strategy: Option<Strategy>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn params(&self) -> Result<ModelParams> {
        self.model.build()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![1.0])
    }

    pub fn gamma_n(&self) -> f64 {
        self.gamma.value(self.model.n)
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy.unwrap_or_else(|| Strategy::auto(self.model.n, self.model.d))
    }

    pub fn stage_one_settings(&self) -> StageOneSettings {
        StageOneSettings {
            gamma_n: self.gamma_n(),
            trim_constant: self.trim_constant,
            radius_multiplier: self.radius_multiplier,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.params().map_err(|e| Error::Config(e.to_string()))?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if matches!(&self.sweep, Some(s) if s.is_empty()) {
            return Err(Error::Config("sweep must list at least one scale".into()));
        }
        for s in self.scales() {
            params
                .scaled(s)
                .map_err(|e| Error::Config(format!("scale {s}: {e}")))?;
        }
        let gamma = self.gamma_n();
        let rate = gamma / params.log_n();
        if !(gamma > 1.0 && rate < 1.0) {
            return Err(Error::Config(format!(
                "gamma_n = {gamma} must exceed 1 and stay below ln n = {}",
                params.log_n()
            )));
        }
        if !(self.trim_constant > 0.0 && self.radius_multiplier > 0.0) {
            return Err(Error::Config("trim_constant and radius_multiplier must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub sampling_s: f64,
    pub stage1_s: f64,
    pub stage2_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub scale: f64,
    pub gch: f64,
    pub gch_pair: (usize, usize),
    pub t_star: f64,
    pub in_xi: bool,
    pub stage1_misclassification: Option<f64>,
    pub final_misclassification: Option<f64>,
    pub exact: bool,
    /// Set when a stage returned an error; the fields it would have
    /// produced stay `None`.
    pub failure: Option<String>,
    pub timings: StageTimings,
}

/// Full pipeline for one seed: labels, hypergraph, split, Stage 1 on `G_1`,
/// Stage 2 on `G_2`, evaluation against the ground truth.
///
/// Fails only if the scaled parameters are invalid; stage errors are
/// recorded in [`TrialRecord::failure`].
pub fn run_trial(cfg: &ExperimentConfig, scale: f64, seed: u64) -> Result<TrialRecord> {
    let params = cfg.params()?.scaled(scale)?;
    let gch = gch_threshold(&params)?;
    let mut record = TrialRecord {
        seed,
        scale,
        gch: gch.value,
        gch_pair: gch.pair,
        t_star: gch.t_star,
        in_xi: in_xi(&params, XI_TOLERANCE).is_some(),
        stage1_misclassification: None,
        final_misclassification: None,
        exact: false,
        failure: None,
        timings: StageTimings::default(),
    };
    if let Err(e) = run_stages(cfg, &params, seed, &mut record) {
        record.failure = Some(e.to_string());
    }
    Ok(record)
}

fn run_stages(cfg: &ExperimentConfig, params: &ModelParams, seed: u64, record: &mut TrialRecord) -> Result<()> {
    let gamma_n = cfg.gamma_n();

    let clock = Instant::now();
    let truth = sample_labels(params, seed);
    let g = sample_hsbm(params, &truth, seed, cfg.strategy())?;
    let split = split_hypergraph(&g, gamma_n, seed)?;
    record.timings.sampling_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let (initial, _) = stage_one(&split.g1, params, &cfg.stage_one_settings(), seed)?;
    record.timings.stage1_s = clock.elapsed().as_secs_f64();
    record.stage1_misclassification = Some(misclassification(&initial, &truth)?.misclassification);

    let clock = Instant::now();
    let refined = refine_all(&split.g2, &initial, params, gamma_n)?;
    record.timings.stage2_s = clock.elapsed().as_secs_f64();
    let report = misclassification(&refined, &truth)?;
    record.final_misclassification = Some(report.misclassification);
    record.exact = report.exact;
    Ok(())
}

/// One aggregated sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scale: f64,
    pub gch: f64,
    pub trials: usize,
    pub exact_rate: f64,
    /// Mean over trials that reached Stage 1; NaN when none did.
    #[serde(deserialize_with = "nullable_f64")]
    pub stage1_err_mean: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub final_err_mean: f64,
    pub seed: u64,
}

fn nullable_f64<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NAN))
}

impl SweepRow {
    pub fn aggregate(scale: f64, seed: u64, records: &[TrialRecord]) -> Self {
        let mean = |values: Vec<f64>| {
            if values.is_empty() {
                f64::NAN
            } else {
                values.iter().sum::<f64>() / values.len() as f64
            }
        };
        let trials = records.len();
        Self {
            scale,
            gch: records.first().map_or(f64::NAN, |r| r.gch),
            trials,
            exact_rate: records.iter().filter(|r| r.exact).count() as f64 / trials.max(1) as f64,
            stage1_err_mean: mean(records.iter().filter_map(|r| r.stage1_misclassification).collect()),
            final_err_mean: mean(records.iter().filter_map(|r| r.final_misclassification).collect()),
            seed,
        }
    }
}

/// A drop in exact-recovery rate between adjacent scales (sorted by scale).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion {
    pub lower_scale: f64,
    pub upper_scale: f64,
    pub drop: f64,
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub records: Vec<Vec<TrialRecord>>,
    /// Scale at which the GCH threshold crosses 1, linearly interpolated
    /// between adjacent sweep points.
    pub crossing_scale: Option<f64>,
    pub inversions: Vec<Inversion>,
}

impl SweepSummary {
    pub fn from_records(scales: &[f64], seed: u64, records: Vec<Vec<TrialRecord>>) -> Self {
        let rows: Vec<SweepRow> = scales
            .iter()
            .zip(&records)
            .map(|(&s, r)| SweepRow::aggregate(s, seed, r))
            .collect();
        let mut sorted: Vec<&SweepRow> = rows.iter().collect();
        sorted.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        let inversions = sorted
            .windows(2)
            .filter(|w| w[1].exact_rate < w[0].exact_rate)
            .map(|w| Inversion {
                lower_scale: w[0].scale,
                upper_scale: w[1].scale,
                drop: w[0].exact_rate - w[1].exact_rate,
            })
            .collect();
        let crossing_scale = crossing(&sorted);
        Self { rows, records, crossing_scale, inversions }
    }

    /// Exact-recovery rate nondecreasing in scale up to `max_inversions`
    /// drops, each no larger than `max_drop`.
    pub fn is_monotone_within(&self, max_drop: f64, max_inversions: usize) -> bool {
        self.inversions.len() <= max_inversions
            && self.inversions.iter().all(|inv| inv.drop <= max_drop + 1e-12)
    }
}

fn crossing(sorted: &[&SweepRow]) -> Option<f64> {
    if let Some(row) = sorted.iter().find(|r| r.gch == 1.0) {
        return Some(row.scale);
    }
    sorted.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if (a.gch - 1.0) * (b.gch - 1.0) < 0.0 {
            Some(a.scale + (1.0 - a.gch) * (b.scale - a.scale) / (b.gch - a.gch))
        } else {
            None
        }
    })
}

/// Runs every `(scale, trial)` pair, in parallel when `workers > 1`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let scales = cfg.scales();
    let jobs: Vec<(usize, usize)> = (0..scales.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let run = |&(s, t): &(usize, usize)| run_trial(cfg, scales[s], derive_seed(cfg.seed, s as u64, t as u64));
    let flat: Vec<TrialRecord> = match cfg.workers {
        Some(1) => jobs.iter().map(run).collect::<Result<_>>()?,
        workers => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.unwrap_or(0))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?
        }
    };
    let mut records = vec![Vec::with_capacity(cfg.trials); scales.len()];
    for ((s, _), record) in jobs.iter().zip(flat) {
        records[*s].push(record);
    }
    Ok(SweepSummary::from_records(&scales, cfg.seed, records))
}

/// Fixed 17-significant-digit rendering; NaN as `NaN`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_float(r.scale),
            format_float(r.gch),
            r.trials,
            format_float(r.exact_rate),
            format_float(r.stage1_err_mean),
            format_float(r.final_err_mean),
            r.seed
        );
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    let num = |x: f64| if x.is_finite() { format_float(x) } else { "null".to_string() };
    let mut out = String::from("[");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            out,
            "  {{\"scale\": {}, \"gch\": {}, \"trials\": {}, \"exact_rate\": {}, \
             \"stage1_err_mean\": {}, \"final_err_mean\": {}, \"seed\": {}}}",
            num(r.scale),
            num(r.gch),
            r.trials,
            num(r.exact_rate),
            num(r.stage1_err_mean),
            num(r.final_err_mean),
            r.seed
        );
    }
    if !rows.is_empty() {
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

pub fn render(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    }
}

pub fn emit(rows: &[SweepRow], format: OutputFormat, path: &Path) -> Result<()> {
    fs::write(path, render(rows, format)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let err = |message: String| Error::Parse { path: PathBuf::from("<csv>"), message };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(err(format!("unexpected header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(err(format!("expected 7 fields in `{line}`")));
            }
            let float = |s: &str| s.parse::<f64>().map_err(|e| err(format!("`{s}`: {e}")));
            let int = |s: &str| s.parse::<u64>().map_err(|e| err(format!("`{s}`: {e}")));
            Ok(SweepRow {
                scale: float(f[0])?,
                gch: float(f[1])?,
                trials: int(f[2])? as usize,
                exact_rate: float(f[3])?,
                stage1_err_mean: float(f[4])?,
                final_err_mean: float(f[5])?,
                seed: int(f[6])?,
            })
        })
        .collect()
}

pub fn parse_json(text: &str) -> Result<Vec<SweepRow>> {
    serde_json::from_str(text).map_err(|e| Error::Parse { path: PathBuf::from("<json>"), message: e.to_string() })
}
