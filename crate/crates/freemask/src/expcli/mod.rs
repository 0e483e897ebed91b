//! Config-driven experiment runner.
//!
//! A JSON config names one scenario and its parameters; `run` executes it
//! deterministically from the master seed and returns typed rows plus CSV
//! artifacts. Unknown config keys are rejected, and parse errors carry
//! line and column information from the JSON reader.

pub mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::Deserialize;

use crate::combinat::{enumerate_nc2, orbit_stats, K_MAX};
use crate::ensembles::{EnsembleSpec, EntryDist};
use crate::error::{Error, Result};
use crate::freelimits::{
    covariance_mixed_moment_nc, free_family_mixed_moment, mp_density, MPLaw, Word,
};
use crate::masks::{mask_partition_weight, MaskMatrix};
use crate::moments::{
    estimate_covariance_mixed_moment, estimate_word_moment, freeness_test, LabelSetup,
};
use crate::spectra::{ks_distance, SpectralSample};
use report::{
    eigenvalues_csv, esd_summary_csv, histogram_csv, moments_csv, verify_csv, CriterionRow,
    EsdSummaryRow, HistogramRow, MomentRow, NamedCsv, ReportRows, RunOutput, RunReport,
};

/// The experiment families the runner understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    MomentSweep,
    CovarianceSweep,
    Freeness,
    Esd,
    Verify,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::MomentSweep => "moment-sweep",
            Scenario::CovarianceSweep => "covariance-sweep",
            Scenario::Freeness => "freeness",
            Scenario::Esd => "esd",
            Scenario::Verify => "verify",
        };
        f.write_str(s)
    }
}

/// Comparison tolerances; every field has a default so configs only name
/// what they override. A moment row passes when
/// gap <= se_multiplier * std_error + bias_constant / n + extra_tol.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancePolicy {
    pub se_multiplier: f64,
    pub bias_constant: f64,
    pub extra_tol: f64,
    pub ks_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { se_multiplier: 3.0, bias_constant: 10.0, extra_tol: 0.0, ks_tol: 0.05 }
    }
}

impl TolerancePolicy {
    fn moment_tol(&self, std_error: f64, n: usize) -> f64 {
        self.se_multiplier * std_error + self.bias_constant / n as f64 + self.extra_tol
    }
}

/// Entry law and mirror correlation for one ensemble.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    /// "iid", "elliptic", or "rect-elliptic".
    pub kind: String,
    /// "gaussian" or "rademacher".
    pub dist: String,
    #[serde(default)]
    pub rho: Option<f64>,
}

impl EnsembleConfig {
    fn entry_dist(&self) -> Result<EntryDist> {
        match self.dist.as_str() {
            "gaussian" => Ok(EntryDist::Gaussian),
            "rademacher" => Ok(EntryDist::Rademacher),
            other => Err(Error::config(format!("unknown entry distribution {other:?}"))),
        }
    }

    /// Builds the ensemble spec at the given shape, checking parameter usage.
    pub fn build(&self, rows: usize, cols: usize) -> Result<EnsembleSpec> {
        let dist = self.entry_dist()?;
        match self.kind.as_str() {
            "iid" => {
                if self.rho.is_some_and(|r| r != 0.0) {
                    return Err(Error::config("iid ensembles have no rho parameter"));
                }
                if rows != cols {
                    return Err(Error::config("iid ensembles are square"));
                }
                EnsembleSpec::iid(rows, dist)
            }
            "elliptic" => {
                let rho = self
                    .rho
                    .ok_or_else(|| Error::config("elliptic ensembles need rho"))?;
                if rows != cols {
                    return Err(Error::config("elliptic ensembles are square"));
                }
                EnsembleSpec::elliptic(rows, dist, rho)
            }
            "rect-elliptic" => {
                EnsembleSpec::rect_elliptic(rows, cols, dist, self.rho.unwrap_or(0.0))
            }
            other => Err(Error::config(format!("unknown ensemble kind {other:?}"))),
        }
    }

    fn rho_value(&self) -> f64 {
        self.rho.unwrap_or(0.0)
    }
}

/// Mask generator choice plus its parameters. Parameters not used by the
/// chosen generator are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskGenConfig {
    /// "full", "bernoulli", "band-removed", "kill-columns",
    /// "checkerboard", or "block-zero".
    pub gen: String,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub frac: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for MaskGenConfig {
    fn default() -> Self {
        Self {
            gen: "full".to_string(),
            q: None,
            width: None,
            frac: None,
            alpha: None,
            beta: None,
            seed: None,
        }
    }
}

impl MaskGenConfig {
    fn check_params(&self, allowed: &[&str]) -> Result<()> {
        let present: [(&str, bool); 6] = [
            ("q", self.q.is_some()),
            ("width", self.width.is_some()),
            ("frac", self.frac.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("seed", self.seed.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(Error::config(format!(
                    "mask generator {:?} does not take parameter {name}",
                    self.gen
                )));
            }
        }
        Ok(())
    }

    fn need_square(&self, rows: usize, cols: usize) -> Result<usize> {
        if rows != cols {
            return Err(Error::config(format!(
                "mask generator {:?} needs a square shape, got {rows}x{cols}",
                self.gen
            )));
        }
        Ok(rows)
    }

    /// Builds the mask at the given shape.
    pub fn build(&self, rows: usize, cols: usize) -> Result<MaskMatrix> {
        match self.gen.as_str() {
            "full" => {
                self.check_params(&[])?;
                MaskMatrix::full(rows, cols)
            }
            "bernoulli" => {
                self.check_params(&["q", "seed"])?;
                let q = self.q.ok_or_else(|| Error::config("bernoulli mask needs q"))?;
                MaskMatrix::bernoulli(rows, cols, q, self.seed.unwrap_or(0))
            }
            "band-removed" => {
                self.check_params(&["width"])?;
                let w = self.width.ok_or_else(|| Error::config("band-removed mask needs width"))?;
                MaskMatrix::band_removed(self.need_square(rows, cols)?, w)
            }
            "kill-columns" => {
                self.check_params(&["frac"])?;
                let f = self.frac.ok_or_else(|| Error::config("kill-columns mask needs frac"))?;
                MaskMatrix::kill_columns(self.need_square(rows, cols)?, f)
            }
            "checkerboard" => {
                self.check_params(&[])?;
                MaskMatrix::checkerboard(self.need_square(rows, cols)?)
            }
            "block-zero" => {
                self.check_params(&["alpha", "beta"])?;
                let a = self.alpha.ok_or_else(|| Error::config("block-zero mask needs alpha"))?;
                let b = self.beta.ok_or_else(|| Error::config("block-zero mask needs beta"))?;
                MaskMatrix::block_zero(rows, cols, a, b)
            }
            other => Err(Error::config(format!("unknown mask generator {other:?}"))),
        }
    }
}

/// One labelled matrix source in a config.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    pub label: usize,
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub mask: MaskGenConfig,
}

/// Rectangular size as {"p": ..., "n": ...}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub p: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSweepConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: usize,
    pub sizes: Vec<usize>,
    pub labels: Vec<LabelConfig>,
    pub words: Vec<String>,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSweepConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: usize,
    pub sizes: Vec<SizeSpec>,
    pub labels: Vec<LabelConfig>,
    /// Plain powers k: one row per label per power.
    #[serde(default)]
    pub powers: Vec<usize>,
    /// Mixed products given as label sequences.
    #[serde(default)]
    pub mixed: Vec<Vec<usize>>,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreenessConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: usize,
    pub size: usize,
    pub labels: Vec<LabelConfig>,
    pub words: Vec<String>,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsdConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub trials: usize,
    pub size: SizeSpec,
    pub label: LabelConfig,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
}

fn default_bins() -> usize {
    60
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Criterion ids to run; all ten when absent.
    #[serde(default)]
    pub criteria: Option<Vec<usize>>,
}

/// A parsed, validated experiment description.
#[derive(Debug, Clone)]
pub enum ExperimentConfig {
    MomentSweep(MomentSweepConfig),
    CovarianceSweep(CovarianceSweepConfig),
    Freeness(FreenessConfig),
    Esd(EsdConfig),
    Verify(VerifyConfig),
}

impl ExperimentConfig {
    pub fn scenario(&self) -> Scenario {
        match self {
            ExperimentConfig::MomentSweep(_) => Scenario::MomentSweep,
            ExperimentConfig::CovarianceSweep(_) => Scenario::CovarianceSweep,
            ExperimentConfig::Freeness(_) => Scenario::Freeness,
            ExperimentConfig::Esd(_) => Scenario::Esd,
            ExperimentConfig::Verify(_) => Scenario::Verify,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::MomentSweep(c) => c.seed,
            ExperimentConfig::CovarianceSweep(c) => c.seed,
            ExperimentConfig::Freeness(c) => c.seed,
            ExperimentConfig::Esd(c) => c.seed,
            ExperimentConfig::Verify(c) => c.seed,
        }
    }

    /// Replaces the master seed (CLI override).
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::MomentSweep(c) => c.seed = seed,
            ExperimentConfig::CovarianceSweep(c) => c.seed = seed,
            ExperimentConfig::Freeness(c) => c.seed = seed,
            ExperimentConfig::Esd(c) => c.seed = seed,
            ExperimentConfig::Verify(c) => c.seed = seed,
        }
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::config(format!("invalid config: {e}"))
}

fn from_text<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_err)
}

/// Parses and validates a JSON experiment config. Error messages carry
/// the line and column of the offending token.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let probe: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    let scenario = probe
        .get("scenario")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::config("config needs a string \"scenario\" field"))?;
    let cfg = match scenario {
        "moment-sweep" => ExperimentConfig::MomentSweep(from_text(text)?),
        "covariance-sweep" => ExperimentConfig::CovarianceSweep(from_text(text)?),
        "freeness" => ExperimentConfig::Freeness(from_text(text)?),
        "esd" => ExperimentConfig::Esd(from_text(text)?),
        "verify" => ExperimentConfig::Verify(from_text(text)?),
        other => {
            return Err(Error::config(format!(
                "unknown scenario {other:?} (expected moment-sweep, covariance-sweep, freeness, esd, or verify)"
            )))
        }
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::config("trials must be at least 2"));
    }
    Ok(())
}

fn label_map(labels: &[LabelConfig]) -> Result<BTreeMap<usize, &LabelConfig>> {
    if labels.is_empty() {
        return Err(Error::config("at least one label is required"));
    }
    let mut map = BTreeMap::new();
    for lc in labels {
        if lc.label == 0 {
            return Err(Error::config("labels are 1-based"));
        }
        if map.insert(lc.label, lc).is_some() {
            return Err(Error::config(format!("label {} is defined twice", lc.label)));
        }
    }
    Ok(map)
}

fn parse_words(words: &[String], defined: &BTreeMap<usize, &LabelConfig>) -> Result<Vec<Word>> {
    if words.is_empty() {
        return Err(Error::config("at least one word is required"));
    }
    let mut out = Vec::new();
    for text in words {
        let w: Word = text.parse()?;
        if w.len() > 2 * K_MAX {
            return Err(Error::config(format!(
                "word {text:?} is longer than 2*K_max = {}",
                2 * K_MAX
            )));
        }
        for l in w.labels() {
            if !defined.contains_key(&l) {
                return Err(Error::config(format!("word {text:?} uses undefined label {l}")));
            }
        }
        out.push(w);
    }
    Ok(out)
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    match cfg {
        ExperimentConfig::MomentSweep(c) => {
            check_trials(c.trials)?;
            if c.sizes.is_empty() || c.sizes.iter().any(|&n| n == 0) {
                return Err(Error::config("sizes must be nonempty and positive"));
            }
            let map = label_map(&c.labels)?;
            parse_words(&c.words, &map)?;
        }
        ExperimentConfig::CovarianceSweep(c) => {
            check_trials(c.trials)?;
            if c.sizes.is_empty() || c.sizes.iter().any(|s| s.p == 0 || s.n == 0) {
                return Err(Error::config("sizes must be nonempty with positive p and n"));
            }
            let map = label_map(&c.labels)?;
            if c.powers.is_empty() && c.mixed.is_empty() {
                return Err(Error::config("covariance-sweep needs powers or mixed sequences"));
            }
            for &k in &c.powers {
                if k == 0 || k > K_MAX {
                    return Err(Error::config(format!("power {k} out of range 1..={K_MAX}")));
                }
            }
            for seq in &c.mixed {
                if seq.is_empty() || seq.len() > K_MAX {
                    return Err(Error::config(format!(
                        "mixed sequence length must be 1..={K_MAX}"
                    )));
                }
                for l in seq {
                    if !map.contains_key(l) {
                        return Err(Error::config(format!("mixed sequence uses undefined label {l}")));
                    }
                }
            }
        }
        ExperimentConfig::Freeness(c) => {
            check_trials(c.trials)?;
            if c.size == 0 {
                return Err(Error::config("size must be positive"));
            }
            let map = label_map(&c.labels)?;
            parse_words(&c.words, &map)?;
        }
        ExperimentConfig::Esd(c) => {
            check_trials(c.trials)?;
            if c.size.p == 0 || c.size.n == 0 {
                return Err(Error::config("size must have positive p and n"));
            }
            if c.bins == 0 {
                return Err(Error::config("bins must be positive"));
            }
            if c.label.label == 0 {
                return Err(Error::config("labels are 1-based"));
            }
        }
        ExperimentConfig::Verify(c) => {
            if let Some(ids) = &c.criteria {
                if ids.is_empty() {
                    return Err(Error::config("criteria list must not be empty"));
                }
                for &id in ids {
                    if !(1..=10).contains(&id) {
                        return Err(Error::config(format!("criterion id {id} out of range 1..=10")));
                    }
                }
            }
        }
    }
    Ok(())
}

fn mask_is_symmetric(d: &MaskMatrix) -> bool {
    if !d.is_square() {
        return false;
    }
    let n = d.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            if d.get(i, j) != d.get(j, i) {
                return false;
            }
        }
    }
    true
}

/// Requires every label in `used` to carry the same mask config and
/// returns it.
fn shared_mask_config<'a>(
    used: impl IntoIterator<Item = usize>,
    map: &BTreeMap<usize, &'a LabelConfig>,
    context: &str,
) -> Result<&'a MaskGenConfig> {
    let mut shared: Option<&MaskGenConfig> = None;
    for l in used {
        let cfg = &map[&l].mask;
        match shared {
            None => shared = Some(cfg),
            Some(prev) if prev == cfg => {}
            Some(_) => {
                return Err(Error::config(format!(
                    "{context} limits need one shared mask across the word's labels"
                )))
            }
        }
    }
    Ok(shared.expect("at least one label"))
}

/// Exact limit of a masked word moment. With full masks this is the free
/// family mixed moment; otherwise the word's labels must share one
/// symmetric square mask, and each non-crossing pairing is weighted by
/// its mask partition weight at the given n.
fn masked_word_limit(
    word: &Word,
    rho: &BTreeMap<usize, f64>,
    map: &BTreeMap<usize, &LabelConfig>,
    n: usize,
) -> Result<f64> {
    let len = word.len();
    if len % 2 == 1 {
        return Ok(0.0);
    }
    let mask_cfg = shared_mask_config(word.labels(), map, "word moment")?;
    if mask_cfg.gen == "full" {
        return free_family_mixed_moment(word, rho);
    }
    let mask = mask_cfg.build(n, n)?;
    if !mask_is_symmetric(&mask) {
        return Err(Error::config(format!(
            "word moment limits need a symmetric mask; generator {:?} is not",
            mask_cfg.gen
        )));
    }
    let letters = word.letters();
    let mut total = 0.0;
    for pi in enumerate_nc2(len / 2)? {
        let mut factor = 1.0;
        for &(r, s) in pi.pairs() {
            let (a, b) = (letters[r - 1], letters[s - 1]);
            if a.label != b.label {
                factor = 0.0;
            } else if a.star == b.star {
                factor *= rho[&a.label];
            }
            if factor == 0.0 {
                break;
            }
        }
        if factor != 0.0 {
            total += factor * mask_partition_weight(&mask, &pi)?;
        }
    }
    Ok(total)
}

/// Exact limit of a masked mixed covariance moment: non-crossing pairings
/// whose pairs respect the label sequence, each weighted by y^(u-1) and
/// by the rectangular mask partition weight (1 for full masks).
fn masked_covariance_limit(
    seq: &[usize],
    map: &BTreeMap<usize, &LabelConfig>,
    p: usize,
    n: usize,
) -> Result<f64> {
    let y = p as f64 / n as f64;
    let mask_cfg = shared_mask_config(seq.iter().copied().collect::<BTreeSet<_>>(), map, "covariance")?;
    if mask_cfg.gen == "full" {
        return covariance_mixed_moment_nc(seq, y);
    }
    let mask = mask_cfg.build(p, n)?;
    let mut total = 0.0;
    for pi in enumerate_nc2(seq.len())? {
        let respects = pi
            .pairs()
            .iter()
            .all(|&(r, s)| seq[(r - 1) / 2] == seq[(s - 1) / 2]);
        if !respects {
            continue;
        }
        let (_, odd_orbits) = orbit_stats(pi.pairs());
        total += mask_partition_weight(&mask, &pi)? * y.powi(odd_orbits as i32 - 1);
    }
    Ok(total)
}

fn build_setups(
    map: &BTreeMap<usize, &LabelConfig>,
    rows: usize,
    cols: usize,
) -> Result<BTreeMap<usize, LabelSetup>> {
    map.iter()
        .map(|(&l, lc)| {
            let spec = lc.ensemble.build(rows, cols)?;
            let mask = lc.mask.build(rows, cols)?;
            Ok((l, LabelSetup::new(spec, mask)?))
        })
        .collect()
}

fn moment_rows_output(scenario: Scenario, seed: u64, rows: Vec<MomentRow>, wall_ms: u64) -> Result<RunOutput> {
    let pass = rows.iter().all(|r| r.pass);
    let csv = moments_csv(&rows)?;
    Ok(RunOutput {
        report: RunReport {
            scenario: scenario.to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms,
            pass,
            rows: ReportRows::Moments(rows),
        },
        artifacts: vec![NamedCsv { name: "moments.csv".to_string(), text: csv }],
    })
}

fn run_moment_sweep(c: &MomentSweepConfig) -> Result<Vec<MomentRow>> {
    let map = label_map(&c.labels)?;
    let words = parse_words(&c.words, &map)?;
    let rho: BTreeMap<usize, f64> =
        map.iter().map(|(&l, lc)| (l, lc.ensemble.rho_value())).collect();
    let mut rows = Vec::new();
    for &n in &c.sizes {
        let setups = build_setups(&map, n, n)?;
        for word in &words {
            let est = estimate_word_moment(word, &setups, c.trials, c.seed)?;
            let limit = masked_word_limit(word, &rho, &map, n)?;
            let gap = (est.mean - limit).abs();
            let tol = c.tolerance.moment_tol(est.std_error, n);
            rows.push(MomentRow {
                word: word.to_string(),
                n,
                trials: c.trials,
                estimate: est.mean,
                std_error: est.std_error,
                limit,
                gap,
                pass: gap <= tol,
            });
        }
    }
    Ok(rows)
}

fn run_covariance_sweep(c: &CovarianceSweepConfig) -> Result<Vec<MomentRow>> {
    let map = label_map(&c.labels)?;
    let mut rows = Vec::new();
    for &SizeSpec { p, n } in &c.sizes {
        let setups = build_setups(&map, p, n)?;
        let mut sequences: Vec<Vec<usize>> = Vec::new();
        for lc in &c.labels {
            for &k in &c.powers {
                sequences.push(vec![lc.label; k]);
            }
        }
        sequences.extend(c.mixed.iter().cloned());
        for seq in &sequences {
            let est = estimate_covariance_mixed_moment(seq, &setups, c.trials, c.seed)?;
            let limit = masked_covariance_limit(seq, &map, p, n)?;
            let gap = (est.mean - limit).abs();
            let tol = c.tolerance.moment_tol(est.std_error, n);
            rows.push(MomentRow {
                word: est.quantity.clone(),
                n,
                trials: c.trials,
                estimate: est.mean,
                std_error: est.std_error,
                limit,
                gap,
                pass: gap <= tol,
            });
        }
    }
    Ok(rows)
}

fn run_freeness(c: &FreenessConfig) -> Result<Vec<MomentRow>> {
    let map = label_map(&c.labels)?;
    let words = parse_words(&c.words, &map)?;
    let setups = build_setups(&map, c.size, c.size)?;
    let extra = c.tolerance.bias_constant / c.size as f64 + c.tolerance.extra_tol;
    let results = freeness_test(&words, &setups, c.trials, c.seed, c.tolerance.se_multiplier, extra)?;
    Ok(results
        .into_iter()
        .map(|r| MomentRow {
            word: r.word.to_string(),
            n: c.size,
            trials: c.trials,
            estimate: r.estimate.mean,
            std_error: r.estimate.std_error,
            limit: r.limit,
            gap: r.gap,
            pass: r.pass,
        })
        .collect())
}

struct EsdRun {
    summaries: Vec<EsdSummaryRow>,
    mean_ks: f64,
    eigenvalue_csv: String,
    histogram: Vec<HistogramRow>,
}

fn run_esd(c: &EsdConfig) -> Result<EsdRun> {
    let SizeSpec { p, n } = c.size;
    let spec = c.label.ensemble.build(p, n)?;
    let mask = c.label.mask.build(p, n)?;
    let law = MPLaw::new(p as f64 / n as f64)?;
    let density = mask.density();
    let mut summaries = Vec::new();
    let mut pooled: Vec<f64> = Vec::new();
    let mut per_trial: Vec<(usize, Vec<f64>)> = Vec::new();
    for trial in 0..c.trials as u64 {
        let x = spec.sample(c.seed, trial, c.label.label as u64);
        let masked = x.masked(&mask)?;
        let sample = SpectralSample::from_data(&masked)?;
        let ks = ks_distance(&sample, &law)?;
        summaries.push(EsdSummaryRow {
            p,
            n,
            y: sample.y(),
            density,
            ks_distance: ks.distance,
        });
        pooled.extend_from_slice(sample.eigenvalues());
        per_trial.push((trial as usize, sample.eigenvalues().to_vec()));
    }
    let mean_ks = summaries.iter().map(|s| s.ks_distance).sum::<f64>() / summaries.len() as f64;
    // pooled histogram over [0, max(data, law edge)]
    let hi = pooled
        .iter()
        .copied()
        .fold(law.upper_edge(), f64::max);
    let width = hi / c.bins as f64;
    let mut counts = vec![0usize; c.bins];
    for &v in &pooled {
        let mut idx = if width > 0.0 { (v / width) as usize } else { 0 };
        if idx >= c.bins {
            idx = c.bins - 1;
        }
        counts[idx] += 1;
    }
    let histogram: Vec<HistogramRow> = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let left = i as f64 * width;
            let right = (i + 1) as f64 * width;
            HistogramRow {
                bin_left: left,
                bin_right: right,
                count,
                mp_density_at_mid: mp_density(0.5 * (left + right), &law),
            }
        })
        .collect();
    let refs: Vec<(usize, &[f64])> = per_trial.iter().map(|(t, v)| (*t, v.as_slice())).collect();
    Ok(EsdRun { summaries, mean_ks, eigenvalue_csv: eigenvalues_csv(&refs)?, histogram })
}

fn run_verify(c: &VerifyConfig) -> Result<Vec<CriterionRow>> {
    let ids: Vec<usize> = match &c.criteria {
        Some(ids) => ids.clone(),
        None => (1..=10).collect(),
    };
    ids.iter()
        .map(|&id| {
            let r = crate::verify::run_criterion(id, c.seed)?;
            Ok(CriterionRow { criterion: r.id, name: r.name.to_string(), pass: r.pass, details: r.details })
        })
        .collect()
}

/// Executes a validated config and returns the report plus artifacts.
/// Deterministic for a fixed config: rerunning yields byte-identical CSV.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    validate(cfg)?;
    let start = Instant::now();
    match cfg {
        ExperimentConfig::MomentSweep(c) => {
            let rows = run_moment_sweep(c)?;
            moment_rows_output(Scenario::MomentSweep, c.seed, rows, start.elapsed().as_millis() as u64)
        }
        ExperimentConfig::CovarianceSweep(c) => {
            let rows = run_covariance_sweep(c)?;
            moment_rows_output(Scenario::CovarianceSweep, c.seed, rows, start.elapsed().as_millis() as u64)
        }
        ExperimentConfig::Freeness(c) => {
            let rows = run_freeness(c)?;
            moment_rows_output(Scenario::Freeness, c.seed, rows, start.elapsed().as_millis() as u64)
        }
        ExperimentConfig::Esd(c) => {
            let r = run_esd(c)?;
            let pass = r.mean_ks < c.tolerance.ks_tol;
            let summary = esd_summary_csv(&r.summaries)?;
            let hist = histogram_csv(&r.histogram)?;
            Ok(RunOutput {
                report: RunReport {
                    scenario: Scenario::Esd.to_string(),
                    seed: c.seed,
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    wall_ms: start.elapsed().as_millis() as u64,
                    pass,
                    rows: ReportRows::Esd { summaries: r.summaries, mean_ks: r.mean_ks },
                },
                artifacts: vec![
                    NamedCsv { name: "esd_summary.csv".to_string(), text: summary },
                    NamedCsv { name: "eigenvalues.csv".to_string(), text: r.eigenvalue_csv },
                    NamedCsv { name: "histogram.csv".to_string(), text: hist },
                ],
            })
        }
        ExperimentConfig::Verify(c) => {
            let rows = run_verify(c)?;
            let pass = rows.iter().all(|r| r.pass);
            let csv = verify_csv(&rows)?;
            Ok(RunOutput {
                report: RunReport {
                    scenario: Scenario::Verify.to_string(),
                    seed: c.seed,
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    wall_ms: start.elapsed().as_millis() as u64,
                    pass,
                    rows: ReportRows::Verify(rows),
                },
                artifacts: vec![NamedCsv { name: "verify.csv".to_string(), text: csv }],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment_config(mask: &str, words: &[&str], sizes: &[usize]) -> String {
        let words: Vec<String> = words.iter().map(|w| format!("\"{w}\"")).collect();
        let sizes: Vec<String> = sizes.iter().map(|n| n.to_string()).collect();
        format!(
            r#"{{
  "scenario": "moment-sweep",
  "seed": 7,
  "trials": 20,
  "sizes": [{sizes}],
  "labels": [
    {{"label": 1, "ensemble": {{"kind": "iid", "dist": "gaussian"}}, "mask": {mask}}}
  ],
  "words": [{words}]
}}"#,
            sizes = sizes.join(", "),
            words = words.join(", ")
        )
    }

    #[test]
    fn parses_and_validates_moment_sweep() {
        let cfg = parse_config(&moment_config(r#"{"gen": "full"}"#, &["1,1*"], &[30])).unwrap();
        assert_eq!(cfg.scenario(), Scenario::MomentSweep);
        assert_eq!(cfg.seed(), 7);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let bad = r#"{
  "scenario": "moment-sweep",
  "seed": 1,
  "trials": 5,
  "sizes": [10],
  "surprise": true,
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,1*"]
}"#;
        let err = parse_config(bad).unwrap_err().to_string();
        assert!(err.contains("surprise"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn rejects_bad_scenario_trials_and_labels() {
        assert!(parse_config(r#"{"scenario": "nope", "seed": 1}"#).is_err());
        let one_trial = moment_config(r#"{"gen": "full"}"#, &["1,1*"], &[10]).replace("\"trials\": 20", "\"trials\": 1");
        assert!(parse_config(&one_trial).is_err());
        let bad_word = moment_config(r#"{"gen": "full"}"#, &["2,2*"], &[10]);
        assert!(parse_config(&bad_word).is_err());
    }

    #[test]
    fn rejects_misplaced_mask_parameters() {
        let cfg = moment_config(r#"{"gen": "full", "width": 2}"#, &["1,1*"], &[10]);
        let parsed = parse_config(&cfg).unwrap();
        // parameter misuse surfaces when the mask is built
        assert!(run(&parsed).is_err());
    }

    #[test]
    fn moment_sweep_full_and_checkerboard_limits() {
        let cfg = parse_config(&moment_config(r#"{"gen": "full"}"#, &["1,1*"], &[40])).unwrap();
        let out = run(&cfg).unwrap();
        let ReportRows::Moments(rows) = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].limit, 1.0);
        assert!(out.report.pass, "gap {} vs se {}", rows[0].gap, rows[0].std_error);

        let cfg = parse_config(&moment_config(r#"{"gen": "checkerboard"}"#, &["1,1*"], &[40])).unwrap();
        let out = run(&cfg).unwrap();
        let ReportRows::Moments(rows) = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(rows[0].limit, 0.5);
        assert!(out.report.pass);
    }

    #[test]
    fn run_is_deterministic() {
        let cfg = parse_config(&moment_config(r#"{"gen": "full"}"#, &["1,1*", "1,1"], &[16, 24])).unwrap();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.primary_csv(), b.primary_csv());
        assert_eq!(a.artifacts.len(), 1);
    }

    #[test]
    fn covariance_sweep_reports_mp_limits() {
        let cfg = parse_config(
            r#"{
  "scenario": "covariance-sweep",
  "seed": 3,
  "trials": 25,
  "sizes": [{"p": 30, "n": 60}],
  "labels": [{"label": 1, "ensemble": {"kind": "rect-elliptic", "dist": "gaussian"}}],
  "powers": [1, 2]
}"#,
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        let ReportRows::Moments(rows) = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].limit, 1.0);
        assert_eq!(rows[1].limit, 1.5);
        assert!(out.report.pass, "{rows:?}");
    }

    #[test]
    fn covariance_block_zero_k1_limit_is_density() {
        let cfg = parse_config(
            r#"{
  "scenario": "covariance-sweep",
  "seed": 3,
  "trials": 10,
  "sizes": [{"p": 20, "n": 40}],
  "labels": [{"label": 1, "ensemble": {"kind": "rect-elliptic", "dist": "gaussian"},
              "mask": {"gen": "block-zero", "alpha": 0.5, "beta": 0.5}}],
  "powers": [1]
}"#,
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        let ReportRows::Moments(rows) = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(rows[0].limit, 0.75);
        assert!(out.report.pass, "{rows:?}");
    }

    #[test]
    fn esd_run_produces_three_artifacts() {
        let cfg = parse_config(
            r#"{
  "scenario": "esd",
  "seed": 5,
  "trials": 2,
  "size": {"p": 40, "n": 40},
  "label": {"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}},
  "bins": 10,
  "tolerance": {"ks_tol": 0.5}
}"#,
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        assert_eq!(out.artifacts.len(), 3);
        assert!(out.artifacts[0].text.starts_with("p,n,y,density,ks_distance\n"));
        assert!(out.artifacts[1].text.starts_with("trial,eigenvalue\n"));
        assert!(out.artifacts[2].text.starts_with("bin_left,bin_right,count,mp_density_at_mid\n"));
        let ReportRows::Esd { summaries, mean_ks } = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(summaries.len(), 2);
        assert!(*mean_ks > 0.0 && *mean_ks < 0.5);
        // histogram counts sum to all pooled eigenvalues
        let total: usize = out.artifacts[2]
            .text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 80);
    }

    #[test]
    fn freeness_scenario_runs() {
        let cfg = parse_config(
            r#"{
  "scenario": "freeness",
  "seed": 11,
  "trials": 30,
  "size": 40,
  "labels": [
    {"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}},
    {"label": 2, "ensemble": {"kind": "iid", "dist": "gaussian"}}
  ],
  "words": ["1,2,1*,2*", "1,1*,2,2*"],
  "tolerance": {"extra_tol": 0.05}
}"#,
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        let ReportRows::Moments(rows) = &out.report.rows else { panic!("wrong rows") };
        assert_eq!(rows[0].limit, 0.0);
        assert_eq!(rows[1].limit, 1.0);
        assert!(out.report.pass, "{rows:?}");
    }

    #[test]
    fn json_report_has_metadata_and_rows() {
        let cfg = parse_config(&moment_config(r#"{"gen": "full"}"#, &["1"], &[12])).unwrap();
        let out = run(&cfg).unwrap();
        let json = out.report_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["scenario"], "moment-sweep");
        assert_eq!(v["seed"], 7);
        assert!(v["wall_ms"].is_number());
        assert!(v["rows"]["moments"].is_array());
    }

    #[test]
    fn masked_word_limit_needs_shared_symmetric_mask() {
        let lc1 = LabelConfig {
            label: 1,
            ensemble: EnsembleConfig { kind: "iid".into(), dist: "gaussian".into(), rho: None },
            mask: MaskGenConfig { gen: "kill-columns".into(), frac: Some(0.5), ..Default::default() },
        };
        let map: BTreeMap<usize, &LabelConfig> = [(1, &lc1)].into_iter().collect();
        let rho: BTreeMap<usize, f64> = [(1, 0.0)].into_iter().collect();
        let w: Word = "1,1*".parse().unwrap();
        assert!(masked_word_limit(&w, &rho, &map, 8).is_err());
    }
}
