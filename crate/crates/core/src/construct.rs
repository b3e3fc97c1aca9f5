//! Selection of the high-entropy index set.
//!
//! For each index `i` two statistics of the conditional `P(U_i | Y, U_0 .. U_{i-1})`
//! are tracked: its expected binary entropy and its expected distance from
//! uniform, `E |P(U_i = 0 | ·) - 1/2|`. The second one drives selection; the
//! first is kept for diagnostics. Both can be computed exactly by enumeration
//! for tiny blocks, or estimated by Monte Carlo with the SC engine.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::bits::BitSequence;
use crate::error::{Result, WomError};
use crate::model::{entropy_unchecked, model_stats, sample_joint_with, SourceModel};
use crate::polar::{polar_transform_in_place, TransformSize};
use crate::sc::{ProbPair, ScEngine};
use crate::seed;

/// Largest block length accepted by [`exact_statistics`] (cost grows as `4^N`).
pub const MAX_EXACT_LEN: usize = 8;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_THRESHOLD: f64 = 0.05;
pub const SET_FORMAT_VERSION: u32 = 1;
/// Grid used to key the construction cache.
pub const QUANT_STEPS: u32 = 256;

const CHUNK_TRIALS: u64 = 256;
const CHUNKS_PER_BATCH: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// Per-index polarization statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexStats {
    pub len: usize,
    pub model: SourceModel,
    pub method: Method,
    /// Monte Carlo draws; 0 for exact statistics.
    pub samples: u64,
    pub seed: u64,
    /// Estimate of `H(U_i | Y, U_0 .. U_{i-1})` in bits.
    pub entropy: Vec<f64>,
    /// Estimate of `E |P(U_i = 0 | Y, U_0 .. U_{i-1}) - 1/2|`.
    pub half_deviation: Vec<f64>,
    pub entropy_stderr: Vec<f64>,
    pub half_deviation_stderr: Vec<f64>,
}

impl IndexStats {
    pub fn mean_half_deviation_stderr(&self) -> f64 {
        mean(&self.half_deviation_stderr)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Joint weights `P(u_0 .. u_i | y)` for every prefix, by enumerating all
/// codewords `x` of one memory state. Independent of the SC engine.
pub(crate) struct PrefixTable {
    len: usize,
    /// `levels[i][key]`, where bit `j` of `key` is `u_j`, `j <= i`.
    levels: Vec<Vec<f64>>,
}

impl PrefixTable {
    pub(crate) fn new(model: &SourceModel, y: &BitSequence) -> Result<Self> {
        let len = y.len();
        TransformSize::from_len(len)?;
        if len > MAX_EXACT_LEN {
            return Err(WomError::TooLarge {
                what: "enumeration block length",
                limit: MAX_EXACT_LEN,
                got: len,
            });
        }
        let mut levels: Vec<Vec<f64>> = (0..len).map(|i| vec![0.0; 2 << i]).collect();
        let mut word = vec![0u8; len];
        for v in 0..1usize << len {
            let mut p = 1.0;
            for (n, w) in word.iter_mut().enumerate() {
                *w = ((v >> n) & 1) as u8;
                p *= model.conditional(*w, y[n]);
            }
            if p == 0.0 {
                continue;
            }
            polar_transform_in_place(&mut word)?;
            let mut key = 0usize;
            for (i, level) in levels.iter_mut().enumerate() {
                key |= (word[i] as usize) << i;
                level[key] += p;
            }
        }
        Ok(PrefixTable { len, levels })
    }

    /// `P(u_0 .. u_{i-1} | y)` for `prefix` holding `u_j` at bit `j`.
    pub(crate) fn prefix_weight(&self, i: usize, prefix: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.levels[i - 1][prefix]
        }
    }

    /// Unnormalized `(P(prefix, U_i = 0 | y), P(prefix, U_i = 1 | y))`.
    pub(crate) fn joint(&self, i: usize, prefix: usize) -> ProbPair {
        ProbPair::new(self.levels[i][prefix], self.levels[i][prefix | (1 << i)])
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }
}

fn check_len(len: usize) -> Result<TransformSize> {
    TransformSize::from_len(len)
}

/// Exact per-index statistics by enumerating every `(y, u)`.
pub fn exact_statistics(model: &SourceModel, len: usize) -> Result<IndexStats> {
    check_len(len)?;
    if len > MAX_EXACT_LEN {
        return Err(WomError::TooLarge {
            what: "exact construction block length",
            limit: MAX_EXACT_LEN,
            got: len,
        });
    }
    let mut entropy = vec![0.0; len];
    let mut half_deviation = vec![0.0; len];
    for yv in 0..1usize << len {
        let y = BitSequence::from_index(yv, len);
        let p_y: f64 = y.iter().map(|b| model.p_y(b)).product();
        if p_y == 0.0 {
            continue;
        }
        let table = PrefixTable::new(model, &y)?;
        for i in 0..len {
            for prefix in 0..1usize << i {
                let joint = table.joint(i, prefix);
                let weight = joint.q0 + joint.q1;
                if weight == 0.0 {
                    continue;
                }
                let p0 = joint.q0 / weight;
                entropy[i] += p_y * weight * entropy_unchecked(p0);
                half_deviation[i] += p_y * weight * (p0 - 0.5).abs();
            }
        }
    }
    Ok(IndexStats {
        len,
        model: *model,
        method: Method::Exact,
        samples: 0,
        seed: 0,
        entropy,
        half_deviation,
        entropy_stderr: vec![0.0; len],
        half_deviation_stderr: vec![0.0; len],
    })
}

#[derive(Clone)]
struct Accumulator {
    count: u64,
    dev: Vec<f64>,
    dev_sq: Vec<f64>,
    ent: Vec<f64>,
    ent_sq: Vec<f64>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Accumulator {
            count: 0,
            dev: vec![0.0; len],
            dev_sq: vec![0.0; len],
            ent: vec![0.0; len],
            ent_sq: vec![0.0; len],
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        for (a, b) in [
            (&mut self.dev, &other.dev),
            (&mut self.dev_sq, &other.dev_sq),
            (&mut self.ent, &other.ent),
            (&mut self.ent_sq, &other.ent_sq),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }
}

fn run_trial(
    model: &SourceModel,
    len: usize,
    root: u64,
    trial: u64,
    acc: &mut Accumulator,
) -> Result<()> {
    let mut rng = seed::stream_rng(root, seed::STREAM_CONSTRUCT, trial);
    let (y, x) = sample_joint_with(model, len, &mut rng);
    let mut u = x.into_vec();
    polar_transform_in_place(&mut u)?;
    let mut engine = ScEngine::new(model, &y)?;
    for (i, &bit) in u.iter().enumerate() {
        let d = engine.dist()?;
        // An impossible pair here can only come from underflow; count it as
        // fully polarized.
        let (dev, ent) = if d.is_impossible() {
            (0.5, 0.0)
        } else {
            ((d.q0 - 0.5).abs(), entropy_unchecked(d.q0))
        };
        acc.dev[i] += dev;
        acc.dev_sq[i] += dev * dev;
        acc.ent[i] += ent;
        acc.ent_sq[i] += ent * ent;
        engine.advance(bit)?;
    }
    acc.count += 1;
    Ok(())
}

/// Monte Carlo estimates from `samples` joint draws `(y, x)`, each followed by
/// one SC pass with `u = x G_N` forced.
///
/// Draw `k` always uses substream `k` of `seed`, so the first `m` draws of a
/// larger run coincide with a run of `m` draws. Partial sums are merged in a
/// fixed order; results do not depend on the thread count.
pub fn estimate_statistics(
    model: &SourceModel,
    len: usize,
    samples: u64,
    seed: u64,
) -> Result<IndexStats> {
    check_len(len)?;
    if samples == 0 {
        return Err(WomError::Domain {
            what: "sample count",
            range: "[1, inf)",
            value: 0.0,
        });
    }
    let chunks = samples.div_ceil(CHUNK_TRIALS);
    let mut total = Accumulator::new(len);
    let mut first = 0;
    while first < chunks {
        let last = (first + CHUNKS_PER_BATCH).min(chunks);
        let partial: Vec<Result<Accumulator>> = (first..last)
            .into_par_iter()
            .map(|c| {
                let mut acc = Accumulator::new(len);
                let start = c * CHUNK_TRIALS;
                let end = (start + CHUNK_TRIALS).min(samples);
                for trial in start..end {
                    run_trial(model, len, seed, trial, &mut acc)?;
                }
                Ok(acc)
            })
            .collect();
        for acc in partial {
            total.merge(&acc?);
        }
        first = last;
    }
    let m = total.count as f64;
    let summarize = |sum: &[f64], sum_sq: &[f64]| -> (Vec<f64>, Vec<f64>) {
        sum.iter()
            .zip(sum_sq)
            .map(|(&s, &sq)| {
                let mean = s / m;
                let se = if total.count > 1 {
                    let var = ((sq - s * mean) / (m - 1.0)).max(0.0);
                    (var / m).sqrt()
                } else {
                    0.0
                };
                (mean, se)
            })
            .unzip()
    };
    let (half_deviation, half_deviation_stderr) = summarize(&total.dev, &total.dev_sq);
    let (entropy, entropy_stderr) = summarize(&total.ent, &total.ent_sq);
    Ok(IndexStats {
        len,
        model: *model,
        method: Method::MonteCarlo,
        samples,
        seed,
        entropy,
        half_deviation,
        entropy_stderr,
        half_deviation_stderr,
    })
}

/// How indices are admitted to the set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SelectionMode {
    /// All indices with `half_deviation <= delta`.
    Threshold(f64),
    /// The `ceil(rho * N * capacity)` indices with the smallest
    /// `half_deviation`; ties go to the smaller index.
    TargetRate(f64),
}

impl SelectionMode {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionMode::Threshold(_) => "threshold",
            SelectionMode::TargetRate(_) => "target_rate",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            SelectionMode::Threshold(v) | SelectionMode::TargetRate(v) => v,
        }
    }
}

/// Statistics of the selected indices, aligned with [`HighEntropySet::indices`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectedStats {
    pub entropy: Vec<f64>,
    pub half_deviation: Vec<f64>,
    pub entropy_stderr: Vec<f64>,
    pub half_deviation_stderr: Vec<f64>,
}

/// The index set carrying message bits, with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct HighEntropySet {
    pub len: usize,
    pub s: f64,
    pub t: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub mode: SelectionMode,
    /// Strictly increasing, all `< len`.
    pub indices: Vec<usize>,
    /// `None` when the set file carried no stats block.
    pub stats: Option<SelectedStats>,
}

impl HighEntropySet {
    /// Number of message bits `M`.
    pub fn message_len(&self) -> usize {
        self.indices.len()
    }

    /// `M / N` in bits per cell.
    pub fn rate(&self) -> f64 {
        self.indices.len() as f64 / self.len as f64
    }

    pub fn capacity(&self) -> f64 {
        (1.0 - self.s) * entropy_unchecked(self.t)
    }

    /// `1 - M / (N * capacity)`; zero when capacity is zero.
    pub fn capacity_gap(&self) -> f64 {
        let cap = self.capacity();
        if cap > 0.0 {
            1.0 - self.rate() / cap
        } else {
            0.0
        }
    }

    pub fn model(&self) -> Result<SourceModel> {
        SourceModel::with_state_fraction(self.s, self.t)
    }

    pub fn stats_missing(&self) -> bool {
        self.stats.is_none()
    }

    /// `mask[i]` is true when index `i` carries a message bit.
    pub fn message_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        check_len(self.len)?;
        SourceModel::new(self.s, self.t)?;
        if !self.mode.value().is_finite() || self.mode.value() < 0.0 {
            return Err(WomError::SetFile(format!(
                "threshold_or_rate must be a non-negative number, got {}",
                self.mode.value()
            )));
        }
        for w in self.indices.windows(2) {
            if w[0] >= w[1] {
                return Err(WomError::SetFile(format!(
                    "indices must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&last) = self.indices.last() {
            if last >= self.len {
                return Err(WomError::SetFile(format!(
                    "index {last} out of range for N = {}",
                    self.len
                )));
            }
        }
        if let Some(stats) = &self.stats {
            for (name, v) in [
                ("entropy", &stats.entropy),
                ("half_deviation", &stats.half_deviation),
                ("entropy_stderr", &stats.entropy_stderr),
                ("half_deviation_stderr", &stats.half_deviation_stderr),
            ] {
                if v.len() != self.indices.len() {
                    return Err(WomError::SetFile(format!(
                        "stats.{name} has {} entries for {} indices",
                        v.len(),
                        self.indices.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&SetFile::from(self))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(SET_FORMAT_VERSION) => {}
            Some(v) => {
                return Err(WomError::VersionMismatch {
                    expected: SET_FORMAT_VERSION,
                    found: u32::try_from(v).unwrap_or(u32::MAX),
                })
            }
            None => return Err(WomError::SetFile("missing format_version".into())),
        }
        let file: SetFile =
            serde_json::from_value(value).map_err(|e| WomError::SetFile(e.to_string()))?;
        let set = HighEntropySet::try_from(file)?;
        set.validate()?;
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| WomError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| WomError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Chooses the set from per-index statistics.
pub fn select_high_entropy_set(stats: &IndexStats, mode: SelectionMode) -> Result<HighEntropySet> {
    let value = mode.value();
    if !value.is_finite() || value < 0.0 {
        return Err(WomError::Domain {
            what: mode.name(),
            range: "[0, inf)",
            value,
        });
    }
    let usable: Vec<usize> = (0..stats.len)
        .filter(|&i| stats.half_deviation[i].is_finite())
        .collect();
    let mut indices: Vec<usize> = match mode {
        SelectionMode::Threshold(delta) => usable
            .into_iter()
            .filter(|&i| stats.half_deviation[i] <= delta)
            .collect(),
        SelectionMode::TargetRate(rho) => {
            let cap = model_stats(&stats.model).capacity;
            let target = rho * stats.len as f64 * cap;
            // Guard against 4.000000000001 turning into 5.
            let needed = (target - 1e-9).ceil().max(0.0) as usize;
            if needed > usable.len() {
                let max_rate = if cap > 0.0 {
                    usable.len() as f64 / (stats.len as f64 * cap)
                } else {
                    0.0
                };
                return Err(WomError::RateUnachievable {
                    requested: rho,
                    needed,
                    available: usable.len(),
                    max_rate,
                });
            }
            let mut ranked = usable;
            ranked.sort_by(|&a, &b| {
                stats.half_deviation[a]
                    .total_cmp(&stats.half_deviation[b])
                    .then(a.cmp(&b))
            });
            ranked.truncate(needed);
            ranked
        }
    };
    indices.sort_unstable();
    let pick = |v: &[f64]| indices.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let selected = SelectedStats {
        entropy: pick(&stats.entropy),
        half_deviation: pick(&stats.half_deviation),
        entropy_stderr: pick(&stats.entropy_stderr),
        half_deviation_stderr: pick(&stats.half_deviation_stderr),
    };
    Ok(HighEntropySet {
        len: stats.len,
        s: stats.model.s(),
        t: stats.model.t(),
        method: stats.method,
        samples: stats.samples,
        seed: stats.seed,
        mode,
        indices,
        stats: Some(selected),
    })
}

/// Statistics by `method` followed by selection.
pub fn construct(
    model: &SourceModel,
    len: usize,
    method: Method,
    samples: u64,
    seed: u64,
    mode: SelectionMode,
) -> Result<HighEntropySet> {
    let stats = match method {
        Method::Exact => exact_statistics(model, len)?,
        Method::MonteCarlo => estimate_statistics(model, len, samples, seed)?,
    };
    select_high_entropy_set(&stats, mode)
}

/// Real number serialized with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error;
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if v.is_finite() {
            Ok(Real(v))
        } else {
            Err(D::Error::custom("non-finite real"))
        }
    }
}

fn reals(v: &[f64]) -> Vec<Real> {
    v.iter().copied().map(Real).collect()
}

fn unreal(v: Vec<Real>) -> Vec<f64> {
    v.into_iter().map(|r| r.0).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsBlock {
    entropy: Vec<Real>,
    half_deviation: Vec<Real>,
    entropy_stderr: Vec<Real>,
    half_deviation_stderr: Vec<Real>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeName {
    Threshold,
    TargetRate,
}

#[derive(Serialize, Deserialize)]
struct SetFile {
    format_version: u32,
    #[serde(rename = "N")]
    len: usize,
    s: Real,
    t: Real,
    method: Method,
    samples: u64,
    seed: u64,
    mode: ModeName,
    threshold_or_rate: Real,
    indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stats: Option<StatsBlock>,
}

impl From<&HighEntropySet> for SetFile {
    fn from(set: &HighEntropySet) -> Self {
        SetFile {
            format_version: SET_FORMAT_VERSION,
            len: set.len,
            s: Real(set.s),
            t: Real(set.t),
            method: set.method,
            samples: set.samples,
            seed: set.seed,
            mode: match set.mode {
                SelectionMode::Threshold(_) => ModeName::Threshold,
                SelectionMode::TargetRate(_) => ModeName::TargetRate,
            },
            threshold_or_rate: Real(set.mode.value()),
            indices: set.indices.clone(),
            stats: set.stats.as_ref().map(|st| StatsBlock {
                entropy: reals(&st.entropy),
                half_deviation: reals(&st.half_deviation),
                entropy_stderr: reals(&st.entropy_stderr),
                half_deviation_stderr: reals(&st.half_deviation_stderr),
            }),
        }
    }
}

impl TryFrom<SetFile> for HighEntropySet {
    type Error = WomError;

    fn try_from(f: SetFile) -> Result<Self> {
        let value = f.threshold_or_rate.0;
        Ok(HighEntropySet {
            len: f.len,
            s: f.s.0,
            t: f.t.0,
            method: f.method,
            samples: f.samples,
            seed: f.seed,
            mode: match f.mode {
                ModeName::Threshold => SelectionMode::Threshold(value),
                ModeName::TargetRate => SelectionMode::TargetRate(value),
            },
            indices: f.indices,
            stats: f.stats.map(|b| SelectedStats {
                entropy: unreal(b.entropy),
                half_deviation: unreal(b.half_deviation),
                entropy_stderr: unreal(b.entropy_stderr),
                half_deviation_stderr: unreal(b.half_deviation_stderr),
            }),
        })
    }
}

/// `ceil(s * 256) / 256`: rounding the programmed fraction up keeps the
/// constructed rate at or below the capacity of the measured state.
pub fn quantize_state_fraction(s: f64) -> u32 {
    ((s.clamp(0.0, 1.0) * QUANT_STEPS as f64 - 1e-9)
        .ceil()
        .max(0.0)) as u32
}

/// Nearest grid point, kept strictly inside (0, 1).
pub fn quantize_flip_probability(t: f64) -> u32 {
    ((t * QUANT_STEPS as f64).round() as u32).clamp(1, QUANT_STEPS - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub len: usize,
    pub s_steps: u32,
    pub t_steps: u32,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
}

/// How the cache builds missing sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacheConfig {
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub mode: SelectionMode,
}

/// Sets keyed by block length and quantized model, built on first use.
#[derive(Debug)]
pub struct ConstructionCache {
    config: CacheConfig,
    sets: HashMap<CacheKey, Arc<HighEntropySet>>,
}

impl ConstructionCache {
    pub fn new(config: CacheConfig) -> Self {
        ConstructionCache {
            config,
            sets: HashMap::new(),
        }
    }

    pub fn key(&self, len: usize, s: f64, t: f64) -> CacheKey {
        CacheKey {
            len,
            s_steps: quantize_state_fraction(s),
            t_steps: quantize_flip_probability(t),
            method: self.config.method,
            samples: self.config.samples,
            seed: self.config.seed,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<Arc<HighEntropySet>> {
        self.sets.get(key).cloned()
    }

    /// Returns the cached set for `key`, building it if needed. The quantized
    /// `s` may be 0 (fresh memory) or 1 (nothing writable).
    pub fn get_or_build(&mut self, key: CacheKey) -> Result<Arc<HighEntropySet>> {
        if let Some(set) = self.sets.get(&key) {
            return Ok(set.clone());
        }
        let s = key.s_steps as f64 / QUANT_STEPS as f64;
        let t = key.t_steps as f64 / QUANT_STEPS as f64;
        let model = SourceModel::with_state_fraction(s, t)?;
        let set = if model_stats(&model).capacity == 0.0 {
            HighEntropySet {
                len: key.len,
                s,
                t,
                method: key.method,
                samples: key.samples,
                seed: key.seed,
                mode: self.config.mode,
                indices: Vec::new(),
                stats: None,
            }
        } else {
            construct(
                &model,
                key.len,
                key.method,
                key.samples,
                key.seed,
                self.config.mode,
            )?
        };
        let set = Arc::new(set);
        self.sets.insert(key, set.clone());
        Ok(set)
    }
}
