//! Experiment harness: single-write trials, multi-write chains, and the exact
//! total-variation check between the model and the encoder distribution.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSequence;
use crate::codec::{decode, encode, EncodeFailure, EncodeOptions};
use crate::construct::{
    exact_statistics, CacheKey, ConstructionCache, HighEntropySet, PrefixTable, MAX_EXACT_LEN,
};
use crate::error::{Result, WomError};
use crate::model::{entropy_unchecked, model_stats, sample_state_with, SourceModel};
use crate::polar::TransformSize;
use crate::seed;

/// Column order of the CSV report.
pub const CSV_HEADER: &str =
    "N,s,t,rate,capacity,trials,successes,zero_prob_failures,violations,flip_mean,flip_stderr,seconds";

/// Aggregated statistics of a batch of write trials.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub len: usize,
    pub s: f64,
    pub t: f64,
    /// Message bits per cell.
    pub rate: f64,
    pub capacity: f64,
    pub trials: u64,
    pub successes: u64,
    pub zero_prob_failures: u64,
    pub violations: u64,
    /// Mean fraction of cells moved 1 → 0 over successful writes.
    pub flip_mean: f64,
    pub flip_stderr: f64,
    pub expected_flip_fraction: f64,
    /// Successful writes whose decoded message differed from the input.
    pub decode_mismatches: u64,
    /// Cells that went 0 → 1 between consecutive states (multi-write only).
    pub state_regressions: u64,
    pub attempts: u64,
    pub seconds: f64,
}

impl ExperimentReport {
    pub fn failures(&self) -> u64 {
        self.zero_prob_failures + self.violations
    }

    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures() as f64 / self.trials as f64
        }
    }

    /// `(capacity - rate) / capacity`.
    pub fn capacity_gap(&self) -> f64 {
        if self.capacity > 0.0 {
            (self.capacity - self.rate) / self.capacity
        } else {
            0.0
        }
    }

    fn row(&self, timing: bool) -> ReportRow {
        ReportRow {
            len: self.len,
            s: self.s,
            t: self.t,
            rate: self.rate,
            capacity: self.capacity,
            trials: self.trials,
            successes: self.successes,
            zero_prob_failures: self.zero_prob_failures,
            violations: self.violations,
            flip_mean: self.flip_mean,
            flip_stderr: self.flip_stderr,
            seconds: timing.then_some(self.seconds),
        }
    }
}

#[derive(Serialize)]
struct ReportRow {
    #[serde(rename = "N")]
    len: usize,
    s: f64,
    t: f64,
    rate: f64,
    capacity: f64,
    trials: u64,
    successes: u64,
    zero_prob_failures: u64,
    violations: u64,
    flip_mean: f64,
    flip_stderr: f64,
    seconds: Option<f64>,
}

/// CSV with [`CSV_HEADER`]. Without `timing` the `seconds` column is left
/// empty so that identical runs produce identical bytes.
pub fn reports_to_csv(reports: &[ExperimentReport], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let row = r.row(timing);
        let seconds = row.seconds.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.len,
            row.s,
            row.t,
            row.rate,
            row.capacity,
            row.trials,
            row.successes,
            row.zero_prob_failures,
            row.violations,
            row.flip_mean,
            row.flip_stderr,
            seconds
        );
    }
    out
}

/// JSON array mirroring the CSV columns; `seconds` is null without `timing`.
pub fn reports_to_json(reports: &[ExperimentReport], timing: bool) -> Result<String> {
    let rows: Vec<ReportRow> = reports.iter().map(|r| r.row(timing)).collect();
    let mut s = serde_json::to_string_pretty(&rows)?;
    s.push('\n');
    Ok(s)
}

/// Integer tallies; merging is exact and order-independent.
#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    trials: u64,
    successes: u64,
    zero_prob: u64,
    violations: u64,
    mismatches: u64,
    regressions: u64,
    attempts: u64,
    flips: u64,
    flips_sq: u128,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.successes += o.successes;
        self.zero_prob += o.zero_prob;
        self.violations += o.violations;
        self.mismatches += o.mismatches;
        self.regressions += o.regressions;
        self.attempts += o.attempts;
        self.flips += o.flips;
        self.flips_sq += o.flips_sq;
        self
    }

    fn record_failure(&mut self, failure: &EncodeFailure) {
        match failure {
            EncodeFailure::ZeroProbabilityEvent { .. } => self.zero_prob += 1,
            EncodeFailure::WriteViolation { .. } => self.violations += 1,
        }
    }

    fn record_success(&mut self, flips: usize) {
        self.successes += 1;
        self.flips += flips as u64;
        self.flips_sq += (flips as u128) * (flips as u128);
    }

    /// Mean and standard error of the per-success flip fraction.
    fn flip_summary(&self, len: usize) -> (f64, f64) {
        if self.successes == 0 {
            return (0.0, 0.0);
        }
        let k = self.successes as f64;
        let n = len as f64;
        let mean = self.flips as f64 / k / n;
        if self.successes < 2 {
            return (mean, 0.0);
        }
        let sum = self.flips as f64 / n;
        let sum_sq = self.flips_sq as f64 / (n * n);
        let var = ((sum_sq - sum * mean) / (k - 1.0)).max(0.0);
        (mean, (var / k).sqrt())
    }
}

fn random_message<R: Rng + ?Sized>(len: usize, rng: &mut R) -> BitSequence {
    BitSequence::from_bools((0..len).map(|_| rng.random::<bool>()))
}

/// `trials` independent writes: fresh state from the model, uniform message,
/// encode, check, decode. Trial `k` uses substream `k` of `seed`.
pub fn run_write_experiment(
    model: &SourceModel,
    set: &HighEntropySet,
    trials: u64,
    seed: u64,
    options: EncodeOptions,
) -> Result<ExperimentReport> {
    TransformSize::from_len(set.len)?;
    let started = Instant::now();
    let len = set.len;
    let tally = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<Tally> {
            let mut tally = Tally {
                trials: 1,
                ..Tally::default()
            };
            let mut rng = seed::stream_rng(seed, seed::STREAM_TRIAL, k);
            let y = sample_state_with(model, len, &mut rng);
            let v = random_message(set.message_len(), &mut rng);
            let out = encode(
                model,
                set,
                &y,
                &v,
                seed::derive(seed, seed::STREAM_ENCODE, k),
                options,
            )?;
            tally.attempts += u64::from(out.attempts);
            match &out.result {
                Ok(x) => {
                    tally.record_success(out.flips.unwrap_or(0));
                    if decode(x, set)? != v {
                        tally.mismatches += 1;
                    }
                }
                Err(f) => tally.record_failure(f),
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let stats = model_stats(model);
    let (flip_mean, flip_stderr) = tally.flip_summary(len);
    Ok(ExperimentReport {
        len,
        s: model.s(),
        t: model.t(),
        rate: set.rate(),
        capacity: stats.capacity,
        trials,
        successes: tally.successes,
        zero_prob_failures: tally.zero_prob,
        violations: tally.violations,
        flip_mean,
        flip_stderr,
        expected_flip_fraction: stats.expected_flip_fraction,
        decode_mismatches: tally.mismatches,
        state_regressions: 0,
        attempts: tally.attempts,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Chains `schedule.len()` writes on `trials` independent pages of `len`
/// cells, starting from erased memory (all ones).
///
/// Before write `k` each page's programmed fraction `s_k` is measured and the
/// set for `(s_k, t_k)` is taken from the construction cache (built on first
/// use). A failed write leaves the page unchanged. Report `k` carries the mean
/// measured `s_k`, the mean rate, and the capacity `(1 - s_k) H(t_k)`.
pub fn run_multiwrite(
    schedule: &[f64],
    len: usize,
    trials: u64,
    seed: u64,
    options: EncodeOptions,
    cache: &mut ConstructionCache,
) -> Result<Vec<ExperimentReport>> {
    TransformSize::from_len(len)?;
    if schedule.is_empty() {
        return Err(WomError::Domain {
            what: "schedule length",
            range: "[1, inf)",
            value: 0.0,
        });
    }
    for &t in schedule {
        SourceModel::new(0.5, t)?;
    }
    let mut states: Vec<BitSequence> = (0..trials).map(|_| BitSequence::ones(len)).collect();
    let mut reports = Vec::with_capacity(schedule.len());
    for (write, &t) in schedule.iter().enumerate() {
        let started = Instant::now();
        let keys: Vec<CacheKey> = states
            .iter()
            .map(|y| cache.key(len, y.count_zeros() as f64 / len as f64, t))
            .collect();
        let mut seen = HashSet::new();
        for key in &keys {
            if seen.insert(*key) {
                cache.get_or_build(*key)?;
            }
        }
        let write_seed = seed::derive(seed, seed::STREAM_WRITE, write as u64);
        let cache_ref = &*cache;
        let results: Vec<(BitSequence, Tally, usize)> = states
            .par_iter()
            .zip(keys.par_iter())
            .enumerate()
            .map(|(k, (y, key))| -> Result<(BitSequence, Tally, usize)> {
                let set = cache_ref.get(key).expect("set built above");
                let model = set.model()?;
                let mut tally = Tally {
                    trials: 1,
                    ..Tally::default()
                };
                let mut rng = seed::stream_rng(write_seed, seed::STREAM_TRIAL, k as u64);
                let v = random_message(set.message_len(), &mut rng);
                let enc_seed = seed::derive(write_seed, seed::STREAM_ENCODE, k as u64);
                let out = encode(&model, &set, y, &v, enc_seed, options)?;
                tally.attempts += u64::from(out.attempts);
                let next = match out.result {
                    Ok(x) => {
                        tally.record_success(out.flips.unwrap_or(0));
                        if decode(&x, &set)? != v {
                            tally.mismatches += 1;
                        }
                        tally.regressions += y
                            .iter()
                            .zip(x.iter())
                            .filter(|&(a, b)| a == 0 && b == 1)
                            .count() as u64;
                        x
                    }
                    Err(f) => {
                        tally.record_failure(&f);
                        y.clone()
                    }
                };
                Ok((next, tally, set.message_len()))
            })
            .collect::<Result<_>>()?;
        let mut tally = Tally::default();
        let mut bits_total = 0u64;
        let zeros_total: u64 = states.iter().map(|y| y.count_zeros() as u64).sum();
        let mut next_states = Vec::with_capacity(results.len());
        for (state, t_k, m) in results {
            tally = tally.merge(t_k);
            bits_total += m as u64;
            next_states.push(state);
        }
        states = next_states;
        let cells = (trials as f64) * len as f64;
        let (s_mean, rate) = if trials == 0 {
            (0.0, 0.0)
        } else {
            (zeros_total as f64 / cells, bits_total as f64 / cells)
        };
        let (flip_mean, flip_stderr) = tally.flip_summary(len);
        reports.push(ExperimentReport {
            len,
            s: s_mean,
            t,
            rate,
            capacity: (1.0 - s_mean) * entropy_unchecked(t),
            trials,
            successes: tally.successes,
            zero_prob_failures: tally.zero_prob,
            violations: tally.violations,
            flip_mean,
            flip_stderr,
            expected_flip_fraction: (1.0 - s_mean) * t,
            decode_mismatches: tally.mismatches,
            state_regressions: tally.regressions,
            attempts: tally.attempts,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(reports)
}

/// Exact comparison of the model distribution `P(y, u)` with the encoder
/// distribution `Q(y, u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvReport {
    #[serde(rename = "N")]
    pub len: usize,
    pub indices: Vec<usize>,
    /// `Σ |P(y, u) - Q(y, u)|` over all `(y, u)`.
    pub tv: f64,
    /// `2 Σ_{i in F} a_i` with exact `a_i`.
    pub bound: f64,
}

/// Enumerates `Q(u | y)` for every `u`, with `u_j` at bit `j` of the index.
///
/// Indices in `message_mask` are uniform; the rest follow the exact model
/// conditional, falling back to uniform where the prefix has probability
/// zero (the same convention as [`crate::codec::encode_attempt`]).
pub(crate) fn encoder_distribution(table: &PrefixTable, message_mask: &[bool]) -> Vec<f64> {
    let len = table.len();
    // Before the first message index Q and P coincide; copy P so that an
    // empty set gives a distance of exactly zero.
    let shared = message_mask.iter().position(|&m| m).unwrap_or(len);
    let mut q: Vec<f64> = if shared == 0 {
        vec![1.0]
    } else {
        (0..1usize << shared)
            .map(|u| table.prefix_weight(shared, u))
            .collect()
    };
    for i in shared..len {
        let mut next = vec![0.0; q.len() * 2];
        for (prefix, &w) in q.iter().enumerate() {
            let cond = if message_mask[i] {
                [0.5, 0.5]
            } else {
                let joint = table.joint(i, prefix).normalized();
                if joint.is_impossible() {
                    [0.5, 0.5]
                } else {
                    [joint.q0, joint.q1]
                }
            };
            next[prefix] = w * cond[0];
            next[prefix | (1 << i)] = w * cond[1];
        }
        q = next;
    }
    q
}

/// Exact total variation between `P` and the encoder distribution for the
/// given set, plus the per-index bound. Requires `N <= 8`.
pub fn tv_distance_exact(model: &SourceModel, set: &HighEntropySet) -> Result<TvReport> {
    let len = set.len;
    TransformSize::from_len(len)?;
    if len > MAX_EXACT_LEN {
        return Err(WomError::TooLarge {
            what: "exact TV block length",
            limit: MAX_EXACT_LEN,
            got: len,
        });
    }
    let stats = exact_statistics(model, len)?;
    let mask = set.message_mask();
    let mut tv = 0.0;
    for yv in 0..1usize << len {
        let y = BitSequence::from_index(yv, len);
        let p_y: f64 = y.iter().map(|b| model.p_y(b)).product();
        if p_y == 0.0 {
            continue;
        }
        let table = PrefixTable::new(model, &y)?;
        let q = encoder_distribution(&table, &mask);
        for (u, &qu) in q.iter().enumerate() {
            let pu = table.prefix_weight(len, u);
            tv += p_y * (pu - qu).abs();
        }
    }
    let bound = 2.0
        * set
            .indices
            .iter()
            .map(|&i| stats.half_deviation[i])
            .sum::<f64>();
    Ok(TvReport {
        len,
        indices: set.indices.clone(),
        tv,
        bound,
    })
}
