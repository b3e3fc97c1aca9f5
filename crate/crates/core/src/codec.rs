//! Randomized rewrite encoder and its decoder.
//!
//! The encoder walks the transformed word `u` from index 0 upward. Indices in
//! the high-entropy set take the next message bit; every other index is drawn
//! from the SC conditional. The codeword is `x = u G_N^{-1} = u G_N`.
//!
//! At finite block length two things can go wrong: a message bit can make the
//! prefix impossible, which shows up as a `(0, 0)` conditional at a later
//! sampled index, or the final codeword can raise a programmed cell. Both are
//! detected; the encoder retries with a fresh substream and reports a
//! structured failure once the attempts run out. The decoder needs neither the
//! memory state nor any randomness.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::bits::{ensure_same_len, BitSequence};
use crate::construct::HighEntropySet;
use crate::error::Result;
use crate::model::{count_flips, SourceModel};
use crate::polar::polar_transform_in_place;
use crate::sc::ScEngine;
use crate::seed;

pub const DEFAULT_MAX_ATTEMPTS: u32 = 8;

/// Message bits `v`, one per index of the high-entropy set.
pub type Message = BitSequence;

/// How indices outside the set are filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrozenRule {
    /// Draw from the SC conditional.
    #[default]
    Sample,
    /// Take the more likely value (ties go to 0). Not part of the randomized
    /// scheme; provided for comparison.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    pub max_attempts: u32,
    pub rule: FrozenRule,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            rule: FrozenRule::Sample,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodeFailure {
    /// The SC conditional at a sampled index was `(0, 0)`.
    ZeroProbabilityEvent { index: usize },
    /// The codeword sets these cells to 1 although they are programmed.
    WriteViolation { positions: Vec<usize> },
}

impl EncodeFailure {
    pub fn kind(&self) -> &'static str {
        match self {
            EncodeFailure::ZeroProbabilityEvent { .. } => "zero_probability_event",
            EncodeFailure::WriteViolation { .. } => "write_violation",
        }
    }
}

impl fmt::Display for EncodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeFailure::ZeroProbabilityEvent { index } => {
                write!(f, "zero-probability conditional at index {index}")
            }
            EncodeFailure::WriteViolation { positions } => {
                write!(f, "codeword raises {} programmed cell(s)", positions.len())
            }
        }
    }
}

/// Result of [`encode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeOutcome {
    /// The codeword, or the failure of the last attempt.
    pub result: std::result::Result<BitSequence, EncodeFailure>,
    /// Attempts consumed, at least 1.
    pub attempts: u32,
    /// Cells moved from 1 to 0, on success.
    pub flips: Option<usize>,
}

impl EncodeOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }

    pub fn codeword(&self) -> Option<&BitSequence> {
        self.result.as_ref().ok()
    }
}

/// One pass of the encoder without retries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub u: BitSequence,
    pub x: BitSequence,
    pub failure: Option<EncodeFailure>,
}

/// Positions where a programmed cell (`y = 0`) would be raised to 1.
pub fn validate_write(y: &BitSequence, x: &BitSequence) -> Result<Vec<usize>> {
    ensure_same_len("codeword", y.len(), x.len())?;
    Ok(y.iter()
        .zip(x.iter())
        .enumerate()
        .filter(|(_, (yi, xi))| *yi == 0 && *xi == 1)
        .map(|(n, _)| n)
        .collect())
}

fn check_dimensions(set: &HighEntropySet, y: &BitSequence, v: &Message) -> Result<()> {
    ensure_same_len("memory state", set.len, y.len())?;
    ensure_same_len("message", set.message_len(), v.len())
}

/// Runs the encoder once with the given random source.
///
/// When a sampled index sees a `(0, 0)` conditional, the first such index is
/// recorded and that bit is drawn uniformly so the pass can finish. Over random
/// states and uniform messages the returned `u` is therefore distributed
/// exactly as the idealized encoder distribution, whether or not the attempt
/// fails.
pub fn encode_attempt<R: Rng + ?Sized>(
    model: &SourceModel,
    set: &HighEntropySet,
    y: &BitSequence,
    v: &Message,
    rule: FrozenRule,
    rng: &mut R,
) -> Result<Attempt> {
    check_dimensions(set, y, v)?;
    let mask = set.message_mask();
    let mut engine = ScEngine::new(model, y)?;
    let mut message = v.iter();
    let mut impossible = None;
    for &carries_message in &mask {
        let bit = if carries_message {
            message.next().expect("message length checked")
        } else {
            let d = engine.dist()?;
            if d.is_impossible() {
                impossible.get_or_insert(engine.cursor());
                u8::from(rng.random::<bool>())
            } else {
                match rule {
                    FrozenRule::Sample => u8::from(rng.random::<f64>() >= d.q0),
                    FrozenRule::Greedy => u8::from(d.q1 > d.q0),
                }
            }
        };
        engine.advance(bit)?;
    }
    let u = engine.into_decided();
    let mut x = u.as_slice().to_vec();
    polar_transform_in_place(&mut x)?;
    let x = BitSequence::from_vec_unchecked(x);
    let failure = match impossible {
        Some(index) => Some(EncodeFailure::ZeroProbabilityEvent { index }),
        None => {
            let positions = validate_write(y, &x)?;
            (!positions.is_empty()).then_some(EncodeFailure::WriteViolation { positions })
        }
    };
    Ok(Attempt { u, x, failure })
}

/// Writes message `v` over memory state `y`.
///
/// Attempt `a` draws from substream `a` of `seed`; the message is the same
/// for every attempt. Argument errors (wrong lengths) are returned as `Err`;
/// encoding failures are reported inside the outcome.
pub fn encode(
    model: &SourceModel,
    set: &HighEntropySet,
    y: &BitSequence,
    v: &Message,
    seed: u64,
    options: EncodeOptions,
) -> Result<EncodeOutcome> {
    check_dimensions(set, y, v)?;
    let max_attempts = options.max_attempts.max(1);
    let mut last_failure = None;
    for attempt in 0..max_attempts {
        let mut rng = seed::stream_rng(seed, seed::STREAM_ENCODE, u64::from(attempt));
        let Attempt { x, failure, .. } = encode_attempt(model, set, y, v, options.rule, &mut rng)?;
        match failure {
            None => {
                let flips = count_flips(y, &x)?;
                return Ok(EncodeOutcome {
                    result: Ok(x),
                    attempts: attempt + 1,
                    flips: Some(flips),
                });
            }
            Some(f) => last_failure = Some(f),
        }
        // Greedy passes are deterministic; retrying cannot help.
        if options.rule == FrozenRule::Greedy {
            return Ok(EncodeOutcome {
                result: Err(last_failure.expect("failure recorded")),
                attempts: attempt + 1,
                flips: None,
            });
        }
    }
    Ok(EncodeOutcome {
        result: Err(last_failure.expect("at least one attempt")),
        attempts: max_attempts,
        flips: None,
    })
}

/// Reads the message back: `u = x G_N`, restricted to the set, in index order.
pub fn decode(x: &BitSequence, set: &HighEntropySet) -> Result<Message> {
    ensure_same_len("codeword", set.len, x.len())?;
    let mut u = x.as_slice().to_vec();
    polar_transform_in_place(&mut u)?;
    Ok(BitSequence::from_vec_unchecked(
        set.indices.iter().map(|&i| u[i]).collect(),
    ))
}
