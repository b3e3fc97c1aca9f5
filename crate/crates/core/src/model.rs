//! The memory-state / codeword probability model.
//!
//! Cells are iid: a cell is already programmed (`y = 0`) with probability `s`.
//! A programmed cell must stay 0. An erased cell (`y = 1`) is driven to 0 with
//! probability `t` and left at 1 otherwise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{ensure_same_len, BitSequence};
use crate::error::{Result, WomError};
use crate::seed;

/// Binary entropy in bits, with `0 log(1/0) = 0`.
pub fn entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WomError::Domain {
            what: "probability",
            range: "[0, 1]",
            value: p,
        });
    }
    Ok(entropy_unchecked(p))
}

#[inline]
pub(crate) fn entropy_unchecked(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// The pair `(s, t)`: `s = P(Y = 0)`, `t = P(X = 0 | Y = 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    s: f64,
    t: f64,
}

impl SourceModel {
    /// Both parameters must lie strictly inside (0, 1).
    pub fn new(s: f64, t: f64) -> Result<Self> {
        check_open_unit("s", s)?;
        check_open_unit("t", t)?;
        Ok(SourceModel { s, t })
    }

    /// Allows `s` on the closed interval. The multi-write simulator uses this
    /// for fresh memory (`s = 0`) and for fully programmed pages (`s = 1`).
    pub(crate) fn with_state_fraction(s: f64, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(WomError::Domain {
                what: "s",
                range: "[0, 1]",
                value: s,
            });
        }
        check_open_unit("t", t)?;
        Ok(SourceModel { s, t })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn p_x0(&self) -> f64 {
        self.s + (1.0 - self.s) * self.t
    }

    pub fn p_x1(&self) -> f64 {
        (1.0 - self.s) * (1.0 - self.t)
    }

    /// `P(X = x | Y = y)`.
    #[inline]
    pub fn conditional(&self, x: u8, y: u8) -> f64 {
        match (x, y) {
            (0, 0) => 1.0,
            (_, 0) => 0.0,
            (0, _) => self.t,
            _ => 1.0 - self.t,
        }
    }

    pub fn p_y(&self, y: u8) -> f64 {
        if y == 0 {
            self.s
        } else {
            1.0 - self.s
        }
    }

    pub fn stats(&self) -> ModelStats {
        model_stats(self)
    }
}

fn check_open_unit(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(WomError::Domain {
            what,
            range: "(0, 1)",
            value: v,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    /// `H(X | Y)` in bits per cell.
    pub conditional_entropy: f64,
    /// Achievable rewrite rate `(1 - s) H(t)` in bits per cell.
    pub capacity: f64,
    /// Expected fraction of cells moved from 1 to 0, `(1 - s) t`.
    pub expected_flip_fraction: f64,
}

pub fn model_stats(model: &SourceModel) -> ModelStats {
    let h = (1.0 - model.s) * entropy_unchecked(model.t);
    ModelStats {
        conditional_entropy: h,
        capacity: h,
        expected_flip_fraction: (1.0 - model.s) * model.t,
    }
}

/// Draws `n` iid cell states; each is 0 with probability `s`.
pub fn sample_state(model: &SourceModel, n: usize, seed: u64) -> BitSequence {
    let mut rng = seed::stream_rng(seed, seed::STREAM_STATE, 0);
    sample_state_with(model, n, &mut rng)
}

pub(crate) fn sample_state_with<R: Rng + ?Sized>(
    model: &SourceModel,
    n: usize,
    rng: &mut R,
) -> BitSequence {
    BitSequence::from_bools((0..n).map(|_| rng.random::<f64>() >= model.s))
}

/// Draws `(y, x)` pairs iid from the joint model.
pub fn sample_joint(model: &SourceModel, n: usize, seed: u64) -> (BitSequence, BitSequence) {
    let mut rng = seed::stream_rng(seed, seed::STREAM_JOINT, 0);
    sample_joint_with(model, n, &mut rng)
}

pub(crate) fn sample_joint_with<R: Rng + ?Sized>(
    model: &SourceModel,
    n: usize,
    rng: &mut R,
) -> (BitSequence, BitSequence) {
    let mut y = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let yi = u8::from(rng.random::<f64>() >= model.s);
        let xi = if yi == 0 {
            0
        } else {
            u8::from(rng.random::<f64>() >= model.t)
        };
        y.push(yi);
        x.push(xi);
    }
    (
        BitSequence::from_vec_unchecked(y),
        BitSequence::from_vec_unchecked(x),
    )
}

/// Number of cells taken from 1 to 0 by writing `x` over `y`.
pub fn count_flips(y: &BitSequence, x: &BitSequence) -> Result<usize> {
    ensure_same_len("codeword", y.len(), x.len())?;
    Ok(y.iter()
        .zip(x.iter())
        .filter(|&(yi, xi)| yi == 1 && xi == 0)
        .count())
}
