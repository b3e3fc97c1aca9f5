//! Successive computation of `P(U_i | y, u_0 .. u_{i-1})` for `u = x G_N`.
//!
//! The engine keeps one layer of probability pairs per tree level and one layer
//! of partial sums, and recomputes only the part of the tree that the next
//! index depends on. A full pass over `N` indices costs `O(N log N)` pair
//! operations and `O(N)` memory.
//!
//! Pairs stay in the linear domain and are renormalized after every combine.
//! The model has exact zeros (`P(X = 1 | Y = 0) = 0`), which log-ratio
//! representations cannot hold. A prefix of probability zero shows up as the
//! pair `(0, 0)` and stays that way for the rest of the pass.

use crate::bits::{ensure_same_len, BitSequence};
use crate::error::{Result, WomError};
use crate::model::SourceModel;
use crate::polar::{polar_transform_in_place, TransformSize};

/// Largest block length accepted by [`brute_force_conditional`].
pub const MAX_BRUTE_FORCE_LEN: usize = 12;

/// Weights `(q0, q1)` of a binary variable. Normalized pairs sum to one; the
/// pair `(0, 0)` marks an event of probability zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbPair {
    pub q0: f64,
    pub q1: f64,
}

impl ProbPair {
    pub const IMPOSSIBLE: ProbPair = ProbPair { q0: 0.0, q1: 0.0 };

    pub fn new(q0: f64, q1: f64) -> Self {
        ProbPair { q0, q1 }
    }

    #[inline]
    pub fn get(self, bit: u8) -> f64 {
        if bit == 0 {
            self.q0
        } else {
            self.q1
        }
    }

    pub fn is_impossible(self) -> bool {
        self.q0 == 0.0 && self.q1 == 0.0
    }

    /// Scales to unit sum; a zero pair stays zero.
    #[inline]
    pub fn normalized(self) -> Self {
        let sum = self.q0 + self.q1;
        if sum > 0.0 {
            ProbPair {
                q0: self.q0 / sum,
                q1: self.q1 / sum,
            }
        } else {
            Self::IMPOSSIBLE
        }
    }

    /// Distribution of `a ⊕ b` for independent `a`, `b`.
    #[inline]
    fn xor_combine(a: ProbPair, b: ProbPair) -> ProbPair {
        ProbPair {
            q0: a.q0 * b.q0 + a.q1 * b.q1,
            q1: a.q1 * b.q0 + a.q0 * b.q1,
        }
        .normalized()
    }

    /// Distribution of `b` once `a ⊕ b = known` is fixed.
    #[inline]
    fn given_sum(a: ProbPair, b: ProbPair, known: u8) -> ProbPair {
        ProbPair {
            q0: a.get(known) * b.q0,
            q1: a.get(known ^ 1) * b.q1,
        }
        .normalized()
    }
}

/// `(P(X = 0 | y), P(X = 1 | y))`.
pub fn leaf_pair(model: &SourceModel, y_bit: u8) -> ProbPair {
    ProbPair::new(model.conditional(0, y_bit), model.conditional(1, y_bit))
}

/// Stateful successive-cancellation pass over one memory state.
#[derive(Clone, Debug)]
pub struct ScEngine {
    model: SourceModel,
    log: usize,
    /// `probs[l]` holds `2^(log - l)` pairs; level 0 is the leaves.
    probs: Vec<Vec<ProbPair>>,
    /// Partial sums feeding the lower branches, same shape as `probs`.
    sums: Vec<Vec<[u8; 2]>>,
    u: Vec<u8>,
    cursor: usize,
    ready: bool,
}

impl ScEngine {
    pub fn new(model: &SourceModel, y: &BitSequence) -> Result<Self> {
        let size = TransformSize::from_len(y.len())?;
        let log = size.log() as usize;
        let len = size.len();
        let mut probs = Vec::with_capacity(log + 1);
        let mut sums = Vec::with_capacity(log + 1);
        probs.push(y.iter().map(|b| leaf_pair(model, b)).collect());
        sums.push(vec![[0u8; 2]; len]);
        for l in 1..=log {
            probs.push(vec![ProbPair::IMPOSSIBLE; len >> l]);
            sums.push(vec![[0u8; 2]; len >> l]);
        }
        Ok(ScEngine {
            model: *model,
            log,
            probs,
            sums,
            u: Vec::with_capacity(len),
            cursor: 0,
            ready: false,
        })
    }

    pub fn model(&self) -> &SourceModel {
        &self.model
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        1 << self.log
    }

    /// Index of the next undecided bit.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_complete(&self) -> bool {
        self.cursor == self.len()
    }

    /// Bits fixed so far.
    pub fn decided(&self) -> &[u8] {
        &self.u
    }

    pub fn into_decided(self) -> BitSequence {
        BitSequence::from_vec_unchecked(self.u)
    }

    /// Normalized conditional distribution of the bit at the cursor given the
    /// memory state and every bit fixed so far.
    pub fn dist(&mut self) -> Result<ProbPair> {
        if self.is_complete() {
            return Err(WomError::EngineExhausted(self.len()));
        }
        if !self.ready {
            self.compute(self.log, self.cursor);
            self.ready = true;
        }
        Ok(self.probs[self.log][0])
    }

    /// Fixes the bit at the cursor and moves on. Fixing a bit of probability
    /// zero is allowed; every later distribution is then `(0, 0)`.
    pub fn advance(&mut self, bit: u8) -> Result<()> {
        if self.is_complete() {
            return Err(WomError::EngineExhausted(self.len()));
        }
        if bit > 1 {
            return Err(WomError::BitParse(format!("value {bit} is not a bit")));
        }
        if !self.ready {
            // Later phases reuse the pair layers computed for this one.
            self.compute(self.log, self.cursor);
        }
        let phase = self.cursor;
        self.sums[self.log][0][phase & 1] = bit;
        if phase & 1 == 1 {
            self.propagate_sums(self.log, phase);
        }
        self.u.push(bit);
        self.cursor += 1;
        self.ready = false;
        Ok(())
    }

    fn compute(&mut self, level: usize, phase: usize) {
        if level == 0 {
            return;
        }
        if phase & 1 == 0 {
            self.compute(level - 1, phase >> 1);
        }
        let (below, above) = self.probs.split_at_mut(level);
        let src = &below[level - 1];
        let dst = &mut above[0];
        if phase & 1 == 0 {
            for (d, pair) in dst.iter_mut().zip(src.chunks_exact(2)) {
                *d = ProbPair::xor_combine(pair[0], pair[1]);
            }
        } else {
            let known = &self.sums[level];
            for ((d, pair), k) in dst.iter_mut().zip(src.chunks_exact(2)).zip(known) {
                *d = ProbPair::given_sum(pair[0], pair[1], k[0]);
            }
        }
    }

    fn propagate_sums(&mut self, level: usize, phase: usize) {
        let half = phase >> 1;
        let slot = half & 1;
        let (below, above) = self.sums.split_at_mut(level);
        let src = &above[0];
        let dst = &mut below[level - 1];
        for (s, d) in src.iter().zip(dst.chunks_exact_mut(2)) {
            d[0][slot] = s[0] ^ s[1];
            d[1][slot] = s[1];
        }
        if half & 1 == 1 {
            self.propagate_sums(level - 1, half);
        }
    }
}

/// `P(U_i | y, prefix[..i])` by summing `P(x | y)` over all `2^N` words `x`.
pub fn brute_force_conditional(
    model: &SourceModel,
    y: &BitSequence,
    prefix: &[u8],
    i: usize,
) -> Result<ProbPair> {
    let len = y.len();
    TransformSize::from_len(len)?;
    if len > MAX_BRUTE_FORCE_LEN {
        return Err(WomError::TooLarge {
            what: "brute-force block length",
            limit: MAX_BRUTE_FORCE_LEN,
            got: len,
        });
    }
    if i >= len {
        return Err(WomError::TooLarge {
            what: "index",
            limit: len - 1,
            got: i,
        });
    }
    if prefix.len() < i {
        return Err(WomError::LengthMismatch {
            what: "prefix",
            expected: i,
            found: prefix.len(),
        });
    }
    let mut acc = [0.0f64; 2];
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
        if word[..i] == prefix[..i] {
            acc[word[i] as usize] += p;
        }
    }
    Ok(ProbPair::new(acc[0], acc[1]).normalized())
}

/// `Π_i P(u_i | y, u_0 .. u_{i-1})` along one engine pass; equals `P(x | y)`
/// for `x = u G_N`.
pub fn chain_probability(model: &SourceModel, y: &BitSequence, u: &BitSequence) -> Result<f64> {
    ensure_same_len("transformed word", y.len(), u.len())?;
    let mut engine = ScEngine::new(model, y)?;
    let mut product = 1.0;
    for bit in u.iter() {
        let d = engine.dist()?;
        product *= d.get(bit);
        if product == 0.0 {
            return Ok(0.0);
        }
        engine.advance(bit)?;
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: f64, t: f64) -> SourceModel {
        SourceModel::new(s, t).unwrap()
    }

    fn seq(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    fn assert_pair(p: ProbPair, q0: f64, q1: f64) {
        assert!(
            (p.q0 - q0).abs() < 1e-12 && (p.q1 - q1).abs() < 1e-12,
            "{p:?} vs ({q0}, {q1})"
        );
    }

    #[test]
    fn leaf_pairs() {
        assert_pair(leaf_pair(&model(0.5, 0.3), 0), 1.0, 0.0);
        assert_pair(leaf_pair(&model(0.5, 0.5), 1), 0.5, 0.5);
        assert_pair(leaf_pair(&model(0.5, 0.25), 1), 0.25, 0.75);
    }

    #[test]
    fn single_cell_engine() {
        let mut e = ScEngine::new(&model(0.5, 0.3), &seq("0")).unwrap();
        assert_pair(e.dist().unwrap(), 1.0, 0.0);
        let mut e = ScEngine::new(&model(0.5, 0.3), &seq("1")).unwrap();
        assert_pair(e.dist().unwrap(), 0.3, 0.7);
    }

    #[test]
    fn two_cell_examples() {
        let m = model(0.5, 0.5);
        let mut e = ScEngine::new(&m, &seq("11")).unwrap();
        assert_pair(e.dist().unwrap(), 0.5, 0.5);
        e.advance(0).unwrap();
        assert_pair(e.dist().unwrap(), 0.5, 0.5);

        let m = model(0.5, 0.35);
        let mut e = ScEngine::new(&m, &seq("01")).unwrap();
        assert_pair(e.dist().unwrap(), 0.35, 0.65);
        e.advance(0).unwrap();
        assert_pair(e.dist().unwrap(), 1.0, 0.0);

        let mut e = ScEngine::new(&m, &seq("00")).unwrap();
        e.advance(1).unwrap();
        assert!(e.dist().unwrap().is_impossible());
    }

    #[test]
    fn impossibility_is_absorbing() {
        let m = model(0.5, 0.5);
        let mut e = ScEngine::new(&m, &seq("00000000")).unwrap();
        e.advance(1).unwrap();
        while !e.is_complete() {
            assert!(e.dist().unwrap().is_impossible());
            e.advance(0).unwrap();
        }
    }

    #[test]
    fn engine_bookkeeping() {
        let m = model(0.4, 0.6);
        let u = seq("0110");
        let mut e = ScEngine::new(&m, &seq("1011")).unwrap();
        for b in u.iter() {
            e.advance(b).unwrap();
        }
        assert!(e.is_complete());
        assert!(e.dist().is_err());
        assert!(e.advance(0).is_err());
        assert_eq!(e.into_decided(), u);
        assert!(ScEngine::new(&m, &seq("101")).is_err());
    }

    #[test]
    fn brute_force_matches_leaf_at_length_one() {
        for t in [0.2, 0.5] {
            let m = model(0.5, t);
            for y in ["0", "1"] {
                let y = seq(y);
                let bf = brute_force_conditional(&m, &y, &[], 0).unwrap();
                let leaf = leaf_pair(&m, y[0]);
                assert_pair(bf, leaf.q0, leaf.q1);
            }
        }
    }

    #[test]
    fn brute_force_two_cells() {
        let m = model(0.5, 0.5);
        assert_pair(
            brute_force_conditional(&m, &seq("11"), &[0], 1).unwrap(),
            0.5,
            0.5,
        );
        assert!(brute_force_conditional(&m, &seq("00"), &[1], 1)
            .unwrap()
            .is_impossible());
        assert!(brute_force_conditional(&m, &BitSequence::ones(16), &[], 0).is_err());
    }

    #[test]
    fn chain_probability_single_cell() {
        let m = model(0.5, 0.5);
        assert_eq!(chain_probability(&m, &seq("0"), &seq("0")).unwrap(), 1.0);
        assert_eq!(chain_probability(&m, &seq("0"), &seq("1")).unwrap(), 0.0);
    }

    #[test]
    fn engine_matches_brute_force_everywhere_small() {
        let m = model(0.5, 0.5);
        for log in 1..=3u32 {
            let len = 1usize << log;
            for yv in 0..1usize << len {
                let y = BitSequence::from_index(yv, len);
                for uv in 0..1usize << len {
                    let u = BitSequence::from_index(uv, len);
                    let mut e = ScEngine::new(&m, &y).unwrap();
                    for i in 0..len {
                        let fast = e.dist().unwrap();
                        let slow = brute_force_conditional(&m, &y, u.as_slice(), i).unwrap();
                        assert!(
                            (fast.q0 - slow.q0).abs() <= 1e-10
                                && (fast.q1 - slow.q1).abs() <= 1e-10,
                            "y={y} u={u} i={i}: {fast:?} vs {slow:?}"
                        );
                        e.advance(u[i]).unwrap();
                    }
                }
            }
        }
    }
}
