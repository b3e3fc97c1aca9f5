//! Binary vectors used for memory states, codewords, transformed words and
//! messages, plus their one-line text format.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WomError};

/// An ordered sequence of bits, one `u8` (0 or 1) per position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    /// Wraps `bits`, rejecting any value other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(WomError::BitParse(format!(
                "value {} at position {pos} is not a bit",
                bits[pos]
            )));
        }
        Ok(BitSequence(bits))
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitSequence(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitSequence(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        BitSequence(vec![1; len])
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitSequence(bits.into_iter().map(u8::from).collect())
    }

    /// Bits of `value`, least significant bit at position 0.
    pub fn from_index(value: usize, len: usize) -> Self {
        BitSequence((0..len).map(|i| ((value >> i) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    /// Position-wise XOR.
    pub fn xor(&self, other: &BitSequence) -> Result<BitSequence> {
        ensure_same_len("xor operand", self.len(), other.len())?;
        Ok(BitSequence(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Reads the text format: one line of '0'/'1' characters. A single
    /// trailing newline (LF or CRLF) is accepted.
    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| WomError::io(path, e))?;
        let line = text
            .strip_suffix('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .unwrap_or(&text);
        line.parse()
    }

    /// Writes the text format, newline-terminated.
    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_line()).map_err(|e| WomError::io(path, e))
    }

    /// The text format including the trailing newline.
    pub fn to_line(&self) -> String {
        let mut s = self.to_string();
        s.push('\n');
        s
    }
}

pub(crate) fn ensure_same_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(WomError::LengthMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .0
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for BitSequence {
    type Err = WomError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(WomError::BitParse(format!(
                    "unexpected character {other:?} at column {i}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitSequence)
    }
}

impl TryFrom<String> for BitSequence {
    type Error = WomError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BitSequence> for String {
    fn from(b: BitSequence) -> String {
        b.to_string()
    }
}

impl AsRef<[u8]> for BitSequence {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl std::ops::Index<usize> for BitSequence {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}
