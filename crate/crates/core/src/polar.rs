//! The GF(2) polar transform `u = x G_N` with `G_N = F^{⊗n} B_N`,
//! `F = [[1, 0], [1, 1]]` and `B_N` the bit-reversal permutation.
//!
//! `G_N` is its own inverse over GF(2), so the same routine maps codewords to
//! transformed words and back.

use crate::bits::BitSequence;
use crate::error::{Result, WomError};

/// Largest log-size accepted by [`gn_matrix`].
pub const MAX_MATRIX_LOG: u32 = 10;

/// A power-of-two block length `N = 2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransformSize {
    log: u32,
}

impl TransformSize {
    pub fn from_log(n: u32) -> Result<Self> {
        if n >= usize::BITS - 1 {
            return Err(WomError::TooLarge {
                what: "log block length",
                limit: (usize::BITS - 2) as usize,
                got: n as usize,
            });
        }
        Ok(TransformSize { log: n })
    }

    pub fn from_len(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(WomError::NotPowerOfTwo(len));
        }
        Ok(TransformSize {
            log: len.trailing_zeros(),
        })
    }

    pub fn log(self) -> u32 {
        self.log
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        1usize << self.log
    }
}

#[inline]
fn reverse_bits(i: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n)
    }
}

/// `π(i)` = the `n`-bit reversal of `i`, for `i < 2^n`.
pub fn bit_reversal_perm(n: u32) -> Vec<usize> {
    (0..1usize << n).map(|i| reverse_bits(i, n)).collect()
}

/// In-place `bits ← bits · G_N`. `bits.len()` must be a power of two.
pub fn polar_transform_in_place(bits: &mut [u8]) -> Result<()> {
    let size = TransformSize::from_len(bits.len())?;
    let n = bits.len();
    // x · F^{⊗n}: each tensor factor XORs the upper half of a block with its lower half.
    let mut half = n / 2;
    while half > 0 {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half /= 2;
    }
    // · B_N
    for i in 0..n {
        let j = reverse_bits(i, size.log());
        if i < j {
            bits.swap(i, j);
        }
    }
    Ok(())
}

/// `x · G_N` over GF(2), in O(N log N).
pub fn polar_transform(x: &BitSequence) -> Result<BitSequence> {
    let mut bits = x.as_slice().to_vec();
    polar_transform_in_place(&mut bits)?;
    Ok(BitSequence::from_vec_unchecked(bits))
}

/// Dense square GF(2) matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    dim: usize,
    entries: Vec<u8>,
}

impl BitMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        BitMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.dim + c]
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    /// Row vector times matrix, `x · self`.
    pub fn left_multiply(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.dim {
            return Err(WomError::LengthMismatch {
                what: "vector",
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut out = vec![0u8; self.dim];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 1 {
                for (o, &g) in out.iter_mut().zip(self.row(r)) {
                    *o ^= g;
                }
            }
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if other.dim != self.dim {
            return Err(WomError::LengthMismatch {
                what: "matrix",
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for r in 0..self.dim {
            entries.extend(other.left_multiply(self.row(r))?);
        }
        Ok(BitMatrix {
            dim: self.dim,
            entries,
        })
    }
}

/// Explicit `G_N = F^{⊗n} B_N`, built by repeated Kronecker products. Intended
/// as a reference for the fast transform; storage is O(N²).
pub fn gn_matrix(n: u32) -> Result<BitMatrix> {
    if n > MAX_MATRIX_LOG {
        return Err(WomError::TooLarge {
            what: "generator matrix log-size",
            limit: MAX_MATRIX_LOG as usize,
            got: n as usize,
        });
    }
    // F^{⊗(k+1)} = F ⊗ F^{⊗k} = [[K, 0], [K, K]]
    let mut kron = BitMatrix::identity(1);
    for _ in 0..n {
        let d = kron.dim;
        let mut next = vec![0u8; 4 * d * d];
        for r in 0..d {
            for c in 0..d {
                let v = kron.get(r, c);
                next[r * 2 * d + c] = v;
                next[(r + d) * 2 * d + c] = v;
                next[(r + d) * 2 * d + c + d] = v;
            }
        }
        kron = BitMatrix {
            dim: 2 * d,
            entries: next,
        };
    }
    // (K B_N)[r][c] = K[r][π(c)]
    let perm = bit_reversal_perm(n);
    let dim = kron.dim;
    let mut entries = vec![0u8; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            entries[r * dim + c] = kron.get(r, perm[c]);
        }
    }
    Ok(BitMatrix { dim, entries })
}
