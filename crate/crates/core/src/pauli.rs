// SPDX-License-Identifier: Apache-2.0

//! Bit-packed n-qubit Pauli strings.
//!
//! A string is stored as an X-mask and a Z-mask; qubit `q` lives in bit
//! `q % 64` of word `q / 64`. The local Pauli on a qubit decodes as
//!
//! | (x, z) | Pauli | digit |
//! |--------|-------|-------|
//! | (0, 0) | I     | 0     |
//! | (1, 0) | X     | 1     |
//! | (1, 1) | Y     | 2     |
//! | (0, 1) | Z     | 3     |
//!
//! A k-qubit local word is indexed in base 4 with the first listed qubit as
//! the least-significant digit, matching the row/column order of
//! [`Ptm`](crate::channel::Ptm). Qubit 0 is also the least-significant bit of
//! every dense matrix index in this crate, so `A ⊗ B` puts `A` on the
//! lower-indexed qubit. No phases are tracked here: every sign the
//! propagation algorithms need is carried by [`SignedPauli::coeff`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: u8 = 0;
pub const X: u8 = 1;
pub const Y: u8 = 2;
pub const Z: u8 = 3;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

#[inline]
fn digit_from_bits(x: u64, z: u64) -> u8 {
    // (0,0)->0, (1,0)->1, (1,1)->2, (0,1)->3, without branches
    (x + z + 2 * (z & !x & 1)) as u8
}

#[inline]
fn bits_from_digit(d: u8) -> (u64, u64) {
    let d = d as u64;
    ((d ^ (d >> 1)) & 1, (d >> 1) & 1)
}

/// Number of 4-ary digits that fit the local index of a `k`-qubit word.
#[inline]
pub fn local_dim(k: usize) -> usize {
    1usize << (2 * k)
}

/// Decodes a base-4 local index into per-qubit digits (first digit first).
pub fn decode_local(index: usize, k: usize) -> Vec<u8> {
    (0..k).map(|t| ((index >> (2 * t)) & 3) as u8).collect()
}

/// Inverse of [`decode_local`].
pub fn encode_local(digits: &[u8]) -> usize {
    digits
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &d)| acc | ((d as usize & 3) << (2 * t)))
}

/// Number of `Y` factors in a local index; `σ^T = (-1)^{#Y} σ`.
pub fn local_y_count(index: usize, k: usize) -> u32 {
    (0..k).filter(|t| (index >> (2 * t)) & 3 == Y as usize).count() as u32
}

/// An n-qubit Pauli word without phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    /// Builds a string from one digit per qubit.
    pub fn from_digits(digits: &[u8]) -> Self {
        let mut p = Self::identity(digits.len());
        for (q, &d) in digits.iter().enumerate() {
            p.set_unchecked(q, d);
        }
        p
    }

    /// Builds a string from raw masks; bits beyond `n` must be clear.
    pub fn from_masks(n: usize, x: Vec<u64>, z: Vec<u64>) -> Result<Self> {
        let words = n.div_ceil(64).max(1);
        if x.len() != words || z.len() != words {
            return Err(Error::ShapeMismatch(format!(
                "expected {words} mask words for {n} qubits"
            )));
        }
        let p = Self { n, x, z };
        for w in 0..words {
            let valid = if (w + 1) * 64 <= n {
                u64::MAX
            } else {
                (1u64 << (n - w * 64)) - 1
            };
            if (p.x[w] | p.z[w]) & !valid != 0 {
                return Err(Error::InvalidPauli("mask bits set beyond n".into()));
            }
        }
        Ok(p)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> &[u64] {
        &self.x
    }

    pub fn z_mask(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn get(&self, qubit: usize) -> Result<u8> {
        self.check(qubit)?;
        Ok(self.get_unchecked(qubit))
    }

    /// First X and Z words: the whole string when `n ≤ 64`.
    #[inline]
    pub(crate) fn low_words(&self) -> (u64, u64) {
        (self.x[0], self.z[0])
    }

    #[inline]
    pub(crate) fn set_low_words(&mut self, x: u64, z: u64) {
        self.x[0] = x;
        self.z[0] = z;
    }

    #[inline]
    pub fn get_unchecked(&self, qubit: usize) -> u8 {
        let (w, b) = (qubit >> 6, qubit & 63);
        digit_from_bits((self.x[w] >> b) & 1, (self.z[w] >> b) & 1)
    }

    pub fn set(&mut self, qubit: usize, digit: u8) -> Result<()> {
        self.check(qubit)?;
        self.set_unchecked(qubit, digit);
        Ok(())
    }

    #[inline]
    pub fn set_unchecked(&mut self, qubit: usize, digit: u8) {
        let (w, b) = (qubit >> 6, qubit & 63);
        let (xb, zb) = bits_from_digit(digit);
        self.x[w] = (self.x[w] & !(1 << b)) | (xb << b);
        self.z[w] = (self.z[w] & !(1 << b)) | (zb << b);
    }

    /// Local base-4 index on `qubits`, without range checks.
    #[inline]
    pub fn local_index_unchecked(&self, qubits: &[usize]) -> usize {
        let mut idx = 0;
        for (t, &q) in qubits.iter().enumerate() {
            idx |= (self.get_unchecked(q) as usize) << (2 * t);
        }
        idx
    }

    /// Overwrites the local word on `qubits`, without range checks.
    #[inline]
    pub fn set_local_unchecked(&mut self, qubits: &[usize], index: usize) {
        for (t, &q) in qubits.iter().enumerate() {
            self.set_unchecked(q, ((index >> (2 * t)) & 3) as u8);
        }
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.get_unchecked(q)).collect()
    }

    fn check(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n {
            Err(Error::QubitOutOfRange { qubit, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Up to three qubits addressed as one local word. Unused slots repeat the
/// first qubit so reads and writes do not branch on the arity.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LocalSlots {
    qubits: [usize; 3],
    /// Valid local-index bits.
    mask: usize,
    /// Bits of the qubits in a one-word string (`n ≤ 64`).
    word_mask: u64,
}

impl LocalSlots {
    pub(crate) fn new(qubits: &[usize]) -> Self {
        assert!((1..=3).contains(&qubits.len()), "local words span 1 to 3 qubits");
        let mut padded = [qubits[0]; 3];
        padded[..qubits.len()].copy_from_slice(qubits);
        Self {
            qubits: padded,
            mask: (1 << (2 * qubits.len())) - 1,
            word_mask: qubits.iter().filter(|&&q| q < 64).fold(0, |m, &q| m | 1 << q),
        }
    }

    #[inline]
    pub(crate) fn index(&self, p: &PauliString) -> usize {
        let [a, b, c] = self.qubits;
        let word = p.get_unchecked(a) as usize
            | (p.get_unchecked(b) as usize) << 2
            | (p.get_unchecked(c) as usize) << 4;
        word & self.mask
    }

    /// Padded slots receive digit 0 first and are then overwritten by slot 0.
    #[inline]
    pub(crate) fn set(&self, p: &mut PauliString, index: usize) {
        let [a, b, c] = self.qubits;
        p.set_unchecked(c, ((index >> 4) & 3) as u8);
        p.set_unchecked(b, ((index >> 2) & 3) as u8);
        p.set_unchecked(a, (index & 3) as u8);
    }

    /// `index` on the masks of a one-word string.
    #[inline]
    pub(crate) fn word_index(&self, x: u64, z: u64) -> usize {
        let mut idx = 0;
        for (t, &q) in self.qubits.iter().enumerate() {
            let (xb, zb) = ((x >> q) & 1, (z >> q) & 1);
            idx |= (digit_from_bits(xb, zb) as usize) << (2 * t);
        }
        idx & self.mask
    }

    /// `set` on the masks of a one-word string.
    #[inline]
    pub(crate) fn set_word(&self, x: u64, z: u64, index: usize) -> (u64, u64) {
        let (mut nx, mut nz) = (0u64, 0u64);
        for (t, &q) in self.qubits.iter().enumerate() {
            let (xb, zb) = bits_from_digit(((index >> (2 * t)) & 3) as u8);
            nx |= xb << q;
            nz |= zb << q;
        }
        ((x & !self.word_mask) | nx, (z & !self.word_mask) | nz)
    }
}

pub(crate) fn check_subset(qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Base-4 index of the local word of `p` on `qubits` (I=0, X=1, Y=2, Z=3;
/// the first listed qubit is the least-significant digit).
pub fn pauli_index_on_subset(p: &PauliString, qubits: &[usize]) -> Result<usize> {
    check_subset(qubits, p.n)?;
    Ok(p.local_index_unchecked(qubits))
}

/// Returns `p` with the local word on `qubits` replaced by `local_index`.
pub fn replace_on_subset(
    p: &PauliString,
    qubits: &[usize],
    local_index: usize,
) -> Result<PauliString> {
    check_subset(qubits, p.n)?;
    if local_index >= local_dim(qubits.len()) {
        return Err(Error::LocalIndexOutOfRange {
            index: local_index,
            k: qubits.len(),
        });
    }
    let mut out = p.clone();
    out.set_local_unchecked(qubits, local_index);
    Ok(out)
}

/// Normalized trace inner product `Tr(ab) / 2^n` of two Pauli strings.
pub fn trace_inner_product_paulis(a: &PauliString, b: &PauliString) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::QubitCountMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(if a == b { 1.0 } else { 0.0 })
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", LETTERS[self.get_unchecked(q) as usize])?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses text such as `"XIZY"`, qubit 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(I),
                'X' => Ok(X),
                'Y' => Ok(Y),
                'Z' => Ok(Z),
                other => Err(Error::InvalidPauli(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if digits.is_empty() {
            return Err(Error::InvalidPauli("empty string".into()));
        }
        Ok(Self::from_digits(&digits))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli string scaled by a real weight: the estimator atom `ĉ·σ̂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedPauli {
    pub pauli: PauliString,
    pub coeff: f64,
}
