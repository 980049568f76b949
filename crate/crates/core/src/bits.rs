//! Fixed-length bit vectors used for CA configurations, rule tables and
//! bitstreams.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::Error;

/// A fixed-length sequence of bits packed into 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in the
/// last word are always zero, so derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        bits.clear_tail();
        bits
    }

    /// Uniformly random bits.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Self {
            len,
            words: (0..word_count(len)).map(|_| rng.gen()).collect(),
        };
        bits.clear_tail();
        bits
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut bits = Self::zeros(0);
        for b in iter {
            bits.push(b);
        }
        bits
    }

    /// Builds `len` bits from the low bits of `value`, bit `i` taken from
    /// `value >> i`.
    pub fn from_u128(len: usize, value: u128) -> Self {
        let mut bits = Self::zeros(len);
        for i in 0..len.min(128) {
            if (value >> i) & 1 == 1 {
                bits.set(i, true);
            }
        }
        bits
    }

    /// Inverse of [`Bits::from_u128`]; `None` if a set bit lies at index 128 or above.
    pub fn to_u128(&self) -> Option<u128> {
        let mut value = 0u128;
        for i in self.iter_ones() {
            if i >= 128 {
                return None;
            }
            value |= 1 << i;
        }
        Some(value)
    }

    /// Unpacks bytes with the most significant bit of each byte first.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        let mut bits = Self::zeros(bytes.len() * 8);
        for (k, byte) in bytes.iter().enumerate() {
            for j in 0..8 {
                if (byte >> (7 - j)) & 1 == 1 {
                    bits.set(8 * k + j, true);
                }
            }
        }
        bits
    }

    /// Packs bits into bytes, most significant bit first, zero-filling the
    /// final partial byte.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in self.iter_ones() {
            out[i / 8] |= 0x80 >> (i % 8);
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// Appends all of `other`.
    pub fn extend_from(&mut self, other: &Bits) {
        self.reserve(other.len);
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn reserve(&mut self, additional: usize) {
        let need = word_count(self.len + additional);
        self.words.reserve(need.saturating_sub(self.words.len()));
    }

    /// Shortens to `len` bits; no-op when already shorter.
    pub fn truncate(&mut self, len: usize) {
        if len < self.len {
            self.len = len;
            self.words.truncate(word_count(len));
            self.clear_tail();
        }
    }

    /// Copy of bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> Bits {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = Bits::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where `self` and `other` differ.
    ///
    /// # Panics
    /// If the lengths differ.
    pub fn hamming_distance(&self, other: &Bits) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Bitwise complement.
    pub fn not(&self) -> Bits {
        let mut out = Bits {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    /// Bitwise exclusive or.
    ///
    /// # Panics
    /// If the lengths differ.
    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

/// Renders as a string of `0`/`1` characters, bit 0 first.
impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses a string of `0`/`1` characters; ASCII whitespace is ignored.
impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Bits::zeros(0);
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(bits)
    }
}
