//! Rule tables and complement rule pairs.
//!
//! A radius-`r` rule is a truth table over the `2r + 1` cells of a
//! neighborhood. Entry `k` is the output for the neighborhood whose cells,
//! read left to right, spell `k` in binary with the leftmost cell most
//! significant (the Wolfram numbering, so radius-1 rule 236 is the usual
//! rule 236).

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Bits, Error, Result, MAX_RADIUS};

/// Number of entries in a radius-`r` rule table, `2^(2r+1)`.
pub fn table_len(radius: usize) -> usize {
    1usize << (2 * radius + 1)
}

fn check_radius(radius: usize) -> Result<()> {
    if (1..=MAX_RADIUS).contains(&radius) {
        Ok(())
    } else {
        Err(Error::InvalidRadius(radius))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RuleTable {
    radius: usize,
    table: Bits,
}

impl RuleTable {
    pub fn new(radius: usize, table: Bits) -> Result<Self> {
        check_radius(radius)?;
        let expected = table_len(radius);
        if table.len() != expected {
            return Err(Error::TableLength {
                radius,
                expected,
                actual: table.len(),
            });
        }
        Ok(Self { radius, table })
    }

    /// Rule from its number. Only radii 1..=2 have tables narrow enough for
    /// every value to fit; wider radii accept any value below 2^128.
    pub fn from_number(radius: usize, number: u128) -> Result<Self> {
        check_radius(radius)?;
        let d = table_len(radius);
        if d < 128 && number >> d != 0 {
            return Err(Error::InvalidHex(format!(
                "rule number {number:#x} does not fit in {d} bits"
            )));
        }
        Self::new(radius, Bits::from_u128(d, number))
    }

    /// Uniformly random rule over all `2^d` tables.
    pub fn random<R: Rng + ?Sized>(radius: usize, rng: &mut R) -> Result<Self> {
        check_radius(radius)?;
        Self::new(radius, Bits::random(table_len(radius), rng))
    }

    /// Uniformly random rule among the balanced tables (weight `d/2`).
    pub fn random_balanced<R: Rng + ?Sized>(radius: usize, rng: &mut R) -> Result<Self> {
        check_radius(radius)?;
        let d = table_len(radius);
        let mut positions: Vec<usize> = (0..d).collect();
        let (ones, _) = positions.partial_shuffle(rng, d / 2);
        let mut table = Bits::zeros(d);
        for &k in ones.iter() {
            table.set(k, true);
        }
        Self::new(radius, table)
    }

    /// Parses a hexadecimal rule, most significant digit first, with an
    /// optional `0x` prefix. Short strings are zero-extended.
    pub fn from_hex(radius: usize, hex: &str) -> Result<Self> {
        check_radius(radius)?;
        let d = table_len(radius);
        let digits = hex.trim();
        let digits = digits
            .strip_prefix("0x")
            .or_else(|| digits.strip_prefix("0X"))
            .unwrap_or(digits);
        if digits.is_empty() {
            return Err(Error::InvalidHex("empty rule".into()));
        }
        let mut table = Bits::zeros(d);
        for (pos, c) in digits.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(format!("bad digit {c:?} in {hex:?}")))?;
            for j in 0..4 {
                if (nibble >> j) & 1 == 1 {
                    let k = 4 * pos + j;
                    if k >= d {
                        return Err(Error::InvalidHex(format!(
                            "{hex:?} does not fit in a {d}-bit radius-{radius} table"
                        )));
                    }
                    table.set(k, true);
                }
            }
        }
        Self::new(radius, table)
    }

    /// Lowercase hex of exactly `ceil(d/4)` digits, most significant first.
    pub fn to_hex(&self) -> String {
        let d = self.table.len();
        let digits = d.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for pos in (0..digits).rev() {
            let mut nibble = 0u32;
            for j in 0..4 {
                let k = 4 * pos + j;
                if k < d && self.table.get(k) {
                    nibble |= 1 << j;
                }
            }
            s.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        s
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Neighborhood width `2r + 1`.
    #[inline]
    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    #[inline]
    pub fn output(&self, code: usize) -> bool {
        self.table.get(code)
    }

    pub fn table(&self) -> &Bits {
        &self.table
    }

    /// Number of neighborhoods mapped to 1.
    pub fn weight(&self) -> usize {
        self.table.count_ones()
    }

    /// The rule number, if it fits in 128 bits.
    pub fn number(&self) -> Option<u128> {
        self.table.to_u128()
    }
}

impl fmt::Debug for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RuleTable(r={}, 0x{})", self.radius, self.to_hex())
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", self.to_hex())
    }
}

/// The complement rule `2^d - R - 1`, i.e. every table entry inverted.
pub fn complement_rule(rule: &RuleTable) -> RuleTable {
    RuleTable {
        radius: rule.radius,
        table: rule.table.not(),
    }
}

/// A rule and its complement. The first rule fires where the cell's previous
/// state is 1, the second where it is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RulePair {
    r1: RuleTable,
    r2: RuleTable,
}

impl RulePair {
    pub fn from_rule(r1: RuleTable) -> Self {
        let r2 = complement_rule(&r1);
        Self { r1, r2 }
    }

    /// Arbitrary pair, not necessarily complementary. Only complementary
    /// pairs can be stepped backwards.
    pub fn from_tables(r1: RuleTable, r2: RuleTable) -> Result<Self> {
        if r1.radius != r2.radius {
            return Err(Error::RadiusMismatch(r1.radius, r2.radius));
        }
        Ok(Self { r1, r2 })
    }

    pub fn random<R: Rng + ?Sized>(radius: usize, rng: &mut R) -> Result<Self> {
        Ok(Self::from_rule(RuleTable::random(radius, rng)?))
    }

    pub fn r1(&self) -> &RuleTable {
        &self.r1
    }

    pub fn r2(&self) -> &RuleTable {
        &self.r2
    }

    pub fn radius(&self) -> usize {
        self.r1.radius
    }

    pub fn is_complementary(&self) -> bool {
        self.r1.table.xor(&self.r2.table).count_ones() == self.r1.table.len()
    }

    /// Output for neighborhood `code` given the cell's previous state.
    #[inline]
    pub fn apply(&self, code: usize, previous: bool) -> bool {
        if previous {
            self.r1.output(code)
        } else {
            self.r2.output(code)
        }
    }
}
