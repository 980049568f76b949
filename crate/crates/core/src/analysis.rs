//! Rule tables viewed as boolean functions: balance, Walsh spectrum,
//! nonlinearity, algebraic normal form, and a reversibility check for rule
//! pairs.
//!
//! Inputs are indexed like neighborhood codes: variable 0 (`a` for a
//! five-variable function) is the leftmost cell and the most significant bit
//! of the index.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Automaton, CaState, NeighborhoodMode};
use crate::rule::{RulePair, RuleTable};
use crate::{Bits, Error, Result};

/// Largest variable count the dense representations handle.
pub const MAX_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n_vars: usize,
    truth_table: Bits,
}

impl BooleanFunction {
    pub fn new(n_vars: usize, truth_table: Bits) -> Result<Self> {
        if n_vars > MAX_VARS {
            return Err(Error::InvalidParameter(format!("{n_vars} variables exceeds {MAX_VARS}")));
        }
        if truth_table.len() != 1 << n_vars {
            return Err(Error::LengthMismatch {
                expected: 1 << n_vars,
                actual: truth_table.len(),
            });
        }
        Ok(Self { n_vars, truth_table })
    }

    pub fn from_fn(n_vars: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        Self::new(n_vars, Bits::from_bools((0..1usize << n_vars).map(f)))
    }

    pub fn random<R: Rng + ?Sized>(n_vars: usize, rng: &mut R) -> Result<Self> {
        Self::new(n_vars, Bits::random(1 << n_vars, rng))
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn truth_table(&self) -> &Bits {
        &self.truth_table
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.truth_table.get(x)
    }

    /// Value of variable `var` (0 = leftmost) in input `x`.
    #[inline]
    pub fn var(&self, x: usize, var: usize) -> bool {
        (x >> (self.n_vars - 1 - var)) & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.truth_table.count_ones()
    }
}

/// The rule's truth table as a function of its `2r + 1` neighborhood cells.
pub fn to_boolean_function(rule: &RuleTable) -> BooleanFunction {
    BooleanFunction {
        n_vars: rule.width(),
        truth_table: rule.table().clone(),
    }
}

pub fn is_balanced(f: &BooleanFunction) -> bool {
    2 * f.weight() == f.truth_table.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    /// `W(w) = sum_x (-1)^(f(x) xor w.x)`.
    pub coefficients: Vec<i64>,
}

impl WalshSpectrum {
    pub fn max_abs(&self) -> i64 {
        self.coefficients.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn sum_of_squares(&self) -> i128 {
        self.coefficients.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }
}

/// Fast Walsh-Hadamard transform of `(-1)^f`.
pub fn walsh_spectrum(f: &BooleanFunction) -> WalshSpectrum {
    let mut w: Vec<i64> = f.truth_table.iter().map(|b| if b { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < w.len() {
        for chunk in w.chunks_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    WalshSpectrum { coefficients: w }
}

/// Distance to the nearest affine function, `2^(n-1) - max|W| / 2`.
pub fn nonlinearity(f: &BooleanFunction) -> usize {
    let half = 1usize << f.n_vars >> 1;
    half - (walsh_spectrum(f).max_abs() / 2) as usize
}

/// Algebraic normal form: a XOR of monomials over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Anf {
    n_vars: usize,
    /// Bit `m` is the coefficient of the monomial whose variables are the
    /// set bits of `m` (same indexing as function inputs).
    coefficients: Bits,
}

impl Anf {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Monomial masks with nonzero coefficient.
    pub fn monomials(&self) -> Vec<usize> {
        self.coefficients.iter_ones().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.count_ones() == 0
    }

    pub fn degree(&self) -> usize {
        self.monomials().iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: usize) -> bool {
        self.coefficients.iter_ones().filter(|&m| m & x == m).count() % 2 == 1
    }

    /// Truth table obtained by evaluating the polynomial on every input.
    pub fn to_function(&self) -> BooleanFunction {
        let mut table = self.coefficients.clone();
        moebius_in_place(&mut table, self.n_vars);
        BooleanFunction {
            n_vars: self.n_vars,
            truth_table: table,
        }
    }
}

/// `a, b, c, d, e` for five variables, otherwise `x1 .. xn`, leftmost first.
pub fn variable_name(n_vars: usize, var: usize) -> String {
    if n_vars == 5 {
        ((b'a' + var as u8) as char).to_string()
    } else {
        format!("x{}", var + 1)
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut monomials = self.monomials();
        if monomials.is_empty() {
            return f.write_str("0");
        }
        let n = self.n_vars;
        // Constant first, then by degree, then by variable order.
        let vars_of = |m: usize| -> Vec<usize> { (0..n).filter(|&v| (m >> (n - 1 - v)) & 1 == 1).collect() };
        monomials.sort_by_key(|&m| (m.count_ones(), vars_of(m)));
        let terms: Vec<String> = monomials
            .into_iter()
            .map(|m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    vars_of(m)
                        .into_iter()
                        .map(|v| variable_name(n, v))
                        .collect::<Vec<_>>()
                        .join("·")
                }
            })
            .collect();
        f.write_str(&terms.join(" ⊕ "))
    }
}

// The Möbius transform over GF(2) is its own inverse.
fn moebius_in_place(bits: &mut Bits, n_vars: usize) {
    let len = 1usize << n_vars;
    let mut h = 1;
    while h < len {
        for base in (0..len).step_by(2 * h) {
            for i in base..base + h {
                if bits.get(i) {
                    bits.flip(i + h);
                }
            }
        }
        h *= 2;
    }
}

pub fn anf(f: &BooleanFunction) -> Anf {
    let mut coefficients = f.truth_table.clone();
    moebius_in_place(&mut coefficients, f.n_vars);
    Anf {
        n_vars: f.n_vars,
        coefficients,
    }
}

/// Enumerate when the state has at most this many bits.
pub const ENUMERATION_LIMIT_BITS: usize = 20;
/// Random states examined when the state is too large to enumerate.
pub const SAMPLING_TRIALS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReversibilityCheck {
    pub reversible: bool,
    /// True when every state was enumerated.
    pub exhaustive: bool,
    pub states_checked: u64,
}

/// Checks that `(q[t-1], q[t]) -> (q[t], q[t+1])` is one-to-one on a ring of
/// `size` cells.
///
/// States of up to [`ENUMERATION_LIMIT_BITS`] bits are enumerated.
/// Larger ones are sampled: for each random state, flipping any single bit of
/// `q[t-1]` must change `q[t+1]`, and for complementary pairs stepping back
/// must restore the state.
pub fn verify_pair_reversibility(rules: &RulePair, size: usize, mode: NeighborhoodMode) -> Result<ReversibilityCheck> {
    verify_pair_reversibility_seeded(rules, size, mode, 0x5eed)
}

pub fn verify_pair_reversibility_seeded(
    rules: &RulePair,
    size: usize,
    mode: NeighborhoodMode,
    seed: u64,
) -> Result<ReversibilityCheck> {
    let automaton = Automaton::new(rules.clone(), size, mode)?;
    if 2 * size <= ENUMERATION_LIMIT_BITS {
        return Ok(enumerate_injectivity(&automaton));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complementary = rules.is_complementary();
    for trial in 0..SAMPLING_TRIALS {
        let start = CaState::new(Bits::random(size, &mut rng), Bits::random(size, &mut rng))?;
        let mut s = start.clone();
        automaton.step_forward(&mut s)?;
        let ok = if complementary {
            let image = s.clone();
            automaton.step_backward(&mut s)?;
            s == start && {
                // One flipped prev bit must show up in the image.
                let mut prev = start.prev().clone();
                let i = rng.gen_range(0..size);
                prev.flip(i);
                let mut other = CaState::new(prev, start.curr().clone())?;
                automaton.step_forward(&mut other)?;
                other != image
            }
        } else {
            (0..size).all(|i| {
                let mut prev = start.prev().clone();
                prev.flip(i);
                let mut other = CaState::new(prev, start.curr().clone()).expect("same size");
                automaton.step_forward(&mut other).expect("same size");
                other != s
            })
        };
        if !ok {
            return Ok(ReversibilityCheck {
                reversible: false,
                exhaustive: false,
                states_checked: trial as u64 + 1,
            });
        }
    }
    Ok(ReversibilityCheck {
        reversible: true,
        exhaustive: false,
        states_checked: SAMPLING_TRIALS as u64,
    })
}

fn enumerate_injectivity(automaton: &Automaton) -> ReversibilityCheck {
    let n = automaton.size();
    let total = 1u64 << (2 * n);
    let mut seen = Bits::zeros(total as usize);
    for code in 0..total {
        let prev = Bits::from_u128(n, (code & ((1 << n) - 1)) as u128);
        let curr = Bits::from_u128(n, (code >> n) as u128);
        let mut s = CaState::new(prev, curr).expect("same size");
        automaton.step_forward(&mut s).expect("same size");
        let image = s.prev().to_u128().expect("small") as usize | (s.curr().to_u128().expect("small") as usize) << n;
        if seen.get(image) {
            return ReversibilityCheck {
                reversible: false,
                exhaustive: true,
                states_checked: code + 1,
            };
        }
        seen.set(image, true);
    }
    ReversibilityCheck {
        reversible: true,
        exhaustive: true,
        states_checked: total,
    }
}

/// Everything `analyze-rule` prints for one rule.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleReport {
    pub radius: usize,
    pub hex: String,
    pub weight: usize,
    pub table_len: usize,
    pub balanced: bool,
    pub nonlinearity: usize,
    pub anf: String,
    pub anf_degree: usize,
    pub reversibility: ReversibilityCheck,
}

pub fn analyze_rule(rule: &RuleTable, size: usize, mode: NeighborhoodMode) -> Result<RuleReport> {
    let f = to_boolean_function(rule);
    let polynomial = anf(&f);
    Ok(RuleReport {
        radius: rule.radius(),
        hex: rule.to_hex(),
        weight: f.weight(),
        table_len: f.truth_table.len(),
        balanced: is_balanced(&f),
        nonlinearity: nonlinearity(&f),
        anf: polynomial.to_string(),
        anf_degree: polynomial.degree(),
        reversibility: verify_pair_reversibility(&RulePair::from_rule(rule.clone()), size, mode)?,
    })
}

impl RuleReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rule:          0x{} (radius {})", self.hex, self.radius);
        let _ = writeln!(s, "weight:        {}/{}", self.weight, self.table_len);
        let _ = writeln!(s, "balanced:      {}", if self.balanced { "yes" } else { "no" });
        let _ = writeln!(s, "nonlinearity:  {}", self.nonlinearity);
        let _ = writeln!(s, "anf degree:    {}", self.anf_degree);
        let _ = writeln!(s, "anf:           {}", self.anf);
        let r = &self.reversibility;
        let _ = writeln!(
            s,
            "reversible:    {} ({} {} states)",
            if r.reversible { "yes" } else { "no" },
            if r.exhaustive { "enumerated" } else { "sampled" },
            r.states_checked
        );
        s
    }
}
