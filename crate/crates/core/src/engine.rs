//! Second-order reversible CA evolution.
//!
//! The state is a pair of consecutive configurations `(q[t-1], q[t])`. A
//! forward step computes, for every cell `i`,
//!
//! ```text
//! out = r1(nbhd(q[t], i))  if q[t-1][i] == 1
//!       r2(nbhd(q[t], i))  otherwise
//! ```
//!
//! In the standard neighborhood `out` becomes `q[t+1][i]`; in the spread
//! neighborhood it lands on cell `5i mod N`. For a complementary pair this is
//! `r1(nbhd) XNOR q[t-1][i]`, which can be solved for `q[t-1][i]`, giving the
//! backward step.

use std::fmt;
use std::mem;
use std::str::FromStr;

use crate::rule::RulePair;
use crate::{Bits, Error, Result};

/// Multiplier of the spread neighborhood's output permutation.
pub const SPREAD_FACTOR: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NeighborhoodMode {
    /// The new value of cell `i` is written back to cell `i`.
    #[default]
    Standard,
    /// The new value computed at cell `i` is written to cell `5i mod N`.
    Spread,
}

impl NeighborhoodMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NeighborhoodMode::Standard => "standard",
            NeighborhoodMode::Spread => "spread",
        }
    }

    /// Checks that the mode can drive a ring of `size` cells.
    pub fn validate(self, size: usize) -> Result<()> {
        match self {
            NeighborhoodMode::Standard => Ok(()),
            NeighborhoodMode::Spread if size.is_multiple_of(SPREAD_FACTOR) => Err(Error::InvalidSpreadSize(size)),
            NeighborhoodMode::Spread => Ok(()),
        }
    }
}

impl fmt::Display for NeighborhoodMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeighborhoodMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(NeighborhoodMode::Standard),
            "spread" => Ok(NeighborhoodMode::Spread),
            other => Err(Error::Parse(format!("unknown neighborhood mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// Code of the radius-`radius` window around cell `i` on a ring, leftmost
/// cell most significant.
pub fn neighborhood_code(config: &Bits, i: usize, radius: usize) -> usize {
    let n = config.len();
    let mut code = 0;
    for j in 0..=2 * radius {
        let cell = (i + n * (radius + 1) + j - radius) % n;
        code = (code << 1) | config.get(cell) as usize;
    }
    code
}

/// Calls `emit(i, code_i)` for every cell in order, sliding the window one
/// cell at a time.
#[inline]
fn for_each_code(config: &Bits, radius: usize, mut emit: impl FnMut(usize, usize)) {
    let n = config.len();
    let mask = (1usize << (2 * radius + 1)) - 1;
    let mut code = neighborhood_code(config, 0, radius);
    emit(0, code);
    let mut incoming = radius + 1;
    for i in 1..n {
        if incoming == n {
            incoming = 0;
        }
        code = ((code << 1) | config.get(incoming) as usize) & mask;
        incoming += 1;
        emit(i, code);
    }
}

/// The pair `(q[t-1], q[t])` of consecutive configurations.
#[derive(Clone)]
pub struct CaState {
    prev: Bits,
    curr: Bits,
    // Reused output buffer so stepping does not allocate.
    spare: Bits,
}

impl CaState {
    pub fn new(prev: Bits, curr: Bits) -> Result<Self> {
        if prev.len() != curr.len() {
            return Err(Error::LengthMismatch {
                expected: prev.len(),
                actual: curr.len(),
            });
        }
        let spare = Bits::zeros(prev.len());
        Ok(Self { prev, curr, spare })
    }

    /// Configuration `q[t-1]`.
    pub fn prev(&self) -> &Bits {
        &self.prev
    }

    /// Configuration `q[t]`.
    pub fn curr(&self) -> &Bits {
        &self.curr
    }

    pub fn size(&self) -> usize {
        self.prev.len()
    }

    pub fn into_parts(self) -> (Bits, Bits) {
        (self.prev, self.curr)
    }

    /// `(q[t], q[t-1])`: the time-reversed state.
    pub fn swapped(&self) -> CaState {
        CaState {
            prev: self.curr.clone(),
            curr: self.prev.clone(),
            spare: Bits::zeros(self.size()),
        }
    }
}

impl PartialEq for CaState {
    fn eq(&self, other: &Self) -> bool {
        self.prev == other.prev && self.curr == other.curr
    }
}

impl Eq for CaState {}

impl fmt::Debug for CaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaState")
            .field("prev", &self.prev)
            .field("curr", &self.curr)
            .finish()
    }
}

/// A rule pair bound to a ring size and neighborhood mode.
///
/// Immutable once built, so one automaton can be shared by any number of
/// threads each stepping its own [`CaState`].
#[derive(Clone, Debug)]
pub struct Automaton {
    rules: RulePair,
    size: usize,
    mode: NeighborhoodMode,
    // Spread mode: target[i] = 5i mod N. Empty in standard mode.
    target: Vec<usize>,
}

impl Automaton {
    pub fn new(rules: RulePair, size: usize, mode: NeighborhoodMode) -> Result<Self> {
        let width = rules.r1().width();
        if size < width {
            return Err(Error::SizeTooSmall { size, width });
        }
        mode.validate(size)?;
        let target = match mode {
            NeighborhoodMode::Standard => Vec::new(),
            NeighborhoodMode::Spread => (0..size).map(|i| (SPREAD_FACTOR * i) % size).collect(),
        };
        Ok(Self {
            rules,
            size,
            mode,
            target,
        })
    }

    pub fn rules(&self) -> &RulePair {
        &self.rules
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mode(&self) -> NeighborhoodMode {
        self.mode
    }

    pub fn radius(&self) -> usize {
        self.rules.radius()
    }

    fn check(&self, state: &CaState) -> Result<()> {
        if state.size() != self.size {
            return Err(Error::LengthMismatch {
                expected: self.size,
                actual: state.size(),
            });
        }
        Ok(())
    }

    /// Advances `state` from `(q[t-1], q[t])` to `(q[t], q[t+1])`.
    pub fn step_forward(&self, state: &mut CaState) -> Result<()> {
        self.check(state)?;
        let CaState { prev, curr, spare } = state;
        let rules = &self.rules;
        match self.mode {
            NeighborhoodMode::Standard => for_each_code(curr, rules.radius(), |i, code| {
                spare.set(i, rules.apply(code, prev.get(i)));
            }),
            NeighborhoodMode::Spread => for_each_code(curr, rules.radius(), |i, code| {
                spare.set(self.target[i], rules.apply(code, prev.get(i)));
            }),
        }
        mem::swap(&mut state.prev, &mut state.curr);
        mem::swap(&mut state.curr, &mut state.spare);
        Ok(())
    }

    /// Rewinds `state` from `(q[t], q[t+1])` to `(q[t-1], q[t])`.
    pub fn step_backward(&self, state: &mut CaState) -> Result<()> {
        self.check(state)?;
        if !self.rules.is_complementary() {
            return Err(Error::NotComplementary);
        }
        let CaState { prev, curr, spare } = state;
        let r1 = self.rules.r1();
        match self.mode {
            NeighborhoodMode::Standard => for_each_code(prev, r1.radius(), |i, code| {
                spare.set(i, r1.output(code) == curr.get(i));
            }),
            NeighborhoodMode::Spread => for_each_code(prev, r1.radius(), |i, code| {
                spare.set(i, r1.output(code) == curr.get(self.target[i]));
            }),
        }
        mem::swap(&mut state.prev, &mut state.curr);
        mem::swap(&mut state.prev, &mut state.spare);
        Ok(())
    }

    pub fn step(&self, state: &mut CaState, direction: Direction) -> Result<()> {
        match direction {
            Direction::Forward => self.step_forward(state),
            Direction::Backward => self.step_backward(state),
        }
    }

    /// Applies `steps` single steps in `direction`; zero steps is a no-op.
    pub fn iterate(&self, state: &mut CaState, steps: usize, direction: Direction) -> Result<()> {
        self.check(state)?;
        for _ in 0..steps {
            self.step(state, direction)?;
        }
        Ok(())
    }

    /// Like [`Automaton::iterate`], also returning the newest configuration
    /// after each step (`q[t+1], q[t+2], ...` going forward, or
    /// `q[t-2], q[t-3], ...` going backward, i.e. each new `prev`).
    pub fn trajectory(&self, state: &mut CaState, steps: usize, direction: Direction) -> Result<Vec<Bits>> {
        self.check(state)?;
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            self.step(state, direction)?;
            out.push(match direction {
                Direction::Forward => state.curr.clone(),
                Direction::Backward => state.prev.clone(),
            });
        }
        Ok(out)
    }
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.size == other.size && self.mode == other.mode
    }
}

impl Eq for Automaton {}

/// One forward step as a pure function.
pub fn step_forward(state: &CaState, rules: &RulePair, mode: NeighborhoodMode) -> Result<CaState> {
    let automaton = Automaton::new(rules.clone(), state.size(), mode)?;
    let mut next = state.clone();
    automaton.step_forward(&mut next)?;
    Ok(next)
}

/// One backward step as a pure function.
pub fn step_backward(state: &CaState, rules: &RulePair, mode: NeighborhoodMode) -> Result<CaState> {
    let automaton = Automaton::new(rules.clone(), state.size(), mode)?;
    let mut next = state.clone();
    automaton.step_backward(&mut next)?;
    Ok(next)
}

/// `steps` steps in `direction` as a pure function.
pub fn iterate(
    state: &CaState,
    rules: &RulePair,
    mode: NeighborhoodMode,
    steps: usize,
    direction: Direction,
) -> Result<CaState> {
    let automaton = Automaton::new(rules.clone(), state.size(), mode)?;
    let mut next = state.clone();
    automaton.iterate(&mut next, steps, direction)?;
    Ok(next)
}
