//! Six of the NIST SP 800-22 randomness tests and a battery runner that
//! applies them across many sequences.

pub mod battery;
pub mod rank;
pub mod special;

use std::fmt;

pub use battery::{proportion_threshold, run_battery, BatteryParams, BatteryReport, TestSummary};
pub use tests::{
    block_frequency_test, dft_test, frequency_test, matrix_rank_test, runs_test, universal_test,
};

/// A bit sequence under test.
pub type BitStream = crate::Bits;

/// Per-sequence significance level.
pub const ALPHA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestKind {
    Frequency,
    BlockFrequency,
    Runs,
    MatrixRank,
    Spectral,
    Universal,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::Frequency,
        TestKind::BlockFrequency,
        TestKind::Runs,
        TestKind::MatrixRank,
        TestKind::Spectral,
        TestKind::Universal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Frequency => "Frequency",
            TestKind::BlockFrequency => "BlockFrequency",
            TestKind::Runs => "Runs",
            TestKind::MatrixRank => "Rank",
            TestKind::Spectral => "FFT",
            TestKind::Universal => "Universal",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub test: TestKind,
    pub p_value: f64,
    pub pass: bool,
    /// Set when the runs test's frequency prerequisite failed; `p_value`
    /// is then 0.
    pub prerequisite_failed: bool,
}

impl TestOutcome {
    pub fn new(test: TestKind, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            test,
            p_value,
            pass: p_value >= ALPHA,
            prerequisite_failed: false,
        }
    }

    pub fn prerequisite_failed(test: TestKind) -> Self {
        Self {
            test,
            p_value: 0.0,
            pass: false,
            prerequisite_failed: true,
        }
    }
}
