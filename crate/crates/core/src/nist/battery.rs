//! Runs the tests over many sequences and applies the pass-proportion
//! criterion.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::special::igamc;
use super::tests::{self as t, universal_parameters_for};
use super::{TestKind, TestOutcome, ALPHA};
use crate::{Bits, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryParams {
    pub tests: Vec<TestKind>,
    /// Block length of the frequency-within-a-block test.
    pub block_len: usize,
    /// `(L, Q)` for the universal test; `None` picks the largest
    /// recommended `L` for the sequence length.
    pub universal: Option<(usize, usize)>,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            tests: TestKind::ALL.to_vec(),
            block_len: 128,
            universal: Some((7, 1280)),
        }
    }
}

/// Runs one test on one sequence.
pub fn run_test(kind: TestKind, stream: &Bits, params: &BatteryParams) -> Result<TestOutcome> {
    match kind {
        TestKind::Frequency => t::frequency_test(stream),
        TestKind::BlockFrequency => t::block_frequency_test(stream, params.block_len),
        TestKind::Runs => t::runs_test(stream),
        TestKind::MatrixRank => t::matrix_rank_test(stream),
        TestKind::Spectral => t::dft_test(stream),
        TestKind::Universal => {
            let (l, q) = match params.universal {
                Some(lq) => lq,
                None => universal_parameters_for(stream.len()).ok_or(Error::StreamTooShort {
                    test: TestKind::Universal.name(),
                    required: t::universal_min_length(6),
                    actual: stream.len(),
                })?,
            };
            t::universal_test(stream, l, q)
        }
    }
}

/// Minimum pass proportion for `sequences` sequences at level `alpha`:
/// `p - 3 sqrt(p (1 - p) / m)` with `p = 1 - alpha`.
pub fn proportion_threshold(sequences: usize, alpha: f64) -> f64 {
    let p = 1.0 - alpha;
    p - 3.0 * (p * (1.0 - p) / sequences as f64).sqrt()
}

/// Chi-square uniformity of p-values over ten equal bins.
pub fn uniformity_p_value(p_values: &[f64]) -> f64 {
    let mut bins = [0usize; 10];
    for &p in p_values {
        bins[((p * 10.0) as usize).min(9)] += 1;
    }
    let expected = p_values.len() as f64 / 10.0;
    let chi2: f64 = bins.iter().map(|&f| (f as f64 - expected).powi(2) / expected).sum();
    igamc(4.5, chi2 / 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestSummary {
    pub test: TestKind,
    /// One outcome per sequence, in input order.
    pub outcomes: Vec<TestOutcome>,
    pub passed: usize,
    pub proportion: f64,
    pub threshold: f64,
    pub uniformity_p: f64,
    pub prerequisite_failures: usize,
    /// Pass proportion at or above the threshold.
    pub pass: bool,
}

impl TestSummary {
    fn from_outcomes(test: TestKind, outcomes: Vec<TestOutcome>) -> Self {
        let m = outcomes.len();
        let passed = outcomes.iter().filter(|o| o.pass).count();
        let proportion = passed as f64 / m as f64;
        let threshold = proportion_threshold(m, ALPHA);
        let p_values: Vec<f64> = outcomes.iter().map(|o| o.p_value).collect();
        Self {
            test,
            passed,
            proportion,
            threshold,
            uniformity_p: uniformity_p_value(&p_values),
            prerequisite_failures: outcomes.iter().filter(|o| o.prerequisite_failed).count(),
            pass: proportion >= threshold,
            outcomes,
        }
    }

    pub fn median_p(&self) -> f64 {
        let mut p: Vec<f64> = self.outcomes.iter().map(|o| o.p_value).collect();
        p.sort_by(f64::total_cmp);
        p[p.len() / 2]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryReport {
    pub sequences: usize,
    pub summaries: Vec<TestSummary>,
}

impl BatteryReport {
    pub fn summary(&self, test: TestKind) -> Option<&TestSummary> {
        self.summaries.iter().find(|s| s.test == test)
    }

    /// Verdict of `test`, if it was run.
    pub fn passes(&self, test: TestKind) -> Option<bool> {
        self.summary(test).map(|s| s.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("test,sequences,passed,proportion,threshold,median_p,uniformity_p,prerequisite_failures,verdict\n");
        for t in &self.summaries {
            let _ = writeln!(
                s,
                "{},{},{},{:.4},{:.4},{:.6},{:.6},{},{}",
                t.test,
                self.sequences,
                t.passed,
                t.proportion,
                t.threshold,
                t.median_p(),
                t.uniformity_p,
                t.prerequisite_failures,
                if t.pass { "pass" } else { "fail" }
            );
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<15} {:>9} {:>10} {:>10} {:>13} {:>8}\n",
            "test", "passed", "threshold", "median p", "uniformity p", "verdict"
        );
        for t in &self.summaries {
            let _ = writeln!(
                s,
                "{:<15} {:>9} {:>10.4} {:>10.6} {:>13.6} {:>8}",
                t.test.name(),
                format!("{}/{}", t.passed, self.sequences),
                t.threshold,
                t.median_p(),
                t.uniformity_p,
                if t.pass { "+" } else { "-" }
            );
        }
        s
    }
}

/// Applies every selected test to every stream. Sequences are processed in
/// parallel; outcomes keep input order.
pub fn run_battery(streams: &[Bits], params: &BatteryParams) -> Result<BatteryReport> {
    if streams.is_empty() {
        return Err(Error::InvalidParameter("battery needs at least one sequence".into()));
    }
    let per_stream: Vec<Vec<TestOutcome>> = streams
        .par_iter()
        .map(|s| params.tests.iter().map(|&k| run_test(k, s, params)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let summaries = params
        .tests
        .iter()
        .enumerate()
        .map(|(j, &kind)| TestSummary::from_outcomes(kind, per_stream.iter().map(|o| o[j].clone()).collect()))
        .collect();
    Ok(BatteryReport {
        sequences: streams.len(),
        summaries,
    })
}
