//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `cargo test --test acceptance -- 5 8` runs only criteria 5 and 8.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rayon::prelude::*;

use rca_cipher::analysis::{anf, is_balanced, nonlinearity, to_boolean_function, walsh_spectrum, BooleanFunction};
use rca_cipher::cipher::{self, decrypt_block, decrypt_block_forward, encrypt_block, keygen};
use rca_cipher::engine;
use rca_cipher::nist::battery::BatteryParams;
use rca_cipher::nist::special::{erfc, igamc};
use rca_cipher::nist::{run_battery, TestKind, ALPHA};
use rca_cipher::rule::complement_rule;
use rca_cipher::sac::{self, RuleChoice, SacConfig};
use rca_cipher::{Bits, CaState, CipherKey, NeighborhoodMode, RulePair, RuleTable};

/// Criterion `k` draws all of its randomness from seed `SEED_BASE + k`.
const SEED_BASE: u64 = 1000;

const SAC_EPSILON: f64 = 0.02;
const SAC_WINDOW: usize = 5;
const SAC_TRIALS: usize = 10_000;
/// Per-curve trials for the 250 curves of the radius sweep.
const SWEEP_TRIALS: usize = 2000;

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            notes: Vec::new(),
        }
    }
}

fn rng_for(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED_BASE + criterion)
}

fn modes() -> [NeighborhoodMode; 2] {
    [NeighborhoodMode::Standard, NeighborhoodMode::Spread]
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn balanced_pair(radius: usize, rng: &mut ChaCha8Rng) -> RulePair {
    RulePair::from_rule(RuleTable::random_balanced(radius, rng).unwrap())
}

fn sac_config(size: usize, radius: usize, mode: NeighborhoodMode, rules: RulePair, trials: usize, seed: u64) -> SacConfig {
    let mut c = SacConfig::new(size, radius, mode, RuleChoice::Fixed(rules), seed);
    c.trials = trials;
    c
}

fn fmt_iters(t: Option<usize>) -> String {
    t.map_or("none".into(), |t| t.to_string())
}

fn c1_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut configs = Vec::new();
    for size in [32, 64] {
        for radius in 1..=6 {
            for iterations in [3, 16, 65] {
                for mode in modes() {
                    configs.push((size, radius, iterations, mode));
                }
            }
        }
    }
    let failures: usize = configs
        .par_iter()
        .enumerate()
        .map(|(k, &(size, radius, iterations, mode))| {
            let mut rng = rng_for(1);
            rng.set_stream(k as u64);
            (0..1000)
                .filter(|_| {
                    let key = keygen(radius, size, iterations, mode, &mut rng).unwrap();
                    let blocks: Vec<Bits> = (0..rng.gen_range(1..=8)).map(|_| Bits::random(size, &mut rng)).collect();
                    let bundle = cipher::encrypt_message_random(&blocks, &key, &mut rng).unwrap();
                    cipher::decrypt_message(&bundle, &key).unwrap() != blocks
                })
                .count()
        })
        .sum();
    let elapsed = start.elapsed();
    Outcome::new(
        failures == 0 && within(elapsed, 60),
        format!(
            "{} configurations x 1000 cases, {failures} failures, {:.1}s (limit 60s)",
            configs.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_complement() -> Outcome {
    let mut rng = rng_for(2);
    let c236 = complement_rule(&RuleTable::from_number(1, 236).unwrap()).number();
    let mut bad = 0;
    for radius in 1..=6 {
        let d = 1usize << (2 * radius + 1);
        let full = (BigUint::one() << d) - BigUint::one();
        for _ in 0..10_000 {
            let r = RuleTable::random(radius, &mut rng).unwrap();
            let value = BigUint::parse_bytes(r.to_hex().as_bytes(), 16).unwrap();
            let comp = BigUint::parse_bytes(complement_rule(&r).to_hex().as_bytes(), 16).unwrap();
            if comp != &full - &value {
                bad += 1;
            }
        }
    }
    Outcome::new(
        c236 == Some(19) && bad == 0,
        format!("complement(236) = {c236:?}; R2 = 2^d - R1 - 1 violated {bad} times in 6 x 10^4 rules"),
    )
}

fn c3_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(3);
    let n = 6;
    let mut injective = 0;
    let pairs = 20;
    for _ in 0..pairs {
        let rules = RulePair::from_rule(RuleTable::random(1, &mut rng).unwrap());
        let ok = modes().iter().all(|&mode| {
            let mut images = HashSet::new();
            for code in 0u32..1 << (2 * n) {
                let prev = Bits::from_u128(n, (code & 0x3f) as u128);
                let curr = Bits::from_u128(n, (code >> 6) as u128);
                let next = engine::step_forward(&CaState::new(prev, curr).unwrap(), &rules, mode).unwrap();
                images.insert((next.prev().to_u128(), next.curr().to_u128()));
            }
            images.len() == 1 << (2 * n)
        });
        injective += ok as usize;
    }
    let elapsed = start.elapsed();
    Outcome::new(
        injective == pairs && within(elapsed, 10),
        format!(
            "{injective}/{pairs} pairs injective over all 4096 states (both neighborhoods), {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c4_dual_path() -> Outcome {
    let mut rng = rng_for(4);
    let mut agree = 0;
    let cases = 1000;
    for _ in 0..cases {
        let size = [32, 64][rng.gen_range(0..2)];
        let key = keygen(rng.gen_range(1..=6), size, rng.gen_range(3..=65), NeighborhoodMode::Standard, &mut rng).unwrap();
        let (p, q0) = (Bits::random(size, &mut rng), Bits::random(size, &mut rng));
        let (c, f) = encrypt_block(&p, &q0, &key).unwrap();
        let back = decrypt_block(&c, &f, &key).unwrap();
        let fwd = decrypt_block_forward(&c, &f, &key).unwrap();
        agree += (back == fwd && fwd == (p, q0)) as usize;
    }
    Outcome::new(agree == cases, format!("{agree}/{cases} cases bit-exact"))
}

fn c5_plateau() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(5);
    let rules = balanced_pair(3, &mut rng);
    let hex = rules.r1().to_hex();
    let curve = sac::sac_curve(&sac_config(64, 3, NeighborhoodMode::Standard, rules, SAC_TRIALS, SEED_BASE + 5)).unwrap();
    let elapsed = start.elapsed();
    let conv = curve.iterations_to_sac(SAC_EPSILON, SAC_WINDOW);
    let Some(t) = conv else {
        return Outcome::new(false, "curve never converged within 64 iterations");
    };
    let tail = &curve.mean_flip_fraction[t - 1..];
    let worst = tail.iter().map(|f| (f - 0.5).abs()).fold(0.0, f64::max);
    let mut o = Outcome::new(
        worst <= SAC_EPSILON && within(elapsed, 120),
        format!(
            "rule 0x{hex}: converged at t={t}, max |f - 0.5| over t={t}..64 is {worst:.4} (tol {SAC_EPSILON}), {:.1}s (limit 120s)",
            elapsed.as_secs_f64()
        ),
    );
    let head: Vec<String> = curve.mean_flip_fraction.iter().take(12).map(|f| format!("{f:.3}")).collect();
    o.notes.push(format!("first iterations: {}", head.join(" ")));
    o
}

/// Infinite when the curve never converges.
fn non_increasing(ts: &[Option<usize>]) -> bool {
    ts.windows(2).all(|w| w[1].unwrap_or(usize::MAX) <= w[0].unwrap_or(usize::MAX))
}

fn c6_radius_ordering() -> Outcome {
    let mut rng = rng_for(6);
    let reps = 50usize;
    let mut ordered = 0;
    let mut mean = [0.0f64; 5];
    let mut never = 0;
    for rep in 0..reps {
        let ts: Vec<Option<usize>> = (2..=6)
            .map(|r| {
                let rules = balanced_pair(r, &mut rng);
                let cfg = sac_config(32, r, NeighborhoodMode::Standard, rules, SWEEP_TRIALS, (SEED_BASE + 6) * 1000 + rep as u64);
                sac::sac_curve(&cfg).unwrap().iterations_to_sac(SAC_EPSILON, SAC_WINDOW)
            })
            .collect();
        for (m, t) in mean.iter_mut().zip(&ts) {
            match t {
                Some(t) => *m += *t as f64 / reps as f64,
                None => never += 1,
            }
        }
        ordered += non_increasing(&ts) as usize;
    }
    let mut o = Outcome::new(
        ordered * 100 >= 80 * reps,
        format!("non-increasing in {ordered}/{reps} repetitions (need 80%), {SWEEP_TRIALS} trials per curve"),
    );
    o.notes.push(format!(
        "mean iterations_to_sac r=2..6: {} ({never} non-converged curves excluded)",
        mean.iter().map(|m| format!("{m:.1}")).collect::<Vec<_>>().join(" ")
    ));
    o
}

fn c7_weak_rules() -> Outcome {
    let mut peak = Vec::new();
    for (k, hex) in ["0x1", "0x55555555"].into_iter().enumerate() {
        let rules = RulePair::from_rule(RuleTable::from_hex(2, hex).unwrap());
        let mut cfg = sac_config(32, 2, NeighborhoodMode::Standard, rules, SAC_TRIALS, SEED_BASE * 10 + 7 + k as u64);
        cfg.max_iterations = 200;
        let curve = sac::sac_curve(&cfg).unwrap();
        let in_band = curve.mean_flip_fraction.iter().any(|f| (f - 0.5).abs() <= SAC_EPSILON);
        let max = curve.mean_flip_fraction.iter().cloned().fold(0.0, f64::max);
        peak.push((hex, in_band, max));
    }
    let nl = nonlinearity(&to_boolean_function(&RuleTable::from_hex(2, "0x55555555").unwrap()));
    let balanced = is_balanced(&to_boolean_function(&RuleTable::from_hex(2, "0x1").unwrap()));
    let never = peak.iter().all(|&(_, in_band, _)| !in_band);
    Outcome::new(
        never && nl == 0 && !balanced,
        format!(
            "{}; nonlinearity(0x55555555) = {nl}; is_balanced(0x1) = {balanced}",
            peak.iter()
                .map(|(h, b, m)| format!("{h}: {} (max flip fraction {m:.3})", if *b { "entered band" } else { "never in band" }))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn c8_spread_speedup() -> Outcome {
    let mut rng = rng_for(8);
    let mut all = true;
    let mut parts = Vec::new();
    for (size, radius) in [(32, 2), (64, 3)] {
        let rules = balanced_pair(radius, &mut rng);
        let hex = rules.r1().to_hex();
        let cfg = sac_config(size, radius, NeighborhoodMode::Standard, rules, SAC_TRIALS, SEED_BASE + 8);
        let cmp = sac::compare_modes(&cfg, SAC_EPSILON, SAC_WINDOW).unwrap();
        let ratio = cmp.ratio();
        let ok = ratio.is_some_and(|r| (0.35..=0.75).contains(&r));
        all &= ok;
        parts.push(format!(
            "N={size} r={radius} rule 0x{hex}: spread {} / standard {} = {} {}",
            fmt_iters(cmp.candidate_iterations),
            fmt_iters(cmp.baseline_iterations),
            ratio.map_or("n/a".into(), |r| format!("{r:.3}")),
            if ok { "in [0.35, 0.75]" } else { "outside [0.35, 0.75]" }
        ));
    }
    let mut o = Outcome::new(all, parts.join("; "));
    // Context only: the same comparison over the radius grid.
    for size in [32, 64] {
        let row: Vec<String> = (2..=6)
            .map(|r| {
                let cfg = sac_config(size, r, NeighborhoodMode::Standard, balanced_pair(r, &mut rng), 2000, SEED_BASE + 80 + r as u64);
                let cmp = sac::compare_modes(&cfg, SAC_EPSILON, SAC_WINDOW).unwrap();
                format!(
                    "r={r} {}/{}",
                    fmt_iters(cmp.candidate_iterations),
                    fmt_iters(cmp.baseline_iterations)
                )
            })
            .collect();
        o.notes.push(format!("N={size} spread/standard, 2000 trials: {}", row.join(", ")));
    }
    o
}

const EXPECTED_GRID: [(TestKind, [bool; 5]); 6] = [
    (TestKind::Frequency, [false, true, true, true, true]),
    (TestKind::BlockFrequency, [false, true, true, true, true]),
    (TestKind::Runs, [true, true, true, true, true]),
    (TestKind::MatrixRank, [false, true, true, true, true]),
    (TestKind::Spectral, [false, true, true, true, true]),
    (TestKind::Universal, [false, true, true, true, true]),
];

fn c9_nist_grid() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_for(9);
    let mut grid: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut rules = Vec::new();
    for radius in 2..=6 {
        let rule = RuleTable::random_balanced(radius, &mut rng).unwrap();
        rules.push(format!("r={radius}: 0x{}", abbreviate(&rule.to_hex())));
        let key = CipherKey::new(RulePair::from_rule(rule), 32, 16, NeighborhoodMode::Standard).unwrap();
        let streams = cipher::keystream_sequences(&key, 100, 1_000_000, SEED_BASE + 9).unwrap();
        let report = run_battery(&streams, &BatteryParams::default()).unwrap();
        grid.push(
            TestKind::ALL
                .iter()
                .map(|&k| {
                    let s = report.summary(k).unwrap();
                    (s.passed, s.pass)
                })
                .collect(),
        );
    }
    let elapsed = start.elapsed();
    let freq_fails_r2 = !grid[0][0].1;
    let rest_pass = grid[1..].iter().all(|row| row.iter().all(|&(_, p)| p));
    let mut o = Outcome::new(
        freq_fails_r2 && rest_pass && within(elapsed, 600),
        format!(
            "Frequency at r=2 {}; all six at r=3..6 {}; {:.0}s (limit 600s)",
            if freq_fails_r2 { "fails" } else { "passes" },
            if rest_pass { "pass" } else { "do not all pass" },
            elapsed.as_secs_f64()
        ),
    );
    o.notes.push("N=32, standard neighborhood, balanced rules, 100 x 10^6 bits; passed/100 (threshold 96.015)".into());
    for (j, &(kind, expected)) in EXPECTED_GRID.iter().enumerate() {
        let cells: Vec<String> = (0..5)
            .map(|r| {
                let (n, p) = grid[r][j];
                let mark = if p { '+' } else { '-' };
                let diff = if p != expected[r] { "*" } else { " " };
                format!("{n:>3}{mark}{diff}")
            })
            .collect();
        o.notes.push(format!("{:<15}{}", kind.name(), cells.join(" ")));
    }
    o.notes.push("* differs from the expected grid".into());
    if grid[0][2].1 != EXPECTED_GRID[2].1[0] {
        o.notes.push(format!(
            "Runs at r=2: {} here, + in the expected grid",
            if grid[0][2].1 { '+' } else { '-' }
        ));
    }
    o.notes.push(format!("rules: {}", rules.join(", ")));
    o
}

fn abbreviate(hex: &str) -> String {
    if hex.len() > 16 {
        format!("{}..{}", &hex[..8], &hex[hex.len() - 8..])
    } else {
        hex.to_string()
    }
}

fn c10_calibration() -> Outcome {
    let sequences = 1000;
    let streams_per_chunk = 100;
    let mut rejected = [0usize; 6];
    for chunk in 0..sequences / streams_per_chunk {
        let streams: Vec<Bits> = (0..streams_per_chunk)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha20Rng::seed_from_u64(SEED_BASE + 10);
                rng.set_stream((chunk * streams_per_chunk + i) as u64);
                let mut bytes = vec![0u8; 125_000];
                rng.fill_bytes(&mut bytes);
                Bits::from_bytes_msb(&bytes)
            })
            .collect();
        let report = run_battery(&streams, &BatteryParams::default()).unwrap();
        for (r, s) in rejected.iter_mut().zip(&report.summaries) {
            *r += s.outcomes.iter().filter(|o| o.p_value < ALPHA).count();
        }
    }
    let rates: Vec<f64> = rejected.iter().map(|&r| r as f64 / sequences as f64).collect();
    let rates_ok = rates.iter().all(|r| (r - ALPHA).abs() <= 0.02);

    let mut worst: f64 = 0.0;
    for i in -300..=600 {
        let x = i as f64 / 100.0;
        worst = worst.max(common::rel_err(erfc(x), common::erfc_oracle(x)));
    }
    for m in 1..=60u32 {
        for i in 1..=400 {
            let x = i as f64 * 0.25;
            for (a, q) in [(m as f64, common::igamc_integer(m, x)), (m as f64 + 0.5, common::igamc_half(m, x))] {
                if q > 1e-280 {
                    worst = worst.max(common::rel_err(igamc(a, x), q));
                }
            }
        }
    }
    Outcome::new(
        rates_ok && worst < 1e-8,
        format!(
            "rejection rates over {sequences} ChaCha20 sequences: {} (target 1% +/- 2pp); special functions max rel err {worst:.1e} (tol 1e-8)",
            TestKind::ALL
                .iter()
                .zip(&rates)
                .map(|(k, r)| format!("{} {:.1}%", k.name(), 100.0 * r))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn c11_rule_formulas() -> Outcome {
    let vars = |x: usize| [x >> 4 & 1 == 1, x >> 3 & 1 == 1, x >> 2 & 1 == 1, x >> 1 & 1 == 1, x & 1 == 1];
    type Formula = fn([bool; 5]) -> bool;
    let formulas: [(&str, Formula); 3] = [
        ("0x1", |[a, b, c, d, e]| !a && !b && !c && !d && !e),
        ("0x55555555", |[_, _, _, _, e]| !e),
        ("0x2B722D4", |[a, b, c, d, e]| {
            (a && !b && !c && !d)
                ^ (b && !c && !d && e)
                ^ (!b && c && d && e)
                ^ (!b && c && !d && !e)
                ^ (!b && !c && d && !e)
                ^ (a && !b && c && !d && e)
                ^ (!a && b && c && !d && e)
                ^ (!a && !b && c && d && !e)
        }),
    ];
    let formulas_ok = formulas.iter().all(|(hex, f)| {
        let g = to_boolean_function(&RuleTable::from_hex(2, hex).unwrap());
        (0..32).all(|x| g.eval(x) == f(vars(x)))
    });
    let mut rng = rng_for(11);
    let mut anf_ok = 0;
    let mut parseval_ok = 0;
    for _ in 0..10_000 {
        let f = BooleanFunction::random(5, &mut rng).unwrap();
        anf_ok += (anf(&f).to_function() == f) as usize;
        let n = rng.gen_range(1..=10);
        let g = BooleanFunction::random(n, &mut rng).unwrap();
        parseval_ok += (walsh_spectrum(&g).sum_of_squares() == 1i128 << (2 * n)) as usize;
    }
    Outcome::new(
        formulas_ok && anf_ok == 10_000 && parseval_ok == 10_000,
        format!(
            "formulas {}; ANF round trip {anf_ok}/10000; Parseval {parseval_ok}/10000",
            if formulas_ok { "match on all 32 inputs" } else { "mismatch" }
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    (1, "roundtrip correctness", c1_roundtrip),
    (2, "complement-pair arithmetic", c2_complement),
    (3, "exhaustive reversibility", c3_exhaustive),
    (4, "dual-path decryption", c4_dual_path),
    (5, "SAC plateau", c5_plateau),
    (6, "radius ordering", c6_radius_ordering),
    (7, "weak-rule failure", c7_weak_rules),
    (8, "spread-neighborhood speedup", c8_spread_speedup),
    (9, "NIST radius grid", c9_nist_grid),
    (10, "statistical-test calibration", c10_calibration),
    (11, "rule formula equivalences", c11_rule_formulas),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {id:>2} {:<30} {}  {} [{:.1}s]",
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        for note in &o.notes {
            println!("              {note}");
        }
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
