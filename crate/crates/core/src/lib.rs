//! A block cipher built on a second-order reversible cellular automaton,
//! together with the tooling used to evaluate it: a strict-avalanche
//! harness, six NIST SP 800-22 randomness tests and a boolean-function view
//! of the rule tables.
//!
//! The automaton is a one-dimensional binary ring. Each cell's next state is
//! a radius-`r` rule applied to its current neighborhood, XNOR-ed with the
//! cell's state one step earlier. Because of that XNOR, the same rule walks the
//! automaton backwards, which is what makes decryption possible.
//!
//! ```
//! use rand::SeedableRng;
//! use rca_cipher::{cipher, Bits, NeighborhoodMode};
//!
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
//! let key = cipher::keygen(2, 32, 16, NeighborhoodMode::Standard, &mut rng).unwrap();
//! let plain = Bits::random(32, &mut rng);
//! let seed = Bits::random(32, &mut rng);
//! let (ct, fin) = cipher::encrypt_block(&plain, &seed, &key).unwrap();
//! assert_eq!(cipher::decrypt_block(&ct, &fin, &key).unwrap(), (plain, seed));
//! ```

pub mod analysis;
pub mod bits;
pub mod cipher;
pub mod cli;
pub mod engine;
pub mod keyfile;
pub mod nist;
pub mod rule;
pub mod sac;

pub use bits::Bits;
pub use cipher::{Block, CipherKey, CiphertextBundle};
pub use engine::{Automaton, CaState, Direction, NeighborhoodMode};
pub use rule::{RulePair, RuleTable};

/// Largest supported neighborhood radius (a 2^17-bit rule table).
pub const MAX_RADIUS: usize = 8;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("radius must be between 1 and {MAX_RADIUS}, got {0}")]
    InvalidRadius(usize),
    #[error("rule table for radius {radius} needs {expected} bits, got {actual}")]
    TableLength {
        radius: usize,
        expected: usize,
        actual: usize,
    },
    #[error("rule pair radii differ ({0} vs {1})")]
    RadiusMismatch(usize, usize),
    #[error("rule pair is not complementary; backward stepping is undefined")]
    NotComplementary,
    #[error("invalid rule hex: {0}")]
    InvalidHex(String),
    #[error("automaton size {size} is smaller than the neighborhood width {width}")]
    SizeTooSmall { size: usize, width: usize },
    #[error("spread neighborhood needs gcd(5, size) = 1, got size {0}")]
    InvalidSpreadSize(usize),
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("iteration count must be at least 3, got {0}")]
    TooFewIterations(usize),
    #[error("message has no blocks")]
    EmptyMessage,
    #[error("{test}: sequence of {actual} bits is shorter than the required {required}")]
    StreamTooShort {
        test: &'static str,
        required: usize,
        actual: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
