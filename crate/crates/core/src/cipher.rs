//! Block cipher on top of the reversible automaton.
//!
//! A block of plaintext is loaded as `q[1]` next to a seed configuration
//! `q[0]`. Iterating forward `n - 1` times yields `(q[n-1], q[n])`; `q[n-1]`
//! is the ciphertext and `q[n]` the final data needed to decrypt. Multi-block
//! messages chain: each block's seed is the previous block's final data, and
//! only the last block's final data travels with the message.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{Automaton, CaState, Direction, NeighborhoodMode};
use crate::rule::{RulePair, RuleTable};
use crate::{Bits, Error, Result};

/// One block of `block_size` bits.
pub type Block = Bits;

/// Smallest usable iteration count. With `n = 2` the ciphertext `q[1]` is the
/// plaintext itself.
pub const MIN_ITERATIONS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherKey {
    automaton: Automaton,
    iterations: usize,
}

impl CipherKey {
    pub fn new(rules: RulePair, block_size: usize, iterations: usize, mode: NeighborhoodMode) -> Result<Self> {
        if iterations < MIN_ITERATIONS {
            return Err(Error::TooFewIterations(iterations));
        }
        if !rules.is_complementary() {
            return Err(Error::NotComplementary);
        }
        let automaton = Automaton::new(rules, block_size, mode)?;
        Ok(Self { automaton, iterations })
    }

    pub fn rules(&self) -> &RulePair {
        self.automaton.rules()
    }

    pub fn radius(&self) -> usize {
        self.automaton.radius()
    }

    pub fn block_size(&self) -> usize {
        self.automaton.size()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn mode(&self) -> NeighborhoodMode {
        self.automaton.mode()
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    fn check_block(&self, block: &Block) -> Result<()> {
        if block.len() != self.block_size() {
            return Err(Error::LengthMismatch {
                expected: self.block_size(),
                actual: block.len(),
            });
        }
        Ok(())
    }
}

/// Ciphertext blocks plus the final data of the last block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiphertextBundle {
    pub blocks: Vec<Block>,
    pub final_data: Block,
}

/// Draws a uniformly random rule and pairs it with its complement.
pub fn keygen<R: Rng + ?Sized>(
    radius: usize,
    block_size: usize,
    iterations: usize,
    mode: NeighborhoodMode,
    rng: &mut R,
) -> Result<CipherKey> {
    let rules = RulePair::from_rule(RuleTable::random(radius, rng)?);
    CipherKey::new(rules, block_size, iterations, mode)
}

/// Returns `(ciphertext, final_data)`.
pub fn encrypt_block(plain: &Block, seed: &Block, key: &CipherKey) -> Result<(Block, Block)> {
    key.check_block(plain)?;
    key.check_block(seed)?;
    let mut state = CaState::new(seed.clone(), plain.clone())?;
    key.automaton.iterate(&mut state, key.iterations - 1, Direction::Forward)?;
    Ok(state.into_parts())
}

/// Returns `(plaintext, seed)` by stepping backwards from
/// `(ciphertext, final_data)`.
pub fn decrypt_block(cipher: &Block, final_data: &Block, key: &CipherKey) -> Result<(Block, Block)> {
    key.check_block(cipher)?;
    key.check_block(final_data)?;
    let mut state = CaState::new(cipher.clone(), final_data.clone())?;
    key.automaton.iterate(&mut state, key.iterations - 1, Direction::Backward)?;
    let (seed, plain) = state.into_parts();
    Ok((plain, seed))
}

/// Decrypts by loading `final_data` as `q[0]` and the ciphertext as `q[1]`
/// and iterating forward `n - 1` times. Only valid for the standard
/// neighborhood, where the dynamics are time-symmetric.
pub fn decrypt_block_forward(cipher: &Block, final_data: &Block, key: &CipherKey) -> Result<(Block, Block)> {
    if key.mode() != NeighborhoodMode::Standard {
        return Err(Error::InvalidParameter(
            "forward-iteration decryption needs the standard neighborhood".into(),
        ));
    }
    key.check_block(cipher)?;
    key.check_block(final_data)?;
    let mut state = CaState::new(final_data.clone(), cipher.clone())?;
    key.automaton.iterate(&mut state, key.iterations - 1, Direction::Forward)?;
    Ok(state.into_parts())
}

/// Encrypts a chained sequence of blocks, the first seeded with `seed`.
pub fn encrypt_message(plain_blocks: &[Block], key: &CipherKey, seed: &Block) -> Result<CiphertextBundle> {
    if plain_blocks.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut q0 = seed.clone();
    let mut blocks = Vec::with_capacity(plain_blocks.len());
    for plain in plain_blocks {
        let (cipher, final_data) = encrypt_block(plain, &q0, key)?;
        blocks.push(cipher);
        q0 = final_data;
    }
    Ok(CiphertextBundle { blocks, final_data: q0 })
}

/// [`encrypt_message`] with a fresh random seed.
pub fn encrypt_message_random<R: Rng + ?Sized>(
    plain_blocks: &[Block],
    key: &CipherKey,
    rng: &mut R,
) -> Result<CiphertextBundle> {
    let seed = Bits::random(key.block_size(), rng);
    encrypt_message(plain_blocks, key, &seed)
}

/// Decrypts last block first; each recovered seed is the final data of the
/// block before it.
pub fn decrypt_message(bundle: &CiphertextBundle, key: &CipherKey) -> Result<Vec<Block>> {
    decrypt_message_with_seed(bundle, key).map(|(plain, _)| plain)
}

/// Like [`decrypt_message`], also returning the first block's seed.
pub fn decrypt_message_with_seed(bundle: &CiphertextBundle, key: &CipherKey) -> Result<(Vec<Block>, Block)> {
    if bundle.blocks.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut final_data = bundle.final_data.clone();
    let mut plain = Vec::with_capacity(bundle.blocks.len());
    for cipher in bundle.blocks.iter().rev() {
        let (p, seed) = decrypt_block(cipher, &final_data, key)?;
        plain.push(p);
        final_data = seed;
    }
    plain.reverse();
    Ok((plain, final_data))
}

/// Concatenates `q[2], q[3], ...` from `seed_state = (q[0], q[1])` until
/// `nbits` bits have been produced.
pub fn keystream(key: &CipherKey, seed_state: &CaState, nbits: usize) -> Result<Bits> {
    let n = key.block_size();
    if seed_state.size() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: seed_state.size(),
        });
    }
    let mut state = seed_state.clone();
    let mut out = Bits::zeros(0);
    out.reserve(nbits);
    while out.len() < nbits {
        key.automaton.step_forward(&mut state)?;
        out.extend_from(state.curr());
    }
    out.truncate(nbits);
    Ok(out)
}

/// `count` keystreams of `nbits` bits, each from its own random
/// `(q[0], q[1])`. Sequence `i` draws from ChaCha8 stream `i` of `seed`, so
/// the output does not depend on thread scheduling.
pub fn keystream_sequences(key: &CipherKey, count: usize, nbits: usize, seed: u64) -> Result<Vec<Bits>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let n = key.block_size();
            let state = CaState::new(Bits::random(n, &mut rng), Bits::random(n, &mut rng))?;
            keystream(key, &state, nbits)
        })
        .collect()
}

/// Splits a bit string into blocks. The length must be a multiple of the
/// block size.
pub fn split_blocks(bits: &Bits, block_size: usize) -> Result<Vec<Block>> {
    if block_size == 0 || !bits.len().is_multiple_of(block_size) {
        return Err(Error::LengthMismatch {
            expected: bits.len().next_multiple_of(block_size.max(1)),
            actual: bits.len(),
        });
    }
    Ok((0..bits.len() / block_size)
        .map(|k| bits.slice(k * block_size, block_size))
        .collect())
}

pub fn join_blocks(blocks: &[Block]) -> Bits {
    let mut out = Bits::zeros(0);
    for b in blocks {
        out.extend_from(b);
    }
    out
}
