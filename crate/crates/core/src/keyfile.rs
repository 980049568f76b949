//! Text key files and the binary message layout.
//!
//! A key file holds one `key=value` pair per line:
//!
//! ```text
//! radius=2
//! block_size=32
//! iterations=16
//! mode=standard
//! rule=2b722d4
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. `rule` is the hex of
//! the first rule; its complement is derived.
//!
//! Messages are raw bytes read most significant bit first. A ciphertext file
//! is the ciphertext blocks followed by the final-data block.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cipher::{split_blocks, CipherKey, CiphertextBundle};
use crate::engine::NeighborhoodMode;
use crate::rule::{RulePair, RuleTable};
use crate::{Bits, Error, Result};

pub fn format_key(key: &CipherKey) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "radius={}", key.radius());
    let _ = writeln!(s, "block_size={}", key.block_size());
    let _ = writeln!(s, "iterations={}", key.iterations());
    let _ = writeln!(s, "mode={}", key.mode());
    let _ = writeln!(s, "rule={}", key.rules().r1().to_hex());
    s
}

pub fn parse_key(text: &str) -> Result<CipherKey> {
    let mut fields = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("key file line {}: expected key=value", lineno + 1)))?;
        let k = k.trim();
        if !matches!(k, "radius" | "block_size" | "iterations" | "mode" | "rule") {
            return Err(Error::Parse(format!("key file line {}: unknown field {k:?}", lineno + 1)));
        }
        if fields.insert(k, v.trim()).is_some() {
            return Err(Error::Parse(format!("key file: duplicate field {k:?}")));
        }
    }
    let get = |name: &str| {
        fields
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("key file: missing field {name:?}")))
    };
    let int = |name: &str| -> Result<usize> {
        get(name)?
            .parse()
            .map_err(|_| Error::Parse(format!("key file: {name} is not a non-negative integer")))
    };
    let radius = int("radius")?;
    let block_size = int("block_size")?;
    let iterations = int("iterations")?;
    let mode: NeighborhoodMode = get("mode")?.parse()?;
    let rule = RuleTable::from_hex(radius, get("rule")?)?;
    CipherKey::new(RulePair::from_rule(rule), block_size, iterations, mode)
}

/// Appends `1` then zeros up to the next multiple of `block_size` bits.
pub fn pad(message: &Bits, block_size: usize) -> Bits {
    let mut out = message.clone();
    out.push(true);
    while !out.len().is_multiple_of(block_size) {
        out.push(false);
    }
    out
}

/// Strips the `10*` padding added by [`pad`].
pub fn unpad(padded: &Bits) -> Result<Bits> {
    let last_one = (0..padded.len())
        .rev()
        .find(|&i| padded.get(i))
        .ok_or_else(|| Error::Parse("padding marker not found".into()))?;
    Ok(padded.slice(0, last_one))
}

/// Serializes ciphertext blocks followed by the final data.
pub fn bundle_to_bits(bundle: &CiphertextBundle) -> Bits {
    let mut out = Bits::zeros(0);
    for b in &bundle.blocks {
        out.extend_from(b);
    }
    out.extend_from(&bundle.final_data);
    out
}

/// Inverse of [`bundle_to_bits`]. Needs at least two blocks.
pub fn bundle_from_bits(bits: &Bits, block_size: usize) -> Result<CiphertextBundle> {
    let mut blocks = split_blocks(bits, block_size)?;
    if blocks.len() < 2 {
        return Err(Error::Parse(
            "ciphertext must hold at least one block plus final data".into(),
        ));
    }
    let final_data = blocks.pop().expect("checked length");
    Ok(CiphertextBundle { blocks, final_data })
}

/// Reads a bitstream either as ASCII `0`/`1` text or as raw bytes.
pub fn bits_from_file_bytes(bytes: &[u8], ascii: bool) -> Result<Bits> {
    if ascii {
        let text = std::str::from_utf8(bytes).map_err(|_| Error::Parse("ASCII bitstream is not UTF-8".into()))?;
        text.parse()
    } else {
        Ok(Bits::from_bytes_msb(bytes))
    }
}
