//! C interface to `rca-cipher`.
//!
//! Keys are opaque `RcaKey` handles created by one of the `rca_key_*`
//! constructors and released with [`rca_key_free`]. Every fallible function
//! returns an [`RcaStatus`]. Functions that fill a caller buffer always
//! store the required length in `*out_len`; if `out` is null or too small
//! they return `RCA_STATUS_BUFFER_TOO_SMALL` and write nothing else.
//!
//! Byte buffers are read and written most significant bit first, so the
//! byte-level API needs a block size divisible by 8.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rca_cipher::{cipher, keyfile, Bits, CipherKey, Error, NeighborhoodMode, RulePair, RuleTable};

/// Opaque key handle.
pub struct RcaKey {
    inner: CipherKey,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    SizeMismatch = 3,
    InvalidSpreadSize = 4,
    Format = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

pub const RCA_MODE_STANDARD: u32 = 0;
pub const RCA_MODE_SPREAD: u32 = 1;

impl From<Error> for RcaStatus {
    fn from(e: Error) -> Self {
        match e {
            Error::LengthMismatch { .. } | Error::SizeTooSmall { .. } | Error::EmptyMessage | Error::StreamTooShort { .. } => {
                RcaStatus::SizeMismatch
            }
            Error::InvalidSpreadSize(_) => RcaStatus::InvalidSpreadSize,
            Error::Parse(_) | Error::InvalidHex(_) => RcaStatus::Format,
            _ => RcaStatus::InvalidParameter,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), RcaStatus>) -> RcaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcaStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => RcaStatus::Internal,
    }
}

fn mode_from(mode: u32) -> Result<NeighborhoodMode, RcaStatus> {
    match mode {
        RCA_MODE_STANDARD => Ok(NeighborhoodMode::Standard),
        RCA_MODE_SPREAD => Ok(NeighborhoodMode::Spread),
        _ => Err(RcaStatus::InvalidParameter),
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, RcaStatus> {
    if s.is_null() {
        return Err(RcaStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| RcaStatus::Format)
}

unsafe fn key_ref<'a>(key: *const RcaKey) -> Result<&'a CipherKey, RcaStatus> {
    key.as_ref().map(|k| &k.inner).ok_or(RcaStatus::NullPointer)
}

unsafe fn input<'a>(data: *const u8, len: usize) -> Result<&'a [u8], RcaStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(RcaStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn emit(bytes: &[u8], out: *mut u8, out_cap: usize, out_len: *mut usize) -> Result<(), RcaStatus> {
    if out_len.is_null() {
        return Err(RcaStatus::NullPointer);
    }
    *out_len = bytes.len();
    if out.is_null() || out_cap < bytes.len() {
        return Err(RcaStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), out, bytes.len());
    Ok(())
}

unsafe fn store(key: CipherKey, out: *mut *mut RcaKey) -> Result<(), RcaStatus> {
    *out = Box::into_raw(Box::new(RcaKey { inner: key }));
    Ok(())
}

fn byte_blocks(key: &CipherKey) -> Result<usize, RcaStatus> {
    if key.block_size().is_multiple_of(8) {
        Ok(key.block_size() / 8)
    } else {
        Err(RcaStatus::SizeMismatch)
    }
}

/// Builds a key from a hex rule table (`"0x"` prefix optional).
///
/// # Safety
/// `rule_hex` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rca_key_new(
    radius: usize,
    block_size: usize,
    iterations: usize,
    mode: u32,
    rule_hex: *const c_char,
    out: *mut *mut RcaKey,
) -> RcaStatus {
    guard(|| {
        if out.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        let rule = RuleTable::from_hex(radius, c_str(rule_hex)?)?;
        let key = CipherKey::new(RulePair::from_rule(rule), block_size, iterations, mode_from(mode)?)?;
        store(key, out)
    })
}

/// Draws a rule from `seed`; `balanced != 0` restricts the draw to tables
/// of half weight.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rca_key_generate(
    radius: usize,
    block_size: usize,
    iterations: usize,
    mode: u32,
    seed: u64,
    balanced: i32,
    out: *mut *mut RcaKey,
) -> RcaStatus {
    guard(|| {
        if out.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = if balanced != 0 {
            RuleTable::random_balanced(radius, &mut rng)?
        } else {
            RuleTable::random(radius, &mut rng)?
        };
        let key = CipherKey::new(RulePair::from_rule(rule), block_size, iterations, mode_from(mode)?)?;
        store(key, out)
    })
}

/// Parses key-file text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rca_key_parse(text: *const c_char, out: *mut *mut RcaKey) -> RcaStatus {
    guard(|| {
        if out.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        store(keyfile::parse_key(c_str(text)?)?, out)
    })
}

/// Key-file text, without a terminating NUL.
///
/// # Safety
/// `key` must come from an `rca_key_*` constructor; `out` must have room for
/// `out_cap` bytes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rca_key_format(key: *const RcaKey, out: *mut u8, out_cap: usize, out_len: *mut usize) -> RcaStatus {
    guard(|| emit(keyfile::format_key(key_ref(key)?).as_bytes(), out, out_cap, out_len))
}

/// # Safety
/// `key` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rca_key_free(key: *mut RcaKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// Block size in bits, or 0 for a null handle.
///
/// # Safety
/// `key` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rca_key_block_size(key: *const RcaKey) -> usize {
    key_ref(key).map_or(0, |k| k.block_size())
}

/// Encrypts `len` bytes, a whole number of blocks, chaining from a first
/// seed configuration drawn from `seed`. The output is the ciphertext
/// followed by one block of final data, `len + block_size / 8` bytes.
///
/// # Safety
/// Pointers must be valid for the given lengths; `key` must be live.
#[no_mangle]
pub unsafe extern "C" fn rca_encrypt(
    key: *const RcaKey,
    plain: *const u8,
    len: usize,
    seed: u64,
    out: *mut u8,
    out_cap: usize,
    out_len: *mut usize,
) -> RcaStatus {
    guard(|| {
        let key = key_ref(key)?;
        let block_bytes = byte_blocks(key)?;
        let data = input(plain, len)?;
        if data.is_empty() || data.len() % block_bytes != 0 {
            return Err(RcaStatus::SizeMismatch);
        }
        if out_len.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        let needed = data.len() + block_bytes;
        if out.is_null() || out_cap < needed {
            *out_len = needed;
            return Err(RcaStatus::BufferTooSmall);
        }
        let blocks = cipher::split_blocks(&Bits::from_bytes_msb(data), key.block_size())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bundle = cipher::encrypt_message_random(&blocks, key, &mut rng)?;
        emit(&keyfile::bundle_to_bits(&bundle).to_bytes_msb(), out, out_cap, out_len)
    })
}

/// Inverse of [`rca_encrypt`]; writes `len - block_size / 8` bytes.
///
/// # Safety
/// Pointers must be valid for the given lengths; `key` must be live.
#[no_mangle]
pub unsafe extern "C" fn rca_decrypt(
    key: *const RcaKey,
    data: *const u8,
    len: usize,
    out: *mut u8,
    out_cap: usize,
    out_len: *mut usize,
) -> RcaStatus {
    guard(|| {
        let key = key_ref(key)?;
        let block_bytes = byte_blocks(key)?;
        let data = input(data, len)?;
        if data.len() < 2 * block_bytes || data.len() % block_bytes != 0 {
            return Err(RcaStatus::SizeMismatch);
        }
        if out_len.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        let needed = data.len() - block_bytes;
        if out.is_null() || out_cap < needed {
            *out_len = needed;
            return Err(RcaStatus::BufferTooSmall);
        }
        let bundle = keyfile::bundle_from_bits(&Bits::from_bytes_msb(data), key.block_size())?;
        let plain = cipher::decrypt_message(&bundle, key)?;
        emit(&cipher::join_blocks(&plain).to_bytes_msb(), out, out_cap, out_len)
    })
}

/// Fills `len` bytes with keystream from a starting state drawn from
/// `seed`.
///
/// # Safety
/// `out` must be valid for `len` bytes; `key` must be live.
#[no_mangle]
pub unsafe extern "C" fn rca_keystream(key: *const RcaKey, seed: u64, out: *mut u8, len: usize) -> RcaStatus {
    guard(|| {
        let key = key_ref(key)?;
        if len == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(RcaStatus::NullPointer);
        }
        let stream = cipher::keystream_sequences(key, 1, len * 8, seed)?.pop().expect("one sequence");
        ptr::copy_nonoverlapping(stream.to_bytes_msb().as_ptr(), out, len);
        Ok(())
    })
}

/// Static NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn rca_status_message(status: RcaStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        RcaStatus::Ok => b"ok\0",
        RcaStatus::NullPointer => b"null pointer argument\0",
        RcaStatus::InvalidParameter => b"invalid parameter\0",
        RcaStatus::SizeMismatch => b"key/data size mismatch\0",
        RcaStatus::InvalidSpreadSize => b"spread neighborhood needs a block size not divisible by 5\0",
        RcaStatus::Format => b"malformed input\0",
        RcaStatus::BufferTooSmall => b"output buffer too small\0",
        RcaStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}
