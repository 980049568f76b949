use std::ffi::CString;
use std::ptr;

use rca_cipher_ffi::*;

struct Key(*mut RcaKey);

impl Drop for Key {
    fn drop(&mut self) {
        unsafe { rca_key_free(self.0) }
    }
}

fn generate(size: usize, mode: u32, seed: u64) -> Key {
    let mut k = ptr::null_mut();
    let s = unsafe { rca_key_generate(2, size, 16, mode, seed, 1, &mut k) };
    assert_eq!(s, RcaStatus::Ok);
    Key(k)
}

fn encrypt(key: &Key, plain: &[u8], seed: u64) -> Vec<u8> {
    let mut needed = 0;
    let s = unsafe { rca_encrypt(key.0, plain.as_ptr(), plain.len(), seed, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(s, RcaStatus::BufferTooSmall);
    let mut out = vec![0u8; needed];
    let mut written = 0;
    let s = unsafe { rca_encrypt(key.0, plain.as_ptr(), plain.len(), seed, out.as_mut_ptr(), out.len(), &mut written) };
    assert_eq!(s, RcaStatus::Ok);
    assert_eq!(written, needed);
    out
}

fn decrypt(key: &Key, data: &[u8]) -> Result<Vec<u8>, RcaStatus> {
    let mut out = vec![0u8; data.len()];
    let mut written = 0;
    match unsafe { rca_decrypt(key.0, data.as_ptr(), data.len(), out.as_mut_ptr(), out.len(), &mut written) } {
        RcaStatus::Ok => {
            out.truncate(written);
            Ok(out)
        }
        s => Err(s),
    }
}

#[test]
fn roundtrip_both_modes() {
    for (mode, size) in [(RCA_MODE_STANDARD, 32), (RCA_MODE_SPREAD, 64)] {
        let key = generate(size, mode, 3);
        let plain: Vec<u8> = (0..size / 8 * 5).map(|i| (i * 37 + 11) as u8).collect();
        let ct = encrypt(&key, &plain, 99);
        assert_eq!(ct.len(), plain.len() + size / 8);
        assert_ne!(&ct[..plain.len()], &plain[..]);
        assert_eq!(decrypt(&key, &ct).unwrap(), plain);
        assert_eq!(encrypt(&key, &plain, 99), ct);
    }
}

#[test]
fn hex_key_and_key_text_agree() {
    let hex = CString::new("0x2B722D4").unwrap();
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { rca_key_new(2, 32, 16, RCA_MODE_STANDARD, hex.as_ptr(), &mut k) }, RcaStatus::Ok);
    let key = Key(k);
    assert_eq!(unsafe { rca_key_block_size(key.0) }, 32);

    let mut buf = vec![0u8; 256];
    let mut len = 0;
    assert_eq!(unsafe { rca_key_format(key.0, buf.as_mut_ptr(), buf.len(), &mut len) }, RcaStatus::Ok);
    let text = String::from_utf8(buf[..len].to_vec()).unwrap();
    assert_eq!(text, "radius=2\nblock_size=32\niterations=16\nmode=standard\nrule=02b722d4\n");

    let c_text = CString::new(text).unwrap();
    let mut k2 = ptr::null_mut();
    assert_eq!(unsafe { rca_key_parse(c_text.as_ptr(), &mut k2) }, RcaStatus::Ok);
    let parsed = Key(k2);
    let plain = [7u8; 8];
    assert_eq!(decrypt(&parsed, &encrypt(&key, &plain, 1)).unwrap(), plain);
}

#[test]
fn error_codes() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { rca_key_generate(2, 35, 16, RCA_MODE_SPREAD, 0, 1, &mut k) }, RcaStatus::InvalidSpreadSize);
    assert!(k.is_null());
    assert_eq!(unsafe { rca_key_generate(2, 32, 2, RCA_MODE_STANDARD, 0, 1, &mut k) }, RcaStatus::InvalidParameter);
    assert_eq!(unsafe { rca_key_generate(2, 32, 16, 9, 0, 1, &mut k) }, RcaStatus::InvalidParameter);
    assert_eq!(unsafe { rca_key_generate(2, 32, 16, 0, 0, 1, ptr::null_mut()) }, RcaStatus::NullPointer);
    let bad = CString::new("0xzz").unwrap();
    assert_eq!(unsafe { rca_key_new(2, 32, 16, 0, bad.as_ptr(), &mut k) }, RcaStatus::Format);
    let garbage = CString::new("radius=2\n").unwrap();
    assert_eq!(unsafe { rca_key_parse(garbage.as_ptr(), &mut k) }, RcaStatus::Format);

    let key = generate(32, RCA_MODE_STANDARD, 1);
    let mut out = [0u8; 64];
    let mut len = 0;
    let ragged = [1u8, 2, 3];
    assert_eq!(
        unsafe { rca_encrypt(key.0, ragged.as_ptr(), ragged.len(), 0, out.as_mut_ptr(), out.len(), &mut len) },
        RcaStatus::SizeMismatch
    );
    assert_eq!(decrypt(&key, &[0u8; 4]), Err(RcaStatus::SizeMismatch));
    assert_eq!(
        unsafe { rca_encrypt(ptr::null(), ragged.as_ptr(), 4, 0, out.as_mut_ptr(), out.len(), &mut len) },
        RcaStatus::NullPointer
    );
    unsafe { rca_key_free(ptr::null_mut()) };
    assert_eq!(unsafe { rca_key_block_size(ptr::null()) }, 0);
}

#[test]
fn odd_block_sizes_have_no_byte_api() {
    let key = generate(33, RCA_MODE_STANDARD, 1);
    let mut out = [0u8; 64];
    let mut len = 0;
    let plain = [0u8; 33];
    assert_eq!(
        unsafe { rca_encrypt(key.0, plain.as_ptr(), plain.len(), 0, out.as_mut_ptr(), out.len(), &mut len) },
        RcaStatus::SizeMismatch
    );
}

#[test]
fn keystream_is_seeded() {
    let key = generate(32, RCA_MODE_STANDARD, 4);
    let (mut a, mut b, mut c) = ([0u8; 100], [0u8; 100], [0u8; 100]);
    unsafe {
        assert_eq!(rca_keystream(key.0, 1, a.as_mut_ptr(), a.len()), RcaStatus::Ok);
        assert_eq!(rca_keystream(key.0, 1, b.as_mut_ptr(), b.len()), RcaStatus::Ok);
        assert_eq!(rca_keystream(key.0, 2, c.as_mut_ptr(), c.len()), RcaStatus::Ok);
    }
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rca_cipher.h")).unwrap();
    for name in [
        "rca_key_new",
        "rca_key_generate",
        "rca_key_parse",
        "rca_key_format",
        "rca_key_free",
        "rca_encrypt",
        "rca_decrypt",
        "rca_keystream",
        "rca_status_message",
        "typedef struct RcaKey RcaKey",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-I", dir, "-"])
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(b"#include \"rca_cipher.h\"\nint main(void) { return RCA_STATUS_OK; }\n")?;
            child.wait()
        })
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
