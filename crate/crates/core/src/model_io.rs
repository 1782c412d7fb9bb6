//! Versioned, checksummed container for model files.
//!
//! Layout (UTF-8):
//!
//! ```text
//! SEMWEIGHT <format-version> <kind> <payload-bytes> <sha256-hex>\n
//! <payload: one JSON document>
//! ```
//!
//! The checksum covers exactly the payload bytes. Floats are written in
//! shortest round-trip form so a reload reproduces every weight bit for bit.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: &str = "SEMWEIGHT";
pub const FORMAT_VERSION: u32 = 1;

pub fn encode<P: Serialize>(kind: &str, payload: &P) -> Result<Vec<u8>> {
    let body = serde_json::to_vec(payload)?;
    let digest = hex::encode(Sha256::digest(&body));
    let mut out = format!("{MAGIC} {FORMAT_VERSION} {kind} {} {digest}\n", body.len()).into_bytes();
    out.extend_from_slice(&body);
    Ok(out)
}

pub fn decode<P: DeserializeOwned>(kind: &str, bytes: &[u8]) -> Result<P> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Corrupted("missing header".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::Corrupted("header is not UTF-8".into()))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::Corrupted("not a semweight model file".into()));
    }
    let version = fields.get(1).copied().unwrap_or("");
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::VersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    let [_, _, found_kind, len, digest] = fields[..] else {
        return Err(Error::Corrupted("malformed header".into()));
    };
    if found_kind != kind {
        return Err(Error::Corrupted(format!(
            "expected a {kind} file, found {found_kind}"
        )));
    }
    let len: usize = len
        .parse()
        .map_err(|_| Error::Corrupted("bad payload length".into()))?;
    let body = &bytes[newline + 1..];
    if body.len() != len {
        return Err(Error::Corrupted(format!(
            "payload is {} bytes, header says {len} (truncated or padded file)",
            body.len()
        )));
    }
    if hex::encode(Sha256::digest(body)) != digest {
        return Err(Error::Corrupted("checksum mismatch".into()));
    }
    serde_json::from_slice(body).map_err(|e| Error::Corrupted(format!("payload: {e}")))
}

pub fn save<P: Serialize>(kind: &str, payload: &P, path: &Path) -> Result<()> {
    let bytes = encode(kind, payload)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load<P: DeserializeOwned>(kind: &str, path: &Path) -> Result<P> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(kind, &bytes)
}
