use std::fmt;

use sha2::{Digest, Sha256};

use crate::oracle::Key;
use crate::structures::Payload;

/// Canonical byte serialization of a structure's logical representation.
///
/// Two structures have equal fingerprints iff they have the same topology, the
/// same per-node keys, ranks and stored weights, the same auxiliary state and
/// the same payload contents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(Vec<u8>);

impl Fingerprint {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Short hex digest for reports.
    pub fn short_hex(&self) -> String {
        Sha256::digest(&self.0)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Fingerprint({} bytes, {})",
            self.0.len(),
            self.short_hex()
        )
    }
}

const NODE: u8 = b'N';
const NIL: u8 = b'.';

#[derive(Default)]
pub struct FingerprintWriter {
    buf: Vec<u8>,
}

impl FingerprintWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tag(&mut self, tag: &str) -> &mut Self {
        self.u64(tag.len() as u64);
        self.buf.extend_from_slice(tag.as_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn i64(&mut self, v: i64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        // -0.0 and 0.0 are the same logical weight
        let v = if v == 0.0 { 0.0 } else { v };
        self.u64(v.to_bits())
    }

    pub fn node(&mut self) -> &mut Self {
        self.buf.push(NODE);
        self
    }

    pub fn nil(&mut self) -> &mut Self {
        self.buf.push(NIL);
        self
    }

    /// Appends a digest of `(key, payload)` pairs, which must be given in key order.
    pub fn contents<'a, I>(&mut self, entries: I) -> &mut Self
    where
        I: IntoIterator<Item = (Key, Option<&'a Payload>)>,
    {
        let mut h = Sha256::new();
        for (key, payload) in entries {
            h.update(key.to_le_bytes());
            match payload {
                Some(p) => {
                    h.update([1u8]);
                    h.update((p.len() as u64).to_le_bytes());
                    h.update(&p[..]);
                }
                None => h.update([0u8]),
            }
        }
        self.buf.extend_from_slice(&h.finalize());
        self
    }

    /// Embeds a nested fingerprint, length-prefixed.
    pub fn nested(&mut self, fp: &Fingerprint) -> &mut Self {
        self.u64(fp.0.len() as u64);
        self.buf.extend_from_slice(&fp.0);
        self
    }

    pub fn finish(self) -> Fingerprint {
        Fingerprint(self.buf)
    }
}

/// Anything whose internal representation can be canonically serialized.
pub trait Fingerprinted {
    fn write_fingerprint(&self, w: &mut FingerprintWriter);

    fn fingerprint(&self) -> Fingerprint {
        let mut w = FingerprintWriter::new();
        self.write_fingerprint(&mut w);
        w.finish()
    }
}

impl<T: Fingerprinted + ?Sized> Fingerprinted for Box<T> {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        (**self).write_fingerprint(w);
    }
}
