//! On-disk token cache.
//!
//! Record layout, all integers little-endian:
//! `"CPTK"`, u16 version, u16 + bytes tokenizer id, u16 + bytes source id,
//! u32 length, then `length` u32 ids.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"CPTK";
const VERSION: u16 = 1;

pub fn encode_record(tokenizer_id: &str, source_id: &str, ids: &[u32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + tokenizer_id.len() + source_id.len() + 4 * ids.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for s in [tokenizer_id, source_id] {
        let len = u16::try_from(s.len()).expect("identifier longer than 65535 bytes");
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    let n = u32::try_from(ids.len()).expect("sequence longer than u32::MAX");
    out.extend_from_slice(&n.to_le_bytes());
    for id in ids {
        out.extend_from_slice(&id.to_le_bytes());
    }
    out
}

/// Parses a record into `(tokenizer_id, source_id, ids)`; `None` on any
/// corruption.
pub fn decode_record(bytes: &[u8]) -> Option<(String, String, Vec<u32>)> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC || r.u16()? != VERSION {
        return None;
    }
    let tok = r.string()?;
    let src = r.string()?;
    let n = r.u32()? as usize;
    let body = r.take(n.checked_mul(4)?)?;
    if r.pos != bytes.len() {
        return None;
    }
    let ids = body
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Some((tok, src, ids))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    fn u16(&mut self) -> Option<u16> {
        let b = self.take(2)?;
        Some(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Option<u32> {
        let b = self.take(4)?;
        Some(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn string(&mut self) -> Option<String> {
        let n = self.u16()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).ok()
    }
}

/// Token sequences keyed by content hash and tokenizer id.
#[derive(Debug, Clone)]
pub struct TokenCache {
    dir: PathBuf,
}

impl TokenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, content_hash: &str, tokenizer_id: &str) -> PathBuf {
        let safe: String = tokenizer_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.join(format!("{content_hash}.{safe}.tok"))
    }

    /// A record whose stored tokenizer id differs (sanitizing collision) or
    /// that fails to parse is treated as a miss.
    pub fn get(&self, content_hash: &str, tokenizer_id: &str) -> Option<Vec<u32>> {
        let bytes = fs::read(self.path(content_hash, tokenizer_id)).ok()?;
        let (tok, _, ids) = decode_record(&bytes)?;
        (tok == tokenizer_id).then_some(ids)
    }

    pub fn put(
        &self,
        content_hash: &str,
        tokenizer_id: &str,
        source_id: &str,
        ids: &[u32],
    ) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(content_hash, tokenizer_id);
        let tmp = path.with_extension("tok.tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode_record(tokenizer_id, source_id, ids))?;
        drop(f);
        fs::rename(tmp, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let rec = encode_record("b", "p/x", &[1, 256]);
        assert_eq!(&rec[..4], b"CPTK");
        assert_eq!(&rec[4..6], &[1, 0]);
        assert_eq!(&rec[6..9], &[1, 0, b'b']);
        assert_eq!(&rec[9..14], &[3, 0, b'p', b'/', b'x']);
        assert_eq!(&rec[14..18], &[2, 0, 0, 0]);
        assert_eq!(&rec[18..], &[1, 0, 0, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn truncated_and_trailing_rejected() {
        let rec = encode_record("b", "s", &[7, 8]);
        assert!(decode_record(&rec[..rec.len() - 1]).is_none());
        let mut extra = rec.clone();
        extra.push(0);
        assert!(decode_record(&extra).is_none());
    }

    #[test]
    fn disk_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TokenCache::new(dir.path().join("raw"));
        assert!(cache.get("abc", "ext/llama").is_none());
        cache.put("abc", "ext/llama", "p/f.c", &[3, 1, 4]).unwrap();
        assert_eq!(cache.get("abc", "ext/llama"), Some(vec![3, 1, 4]));
        assert!(cache.get("abc", "ext_llama").is_none());
    }

    proptest! {
        #[test]
        fn record_round_trip(tok in "[a-z/._-]{0,12}", src in ".{0,20}", ids in proptest::collection::vec(any::<u32>(), 0..200)) {
            let rec = encode_record(&tok, &src, &ids);
            prop_assert_eq!(decode_record(&rec), Some((tok, src, ids)));
        }
    }
}
