use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Encoding {
    #[serde(rename = "utf-8")]
    Utf8,
    #[serde(rename = "utf-8-bom")]
    Utf8Bom,
    #[serde(rename = "utf-16le")]
    Utf16Le,
    #[serde(rename = "utf-16be")]
    Utf16Be,
    #[serde(rename = "windows-1252")]
    Windows1252,
    #[serde(rename = "iso-8859-1")]
    Latin1,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Utf8 => "utf-8",
            Encoding::Utf8Bom => "utf-8-bom",
            Encoding::Utf16Le => "utf-16le",
            Encoding::Utf16Be => "utf-16be",
            Encoding::Windows1252 => "windows-1252",
            Encoding::Latin1 => "iso-8859-1",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub text: String,
    pub encoding: Encoding,
    /// Set when the bytes were not valid in a Unicode encoding and a
    /// single-byte fallback (or replacement characters) was used.
    pub fallback: bool,
}

// 0x80..=0x9F in windows-1252; None where the code page leaves a hole.
const CP1252_HIGH: [Option<char>; 32] = [
    Some('\u{20ac}'), None, Some('\u{201a}'), Some('\u{0192}'),
    Some('\u{201e}'), Some('\u{2026}'), Some('\u{2020}'), Some('\u{2021}'),
    Some('\u{02c6}'), Some('\u{2030}'), Some('\u{0160}'), Some('\u{2039}'),
    Some('\u{0152}'), None, Some('\u{017d}'), None,
    None, Some('\u{2018}'), Some('\u{2019}'), Some('\u{201c}'),
    Some('\u{201d}'), Some('\u{2022}'), Some('\u{2013}'), Some('\u{2014}'),
    Some('\u{02dc}'), Some('\u{2122}'), Some('\u{0161}'), Some('\u{203a}'),
    Some('\u{0153}'), None, Some('\u{017e}'), Some('\u{0178}'),
];

/// Decodes file bytes to text. Order: byte-order mark, strict UTF-8, then
/// a single-byte fallback (windows-1252 when the C1 range holds printable
/// code-page characters, ISO-8859-1 otherwise). Never fails; the result
/// never starts with a BOM.
pub fn detect_and_decode(bytes: &[u8]) -> Decoded {
    if let Some(rest) = bytes.strip_prefix(b"\xef\xbb\xbf") {
        return match std::str::from_utf8(rest) {
            Ok(s) => Decoded {
                text: s.to_string(),
                encoding: Encoding::Utf8Bom,
                fallback: false,
            },
            Err(_) => Decoded {
                text: String::from_utf8_lossy(rest).into_owned(),
                encoding: Encoding::Utf8Bom,
                fallback: true,
            },
        };
    }
    if let Some(rest) = bytes.strip_prefix(b"\xff\xfe") {
        return decode_utf16(rest, u16::from_le_bytes, Encoding::Utf16Le);
    }
    if let Some(rest) = bytes.strip_prefix(b"\xfe\xff") {
        return decode_utf16(rest, u16::from_be_bytes, Encoding::Utf16Be);
    }
    if let Ok(s) = std::str::from_utf8(bytes) {
        return Decoded {
            text: s.to_string(),
            encoding: Encoding::Utf8,
            fallback: false,
        };
    }
    let c1 = bytes.iter().filter(|&&b| (0x80..0xa0).contains(&b));
    let use_cp1252 = c1.clone().next().is_some()
        && c1.into_iter().all(|&b| CP1252_HIGH[usize::from(b - 0x80)].is_some());
    let text = if use_cp1252 {
        bytes
            .iter()
            .map(|&b| match b {
                0x80..=0x9f => CP1252_HIGH[usize::from(b - 0x80)].unwrap(),
                _ => char::from(b),
            })
            .collect()
    } else {
        bytes.iter().map(|&b| char::from(b)).collect()
    };
    Decoded {
        text,
        encoding: if use_cp1252 { Encoding::Windows1252 } else { Encoding::Latin1 },
        fallback: true,
    }
}

fn decode_utf16(rest: &[u8], unit: fn([u8; 2]) -> u16, encoding: Encoding) -> Decoded {
    let units: Vec<u16> = rest.chunks_exact(2).map(|c| unit([c[0], c[1]])).collect();
    let odd = rest.len() % 2 == 1;
    match String::from_utf16(&units) {
        Ok(text) => Decoded {
            text,
            encoding,
            fallback: odd,
        },
        Err(_) => Decoded {
            text: String::from_utf16_lossy(&units),
            encoding,
            fallback: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_utf8() {
        let d = detect_and_decode(b"fn main() {}");
        assert_eq!(d.text, "fn main() {}");
        assert_eq!(d.encoding.name(), "utf-8");
        assert!(!d.fallback);
    }

    #[test]
    fn bom_is_removed() {
        let d = detect_and_decode(b"\xef\xbb\xbfx = 1");
        assert_eq!(d.text, "x = 1");
        assert_eq!(d.encoding.name(), "utf-8-bom");
    }

    #[test]
    fn lone_high_byte_falls_back_to_latin1() {
        let d = detect_and_decode(&[0xe9]);
        assert_eq!(d.text, "é");
        assert_eq!(d.encoding, Encoding::Latin1);
        assert!(d.fallback);
    }

    #[test]
    fn latin1_matches_code_point_table() {
        // ISO-8859-1 assigns byte b to U+00bb for the whole printable upper half.
        for b in 0xa0u8..=0xff {
            let d = detect_and_decode(&[b'a', b]);
            let expected: String = ['a', char::from_u32(u32::from(b)).unwrap()].iter().collect();
            assert_eq!(d.text, expected, "byte {b:#x}");
        }
    }

    #[test]
    fn smart_quotes_use_cp1252() {
        let d = detect_and_decode(b"\x93hi\x94 caf\xe9");
        assert_eq!(d.text, "\u{201c}hi\u{201d} café");
        assert_eq!(d.encoding, Encoding::Windows1252);
    }

    #[test]
    fn utf16_with_bom() {
        let d = detect_and_decode(b"\xff\xfea\x00b\x00");
        assert_eq!(d.text, "ab");
        assert_eq!(d.encoding, Encoding::Utf16Le);
        let d = detect_and_decode(b"\xfe\xff\x00a\x00b");
        assert_eq!(d.text, "ab");
        assert_eq!(d.encoding, Encoding::Utf16Be);
    }

    #[test]
    fn empty_input() {
        let d = detect_and_decode(b"");
        assert_eq!(d.text, "");
        assert_eq!(d.encoding, Encoding::Utf8);
    }
}
