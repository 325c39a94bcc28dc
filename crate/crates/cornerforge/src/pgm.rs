//! Binary PGM (P5) reading and writing.

use std::fs;
use std::path::Path;

use cornerforge_core::image::ImageError;
use cornerforge_core::GrayImage;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("ASCII PGM (P2) is not supported; convert to binary P5")]
    AsciiVariant,
    #[error("not a PGM file (magic {0:?})")]
    BadMagic(String),
    #[error("malformed PGM header: {0}")]
    Header(&'static str),
    #[error("maxval {0} is outside 1..=255")]
    Maxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#' {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        let tok = self.token().ok_or(PgmError::Header(what))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::Header(what))
    }
}

/// Parses a binary PGM. Sample values are taken as stored; `maxval` only
/// bounds them.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let mut c = Cursor { bytes, pos: 0 };
    match c.token() {
        Some(b"P5") => {}
        Some(b"P2") => return Err(PgmError::AsciiVariant),
        Some(other) => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into_owned())),
        None => return Err(PgmError::Header("missing magic")),
    }
    let width = c.number("width")? as usize;
    let height = c.number("height")? as usize;
    let maxval = c.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::Maxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(c.pos) {
        Some(b) if b.is_ascii_whitespace() => c.pos += 1,
        _ => return Err(PgmError::Header("no whitespace after maxval")),
    }
    let expected = width
        .checked_mul(height)
        .ok_or(PgmError::Header("dimensions overflow"))?;
    let payload = &bytes[c.pos..];
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    Ok(GrayImage::new(width, height, payload[..expected].to_vec())?)
}

/// Canonical encoding: `P5\n<w> <h>\n255\n` followed by the raster.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Reads and parses `path`.
pub fn load_pgm(path: &Path) -> Result<GrayImage, crate::Error> {
    let bytes = fs::read(path).map_err(|e| crate::Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|e| crate::Error::data(format!("{}: {e}", path.display())))
}

pub fn save_pgm(path: &Path, img: &GrayImage) -> Result<(), crate::Error> {
    fs::write(path, encode_pgm(img)).map_err(|e| crate::Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_example() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend([0, 255, 10, 20]);
        let img = parse_pgm(&bytes).unwrap();
        assert_eq!(img.get(1, 0), 255);
        assert_eq!(img.get(0, 1), 10);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(parse_pgm(b"P2\n2 2\n255\n0 0 0 0"), Err(PgmError::AsciiVariant)));
        assert!(matches!(parse_pgm(b"P6\n2 2\n255\n"), Err(PgmError::BadMagic(_))));
        assert!(matches!(parse_pgm(b"P5\n2 x\n255\n"), Err(PgmError::Header(_))));
        assert!(matches!(parse_pgm(b"P5\n2 2\n65535\n"), Err(PgmError::Maxval(65535))));
        assert!(matches!(
            parse_pgm(b"P5\n2 2\n255\n\x01\x02"),
            Err(PgmError::Truncated { expected: 4, found: 2 })
        ));
        assert!(matches!(parse_pgm(b"P5\n0 2\n255\n"), Err(PgmError::Image(_))));
    }

    #[test]
    fn header_comments_are_skipped() {
        let img = parse_pgm(b"P5\n# made by hand\n1 1\n# max\n255\n\x07").unwrap();
        assert_eq!(img.get(0, 0), 7);
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_exact(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let img = GrayImage::from_fn(w, h, |x, y| (seed.wrapping_mul(x as u64 * 31 + y as u64 * 7 + 1) >> 13) as u8);
            let bytes = encode_pgm(&img);
            let back = parse_pgm(&bytes).unwrap();
            prop_assert_eq!(&back, &img);
            prop_assert_eq!(encode_pgm(&back), bytes);
        }
    }
}
