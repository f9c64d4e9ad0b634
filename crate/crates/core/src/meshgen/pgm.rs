//! Netpbm graymap (P2 / P5) decoding into a thresholded occupancy mask.

use super::{BinaryMask, MeshError};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> MeshError {
        MeshError::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self, what: &str) -> Result<u32, MeshError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or_else(|| self.err(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.bytes.len() {
                self.err(format!("unexpected end of data reading {what}"))
            } else {
                self.err(format!("expected {what}"))
            });
        }
        Ok(value)
    }
}

/// Parses a P2 or P5 image and thresholds it: a pixel is tissue iff its
/// gray value is `>= threshold`.
pub fn load_mask(bytes: &[u8], threshold: u8) -> Result<BinaryMask, MeshError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(cur.err("missing P2/P5 magic number")),
    };
    cur.pos = 2;
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        None => return Err(cur.err("unexpected end of data after magic number")),
        Some(_) => return Err(cur.err("expected whitespace after magic number")),
    }
    let width = cur.read_uint("width")?;
    let height = cur.read_uint("height")?;
    let maxval = cur.read_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.err("image dimensions must be nonzero"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(cur.err(format!("unsupported maxval {maxval} (expected 1..=255)")));
    }
    let count = width as usize * height as usize;
    let mut bits = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(cur.err("expected single whitespace before raster")),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() < count {
            cur.pos = bytes.len();
            return Err(cur.err(format!(
                "truncated raster: expected {count} bytes, found {}",
                raster.len()
            )));
        }
        for (i, &g) in raster[..count].iter().enumerate() {
            if u32::from(g) > maxval {
                cur.pos += i;
                return Err(cur.err(format!("gray value {g} exceeds maxval {maxval}")));
            }
            bits.push(g >= threshold);
        }
    } else {
        for _ in 0..count {
            let g = cur.read_uint("gray value")?;
            if g > maxval {
                return Err(cur.err(format!("gray value {g} exceeds maxval {maxval}")));
            }
            bits.push(g >= u32::from(threshold));
        }
    }
    BinaryMask::new(width as usize, height as usize, bits)
}

/// Encodes a mask as a binary PGM (tissue = 255, background = 0).
pub fn encode_mask(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5(width: usize, height: usize, grays: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n{width} {height}\n255\n").into_bytes();
        v.extend_from_slice(grays);
        v
    }

    #[test]
    fn uniform_white_is_all_tissue() {
        let m = load_mask(&p5(2, 2, &[255; 4]), 128).unwrap();
        assert_eq!(m.bits(), &[true; 4]);
    }

    #[test]
    fn uniform_black_is_empty() {
        let m = load_mask(&p5(2, 2, &[0; 4]), 128).unwrap();
        assert_eq!(m.bits(), &[false; 4]);
    }

    #[test]
    fn threshold_is_inclusive() {
        let m = load_mask(&p5(3, 1, &[100, 128, 200]), 128).unwrap();
        assert_eq!(m.bits(), &[false, true, true]);
    }

    #[test]
    fn ascii_with_comments() {
        let src = b"P2\n# a comment\n3 1 # trailing\n255\n100 128\n200\n";
        let m = load_mask(src, 128).unwrap();
        assert_eq!((m.width(), m.height()), (3, 1));
        assert_eq!(m.bits(), &[false, true, true]);
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let bytes = p5(2, 2, &[1, 2, 3]);
        match load_mask(&bytes, 1) {
            Err(MeshError::Parse { offset, message }) => {
                assert_eq!(offset, bytes.len());
                assert!(message.contains("truncated"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header_reports_offset() {
        match load_mask(b"P5\n2 x\n255\n", 1) {
            Err(MeshError::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_mask(b"P6\n1 1\n255\n\0", 1),
            Err(MeshError::Parse { offset: 0, .. })
        ));
    }

    #[test]
    fn ascii_truncated_is_error() {
        assert!(matches!(
            load_mask(b"P2 2 2 255 1 2 3", 1),
            Err(MeshError::Parse { offset: 16, .. })
        ));
    }

    #[test]
    fn encode_then_load() {
        let mask = BinaryMask::new(3, 2, vec![true, false, true, false, true, false]).unwrap();
        assert_eq!(load_mask(&encode_mask(&mask), 128).unwrap(), mask);
    }
}
