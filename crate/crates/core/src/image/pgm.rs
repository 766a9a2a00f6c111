//! Netpbm graymap I/O (P2 ASCII and P5 binary, 8-bit only).

use std::fs;
use std::path::Path;

use crate::error::PgmError;

/// Row-major 8-bit intensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, PgmError> {
        if width == 0 || height == 0 {
            return Err(PgmError::BadDimensions { width, height });
        }
        if pixels.len() != width * height {
            return Err(PgmError::Truncated {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, PgmError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> u8,
    ) -> Result<Self, PgmError> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn mirrored(&self) -> GrayImage {
        let pixels = (0..self.height)
            .flat_map(|y| (0..self.width).rev().map(move |x| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        GrayImage { pixels, ..*self }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, PgmError> {
        let mut cursor = Cursor { bytes, pos: 0 };
        let magic = cursor
            .token()
            .ok_or_else(|| PgmError::BadMagic(String::new()))?;
        let binary = match magic {
            b"P2" => false,
            b"P5" => true,
            other => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into())),
        };
        let width = cursor.header_number("width")?;
        let height = cursor.header_number("height")?;
        let maxval = cursor.header_number("maxval")?;
        if width == 0 || height == 0 {
            return Err(PgmError::BadDimensions {
                width: width as usize,
                height: height as usize,
            });
        }
        if maxval == 0 {
            return Err(PgmError::BadHeader("maxval is 0".into()));
        }
        if maxval > 255 {
            return Err(PgmError::UnsupportedDepth(maxval));
        }
        let (width, height) = (width as usize, height as usize);
        let expected = width
            .checked_mul(height)
            .ok_or(PgmError::BadDimensions { width, height })?;
        let raw: Vec<u32> = if binary {
            // exactly one whitespace byte separates maxval from the raster
            match cursor.bytes.get(cursor.pos) {
                Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
                _ => return Err(PgmError::BadHeader("missing raster separator".into())),
            }
            let rest = &cursor.bytes[cursor.pos..];
            if rest.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: rest.len(),
                });
            }
            rest[..expected].iter().map(|&b| b as u32).collect()
        } else {
            let mut values = Vec::with_capacity(expected);
            while values.len() < expected {
                match cursor.token() {
                    None => break,
                    Some(tok) => values.push(parse_u32(tok).ok_or_else(|| {
                        PgmError::BadHeader(format!(
                            "non-numeric pixel {:?}",
                            String::from_utf8_lossy(tok)
                        ))
                    })?),
                }
            }
            if values.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: values.len(),
                });
            }
            values
        };
        let mut pixels = Vec::with_capacity(expected);
        for (index, value) in raw.into_iter().enumerate() {
            if value > maxval {
                return Err(PgmError::BadPixel {
                    index,
                    value,
                    maxval,
                });
            }
            pixels.push(value as u8);
        }
        Self::new(width, height, pixels)
    }

    pub fn load(path: &Path) -> Result<Self, PgmError> {
        Self::parse(&fs::read(path)?)
    }

    /// Binary P5 with maxval 255.
    pub fn to_p5(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn to_p2(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), PgmError> {
        fs::write(path, self.to_p5())?;
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.bytes.get(self.pos) == Some(&b'#') {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .token()
            .ok_or_else(|| PgmError::BadHeader(format!("missing {what}")))?;
        parse_u32(tok).ok_or_else(|| {
            PgmError::BadHeader(format!(
                "{what} is not a number: {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
    }
}

fn parse_u32(tok: &[u8]) -> Option<u32> {
    std::str::from_utf8(tok).ok()?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_p2() {
        let img = GrayImage::parse(b"P2 2 1 255 0 255").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn comments_in_header() {
        let img = GrayImage::parse(b"P2\n# made by hand\n1 2\n# depth\n15\n3\n4\n").unwrap();
        assert_eq!(img.pixels(), &[3, 4]);
    }

    #[test]
    fn p5_round_trip() {
        let img = GrayImage::from_fn(3, 2, |x, y| (x * 40 + y * 100) as u8).unwrap();
        assert_eq!(GrayImage::parse(&img.to_p5()).unwrap(), img);
        assert_eq!(GrayImage::parse(img.to_p2().as_bytes()).unwrap(), img);
    }

    #[test]
    fn binary_raster_may_contain_whitespace_bytes() {
        let mut bytes = b"P5 2 1 255\n".to_vec();
        bytes.extend_from_slice(b" \n");
        assert_eq!(GrayImage::parse(&bytes).unwrap().pixels(), &[32, 10]);
    }

    #[test]
    fn errors_are_distinct() {
        assert!(matches!(
            GrayImage::parse(b"P6 1 1 255 0"),
            Err(PgmError::BadMagic(_))
        ));
        assert!(matches!(GrayImage::parse(b""), Err(PgmError::BadMagic(_))));
        assert!(matches!(
            GrayImage::parse(b"P2 1"),
            Err(PgmError::BadHeader(_))
        ));
        assert!(matches!(
            GrayImage::parse(b"P2 x 1 255 0"),
            Err(PgmError::BadHeader(_))
        ));
        assert!(matches!(
            GrayImage::parse(b"P2 0 1 255"),
            Err(PgmError::BadDimensions { .. })
        ));
        assert!(matches!(
            GrayImage::parse(b"P2 1 1 65535 0"),
            Err(PgmError::UnsupportedDepth(65535))
        ));
        assert!(matches!(
            GrayImage::parse(b"P2 2 2 255 1 2 3"),
            Err(PgmError::Truncated {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            GrayImage::parse(b"P5 2 2 255\n\x01\x02"),
            Err(PgmError::Truncated {
                expected: 4,
                found: 2
            })
        ));
        assert!(matches!(
            GrayImage::parse(b"P2 1 1 10 11"),
            Err(PgmError::BadPixel {
                index: 0,
                value: 11,
                maxval: 10
            })
        ));
    }

    #[test]
    fn mirror() {
        let img = GrayImage::new(3, 1, vec![1, 2, 3]).unwrap();
        assert_eq!(img.mirrored().pixels(), &[3, 2, 1]);
    }
}
