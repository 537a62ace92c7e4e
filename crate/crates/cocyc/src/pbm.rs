//! Portable bitmap reading and writing (P1 and P4). A set bit is foreground.

use cocyc_core::BinaryImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PbmError {
    #[error("not a PBM file (magic {0:?})")]
    BadMagic(String),
    #[error("header ended early")]
    TruncatedHeader,
    #[error("bad {field} in header: {found:?}")]
    BadNumber { field: &'static str, found: String },
    #[error("image is empty ({width}x{height})")]
    Empty { width: u32, height: u32 },
    #[error("image {width}x{height} exceeds the limit {max_width}x{max_height}")]
    TooLarge { width: u32, height: u32, max_width: u32, max_height: u32 },
    #[error("raster truncated: expected {expected} pixels, got {got}")]
    TruncatedRaster { expected: usize, got: usize },
    #[error("unexpected byte {0:#04x} in ASCII raster")]
    BadPixel(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_width: u32,
    pub max_height: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_width: 4096, max_height: 4096 }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_space();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(|c| !c.is_ascii_whitespace() && *c != b'#') {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u32, PbmError> {
        let t = self.token().ok_or(PbmError::TruncatedHeader)?;
        let s = String::from_utf8_lossy(t);
        s.parse().map_err(|_| PbmError::BadNumber { field, found: s.into_owned() })
    }
}

pub fn parse(data: &[u8], limits: Limits) -> Result<BinaryImage, PbmError> {
    let mut cur = Cursor { data, pos: 0 };
    let magic = cur.token().ok_or(PbmError::TruncatedHeader)?;
    let binary = match magic {
        b"P1" => false,
        b"P4" => true,
        other => return Err(PbmError::BadMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(PbmError::Empty { width, height });
    }
    if width > limits.max_width || height > limits.max_height {
        return Err(PbmError::TooLarge {
            width,
            height,
            max_width: limits.max_width,
            max_height: limits.max_height,
        });
    }
    let expected = width as usize * height as usize;
    let mut bits = Vec::with_capacity(expected);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if cur.data.get(cur.pos).is_none_or(|c| !c.is_ascii_whitespace()) {
            return Err(PbmError::TruncatedRaster { expected, got: 0 });
        }
        let raster = &data[cur.pos + 1..];
        let stride = width.div_ceil(8) as usize;
        for row in raster.chunks_exact(stride).take(height as usize) {
            bits.extend((0..width as usize).map(|x| row[x / 8] & (0x80 >> (x % 8)) != 0));
        }
    } else {
        for &c in &data[cur.pos..] {
            if bits.len() == expected {
                break;
            }
            match c {
                b'0' => bits.push(false),
                b'1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                c => return Err(PbmError::BadPixel(c)),
            }
        }
    }
    if bits.len() < expected {
        return Err(PbmError::TruncatedRaster { expected, got: bits.len() });
    }
    Ok(BinaryImage::from_fn(width, height, |x, y| bits[(y * width + x) as usize]))
}

pub fn write_p1(img: &BinaryImage) -> String {
    let mut out = format!("P1\n{} {}\n", img.width(), img.height());
    for y in 0..img.height() {
        let row: Vec<&str> = (0..img.width()).map(|x| if img.get(x, y) { "1" } else { "0" }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_p4(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    let stride = img.width().div_ceil(8) as usize;
    for y in 0..img.height() {
        let mut row = vec![0u8; stride];
        for x in 0..img.width() {
            if img.get(x, y) {
                row[x as usize / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend(row);
    }
    out
}
