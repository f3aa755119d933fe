//! Netpbm PGM (plain `P2` and raw `P5`) and CSV image files.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Position, Result};
use crate::image::{Image, PixelData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    PgmAscii,
    PgmBinary,
    Csv,
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm-ascii" | "p2" => Ok(ImageFormat::PgmAscii),
            "pgm-binary" | "p5" => Ok(ImageFormat::PgmBinary),
            "csv" => Ok(ImageFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown image format '{other}'"))),
        }
    }
}

/// Loads an image; without an explicit format, PGM is detected by its magic
/// number and anything else is read as CSV.
pub fn load_image(path: impl AsRef<Path>, format: Option<ImageFormat>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, format)
}

pub fn decode_image(bytes: &[u8], format: Option<ImageFormat>) -> Result<Image> {
    match format {
        Some(ImageFormat::Csv) => parse_csv(bytes),
        Some(expected) => {
            let img = parse_pgm(bytes)?;
            let magic = &bytes[..2];
            let ok = match expected {
                ImageFormat::PgmAscii => magic == b"P2",
                ImageFormat::PgmBinary => magic == b"P5",
                ImageFormat::Csv => unreachable!(),
            };
            if !ok {
                return Err(Error::parse(
                    "pgm",
                    Position::Byte(0),
                    format!("magic {:?} does not match requested format", String::from_utf8_lossy(magic)),
                ));
            }
            Ok(img)
        }
        None if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") => parse_pgm(bytes),
        None => parse_csv(bytes),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' && self.bytes[self.pos] != b'\r' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                Error::parse("pgm", Position::Byte(self.pos), format!("truncated: expected {what}"))
            } else {
                Error::parse(
                    "pgm",
                    Position::Byte(self.pos),
                    format!("expected {what}, found {:?}", self.bytes[self.pos] as char),
                )
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse::<u64>()
            .map_err(|_| Error::parse("pgm", Position::Byte(start), format!("{what} '{text}' too large")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 {
        return Err(Error::parse("pgm", Position::Byte(0), "truncated: missing magic number"));
    }
    let raw = match &bytes[..2] {
        b"P2" => false,
        b"P5" => true,
        _ => return Err(Error::parse("pgm", Position::Byte(0), "magic number is not P2 or P5")),
    };
    let mut r = HeaderReader { bytes, pos: 2 };
    let width_pos = r.pos;
    let width = r.number("width")? as usize;
    let height = r.number("height")? as usize;
    let maxval_pos = r.pos;
    let maxval = r.number("maxval")?;
    if width < 2 || height < 2 {
        return Err(Error::parse(
            "pgm",
            Position::Byte(width_pos),
            format!("dimensions {width}x{height}: both sides must be at least 2"),
        ));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(
            "pgm",
            Position::Byte(maxval_pos),
            format!("maxval {maxval} outside 1..=65535"),
        ));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse("pgm", Position::Byte(width_pos), "image too large"))?;
    let mut samples = Vec::with_capacity(count);
    if raw {
        // exactly one whitespace byte separates maxval from the raster
        if r.pos >= bytes.len() || !bytes[r.pos].is_ascii_whitespace() {
            return Err(Error::parse("pgm", Position::Byte(r.pos), "truncated: missing raster"));
        }
        let mut pos = r.pos + 1;
        let wide = maxval > 255;
        let step = if wide { 2 } else { 1 };
        for _ in 0..count {
            if pos + step > bytes.len() {
                return Err(Error::parse(
                    "pgm",
                    Position::Byte(pos),
                    format!("truncated payload: {} of {count} samples", samples.len()),
                ));
            }
            let v = if wide {
                u16::from_be_bytes([bytes[pos], bytes[pos + 1]]) as u64
            } else {
                bytes[pos] as u64
            };
            if v > maxval {
                return Err(Error::parse(
                    "pgm",
                    Position::Byte(pos),
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            samples.push(v as u32);
            pos += step;
        }
    } else {
        for _ in 0..count {
            r.skip_space_and_comments();
            let at = r.pos;
            if at >= bytes.len() {
                return Err(Error::parse(
                    "pgm",
                    Position::Byte(at),
                    format!("truncated payload: {} of {count} samples", samples.len()),
                ));
            }
            let v = r.number("sample")?;
            if v > maxval {
                return Err(Error::parse(
                    "pgm",
                    Position::Byte(at),
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            samples.push(v as u32);
        }
    }
    Image::new(width, height, maxval as f64, PixelData::Integer(samples))
}

/// One image row per line, comma-separated non-negative numbers.
pub fn parse_csv(bytes: &[u8]) -> Result<Image> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse("csv", Position::Byte(e.valid_up_to()), "not valid UTF-8"))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::parse("csv", Position::Line(lineno + 1), format!("'{field}' is not a number"))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::parse(
                    "csv",
                    Position::Line(lineno + 1),
                    format!("intensity {v} must be finite and non-negative"),
                ));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    "csv",
                    Position::Line(lineno + 1),
                    format!("{} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if width < 2 || height < 2 {
        return Err(Error::parse(
            "csv",
            Position::Line(1),
            format!("dimensions {width}x{height}: both sides must be at least 2"),
        ));
    }
    Image::from_real(width, height, rows.into_iter().flatten().collect())
}

/// Raw 8-bit PGM.
pub fn encode_pgm_u8(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Plain PGM of an integral or real image (reals are rounded).
pub fn encode_pgm_ascii(img: &Image) -> Vec<u8> {
    let maxval = img.max_value().round().max(1.0) as u64;
    let mut out = format!("P2\n{} {}\n{maxval}\n", img.width(), img.height());
    for j in 0..img.height() {
        let row: Vec<String> = (0..img.width())
            .map(|i| (img.get(i, j).round() as u64).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn encode_csv(width: usize, values: &[f64]) -> Vec<u8> {
    let mut out = String::new();
    for row in values.chunks(width) {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}
