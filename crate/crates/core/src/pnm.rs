//! Netpbm P2/P3/P5/P6 reader and writer.
//!
//! Header fields are whitespace-separated decimal integers; `#` starts a
//! comment running to the end of the line. Binary rasters follow a single
//! whitespace byte after maxval and use two big-endian bytes per sample
//! when maxval exceeds 255. Samples are normalized to `[0, 1]` by maxval.

use thiserror::Error;

use crate::linalg::RectMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnmError {
    #[error("byte offset {offset}: unsupported magic number (expected P2, P3, P5 or P6)")]
    BadMagic { offset: usize },
    #[error("byte offset {offset}: truncated data ({what})")]
    TruncatedData { offset: usize, what: &'static str },
    #[error("byte offset {offset}: maxval {value} outside 1..=65535")]
    MaxvalOutOfRange { offset: usize, value: u64 },
    #[error("byte offset {offset}: invalid {what}")]
    InvalidToken { offset: usize, what: &'static str },
    #[error("byte offset {offset}: sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { offset: usize, value: u64, maxval: u16 },
}

impl PnmError {
    pub fn offset(&self) -> usize {
        match *self {
            Self::BadMagic { offset }
            | Self::TruncatedData { offset, .. }
            | Self::MaxvalOutOfRange { offset, .. }
            | Self::InvalidToken { offset, .. }
            | Self::SampleOutOfRange { offset, .. } => offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    /// P2
    PlainGray,
    /// P3
    PlainRgb,
    /// P5
    RawGray,
    /// P6
    RawRgb,
}

impl PnmKind {
    fn magic(self) -> &'static str {
        match self {
            Self::PlainGray => "P2",
            Self::PlainRgb => "P3",
            Self::RawGray => "P5",
            Self::RawRgb => "P6",
        }
    }

    fn channels(self) -> usize {
        match self {
            Self::PlainGray | Self::RawGray => 1,
            Self::PlainRgb | Self::RawRgb => 3,
        }
    }

    fn is_plain(self) -> bool {
        matches!(self, Self::PlainGray | Self::PlainRgb)
    }
}

/// Decoded image: one plane per channel, row-major, samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageChannels {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub channels: Vec<Vec<f64>>,
}

impl ImageChannels {
    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Channel `c` as a `height x width` matrix.
    pub fn channel_matrix(&self, c: usize) -> RectMatrix {
        RectMatrix::new(self.height, self.width, self.channels[c].clone())
            .expect("dimensions validated at parse time")
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
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

    /// Next decimal token; returns its start offset and value.
    fn uint(&mut self, what: &'static str) -> Result<(usize, u64), PnmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Err(PnmError::TruncatedData { offset: start, what });
        }
        let mut v: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(PnmError::InvalidToken { offset: start, what })?;
            self.pos += 1;
        }
        let terminated = self
            .bytes
            .get(self.pos)
            .is_none_or(|b| b.is_ascii_whitespace() || *b == b'#');
        if self.pos == start || !terminated {
            return Err(PnmError::InvalidToken { offset: start, what });
        }
        Ok((start, v))
    }
}

pub fn parse_pnm(bytes: &[u8]) -> Result<ImageChannels, PnmError> {
    let kind = match bytes.get(..2) {
        Some(b"P2") => PnmKind::PlainGray,
        Some(b"P3") => PnmKind::PlainRgb,
        Some(b"P5") => PnmKind::RawGray,
        Some(b"P6") => PnmKind::RawRgb,
        _ => return Err(PnmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PnmError::BadMagic { offset: 0 });
    }
    let (woff, width) = cur.uint("width")?;
    let (hoff, height) = cur.uint("height")?;
    let (moff, maxval) = cur.uint("maxval")?;
    if width == 0 {
        return Err(PnmError::InvalidToken { offset: woff, what: "width" });
    }
    if height == 0 {
        return Err(PnmError::InvalidToken { offset: hoff, what: "height" });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PnmError::MaxvalOutOfRange {
            offset: moff,
            value: maxval,
        });
    }
    let maxval = maxval as u16;
    let nch = kind.channels();
    let count = usize::try_from(width)
        .ok()
        .and_then(|w| usize::try_from(height).ok().and_then(|h| w.checked_mul(h)))
        .and_then(|p| p.checked_mul(nch))
        .ok_or(PnmError::InvalidToken { offset: woff, what: "image size" })?;
    let (width, height) = (width as usize, height as usize);
    let scale = f64::from(maxval);
    let mut channels = vec![Vec::with_capacity(count / nch); nch];

    let mut push = |k: usize, v: u64, offset: usize| -> Result<(), PnmError> {
        if v > u64::from(maxval) {
            return Err(PnmError::SampleOutOfRange { offset, value: v, maxval });
        }
        channels[k % nch].push(v as f64 / scale);
        Ok(())
    };

    if kind.is_plain() {
        for k in 0..count {
            let (off, v) = cur.uint("sample")?;
            push(k, v, off)?;
        }
    } else {
        // exactly one whitespace byte separates maxval from the raster
        let start = cur.pos + 1;
        let width_bytes = if maxval > 255 { 2 } else { 1 };
        let needed = count * width_bytes;
        let end = start.checked_add(needed).filter(|&e| e <= bytes.len());
        let Some(end) = end else {
            return Err(PnmError::TruncatedData {
                offset: bytes.len(),
                what: "raster",
            });
        };
        for (k, chunk) in bytes[start..end].chunks_exact(width_bytes).enumerate() {
            let v = if width_bytes == 2 {
                u64::from(u16::from_be_bytes([chunk[0], chunk[1]]))
            } else {
                u64::from(chunk[0])
            };
            push(k, v, start + k * width_bytes)?;
        }
    }
    Ok(ImageChannels {
        width,
        height,
        maxval,
        channels,
    })
}

/// Encodes `img`, quantizing each sample to `round(s * maxval)`.
pub fn write_pnm(img: &ImageChannels, kind: PnmKind) -> Vec<u8> {
    assert_eq!(
        img.channel_count(),
        kind.channels(),
        "channel count does not match the requested format"
    );
    let m = f64::from(img.maxval);
    let q = |s: f64| (s.clamp(0.0, 1.0) * m).round() as u16;
    let mut out = format!("{}\n{} {}\n{}\n", kind.magic(), img.width, img.height, img.maxval).into_bytes();
    let pixels = img.width * img.height;
    if kind.is_plain() {
        for row in 0..img.height {
            let mut line = Vec::with_capacity(img.width * kind.channels());
            for p in row * img.width..(row + 1) * img.width {
                for ch in &img.channels {
                    line.push(q(ch[p]).to_string());
                }
            }
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    } else {
        for p in 0..pixels {
            for ch in &img.channels {
                let v = q(ch[p]);
                if img.maxval > 255 {
                    out.extend_from_slice(&v.to_be_bytes());
                } else {
                    out.push(v as u8);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_gray() {
        let img = parse_pnm(b"P2\n2 1\n255\n0 255\n").unwrap();
        assert_eq!((img.width, img.height, img.channel_count()), (2, 1, 1));
        assert_eq!(img.channels[0], vec![0.0, 1.0]);
    }

    #[test]
    fn raw_rgb_three_pixels() {
        let mut bytes = b"P6\n3 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 0, 255, 0, 0, 0, 51]);
        let img = parse_pnm(&bytes).unwrap();
        assert_eq!(img.channel_count(), 3);
        assert_eq!(img.channels[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(img.channels[2], vec![0.0, 0.0, 0.2]);
    }

    #[test]
    fn sixteen_bit_big_endian() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0x80, 0x00, 0xff, 0xff]);
        let img = parse_pnm(&bytes).unwrap();
        assert_eq!(img.channels[0], vec![32768.0 / 65535.0, 1.0]);
    }

    #[test]
    fn header_comments() {
        let img = parse_pnm(b"P2\n# made by hand\n1 # width\n1\n10\n5\n").unwrap();
        assert_eq!(img.channels[0], vec![0.5]);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_pnm(b"P7\n1 1\n1\n"), Err(PnmError::BadMagic { offset: 0 }));
        assert_eq!(parse_pnm(b""), Err(PnmError::BadMagic { offset: 0 }));
        assert_eq!(
            parse_pnm(b"P2\n1 1\n70000\n1\n"),
            Err(PnmError::MaxvalOutOfRange { offset: 7, value: 70000 })
        );
        assert_eq!(
            parse_pnm(b"P2\n1 1\n0\n0\n"),
            Err(PnmError::MaxvalOutOfRange { offset: 7, value: 0 })
        );
        assert_eq!(
            parse_pnm(b"P5\n2 2\n255\n\x01\x02"),
            Err(PnmError::TruncatedData { offset: 13, what: "raster" })
        );
        assert_eq!(
            parse_pnm(b"P2\n2 1\n255\n7\n"),
            Err(PnmError::TruncatedData { offset: 13, what: "sample" })
        );
        assert_eq!(
            parse_pnm(b"P2\n1 1\n9\n12\n"),
            Err(PnmError::SampleOutOfRange { offset: 9, value: 12, maxval: 9 })
        );
        assert_eq!(
            parse_pnm(b"P2\n1x 1\n9\n1\n"),
            Err(PnmError::InvalidToken { offset: 3, what: "width" })
        );
    }

    #[test]
    fn write_then_parse_plain_and_raw() {
        let img = ImageChannels {
            width: 2,
            height: 2,
            maxval: 1000,
            channels: vec![vec![0.0, 0.25, 0.5, 1.0]; 3],
        };
        for kind in [PnmKind::PlainRgb, PnmKind::RawRgb] {
            assert_eq!(parse_pnm(&write_pnm(&img, kind)).unwrap(), img);
        }
    }
}
