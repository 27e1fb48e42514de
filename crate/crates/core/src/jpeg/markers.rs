//! Marker constants and the segment walker shared by the parser and the
//! metadata stripper.

use std::ops::Range;

use crate::error::{Error, Result};

pub const SOF0: u8 = 0xC0;
pub const SOF1: u8 = 0xC1;
pub const DHT: u8 = 0xC4;
pub const SOI: u8 = 0xD8;
pub const EOI: u8 = 0xD9;
pub const SOS: u8 = 0xDA;
pub const DQT: u8 = 0xDB;
pub const DRI: u8 = 0xDD;
pub const APP0: u8 = 0xE0;
pub const COM: u8 = 0xFE;

pub fn is_rst(m: u8) -> bool {
    (0xD0..=0xD7).contains(&m)
}

pub fn is_app(m: u8) -> bool {
    (0xE0..=0xEF).contains(&m)
}

/// Frame markers other than the Huffman sequential ones handled here.
pub fn is_unsupported_sof(m: u8) -> bool {
    matches!(m, 0xC2 | 0xC3 | 0xC5..=0xC7 | 0xC9..=0xCB | 0xCD..=0xCF)
}

fn standalone(m: u8) -> bool {
    m == SOI || m == EOI || m == 0x01 || is_rst(m)
}

/// A marker and, for markers that carry one, its length-prefixed payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub marker: u8,
    /// Offset of the 0xFF that starts the marker.
    pub start: usize,
    /// Payload without the two length bytes.
    pub payload: Range<usize>,
    /// One past the last byte of the segment.
    pub end: usize,
}

/// Reads the marker segment at `pos`, skipping 0xFF fill bytes.
pub fn read_segment(data: &[u8], pos: usize) -> Result<Segment> {
    let start = pos;
    if data.get(pos) != Some(&0xFF) {
        return Err(Error::format(pos, "expected marker"));
    }
    let mut p = pos;
    while data.get(p + 1) == Some(&0xFF) {
        p += 1;
    }
    let marker = *data
        .get(p + 1)
        .ok_or_else(|| Error::format(p, "truncated marker"))?;
    if marker == 0x00 {
        return Err(Error::format(p, "stuffed zero outside entropy-coded data"));
    }
    let after = p + 2;
    if standalone(marker) {
        return Ok(Segment {
            marker,
            start,
            payload: after..after,
            end: after,
        });
    }
    let len = match data.get(after..after + 2) {
        Some(b) => usize::from(u16::from_be_bytes([b[0], b[1]])),
        None => return Err(Error::format(after, "truncated segment length")),
    };
    if len < 2 {
        return Err(Error::format(
            after,
            format!("segment length {len} too small"),
        ));
    }
    let end = after + len;
    if end > data.len() {
        return Err(Error::format(
            after,
            format!("segment FF{marker:02X} runs past end of data"),
        ));
    }
    Ok(Segment {
        marker,
        start,
        payload: after + 2..end,
        end,
    })
}

/// Offset of the first marker after entropy-coded data beginning at `pos`,
/// skipping stuffed zeros and restart markers.
pub fn scan_end(data: &[u8], mut pos: usize) -> usize {
    while pos + 1 < data.len() {
        if data[pos] == 0xFF {
            let next = data[pos + 1];
            if next == 0x00 || is_rst(next) {
                pos += 2;
                continue;
            }
            if next != 0xFF {
                return pos;
            }
        }
        pos += 1;
    }
    data.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_segments() {
        let data = [0xFF, 0xD8, 0xFF, 0xFE, 0x00, 0x04, b'h', b'i', 0xFF, 0xD9];
        let soi = read_segment(&data, 0).unwrap();
        assert_eq!((soi.marker, soi.end), (SOI, 2));
        let com = read_segment(&data, 2).unwrap();
        assert_eq!(com.marker, COM);
        assert_eq!(&data[com.payload.clone()], b"hi");
        assert_eq!(read_segment(&data, com.end).unwrap().marker, EOI);
    }

    #[test]
    fn rejects_overlong_segment() {
        let data = [0xFF, 0xE1, 0x00, 0x10, 0x00];
        assert!(matches!(read_segment(&data, 0), Err(Error::Format { .. })));
        assert!(read_segment(&[0x12, 0x34], 0).is_err());
    }

    #[test]
    fn scan_end_skips_stuffing_and_restarts() {
        let data = [0x12, 0xFF, 0x00, 0x34, 0xFF, 0xD0, 0x56, 0xFF, 0xFF, 0xD9];
        assert_eq!(scan_end(&data, 0), 8);
    }
}
