//! Header-only rewriting: dropping APPn/COM segments.

use super::markers::*;
use super::write::JFIF_APP0;
use crate::error::{Error, Result};

/// Removes every APP1..APP15 and COM segment, keeps the entropy-coded data
/// byte-for-byte, and inserts a minimal JFIF APP0 when the stream has no
/// APP0. Bytes after EOI are dropped.
pub fn strip_metadata(data: &[u8]) -> Result<Vec<u8>> {
    if data.len() < 2 || data[0] != 0xFF || data[1] != SOI {
        return Err(Error::format(0, "missing SOI marker"));
    }
    let mut body = Vec::with_capacity(data.len());
    let mut has_app0 = false;
    let mut pos = 2;
    let mut saw_eoi = false;
    while pos < data.len() {
        let seg = read_segment(data, pos)?;
        match seg.marker {
            APP0 => {
                has_app0 = true;
                body.extend_from_slice(&data[seg.start..seg.end]);
            }
            m if is_app(m) || m == COM => {}
            SOI => return Err(Error::format(seg.start, "unexpected SOI")),
            EOI => {
                body.extend_from_slice(&data[seg.start..seg.end]);
                saw_eoi = true;
                break;
            }
            SOS => {
                let end = scan_end(data, seg.end);
                body.extend_from_slice(&data[seg.start..end]);
                pos = end;
                continue;
            }
            _ => body.extend_from_slice(&data[seg.start..seg.end]),
        }
        pos = seg.end;
    }
    if !saw_eoi {
        return Err(Error::format(data.len(), "missing EOI marker"));
    }
    let mut out = Vec::with_capacity(body.len() + 2 + JFIF_APP0.len());
    out.extend_from_slice(&[0xFF, SOI]);
    if !has_app0 {
        out.extend_from_slice(&JFIF_APP0);
    }
    out.extend(body);
    Ok(out)
}

/// Inserts a segment right after SOI (and after APP0, if that comes first).
pub fn insert_segment(data: &[u8], marker: u8, payload: &[u8]) -> Result<Vec<u8>> {
    if data.len() < 2 || data[0] != 0xFF || data[1] != SOI {
        return Err(Error::format(0, "missing SOI marker"));
    }
    let mut at = 2;
    if let Ok(seg) = read_segment(data, 2) {
        if seg.marker == APP0 {
            at = seg.end;
        }
    }
    let len =
        u16::try_from(payload.len() + 2).map_err(|_| Error::invalid("segment payload too long"))?;
    let mut out = Vec::with_capacity(data.len() + payload.len() + 4);
    out.extend_from_slice(&data[..at]);
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&data[at..]);
    Ok(out)
}
