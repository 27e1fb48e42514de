//! Baseline JPEG parsing down to quantized coefficients.

use super::bits::BitReader;
use super::coded::{mcu_grid, CodedImage, CoefBlock, Component};
use super::huffman::{Decoder, HuffmanSpec, TableKind};
use super::markers::*;
use super::quant::{QuantTable, TableClass};
use super::SubsamplingMode;
use crate::error::{Error, Result};

struct FrameComponent {
    id: u8,
    h: u8,
    v: u8,
    tq: u8,
}

struct Frame {
    width: usize,
    height: usize,
    components: Vec<FrameComponent>,
    mode: SubsamplingMode,
}

#[derive(Default)]
struct State {
    quant: [Option<[u16; 64]>; 4],
    dc: [Option<HuffmanSpec>; 4],
    ac: [Option<HuffmanSpec>; 4],
    frame: Option<Frame>,
    restart_interval: u16,
    coded: Option<CodedImage>,
}

/// Entropy-decodes a baseline (or extended 8-bit Huffman) sequential JPEG.
pub fn parse(data: &[u8]) -> Result<CodedImage> {
    if data.len() < 2 || data[0] != 0xFF || data[1] != SOI {
        return Err(Error::format(0, "missing SOI marker"));
    }
    let mut st = State::default();
    let mut pos = 2;
    loop {
        if pos >= data.len() {
            break;
        }
        let seg = read_segment(data, pos)?;
        let payload = &data[seg.payload.clone()];
        let at = seg.payload.start;
        match seg.marker {
            EOI => break,
            SOI => return Err(Error::format(seg.start, "unexpected SOI")),
            DQT => read_dqt(payload, at, &mut st)?,
            DHT => read_dht(payload, at, &mut st)?,
            DRI => {
                if payload.len() != 2 {
                    return Err(Error::format(at, "DRI payload must be 2 bytes"));
                }
                st.restart_interval = u16::from_be_bytes([payload[0], payload[1]]);
            }
            SOF0 | SOF1 => {
                if st.frame.is_some() {
                    return Err(Error::format(seg.start, "multiple frames"));
                }
                st.frame = Some(read_sof(payload, at)?);
            }
            m if is_unsupported_sof(m) => {
                return Err(Error::Unsupported(format!(
                    "frame type SOF{} (only baseline/extended sequential Huffman)",
                    m - 0xC0
                )));
            }
            SOS => {
                if st.coded.is_some() {
                    return Err(Error::Unsupported("multiple scans".into()));
                }
                let end = decode_scan(data, payload, at, seg.end, &mut st)?;
                pos = end;
                continue;
            }
            _ => {} // APPn, COM and anything else: skipped
        }
        pos = seg.end;
    }
    st.coded
        .ok_or_else(|| Error::format(data.len(), "no scan found before end of data"))
}

fn read_dqt(mut p: &[u8], mut at: usize, st: &mut State) -> Result<()> {
    while !p.is_empty() {
        let pq = p[0] >> 4;
        let tq = p[0] & 0x0F;
        if tq > 3 {
            return Err(Error::format(at, format!("quant table id {tq}")));
        }
        let size = if pq == 0 { 64 } else { 128 };
        if p.len() < 1 + size {
            return Err(Error::format(at, "truncated DQT"));
        }
        let mut t = [0u16; 64];
        for (k, v) in t.iter_mut().enumerate() {
            *v = if pq == 0 {
                u16::from(p[1 + k])
            } else {
                u16::from_be_bytes([p[1 + 2 * k], p[2 + 2 * k]])
            };
        }
        if t.iter().any(|&q| q == 0 || q > 255) {
            return Err(Error::Unsupported(format!(
                "quant table {tq} has steps outside 1..=255"
            )));
        }
        st.quant[tq as usize] = Some(t);
        p = &p[1 + size..];
        at += 1 + size;
    }
    Ok(())
}

fn read_dht(mut p: &[u8], mut at: usize, st: &mut State) -> Result<()> {
    while !p.is_empty() {
        if p.len() < 17 {
            return Err(Error::format(at, "truncated DHT"));
        }
        let class = p[0] >> 4;
        let id = p[0] & 0x0F;
        if class > 1 || id > 3 {
            return Err(Error::format(
                at,
                format!("bad Huffman table class/id {:#04x}", p[0]),
            ));
        }
        let mut counts = [0u8; 16];
        counts.copy_from_slice(&p[1..17]);
        let n: usize = counts.iter().map(|&c| usize::from(c)).sum();
        if n > 256 || p.len() < 17 + n {
            return Err(Error::format(at, "truncated Huffman symbol list"));
        }
        let kind = if class == 0 {
            TableKind::Dc
        } else {
            TableKind::Ac
        };
        let spec = HuffmanSpec {
            kind,
            id,
            counts,
            symbols: p[17..17 + n].to_vec(),
        };
        match kind {
            TableKind::Dc => st.dc[id as usize] = Some(spec),
            TableKind::Ac => st.ac[id as usize] = Some(spec),
        }
        p = &p[17 + n..];
        at += 17 + n;
    }
    Ok(())
}

fn read_sof(p: &[u8], at: usize) -> Result<Frame> {
    if p.len() < 6 {
        return Err(Error::format(at, "truncated SOF"));
    }
    if p[0] != 8 {
        return Err(Error::Unsupported(format!("{}-bit samples", p[0])));
    }
    let height = usize::from(u16::from_be_bytes([p[1], p[2]]));
    let width = usize::from(u16::from_be_bytes([p[3], p[4]]));
    if height == 0 {
        return Err(Error::Unsupported("DNL-defined height".into()));
    }
    if width == 0 {
        return Err(Error::format(at + 3, "zero width"));
    }
    let nf = usize::from(p[5]);
    if nf != 3 {
        return Err(Error::Unsupported(format!("{nf} components (need YCbCr)")));
    }
    if p.len() < 6 + 3 * nf {
        return Err(Error::format(at, "truncated SOF component list"));
    }
    let components: Vec<FrameComponent> = (0..nf)
        .map(|i| {
            let c = &p[6 + 3 * i..9 + 3 * i];
            FrameComponent {
                id: c[0],
                h: c[1] >> 4,
                v: c[1] & 0x0F,
                tq: c[2] & 0x03,
            }
        })
        .collect();
    let factors: Vec<(u8, u8)> = components.iter().map(|c| (c.h, c.v)).collect();
    let mode = match factors.as_slice() {
        [(1, 1), (1, 1), (1, 1)] => SubsamplingMode::S444,
        [(2, 2), (1, 1), (1, 1)] => SubsamplingMode::S420,
        other => {
            return Err(Error::Unsupported(format!(
                "sampling factors {other:?} (only 4:4:4 and 4:2:0)"
            )))
        }
    };
    Ok(Frame {
        width,
        height,
        components,
        mode,
    })
}

fn decode_scan(
    data: &[u8],
    header: &[u8],
    at: usize,
    scan_start: usize,
    st: &mut State,
) -> Result<usize> {
    let frame = st
        .frame
        .as_ref()
        .ok_or_else(|| Error::format(at, "SOS before SOF"))?;
    let ns = usize::from(
        *header
            .first()
            .ok_or_else(|| Error::format(at, "empty SOS"))?,
    );
    if header.len() != 4 + 2 * ns {
        return Err(Error::format(at, "SOS length mismatch"));
    }
    if ns != 3 {
        return Err(Error::Unsupported(format!(
            "non-interleaved scan with {ns} components"
        )));
    }
    let (ss, se, a) = (header[1 + 2 * ns], header[2 + 2 * ns], header[3 + 2 * ns]);
    if ss != 0 || se != 63 || a != 0 {
        return Err(Error::Unsupported(
            "spectral selection / approximation".into(),
        ));
    }

    let (mx, my) = mcu_grid(frame.width, frame.height, frame.mode);
    let mut comps = Vec::with_capacity(3);
    let mut coders = Vec::with_capacity(3);
    for (i, fc) in frame.components.iter().enumerate() {
        let sel = &header[1 + 2 * i..3 + 2 * i];
        if sel[0] != fc.id {
            return Err(Error::Unsupported(
                "scan component order differs from frame".into(),
            ));
        }
        let (td, ta) = (usize::from(sel[1] >> 4), usize::from(sel[1] & 0x0F));
        let dc = st.dc.get(td).and_then(|t| t.as_ref());
        let ac = st.ac.get(ta).and_then(|t| t.as_ref());
        let (Some(dc), Some(ac)) = (dc, ac) else {
            return Err(Error::format(
                at,
                format!("component {} uses undefined Huffman table", fc.id),
            ));
        };
        coders.push((Decoder::new(dc)?, Decoder::new(ac)?));
        let table = st.quant[usize::from(fc.tq)]
            .ok_or_else(|| Error::format(at, format!("quant table {} undefined", fc.tq)))?;
        let class = if i == 0 {
            TableClass::Luma
        } else {
            TableClass::Chroma
        };
        let (bw, bh) = (mx * usize::from(fc.h), my * usize::from(fc.v));
        comps.push(Component {
            id: fc.id,
            h_samp: fc.h,
            v_samp: fc.v,
            quant: QuantTable::from_zigzag(table, class)?,
            blocks_w: bw,
            blocks_h: bh,
            blocks: vec![[0i16; 64]; bw * bh],
        });
    }

    let mut r = BitReader::new(data, scan_start);
    let mut pred = [0i32; 3];
    let ri = usize::from(st.restart_interval);
    let total = mx * my;
    for mcu in 0..total {
        if ri > 0 && mcu > 0 && mcu % ri == 0 {
            r.restart(0xD0 + ((mcu / ri - 1) % 8) as u8)?;
            pred = [0; 3];
        }
        let (mcu_x, mcu_y) = (mcu % mx, mcu / mx);
        for (ci, comp) in comps.iter_mut().enumerate() {
            let (dc, ac) = &coders[ci];
            for v in 0..usize::from(comp.v_samp) {
                for h in 0..usize::from(comp.h_samp) {
                    let bx = mcu_x * usize::from(comp.h_samp) + h;
                    let by = mcu_y * usize::from(comp.v_samp) + v;
                    let idx = by * comp.blocks_w + bx;
                    decode_block(&mut r, dc, ac, &mut pred[ci], &mut comp.blocks[idx])
                        .map_err(|message| Error::Decode { mcu, message })?;
                }
            }
        }
        if r.overrun() {
            return Err(Error::Decode {
                mcu,
                message: "entropy-coded data ended early".into(),
            });
        }
    }
    let end = r.end_of_scan();

    let comps: [Component; 3] = comps.try_into().expect("three components");
    let mut huffman: Vec<HuffmanSpec> = st.dc.iter().chain(&st.ac).flatten().cloned().collect();
    huffman.sort_by_key(|s| (s.kind == TableKind::Ac, s.id));
    st.coded = Some(CodedImage {
        width: frame.width,
        height: frame.height,
        mode: frame.mode,
        components: comps,
        huffman,
        restart_interval: st.restart_interval,
    });
    Ok(end)
}

fn decode_block(
    r: &mut BitReader<'_>,
    dc: &Decoder,
    ac: &Decoder,
    pred: &mut i32,
    out: &mut CoefBlock,
) -> std::result::Result<(), String> {
    let s = dc.decode(r).ok_or("invalid DC Huffman code")?;
    if s > 11 {
        return Err(format!("DC category {s} out of range"));
    }
    *pred += r.receive_extend(u32::from(s));
    out[0] = i16::try_from(*pred).map_err(|_| "DC value overflow".to_string())?;
    let mut k = 1;
    while k < 64 {
        let rs = ac.decode(r).ok_or("invalid AC Huffman code")?;
        let (run, size) = (usize::from(rs >> 4), u32::from(rs & 0x0F));
        if size == 0 {
            if run == 15 {
                k += 16;
                continue;
            }
            break;
        }
        k += run;
        if k > 63 {
            return Err("AC run past end of block".into());
        }
        out[k] = r.receive_extend(size) as i16;
        k += 1;
    }
    if k > 64 {
        return Err("zero run past end of block".into());
    }
    Ok(())
}
