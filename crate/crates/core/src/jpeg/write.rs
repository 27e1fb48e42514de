//! Baseline JFIF serialization.

use super::bits::BitWriter;
use super::coded::{CodedImage, CoefBlock};
use super::huffman::{category, magnitude_bits, Encoder, HuffmanSpec, TableKind};
use super::markers::*;
use crate::error::{Error, Result};

/// Baseline coefficient limits for 8-bit samples: absolute DC in
/// -1024..=1023 keeps differences in category 11, AC stays in category 10.
const DC_RANGE: (i32, i32) = (-1024, 1023);
const AC_LIMIT: i32 = 1023;

/// The 18-byte minimal APP0 JFIF 1.01 segment (no thumbnail, 1:1 aspect).
pub const JFIF_APP0: [u8; 18] = [
    0xFF, APP0, 0x00, 0x10, b'J', b'F', b'I', b'F', 0x00, 0x01, 0x01, 0x00, 0x00, 0x01, 0x00, 0x01,
    0x00, 0x00,
];

fn segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) -> Result<()> {
    let len = u16::try_from(payload.len() + 2)
        .map_err(|_| Error::invalid("marker segment longer than 65535 bytes"))?;
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(payload);
    Ok(())
}

/// Writes `coded` as a baseline sequential JFIF stream using the Annex K
/// Huffman tables and no restart markers.
pub fn serialize(coded: &CodedImage) -> Result<Vec<u8>> {
    let width = u16::try_from(coded.width).map_err(|_| Error::invalid("width exceeds 65535"))?;
    let height = u16::try_from(coded.height).map_err(|_| Error::invalid("height exceeds 65535"))?;

    let mut out = Vec::new();
    out.extend_from_slice(&[0xFF, SOI]);
    out.extend_from_slice(&JFIF_APP0);

    // Y uses table 0; Cb and Cr share table 1 unless they differ.
    let [y, cb, cr] = &coded.components;
    let cr_table = if cr.quant.zigzag() == cb.quant.zigzag() {
        1
    } else {
        2
    };
    let mut dqt = Vec::new();
    for (id, table) in [(0u8, &y.quant), (1, &cb.quant)]
        .into_iter()
        .chain((cr_table == 2).then_some((2u8, &cr.quant)))
    {
        dqt.push(id);
        dqt.extend(table.zigzag().iter().map(|&q| q as u8));
    }
    segment(&mut out, DQT, &dqt)?;

    let mut sof = vec![8];
    sof.extend_from_slice(&height.to_be_bytes());
    sof.extend_from_slice(&width.to_be_bytes());
    sof.push(3);
    for (i, c) in coded.components.iter().enumerate() {
        let tq = [0u8, 1, cr_table][i];
        sof.extend_from_slice(&[c.id, (c.h_samp << 4) | c.v_samp, tq]);
    }
    segment(&mut out, SOF0, &sof)?;

    let specs = [
        HuffmanSpec::standard(TableKind::Dc, false),
        HuffmanSpec::standard(TableKind::Ac, false),
        HuffmanSpec::standard(TableKind::Dc, true),
        HuffmanSpec::standard(TableKind::Ac, true),
    ];
    let mut dht = Vec::new();
    for s in &specs {
        let class = match s.kind {
            TableKind::Dc => 0,
            TableKind::Ac => 1,
        };
        dht.push((class << 4) | s.id);
        dht.extend_from_slice(&s.counts);
        dht.extend_from_slice(&s.symbols);
    }
    segment(&mut out, DHT, &dht)?;

    let mut sos = vec![3];
    for (i, c) in coded.components.iter().enumerate() {
        let t = u8::from(i > 0);
        sos.extend_from_slice(&[c.id, (t << 4) | t]);
    }
    sos.extend_from_slice(&[0, 63, 0]);
    segment(&mut out, SOS, &sos)?;

    let coders = [
        (Encoder::new(&specs[0])?, Encoder::new(&specs[1])?),
        (Encoder::new(&specs[2])?, Encoder::new(&specs[3])?),
    ];
    out.extend(encode_scan(coded, &coders)?);
    out.extend_from_slice(&[0xFF, EOI]);
    Ok(out)
}

fn encode_scan(coded: &CodedImage, coders: &[(Encoder, Encoder); 2]) -> Result<Vec<u8>> {
    let mut w = BitWriter::new();
    let mut pred = [0i32; 3];
    let (mx, my) = coded.mcu_grid();
    for mcu_y in 0..my {
        for mcu_x in 0..mx {
            for (ci, c) in coded.components.iter().enumerate() {
                let (dc, ac) = &coders[usize::from(ci > 0)];
                for v in 0..usize::from(c.v_samp) {
                    for h in 0..usize::from(c.h_samp) {
                        let bx = mcu_x * usize::from(c.h_samp) + h;
                        let by = mcu_y * usize::from(c.v_samp) + v;
                        encode_block(&mut w, c.block(bx, by), &mut pred[ci], dc, ac)?;
                    }
                }
            }
        }
    }
    Ok(w.finish())
}

fn encode_block(
    w: &mut BitWriter,
    block: &CoefBlock,
    pred: &mut i32,
    dc: &Encoder,
    ac: &Encoder,
) -> Result<()> {
    let value = i32::from(block[0]).clamp(DC_RANGE.0, DC_RANGE.1);
    let diff = value - *pred;
    *pred = value;
    let cat = category(diff);
    dc.emit(w, cat as u8)?;
    w.put(magnitude_bits(diff), cat);

    let mut run = 0u8;
    for &coef in &block[1..] {
        let v = i32::from(coef).clamp(-AC_LIMIT, AC_LIMIT);
        if v == 0 {
            run += 1;
            continue;
        }
        while run >= 16 {
            ac.emit(w, 0xF0)?;
            run -= 16;
        }
        let cat = category(v);
        ac.emit(w, (run << 4) | cat as u8)?;
        w.put(magnitude_bits(v), cat);
        run = 0;
    }
    if run > 0 {
        ac.emit(w, 0x00)?;
    }
    Ok(())
}
