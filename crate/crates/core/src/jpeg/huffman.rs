//! Canonical Huffman tables as carried in DHT segments.

use super::bits::{BitReader, BitWriter};
use super::tables::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableKind {
    Dc,
    Ac,
}

/// A DHT table: code counts per length plus symbols in code order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanSpec {
    pub kind: TableKind,
    pub id: u8,
    pub counts: [u8; 16],
    pub symbols: Vec<u8>,
}

impl HuffmanSpec {
    pub fn standard(kind: TableKind, chroma: bool) -> Self {
        let (counts, symbols): ([u8; 16], &[u8]) = match (kind, chroma) {
            (TableKind::Dc, false) => (DC_LUMA_BITS, &DC_VALUES),
            (TableKind::Dc, true) => (DC_CHROMA_BITS, &DC_VALUES),
            (TableKind::Ac, false) => (AC_LUMA_BITS, &AC_LUMA_VALUES),
            (TableKind::Ac, true) => (AC_CHROMA_BITS, &AC_CHROMA_VALUES),
        };
        HuffmanSpec {
            kind,
            id: u8::from(chroma),
            counts,
            symbols: symbols.to_vec(),
        }
    }

    /// Codes in symbol order: `(code, length)` pairs.
    fn canonical_codes(&self) -> Result<Vec<(u16, u8)>> {
        let mut codes = Vec::with_capacity(self.symbols.len());
        let mut code: u32 = 0;
        for (i, &n) in self.counts.iter().enumerate() {
            let len = i as u8 + 1;
            for _ in 0..n {
                if code >= 1 << len {
                    return Err(Error::invalid("over-subscribed Huffman table"));
                }
                codes.push((code as u16, len));
                code += 1;
            }
            code <<= 1;
        }
        Ok(codes)
    }
}

/// Symbol -> code map for encoding.
pub(crate) struct Encoder {
    table: [(u16, u8); 256],
}

impl Encoder {
    pub fn new(spec: &HuffmanSpec) -> Result<Self> {
        let mut table = [(0u16, 0u8); 256];
        for (&sym, code) in spec.symbols.iter().zip(spec.canonical_codes()?) {
            table[sym as usize] = code;
        }
        Ok(Encoder { table })
    }

    pub fn emit(&self, w: &mut BitWriter, symbol: u8) -> Result<()> {
        let (code, len) = self.table[symbol as usize];
        if len == 0 {
            return Err(Error::invalid(format!(
                "symbol {symbol:#04x} has no Huffman code"
            )));
        }
        w.put(u32::from(code), u32::from(len));
        Ok(())
    }
}

/// Canonical decoder using per-length max codes.
pub(crate) struct Decoder {
    maxcode: [i32; 18],
    valptr: [i32; 17],
    mincode: [i32; 17],
    symbols: Vec<u8>,
}

impl Decoder {
    pub fn new(spec: &HuffmanSpec) -> Result<Self> {
        spec.canonical_codes()?;
        let mut maxcode = [-1i32; 18];
        let mut valptr = [0i32; 17];
        let mut mincode = [0i32; 17];
        let mut code = 0i32;
        let mut k = 0i32;
        for len in 1..=16 {
            let n = i32::from(spec.counts[len - 1]);
            if n > 0 {
                valptr[len] = k;
                mincode[len] = code;
                code += n;
                k += n;
                maxcode[len] = code - 1;
            }
            code <<= 1;
        }
        maxcode[17] = i32::MAX;
        Ok(Decoder {
            maxcode,
            valptr,
            mincode,
            symbols: spec.symbols.clone(),
        })
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Option<u8> {
        let peek = r.peek(16) as i32;
        for len in 1..=16usize {
            let code = peek >> (16 - len);
            if code <= self.maxcode[len] {
                r.consume(len as u32);
                let idx = self.valptr[len] + code - self.mincode[len];
                return self.symbols.get(idx as usize).copied();
            }
        }
        None
    }
}

/// Magnitude category: number of bits needed for `|v|`.
#[inline]
pub(crate) fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

/// The `category(v)` low bits appended after a symbol.
#[inline]
pub(crate) fn magnitude_bits(v: i32) -> u32 {
    if v < 0 {
        (v - 1) as u32 & ((1u32 << category(v)) - 1)
    } else {
        v as u32
    }
}
