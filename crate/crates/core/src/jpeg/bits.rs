//! Entropy-coded segment bit I/O with 0xFF byte stuffing.

use crate::error::{Error, Result};

pub(crate) struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter {
            out: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    /// Appends the low `len` bits of `bits`, most significant first.
    pub fn put(&mut self, bits: u32, len: u32) {
        debug_assert!(len <= 16);
        if len == 0 {
            return;
        }
        self.acc = (self.acc << len) | (bits & ((1 << len) - 1));
        self.nbits += len;
        while self.nbits >= 8 {
            let byte = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
        }
        self.acc &= (1 << self.nbits) - 1;
    }

    /// Pads the final partial byte with one bits.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1 << pad) - 1, pad);
        }
        self.out
    }
}

/// Reads bits from an entropy-coded segment, unstuffing 0xFF00 and stopping
/// at markers.
pub(crate) struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
    /// Marker found in the stream (second byte), not yet consumed by the caller.
    marker: Option<u8>,
    /// Zero bits fed after the end of real data, always at the low end of `acc`.
    pad_bits: u32,
    overrun: bool,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8], pos: usize) -> Self {
        BitReader {
            data,
            pos,
            acc: 0,
            nbits: 0,
            marker: None,
            pad_bits: 0,
            overrun: false,
        }
    }

    fn fill(&mut self) {
        while self.nbits <= 56 {
            let before = self.pos;
            let byte = if self.marker.is_some() {
                // past a marker: feed zeros, corrupt streams are caught by
                // Huffman lookup or by the MCU count
                0
            } else {
                match self.data.get(self.pos) {
                    None => 0,
                    Some(&0xFF) => match self.data.get(self.pos + 1) {
                        Some(0x00) => {
                            self.pos += 2;
                            0xFF
                        }
                        Some(&m) => {
                            self.marker = Some(m);
                            0
                        }
                        None => {
                            self.pos += 1;
                            0
                        }
                    },
                    Some(&b) => {
                        self.pos += 1;
                        b
                    }
                }
            };
            if self.pos == before {
                self.pad_bits += 8;
            }
            self.acc |= u64::from(byte) << (56 - self.nbits);
            self.nbits += 8;
        }
    }

    pub fn peek(&mut self, len: u32) -> u32 {
        if self.nbits < len {
            self.fill();
        }
        (self.acc >> (64 - len)) as u32
    }

    pub fn consume(&mut self, len: u32) {
        self.acc <<= len;
        self.nbits -= len;
        if self.nbits < self.pad_bits {
            self.overrun = true;
            self.pad_bits = self.nbits;
        }
    }

    /// Whether decoding has consumed bits beyond the end of the segment.
    pub fn overrun(&self) -> bool {
        self.overrun
    }

    pub fn bits(&mut self, len: u32) -> u32 {
        if len == 0 {
            return 0;
        }
        let v = self.peek(len);
        self.consume(len);
        v
    }

    /// Reads `len` magnitude bits and sign-extends per the JPEG convention.
    pub fn receive_extend(&mut self, len: u32) -> i32 {
        if len == 0 {
            return 0;
        }
        let v = self.bits(len) as i32;
        if v < 1 << (len - 1) {
            v - (1 << len) + 1
        } else {
            v
        }
    }

    /// Drops buffered bits and consumes an expected RSTn marker.
    pub fn restart(&mut self, expected: u8) -> Result<()> {
        self.acc = 0;
        self.nbits = 0;
        self.pad_bits = 0;
        if self.marker.is_none() {
            // skip fill bytes up to the marker
            while self.pos < self.data.len() && self.data[self.pos] != 0xFF {
                self.pos += 1;
            }
            while self.data.get(self.pos) == Some(&0xFF)
                && self.data.get(self.pos + 1) == Some(&0xFF)
            {
                self.pos += 1;
            }
            if let Some(&m) = self.data.get(self.pos + 1) {
                self.marker = Some(m);
            }
        }
        match self.marker {
            Some(m) if m == expected => {
                self.pos += 2;
                self.marker = None;
                Ok(())
            }
            Some(m) => Err(Error::format(
                self.pos,
                format!("expected RST{} marker, found FF{m:02X}", expected - 0xD0),
            )),
            None => Err(Error::format(self.pos, "missing restart marker")),
        }
    }

    /// Byte offset of the first marker after the scan data.
    pub fn end_of_scan(&mut self) -> usize {
        if self.marker.is_none() {
            while self.pos + 1 < self.data.len()
                && !(self.data[self.pos] == 0xFF
                    && self.data[self.pos + 1] != 0x00
                    && !(0xD0..=0xD7).contains(&self.data[self.pos + 1]))
            {
                self.pos += 1;
            }
        }
        while self.data.get(self.pos) == Some(&0xFF) && self.data.get(self.pos + 1) == Some(&0xFF) {
            self.pos += 1;
        }
        self.pos
    }
}
