//! Quantization tables and IJG quality scaling.

use super::tables::{CHROMA_BASE, LUMA_BASE, ZIGZAG};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableClass {
    Luma,
    Chroma,
}

impl TableClass {
    /// Annex K base table for this class, natural order.
    pub fn base(self) -> &'static [u16; 64] {
        match self {
            TableClass::Luma => &LUMA_BASE,
            TableClass::Chroma => &CHROMA_BASE,
        }
    }
}

/// 64 quantizer steps in zigzag order, each in `1..=255`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantTable {
    zigzag: [u16; 64],
    class: TableClass,
}

impl QuantTable {
    pub fn from_zigzag(zigzag: [u16; 64], class: TableClass) -> Result<Self> {
        if let Some(k) = zigzag.iter().position(|&q| !(1..=255).contains(&q)) {
            return Err(Error::invalid(format!(
                "quantizer {} at zigzag index {k} outside 1..=255",
                zigzag[k]
            )));
        }
        Ok(QuantTable { zigzag, class })
    }

    pub fn from_natural(natural: &[u16; 64], class: TableClass) -> Result<Self> {
        let mut zz = [0u16; 64];
        for (k, &n) in ZIGZAG.iter().enumerate() {
            zz[k] = natural[n];
        }
        QuantTable::from_zigzag(zz, class)
    }

    /// Steps in zigzag order.
    pub fn zigzag(&self) -> &[u16; 64] {
        &self.zigzag
    }

    /// Steps in natural row-major order.
    pub fn natural(&self) -> [u16; 64] {
        let mut out = [0u16; 64];
        for (k, &n) in ZIGZAG.iter().enumerate() {
            out[n] = self.zigzag[k];
        }
        out
    }

    pub fn class(&self) -> TableClass {
        self.class
    }

    pub fn with_class(mut self, class: TableClass) -> Self {
        self.class = class;
        self
    }
}

fn check_quality(quality: u8) -> Result<()> {
    if (1..=100).contains(&quality) {
        Ok(())
    } else {
        Err(Error::invalid(format!("quality {quality} outside 1..=100")))
    }
}

/// IJG percentage scaling for a quality factor.
pub fn quality_scale(quality: u8) -> Result<u32> {
    check_quality(quality)?;
    let q = u32::from(quality);
    Ok(if q < 50 { 5000 / q } else { 200 - 2 * q })
}

/// Scales a natural-order base table: `clamp((base * scale + 50) / 100, 1, 255)`.
pub fn quality_to_table(base: &[u16; 64], quality: u8, class: TableClass) -> Result<QuantTable> {
    let scale = quality_scale(quality)?;
    let mut natural = [0u16; 64];
    for (out, &b) in natural.iter_mut().zip(base) {
        *out = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u16;
    }
    QuantTable::from_natural(&natural, class)
}

/// The standard table for `class` at `quality`.
pub fn standard_table(class: TableClass, quality: u8) -> Result<QuantTable> {
    quality_to_table(class.base(), quality, class)
}

fn l1(a: &[u16; 64], b: &[u16; 64]) -> u32 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| u32::from(x.abs_diff(y)))
        .sum()
}

fn best_quality(mut distance: impl FnMut(u8) -> u32) -> u8 {
    let mut best = (u32::MAX, 0u8);
    // iterating downward makes strict improvement keep the larger quality on ties
    for q in (1..=100u8).rev() {
        let d = distance(q);
        if d < best.0 {
            best = (d, q);
        }
    }
    best.1
}

/// Quality whose IJG-scaled base table is nearest in L1 distance; ties go
/// to the larger quality. Assumes the table was derived from the Annex K
/// base of its class.
pub fn estimate_quality(table: &QuantTable) -> u8 {
    let candidates = candidate_tables(table.class);
    best_quality(|q| l1(table.zigzag(), candidates[q as usize - 1].zigzag()))
}

/// Joint estimate over a luma and a chroma table (sum of L1 distances).
pub fn estimate_quality_pair(luma: &QuantTable, chroma: &QuantTable) -> u8 {
    let lc = candidate_tables(TableClass::Luma);
    let cc = candidate_tables(TableClass::Chroma);
    best_quality(|q| {
        let i = q as usize - 1;
        l1(luma.zigzag(), lc[i].zigzag()) + l1(chroma.zigzag(), cc[i].zigzag())
    })
}

fn candidate_tables(class: TableClass) -> &'static [QuantTable] {
    use std::sync::OnceLock;
    static LUMA: OnceLock<Vec<QuantTable>> = OnceLock::new();
    static CHROMA: OnceLock<Vec<QuantTable>> = OnceLock::new();
    let cell = match class {
        TableClass::Luma => &LUMA,
        TableClass::Chroma => &CHROMA,
    };
    cell.get_or_init(|| {
        (1..=100)
            .map(|q| standard_table(class, q).expect("quality in range"))
            .collect()
    })
}
