//! Requantization in the DCT domain: coefficients are rescaled to a new
//! quantization table without an inverse transform.

use super::coded::CodedImage;
use super::quant::standard_table;
use super::write::serialize;
use crate::error::Result;

/// `round_half_away_from_zero(c * q_old / q_new)` in exact integer arithmetic.
pub fn requantize_coefficient(c: i16, q_old: u16, q_new: u16) -> i16 {
    let n = i64::from(c.unsigned_abs()) * i64::from(q_old);
    let d = i64::from(q_new);
    let m = (2 * n + d) / (2 * d);
    let m = m.min(i64::from(i16::MAX)) as i16;
    if c < 0 {
        -m
    } else {
        m
    }
}

/// Rescales every coefficient to the Annex K tables at `quality`. The
/// subsampling mode and block layout are unchanged.
pub fn requantize_coded(coded: &CodedImage, quality: u8) -> Result<CodedImage> {
    let mut out = coded.clone();
    for comp in out.components.iter_mut() {
        let new = standard_table(comp.quant.class(), quality)?;
        let (old_q, new_q) = (*comp.quant.zigzag(), *new.zigzag());
        for block in comp.blocks.iter_mut() {
            for k in 0..64 {
                block[k] = requantize_coefficient(block[k], old_q[k], new_q[k]);
            }
        }
        comp.quant = new;
    }
    out.huffman.clear();
    out.restart_interval = 0;
    Ok(out)
}

/// Requantizes and re-entropy-codes to a JFIF stream.
pub fn requantize(coded: &CodedImage, quality: u8) -> Result<Vec<u8>> {
    serialize(&requantize_coded(coded, quality)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_symmetric() {
        assert_eq!(requantize_coefficient(3, 10, 4), 8); // 7.5 -> 8
        assert_eq!(requantize_coefficient(-3, 10, 4), -8);
        assert_eq!(requantize_coefficient(5, 3, 7), 2); // 2.14
        assert_eq!(requantize_coefficient(-5, 3, 7), -2);
        assert_eq!(requantize_coefficient(0, 9, 1), 0);
        assert_eq!(requantize_coefficient(17, 6, 6), 17);
    }
}
