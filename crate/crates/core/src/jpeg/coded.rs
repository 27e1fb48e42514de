//! Quantized DCT representation of a baseline JPEG and the pixel-domain
//! transforms into and out of it.

use super::color::{self, Plane, Upsampling};
use super::dct::{fdct8x8, idct8x8};
use super::huffman::HuffmanSpec;
use super::quant::{estimate_quality_pair, standard_table, QuantTable, TableClass};
use super::tables::ZIGZAG;
use super::SubsamplingMode;
use crate::error::{Error, Result};
use crate::image::RasterImage;

/// One 8x8 block of quantized coefficients in zigzag order. DC is absolute,
/// not differenced.
pub type CoefBlock = [i16; 64];

/// A color component's coefficient plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: u8,
    pub h_samp: u8,
    pub v_samp: u8,
    pub quant: QuantTable,
    /// Block counts, padded to whole MCUs.
    pub blocks_w: usize,
    pub blocks_h: usize,
    /// Row-major blocks.
    pub blocks: Vec<CoefBlock>,
}

impl Component {
    pub fn block(&self, bx: usize, by: usize) -> &CoefBlock {
        &self.blocks[by * self.blocks_w + bx]
    }
}

/// A parsed (or freshly transformed) baseline JPEG without pixel
/// reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedImage {
    pub width: usize,
    pub height: usize,
    pub mode: SubsamplingMode,
    /// Y, Cb, Cr.
    pub components: [Component; 3],
    /// Huffman tables found in the source stream. Serialization always uses
    /// the Annex K tables.
    pub huffman: Vec<HuffmanSpec>,
    pub restart_interval: u16,
}

impl CodedImage {
    pub fn luma_table(&self) -> &QuantTable {
        &self.components[0].quant
    }

    pub fn chroma_table(&self) -> &QuantTable {
        &self.components[1].quant
    }

    /// IJG quality estimate from the luma and Cb tables.
    pub fn estimated_quality(&self) -> u8 {
        estimate_quality_pair(self.luma_table(), self.chroma_table())
    }

    /// MCUs per row and per column.
    pub fn mcu_grid(&self) -> (usize, usize) {
        mcu_grid(self.width, self.height, self.mode)
    }
}

pub(crate) fn mcu_grid(width: usize, height: usize, mode: SubsamplingMode) -> (usize, usize) {
    let m = mode.mcu_size();
    (width.div_ceil(m), height.div_ceil(m))
}

fn level_shifted_block(plane: &Plane, bx: usize, by: usize) -> [f64; 64] {
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            out[y * 8 + x] = f64::from(plane.get(bx * 8 + x, by * 8 + y)) - 128.0;
        }
    }
    out
}

fn quantize(coefs: &[f64; 64], table: &QuantTable) -> CoefBlock {
    let q = table.zigzag();
    let mut out = [0i16; 64];
    for (k, &n) in ZIGZAG.iter().enumerate() {
        out[k] = (coefs[n] / f64::from(q[k])).round() as i16;
    }
    out
}

fn transform_plane(plane: &Plane, table: &QuantTable, id: u8, samp: u8) -> Component {
    let (bw, bh) = (plane.width / 8, plane.height / 8);
    let mut blocks = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            blocks.push(quantize(
                &fdct8x8(&level_shifted_block(plane, bx, by)),
                table,
            ));
        }
    }
    Component {
        id,
        h_samp: samp,
        v_samp: samp,
        quant: table.clone(),
        blocks_w: bw,
        blocks_h: bh,
        blocks,
    }
}

/// Encoder front end: color conversion, subsampling, block DCT and
/// quantization with the Annex K tables scaled to `quality`.
pub fn forward(img: &RasterImage, quality: u8, mode: SubsamplingMode) -> Result<CodedImage> {
    let luma = standard_table(TableClass::Luma, quality)?;
    let chroma = standard_table(TableClass::Chroma, quality)?;
    forward_with_tables(img, mode, &luma, &chroma)
}

pub fn forward_with_tables(
    img: &RasterImage,
    mode: SubsamplingMode,
    luma: &QuantTable,
    chroma: &QuantTable,
) -> Result<CodedImage> {
    let (mx, my) = mcu_grid(img.width(), img.height(), mode);
    let m = mode.mcu_size();
    let (pw, ph) = (mx * m, my * m);
    let [y, cb, cr] = color::rgb_to_ycbcr(img).map(|p| p.pad_edges(pw, ph));
    let cb = color::subsample_chroma(&cb, mode);
    let cr = color::subsample_chroma(&cr, mode);
    let luma_samp = match mode {
        SubsamplingMode::S444 => 1,
        SubsamplingMode::S420 => 2,
    };
    let luma = luma.clone().with_class(TableClass::Luma);
    let chroma = chroma.clone().with_class(TableClass::Chroma);
    Ok(CodedImage {
        width: img.width(),
        height: img.height(),
        mode,
        components: [
            transform_plane(&y, &luma, 1, luma_samp),
            transform_plane(&cb, &chroma, 2, 1),
            transform_plane(&cr, &chroma, 3, 1),
        ],
        huffman: Vec::new(),
        restart_interval: 0,
    })
}

fn reconstruct_plane(c: &Component) -> Plane {
    let q = c.quant.zigzag();
    let w = c.blocks_w * 8;
    let mut data = vec![0u8; w * c.blocks_h * 8];
    for by in 0..c.blocks_h {
        for bx in 0..c.blocks_w {
            let blk = c.block(bx, by);
            let mut coefs = [0.0; 64];
            for (k, &n) in ZIGZAG.iter().enumerate() {
                coefs[n] = f64::from(blk[k]) * f64::from(q[k]);
            }
            let px = idct8x8(&coefs);
            for y in 0..8 {
                for x in 0..8 {
                    let v = (px[y * 8 + x] + 128.0).round().clamp(0.0, 255.0) as u8;
                    data[(by * 8 + y) * w + bx * 8 + x] = v;
                }
            }
        }
    }
    Plane {
        width: w,
        height: c.blocks_h * 8,
        data,
    }
}

/// Decoder back end: dequantize, inverse DCT, upsample chroma, convert to
/// RGB and crop the MCU padding.
pub fn reconstruct(coded: &CodedImage, upsampling: Upsampling) -> Result<RasterImage> {
    let (w, h) = (coded.width, coded.height);
    let [y, cb, cr] = [0, 1, 2].map(|i| reconstruct_plane(&coded.components[i]));
    if y.width < w || y.height < h {
        return Err(Error::invalid("luma plane smaller than the frame"));
    }
    let y = y.crop(w, h);
    let cb = color::upsample_chroma_with(&cb, coded.mode, w, h, upsampling)?;
    let cr = color::upsample_chroma_with(&cr, coded.mode, w, h, upsampling)?;
    color::ycbcr_to_rgb(&[y, cb, cr])
}
