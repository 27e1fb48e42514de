//! Baseline sequential JPEG: encoder, decoder, parser to quantized DCT
//! coefficients, DCT-domain requantization and metadata stripping.
//!
//! Only 4:4:4 and 4:2:0 YCbCr frames with Huffman coding are handled.
//! The encoder always writes the Annex K quantization bases scaled by the
//! IJG quality rule and the Annex K typical Huffman tables.

mod bits;
mod coded;
mod color;
mod dct;
mod huffman;
pub mod markers;
mod metadata;
mod parse;
mod quant;
mod tables;
mod transcode;
mod write;

use std::fmt;
use std::str::FromStr;

pub use coded::{forward, forward_with_tables, reconstruct, CodedImage, CoefBlock, Component};
pub use color::{
    rgb_to_ycbcr, subsample_chroma, upsample_chroma, upsample_chroma_with, ycbcr_to_rgb, Plane,
    Upsampling,
};
pub use dct::{fdct8x8, idct8x8};
pub use huffman::{HuffmanSpec, TableKind};
pub use metadata::{insert_segment, strip_metadata};
pub use parse::parse;
pub use quant::{
    estimate_quality, estimate_quality_pair, quality_scale, quality_to_table, standard_table,
    QuantTable, TableClass,
};
pub use tables::{CHROMA_BASE, LUMA_BASE, ZIGZAG};
pub use transcode::{requantize, requantize_coded, requantize_coefficient};
pub use write::{serialize, JFIF_APP0};

use crate::error::{Error, Result};
use crate::image::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubsamplingMode {
    /// Full-resolution chroma.
    S444,
    /// Chroma halved horizontally and vertically.
    S420,
}

impl SubsamplingMode {
    pub const ALL: [SubsamplingMode; 2] = [SubsamplingMode::S444, SubsamplingMode::S420];

    /// Edge of the minimum coded unit in pixels.
    pub fn mcu_size(self) -> usize {
        match self {
            SubsamplingMode::S444 => 8,
            SubsamplingMode::S420 => 16,
        }
    }

    /// Short form used in CSV and CLI flags.
    pub fn short_name(self) -> &'static str {
        match self {
            SubsamplingMode::S444 => "444",
            SubsamplingMode::S420 => "420",
        }
    }
}

impl fmt::Display for SubsamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsamplingMode::S444 => "4:4:4",
            SubsamplingMode::S420 => "4:2:0",
        })
    }
}

impl FromStr for SubsamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "444" | "4:4:4" => Ok(SubsamplingMode::S444),
            "420" | "4:2:0" => Ok(SubsamplingMode::S420),
            other => Err(Error::invalid(format!(
                "unknown subsampling {other:?} (expected 444 or 420)"
            ))),
        }
    }
}

/// Encodes `img` as a baseline JFIF stream.
pub fn encode(img: &RasterImage, quality: u8, mode: SubsamplingMode) -> Result<Vec<u8>> {
    serialize(&forward(img, quality, mode)?)
}

/// Decodes with the default (cross-block bilinear) chroma upsampling.
pub fn decode(data: &[u8]) -> Result<RasterImage> {
    decode_with(data, Upsampling::default())
}

pub fn decode_with(data: &[u8], upsampling: Upsampling) -> Result<RasterImage> {
    reconstruct(&parse(data)?, upsampling)
}
