//! Block rotation/inversion (the dihedral group of the square) and
//! color component shuffling.

use crate::error::{Error, Result};

/// One of the eight symmetries of a square block. Rotations are
/// counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Dihedral {
    Identity = 0,
    Rot90 = 1,
    Rot180 = 2,
    Rot270 = 3,
    FlipHorizontal = 4,
    FlipVertical = 5,
    Transpose = 6,
    AntiTranspose = 7,
}

impl Dihedral {
    pub const ALL: [Dihedral; 8] = [
        Dihedral::Identity,
        Dihedral::Rot90,
        Dihedral::Rot180,
        Dihedral::Rot270,
        Dihedral::FlipHorizontal,
        Dihedral::FlipVertical,
        Dihedral::Transpose,
        Dihedral::AntiTranspose,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        Dihedral::ALL
            .get(code as usize)
            .copied()
            .ok_or_else(|| Error::invalid(format!("geometry code {code} not in 0..8")))
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn inverse(self) -> Self {
        match self {
            Dihedral::Rot90 => Dihedral::Rot270,
            Dihedral::Rot270 => Dihedral::Rot90,
            other => other,
        }
    }

    /// Whether the element swaps the block's axes.
    pub fn swaps_axes(self) -> bool {
        matches!(
            self,
            Dihedral::Rot90 | Dihedral::Rot270 | Dihedral::Transpose | Dihedral::AntiTranspose
        )
    }

    /// Source coordinate feeding output `(x, y)` of an `n x n` block.
    #[inline]
    fn source(self, x: usize, y: usize, w: usize, h: usize) -> (usize, usize) {
        let (xm, ym) = (w - 1 - x, h - 1 - y);
        match self {
            Dihedral::Identity => (x, y),
            Dihedral::Rot90 => (ym, x),
            Dihedral::Rot180 => (xm, ym),
            Dihedral::Rot270 => (y, xm),
            Dihedral::FlipHorizontal => (xm, y),
            Dihedral::FlipVertical => (x, ym),
            Dihedral::Transpose => (y, x),
            Dihedral::AntiTranspose => (ym, xm),
        }
    }
}

/// A `width x height` tile of RGB pixels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Block {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if pixels.len() != width * height || width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "block of {}x{} needs {} pixels, got {}",
                width,
                height,
                width * height,
                pixels.len()
            )));
        }
        Ok(Block {
            width,
            height,
            pixels,
        })
    }
}

/// Applies the dihedral element `code` (or its inverse) to a block.
pub fn transform_block_geometry(block: &Block, code: u8, inverse: bool) -> Result<Block> {
    let mut g = Dihedral::from_code(code)?;
    if inverse {
        g = g.inverse();
    }
    if g.swaps_axes() && block.width != block.height {
        return Err(Error::invalid(format!(
            "geometry code {code} needs a square block, got {}x{}",
            block.width, block.height
        )));
    }
    let (w, h) = (block.width, block.height);
    let mut pixels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = g.source(x, y, w, h);
            pixels.push(block.pixels[sy * w + sx]);
        }
    }
    Ok(Block {
        width: w,
        height: h,
        pixels,
    })
}

/// In-place variant over a square tile using a scratch buffer.
pub(crate) fn apply_square(
    pixels: &mut [[u8; 3]],
    n: usize,
    g: Dihedral,
    scratch: &mut Vec<[u8; 3]>,
) {
    if g == Dihedral::Identity {
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(pixels);
    for y in 0..n {
        for x in 0..n {
            let (sx, sy) = g.source(x, y, n, n);
            pixels[y * n + x] = scratch[sy * n + sx];
        }
    }
}

/// Channel orders in lexicographic order: RGB, RBG, GRB, GBR, BRG, BGR.
pub const CHANNEL_ORDERS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Output pixel takes channel `order[c]` of the input at position `c`.
#[inline]
pub fn shuffle_channels(p: [u8; 3], code: u8, inverse: bool) -> [u8; 3] {
    let order = CHANNEL_ORDERS[code as usize];
    if inverse {
        let mut out = [0u8; 3];
        for c in 0..3 {
            out[order[c]] = p[c];
        }
        out
    } else {
        [p[order[0]], p[order[1]], p[order[2]]]
    }
}
