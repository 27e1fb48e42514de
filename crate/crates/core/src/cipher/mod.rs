//! Block scrambling image encryption.
//!
//! The image is split into square blocks, then four keyed steps are applied
//! in order:
//!
//! 1. block permutation (subkey K1),
//! 2. per-block rotation/inversion, one of the eight symmetries of the
//!    square (K2),
//! 3. per-block negative-positive transform `p -> p ^ 255` (K3),
//! 4. per-block color component shuffle (K4).
//!
//! Every subkey is shared by the three color components. Decryption
//! regenerates the same key streams and undoes the steps in reverse order.
//! The permutation maps destination block index to source block index;
//! blocks are numbered row-major.

mod geometry;
mod keystream;

use std::fmt;
use std::str::FromStr;

pub use geometry::{shuffle_channels, transform_block_geometry, Block, Dihedral, CHANNEL_ORDERS};
pub use keystream::{mix, KeyStream};

use crate::error::{Error, Result};
use crate::image::{BlockGrid, RasterImage, MAX_SAMPLE};

/// Default block edge in pixels.
pub const DEFAULT_BLOCK: usize = 16;

/// The four independent 64-bit subkeys.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EtcKey {
    pub k1: u64,
    pub k2: u64,
    pub k3: u64,
    pub k4: u64,
}

impl fmt::Debug for EtcKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EtcKey(..)")
    }
}

impl EtcKey {
    pub fn new(k1: u64, k2: u64, k3: u64, k4: u64) -> Self {
        EtcKey { k1, k2, k3, k4 }
    }

    /// Expands a single master value: subkey `i` is the first SplitMix64
    /// output of a stream seeded with `master ^ i`, for tags 1 to 4.
    pub fn from_master(master: u64) -> Self {
        let sub = |tag: u64| KeyStream::new(master ^ tag).next_u64();
        EtcKey::new(sub(1), sub(2), sub(3), sub(4))
    }

    pub fn subkeys(&self) -> [u64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }

    /// Renders the ASCII key file: `K1=<16 hex digits>` through `K4=...`.
    pub fn to_key_file(&self) -> String {
        self.subkeys()
            .iter()
            .enumerate()
            .map(|(i, k)| format!("K{}={k:016x}\n", i + 1))
            .collect()
    }
}

impl FromStr for EtcKey {
    type Err = Error;

    /// Parses the key file format. Blank lines are ignored and each of
    /// `K1`..`K4` must appear exactly once.
    fn from_str(s: &str) -> Result<Self> {
        let mut keys: [Option<u64>; 4] = [None; 4];
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let at = offset;
            offset += line.len();
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let (name, value) = text
                .split_once('=')
                .ok_or_else(|| Error::format(at, format!("expected K<n>=<hex>, got {text:?}")))?;
            let slot = match name.trim() {
                "K1" => 0,
                "K2" => 1,
                "K3" => 2,
                "K4" => 3,
                other => return Err(Error::format(at, format!("unknown subkey {other:?}"))),
            };
            let value = value.trim();
            if value.len() != 16 || !value.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(Error::format(
                    at,
                    format!("{} must be 16 hex digits", name.trim()),
                ));
            }
            if keys[slot].is_some() {
                return Err(Error::format(
                    at,
                    format!("duplicate subkey {}", name.trim()),
                ));
            }
            keys[slot] = Some(u64::from_str_radix(value, 16).expect("validated hex"));
        }
        match keys {
            [Some(k1), Some(k2), Some(k3), Some(k4)] => Ok(EtcKey::new(k1, k2, k3, k4)),
            _ => Err(Error::format(
                offset,
                "key file must define K1, K2, K3 and K4",
            )),
        }
    }
}

/// Keyed permutation of `[0, n)`: Fisher-Yates over the identity, walking
/// `i` from `n - 1` down to 1 and swapping with `next_below(i + 1)`.
pub fn permutation_from_key(k1: u64, n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("permutation of zero blocks"));
    }
    let mut ks = KeyStream::new(k1);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = ks.next_below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    Ok(perm)
}

/// Selects which of the four steps run. Disabled steps still leave the
/// other key streams untouched, since every step has its own subkey.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Steps {
    pub permute: bool,
    pub rotate_invert: bool,
    pub negative_positive: bool,
    pub color_shuffle: bool,
}

impl Steps {
    pub const ALL: Steps = Steps {
        permute: true,
        rotate_invert: true,
        negative_positive: true,
        color_shuffle: true,
    };
}

impl Default for Steps {
    fn default() -> Self {
        Steps::ALL
    }
}

/// Every key-stream draw needed for one image, fixed before any block work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub permutation: Vec<usize>,
    pub geometry: Vec<Dihedral>,
    pub negate: Vec<bool>,
    pub channel_order: Vec<u8>,
}

impl Schedule {
    pub fn new(key: &EtcKey, n: usize, steps: Steps) -> Result<Self> {
        let permutation = if steps.permute {
            permutation_from_key(key.k1, n)?
        } else {
            (0..n).collect()
        };
        let draws = |seed: u64, bound: u64, on: bool| -> Vec<u64> {
            let mut ks = KeyStream::new(seed);
            (0..n)
                .map(|_| if on { ks.next_below(bound) } else { 0 })
                .collect()
        };
        let geometry = draws(key.k2, 8, steps.rotate_invert)
            .into_iter()
            .map(|c| Dihedral::from_code(c as u8).expect("draw below 8"))
            .collect();
        let negate = draws(key.k3, 2, steps.negative_positive)
            .into_iter()
            .map(|r| r == 1)
            .collect();
        let channel_order = draws(key.k4, 6, steps.color_shuffle)
            .into_iter()
            .map(|c| c as u8)
            .collect();
        Ok(Schedule {
            permutation,
            geometry,
            negate,
            channel_order,
        })
    }
}

fn check_geometry(img: &RasterImage, block_w: usize, block_h: usize) -> Result<BlockGrid> {
    if block_w == 0 || block_h == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if block_w != block_h {
        return Err(Error::invalid(format!(
            "block scrambling needs square blocks, got {block_w}x{block_h}"
        )));
    }
    if !img.width().is_multiple_of(block_w) || !img.height().is_multiple_of(block_h) {
        return Err(Error::invalid(format!(
            "{}x{} is not a multiple of the {block_w}x{block_h} block size; crop first",
            img.width(),
            img.height()
        )));
    }
    BlockGrid::for_image(img, block_w, block_h)
}

fn read_tile(img: &RasterImage, grid: &BlockGrid, index: usize, tile: &mut Vec<[u8; 3]>) {
    let (ox, oy) = grid.origin(index);
    tile.clear();
    for y in oy..oy + grid.block_h {
        for x in ox..ox + grid.block_w {
            tile.push(img.pixel(x, y));
        }
    }
}

fn write_tile(img: &mut RasterImage, grid: &BlockGrid, index: usize, tile: &[[u8; 3]]) {
    let (ox, oy) = grid.origin(index);
    let mut it = tile.iter();
    for y in oy..oy + grid.block_h {
        for x in ox..ox + grid.block_w {
            img.set_pixel(x, y, *it.next().expect("tile size"));
        }
    }
}

/// Encrypts with all four steps.
pub fn encrypt(
    img: &RasterImage,
    key: &EtcKey,
    block_w: usize,
    block_h: usize,
) -> Result<RasterImage> {
    encrypt_with(img, key, block_w, block_h, Steps::ALL)
}

/// Inverse of [`encrypt`].
pub fn decrypt(
    img: &RasterImage,
    key: &EtcKey,
    block_w: usize,
    block_h: usize,
) -> Result<RasterImage> {
    decrypt_with(img, key, block_w, block_h, Steps::ALL)
}

pub fn encrypt_with(
    img: &RasterImage,
    key: &EtcKey,
    block_w: usize,
    block_h: usize,
    steps: Steps,
) -> Result<RasterImage> {
    let grid = check_geometry(img, block_w, block_h)?;
    let sched = Schedule::new(key, grid.len(), steps)?;
    let mut out = img.clone();
    let mut tile = Vec::with_capacity(block_w * block_h);
    let mut scratch = Vec::with_capacity(block_w * block_h);
    for dst in 0..grid.len() {
        read_tile(img, &grid, sched.permutation[dst], &mut tile);
        geometry::apply_square(&mut tile, block_w, sched.geometry[dst], &mut scratch);
        let negate = sched.negate[dst];
        let order = sched.channel_order[dst];
        for p in tile.iter_mut() {
            if negate {
                *p = p.map(|s| s ^ MAX_SAMPLE);
            }
            *p = shuffle_channels(*p, order, false);
        }
        write_tile(&mut out, &grid, dst, &tile);
    }
    Ok(out)
}

pub fn decrypt_with(
    img: &RasterImage,
    key: &EtcKey,
    block_w: usize,
    block_h: usize,
    steps: Steps,
) -> Result<RasterImage> {
    let grid = check_geometry(img, block_w, block_h)?;
    let sched = Schedule::new(key, grid.len(), steps)?;
    let mut out = img.clone();
    let mut tile = Vec::with_capacity(block_w * block_h);
    let mut scratch = Vec::with_capacity(block_w * block_h);
    for dst in 0..grid.len() {
        read_tile(img, &grid, dst, &mut tile);
        let negate = sched.negate[dst];
        let order = sched.channel_order[dst];
        for p in tile.iter_mut() {
            *p = shuffle_channels(*p, order, true);
            if negate {
                *p = p.map(|s| s ^ MAX_SAMPLE);
            }
        }
        geometry::apply_square(
            &mut tile,
            block_w,
            sched.geometry[dst].inverse(),
            &mut scratch,
        );
        write_tile(&mut out, &grid, sched.permutation[dst], &tile);
    }
    Ok(out)
}
