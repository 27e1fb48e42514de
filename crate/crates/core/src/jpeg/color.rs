//! Full-range BT.601 color conversion and chroma resampling.

use crate::error::{Error, Result};
use crate::image::RasterImage;

use super::SubsamplingMode;

/// One 8-bit sample plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::invalid(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Extends to `width x height` by replicating the last column and row.
    pub fn pad_edges(&self, width: usize, height: usize) -> Plane {
        if (width, height) == (self.width, self.height) {
            return self.clone();
        }
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            let sy = y.min(self.height - 1);
            let row = &self.data[sy * self.width..(sy + 1) * self.width];
            data.extend_from_slice(&row[..width.min(self.width)]);
            let last = row[self.width - 1];
            data.extend(std::iter::repeat_n(last, width.saturating_sub(self.width)));
        }
        Plane {
            width,
            height,
            data,
        }
    }

    /// Top-left crop.
    pub fn crop(&self, width: usize, height: usize) -> Plane {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            data.extend_from_slice(&self.data[y * self.width..y * self.width + width]);
        }
        Plane {
            width,
            height,
            data,
        }
    }
}

#[inline]
fn to_sample(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

#[inline]
pub(crate) fn rgb_to_ycbcr_pixel([r, g, b]: [u8; 3]) -> [u8; 3] {
    let (r, g, b) = (f64::from(r), f64::from(g), f64::from(b));
    [
        to_sample(0.299 * r + 0.587 * g + 0.114 * b),
        to_sample(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b),
        to_sample(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b),
    ]
}

#[inline]
pub(crate) fn ycbcr_to_rgb_pixel([y, cb, cr]: [u8; 3]) -> [u8; 3] {
    let y = f64::from(y);
    let cb = f64::from(cb) - 128.0;
    let cr = f64::from(cr) - 128.0;
    [
        to_sample(y + 1.402 * cr),
        to_sample(y - 0.344136 * cb - 0.714136 * cr),
        to_sample(y + 1.772 * cb),
    ]
}

/// Splits an RGB image into Y, Cb and Cr planes.
pub fn rgb_to_ycbcr(img: &RasterImage) -> [Plane; 3] {
    let n = img.width() * img.height();
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for px in img.as_bytes().chunks_exact(3) {
        let ycc = rgb_to_ycbcr_pixel([px[0], px[1], px[2]]);
        for (plane, v) in planes.iter_mut().zip(ycc) {
            plane.push(v);
        }
    }
    planes.map(|data| Plane {
        width: img.width(),
        height: img.height(),
        data,
    })
}

/// Merges three equal-size planes back into RGB.
pub fn ycbcr_to_rgb(planes: &[Plane; 3]) -> Result<RasterImage> {
    let [y, cb, cr] = planes;
    if (cb.width, cb.height) != (y.width, y.height) || (cr.width, cr.height) != (y.width, y.height)
    {
        return Err(Error::invalid("YCbCr planes differ in size"));
    }
    let mut data = Vec::with_capacity(y.data.len() * 3);
    for i in 0..y.data.len() {
        data.extend_from_slice(&ycbcr_to_rgb_pixel([y.data[i], cb.data[i], cr.data[i]]));
    }
    RasterImage::new(y.width, y.height, data)
}

/// Chroma upsampling kernel for 4:2:0 reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Upsampling {
    /// Bilinear with half-pixel phase (3:1 triangle weights). Neighbors are
    /// taken across 8x8 block boundaries, clamped only at the plane edge.
    #[default]
    Bilinear,
    /// The same weights, but neighbors are clamped to the 8x8 chroma block
    /// being expanded, so each 16x16 MCU is reconstructed from its own
    /// chroma samples only.
    BilinearWithinBlock,
}

/// Halves chroma resolution (4:2:0) with a rounded 2x2 box average; odd
/// edges replicate. 4:4:4 is the identity.
pub fn subsample_chroma(plane: &Plane, mode: SubsamplingMode) -> Plane {
    match mode {
        SubsamplingMode::S444 => plane.clone(),
        SubsamplingMode::S420 => {
            let w = plane.width.div_ceil(2);
            let h = plane.height.div_ceil(2);
            let p = plane.pad_edges(w * 2, h * 2);
            let mut data = Vec::with_capacity(w * h);
            for y in 0..h {
                for x in 0..w {
                    let s = u32::from(p.get(2 * x, 2 * y))
                        + u32::from(p.get(2 * x + 1, 2 * y))
                        + u32::from(p.get(2 * x, 2 * y + 1))
                        + u32::from(p.get(2 * x + 1, 2 * y + 1));
                    data.push(((s + 2) / 4) as u8);
                }
            }
            Plane {
                width: w,
                height: h,
                data,
            }
        }
    }
}

/// Restores a chroma plane to `width x height` with the default kernel.
pub fn upsample_chroma(
    plane: &Plane,
    mode: SubsamplingMode,
    width: usize,
    height: usize,
) -> Result<Plane> {
    upsample_chroma_with(plane, mode, width, height, Upsampling::default())
}

pub fn upsample_chroma_with(
    plane: &Plane,
    mode: SubsamplingMode,
    width: usize,
    height: usize,
    kernel: Upsampling,
) -> Result<Plane> {
    match mode {
        SubsamplingMode::S444 => {
            if plane.width < width || plane.height < height {
                return Err(Error::invalid("chroma plane smaller than target"));
            }
            Ok(plane.crop(width, height))
        }
        SubsamplingMode::S420 => {
            if plane.width * 2 < width || plane.height * 2 < height {
                return Err(Error::invalid(format!(
                    "{}x{} chroma plane cannot cover {width}x{height}",
                    plane.width, plane.height
                )));
            }
            Ok(upsample_2x(plane, kernel).crop(width, height))
        }
    }
}

/// Index of the nearer and farther source taps for output `o`, plus the
/// clamp range in effect.
#[inline]
fn taps(o: usize, len: usize, kernel: Upsampling) -> (usize, usize) {
    let i = o / 2;
    let (lo, hi) = match kernel {
        Upsampling::Bilinear => (0, len - 1),
        Upsampling::BilinearWithinBlock => (i / 8 * 8, (i / 8 * 8 + 7).min(len - 1)),
    };
    let far = if o.is_multiple_of(2) {
        if i > lo {
            i - 1
        } else {
            i
        }
    } else if i < hi {
        i + 1
    } else {
        i
    };
    (i, far)
}

fn upsample_2x(plane: &Plane, kernel: Upsampling) -> Plane {
    let (w, h) = (plane.width * 2, plane.height * 2);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let (ny, fy) = taps(y, plane.height, kernel);
        for x in 0..w {
            let (nx, fx) = taps(x, plane.width, kernel);
            let s = 9 * u32::from(plane.get(nx, ny))
                + 3 * u32::from(plane.get(fx, ny))
                + 3 * u32::from(plane.get(nx, fy))
                + u32::from(plane.get(fx, fy));
            data.push(((s + 8) >> 4) as u8);
        }
    }
    Plane {
        width: w,
        height: h,
        data,
    }
}
