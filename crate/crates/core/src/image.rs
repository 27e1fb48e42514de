//! 8-bit RGB rasters, PPM interchange, block geometry and quality metrics.

use crate::error::{Error, Result};

/// Maximum value of an 8-bit sample, `2^L - 1`.
pub const MAX_SAMPLE: u8 = 255;

/// An 8-bit RGB image stored row-major with interleaved samples.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RasterImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl RasterImage {
    /// Wraps an interleaved RGB buffer. The buffer must hold exactly
    /// `width * height * 3` samples.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Error::invalid("image dimensions overflow"))?;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "pixel buffer holds {} samples, {width}x{height} RGB needs {expected}",
                data.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            data,
        })
    }

    /// An image with every pixel set to `rgb`.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width.saturating_mul(height).saturating_mul(3))
            .collect();
        RasterImage::new(width, height, data)
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RasterImage::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Counts occurrences of each sample value over all channels.
    pub fn histogram(&self) -> [u64; 256] {
        let mut h = [0u64; 256];
        for &s in &self.data {
            h[s as usize] += 1;
        }
        h
    }
}

/// Partition of an image into non-overlapping `block_w x block_h` blocks.
///
/// Remainder pixels on the right and bottom edges are not covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_w: usize,
    pub block_h: usize,
    pub blocks_per_row: usize,
    pub blocks_per_col: usize,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, block_w: usize, block_h: usize) -> Result<Self> {
        if width == 0 || height == 0 || block_w == 0 || block_h == 0 {
            return Err(Error::invalid(format!(
                "block grid needs positive sizes, got image {width}x{height}, block {block_w}x{block_h}"
            )));
        }
        Ok(BlockGrid {
            block_w,
            block_h,
            blocks_per_row: width / block_w,
            blocks_per_col: height / block_h,
        })
    }

    pub fn for_image(img: &RasterImage, block_w: usize, block_h: usize) -> Result<Self> {
        BlockGrid::new(img.width(), img.height(), block_w, block_h)
    }

    /// Total number of whole blocks.
    pub fn len(&self) -> usize {
        self.blocks_per_row * self.blocks_per_col
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left pixel of block `index` in row-major block order.
    pub fn origin(&self, index: usize) -> (usize, usize) {
        let bx = index % self.blocks_per_row;
        let by = index / self.blocks_per_row;
        (bx * self.block_w, by * self.block_h)
    }
}

/// Number of whole `block_w x block_h` blocks in a `width x height` image.
pub fn block_count(width: usize, height: usize, block_w: usize, block_h: usize) -> Result<usize> {
    BlockGrid::new(width, height, block_w, block_h).map(|g| g.len())
}

/// Parses a binary PPM (`P6`, maxval 255).
pub fn load_ppm(bytes: &[u8]) -> Result<RasterImage> {
    let mut pos = 0;
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::format(0, "missing P6 magic"));
    }
    pos += 2;
    let (width, _) = ppm_header_uint(bytes, &mut pos)?;
    let (height, _) = ppm_header_uint(bytes, &mut pos)?;
    let (maxval, maxval_at) = ppm_header_uint(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::format(
            maxval_at,
            format!("maxval {maxval} unsupported, only 255"),
        ));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(pos, "expected whitespace after maxval")),
    }
    if width == 0 || height == 0 {
        return Err(Error::format(2, "zero image dimension"));
    }
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::format(2, "image dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() < needed {
        return Err(Error::format(
            bytes.len(),
            format!(
                "truncated pixel payload: {} of {needed} bytes",
                payload.len()
            ),
        ));
    }
    RasterImage::new(width, height, payload[..needed].to_vec())
}

/// Skips whitespace and comments, then reads a decimal; returns the value
/// and its offset.
fn ppm_header_uint(bytes: &[u8], pos: &mut usize) -> Result<(usize, usize)> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::format(*pos, "truncated header")),
        }
    }
    let start = *pos;
    let mut value: usize = 0;
    while let Some(&b) = bytes.get(*pos) {
        if !b.is_ascii_digit() {
            break;
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(usize::from(b - b'0')))
            .ok_or_else(|| Error::format(start, "header value overflows"))?;
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::format(start, "expected decimal header value"));
    }
    Ok((value, start))
}

/// Canonical P6 encoding: `P6\n<w> <h>\n255\n` followed by the raster.
pub fn save_ppm(img: &RasterImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.as_bytes().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.as_bytes());
    out
}

/// Mean squared error over every sample of every channel.
pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sum: u64 = a
        .as_bytes()
        .iter()
        .zip(b.as_bytes())
        .map(|(&p, &q)| {
            let d = i64::from(p) - i64::from(q);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.as_bytes().len() as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = f64::from(MAX_SAMPLE);
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Dimensions after an aspect-preserving fit into `max_w x max_h`.
/// Returns the input dimensions when they already fit.
pub fn fit_within(width: usize, height: usize, max_w: usize, max_h: usize) -> (usize, usize) {
    if width <= max_w && height <= max_h {
        return (width, height);
    }
    // integer cross-multiplication avoids float drift at exact ratios
    let (w, h) = (width as u128, height as u128);
    let (mw, mh) = (max_w as u128, max_h as u128);
    if w * mh >= h * mw {
        let nh = (2 * h * mw + w) / (2 * w);
        (max_w, (nh as usize).clamp(1, max_h))
    } else {
        let nw = (2 * w * mh + h) / (2 * h);
        ((nw as usize).clamp(1, max_w), max_h)
    }
}

/// Downscales with bilinear sampling so the image fits `max_w x max_h`.
pub fn resize_bilinear(img: &RasterImage, max_w: usize, max_h: usize) -> Result<RasterImage> {
    if max_w == 0 || max_h == 0 {
        return Err(Error::invalid("resize limits must be positive"));
    }
    let (nw, nh) = fit_within(img.width(), img.height(), max_w, max_h);
    if (nw, nh) == img.dimensions() {
        return Ok(img.clone());
    }
    resample_bilinear(img, nw, nh)
}

/// Bilinear resampling to exactly `new_w x new_h` with half-pixel centers.
pub fn resample_bilinear(img: &RasterImage, new_w: usize, new_h: usize) -> Result<RasterImage> {
    let taps = |dst_len: usize, src_len: usize| -> Vec<(usize, usize, f64)> {
        let scale = src_len as f64 / dst_len as f64;
        (0..dst_len)
            .map(|d| {
                let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
                let i0 = s.floor() as usize;
                let i1 = (i0 + 1).min(src_len - 1);
                (i0, i1, s - i0 as f64)
            })
            .collect()
    };
    let xs = taps(new_w, img.width());
    let ys = taps(new_h, img.height());
    let mut data = Vec::with_capacity(new_w * new_h * 3);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let p00 = img.pixel(x0, y0);
            let p10 = img.pixel(x1, y0);
            let p01 = img.pixel(x0, y1);
            let p11 = img.pixel(x1, y1);
            for c in 0..3 {
                let top = f64::from(p00[c]) * (1.0 - fx) + f64::from(p10[c]) * fx;
                let bottom = f64::from(p01[c]) * (1.0 - fx) + f64::from(p11[c]) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(new_w, new_h, data)
}

/// Top-left crop of an arbitrary rectangle.
pub fn crop(img: &RasterImage, width: usize, height: usize) -> Result<RasterImage> {
    if width == 0 || height == 0 || width > img.width() || height > img.height() {
        return Err(Error::invalid(format!(
            "cannot crop {}x{} to {width}x{height}",
            img.width(),
            img.height()
        )));
    }
    if (width, height) == img.dimensions() {
        return Ok(img.clone());
    }
    let mut data = Vec::with_capacity(width * height * 3);
    let stride = img.width() * 3;
    for row in img.as_bytes().chunks_exact(stride).take(height) {
        data.extend_from_slice(&row[..width * 3]);
    }
    RasterImage::new(width, height, data)
}

/// Crops (top-left anchored) to the largest whole number of blocks.
pub fn crop_to_block_multiple(
    img: &RasterImage,
    block_w: usize,
    block_h: usize,
) -> Result<RasterImage> {
    if block_w == 0 || block_h == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if img.width() < block_w || img.height() < block_h {
        return Err(Error::invalid(format!(
            "{}x{} image is smaller than one {block_w}x{block_h} block",
            img.width(),
            img.height()
        )));
    }
    crop(
        img,
        img.width() / block_w * block_w,
        img.height() / block_h * block_h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gradient(w: usize, h: usize) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| [(x * 7) as u8, (y * 5) as u8, (x + y) as u8]).unwrap()
    }

    #[test]
    fn block_count_values() {
        assert_eq!(block_count(256, 144, 16, 16).unwrap(), 144);
        assert_eq!(block_count(16, 16, 16, 16).unwrap(), 1);
        assert_eq!(block_count(1920, 1080, 16, 16).unwrap(), 8040);
        assert_eq!(block_count(15, 16, 16, 16).unwrap(), 0);
        assert!(block_count(0, 16, 16, 16).is_err());
        assert!(block_count(16, 16, 0, 16).is_err());
    }

    #[test]
    fn new_rejects_bad_buffers() {
        assert!(RasterImage::new(2, 2, vec![0; 11]).is_err());
        assert!(RasterImage::new(0, 2, vec![]).is_err());
        assert!(RasterImage::new(2, 2, vec![0; 12]).is_ok());
    }

    #[test]
    fn ppm_minimal() {
        let bytes = b"P6 2 1 255\n\x01\x02\x03\x04\x05\x06";
        let img = load_ppm(bytes).unwrap();
        assert_eq!(img.dimensions(), (2, 1));
        assert_eq!(img.as_bytes(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn ppm_header_comments() {
        let bytes = b"P6\n# made by hand\n1 1\n255\n\xff\x00\x7f";
        assert_eq!(load_ppm(bytes).unwrap().pixel(0, 0), [255, 0, 127]);
    }

    #[test]
    fn ppm_black_pixel_encoding() {
        let img = RasterImage::filled(1, 1, [0, 0, 0]).unwrap();
        assert_eq!(save_ppm(&img), b"P6\n1 1\n255\n\0\0\0");
    }

    #[test]
    fn ppm_desk_size_layout() {
        let img = RasterImage::filled(256, 144, [9, 9, 9]).unwrap();
        let bytes = save_ppm(&img);
        let header = b"P6\n256 144\n255\n";
        assert!(bytes.starts_with(header));
        assert_eq!(bytes.len() - header.len(), 110_592);
    }

    #[test]
    fn ppm_errors() {
        let truncated = b"P6\n2 2\n255\n\0\0\0";
        match load_ppm(truncated) {
            Err(Error::Format { message, .. }) => assert!(message.contains("truncated")),
            other => panic!("expected format error, got {other:?}"),
        }
        assert!(matches!(
            load_ppm(b"P3\n1 1\n255\n0 0 0"),
            Err(Error::Format { offset: 0, .. })
        ));
        assert!(matches!(
            load_ppm(b"P6\n1 1\n65535\n\0\0\0\0\0\0"),
            Err(Error::Format { offset: 7, .. })
        ));
    }

    #[test]
    fn psnr_values() {
        let zeros = RasterImage::filled(4, 3, [0, 0, 0]).unwrap();
        let ones = RasterImage::filled(4, 3, [1, 1, 1]).unwrap();
        assert_eq!(psnr(&zeros, &zeros).unwrap(), f64::INFINITY);
        assert!((psnr(&zeros, &ones).unwrap() - 48.1308).abs() < 1e-3);

        let a = RasterImage::filled(1, 1, [0, 0, 0]).unwrap();
        let b = RasterImage::filled(1, 1, [255, 0, 0]).unwrap();
        let expected = 10.0 * 3f64.log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 4.77).abs() < 0.01);

        assert!(psnr(&a, &zeros).is_err());
    }

    #[test]
    fn resize_examples() {
        let small = gradient(256, 144);
        assert_eq!(resize_bilinear(&small, 4096, 4096).unwrap(), small);

        assert_eq!(fit_within(4000, 2000, 2048, 2048), (2048, 1024));
        assert_eq!(fit_within(2000, 4000, 2048, 2048), (1024, 2048));
        assert_eq!(fit_within(3000, 3000, 960, 960), (960, 960));

        let flat = RasterImage::filled(2, 2, [40, 80, 120]).unwrap();
        let one = resize_bilinear(&flat, 1, 1).unwrap();
        assert_eq!(one.dimensions(), (1, 1));
        assert_eq!(one.pixel(0, 0), [40, 80, 120]);
    }

    #[test]
    fn resize_large_image_dimensions() {
        let big = RasterImage::filled(4000, 2000, [1, 2, 3]).unwrap();
        let out = resize_bilinear(&big, 2048, 2048).unwrap();
        assert_eq!(out.dimensions(), (2048, 1024));
        assert_eq!(out.pixel(1000, 500), [1, 2, 3]);
    }

    #[test]
    fn crop_examples() {
        let img = RasterImage::filled(1920, 1080, [0, 0, 0]).unwrap();
        assert_eq!(
            crop_to_block_multiple(&img, 16, 16).unwrap().dimensions(),
            (1920, 1072)
        );
        let desk = gradient(256, 144);
        assert_eq!(crop_to_block_multiple(&desk, 16, 16).unwrap(), desk);
        let tiny = gradient(15, 15);
        assert!(crop_to_block_multiple(&tiny, 16, 16).is_err());
    }

    #[test]
    fn crop_keeps_top_left() {
        let img = gradient(20, 18);
        let c = crop_to_block_multiple(&img, 16, 16).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                assert_eq!(c.pixel(x, y), img.pixel(x, y));
            }
        }
    }

    fn arb_image() -> impl Strategy<Value = RasterImage> {
        (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h * 3)
                .prop_map(move |data| RasterImage::new(w, h, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn ppm_round_trip(img in arb_image()) {
            prop_assert_eq!(load_ppm(&save_ppm(&img)).unwrap(), img.clone());
            let bytes = save_ppm(&img);
            prop_assert_eq!(save_ppm(&load_ppm(&bytes).unwrap()), bytes);
        }

        #[test]
        fn psnr_symmetric(a in arb_image(), seed in any::<u8>()) {
            let b = RasterImage::new(
                a.width(),
                a.height(),
                a.as_bytes().iter().map(|&s| s.wrapping_add(seed)).collect(),
            ).unwrap();
            prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        }

        #[test]
        fn resize_identity_when_fitting(img in arb_image()) {
            prop_assert_eq!(resize_bilinear(&img, img.width(), img.height()).unwrap(), img);
        }

        #[test]
        fn resize_respects_limits(w in 1usize..300, h in 1usize..300, mw in 1usize..64, mh in 1usize..64) {
            let (nw, nh) = fit_within(w, h, mw, mh);
            prop_assert!(nw <= mw.max(w.min(mw)) && nw >= 1);
            prop_assert!(nw <= mw && nh <= mh || (w <= mw && h <= mh));
        }

        #[test]
        fn crop_preserves_block_count(w in 4usize..80, h in 4usize..80, b in 1usize..5) {
            let img = RasterImage::filled(w, h, [3, 3, 3]).unwrap();
            let c = crop_to_block_multiple(&img, b, b).unwrap();
            prop_assert_eq!(c.width() % b, 0);
            prop_assert_eq!(c.height() % b, 0);
            prop_assert_eq!(
                block_count(c.width(), c.height(), b, b).unwrap(),
                block_count(w, h, b, b).unwrap()
            );
        }
    }
}
