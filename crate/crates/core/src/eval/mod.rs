//! The encrypt, compress, upload, download, decrypt experiment.
//!
//! One pipeline run takes an original image `I` through
//!
//! ```text
//! I -> I_e (encrypt) -> I_ec (JPEG) -> Î_ec (provider) -> Î_e (decode) -> Î (decrypt)
//! ```
//!
//! and scores `Î` against a ground truth. The plain arm skips both cipher
//! steps. The receiver decodes with block-local chroma upsampling, as a
//! DCT-scaling decoder does, so chroma never leaks between scrambled blocks
//! on the receiving side.

mod spec;

use std::io::Write;

use rayon::prelude::*;

pub use spec::{parse_quality_list, ExperimentSpec, GroundTruth};

use crate::cipher::{decrypt, encrypt, EtcKey, DEFAULT_BLOCK};
use crate::error::{Error, Result, ResultExt, Stage};
use crate::image::{crop_to_block_multiple, psnr, RasterImage};
use crate::jpeg::{self, SubsamplingMode, Upsampling};
use crate::sns::{LocalProvider, Provider, ProviderKind};

/// Chroma kernel of the downloading side.
pub const RECEIVER_UPSAMPLING: Upsampling = Upsampling::BilinearWithinBlock;

/// Header of the result CSV.
pub const CSV_HEADER: [&str; 8] = [
    "provider",
    "arm",
    "mode",
    "qf",
    "mean_psnr",
    "mean_artifact_score",
    "n_images",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    Encrypted,
    Plain,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::Encrypted => "encrypted",
            Arm::Plain => "plain",
        }
    }
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "encrypted" | "enc" => Ok(Arm::Encrypted),
            "plain" => Ok(Arm::Plain),
            other => Err(Error::InvalidArgument(format!(
                "unknown arm {other:?} (encrypted or plain)"
            ))),
        }
    }
}

/// Every intermediate of one run.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    /// The original, cropped to whole cipher blocks.
    pub original: RasterImage,
    /// `I_e`; equal to `original` in the plain arm.
    pub encrypted: RasterImage,
    /// `I_ec`, the uploaded JPEG.
    pub uploaded: Vec<u8>,
    /// `Î_ec`, the downloaded JPEG.
    pub downloaded: Vec<u8>,
    /// `Î_e`, the decoded download.
    pub decoded: RasterImage,
    /// `Î`, the decrypted result.
    pub result: RasterImage,
    pub psnr: f64,
    pub artifact_score: f64,
}

/// Runs one image through the pipeline. `key = None` is the plain arm.
pub fn run_pipeline(
    img: &RasterImage,
    key: Option<&EtcKey>,
    quality: u8,
    mode: SubsamplingMode,
    provider: &dyn Provider,
    ground_truth: GroundTruth,
) -> Result<PipelineOutcome> {
    let b = DEFAULT_BLOCK;
    let original = crop_to_block_multiple(img, b, b).stage(Stage::Crop)?;
    let encrypted = match key {
        Some(k) => encrypt(&original, k, b, b).stage(Stage::Encrypt)?,
        None => original.clone(),
    };
    let uploaded = jpeg::encode(&encrypted, quality, mode).stage(Stage::Encode)?;
    let downloaded = provider.simulate(&uploaded).stage(Stage::Upload)?;
    let decoded = jpeg::decode_with(&downloaded, RECEIVER_UPSAMPLING).stage(Stage::Decode)?;
    let result = match key {
        Some(k) => {
            if decoded.dimensions() != encrypted.dimensions() {
                return Err(Error::invalid(format!(
                    "provider changed dimensions {:?} -> {:?}; blocks no longer line up",
                    encrypted.dimensions(),
                    decoded.dimensions()
                ))
                .at(Stage::Decrypt));
            }
            decrypt(&decoded, k, b, b).stage(Stage::Decrypt)?
        }
        None => decoded.clone(),
    };
    let reference = match ground_truth {
        GroundTruth::Original => original.clone(),
        GroundTruth::Jpeg => jpeg::encode(&original, quality, mode)
            .and_then(|bytes| jpeg::decode_with(&bytes, RECEIVER_UPSAMPLING))
            .stage(Stage::Metric)?,
    };
    let psnr = psnr(&reference, &result).stage(Stage::Metric)?;
    let artifact_score = block_artifact_score(&result, 8).stage(Stage::Metric)?;
    Ok(PipelineOutcome {
        original,
        encrypted,
        uploaded,
        downloaded,
        decoded,
        result,
        psnr,
        artifact_score,
    })
}

/// Blockiness: mean absolute difference between neighboring samples that
/// straddle a block boundary (a column or row index divisible by `period`),
/// minus the same mean over neighbors that do not, floored at zero. Both
/// directions and all three channels are pooled.
pub fn block_artifact_score(img: &RasterImage, period: usize) -> Result<f64> {
    let (w, h) = img.dimensions();
    if period == 0 || w <= period || h <= period {
        return Err(Error::invalid(format!(
            "artifact score needs an image larger than the {period}-pixel period, got {w}x{h}"
        )));
    }
    let px = img.as_bytes();
    let mut sum = [0u64; 2];
    let mut count = [0u64; 2];
    let mut add = |boundary: bool, a: usize, b: usize| {
        let i = usize::from(boundary);
        for c in 0..3 {
            sum[i] += u64::from(px[a + c].abs_diff(px[b + c]));
        }
        count[i] += 3;
    };
    for y in 0..h {
        for x in 1..w {
            let at = (y * w + x) * 3;
            add(x % period == 0, at - 3, at);
        }
    }
    for y in 1..h {
        for x in 0..w {
            let at = (y * w + x) * 3;
            add(y % period == 0, at - w * 3, at);
        }
    }
    let mean = |i: usize| sum[i] as f64 / count[i] as f64;
    Ok((mean(1) - mean(0)).max(0.0))
}

/// One aggregated cell of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub provider: ProviderKind,
    pub arm: Arm,
    pub mode: SubsamplingMode,
    pub qf: u8,
    /// Means over the images that completed; `None` when none did.
    pub mean_psnr: Option<f64>,
    pub mean_artifact_score: Option<f64>,
    pub n_images: usize,
    /// First failure in the cell, if any.
    pub error: Option<String>,
}

/// Runs the full cross product. Cells run in parallel; rows come back
/// sorted by (provider, arm, mode, qf).
pub fn run_experiment(spec: &ExperimentSpec) -> Vec<ResultRow> {
    let mut cells = Vec::new();
    for &provider in &spec.providers {
        for &arm in &spec.arms {
            for &mode in &spec.modes {
                for &qf in &spec.qualities {
                    cells.push((provider, arm, mode, qf));
                }
            }
        }
    }
    let mut rows: Vec<ResultRow> = cells
        .into_par_iter()
        .map(|(kind, arm, mode, qf)| {
            let mut provider = LocalProvider::new(kind);
            provider.facebook = spec.facebook;
            let key = (arm == Arm::Encrypted).then_some(&spec.key);
            let mut psnrs = Vec::new();
            let mut scores = Vec::new();
            let mut error = None;
            for (name, img) in &spec.images {
                match run_pipeline(img, key, qf, mode, &provider, spec.ground_truth) {
                    Ok(out) => {
                        psnrs.push(out.psnr);
                        scores.push(out.artifact_score);
                    }
                    Err(e) => {
                        error.get_or_insert_with(|| format!("{name}: {e}"));
                    }
                }
            }
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            ResultRow {
                provider: kind,
                arm,
                mode,
                qf,
                mean_psnr: mean(&psnrs),
                mean_artifact_score: mean(&scores),
                n_images: psnrs.len(),
                error,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.provider, r.arm, r.mode, r.qf));
    rows
}

/// Writes rows as CSV with [`CSV_HEADER`]. Floats use four decimals.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(CSV_HEADER).map_err(io)?;
    let num = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.provider.name().to_string(),
            r.arm.name().to_string(),
            r.mode.short_name().to_string(),
            r.qf.to_string(),
            num(r.mean_psnr),
            num(r.mean_artifact_score),
            r.n_images.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_scores_zero() {
        let img = RasterImage::filled(32, 24, [90, 10, 200]).unwrap();
        assert_eq!(block_artifact_score(&img, 8).unwrap(), 0.0);
    }

    #[test]
    fn edges_on_the_grid_score_positive() {
        let img = RasterImage::from_fn(32, 16, |x, _| {
            let v = if (x / 8) % 2 == 0 { 40 } else { 200 };
            [v, v, v]
        })
        .unwrap();
        assert!(block_artifact_score(&img, 8).unwrap() > 0.0);
        // the same edges shifted off the grid score zero
        let off = RasterImage::from_fn(32, 16, |x, _| {
            let v = if ((x + 4) / 8) % 2 == 0 { 40 } else { 200 };
            [v, v, v]
        })
        .unwrap();
        assert_eq!(block_artifact_score(&off, 8).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_sizes_rejected() {
        let img = RasterImage::filled(8, 40, [0, 0, 0]).unwrap();
        assert!(block_artifact_score(&img, 8).is_err());
        assert!(block_artifact_score(&img, 0).is_err());
    }

    #[test]
    fn crop_failure_is_stage_annotated() {
        let img = RasterImage::filled(8, 8, [0, 0, 0]).unwrap();
        let p = LocalProvider::new(ProviderKind::Flickr);
        let err = run_pipeline(
            &img,
            None,
            90,
            SubsamplingMode::S444,
            &p,
            GroundTruth::Original,
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::Stage {
                    stage: Stage::Crop,
                    ..
                }
            ),
            "{err}"
        );
        assert!(err.to_string().starts_with("crop: "));
    }
}
