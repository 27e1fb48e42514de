//! Experiment spec files: `key = value` lines with comma lists.
//!
//! ```text
//! images = desk                # or PPM files / directories of PPM files
//! qf = 80-100                  # ranges and comma lists mix: 80-84,90
//! modes = 444, 420
//! providers = twitter, facebook-hq
//! arms = encrypted, plain
//! master_key = 0x5eed          # or key_file = k.txt
//! ground_truth = original      # or jpeg
//! facebook_qf = 77
//! ```
//!
//! Relative paths resolve against the spec file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use super::Arm;
use crate::cipher::EtcKey;
use crate::corpus::desk_corpus;
use crate::error::{Error, Result, ResultExt, Stage};
use crate::image::{load_ppm, RasterImage};
use crate::jpeg::SubsamplingMode;
use crate::sns::{FacebookPolicy, ProviderKind};

/// What the final image is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundTruth {
    /// The original image.
    #[default]
    Original,
    /// The original after a plain encode/decode at the same quality and mode.
    Jpeg,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Named images, in the order given.
    pub images: Vec<(String, RasterImage)>,
    pub qualities: Vec<u8>,
    pub modes: Vec<SubsamplingMode>,
    pub providers: Vec<ProviderKind>,
    pub arms: Vec<Arm>,
    pub key: EtcKey,
    pub ground_truth: GroundTruth,
    pub facebook: FacebookPolicy,
}

impl ExperimentSpec {
    /// The default sweep over the given images: Qf 80..=100, both modes,
    /// Twitter and Facebook, both arms.
    pub fn new(images: Vec<(String, RasterImage)>, key: EtcKey) -> Result<Self> {
        let spec = ExperimentSpec {
            images,
            qualities: (80..=100).collect(),
            modes: SubsamplingMode::ALL.to_vec(),
            providers: vec![ProviderKind::Twitter, ProviderKind::FacebookHq],
            arms: vec![Arm::Encrypted, Arm::Plain],
            key,
            ground_truth: GroundTruth::Original,
            facebook: FacebookPolicy::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::InvalidArgument(format!("experiment has no {what}")));
        if self.images.is_empty() {
            return empty("images");
        }
        if self.qualities.is_empty() {
            return empty("quality factors");
        }
        if self.modes.is_empty() {
            return empty("modes");
        }
        if self.providers.is_empty() {
            return empty("providers");
        }
        if self.arms.is_empty() {
            return empty("arms");
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
            .stage(Stage::Load)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses spec text; `base` anchors relative paths.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut images = None;
        let mut qualities = None;
        let mut modes = None;
        let mut providers = None;
        let mut arms = None;
        let mut key = None;
        let mut ground_truth = GroundTruth::Original;
        let mut facebook = FacebookPolicy::default();

        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::InvalidArgument(format!("spec line {}: {msg}", n + 1));
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            let wrap = |e: Error| bad(e.to_string());
            match k {
                "images" => images = Some(load_images(v, base).map_err(wrap)?),
                "qf" | "qualities" => qualities = Some(parse_quality_list(v).map_err(wrap)?),
                "modes" => modes = Some(list(v).map_err(wrap)?),
                "providers" => providers = Some(list(v).map_err(wrap)?),
                "arms" => arms = Some(list(v).map_err(wrap)?),
                "master_key" => {
                    let m = parse_u64(v).ok_or_else(|| bad(format!("bad master_key {v:?}")))?;
                    key = Some(EtcKey::from_master(m));
                }
                "key_file" => {
                    let text =
                        fs::read_to_string(base.join(v)).map_err(|e| bad(format!("{v}: {e}")))?;
                    key = Some(text.parse().map_err(wrap)?);
                }
                "ground_truth" => {
                    ground_truth = match v {
                        "original" => GroundTruth::Original,
                        "jpeg" => GroundTruth::Jpeg,
                        _ => {
                            return Err(bad(format!(
                                "ground_truth must be original or jpeg, got {v:?}"
                            )))
                        }
                    }
                }
                "facebook_qf" => {
                    let q = v
                        .parse()
                        .map_err(|_| bad(format!("bad facebook_qf {v:?}")))?;
                    facebook = FacebookPolicy::new(q).map_err(wrap)?;
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }

        let key =
            key.ok_or_else(|| Error::InvalidArgument("spec needs master_key or key_file".into()))?;
        let images = images.ok_or_else(|| Error::InvalidArgument("spec needs images".into()))?;
        let mut spec = ExperimentSpec::new(images, key)?;
        if let Some(q) = qualities {
            spec.qualities = q;
        }
        if let Some(m) = modes {
            spec.modes = m;
        }
        if let Some(p) = providers {
            spec.providers = p;
        }
        if let Some(a) = arms {
            spec.arms = a;
        }
        spec.ground_truth = ground_truth;
        spec.facebook = facebook;
        spec.validate()?;
        Ok(spec)
    }
}

fn list<T: std::str::FromStr<Err = Error> + PartialEq>(v: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let t = item.parse()?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn parse_u64(v: &str) -> Option<u64> {
    match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => v.parse().ok(),
    }
}

/// Parses `80-100`, `80,85,90` or a mix, each value in 1..=100. The result
/// is sorted and deduplicated.
pub fn parse_quality_list(v: &str) -> Result<Vec<u8>> {
    let q = |s: &str| -> Result<u8> {
        match s.trim().parse::<u8>() {
            Ok(q @ 1..=100) => Ok(q),
            _ => Err(Error::InvalidArgument(format!(
                "quality {s:?} not in 1..=100"
            ))),
        }
    };
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (q(a)?, q(b)?);
                if a > b {
                    return Err(Error::InvalidArgument(format!("empty range {item:?}")));
                }
                out.extend(a..=b);
            }
            None => out.push(q(item)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn load_images(v: &str, base: &Path) -> Result<Vec<(String, RasterImage)>> {
    if v == "desk" {
        return Ok(desk_corpus());
    }
    let mut files: Vec<PathBuf> = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p = base.join(item);
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(&p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.extension().is_some_and(|x| {
                        x.eq_ignore_ascii_case("ppm") || x.eq_ignore_ascii_case("pnm")
                    })
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p);
        }
    }
    files
        .iter()
        .map(|f| {
            let bytes =
                fs::read(f).map_err(|e| Error::InvalidArgument(format!("{}: {e}", f.display())))?;
            let img = load_ppm(&bytes)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", f.display())))?;
            let name = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, img))
        })
        .collect()
}
