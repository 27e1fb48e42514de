//! Local models of how social networks rewrite uploaded JPEG files.
//!
//! Each model is a pure function from uploaded bytes to the bytes a
//! downloader gets back. The flow is the same for every provider: resize if
//! the upload is over the provider's limits, apply the provider's
//! recompression rule, strip metadata.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{fit_within, resize_bilinear};
use crate::jpeg::{
    self, parse, requantize, strip_metadata, CodedImage, SubsamplingMode, Upsampling,
};

/// Quality Twitter requantizes high-quality uploads to.
pub const TWITTER_QUALITY: u8 = 85;
/// Re-encoding quality after a resize, for providers that publish none.
pub const RESIZE_QUALITY: u8 = 85;
/// Chroma kernel used when a provider decodes to pixels.
pub const PROVIDER_UPSAMPLING: Upsampling = Upsampling::Bilinear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProviderKind {
    Twitter,
    FacebookHq,
    FacebookLq,
    Tumblr,
    GooglePlus,
    Flickr,
}

impl ProviderKind {
    pub const ALL: [ProviderKind; 6] = [
        ProviderKind::Twitter,
        ProviderKind::FacebookHq,
        ProviderKind::FacebookLq,
        ProviderKind::Tumblr,
        ProviderKind::GooglePlus,
        ProviderKind::Flickr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProviderKind::Twitter => "twitter",
            ProviderKind::FacebookHq => "facebook-hq",
            ProviderKind::FacebookLq => "facebook-lq",
            ProviderKind::Tumblr => "tumblr",
            ProviderKind::GooglePlus => "google-plus",
            ProviderKind::Flickr => "flickr",
        }
    }

    pub fn is_facebook(self) -> bool {
        matches!(self, ProviderKind::FacebookHq | ProviderKind::FacebookLq)
    }

    pub fn policy(self) -> Recompression {
        match self {
            ProviderKind::Twitter => Recompression::DctDomain,
            ProviderKind::FacebookHq | ProviderKind::FacebookLq => Recompression::Spatial,
            _ => Recompression::MetadataOnly,
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProviderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' ' | '+'))
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match norm.as_str() {
            "twitter" => ProviderKind::Twitter,
            "facebook" | "facebookhq" | "fbhq" | "fb" => ProviderKind::FacebookHq,
            "facebooklq" | "fblq" => ProviderKind::FacebookLq,
            "tumblr" => ProviderKind::Tumblr,
            "googleplus" | "google" | "gplus" | "g" => ProviderKind::GooglePlus,
            "flickr" => ProviderKind::Flickr,
            _ => {
                return Err(Error::invalid(format!(
                    "unknown provider {s:?} (twitter, facebook-hq, facebook-lq, tumblr, google-plus, flickr)"
                )))
            }
        })
    }
}

/// What a provider does to an upload that is within its limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recompression {
    /// Decode to pixels and re-encode.
    Spatial,
    /// Rescale quantized coefficients when the upload is high quality.
    DctDomain,
    /// Header rewriting only.
    MetadataOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProviderModel {
    pub kind: ProviderKind,
    /// Largest accepted width and height; `None` means unlimited.
    pub max_w: Option<usize>,
    pub max_h: Option<usize>,
    /// Largest accepted file size in bytes.
    pub max_bytes: Option<usize>,
}

impl ProviderModel {
    pub fn new(kind: ProviderKind) -> Self {
        let (dims, max_bytes) = match kind {
            ProviderKind::Twitter => (Some(4096), Some(3 * 1024 * 1024)),
            ProviderKind::FacebookHq => (Some(2048), None),
            ProviderKind::FacebookLq => (Some(960), None),
            ProviderKind::Tumblr => (Some(1280), None),
            ProviderKind::GooglePlus | ProviderKind::Flickr => (None, None),
        };
        ProviderModel {
            kind,
            max_w: dims,
            max_h: dims,
            max_bytes,
        }
    }

    /// Whether an upload of this size and shape gets resized and re-encoded.
    pub fn over_limits(&self, width: usize, height: usize, bytes: usize) -> bool {
        self.max_w.is_some_and(|m| width > m)
            || self.max_h.is_some_and(|m| height > m)
            || self.max_bytes.is_some_and(|m| bytes > m)
    }

    /// Target dimensions after the resize step.
    pub fn fitted(&self, width: usize, height: usize) -> (usize, usize) {
        fit_within(
            width,
            height,
            self.max_w.unwrap_or(usize::MAX),
            self.max_h.unwrap_or(usize::MAX),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacebookPolicy {
    target_qf: u8,
}

impl FacebookPolicy {
    pub const MIN_QF: u8 = 71;
    pub const MAX_QF: u8 = 85;

    pub fn new(target_qf: u8) -> Result<Self> {
        if !(Self::MIN_QF..=Self::MAX_QF).contains(&target_qf) {
            return Err(Error::invalid(format!(
                "facebook target quality {target_qf} outside {}..={}",
                Self::MIN_QF,
                Self::MAX_QF
            )));
        }
        Ok(FacebookPolicy { target_qf })
    }

    pub fn target_qf(self) -> u8 {
        self.target_qf
    }
}

impl Default for FacebookPolicy {
    fn default() -> Self {
        FacebookPolicy { target_qf: 77 }
    }
}

/// Anything that turns uploaded bytes into downloaded bytes. Network-backed
/// implementations can sit behind the same interface.
pub trait Provider: Send + Sync {
    fn kind(&self) -> ProviderKind;
    fn simulate(&self, jpeg: &[u8]) -> Result<Vec<u8>>;
}

/// A provider model plus its policy, simulated in-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalProvider {
    pub model: ProviderModel,
    pub facebook: FacebookPolicy,
}

impl LocalProvider {
    pub fn new(kind: ProviderKind) -> Self {
        LocalProvider {
            model: ProviderModel::new(kind),
            facebook: FacebookPolicy::default(),
        }
    }

    /// Overrides defaults from `key=value` lines. Keys: `max_w`, `max_h`,
    /// `max_bytes` (a number or `none`) and `target_qf`. `#` starts a
    /// comment.
    pub fn with_config(mut self, text: &str) -> Result<Self> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("config line {}: expected key=value", n + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let limit = || -> Result<Option<usize>> {
                if value.eq_ignore_ascii_case("none") {
                    return Ok(None);
                }
                value.parse::<usize>().map(Some).map_err(|_| {
                    Error::invalid(format!(
                        "config line {}: bad value for {key}: {value:?}",
                        n + 1
                    ))
                })
            };
            match key {
                "max_w" => self.model.max_w = limit()?,
                "max_h" => self.model.max_h = limit()?,
                "max_bytes" => self.model.max_bytes = limit()?,
                "target_qf" => {
                    let q = value.parse::<u8>().map_err(|_| {
                        Error::invalid(format!("config line {}: bad target_qf {value:?}", n + 1))
                    })?;
                    self.facebook = FacebookPolicy::new(q)?;
                }
                other => {
                    return Err(Error::invalid(format!(
                        "config line {}: unknown key {other:?}",
                        n + 1
                    )))
                }
            }
        }
        Ok(self)
    }
}

impl Provider for LocalProvider {
    fn kind(&self) -> ProviderKind {
        self.model.kind
    }

    fn simulate(&self, jpeg: &[u8]) -> Result<Vec<u8>> {
        simulate_upload(&self.model, jpeg, self.facebook)
    }
}

/// The full upload flow: resize check, recompression rule, metadata strip.
pub fn simulate_upload(
    model: &ProviderModel,
    jpeg: &[u8],
    policy: FacebookPolicy,
) -> Result<Vec<u8>> {
    let coded = parse(jpeg)?;
    let kind = model.kind;
    if !model.over_limits(coded.width, coded.height, jpeg.len()) {
        return match kind.policy() {
            Recompression::DctDomain => twitter_rule(jpeg, &coded),
            Recompression::Spatial => facebook_rule(&coded, policy),
            Recompression::MetadataOnly => strip_metadata(jpeg),
        };
    }

    let (quality, mode) = if kind.is_facebook() {
        (policy.target_qf, SubsamplingMode::S420)
    } else if kind == ProviderKind::Twitter {
        (TWITTER_QUALITY, SubsamplingMode::S420)
    } else {
        (RESIZE_QUALITY, SubsamplingMode::S420)
    };
    let (w, h) = model.fitted(coded.width, coded.height);
    let pixels = jpeg::reconstruct(&coded, PROVIDER_UPSAMPLING)?;
    let resized = jpeg::encode(&resize_bilinear(&pixels, w, h)?, quality, mode)?;
    match kind.policy() {
        // The resize already re-encoded at Facebook's settings.
        Recompression::Spatial => strip_metadata(&resized),
        Recompression::DctDomain => twitter_rule(&resized, &parse(&resized)?),
        Recompression::MetadataOnly => strip_metadata(&resized),
    }
}

/// Twitter's rule for uploads within its limits.
pub fn twitter_pipeline(jpeg: &[u8]) -> Result<Vec<u8>> {
    twitter_rule(jpeg, &parse(jpeg)?)
}

fn twitter_rule(jpeg: &[u8], coded: &CodedImage) -> Result<Vec<u8>> {
    if coded.estimated_quality() < TWITTER_QUALITY {
        return strip_metadata(jpeg);
    }
    match coded.mode {
        SubsamplingMode::S420 => strip_metadata(&requantize(coded, TWITTER_QUALITY)?),
        SubsamplingMode::S444 => {
            let pixels = jpeg::reconstruct(coded, PROVIDER_UPSAMPLING)?;
            strip_metadata(&jpeg::encode(
                &pixels,
                TWITTER_QUALITY,
                SubsamplingMode::S420,
            )?)
        }
    }
}

/// Facebook's rule: every upload is decoded and re-encoded as 4:2:0 at the
/// policy's quality. `hq` selects the resolution limit applied first.
pub fn facebook_pipeline(jpeg: &[u8], hq: bool, policy: FacebookPolicy) -> Result<Vec<u8>> {
    let kind = if hq {
        ProviderKind::FacebookHq
    } else {
        ProviderKind::FacebookLq
    };
    simulate_upload(&ProviderModel::new(kind), jpeg, policy)
}

fn facebook_rule(coded: &CodedImage, policy: FacebookPolicy) -> Result<Vec<u8>> {
    let pixels = jpeg::reconstruct(coded, PROVIDER_UPSAMPLING)?;
    strip_metadata(&jpeg::encode(
        &pixels,
        policy.target_qf,
        SubsamplingMode::S420,
    )?)
}

/// Resize-if-over-limits, otherwise header rewriting only.
pub fn passthrough_pipeline(
    jpeg: &[u8],
    max_w: Option<usize>,
    max_h: Option<usize>,
) -> Result<Vec<u8>> {
    let model = ProviderModel {
        kind: ProviderKind::Flickr,
        max_w,
        max_h,
        max_bytes: None,
    };
    simulate_upload(&model, jpeg, FacebookPolicy::default())
}

/// Whether decrypted images from this provider and upload mode are expected
/// to show block artifacts: only Facebook's pixel-domain 4:2:0 recompression
/// mixes chroma across scrambled blocks.
pub fn block_artifact_expected(provider: ProviderKind, mode: SubsamplingMode) -> bool {
    provider.is_facebook() && mode == SubsamplingMode::S420
}
