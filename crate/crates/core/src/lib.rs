//! Encryption-then-Compression for JPEG images shared through social media.
//!
//! * [`image`]: RGB rasters, PPM I/O, block geometry, PSNR.
//! * [`cipher`]: block scrambling encryption and its inverse.
//! * [`jpeg`]: a self-contained baseline JPEG codec with DCT-domain
//!   requantization.
//! * [`sns`]: local models of how five social networks rewrite uploads.
//! * [`eval`]: the encrypt, compress, upload, download, decrypt experiment
//!   and its CSV report.

pub mod cipher;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod image;
pub mod jpeg;
pub mod sns;

pub use error::{Error, Result, Stage};
pub use image::RasterImage;
