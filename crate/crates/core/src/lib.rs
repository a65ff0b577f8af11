pub mod augment;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod homography;
pub mod layout;
pub mod manifest;
pub mod metrics;
pub mod raster;
pub mod synth;
pub mod trajectory;
pub mod warp;

pub use error::{Error, Result};
pub use exec::Exec;
