//! Gridless wideband DOA estimation for arbitrary linear arrays.
//!
//! ```
//! use gridless_doa::geometry::ArrayGeometry;
//! use gridless_doa::recovery::{srw_doa, SrwConfig};
//! use gridless_doa::signal::{apply_noise, synthesize, SourceScene, WidebandParams};
//! use rand::SeedableRng;
//!
//! let params = WidebandParams::underwater(4);
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let geometry = ArrayGeometry::random(8, params.random_aperture(8), &mut rng)?;
//! let clean = synthesize(&geometry, &SourceScene::new(vec![-5.0, 40.0])?, &params, 1)?;
//! let (noisy, sigma) = apply_noise(&clean, 20.0, 2);
//! let result = srw_doa(&geometry, &noisy, 2, sigma, &SrwConfig::default())?;
//! assert_eq!(result.estimate.thetas_deg.len(), 2);
//! # Ok::<(), gridless_doa::Error>(())
//! ```

pub mod anm;
pub mod baselines;
pub mod conic;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod oracle;
pub mod pswf;
pub mod recovery;
pub mod signal;

pub use error::{Error, Result};
