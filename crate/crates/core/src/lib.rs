//! Fast two-dimensional Legendre moments.
//!
//! Moments are computed from power-weighted signal sums with an addition-only
//! accumulation stage and a short recurrence, instead of evaluating Legendre
//! polynomials at every pixel. A direct reference implementation, exact
//! operation counting, image reconstruction and PGM/CSV I/O are included.
//!
//! ```
//! use legmoment::{moments_2d_fast, synth, FastOptions, OpCounter};
//! let img = synth::random_grey(33, 33, 7);
//! let t = moments_2d_fast(&img, 16, &FastOptions::default(), &mut OpCounter::new()).unwrap();
//! assert_eq!(t.order(), 16);
//! ```

mod cache;
pub mod bench;
pub mod error;
pub mod folding;
pub mod image;
pub mod io;
pub mod legendre1d;
pub mod legendre2d;
pub mod metering;
pub mod moment_file;
pub mod power_sums;
pub mod scalar;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use image::{Image, Signal1D};
pub use legendre1d::{moments_1d_direct, moments_1d_fast, Dispatch, FastOptions};
pub use legendre2d::{moments_2d_direct, moments_2d_fast, reconstruct, verify, Reconstruction, VerifyReport};
pub use metering::{OpCounter, OpCounts, Stage};
pub use power_sums::CascadeLayout;
pub use scalar::Precision;
pub use table::MomentTable;
