//! Goodness-of-fit testing with Euler characteristic curves.
//!
//! A sample is turned into a filtered simplicial complex (alpha complex for
//! `d <= 3`, Vietoris–Rips or brute-force Čech otherwise), the complex into
//! an Euler characteristic curve (ECC), and the ECC into a test statistic:
//!
//! * [`gof::prepare_reference`] + [`gof::one_sample_test`]: Monte-Carlo
//!   calibrated one-sample test against a known null distribution.
//! * [`gof::two_sample_test`]: permutation test between two samples.
//!
//! Classical baselines (Kolmogorov–Smirnov, Cramér–von Mises and a
//! Fasano–Franceschini style multivariate KS) and a power-study harness
//! live in [`gof::classical`] and [`experiments`].
//!
//! ```
//! use ecc_gof::geometry::{alpha_filtration, PointCloud};
//! use ecc_gof::ecc::euler_curve;
//!
//! let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
//! let curve = euler_curve(&alpha_filtration(&cloud).unwrap());
//! assert_eq!(curve.eval(0.0), 3.0);
//! assert_eq!(curve.final_value(), 1.0);
//! ```

pub mod distributions;
pub mod ecc;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod gof;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
