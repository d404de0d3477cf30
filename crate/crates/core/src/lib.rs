//! The ℓ1-regularized model `f(x) = h(x) + μ‖x‖₁` and its smooth Hadamard
//! difference parametrization
//!
//! ```text
//! F(a, b) = h(a∘a − b∘b) + μ(‖a‖² + ‖b‖²)
//! ```
//!
//! The crate bundles:
//!
//! - [`losses`]: a small zoo of C² losses `h` behind the [`Loss`] trait, plus a
//!   finite-difference derivative checker.
//! - [`model`]: `f`, `F` and the product form `G(u, v) = h(u∘v) + (μ/2)(‖u‖² + ‖v‖²)`,
//!   exact first and second derivatives of `F`, and the sign/swap reduction.
//! - [`stationarity`]: index sets, critical cones, strict complementarity,
//!   second-order tests and a brute-force strict-saddle margin.
//! - [`solvers`]: gradient descent with a persistent backtracking stepsize on
//!   `F`, and proximal gradient (ISTA) on `f`.
//! - [`kl`]: empirical Kurdyka-Łojasiewicz exponent fits, exponent predictions,
//!   convergence-rate fits and a Hölderian error-bound probe.
//! - [`experiment`]: the config-driven experiment runner behind the `hdp` binary.
//!
//! ```
//! use hadamard_l1::{losses, model::{HdpPoint, L1Problem}};
//! use nalgebra::{dmatrix, dvector};
//!
//! let h = losses::least_squares(dmatrix![1.0], dvector![0.0]).unwrap();
//! let prob = L1Problem::new(h, 1.0).unwrap();
//! let p = HdpPoint::new(dvector![1.0], dvector![0.0]).unwrap();
//! assert_eq!(prob.hdp_value(&p), 1.5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod io;
pub mod kl;
pub mod losses;
pub mod model;
pub mod solvers;
pub mod stationarity;

pub use error::{Error, Result};
pub use losses::{Loss, SmoothLoss};
pub use model::{HdpPoint, L1Problem};
