//! Gradient descent with backtracking on `F`, proximal gradient on `f`, random
//! initialization and iterate traces.

mod gd;
mod init;
mod prox;
mod trace;

pub use gd::{gd_backtracking, GdConfig};
pub use init::random_init;
pub use prox::{ista, newton_polish, prox_gradient, soft_threshold, weighted_soft_threshold, ProxConfig};
pub use trace::{RecordedPoint, Status, Trace};
