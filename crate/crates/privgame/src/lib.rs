//! Synthesis and evaluation of optimal data-privatization mechanisms.
//!
//! A data holder wants to release a sanitized version `xhat` of a public
//! value `X` while limiting what an adversary can infer about a correlated
//! private bit `Y`, subject to a budget `D` on the expected distortion
//! between `X` and `xhat`. This crate solves that problem two ways and
//! cross-checks them:
//!
//! - **Exactly**, when the source distribution is known: a small dense LP
//!   for binary sources ([`binary`]), and closed forms plus boundary grid
//!   searches for Gaussian mixture sources ([`gaussian`]).
//! - **From data**, when it is not: an alternating minimax game between a
//!   privatizer network and an adversary network ([`train`]), with the
//!   distortion budget enforced by penalty or augmented-Lagrangian terms.
//!
//! Every mechanism, learned or solved, is evaluated against the exact
//! maximum-a-posteriori adversary ([`prob`]), which is the strongest
//! inference attack for the 0-1 loss.
//!
//! ```
//! use privgame::prob::{BernoulliXorModel, binary_map_accuracy, mechanism_joint};
//! use privgame::binary::theorem1_pdi;
//!
//! // A fair bit X observed through 25% flip noise as the private bit Y.
//! let model = BernoulliXorModel::new(0.5, 0.25).unwrap();
//! let raw = binary_map_accuracy(&model.joint());
//! assert!((raw - 0.75).abs() < 1e-12);
//!
//! // Spending a Hamming distortion budget of 0.2 provably drops the best
//! // adversary to 65% accuracy.
//! let solution = theorem1_pdi(0.5, 0.25, 0.2).unwrap();
//! assert!((solution.accuracy - 0.65).abs() < 1e-12);
//! let joint = mechanism_joint(&model.joint(), &solution.witness).unwrap();
//! assert!((binary_map_accuracy(&joint) - 0.65).abs() < 1e-12);
//! ```

pub mod binary;
pub mod data;
pub mod error;
pub mod gaussian;
pub mod guide;
pub mod mechanism;
pub mod prob;
pub mod simplex;
pub mod train;

pub use error::{Error, Result};
