//! Intrinsic capacities of discrete memoryless channels.
//!
//! A channel `W` is split into convex combinations of deterministic channels.
//! The index of the deterministic channel in use is an intrinsic state, and
//! the lower and upper intrinsic capacities ask how much that state is worth
//! to the encoder, the decoder, or both, in the least and most favourable
//! decompositions.
//!
//! ```
//! use intrinsic_capacity::channel::Channel;
//! use intrinsic_capacity::intrinsic::ic11_exact;
//! use intrinsic_capacity::optim::Sense;
//!
//! let w = Channel::new(vec![
//!     vec![0.3, 0.3, 0.4],
//!     vec![0.2, 0.5, 0.3],
//!     vec![0.4, 0.1, 0.5],
//! ])?;
//! let (lower, witness) = ic11_exact(&w, Sense::Minimize)?;
//! assert!((lower - 0.4).abs() < 1e-9);
//! assert!(witness.reconstruct().max_abs_diff(&w) < 1e-9);
//! # Ok::<(), intrinsic_capacity::Error>(())
//! ```

pub mod channel;
pub mod decomposition;
pub mod error;
pub mod info;
pub mod intrinsic;
pub mod io;
pub mod linalg;
pub mod optim;
pub mod state_info;

pub use channel::{Channel, DetChannel, InputDist};
pub use decomposition::Decomposition;
pub use error::{Error, Result};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/intrinsic-capacities.md")]
    mod intrinsic_capacities {}
    #[doc = include_str!("../../../book/src/state-information.md")]
    mod state_information {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
