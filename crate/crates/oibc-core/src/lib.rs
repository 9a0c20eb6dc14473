//! Inner, outer and high-SNR capacity-region bounds for optical-intensity broadcast channels.
//!
//! Rates are in nats per channel use throughout.

pub mod channel;
pub mod error;
pub mod region;
pub mod scalar;
pub mod source;
pub mod special;
pub mod verify;

pub use channel::{
    AverageConstraint, ChannelConfig, ConstraintKind, IntensityConstraint, JointConstraint, PeakConstraint,
};
pub use error::{Error, Result};
pub use scalar::{CapacityValue, MuStar};
