//! ORBGRAND decoding over BPSK/AWGN and a cycle-accurate simulator of a
//! fixed-throughput FIFO scheduling architecture (input FIFO, decoder array,
//! re-order buffer with booking and early termination).

pub mod bits;
pub mod channel;
pub mod error;
pub mod harness;
pub mod linear_code;
pub mod metrics;
pub mod orbgrand;
pub mod scheduler;

pub use bits::BitBlock;
pub use channel::{ChannelParams, LlrBlock};
pub use error::{Error, Result};
pub use linear_code::{generate_code, CodeSpec};
pub use metrics::HardwareProfile;
pub use scheduler::{simulate, ScheduleConfig, SimOutcome};
