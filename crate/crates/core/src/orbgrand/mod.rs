//! ORBGRAND: guessing noise patterns in logistic-weight order over
//! reliability-ranked bit positions.

mod decoder;
mod pattern;

pub use decoder::{
    decode_grandab, decode_unconstrained, decode_with, rank_positions, step_core, terminate_core,
    CoreStatus, DecodeResult, DecoderCore, ReliabilityPermutation, DEFAULT_QUERY_CAP,
};
pub use pattern::{logistic_weight, PatternGenerator};
