//! LDPC outer code: alist ingestion, systematic encoding and min-sum
//! decoding.

mod encode;
mod matrix;
mod minsum;

pub use encode::Encoder;
pub use matrix::ParityCheckMatrix;
pub use minsum::{minsum_decode, DecodeOutput, DecoderConfig, MinSumDecoder};
