//! Letter layout, message framing, embedding, and extraction.

mod capacity;
mod codec;
mod document;
mod layout;
mod message;

pub use capacity::{
    capacity_report, letters_for_bits, linear_code_baseline, monte_carlo_capacity, CapacityReport,
};
pub(crate) use codec::encode_layout;
pub use codec::{
    decode_layout, embed, extract, extract_report, extract_trace, extract_trace_report,
    simulate_block_errors, simulate_document, BlockReport, CodecOptions, ExtractReport,
    Observations,
};
pub use document::{ChannelTrace, EncodedDocument, VectorDocument};
pub use layout::{
    choose_moduli, letter_sequence, partition_blocks, Block, Layout, Letter, Partitioner,
    DEFAULT_K, DEFAULT_N,
};
pub use message::{chunk_message, frame_message, unframe, PlainMessage, LENGTH_PREFIX_BITS};
