//! Capture ingestion: pcap container parsing, session splitting, and
//! per-packet cleaning into fixed-length byte vectors.

pub mod packet;
pub mod pcap;
pub mod session;

pub use packet::{
    clean_packet, cleaned_layout, decode_frame, standardize, vectorize, CleanOptions, CleanPacket,
    Cleaned, DecodedFrame, DEFAULT_PACKET_LEN,
};
pub use pcap::{parse_pcap, write_pcap, PcapCapture, PcapHeader, PcapRecord};
pub use session::{split_sessions, FiveTuple, SessionSplit};
