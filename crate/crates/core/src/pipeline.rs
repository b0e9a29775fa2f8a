//! One capture file to labelled chained graphs: parse, split into sessions,
//! clean each packet, chain, and keep the leading fraction of packets.

use crate::error::Result;
use crate::graph::{build_chain_graph, truncate_graph, ChainedGraph};
use crate::ingest::packet::{clean_decoded, decode_frame, CleanOptions, Cleaned};
use crate::ingest::{parse_pcap, split_sessions, FiveTuple};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    pub clean: CleanOptions,
    /// Leading share of each session's packets to keep, in `(0, 1]`.
    pub fraction: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            clean: CleanOptions::default(),
            fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub records: usize,
    /// Frames that are not IPv4 TCP/UDP.
    pub skipped: usize,
    pub undecodable: usize,
    /// Packets removed by cleaning (no payload, or DNS when filtered).
    pub discarded: usize,
    /// Sessions with no packet left after cleaning.
    pub dropped_sessions: usize,
    /// The capture ended inside a record.
    pub truncated: bool,
}

impl std::ops::AddAssign for IngestStats {
    fn add_assign(&mut self, o: Self) {
        self.records += o.records;
        self.skipped += o.skipped;
        self.undecodable += o.undecodable;
        self.discarded += o.discarded;
        self.dropped_sessions += o.dropped_sessions;
        self.truncated |= o.truncated;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionGraph {
    pub session: FiveTuple,
    pub graph: ChainedGraph,
}

/// Sessions come out in five-tuple order.
pub fn ingest_pcap(
    bytes: &[u8],
    label: usize,
    opts: &IngestOptions,
) -> Result<(Vec<SessionGraph>, IngestStats)> {
    let capture = parse_pcap(bytes)?;
    let split = split_sessions(&capture.records);
    let mut stats = IngestStats {
        records: capture.records.len(),
        skipped: split.skipped,
        undecodable: split.undecodable,
        truncated: capture.truncated,
        ..Default::default()
    };
    let mut out = Vec::new();
    for (key, indices) in &split.sessions {
        let mut packets = Vec::with_capacity(indices.len());
        for &i in indices {
            let frame = decode_frame(&capture.records[i].data)?.expect("session frames decode");
            match clean_decoded(&frame, &opts.clean) {
                Cleaned::Kept(p) => packets.push(p),
                Cleaned::Discard => stats.discarded += 1,
            }
        }
        if packets.is_empty() {
            stats.dropped_sessions += 1;
            continue;
        }
        let graph = truncate_graph(&build_chain_graph(&packets, label)?, opts.fraction)?;
        out.push(SessionGraph {
            session: *key,
            graph,
        });
    }
    Ok((out, stats))
}
