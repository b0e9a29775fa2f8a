use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;

use super::packet::{decode_frame, DecodedFrame, PROTO_TCP, PROTO_UDP};
use super::pcap::PcapRecord;

/// Bidirectional session key. Endpoints are ordered so that
/// `(ip_a, port_a) <= (ip_b, port_b)`; both directions share one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiveTuple {
    pub ip_a: Ipv4Addr,
    pub port_a: u16,
    pub ip_b: Ipv4Addr,
    pub port_b: u16,
    pub protocol: u8,
}

impl FiveTuple {
    pub fn new(src: Ipv4Addr, src_port: u16, dst: Ipv4Addr, dst_port: u16, protocol: u8) -> Self {
        let (a, b) = if (src, src_port) <= (dst, dst_port) {
            ((src, src_port), (dst, dst_port))
        } else {
            ((dst, dst_port), (src, src_port))
        };
        FiveTuple {
            ip_a: a.0,
            port_a: a.1,
            ip_b: b.0,
            port_b: b.1,
            protocol,
        }
    }

    pub(crate) fn of(frame: &DecodedFrame<'_>) -> Self {
        FiveTuple::new(
            frame.src,
            frame.src_port,
            frame.dst,
            frame.dst_port,
            frame.protocol,
        )
    }
}

impl fmt::Display for FiveTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let proto = match self.protocol {
            PROTO_TCP => "tcp",
            PROTO_UDP => "udp",
            _ => "?",
        };
        write!(
            f,
            "{proto}:{}:{}-{}:{}",
            self.ip_a, self.port_a, self.ip_b, self.port_b
        )
    }
}

/// Records grouped by session. Each session lists indices into the input
/// record slice in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionSplit {
    pub sessions: BTreeMap<FiveTuple, Vec<usize>>,
    /// Non-IPv4, non-TCP/UDP, or non-first-fragment frames.
    pub skipped: usize,
    /// Frames whose headers were shorter than declared.
    pub undecodable: usize,
}

impl SessionSplit {
    pub fn records<'a>(
        &'a self,
        key: &FiveTuple,
        records: &'a [PcapRecord],
    ) -> impl Iterator<Item = &'a PcapRecord> + 'a {
        self.sessions
            .get(key)
            .into_iter()
            .flatten()
            .map(move |&i| &records[i])
    }
}

pub fn split_sessions(records: &[PcapRecord]) -> SessionSplit {
    let mut split = SessionSplit::default();
    for (i, rec) in records.iter().enumerate() {
        match decode_frame(&rec.data) {
            Ok(Some(frame)) => split
                .sessions
                .entry(FiveTuple::of(&frame))
                .or_default()
                .push(i),
            Ok(None) => split.skipped += 1,
            Err(_) => split.undecodable += 1,
        }
    }
    split
}
