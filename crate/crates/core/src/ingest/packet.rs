// Ethernet / IPv4 / TCP|UDP decoding and per-packet cleaning.

use std::net::Ipv4Addr;

use super::pcap::PcapRecord;
use crate::error::{Error, Result};

const ETH_HLEN: usize = 14;
const ETHERTYPE_IPV4: u16 = 0x0800;

const IPV4_MIN_HLEN: usize = 20;
const IPV4_SRC_OFFSET: usize = 12;
const IPV4_DST_OFFSET: usize = 16;

pub const PROTO_TCP: u8 = 6;
pub const PROTO_UDP: u8 = 17;

const TCP_MIN_HLEN: usize = 20;
const UDP_HLEN: usize = 8;
/// Width of the transport header region in a cleaned packet.
pub const TRANSPORT_REGION: usize = 20;

pub const DNS_PORT: u16 = 53;
pub const DEFAULT_PACKET_LEN: usize = 1500;

/// A decoded Ethernet + IPv4 + TCP/UDP frame, borrowing from the record.
#[derive(Debug, Clone)]
pub struct DecodedFrame<'a> {
    /// Full IPv4 header including options.
    pub ip_header: &'a [u8],
    pub src: Ipv4Addr,
    pub dst: Ipv4Addr,
    pub src_port: u16,
    pub dst_port: u16,
    pub protocol: u8,
    /// Transport header as declared on the wire (TCP data offset, or 8 for UDP).
    pub transport_header: &'a [u8],
    /// Transport payload, bounded by the IPv4 total length.
    pub payload: &'a [u8],
}

/// Decode a link-layer frame.
///
/// `Ok(None)` for frames that are well-formed but out of scope: non-IPv4
/// EtherTypes (ARP, IPv6, VLAN), protocols other than TCP/UDP, and non-first
/// IPv4 fragments. `Err(Decode)` when a header is shorter than it declares.
pub fn decode_frame(frame: &[u8]) -> Result<Option<DecodedFrame<'_>>> {
    if frame.len() < ETH_HLEN {
        return Err(Error::Decode(format!(
            "ethernet frame of {} bytes",
            frame.len()
        )));
    }
    if u16::from_be_bytes([frame[12], frame[13]]) != ETHERTYPE_IPV4 {
        return Ok(None);
    }
    let ip = &frame[ETH_HLEN..];
    if ip.len() < IPV4_MIN_HLEN {
        return Err(Error::Decode(format!(
            "ipv4 header truncated at {} bytes",
            ip.len()
        )));
    }
    if ip[0] >> 4 != 4 {
        return Ok(None);
    }
    let ihl = usize::from(ip[0] & 0x0f) * 4;
    if ihl < IPV4_MIN_HLEN || ihl > ip.len() {
        return Err(Error::Decode(format!(
            "ipv4 IHL {ihl} with {} bytes available",
            ip.len()
        )));
    }
    let protocol = ip[9];
    if protocol != PROTO_TCP && protocol != PROTO_UDP {
        return Ok(None);
    }
    let frag_offset = u16::from_be_bytes([ip[6], ip[7]]) & 0x1fff;
    if frag_offset != 0 {
        return Ok(None);
    }
    // total_len == 0 shows up with segmentation offload; fall back to what was captured.
    let total_len = usize::from(u16::from_be_bytes([ip[2], ip[3]]));
    let ip_end = match total_len {
        0 => ip.len(),
        t if t < ihl => {
            return Err(Error::Decode(format!(
                "ipv4 total length {t} below header length {ihl}"
            )))
        }
        t => t.min(ip.len()),
    };
    let transport = &ip[ihl..ip_end];

    let hlen = if protocol == PROTO_TCP {
        if transport.len() < TCP_MIN_HLEN {
            return Err(Error::Decode(format!(
                "tcp header truncated at {} bytes",
                transport.len()
            )));
        }
        let off = usize::from(transport[12] >> 4) * 4;
        if off < TCP_MIN_HLEN || off > transport.len() {
            return Err(Error::Decode(format!(
                "tcp data offset {off} with {} bytes available",
                transport.len()
            )));
        }
        off
    } else {
        if transport.len() < UDP_HLEN {
            return Err(Error::Decode(format!(
                "udp header truncated at {} bytes",
                transport.len()
            )));
        }
        UDP_HLEN
    };

    let addr = |o: usize| Ipv4Addr::new(ip[o], ip[o + 1], ip[o + 2], ip[o + 3]);
    Ok(Some(DecodedFrame {
        ip_header: &ip[..ihl],
        src: addr(IPV4_SRC_OFFSET),
        dst: addr(IPV4_DST_OFFSET),
        src_port: u16::from_be_bytes([transport[0], transport[1]]),
        dst_port: u16::from_be_bytes([transport[2], transport[3]]),
        protocol,
        transport_header: &transport[..hlen],
        payload: &transport[hlen..],
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleanOptions {
    /// Fixed vector length.
    pub p: usize,
    /// Discard packets to or from port 53.
    pub drop_dns: bool,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions {
            p: DEFAULT_PACKET_LEN,
            drop_dns: false,
        }
    }
}

/// One packet after cleaning, fixed to `p` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanPacket {
    pub bytes: Vec<u8>,
    pub original_payload_len: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cleaned {
    Kept(CleanPacket),
    Discard,
}

/// Cleaned byte layout before fixing the length:
/// IP header with both addresses zeroed, a 20-byte transport region, then the
/// remaining transport bytes (TCP options and payload, or UDP payload).
pub fn cleaned_layout(frame: &DecodedFrame<'_>) -> Vec<u8> {
    let th = frame.transport_header;
    let mut out = Vec::with_capacity(
        frame.ip_header.len() + TRANSPORT_REGION.max(th.len()) + frame.payload.len(),
    );
    out.extend_from_slice(frame.ip_header);
    out[IPV4_SRC_OFFSET..IPV4_DST_OFFSET + 4].fill(0);
    if frame.protocol == PROTO_UDP {
        out.extend_from_slice(th);
        out.resize(out.len() + TRANSPORT_REGION - UDP_HLEN, 0);
    } else {
        // TCP options stay in the byte stream after the fixed region.
        out.extend_from_slice(th);
    }
    out.extend_from_slice(frame.payload);
    out
}

/// Clean a captured frame. Packets without transport payload are discarded.
pub fn clean_packet(record: &PcapRecord, opts: &CleanOptions) -> Result<Cleaned> {
    let frame = decode_frame(&record.data)?
        .ok_or_else(|| Error::Decode("not an IPv4 TCP/UDP frame".into()))?;
    Ok(clean_decoded(&frame, opts))
}

pub(crate) fn clean_decoded(frame: &DecodedFrame<'_>, opts: &CleanOptions) -> Cleaned {
    if frame.payload.is_empty() {
        return Cleaned::Discard;
    }
    if opts.drop_dns && (frame.src_port == DNS_PORT || frame.dst_port == DNS_PORT) {
        return Cleaned::Discard;
    }
    Cleaned::Kept(CleanPacket {
        bytes: vectorize(&cleaned_layout(frame), opts.p),
        original_payload_len: frame.payload.len() as u32,
    })
}

/// Truncate or zero-pad to exactly `p` bytes.
pub fn vectorize(cleaned: &[u8], p: usize) -> Vec<u8> {
    let mut out = vec![0u8; p];
    let n = cleaned.len().min(p);
    out[..n].copy_from_slice(&cleaned[..n]);
    out
}

/// Scale bytes into `[0, 1]` by dividing by 255.
pub fn standardize(bytes: &[u8]) -> Vec<f32> {
    bytes.iter().map(|&b| f32::from(b) / 255.0).collect()
}
