//! Classic libpcap container format (not pcapng).
//!
//! A 24-byte global header followed by records, each a 16-byte header and
//! `captured_len` bytes of link-layer frame. Header byte order and timestamp
//! resolution are both encoded in the magic number.

use crate::error::{Error, Result};

pub const MAGIC_MICROS: u32 = 0xa1b2_c3d4;
pub const MAGIC_NANOS: u32 = 0xa1b2_3c4d;
pub const LINKTYPE_ETHERNET: u32 = 1;

const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsResolution {
    Micro,
    Nano,
}

/// One captured frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcapRecord {
    pub ts_sec: u32,
    /// Micro- or nanoseconds, depending on the file's [`TsResolution`].
    pub ts_frac: u32,
    pub captured_len: u32,
    pub original_len: u32,
    pub data: Vec<u8>,
}

impl PcapRecord {
    pub fn new(ts_sec: u32, ts_frac: u32, data: Vec<u8>) -> Self {
        let len = data.len() as u32;
        PcapRecord {
            ts_sec,
            ts_frac,
            captured_len: len,
            original_len: len,
            data,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcapHeader {
    pub byte_order: ByteOrder,
    pub resolution: TsResolution,
    pub version_major: u16,
    pub version_minor: u16,
    pub thiszone: i32,
    pub sigfigs: u32,
    pub snaplen: u32,
    pub link_type: u32,
}

impl Default for PcapHeader {
    fn default() -> Self {
        PcapHeader {
            byte_order: ByteOrder::Little,
            resolution: TsResolution::Micro,
            version_major: 2,
            version_minor: 4,
            thiszone: 0,
            sigfigs: 0,
            snaplen: 65535,
            link_type: LINKTYPE_ETHERNET,
        }
    }
}

/// A parsed capture file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcapCapture {
    pub header: PcapHeader,
    pub records: Vec<PcapRecord>,
    /// Set when the last record header claimed more bytes than remained.
    /// Records before it are still returned.
    pub truncated: bool,
}

struct Reader<'a> {
    buf: &'a [u8],
    order: ByteOrder,
}

impl Reader<'_> {
    fn u16_at(&self, off: usize) -> u16 {
        let b = [self.buf[off], self.buf[off + 1]];
        match self.order {
            ByteOrder::Little => u16::from_le_bytes(b),
            ByteOrder::Big => u16::from_be_bytes(b),
        }
    }

    fn u32_at(&self, off: usize) -> u32 {
        let b: [u8; 4] = self.buf[off..off + 4].try_into().unwrap();
        match self.order {
            ByteOrder::Little => u32::from_le_bytes(b),
            ByteOrder::Big => u32::from_be_bytes(b),
        }
    }
}

/// Parse a classic pcap file held in memory.
pub fn parse_pcap(file_bytes: &[u8]) -> Result<PcapCapture> {
    if file_bytes.len() < 4 {
        return Err(Error::BadMagic {
            expected: "pcap",
            found: hex(file_bytes),
        });
    }
    let raw = [file_bytes[0], file_bytes[1], file_bytes[2], file_bytes[3]];
    let (byte_order, resolution) = match (u32::from_le_bytes(raw), u32::from_be_bytes(raw)) {
        (MAGIC_MICROS, _) => (ByteOrder::Little, TsResolution::Micro),
        (_, MAGIC_MICROS) => (ByteOrder::Big, TsResolution::Micro),
        (MAGIC_NANOS, _) => (ByteOrder::Little, TsResolution::Nano),
        (_, MAGIC_NANOS) => (ByteOrder::Big, TsResolution::Nano),
        _ => {
            return Err(Error::BadMagic {
                expected: "pcap",
                found: hex(&raw),
            })
        }
    };
    if file_bytes.len() < GLOBAL_HEADER_LEN {
        return Err(Error::CorruptLength(format!(
            "pcap global header needs {GLOBAL_HEADER_LEN} bytes, file has {}",
            file_bytes.len()
        )));
    }
    let rd = Reader {
        buf: file_bytes,
        order: byte_order,
    };
    let header = PcapHeader {
        byte_order,
        resolution,
        version_major: rd.u16_at(4),
        version_minor: rd.u16_at(6),
        thiszone: rd.u32_at(8) as i32,
        sigfigs: rd.u32_at(12),
        snaplen: rd.u32_at(16),
        link_type: rd.u32_at(20),
    };
    if header.link_type != LINKTYPE_ETHERNET {
        return Err(Error::UnsupportedLinkType(header.link_type));
    }

    let mut records = Vec::new();
    let mut truncated = false;
    let mut off = GLOBAL_HEADER_LEN;
    while off < file_bytes.len() {
        if file_bytes.len() - off < RECORD_HEADER_LEN {
            truncated = true;
            break;
        }
        let captured_len = rd.u32_at(off + 8);
        if captured_len > header.snaplen {
            return Err(Error::RecordExceedsSnaplen {
                index: records.len(),
                captured_len,
                snaplen: header.snaplen,
            });
        }
        let body = off + RECORD_HEADER_LEN;
        let end = body + captured_len as usize;
        if end > file_bytes.len() {
            truncated = true;
            break;
        }
        records.push(PcapRecord {
            ts_sec: rd.u32_at(off),
            ts_frac: rd.u32_at(off + 4),
            captured_len,
            original_len: rd.u32_at(off + 12),
            data: file_bytes[body..end].to_vec(),
        });
        off = end;
    }
    Ok(PcapCapture {
        header,
        records,
        truncated,
    })
}

/// Serialize a capture using the byte order and resolution in its header.
pub fn write_pcap(capture: &PcapCapture) -> Vec<u8> {
    let h = &capture.header;
    let put32 = |out: &mut Vec<u8>, v: u32| match h.byte_order {
        ByteOrder::Little => out.extend_from_slice(&v.to_le_bytes()),
        ByteOrder::Big => out.extend_from_slice(&v.to_be_bytes()),
    };
    let put16 = |out: &mut Vec<u8>, v: u16| match h.byte_order {
        ByteOrder::Little => out.extend_from_slice(&v.to_le_bytes()),
        ByteOrder::Big => out.extend_from_slice(&v.to_be_bytes()),
    };
    let body: usize = capture
        .records
        .iter()
        .map(|r| RECORD_HEADER_LEN + r.data.len())
        .sum();
    let mut out = Vec::with_capacity(GLOBAL_HEADER_LEN + body);
    put32(
        &mut out,
        match h.resolution {
            TsResolution::Micro => MAGIC_MICROS,
            TsResolution::Nano => MAGIC_NANOS,
        },
    );
    put16(&mut out, h.version_major);
    put16(&mut out, h.version_minor);
    put32(&mut out, h.thiszone as u32);
    put32(&mut out, h.sigfigs);
    put32(&mut out, h.snaplen);
    put32(&mut out, h.link_type);
    for r in &capture.records {
        put32(&mut out, r.ts_sec);
        put32(&mut out, r.ts_frac);
        put32(&mut out, r.data.len() as u32);
        put32(&mut out, r.original_len);
        out.extend_from_slice(&r.data);
    }
    out
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
