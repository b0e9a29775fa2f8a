#![allow(dead_code)]

use cgnn::ChainedGraph;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Golden capture: literal frames and their cleaned vectors at p = 64.
//
// Hosts: A = 192.168.1.10, B = 93.184.216.34, C = 8.8.8.8.
// ---------------------------------------------------------------------------

pub const GOLDEN_P: usize = 64;

/// TCP SYN, A:50000 -> B:443.
pub const SYN: [u8; 54] = [
    0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x28, 0x00, 0x01, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00, //
    0xc0, 0xa8, 0x01, 0x0a, 0x5d, 0xb8, 0xd8, 0x22, //
    0xc3, 0x50, 0x01, 0xbb, 0x00, 0x00, 0x00, 0x64, 0x00, 0x00, 0x00, 0x00, //
    0x50, 0x02, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00,
];

/// TCP SYN/ACK, B:443 -> A:50000.
pub const SYN_ACK: [u8; 54] = [
    0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x28, 0x00, 0x02, 0x40, 0x00, 0x38, 0x06, 0x00, 0x00, //
    0x5d, 0xb8, 0xd8, 0x22, 0xc0, 0xa8, 0x01, 0x0a, //
    0x01, 0xbb, 0xc3, 0x50, 0x00, 0x00, 0x01, 0x2c, 0x00, 0x00, 0x00, 0x65, //
    0x50, 0x12, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00,
];

/// TCP PSH/ACK with payload "GET ", A:50000 -> B:443.
pub const TCP_REQ: [u8; 58] = [
    0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x2c, 0x00, 0x03, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00, //
    0xc0, 0xa8, 0x01, 0x0a, 0x5d, 0xb8, 0xd8, 0x22, //
    0xc3, 0x50, 0x01, 0xbb, 0x00, 0x00, 0x00, 0x65, 0x00, 0x00, 0x01, 0x2d, //
    0x50, 0x18, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00, //
    0x47, 0x45, 0x54, 0x20,
];

/// TCP PSH/ACK with payload "OK", B:443 -> A:50000.
pub const TCP_RESP: [u8; 56] = [
    0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x2a, 0x00, 0x04, 0x40, 0x00, 0x38, 0x06, 0x00, 0x00, //
    0x5d, 0xb8, 0xd8, 0x22, 0xc0, 0xa8, 0x01, 0x0a, //
    0x01, 0xbb, 0xc3, 0x50, 0x00, 0x00, 0x01, 0x2d, 0x00, 0x00, 0x00, 0x69, //
    0x50, 0x18, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00, //
    0x4f, 0x4b,
];

/// UDP with payload "hi!", A:54321 -> C:53.
pub const UDP_DNS: [u8; 45] = [
    0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x1f, 0x00, 0x05, 0x00, 0x00, 0x40, 0x11, 0x00, 0x00, //
    0xc0, 0xa8, 0x01, 0x0a, 0x08, 0x08, 0x08, 0x08, //
    0xd4, 0x31, 0x00, 0x35, 0x00, 0x0b, 0x00, 0x00, //
    0x68, 0x69, 0x21,
];

/// ARP who-has, broadcast.
pub const ARP: [u8; 42] = [
    0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x08, 0x06, //
    0x00, 0x01, 0x08, 0x00, 0x06, 0x04, 0x00, 0x01, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55, //
    0xc0, 0xa8, 0x01, 0x0a, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xc0, 0xa8, 0x01, 0x01,
];

/// A lone SYN on a second port pair, A:50001 -> B:443.
pub const SYN_ONLY: [u8; 54] = [
    0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x08, 0x00, //
    0x45, 0x00, 0x00, 0x28, 0x00, 0x06, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00, //
    0xc0, 0xa8, 0x01, 0x0a, 0x5d, 0xb8, 0xd8, 0x22, //
    0xc3, 0x51, 0x01, 0xbb, 0x00, 0x00, 0x00, 0x10, 0x00, 0x00, 0x00, 0x00, //
    0x50, 0x02, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00,
];

pub const TCP_REQ_CLEAN: [u8; GOLDEN_P] = [
    0x45, 0x00, 0x00, 0x2c, 0x00, 0x03, 0x40, 0x00, 0x40, 0x06, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0xc3, 0x50, 0x01, 0xbb, 0x00, 0x00, 0x00, 0x65, 0x00, 0x00, 0x01, 0x2d, //
    0x50, 0x18, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00, //
    0x47, 0x45, 0x54, 0x20, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
];

pub const TCP_RESP_CLEAN: [u8; GOLDEN_P] = [
    0x45, 0x00, 0x00, 0x2a, 0x00, 0x04, 0x40, 0x00, 0x38, 0x06, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x01, 0xbb, 0xc3, 0x50, 0x00, 0x00, 0x01, 0x2d, 0x00, 0x00, 0x00, 0x69, //
    0x50, 0x18, 0xfa, 0xf0, 0x00, 0x00, 0x00, 0x00, //
    0x4f, 0x4b, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
];

/// UDP header widened from 8 to 20 bytes with zeros.
pub const UDP_DNS_CLEAN: [u8; GOLDEN_P] = [
    0x45, 0x00, 0x00, 0x1f, 0x00, 0x05, 0x00, 0x00, 0x40, 0x11, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0xd4, 0x31, 0x00, 0x35, 0x00, 0x0b, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x68, 0x69, 0x21, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
];

/// Classic little-endian microsecond pcap, snaplen 65535, Ethernet.
pub fn pcap_file(frames: &[&[u8]]) -> Vec<u8> {
    let mut out = vec![
        0xd4, 0xc3, 0xb2, 0xa1, 0x02, 0x00, 0x04, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
        0x00, //
        0xff, 0xff, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00,
    ];
    for (i, f) in frames.iter().enumerate() {
        let len = f.len() as u32;
        out.extend_from_slice(&(1_600_000_000u32 + i as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(f);
    }
    out
}

/// Every golden frame, in capture order.
pub fn golden_pcap() -> Vec<u8> {
    pcap_file(&[
        &SYN, &SYN_ACK, &TCP_REQ, &ARP, &TCP_RESP, &UDP_DNS, &SYN_ONLY,
    ])
}

// ---------------------------------------------------------------------------
// Synthetic traffic.
// ---------------------------------------------------------------------------

pub fn tcp_frame(src: [u8; 4], dst: [u8; 4], sport: u16, dport: u16, payload: &[u8]) -> Vec<u8> {
    let mut f = vec![0x02, 0, 0, 0, 0, 1, 0x02, 0, 0, 0, 0, 2, 0x08, 0x00];
    let total = (40 + payload.len()) as u16;
    f.extend_from_slice(&[
        0x45,
        0,
        (total >> 8) as u8,
        total as u8,
        0,
        1,
        0x40,
        0,
        64,
        6,
        0,
        0,
    ]);
    f.extend_from_slice(&src);
    f.extend_from_slice(&dst);
    f.extend_from_slice(&sport.to_be_bytes());
    f.extend_from_slice(&dport.to_be_bytes());
    f.extend_from_slice(&[0, 0, 0, 1, 0, 0, 0, 0, 0x50, 0x18, 0xfa, 0xf0, 0, 0, 0, 0]);
    f.extend_from_slice(payload);
    f
}

/// A capture of `sessions` TCP sessions whose payload bytes all equal `fill`.
/// Each session has 3 to 8 packets in alternating directions.
pub fn synthetic_pcap(fill: u8, sessions: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let client = [10, 1, 0, 5];
    let server = [172, 16, 0, 9];
    let mut frames = Vec::new();
    for s in 0..sessions {
        let port = 40000 + s as u16;
        for i in 0..rng.random_range(3..=8usize) {
            let payload = vec![fill; rng.random_range(4..=40usize)];
            frames.push(if i % 2 == 0 {
                tcp_frame(client, server, port, 443, &payload)
            } else {
                tcp_frame(server, client, 443, port, &payload)
            });
        }
    }
    let refs: Vec<&[u8]> = frames.iter().map(|f| f.as_slice()).collect();
    pcap_file(&refs)
}

/// Two separable classes: every byte of a label-0 graph is 0x11, every byte
/// of a label-1 graph is 0xEE. 3 to 8 vertices per graph, labels alternate.
pub fn synthetic_graphs(p: usize, per_class: usize, seed: u64) -> Vec<ChainedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2 * per_class)
        .map(|i| {
            let label = i % 2;
            let fill = if label == 0 { 0x11 } else { 0xEE };
            let n = rng.random_range(3..=8usize);
            ChainedGraph::new(p, vec![fill; n * p], label).unwrap()
        })
        .collect()
}

pub fn random_graph(rng: &mut ChaCha8Rng, p: usize, max_n: usize, m: usize) -> ChainedGraph {
    let n = rng.random_range(1..=max_n);
    let bytes = (0..n * p).map(|_| rng.random()).collect();
    ChainedGraph::new(p, bytes, rng.random_range(0..m)).unwrap()
}

// ---------------------------------------------------------------------------
// Dense reference model.
// ---------------------------------------------------------------------------

/// `D^-1/2 (A + I) D^-1/2` for the path graph on `n` vertices, built from
/// the adjacency matrix.
pub fn dense_propagation(n: usize) -> Array2<f64> {
    let mut a = Array2::<f64>::eye(n);
    for i in 0..n.saturating_sub(1) {
        a[[i, i + 1]] = 1.0;
        a[[i + 1, i]] = 1.0;
    }
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] / (deg[i] * deg[j]).sqrt())
}

/// Class probabilities for one graph using dense matrices and loops.
pub fn dense_forward(model: &cgnn::CgnnModel<f64>, x: &Array2<f64>) -> Vec<f64> {
    let n = x.nrows();
    let s = dense_propagation(n);
    let mut h = x.clone();
    for (l, theta) in model.params.thetas.iter().enumerate() {
        let k = if l == 0 { model.dims.k1 } else { model.dims.k2 };
        for _ in 0..k {
            h = s.dot(&h);
        }
        h = h.dot(theta).mapv(|v| v.max(0.0));
    }
    let width = h.ncols();
    let y: Vec<f64> = (0..width)
        .map(|j| {
            let col = h.column(j);
            match model.pooling {
                cgnn::PoolKind::Avg => col.sum() / n as f64,
                cgnn::PoolKind::Sum => col.sum(),
                cgnn::PoolKind::Max => col.fold(f64::NEG_INFINITY, |a, &b| a.max(b)),
            }
        })
        .collect();
    let m = model.dims.m;
    let logits: Vec<f64> = (0..m)
        .map(|c| {
            model.params.b[c]
                + (0..width)
                    .map(|j| model.params.w[[j, c]] * y[j])
                    .sum::<f64>()
        })
        .collect();
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|v| (v - top).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}
