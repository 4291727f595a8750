use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{SatelliteId, TopologySnapshot};
use crate::{Error, Result};

/// Ordered satellite path with the latency of each hop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePath {
    pub sats: Vec<SatelliteId>,
    /// `hop_latencies[m]` is the delay from `sats[m]` to `sats[m + 1]` (ms).
    pub hop_latencies: Vec<f64>,
}

impl RoutePath {
    pub fn single(sat: SatelliteId) -> Self {
        Self {
            sats: vec![sat],
            hop_latencies: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sats.is_empty()
    }

    pub fn source(&self) -> SatelliteId {
        self.sats[0]
    }

    pub fn destination(&self) -> SatelliteId {
        *self.sats.last().expect("non-empty path")
    }

    pub fn total_latency(&self) -> f64 {
        self.hop_latencies.iter().sum()
    }

    /// Latency over the first `len` satellites (`len - 1` hops).
    pub fn prefix_latency(&self, len: usize) -> f64 {
        self.hop_latencies[..len.saturating_sub(1)].iter().sum()
    }

    /// The first `len` satellites as a path of their own.
    pub fn prefix(&self, len: usize) -> RoutePath {
        RoutePath {
            sats: self.sats[..len].to_vec(),
            hop_latencies: self.hop_latencies[..len.saturating_sub(1)].to_vec(),
        }
    }

    /// True when `other` is a strict prefix of this path.
    pub fn has_strict_prefix(&self, other: &RoutePath) -> bool {
        !other.is_empty() && other.len() < self.len() && self.sats[..other.len()] == other.sats[..]
    }

    pub fn position_of(&self, sat: SatelliteId) -> Option<usize> {
        self.sats.iter().position(|s| *s == sat)
    }
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    node: SatelliteId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-latency ISL path. Equal-latency alternatives resolve to the
/// smaller predecessor id.
pub fn original_path(
    snapshot: &TopologySnapshot,
    src: SatelliteId,
    dst: SatelliteId,
) -> Result<RoutePath> {
    if !snapshot.contains(src) || !snapshot.contains(dst) {
        return Err(Error::NoRoute {
            src: src.0,
            dst: dst.0,
        });
    }
    if src == dst {
        return Ok(RoutePath::single(src));
    }
    let n = snapshot.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<SatelliteId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src.0 as usize] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: src,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        let u = node.0 as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        if node == dst {
            break;
        }
        for &(nb, w) in snapshot.neighbors(node) {
            let v = nb.0 as usize;
            if done[v] {
                continue;
            }
            let cand = d + w;
            let better = cand < dist[v] || (cand == dist[v] && prev[v].map_or(true, |p| node < p));
            if better {
                dist[v] = cand;
                prev[v] = Some(node);
                heap.push(Entry {
                    dist: cand,
                    node: nb,
                });
            }
        }
    }
    if !done[dst.0 as usize] {
        return Err(Error::NoRoute {
            src: src.0,
            dst: dst.0,
        });
    }
    let mut sats = vec![dst];
    let mut cur = dst;
    while let Some(p) = prev[cur.0 as usize] {
        sats.push(p);
        cur = p;
    }
    sats.reverse();
    let hop_latencies = sats
        .windows(2)
        .map(|w| snapshot.edge_latency(w[0], w[1]).expect("path follows edges"))
        .collect();
    Ok(RoutePath {
        sats,
        hop_latencies,
    })
}
