use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Bid, CollaboratorGroup, GroupKey, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CgscParams {
    /// 𝒩: number of merge layers
    pub layers: usize,
    /// ℳ: cheapest groups carried from one layer to the next
    pub top_m: usize,
}

impl Default for CgscParams {
    fn default() -> Self {
        Self { layers: 2, top_m: 10 }
    }
}

fn cheapest(layer: &BTreeMap<GroupKey, CollaboratorGroup>, m: usize) -> Vec<&CollaboratorGroup> {
    let mut groups: Vec<(f64, &GroupKey, &CollaboratorGroup)> =
        layer.iter().map(|(k, g)| (g.total_cost(), k, g)).collect();
    groups.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    groups.into_iter().take(m).map(|(_, _, g)| g).collect()
}

/// Builds the candidate groups for one task.
///
/// Bids whose own offload latency (from `latency`) exceeds the task's delay
/// requirement are dropped. Layer 1 holds every remaining bid alone; each
/// further layer merges every pair of the ℳ cheapest groups of the previous
/// layer whose dishes do not overlap. Groups that cannot carry the task's
/// data or bandwidth, or whose declared cost exceeds the budget, are
/// discarded. The result is ordered by group key.
pub fn cgsc(
    task: &Task,
    bids: &[Bid],
    params: CgscParams,
    latency: impl Fn(&Bid) -> f64,
) -> Vec<CollaboratorGroup> {
    let mut all: BTreeMap<GroupKey, CollaboratorGroup> = BTreeMap::new();
    let mut layer: BTreeMap<GroupKey, CollaboratorGroup> = BTreeMap::new();
    for bid in bids.iter().filter(|b| latency(b) <= task.delay_req) {
        let g = CollaboratorGroup::singleton(bid.clone());
        layer.entry(g.key()).or_insert(g);
    }
    all.extend(layer.iter().map(|(k, g)| (k.clone(), g.clone())));

    for _ in 2..=params.layers {
        let top = cheapest(&layer, params.top_m);
        let mut next = BTreeMap::new();
        for (i, a) in top.iter().enumerate() {
            let ka = a.key();
            for b in &top[i + 1..] {
                if ka.is_disjoint(&b.key()) {
                    let merged = a.merge(b);
                    next.entry(merged.key()).or_insert(merged);
                }
            }
        }
        for (k, g) in &next {
            all.entry(k.clone()).or_insert_with(|| g.clone());
        }
        layer = next;
    }

    all.into_values()
        .filter(|g| g.total_capacity() >= task.data_amount && g.total_bandwidth() >= task.bandwidth_req)
        .filter(|g| g.total_cost() <= task.budget)
        .collect()
}
