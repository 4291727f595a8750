use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constellation::{DishId, SatelliteId};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An offloading request routed from `source_sat` to `dest_sat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub source_sat: SatelliteId,
    pub dest_sat: SatelliteId,
    /// 𝒟, ms
    pub delay_req: f64,
    /// ℬ, Mb/s
    pub bandwidth_req: f64,
    /// 𝒯, Mb
    pub data_amount: f64,
    /// β^τ, currency
    pub budget: f64,
}

impl Task {
    pub fn validate(&self) -> Result<()> {
        if [self.delay_req, self.bandwidth_req, self.data_amount, self.budget]
            .iter()
            .all(|v| *v > 0.0)
        {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "task {} needs positive delay, bandwidth, data amount and budget",
                self.id
            )))
        }
    }
}

/// A dish's offer for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub dish: DishId,
    /// ξ: dish-to-destination latency estimate (ms)
    pub terrestrial_latency: f64,
    /// γ (Mb/s)
    pub bandwidth: f64,
    /// Δ (Mb)
    pub capacity: f64,
    /// declared cost c
    pub cost: f64,
    pub offload_sat: SatelliteId,
}

/// Sorted dish ids identifying a group across intervals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey(pub Vec<DishId>);

impl GroupKey {
    pub fn new(mut dishes: Vec<DishId>) -> Self {
        dishes.sort();
        dishes.dedup();
        Self(dishes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_disjoint(&self, other: &GroupKey) -> bool {
        // both sorted
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Bids acting as one offload target, ordered by dish id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollaboratorGroup {
    pub bids: Vec<Bid>,
}

impl CollaboratorGroup {
    pub fn new(mut bids: Vec<Bid>) -> Self {
        bids.sort_by_key(|b| b.dish);
        Self { bids }
    }

    pub fn singleton(bid: Bid) -> Self {
        Self { bids: vec![bid] }
    }

    pub fn key(&self) -> GroupKey {
        GroupKey(self.bids.iter().map(|b| b.dish).collect())
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn total_cost(&self) -> f64 {
        self.bids.iter().map(|b| b.cost).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.bids.iter().map(|b| b.capacity).sum()
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.bids.iter().map(|b| b.bandwidth).sum()
    }

    /// Union of two groups with disjoint dishes.
    pub fn merge(&self, other: &CollaboratorGroup) -> CollaboratorGroup {
        let mut bids = self.bids.clone();
        bids.extend(other.bids.iter().cloned());
        CollaboratorGroup::new(bids)
    }
}

/// Selection counts n_λ, persisted across intervals by group key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    counts: BTreeMap<GroupKey, u64>,
}

impl GroupStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// n_λ, 1 for a group never selected before.
    pub fn count(&self, key: &GroupKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(1).max(1)
    }

    pub fn set(&mut self, key: GroupKey, n: u64) {
        self.counts.insert(key, n.max(1));
    }

    pub fn increment(&mut self, key: &GroupKey) {
        let n = self.count(key);
        self.counts.insert(key.clone(), n + 1);
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupKey, u64)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityWeights {
    pub energy: f64,
    pub delay: f64,
    pub life: f64,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        Self {
            energy: 0.3,
            delay: 0.4,
            life: 0.3,
        }
    }
}

impl UtilityWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.energy, self.delay, self.life];
        if w.iter().any(|v| *v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "utility weights must be non-negative and sum to 1 (got {w:?})"
            )));
        }
        Ok(())
    }
}

/// Winning group and payments for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Award {
    pub task: TaskId,
    pub group: GroupKey,
    pub group_payment: f64,
    pub dish_payments: BTreeMap<DishId, f64>,
    /// Discounted utility of the winning group.
    pub utility: f64,
    /// Declared total cost of the winning group.
    pub total_cost: f64,
    /// Paid through the no-competition fallback rule.
    #[serde(default)]
    pub fallback: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_sorted_and_displayed() {
        let k = GroupKey::new(vec![DishId(7), DishId(2)]);
        assert_eq!(k.to_string(), "2+7");
        assert!(k.is_disjoint(&GroupKey::new(vec![DishId(3)])));
        assert!(!k.is_disjoint(&GroupKey::new(vec![DishId(7), DishId(9)])));
    }

    #[test]
    fn stats_start_at_one() {
        let mut s = GroupStats::new();
        let k = GroupKey::new(vec![DishId(1)]);
        assert_eq!(s.count(&k), 1);
        s.increment(&k);
        assert_eq!(s.count(&k), 2);
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(UtilityWeights::default().validate().is_ok());
        assert!(UtilityWeights {
            energy: 0.5,
            delay: 0.5,
            life: 0.5
        }
        .validate()
        .is_err());
    }
}
