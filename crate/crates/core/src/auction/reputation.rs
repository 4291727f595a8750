use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CollaboratorGroup;
use crate::constellation::DishId;

/// Failure history of a dish: running failure rate over the auctions it won.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DishReputation {
    pub failure_est: f64,
    pub win_count: u64,
}

/// Incremental failure-rate update. Dishes that did not win keep their estimate.
pub fn update_failure(rep: DishReputation, won_last_interval: bool, failed: bool) -> DishReputation {
    if !won_last_interval {
        return rep;
    }
    let n = rep.win_count as f64;
    let sigma = if failed { 1.0 } else { 0.0 };
    DishReputation {
        failure_est: (rep.failure_est * n + sigma) / (n + 1.0),
        win_count: rep.win_count + 1,
    }
}

/// Scales a group's utility by the probability that none of its dishes fails.
pub fn discounted_utility(
    total: f64,
    group: &CollaboratorGroup,
    reputations: &BTreeMap<DishId, DishReputation>,
) -> f64 {
    group.bids.iter().fold(total, |acc, b| {
        let f = reputations.get(&b.dish).map_or(0.0, |r| r.failure_est);
        acc * (1.0 - f)
    })
}
