use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Award, CollaboratorGroup, GroupStats, TaskId};

/// A candidate group with its discounted utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub group: CollaboratorGroup,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAuction {
    pub task: TaskId,
    pub budget: f64,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CstpResult {
    Awarded(Award),
    /// No candidate had positive utility.
    NoPositiveUtility,
    /// Every positive-utility candidate asked for more than the budget.
    NoAffordableGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CstpOutcome {
    pub task: TaskId,
    pub result: CstpResult,
}

impl CstpOutcome {
    pub fn award(&self) -> Option<&Award> {
        match &self.result {
            CstpResult::Awarded(a) => Some(a),
            _ => None,
        }
    }
}

fn log_count(sum: u64) -> f64 {
    if sum == 0 {
        0.0
    } else {
        (sum as f64).ln().max(0.0)
    }
}

fn exploration(n_sum: f64, n: u64) -> f64 {
    (2.0 * n_sum / n as f64).sqrt()
}

fn ratio(utility: f64, cost: f64) -> f64 {
    if cost > 0.0 {
        utility / cost
    } else {
        f64::INFINITY
    }
}

/// Utility-to-cost ratio plus the exploration bonus `sqrt(2 n_sum / n)`.
pub fn cstp_score(utility: f64, cost: f64, n_sum: f64, n: u64) -> f64 {
    ratio(utility, cost) + exploration(n_sum, n)
}

struct Live<'a> {
    cand: &'a Candidate,
    key: super::GroupKey,
    cost: f64,
}

/// Best positive-utility entry under `n_sum`; ties go to the smaller key.
fn best(live: &[Live<'_>], stats: &GroupStats, n_sum: f64) -> Option<(usize, f64)> {
    let mut out: Option<(usize, f64)> = None;
    for (i, l) in live.iter().enumerate() {
        if !(l.cand.utility > 0.0) {
            continue;
        }
        let s = cstp_score(l.cand.utility, l.cost, n_sum, stats.count(&l.key));
        out = match out {
            Some((j, bs)) if bs > s || (bs == s && live[j].key < l.key) => Some((j, bs)),
            _ => Some((i, s)),
        };
    }
    out
}

/// Winner selection and payment for each task in turn.
///
/// Per task: score every remaining positive-utility group, take the best,
/// and price it against the best score among the groups left after removing
/// it. If that price fits the budget the group wins, its dishes are paid in
/// proportion to their declared cost and its selection count goes up;
/// otherwise the next-best group is tried. A winner with no positive-utility
/// rival is paid `min(budget, C (1 + sqrt(2 n_sum / n)))`.
pub fn cstp(auctions: &[TaskAuction], stats: &mut GroupStats) -> Vec<CstpOutcome> {
    auctions
        .iter()
        .map(|a| CstpOutcome {
            task: a.task,
            result: select_one(a, stats),
        })
        .collect()
}

fn select_one(auction: &TaskAuction, stats: &mut GroupStats) -> CstpResult {
    let mut live: Vec<Live<'_>> = auction
        .candidates
        .iter()
        .map(|c| Live {
            cand: c,
            key: c.group.key(),
            cost: c.group.total_cost(),
        })
        .collect();
    let mut saw_positive = false;

    while !live.is_empty() {
        let n_sum = log_count(live.iter().map(|l| stats.count(&l.key)).sum());
        let Some((idx, _)) = best(&live, stats, n_sum) else {
            break;
        };
        saw_positive = true;
        let winner = live.remove(idx);
        let n_win = stats.count(&winner.key);
        let bonus = exploration(n_sum, n_win);

        let n_rest = log_count(live.iter().map(|l| stats.count(&l.key)).sum());
        let runner_up = best(&live, stats, n_rest).map(|(_, s)| s);

        let (payment, fallback) = match runner_up {
            Some(u) if u.is_finite() => ((winner.cand.utility + winner.cost * bonus) / u, false),
            Some(_) => (winner.cost, false),
            None => (auction.budget.min(winner.cost * (1.0 + bonus)), true),
        };
        if payment <= auction.budget && payment >= winner.cost {
            stats.increment(&winner.key);
            let dish_payments = split_payment(&winner.cand.group, winner.cost, payment);
            return CstpResult::Awarded(Award {
                task: auction.task,
                group: winner.key,
                group_payment: payment,
                dish_payments,
                utility: winner.cand.utility,
                total_cost: winner.cost,
                fallback,
            });
        }
    }
    if saw_positive {
        CstpResult::NoAffordableGroup
    } else {
        CstpResult::NoPositiveUtility
    }
}

fn split_payment(group: &CollaboratorGroup, total_cost: f64, payment: f64) -> BTreeMap<crate::constellation::DishId, f64> {
    group
        .bids
        .iter()
        .map(|b| {
            let share = if total_cost > 0.0 {
                b.cost / total_cost
            } else {
                1.0 / group.len() as f64
            };
            (b.dish, share * payment)
        })
        .collect()
}
