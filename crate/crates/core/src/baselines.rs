//! Single-dish comparison schemes.
//!
//! Each scheme filters bids that individually meet the task's delay,
//! bandwidth and data requirements, scores them, and pays the winner its
//! declared cost if that fits the budget. Scores are min-max normalised over
//! the feasible set; a set whose values are all equal normalises to 0.5.
//! Ties go to the smallest dish id.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::auction::{
    dish_offload_latency, utility_delay, Award, Bid, CollaboratorGroup, Task, UtilityBreakdown,
    UtilityContext, UtilityWeights,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Susco,
    Service,
    Smtsn,
    Falcon,
}

impl SchemeChoice {
    pub const ALL: [SchemeChoice; 4] = [
        SchemeChoice::Susco,
        SchemeChoice::Service,
        SchemeChoice::Smtsn,
        SchemeChoice::Falcon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeChoice::Susco => "susco",
            SchemeChoice::Service => "service",
            SchemeChoice::Smtsn => "smtsn",
            SchemeChoice::Falcon => "falcon",
        }
    }

    pub fn is_baseline(self) -> bool {
        self != SchemeChoice::Susco
    }
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme `{s}`")))
    }
}

struct Feasible<'b> {
    bid: &'b Bid,
    latency: f64,
}

fn feasible_bids<'b>(task: &Task, bids: &'b [Bid], ctx: &UtilityContext<'_>) -> Result<Vec<Feasible<'b>>> {
    let mut out = Vec::new();
    for bid in bids {
        if bid.bandwidth < task.bandwidth_req || bid.capacity < task.data_amount {
            continue;
        }
        let latency = dish_offload_latency(ctx, bid)?;
        if latency <= task.delay_req {
            out.push(Feasible { bid, latency });
        }
    }
    Ok(out)
}

/// Min-max normalisation; all-equal inputs map to 0.5.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Index of the highest score; ties to the smallest dish id.
fn argmax(feasible: &[Feasible<'_>], scores: &[f64]) -> Option<usize> {
    (0..feasible.len()).max_by(|&a, &b| {
        scores[a]
            .total_cmp(&scores[b])
            .then_with(|| feasible[b].bid.dish.cmp(&feasible[a].bid.dish))
    })
}

fn award(
    task: &Task,
    bid: &Bid,
    ctx: &UtilityContext<'_>,
    weights: &UtilityWeights,
) -> Result<Option<Award>> {
    if bid.cost > task.budget {
        return Ok(None);
    }
    let group = CollaboratorGroup::singleton(bid.clone());
    let utility = UtilityBreakdown::evaluate(ctx, weights, task, &group)?.total;
    Ok(Some(Award {
        task: task.id,
        group: group.key(),
        group_payment: bid.cost,
        dish_payments: BTreeMap::from([(bid.dish, bid.cost)]),
        utility,
        total_cost: bid.cost,
        fallback: false,
    }))
}

fn latency_improvement(task: &Task, feasible: &[Feasible<'_>], ctx: &UtilityContext<'_>) -> Result<Vec<f64>> {
    feasible
        .iter()
        .map(|f| utility_delay(ctx, task, &CollaboratorGroup::singleton(f.bid.clone())))
        .collect()
}

/// Equal weight on normalised latency improvement and normalised bandwidth.
pub fn select_service(
    task: &Task,
    bids: &[Bid],
    ctx: &UtilityContext<'_>,
    weights: &UtilityWeights,
) -> Result<Option<Award>> {
    let feasible = feasible_bids(task, bids, ctx)?;
    let latency = normalize(&latency_improvement(task, &feasible, ctx)?);
    let bandwidth = normalize(&feasible.iter().map(|f| f.bid.bandwidth).collect::<Vec<_>>());
    let scores: Vec<f64> = latency.iter().zip(&bandwidth).map(|(l, b)| 0.5 * l + 0.5 * b).collect();
    match argmax(&feasible, &scores) {
        Some(i) => award(task, feasible[i].bid, ctx, weights),
        None => Ok(None),
    }
}

/// Equal weight on normalised service-life utility and normalised latency
/// improvement.
pub fn select_smtsn(
    task: &Task,
    bids: &[Bid],
    ctx: &UtilityContext<'_>,
    weights: &UtilityWeights,
) -> Result<Option<Award>> {
    let feasible = feasible_bids(task, bids, ctx)?;
    let life = feasible
        .iter()
        .map(|f| {
            crate::auction::utility_life(
                ctx,
                task,
                &CollaboratorGroup::singleton(f.bid.clone()),
                &[task.data_amount],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let life = normalize(&life);
    let latency = normalize(&latency_improvement(task, &feasible, ctx)?);
    let scores: Vec<f64> = life.iter().zip(&latency).map(|(s, l)| 0.5 * s + 0.5 * l).collect();
    match argmax(&feasible, &scores) {
        Some(i) => award(task, feasible[i].bid, ctx, weights),
        None => Ok(None),
    }
}

/// Lowest offloading latency.
pub fn select_falcon(
    task: &Task,
    bids: &[Bid],
    ctx: &UtilityContext<'_>,
    weights: &UtilityWeights,
) -> Result<Option<Award>> {
    let feasible = feasible_bids(task, bids, ctx)?;
    let scores: Vec<f64> = feasible.iter().map(|f| -f.latency).collect();
    match argmax(&feasible, &scores) {
        Some(i) => award(task, feasible[i].bid, ctx, weights),
        None => Ok(None),
    }
}

/// Dispatches to the baseline named by `scheme`. `Susco` is not a baseline
/// and yields an error.
pub fn select_baseline(
    scheme: SchemeChoice,
    task: &Task,
    bids: &[Bid],
    ctx: &UtilityContext<'_>,
    weights: &UtilityWeights,
) -> Result<Option<Award>> {
    match scheme {
        SchemeChoice::Service => select_service(task, bids, ctx, weights),
        SchemeChoice::Smtsn => select_smtsn(task, bids, ctx, weights),
        SchemeChoice::Falcon => select_falcon(task, bids, ctx, weights),
        SchemeChoice::Susco => Err(Error::InvalidConfig("susco is not a baseline scheme".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation() {
        assert_eq!(normalize(&[1.0, 3.0, 2.0]), vec![0.0, 1.0, 0.5]);
        assert_eq!(normalize(&[4.0, 4.0]), vec![0.5, 0.5]);
        assert!(normalize(&[]).is_empty());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeChoice::ALL {
            assert_eq!(s.as_str().parse::<SchemeChoice>().unwrap(), s);
        }
        assert!("nope".parse::<SchemeChoice>().is_err());
        assert!(!SchemeChoice::Susco.is_baseline());
    }
}
