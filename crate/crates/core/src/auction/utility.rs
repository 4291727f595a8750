use serde::{Deserialize, Serialize};

use super::{Bid, CollaboratorGroup, Task, UtilityWeights};
use crate::constellation::{RoutePath, TopologySnapshot};
use crate::power::{life_consumption, offload_energy, path_energy, BatteryState};
use crate::{Error, Result};

/// Unit prices of the dish cost model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prices {
    /// currency per GB
    pub per_gb: f64,
    /// currency per second of bandwidth reservation
    pub per_second: f64,
}

impl Default for Prices {
    fn default() -> Self {
        Self {
            per_gb: 0.09,
            per_second: 0.17,
        }
    }
}

/// Cost of receiving `capacity_mb` at `bandwidth_mbps`: data volume plus
/// reservation time.
pub fn dish_cost(capacity_mb: f64, bandwidth_mbps: f64, prices: &Prices) -> f64 {
    let gigabytes = capacity_mb / 8000.0;
    let reservation_s = capacity_mb / bandwidth_mbps;
    prices.per_gb * gigabytes + prices.per_second * reservation_s
}

/// Everything the utilities need to know about the network for one task.
#[derive(Debug, Clone, Copy)]
pub struct UtilityContext<'a> {
    pub snapshot: &'a TopologySnapshot,
    /// p^SAT
    pub path: &'a RoutePath,
    /// indexed by satellite id
    pub batteries: &'a [BatteryState],
    /// indexed by satellite id
    pub eclipsed: &'a [bool],
    /// J/Mb
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UtilityBreakdown {
    pub energy: f64,
    pub delay: f64,
    pub life: f64,
    pub total: f64,
}

/// Length of p^GRD for a bid: the original path up to and including the
/// bid's offloading satellite. Must be a strict prefix.
pub fn offload_prefix_len(path: &RoutePath, bid: &Bid) -> Result<usize> {
    match path.position_of(bid.offload_sat) {
        Some(i) if i + 1 < path.len() => Ok(i + 1),
        _ => Err(Error::UndefinedUtility(
            "offloading satellite must precede the destination on the original path",
        )),
    }
}

/// Traffic per bid, proportional to offered capacity.
pub fn split_traffic(task: &Task, group: &CollaboratorGroup) -> Vec<f64> {
    let total = group.total_capacity();
    if total <= 0.0 {
        return vec![task.data_amount / group.len() as f64; group.len()];
    }
    group
        .bids
        .iter()
        .map(|b| task.data_amount * b.capacity / total)
        .collect()
}

pub fn utility_energy(
    ctx: &UtilityContext<'_>,
    task: &Task,
    group: &CollaboratorGroup,
    splits: &[f64],
) -> Result<f64> {
    let original = path_energy(task.data_amount, ctx.path, ctx.epsilon);
    if original <= 0.0 {
        return Err(Error::UndefinedUtility("original path consumes no energy"));
    }
    let prefixes = group
        .bids
        .iter()
        .map(|b| Ok(ctx.path.prefix(offload_prefix_len(ctx.path, b)?)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&RoutePath> = prefixes.iter().collect();
    let offloaded = offload_energy(task.data_amount, splits, &refs, ctx.epsilon)?;
    Ok((original - offloaded) / original)
}

/// D^GRD for a single dish: prefix hops, the GSL, then the terrestrial leg.
pub fn dish_offload_latency(ctx: &UtilityContext<'_>, bid: &Bid) -> Result<f64> {
    let len = offload_prefix_len(ctx.path, bid)?;
    let gsl = ctx
        .snapshot
        .gsl_latency(bid.offload_sat, bid.dish)
        .ok_or(Error::UndefinedUtility("dish missing from snapshot"))?;
    Ok(ctx.path.prefix_latency(len) + gsl + bid.terrestrial_latency)
}

/// Slowest member of the group.
pub fn group_offload_latency(ctx: &UtilityContext<'_>, group: &CollaboratorGroup) -> Result<f64> {
    group
        .bids
        .iter()
        .map(|b| dish_offload_latency(ctx, b))
        .try_fold(f64::NEG_INFINITY, |acc, l| Ok(acc.max(l?)))
}

pub fn utility_delay(ctx: &UtilityContext<'_>, _task: &Task, group: &CollaboratorGroup) -> Result<f64> {
    let original = ctx.path.total_latency();
    if original <= 0.0 {
        return Err(Error::UndefinedUtility("original path has zero latency"));
    }
    let offloaded = group_offload_latency(ctx, group)?;
    Ok((original - offloaded) / original)
}

/// Level of `battery` after routing `traffic` Mb, assuming only eclipsed
/// satellites draw routing energy from the battery.
fn level_after(battery: &BatteryState, from: f64, eclipsed: bool, traffic: f64, epsilon: f64) -> f64 {
    if eclipsed {
        (from - traffic * epsilon / battery.capacity).max(0.0)
    } else {
        from
    }
}

/// Service-life saving on the hops each split skips, normalised by the
/// life cost of carrying the whole task on the original path.
///
/// Splits drain a satellite one after another in group order, so the
/// per-split consumptions add up to the consumption of the combined traffic.
/// When a satellite on the path has no lifespan left its cost is infinite:
/// the utility is then 1 if the group skips such a satellite and 0 otherwise.
pub fn utility_life(
    ctx: &UtilityContext<'_>,
    task: &Task,
    group: &CollaboratorGroup,
    splits: &[f64],
) -> Result<f64> {
    let prefix_lens = group
        .bids
        .iter()
        .map(|b| offload_prefix_len(ctx.path, b))
        .collect::<Result<Vec<_>>>()?;

    let dead = |m: usize| ctx.batteries[ctx.path.sats[m].0 as usize].remaining_lifespan <= 0.0;
    if (0..ctx.path.len()).any(dead) {
        let skips_dead = prefix_lens
            .iter()
            .any(|&len| (len..ctx.path.len()).any(dead));
        return Ok(if skips_dead { 1.0 } else { 0.0 });
    }

    let mut denominator = 0.0;
    for sat in &ctx.path.sats {
        let i = sat.0 as usize;
        let b = &ctx.batteries[i];
        let after = level_after(b, b.level, ctx.eclipsed[i], task.data_amount, ctx.epsilon);
        denominator += life_consumption(b.level, after, b.chemistry)? * b.wear_multiplier();
    }
    if denominator <= 0.0 {
        return Ok(0.0);
    }

    let mut levels: Vec<f64> = ctx
        .path
        .sats
        .iter()
        .map(|s| ctx.batteries[s.0 as usize].level)
        .collect();
    let mut numerator = 0.0;
    for (len, split) in prefix_lens.iter().zip(splits) {
        for m in *len..ctx.path.len() {
            let i = ctx.path.sats[m].0 as usize;
            let b = &ctx.batteries[i];
            let after = level_after(b, levels[m], ctx.eclipsed[i], *split, ctx.epsilon);
            numerator += life_consumption(levels[m], after, b.chemistry)? * b.wear_multiplier();
            levels[m] = after;
        }
    }
    Ok(numerator / denominator)
}

pub fn total_utility(weights: &UtilityWeights, energy: f64, delay: f64, life: f64) -> f64 {
    weights.energy * energy + weights.delay * delay + weights.life * life
}

impl UtilityBreakdown {
    pub fn evaluate(
        ctx: &UtilityContext<'_>,
        weights: &UtilityWeights,
        task: &Task,
        group: &CollaboratorGroup,
    ) -> Result<Self> {
        let splits = split_traffic(task, group);
        let energy = utility_energy(ctx, task, group, &splits)?;
        let delay = utility_delay(ctx, task, group)?;
        let life = utility_life(ctx, task, group, &splits)?;
        Ok(Self {
            energy,
            delay,
            life,
            total: total_utility(weights, energy, delay, life),
        })
    }
}
