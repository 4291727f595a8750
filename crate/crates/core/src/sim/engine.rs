//! The interval loop.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{IntervalMetrics, ScenarioSummary};
use super::rng;
use super::tasks::{generate_tasks, GeneratedTask};
use super::ScenarioConfig;
use crate::auction::{
    cgsc, cstp, discounted_utility, dish_cost, dish_offload_latency, offload_prefix_len,
    split_traffic, update_failure, Award, Bid, Candidate, CollaboratorGroup, CstpResult,
    DishReputation, GroupStats, Prices, Task, TaskAuction, UtilityBreakdown, UtilityContext,
};
use crate::baselines::select_baseline;
use crate::constellation::{
    build_snapshot, generate_walker, in_eclipse, load_catalog, original_path, terrestrial_latency,
    ConstellationConfig, DishId, DishSite, GeoPoint, OrbitalState, RoutePath, SatelliteId,
    SnapshotSettings, TopologySnapshot,
};
use crate::power::{step_battery, BatteryState};
use crate::{Error, Result};

/// A failed split waiting to be resent over the hops it skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retransmission {
    pub task: u32,
    pub sats: Vec<SatelliteId>,
    /// Mb
    pub traffic: f64,
    /// J
    pub energy: f64,
    /// ms added to the task's completion time
    pub latency_penalty: f64,
}

/// Everything carried from one interval to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub interval: u32,
    /// Indexed by satellite id.
    pub batteries: Vec<BatteryState>,
    pub reputations: BTreeMap<DishId, DishReputation>,
    pub stats: GroupStats,
    pub pending: Vec<Retransmission>,
    pub next_task_id: u32,
}

/// Per-dish outcome of an award.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DishOutcome {
    pub dish: DishId,
    pub split: f64,
    pub success: bool,
    pub paid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffloadOutcome {
    pub dishes: Vec<DishOutcome>,
    pub retransmitted: bool,
    /// ms, including any retransmission
    pub realized_latency: f64,
    /// J spent by satellites on this task in its own interval
    pub realized_energy: f64,
}

/// One auction transcript line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub interval: u32,
    pub task_id: u32,
    pub platform_sat: Option<u32>,
    pub candidate_group_count: usize,
    pub winner_key: String,
    pub utility: Option<f64>,
    pub group_payment: Option<f64>,
    /// `dish:payment` pairs joined by `;`, only for dishes that delivered.
    pub per_dish_payments: String,
    pub outcome: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub metrics: Vec<IntervalMetrics>,
    pub transcript: Vec<TranscriptRow>,
    pub summary: ScenarioSummary,
}

/// The first satellite before the destination that sees at least one dish.
pub fn select_platform_satellite(path: &RoutePath, snapshot: &TopologySnapshot) -> Option<SatelliteId> {
    let n = path.len();
    if n < 2 {
        return None;
    }
    path.sats[..n - 1]
        .iter()
        .copied()
        .find(|s| !snapshot.visible(*s).is_empty())
}

pub struct Simulation {
    config: ScenarioConfig,
    constellation: ConstellationConfig,
    orbits: Vec<OrbitalState>,
    dishes: Vec<DishSite>,
    dish_index: BTreeMap<DishId, usize>,
    prices: BTreeMap<DishId, Prices>,
    state: SimState,
    metrics: Vec<IntervalMetrics>,
    transcript: Vec<TranscriptRow>,
}

enum Selection {
    Unserved(&'static str),
    Awarded { award: Award, group: CollaboratorGroup },
}

impl Simulation {
    /// Loads the dish catalog named in the config.
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let dishes = load_catalog(&config.catalog_path())?;
        Self::with_dishes(config, dishes)
    }

    pub fn with_dishes(config: ScenarioConfig, mut dishes: Vec<DishSite>) -> Result<Self> {
        config.validate()?;
        for d in &dishes {
            d.validate()?;
        }
        dishes.sort_by_key(|d| d.id);
        if dishes.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidConfig("duplicate dish id".into()));
        }
        let seed = config.seed;
        assign_failure_rates(&config, &mut dishes);

        let spread = config.auction.price_spread;
        let prices = dishes
            .iter()
            .map(|d| {
                let f = 1.0 + spread * (2.0 * rng::unit(seed, "price", &[u64::from(d.id.0)]) - 1.0);
                let p = config.auction.prices;
                (
                    d.id,
                    Prices {
                        per_gb: p.per_gb * f,
                        per_second: p.per_second * f,
                    },
                )
            })
            .collect();

        let constellation = config.constellation_config();
        let orbits = generate_walker(&constellation, config.network.epoch);
        let b = &config.battery;
        let mut brng = rng::substream(seed, "battery", 0);
        let batteries = (0..orbits.len())
            .map(|_| BatteryState {
                level: brng.gen_range(b.initial_level.lo..=b.initial_level.hi),
                remaining_lifespan: b.max_lifespan * brng.gen_range(b.initial_lifespan.lo..=b.initial_lifespan.hi),
                max_lifespan: b.max_lifespan,
                chemistry: b.chemistry,
                capacity: b.capacity,
            })
            .collect();
        let reputations = dishes.iter().map(|d| (d.id, DishReputation::default())).collect();
        let dish_index = dishes.iter().enumerate().map(|(i, d)| (d.id, i)).collect();
        Ok(Self {
            config,
            constellation,
            orbits,
            dishes,
            dish_index,
            prices,
            state: SimState {
                interval: 0,
                batteries,
                reputations,
                stats: GroupStats::new(),
                pending: Vec::new(),
                next_task_id: 0,
            },
            metrics: Vec::new(),
            transcript: Vec::new(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// Dishes with the failure rates in effect for this run.
    pub fn dishes(&self) -> &[DishSite] {
        &self.dishes
    }

    pub fn metrics(&self) -> &[IntervalMetrics] {
        &self.metrics
    }

    pub fn transcript(&self) -> &[TranscriptRow] {
        &self.transcript
    }

    pub fn is_finished(&self) -> bool {
        self.state.interval >= self.config.num_intervals
    }

    pub fn snapshot(&self, interval: u32) -> Result<TopologySnapshot> {
        let settings = SnapshotSettings {
            config: &self.constellation,
            interval_length: self.config.interval_length,
            epoch: self.config.network.epoch,
            sun_longitude_deg: self.config.network.sun_longitude_deg,
            latency: &self.config.latency,
        };
        let seed = self.config.seed;
        let load = self.config.network.isl_load;
        build_snapshot(&settings, &self.orbits, &self.dishes, interval, |a, b| {
            let u = rng::unit(seed, "isl-load", &[u64::from(interval), u64::from(a.0), u64::from(b.0)]);
            load.lo + (load.hi - load.lo) * u
        })
    }

    /// Tasks the given interval generates, before budgets are assigned.
    pub fn tasks_for(&self, snapshot: &TopologySnapshot, first_id: u32) -> Vec<GeneratedTask> {
        let mut r = rng::substream(self.config.seed, "tasks", u64::from(snapshot.interval));
        generate_tasks(snapshot, &self.config, first_id, &mut r)
    }

    fn bids(
        &self,
        snapshot: &TopologySnapshot,
        platform: SatelliteId,
        task: &Task,
        destination: &GeoPoint,
        remaining: Option<&BTreeMap<DishId, f64>>,
    ) -> Vec<Bid> {
        snapshot
            .visible(platform)
            .iter()
            .filter_map(|id| {
                let dish = &self.dishes[self.dish_index[id]];
                let full = dish.bandwidth * self.config.interval_length;
                let free = remaining.map_or(full, |r| r[id]);
                if free <= 0.0 {
                    return None;
                }
                let capacity = free.min(task.data_amount);
                Some(Bid {
                    dish: *id,
                    terrestrial_latency: terrestrial_latency(dish, destination, &self.config.latency),
                    bandwidth: dish.bandwidth,
                    capacity,
                    cost: dish_cost(capacity, dish.bandwidth, &self.prices[id]),
                    offload_sat: platform,
                })
            })
            .collect()
    }

    /// Runs every remaining interval.
    pub fn run(&mut self) -> Result<()> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(())
    }

    /// Results so far, leaving the simulation usable.
    pub fn result(&self) -> ScenarioResult {
        ScenarioResult {
            metrics: self.metrics.clone(),
            transcript: self.transcript.clone(),
            summary: ScenarioSummary::from_metrics(&self.metrics),
        }
    }

    pub fn into_result(self) -> ScenarioResult {
        let summary = ScenarioSummary::from_metrics(&self.metrics);
        ScenarioResult {
            metrics: self.metrics,
            transcript: self.transcript,
            summary,
        }
    }

    /// Advances one interval and returns its metrics.
    pub fn step(&mut self) -> Result<&IntervalMetrics> {
        let tau = self.state.interval;
        let length = self.config.interval_length;
        let eps = self.config.energy.epsilon;
        let snapshot = self.snapshot(tau)?;
        let eclipsed: Vec<bool> = snapshot
            .sat_positions
            .iter()
            .map(|p| in_eclipse(*p, snapshot.sun_direction))
            .collect();
        let generated = self.tasks_for(&snapshot, self.state.next_task_id);
        self.state.next_task_id += generated.len() as u32;

        let n = snapshot.len();
        let mut traffic_real = vec![0.0; n];
        let mut traffic_cf = vec![0.0; n];
        let mut m = IntervalMetrics {
            interval: tau,
            ..Default::default()
        };
        for r in std::mem::take(&mut self.state.pending) {
            for s in &r.sats {
                traffic_real[s.0 as usize] += r.traffic;
            }
            m.reduced_energy -= r.energy;
            m.reduced_latency -= r.latency_penalty;
        }

        let mut remaining: BTreeMap<DishId, f64> = self
            .dishes
            .iter()
            .map(|d| (d.id, d.bandwidth * length))
            .collect();
        let mut reputation_updates: Vec<(DishId, bool)> = Vec::new();
        let mut ratio_sum = 0.0;
        // Selection counts are committed back once the interval is done.
        let mut stats = std::mem::take(&mut self.state.stats);

        for g in &generated {
            m.tasks_total += 1;
            let mut task = g.task.clone();
            let mut row = TranscriptRow {
                interval: tau,
                task_id: task.id.0,
                platform_sat: None,
                candidate_group_count: 0,
                winner_key: String::new(),
                utility: None,
                group_payment: None,
                per_dish_payments: String::new(),
                outcome: String::new(),
            };
            let path = match original_path(&snapshot, task.source_sat, task.dest_sat) {
                Ok(p) => p,
                Err(Error::NoRoute { .. }) => {
                    m.tasks_unserved += 1;
                    row.outcome = "unserved:no-route".into();
                    self.transcript.push(row);
                    continue;
                }
                Err(e) => return Err(e),
            };
            for s in &path.sats {
                traffic_cf[s.0 as usize] += task.data_amount;
            }
            let ctx = UtilityContext {
                snapshot: &snapshot,
                path: &path,
                batteries: &self.state.batteries,
                eclipsed: &eclipsed,
                epsilon: eps,
            };
            let selection = self.select(&snapshot, &ctx, g, &mut task, &remaining, &mut row, &mut stats)?;
            let (award, group) = match selection {
                Selection::Unserved(reason) => {
                    for s in &path.sats {
                        traffic_real[s.0 as usize] += task.data_amount;
                    }
                    m.tasks_unserved += 1;
                    row.outcome = format!("unserved:{reason}");
                    self.transcript.push(row);
                    continue;
                }
                Selection::Awarded { award, group } => (award, group),
            };

            let breakdown = UtilityBreakdown::evaluate(&ctx, &self.config.auction.weights, &task, &group)?;
            let cost = group.total_cost();
            m.tasks_offloaded += 1;
            m.total_budget += task.budget;
            m.sum_utility += breakdown.total;
            m.sum_cost += cost;
            ratio_sum += if cost > 0.0 { breakdown.total / cost } else { 0.0 };

            let outcome = self.realize(&ctx, &task, &group, &award, &mut remaining, &mut traffic_real)?;
            let original_latency = path.total_latency();
            let offload_latency = crate::auction::group_offload_latency(&ctx, &group)?;
            m.reduced_latency += original_latency - offload_latency;
            let penalty = (outcome.realized_latency - offload_latency).max(0.0);
            let mut penalty_assigned = false;
            for (d, b) in outcome.dishes.iter().zip(&group.bids) {
                let len = offload_prefix_len(&path, b)?;
                let skipped = (path.len() - len) as f64;
                m.reduced_energy += d.split * eps * skipped;
                m.total_payment += d.paid;
                reputation_updates.push((d.dish, !d.success));
                if !d.success {
                    self.state.pending.push(Retransmission {
                        task: task.id.0,
                        sats: path.sats[len..].to_vec(),
                        traffic: d.split,
                        energy: d.split * eps * skipped,
                        latency_penalty: if penalty_assigned { 0.0 } else { penalty },
                    });
                    penalty_assigned = true;
                }
            }
            if outcome.retransmitted {
                m.tasks_failed += 1;
            }
            row.winner_key = award.group.to_string();
            row.utility = Some(award.utility);
            row.group_payment = Some(outcome.dishes.iter().map(|d| d.paid).sum());
            row.per_dish_payments = outcome
                .dishes
                .iter()
                .filter(|d| d.success)
                .map(|d| format!("{}:{}", d.dish, d.paid))
                .collect::<Vec<_>>()
                .join(";");
            let failed: Vec<String> = outcome
                .dishes
                .iter()
                .filter(|d| !d.success)
                .map(|d| d.dish.to_string())
                .collect();
            row.outcome = if failed.is_empty() {
                "success".into()
            } else {
                format!("failed:{}", failed.join("+"))
            };
            self.transcript.push(row);
        }
        if m.tasks_offloaded > 0 {
            m.utility_cost_ratio = ratio_sum / f64::from(m.tasks_offloaded);
        }

        self.state.stats = stats;
        for (dish, failed) in reputation_updates {
            let rep = self.state.reputations.entry(dish).or_default();
            *rep = update_failure(*rep, true, failed);
        }

        let energy = &self.config.energy;
        for (i, b) in self.state.batteries.iter_mut().enumerate() {
            let real = step_battery(b, energy, energy.idle_draw + eps * traffic_real[i] / length, eclipsed[i], length);
            let cf = step_battery(b, energy, energy.idle_draw + eps * traffic_cf[i] / length, eclipsed[i], length);
            m.reduced_life_consumption += real.remaining_lifespan - cf.remaining_lifespan;
            *b = real;
        }
        self.state.interval += 1;
        self.metrics.push(m);
        Ok(self.metrics.last().expect("just pushed"))
    }

    #[allow(clippy::too_many_arguments)]
    fn select(
        &self,
        snapshot: &TopologySnapshot,
        ctx: &UtilityContext<'_>,
        g: &GeneratedTask,
        task: &mut Task,
        remaining: &BTreeMap<DishId, f64>,
        row: &mut TranscriptRow,
        stats: &mut GroupStats,
    ) -> Result<Selection> {
        let Some(platform) = select_platform_satellite(ctx.path, snapshot) else {
            return Ok(Selection::Unserved("no-platform"));
        };
        row.platform_sat = Some(platform.0);
        let destination = g.destination();
        let params = self.config.auction.cgsc_params();
        let latency = |b: &Bid| dish_offload_latency(ctx, b).unwrap_or(f64::INFINITY);

        // Budget from full-capacity bids so every scheme sees the same one.
        let reference = self.bids(snapshot, platform, task, &destination, None);
        let cheapest = cgsc(task, &reference, params, latency)
            .iter()
            .map(CollaboratorGroup::total_cost)
            .fold(f64::INFINITY, f64::min);
        if !cheapest.is_finite() {
            return Ok(Selection::Unserved("no-feasible-group"));
        }
        task.budget = self.config.tasks.budget_factor * cheapest;

        let bids = self.bids(snapshot, platform, task, &destination, Some(remaining));
        let weights = self.config.auction.weights;
        if self.config.scheme.is_baseline() {
            row.candidate_group_count = bids.len();
            return Ok(match select_baseline(self.config.scheme, task, &bids, ctx, &weights)? {
                Some(award) => {
                    let group = CollaboratorGroup::new(
                        bids.iter().filter(|b| award.group.0.contains(&b.dish)).cloned().collect(),
                    );
                    Selection::Awarded { award, group }
                }
                None => Selection::Unserved("no-feasible-dish"),
            });
        }

        let groups = cgsc(task, &bids, params, latency);
        row.candidate_group_count = groups.len();
        if groups.is_empty() {
            return Ok(Selection::Unserved("no-candidate"));
        }
        let candidates = groups
            .into_iter()
            .map(|group| {
                let total = UtilityBreakdown::evaluate(ctx, &weights, task, &group)?.total;
                let utility = discounted_utility(total, &group, &self.state.reputations);
                Ok(Candidate { group, utility })
            })
            .collect::<Result<Vec<_>>>()?;
        let auction = TaskAuction {
            task: task.id,
            budget: task.budget,
            candidates,
        };
        let outcome = cstp(std::slice::from_ref(&auction), stats)
            .pop()
            .expect("one outcome per auction");
        Ok(match outcome.result {
            CstpResult::Awarded(award) => {
                let group = auction
                    .candidates
                    .into_iter()
                    .find(|c| c.group.key() == award.group)
                    .expect("winner is a candidate")
                    .group;
                Selection::Awarded { award, group }
            }
            CstpResult::NoPositiveUtility => Selection::Unserved("no-positive-utility"),
            CstpResult::NoAffordableGroup => Selection::Unserved("no-affordable-group"),
        })
    }

    /// Draws dish failures and books capacity and prefix traffic.
    fn realize(
        &self,
        ctx: &UtilityContext<'_>,
        task: &Task,
        group: &CollaboratorGroup,
        award: &Award,
        remaining: &mut BTreeMap<DishId, f64>,
        traffic_real: &mut [f64],
    ) -> Result<OffloadOutcome> {
        let splits = split_traffic(task, group);
        let original = ctx.path.total_latency();
        let mut dishes = Vec::with_capacity(group.len());
        let mut latency: f64 = 0.0;
        let mut energy = 0.0;
        for (b, split) in group.bids.iter().zip(&splits) {
            let rate = self.dishes[self.dish_index[&b.dish]].true_failure_rate;
            let u = rng::unit(
                self.config.seed,
                "outcome",
                &[u64::from(ctx.snapshot.interval), u64::from(task.id.0), u64::from(b.dish.0)],
            );
            let success = u >= rate;
            let len = offload_prefix_len(ctx.path, b)?;
            for s in &ctx.path.sats[..len] {
                traffic_real[s.0 as usize] += split;
            }
            energy += split * ctx.epsilon * len as f64;
            if let Some(r) = remaining.get_mut(&b.dish) {
                *r = (*r - split).max(0.0);
            }
            let dish_latency = if success {
                dish_offload_latency(ctx, b)?
            } else {
                let gsl = ctx.snapshot.gsl_latency(b.offload_sat, b.dish).unwrap_or(0.0);
                original + gsl
            };
            latency = latency.max(dish_latency);
            dishes.push(DishOutcome {
                dish: b.dish,
                split: *split,
                success,
                paid: if success {
                    award.dish_payments.get(&b.dish).copied().unwrap_or(0.0)
                } else {
                    0.0
                },
            });
        }
        Ok(OffloadOutcome {
            retransmitted: dishes.iter().any(|d| !d.success),
            dishes,
            realized_latency: latency,
            realized_energy: energy,
        })
    }
}

/// Applies the reliability section: a seeded share of dishes becomes
/// unreliable, the rest get the reliable rate.
fn assign_failure_rates(config: &ScenarioConfig, dishes: &mut [DishSite]) {
    let r = &config.reliability;
    if r.unreliable_fraction <= 0.0 {
        if let Some(rate) = r.reliable_failure_rate {
            for d in dishes.iter_mut() {
                d.true_failure_rate = rate;
            }
        }
        return;
    }
    let count = (r.unreliable_fraction * dishes.len() as f64).round() as usize;
    let mut ids: Vec<DishId> = dishes.iter().map(|d| d.id).collect();
    ids.shuffle(&mut rng::substream(config.seed, "unreliable", 0));
    let unreliable: Vec<DishId> = ids.into_iter().take(count).collect();
    let reliable = r.reliable_failure_rate.unwrap_or(0.01);
    for d in dishes.iter_mut() {
        d.true_failure_rate = if unreliable.contains(&d.id) {
            r.unreliable_failure_rate
        } else {
            reliable
        };
    }
}

/// Runs a whole scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut sim = Simulation::new(config.clone())?;
    sim.run()?;
    Ok(sim.into_result())
}

/// Same as [`run_scenario`] with an explicit dish list.
pub fn run_scenario_with_dishes(config: &ScenarioConfig, dishes: Vec<DishSite>) -> Result<ScenarioResult> {
    let mut sim = Simulation::with_dishes(config.clone(), dishes)?;
    sim.run()?;
    Ok(sim.into_result())
}
