//! Randomised audits of the mechanism's economic properties.
//!
//! Each instance is a small pool of dishes bidding on one to three tasks.
//! Group utilities depend only on which dishes are in the group, never on
//! declared costs, so cost misreports change only the auction itself.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    cgsc, check_cdgs_constraints, cstp, cstp_score, dish_cost, AwardRecord, Bid, Candidate,
    CgscParams, CollaboratorGroup, Constraint, CstpOutcome, GroupKey, GroupStats, Prices, Task,
    TaskAuction, TaskId,
};
use crate::constellation::{DishId, SatelliteId};

/// Relative tolerance when comparing a bisected threshold with a payment.
pub const CRITICAL_VALUE_REL_TOL: f64 = 1e-6;
/// Largest profit gain from misreporting that is still treated as noise.
pub const TRUTHFULNESS_ABS_TOL: f64 = 1e-9;
pub const MISREPORT_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditCheck {
    IndividualRationality,
    Budget,
    Constraints,
    Monotonicity,
    Truthfulness,
    CriticalValue,
}

impl AuditCheck {
    pub const ALL: [AuditCheck; 6] = [
        AuditCheck::IndividualRationality,
        AuditCheck::Budget,
        AuditCheck::Constraints,
        AuditCheck::Monotonicity,
        AuditCheck::Truthfulness,
        AuditCheck::CriticalValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditCheck::IndividualRationality => "individual-rationality",
            AuditCheck::Budget => "budget",
            AuditCheck::Constraints => "constraints",
            AuditCheck::Monotonicity => "monotonicity",
            AuditCheck::Truthfulness => "truthfulness",
            AuditCheck::CriticalValue => "critical-value",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Utility and failure estimate a dish brings to any group it joins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DishProfile {
    pub utility: f64,
    pub failure_est: f64,
}

/// A self-contained auction instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditInstance {
    pub seed: u64,
    pub params: CgscParams,
    pub tasks: Vec<Task>,
    /// `bids[t]` are the bids for `tasks[t]`.
    pub bids: Vec<Vec<Bid>>,
    /// Offload latency per task and dish (ms).
    pub latencies: Vec<BTreeMap<DishId, f64>>,
    pub profiles: BTreeMap<DishId, DishProfile>,
}

impl AuditInstance {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let num_dishes = rng.gen_range(3..=10);
        let num_tasks = rng.gen_range(1..=3);
        let params = CgscParams {
            layers: rng.gen_range(1..=3),
            top_m: rng.gen_range(2..=10),
        };
        let profiles: BTreeMap<DishId, DishProfile> = (0..num_dishes)
            .map(|d| {
                let failure_est = if rng.gen_bool(0.5) {
                    0.0
                } else {
                    rng.gen_range(0.0..0.5)
                };
                (
                    DishId(d),
                    DishProfile {
                        utility: rng.gen_range(-0.2..1.0),
                        failure_est,
                    },
                )
            })
            .collect();
        let price_scale: Vec<f64> = (0..num_dishes).map(|_| rng.gen_range(0.5..2.0)).collect();

        let mut tasks = Vec::new();
        let mut bids = Vec::new();
        let mut latencies = Vec::new();
        for t in 0..num_tasks {
            let data = rng.gen_range(500.0..20_000.0);
            let bandwidth = rng.gen_range(50.0..200.0);
            let delay = rng.gen_range(50.0..200.0);
            let mut task_bids = Vec::new();
            let mut lat = BTreeMap::new();
            for d in 0..num_dishes {
                let capacity = data * rng.gen_range(0.3..1.2);
                let gamma = bandwidth * rng.gen_range(0.3..1.5);
                let s = price_scale[d as usize];
                let prices = Prices {
                    per_gb: 0.09 * s,
                    per_second: 0.17 * s,
                };
                task_bids.push(Bid {
                    dish: DishId(d),
                    terrestrial_latency: rng.gen_range(5.0..60.0),
                    bandwidth: gamma,
                    capacity,
                    cost: dish_cost(capacity, gamma, &prices),
                    offload_sat: SatelliteId(0),
                });
                lat.insert(DishId(d), delay * rng.gen_range(0.4..1.3));
            }
            let mut costs: Vec<f64> = task_bids.iter().map(|b| b.cost).collect();
            costs.sort_by(f64::total_cmp);
            let budget = costs[costs.len() / 2] * rng.gen_range(1.0..4.0);
            tasks.push(Task {
                id: TaskId(t),
                source_sat: SatelliteId(0),
                dest_sat: SatelliteId(1),
                delay_req: delay,
                bandwidth_req: bandwidth,
                data_amount: data,
                budget,
            });
            bids.push(task_bids);
            latencies.push(lat);
        }
        Self {
            seed,
            params,
            tasks,
            bids,
            latencies,
            profiles,
        }
    }

    pub fn dishes(&self) -> BTreeSet<DishId> {
        self.profiles.keys().copied().collect()
    }

    pub fn bid_count(&self) -> usize {
        self.bids.iter().map(Vec::len).sum()
    }

    /// Utility of a group: mean dish utility discounted by failure estimates.
    pub fn group_utility(&self, group: &CollaboratorGroup) -> f64 {
        let mean = group
            .bids
            .iter()
            .map(|b| self.profiles[&b.dish].utility)
            .sum::<f64>()
            / group.len() as f64;
        group
            .bids
            .iter()
            .fold(mean, |acc, b| acc * (1.0 - self.profiles[&b.dish].failure_est))
    }

    /// Deterministic prior selection count for a group.
    pub fn prior_count(&self, key: &GroupKey) -> u64 {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for d in &key.0 {
            h = splitmix(h ^ u64::from(d.0));
        }
        1 + h % 4
    }

    fn with_cost_scale(&self, dish: DishId, factor: f64) -> Vec<Vec<Bid>> {
        self.bids
            .iter()
            .map(|bs| {
                bs.iter()
                    .map(|b| {
                        let mut b = b.clone();
                        if b.dish == dish {
                            b.cost *= factor;
                        }
                        b
                    })
                    .collect()
            })
            .collect()
    }

    /// Candidate sets and auctions for the given bids.
    pub fn auctions(&self, bids: &[Vec<Bid>]) -> (Vec<TaskAuction>, GroupStats) {
        let mut stats = GroupStats::new();
        let auctions = self
            .tasks
            .iter()
            .zip(bids)
            .zip(&self.latencies)
            .map(|((task, bs), lat)| {
                let groups = cgsc(task, bs, self.params, |b| lat[&b.dish]);
                let candidates = groups
                    .into_iter()
                    .map(|g| {
                        let key = g.key();
                        stats.set(key.clone(), self.prior_count(&key));
                        Candidate {
                            utility: self.group_utility(&g),
                            group: g,
                        }
                    })
                    .collect();
                TaskAuction {
                    task: task.id,
                    budget: task.budget,
                    candidates,
                }
            })
            .collect();
        (auctions, stats)
    }

    pub fn run(&self, bids: &[Vec<Bid>]) -> (Vec<TaskAuction>, Vec<CstpOutcome>) {
        let (auctions, mut stats) = self.auctions(bids);
        let outcomes = cstp(&auctions, &mut stats);
        (auctions, outcomes)
    }

    /// Profit of `dish` whose true costs are in `self.bids`, when it declares
    /// `factor` times them.
    pub fn profit(&self, dish: DishId, factor: f64) -> f64 {
        let bids = self.with_cost_scale(dish, factor);
        let (_, outcomes) = self.run(&bids);
        outcomes
            .iter()
            .zip(&self.bids)
            .filter_map(|(o, true_bids)| {
                let award = o.award()?;
                let paid = award.dish_payments.get(&dish)?;
                let cost = true_bids.iter().find(|b| b.dish == dish)?.cost;
                Some(paid - cost)
            })
            .sum()
    }

    /// Whether `dish` is in the winning group of task index `t` when it
    /// declares `factor` times its cost.
    fn wins(&self, t: usize, dish: DishId, factor: f64) -> bool {
        let bids = self.with_cost_scale(dish, factor);
        let (_, outcomes) = self.run(&bids);
        outcomes[t]
            .award()
            .is_some_and(|a| a.dish_payments.contains_key(&dish))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Highest cost `dish` can declare on task index `t` and still be in its
/// winning group, found by bisection over a scaling of its true cost.
/// `None` when the dish keeps winning up to a 2^40 scaling.
pub fn critical_value(inst: &AuditInstance, t: usize, dish: DishId) -> Option<f64> {
    let true_cost = inst.bids[t].iter().find(|b| b.dish == dish)?.cost;
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    if !inst.wins(t, dish, lo) {
        return Some(0.0);
    }
    while inst.wins(t, dish, hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 2f64.powi(40) {
            return None;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inst.wins(t, dish, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    Some(true_cost * 0.5 * (lo + hi))
}

/// Misreport multipliers: evenly spaced over [0.5, 2.0].
pub fn misreport_grid() -> Vec<f64> {
    (0..MISREPORT_POINTS)
        .map(|i| 0.5 + 1.5 * i as f64 / (MISREPORT_POINTS - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckSummary {
    pub checks: usize,
    pub violations: usize,
    /// Largest observed excess (profit gain, relative error, ...).
    pub worst: f64,
    pub worst_detail: Option<String>,
    pub smallest_failure: Option<AuditInstance>,
}

impl CheckSummary {
    fn record(&mut self, ok: bool, excess: f64, detail: impl FnOnce() -> String, inst: &AuditInstance) {
        self.checks += 1;
        if excess > self.worst || self.worst_detail.is_none() && !ok {
            self.worst = self.worst.max(excess);
            if !ok || self.worst_detail.is_none() {
                self.worst_detail = Some(detail());
            }
        }
        if !ok {
            self.violations += 1;
            let smaller = self
                .smallest_failure
                .as_ref()
                .map_or(true, |s| inst.bid_count() < s.bid_count());
            if smaller {
                self.smallest_failure = Some(inst.clone());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditOptions {
    pub instances: usize,
    pub seed: u64,
    pub checks: Vec<AuditCheck>,
    /// Subtracted from every per-dish payment before checking (fault injection).
    pub underpay: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            instances: 1000,
            seed: 0,
            checks: AuditCheck::ALL.to_vec(),
            underpay: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AuditReport {
    pub instances: usize,
    pub awards: usize,
    pub results: BTreeMap<AuditCheck, CheckSummary>,
    pub constraint_counts: BTreeMap<String, usize>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.results.values().all(|r| r.violations == 0)
    }

    pub fn failed_checks(&self) -> Vec<AuditCheck> {
        self.results
            .iter()
            .filter(|(_, r)| r.violations > 0)
            .map(|(c, _)| *c)
            .collect()
    }
}

/// Runs the selected checks over `options.instances` random instances.
pub fn run_audit(options: &AuditOptions) -> AuditReport {
    let mut report = AuditReport::default();
    for c in &options.checks {
        report.results.insert(*c, CheckSummary::default());
    }
    let wants = |c: AuditCheck| options.checks.contains(&c);

    for i in 0..options.instances {
        let inst = AuditInstance::random(splitmix(options.seed.wrapping_add(i as u64)));
        report.instances += 1;
        let (auctions, mut outcomes) = inst.run(&inst.bids);
        if options.underpay != 0.0 {
            for o in &mut outcomes {
                if let super::CstpResult::Awarded(a) = &mut o.result {
                    for p in a.dish_payments.values_mut() {
                        *p -= options.underpay;
                    }
                    a.group_payment = a.dish_payments.values().sum();
                }
            }
        }

        let mut records = Vec::new();
        for (t, o) in outcomes.iter().enumerate() {
            let Some(award) = o.award() else { continue };
            let group = &auctions[t]
                .candidates
                .iter()
                .find(|c| c.group.key() == award.group)
                .expect("winner is a candidate")
                .group;
            let latency = group
                .bids
                .iter()
                .map(|b| inst.latencies[t][&b.dish])
                .fold(f64::NEG_INFINITY, f64::max);
            records.push(AwardRecord {
                award,
                group,
                group_latency: latency,
            });
        }
        report.awards += records.len();
        let constraint_report = check_cdgs_constraints(&inst.tasks, &records);
        for v in &constraint_report.violations {
            *report.constraint_counts.entry(v.constraint.to_string()).or_default() += 1;
        }
        let count = |c: Constraint| constraint_report.count(c);

        if wants(AuditCheck::IndividualRationality) {
            let n = count(Constraint::IndividualRationality);
            report
                .results
                .get_mut(&AuditCheck::IndividualRationality)
                .unwrap()
                .record(n == 0, n as f64, || format!("seed {}: {n} dish(es) paid below cost (constraint 27)", inst.seed), &inst);
        }
        if wants(AuditCheck::Budget) {
            let n = count(Constraint::Budget);
            report
                .results
                .get_mut(&AuditCheck::Budget)
                .unwrap()
                .record(n == 0, n as f64, || format!("seed {}: budget exceeded (constraint 26)", inst.seed), &inst);
        }
        if wants(AuditCheck::Constraints) {
            let n = constraint_report.violations.len();
            report.results.get_mut(&AuditCheck::Constraints).unwrap().record(
                n == 0,
                n as f64,
                || {
                    let v = &constraint_report.violations;
                    match v.first() {
                        Some(v) => format!("seed {}: {} {}", inst.seed, v.constraint, v.detail),
                        None => String::new(),
                    }
                },
                &inst,
            );
        }
        if wants(AuditCheck::Monotonicity) {
            monotonicity(&inst, &auctions, &outcomes, report.results.get_mut(&AuditCheck::Monotonicity).unwrap());
        }
        if wants(AuditCheck::Truthfulness) {
            truthfulness(&inst, report.results.get_mut(&AuditCheck::Truthfulness).unwrap());
        }
        if wants(AuditCheck::CriticalValue) {
            critical_values(&inst, &outcomes, report.results.get_mut(&AuditCheck::CriticalValue).unwrap());
        }
    }
    report
}

/// A clone of each winner with the same utility and selection count but 10%
/// lower cost must be picked over it from the pool the winner came from.
fn monotonicity(
    inst: &AuditInstance,
    auctions: &[TaskAuction],
    outcomes: &[CstpOutcome],
    summary: &mut CheckSummary,
) {
    let (_, base_stats) = inst.auctions(&inst.bids);
    let mut stats = base_stats.clone();
    for (t, o) in outcomes.iter().enumerate() {
        if let Some(award) = o.award() {
            let winner = auctions[t]
                .candidates
                .iter()
                .find(|c| c.group.key() == award.group)
                .unwrap();
            let clone = CollaboratorGroup::new(
                winner
                    .group
                    .bids
                    .iter()
                    .map(|b| Bid {
                        dish: DishId(b.dish.0 + 1_000_000),
                        cost: b.cost * 0.9,
                        ..b.clone()
                    })
                    .collect(),
            );
            // Groups picked before the winner were unaffordable and left the pool.
            let mut candidates = auctions[t].candidates.clone();
            while let Some(k) = first_choice(&candidates, &stats) {
                if k == award.group {
                    break;
                }
                candidates.retain(|c| c.group.key() != k);
            }
            let mut probe = stats.clone();
            probe.set(clone.key(), stats.count(&award.group));
            candidates.push(Candidate {
                group: clone.clone(),
                utility: winner.utility,
            });
            let chosen = first_choice(&candidates, &probe);
            let ok = chosen.as_ref() == Some(&clone.key());
            summary.record(
                ok,
                if ok { 0.0 } else { 1.0 },
                || format!("seed {} task {t}: cheaper clone not selected", inst.seed),
                inst,
            );
            stats.increment(&award.group);
        }
    }
}

/// Group the selection step picks first, ignoring the budget.
pub fn first_choice(candidates: &[Candidate], stats: &GroupStats) -> Option<GroupKey> {
    let total: u64 = candidates.iter().map(|c| stats.count(&c.group.key())).sum();
    let n_sum = if total == 0 { 0.0 } else { (total as f64).ln().max(0.0) };
    candidates
        .iter()
        .filter(|c| c.utility > 0.0)
        .map(|c| {
            let key = c.group.key();
            let s = cstp_score(c.utility, c.group.total_cost(), n_sum, stats.count(&key));
            (s, key)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .map(|(_, k)| k)
}

fn truthfulness(inst: &AuditInstance, summary: &mut CheckSummary) {
    let grid = misreport_grid();
    for dish in inst.dishes() {
        let truthful = inst.profit(dish, 1.0);
        for &f in &grid {
            let gain = inst.profit(dish, f) - truthful;
            let ok = gain <= TRUTHFULNESS_ABS_TOL;
            summary.record(
                ok,
                gain,
                || {
                    format!(
                        "seed {}: dish {dish} gains {gain:.6} by declaring {f:.3}x its cost (truthful profit {truthful:.6})",
                        inst.seed
                    )
                },
                inst,
            );
        }
    }
}

fn critical_values(inst: &AuditInstance, outcomes: &[CstpOutcome], summary: &mut CheckSummary) {
    for (t, o) in outcomes.iter().enumerate() {
        let Some(award) = o.award() else { continue };
        for (&dish, &paid) in &award.dish_payments {
            let threshold = critical_value(inst, t, dish);
            let (ok, err) = match threshold {
                Some(c) => {
                    let err = (c - paid).abs() / paid.abs().max(1e-12);
                    (err <= CRITICAL_VALUE_REL_TOL, err)
                }
                None => (false, f64::INFINITY),
            };
            summary.record(
                ok,
                err,
                || {
                    format!(
                        "seed {} task {t} dish {dish}: threshold {} vs payment {paid:.9}",
                        inst.seed,
                        threshold.map_or("unbounded".to_string(), |c| format!("{c:.9}"))
                    )
                },
                inst,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        assert_eq!(AuditInstance::random(7), AuditInstance::random(7));
        assert_ne!(AuditInstance::random(7), AuditInstance::random(8));
    }

    #[test]
    fn instance_shape() {
        for s in 0..50 {
            let inst = AuditInstance::random(s);
            assert!((1..=3).contains(&inst.tasks.len()));
            let n = inst.dishes().len();
            assert!((3..=10).contains(&n));
            assert!(inst.bids.iter().all(|b| b.len() == n));
        }
    }

    #[test]
    fn grid_spans_half_to_double() {
        let g = misreport_grid();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.5);
        assert!((g[19] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn underpayment_is_caught() {
        let report = run_audit(&AuditOptions {
            instances: 50,
            seed: 1,
            checks: vec![AuditCheck::IndividualRationality],
            underpay: 1e-3,
        });
        assert!(report.awards > 0);
        assert!(!report.passed());
        assert_eq!(report.failed_checks(), vec![AuditCheck::IndividualRationality]);
    }
}
