use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Award, CollaboratorGroup, Task, TaskId};

const REL_TOL: f64 = 1e-9;

/// Constraints of the group-assignment problem, numbered as usually cited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constraint {
    /// (21) binary assignment of whole groups
    Binary,
    /// (22) at most one group per task
    OneGroupPerTask,
    /// (23) offload latency within the delay requirement
    Delay,
    /// (24) group bandwidth covers the requirement
    Bandwidth,
    /// (25) group capacity covers the data amount
    DataAmount,
    /// (26) payments within the task budget
    Budget,
    /// (27) each dish paid at least its cost
    IndividualRationality,
    /// per-dish payments add up to the group payment
    PaymentSplit,
}

impl Constraint {
    pub fn number(self) -> Option<u8> {
        match self {
            Constraint::Binary => Some(21),
            Constraint::OneGroupPerTask => Some(22),
            Constraint::Delay => Some(23),
            Constraint::Bandwidth => Some(24),
            Constraint::DataAmount => Some(25),
            Constraint::Budget => Some(26),
            Constraint::IndividualRationality => Some(27),
            Constraint::PaymentSplit => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => write!(f, "({n}) {self:?}"),
            None => write!(f, "{self:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub task: TaskId,
    pub constraint: Constraint,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub checked_awards: usize,
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, c: Constraint) -> usize {
        self.violations.iter().filter(|v| v.constraint == c).count()
    }
}

/// An award together with the group it refers to.
#[derive(Debug, Clone, Copy)]
pub struct AwardRecord<'a> {
    pub award: &'a Award,
    pub group: &'a CollaboratorGroup,
    /// Slowest dish offload latency of the group (ms).
    pub group_latency: f64,
}

fn exceeds(value: f64, limit: f64) -> bool {
    value > limit + REL_TOL * limit.abs().max(1.0)
}

pub fn check_cdgs_constraints(tasks: &[Task], records: &[AwardRecord<'_>]) -> ConstraintReport {
    let by_id: BTreeMap<TaskId, &Task> = tasks.iter().map(|t| (t.id, t)).collect();
    let mut report = ConstraintReport {
        checked_awards: records.len(),
        ..Default::default()
    };
    let mut push = |task: TaskId, constraint: Constraint, detail: String| {
        report.violations.push(Violation {
            task,
            constraint,
            detail,
        })
    };

    let mut per_task: BTreeMap<TaskId, usize> = BTreeMap::new();
    for r in records {
        let a = r.award;
        *per_task.entry(a.task).or_default() += 1;
        let Some(task) = by_id.get(&a.task) else {
            push(a.task, Constraint::Binary, "award for an unknown task".into());
            continue;
        };
        let dishes: Vec<_> = r.group.bids.iter().map(|b| b.dish).collect();
        if a.group != r.group.key() || a.dish_payments.keys().copied().collect::<Vec<_>>() != dishes {
            push(a.task, Constraint::Binary, format!("award {} does not cover exactly one group", a.group));
        }
        if exceeds(r.group_latency, task.delay_req) {
            push(
                a.task,
                Constraint::Delay,
                format!("latency {} ms > {} ms", r.group_latency, task.delay_req),
            );
        }
        if exceeds(task.bandwidth_req, r.group.total_bandwidth()) {
            push(
                a.task,
                Constraint::Bandwidth,
                format!("bandwidth {} < {}", r.group.total_bandwidth(), task.bandwidth_req),
            );
        }
        if exceeds(task.data_amount, r.group.total_capacity()) {
            push(
                a.task,
                Constraint::DataAmount,
                format!("capacity {} < {}", r.group.total_capacity(), task.data_amount),
            );
        }
        let paid: f64 = a.dish_payments.values().sum();
        if exceeds(paid, task.budget) {
            push(a.task, Constraint::Budget, format!("paid {paid} > budget {}", task.budget));
        }
        if (paid - a.group_payment).abs() > REL_TOL * a.group_payment.abs().max(1.0) {
            push(
                a.task,
                Constraint::PaymentSplit,
                format!("dish payments sum to {paid}, group payment {}", a.group_payment),
            );
        }
        for b in &r.group.bids {
            let p = a.dish_payments.get(&b.dish).copied().unwrap_or(0.0);
            if exceeds(b.cost, p) {
                push(
                    a.task,
                    Constraint::IndividualRationality,
                    format!("dish {} paid {p} below its cost {}", b.dish, b.cost),
                );
            }
        }
    }
    for (task, n) in per_task {
        if n > 1 {
            push(task, Constraint::OneGroupPerTask, format!("{n} groups assigned"));
        }
    }
    report
}
