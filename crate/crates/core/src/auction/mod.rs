//! The offloading auction: data model, utilities, candidate group
//! construction (CGSC), winner selection with payments (CSTP), constraint
//! checking and mechanism audits.

pub mod audit;
mod cgsc;
mod constraints;
mod cstp;
mod reputation;
pub mod regret;
mod types;
mod utility;

pub use cgsc::{cgsc, CgscParams};
pub use constraints::{check_cdgs_constraints, AwardRecord, Constraint, ConstraintReport, Violation};
pub use cstp::{cstp, cstp_score, Candidate, CstpOutcome, CstpResult, TaskAuction};
pub use reputation::{discounted_utility, update_failure, DishReputation};
pub use types::{Award, Bid, CollaboratorGroup, GroupKey, GroupStats, Task, TaskId, UtilityWeights};
pub use utility::{
    dish_cost, dish_offload_latency, group_offload_latency, offload_prefix_len, split_traffic,
    total_utility, utility_delay, utility_energy, utility_life, Prices, UtilityBreakdown,
    UtilityContext,
};
