//! Bounds, oracles and property checks for a plan.

pub mod conditioning;
pub mod cost;
pub mod oracle;
pub mod qbounds;
pub mod verify;

pub use conditioning::{kappa_worst, ConditioningReport, SweepOptions};
pub use cost::{effective_density, product_flops, sparsity_cost_model, SparsityCost};
pub use oracle::{q_exact_oracle, worst_pattern, OracleMode, OracleResult};
pub use qbounds::{eta_max_products, q_bounds, QBounds};
pub use verify::{
    verify_assignment_properties, verify_resilience, verify_type_structure, PropertyCheck,
    PropertyReport,
};
