//! Closed-form Q bounds next to the brute-force oracle.

use coded_matmul::analysis::{q_bounds, q_exact_oracle, worst_pattern, OracleMode};
use coded_matmul::encoding::build_plan;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    for (n, ka, kb, x) in [(5, 2, 2, 0), (8, 3, 2, 0), (8, 3, 2, 1), (12, 3, 3, 0)] {
        let plan = build_plan(&SchemeParams::new(n, ka, kb, x))?;
        let b = q_bounds(&plan.derived);
        let oracle = q_exact_oracle(&plan, OracleMode::ClassSubsets)?;
        let delta = (plan.derived.a_blocks * kb) as f64;
        println!(
            "({n},{ka},{kb},{x}) Q_lb={} Q_ub={} oracle={} Q/Δ={:.3}",
            b.q_lb,
            b.q_ub,
            oracle.q,
            oracle.q as f64 / delta
        );
    }
    let plan = build_plan(&SchemeParams::new(5, 2, 2, 0))?;
    let worst = worst_pattern(&plan)?;
    println!("undecodable with {} products: {:?}", worst.total(), worst.counts());
    Ok(())
}
