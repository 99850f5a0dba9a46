//! Derived quantities for a few parameter sets.
//!
//! cargo run --example derive_params

use coded_matmul::{derive_params, SchemeParams};

fn main() -> coded_matmul::Result<()> {
    for (n, ka, kb, x) in [(24, 4, 5, 0), (24, 4, 5, 2), (8, 3, 2, 1), (5, 3, 1, 1)] {
        let d = derive_params(&SchemeParams::new(n, ka, kb, x))?;
        println!(
            "n={n} ka={ka} kb={kb} x={x}: Δ_A={} ℓ={} p={} s={} τ={} weights A={} B={}",
            d.a_blocks,
            d.tasks_per_worker,
            d.uncoded_per_worker,
            d.stragglers,
            d.threshold,
            d.coded_a_weight(),
            d.b_weight
        );
    }
    // No straggler margin.
    println!("{}", derive_params(&SchemeParams::new(6, 2, 3, 0)).unwrap_err());
    Ok(())
}
