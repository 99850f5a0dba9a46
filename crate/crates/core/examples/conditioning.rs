//! Worst-case condition numbers of the proposed scheme and the polynomial
//! code for n = 24, ka = 4, kb = 5.

use coded_matmul::analysis::{kappa_worst, SweepOptions};
use coded_matmul::baseline::{chebyshev_points, poly_kappa_worst, poly_plan};
use coded_matmul::encoding::build_plan;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let seed = 1;
    for (x, s) in [(0, 4), (2, 2)] {
        let plan = build_plan(&SchemeParams::new(24, 4, 5, x).with_seed(seed))?;
        let r = kappa_worst(&plan, s, SweepOptions::seeded(seed))?;
        println!(
            "x={x} s={s}: κ_worst {:.3e} (median {:.3e}) over {} straggler sets, worst {:?} class {}",
            r.kappa_worst, r.quantiles[1], r.subsets, r.worst_stragglers, r.worst_class
        );
    }
    let integers = poly_kappa_worst(&poly_plan(24, 4, 5, None)?, 4, seed)?;
    let cheb = poly_kappa_worst(&poly_plan(24, 4, 5, Some(chebyshev_points(24)))?, 4, seed)?;
    println!("polynomial code, nodes 1..24: {:.3e}", integers.kappa_worst);
    println!("polynomial code, Chebyshev nodes: {:.3e}", cheb.kappa_worst);
    Ok(())
}
