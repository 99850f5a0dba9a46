//! Analytic cost model against measured densities of encoded blocks.

use coded_matmul::analysis::sparsity_cost_model;
use coded_matmul::encoding::{build_plan, encode_blocks};
use coded_matmul::linalg::partition_columns;
use coded_matmul::synthetic::random_matrix;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let plan = build_plan(&SchemeParams::new(12, 3, 3, 0))?;
    let d = &plan.derived;
    let density = 0.02;
    let cost = sparsity_cost_model(d, 3000, 1200, 900, density);
    println!(
        "per-worker flops {:.3e} vs {:.3e} for dense encoding, ratio {:.4} (limit {}/{})",
        cost.proposed_worker_flops, cost.dense_worker_flops, cost.ratio, cost.limit_ratio.0, cost.limit_ratio.1
    );

    let a = random_matrix(3000, 1200, density, 3);
    let b = random_matrix(3000, 900, density, 4);
    let pa = partition_columns(&a, d.a_blocks, false)?;
    let pb = partition_columns(&b, d.b_blocks, false)?;
    let payloads = encode_blocks(&pa, &pb, &plan)?;
    let w0 = &plan.workers[0];
    for (task, blk) in w0.a_tasks.iter().zip(&payloads[0].a_blocks) {
        let predicted = 1.0 - (1.0 - density).powi(task.weight() as i32);
        println!("A weight {}: density {:.4}, predicted {predicted:.4}", task.weight(), blk.density());
    }
    let predicted = 1.0 - (1.0 - density).powi(w0.b.support.len() as i32);
    println!(
        "B weight {}: density {:.4}, predicted {predicted:.4}",
        w0.b.support.len(),
        payloads[0].b_block.density()
    );
    Ok(())
}
