//! Polynomial code: encode, lose workers, interpolate.

use coded_matmul::baseline::{poly_decode, poly_encode, poly_plan, poly_products};
use coded_matmul::linalg::{gram_product, partition_columns, Matrix};
use coded_matmul::synthetic::random_dense;

fn main() -> coded_matmul::Result<()> {
    let plan = poly_plan(8, 3, 2, None)?;
    let a = Matrix::Dense(random_dense(50, 60, 1));
    let b = Matrix::Dense(random_dense(50, 40, 2));
    let pa = partition_columns(&a, plan.ka, false)?;
    let pb = partition_columns(&b, plan.kb, false)?;
    let products = poly_products(&poly_encode(&plan, &pa, &pb)?)?;
    let direct = gram_product(&a, &b)?.value;
    for lost in [vec![], vec![0, 7], vec![1, 4]] {
        let kept: Vec<_> = products
            .iter()
            .filter(|(p, _)| !lost.contains(&p.worker))
            .map(|(p, _)| p.clone())
            .collect();
        let r = poly_decode(&plan, &kept)?;
        println!(
            "lost {lost:?}: relative error {:.2e}, condition {:.2e}",
            r.product.relative_error(&direct),
            r.conditions[0]
        );
    }
    let (wa, wb) = plan.weights()[1];
    println!("every worker mixes {wa} A blocks and {wb} B blocks");
    Ok(())
}
