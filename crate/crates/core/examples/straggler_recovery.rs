//! Recover AᵀB from partial progress: some workers finish, others only get
//! part way through their lists, and one never starts.

use coded_matmul::decoder::{CompletedProduct, Decoder, ProgressLedger};
use coded_matmul::encoding::{build_plan, encode_blocks};
use coded_matmul::linalg::{gram_product, partition_columns, Matrix};
use coded_matmul::synthetic::random_dense;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let plan = build_plan(&SchemeParams::new(12, 3, 3, 0).with_seed(3))?;
    let d = &plan.derived;
    let a = Matrix::Dense(random_dense(200, 120, 1));
    let b = Matrix::Dense(random_dense(200, 60, 2));
    let pa = partition_columns(&a, d.a_blocks, false)?;
    let pb = partition_columns(&b, d.b_blocks, false)?;
    let payloads = encode_blocks(&pa, &pb, &plan)?;
    let products = CompletedProduct::all_from(&payloads)?;

    let decoder = Decoder::new(&plan);
    let ledger = ProgressLedger::from_counts(vec![0, 4, 4, 3, 4, 2, 4, 4, 1, 4, 3, 4], d.tasks_per_worker)?;
    print!("{}", decoder.report(&ledger));
    let result = decoder.decode(&ledger, &products)?;
    let direct = gram_product(&a, &b)?.value;
    println!(
        "{} of {} products, relative error {:.2e}",
        ledger.total(),
        d.n * d.tasks_per_worker,
        result.product.relative_error(&direct)
    );

    let short = ProgressLedger::from_counts(vec![0, 0, 0, 4, 4, 4, 4, 4, 4, 4, 4, 4], d.tasks_per_worker)?;
    println!("three idle workers: decodable = {}", decoder.is_decodable(short.counts()));
    let shorter = ProgressLedger::from_counts(vec![0, 0, 0, 0, 4, 4, 4, 4, 4, 4, 4, 4], d.tasks_per_worker)?;
    println!("four idle workers: decodable = {}", decoder.is_decodable(shorter.counts()));
    Ok(())
}
