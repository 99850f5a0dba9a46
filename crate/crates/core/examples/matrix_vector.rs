//! Matrix-vector case (kb = 1) with a weight-reduced encoding (x = 1).

use coded_matmul::decoder::{CompletedProduct, Decoder};
use coded_matmul::encoding::{build_plan, encode_blocks};
use coded_matmul::linalg::{gram_product, partition_columns, Matrix};
use coded_matmul::synthetic::random_dense;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let plan = build_plan(&SchemeParams::new(5, 3, 1, 1).with_seed(8))?;
    let d = &plan.derived;
    println!("coded weight {} instead of {}, threshold {}", d.coded_a_weight(), d.ka, d.threshold);
    let a = Matrix::Dense(random_dense(90, 150, 1));
    let v = Matrix::Dense(random_dense(90, 1, 2));
    let pa = partition_columns(&a, d.a_blocks, false)?;
    let pv = partition_columns(&v, 1, false)?;
    let products = CompletedProduct::all_from(&encode_blocks(&pa, &pv, &plan)?)?;
    let direct = gram_product(&a, &v)?.value;
    let decoder = Decoder::new(&plan);
    for lost in 0..d.n {
        let survivors: Vec<usize> = (0..d.n).filter(|&w| w != lost).collect();
        let r = decoder.decode_from_survivors(&products, &survivors)?;
        println!("worker {lost} lost: relative error {:.2e}", r.product.relative_error(&direct));
    }
    Ok(())
}
