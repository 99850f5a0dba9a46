//! Write a sparse matrix in Matrix Market format and read it back.

use coded_matmul::linalg::mtx::{read_matrix_market, write_matrix_market};
use coded_matmul::synthetic::random_matrix;

fn main() -> coded_matmul::Result<()> {
    let m = random_matrix(6, 4, 0.3, 5);
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &m)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let back = read_matrix_market(buf.as_slice())?;
    assert_eq!(back.to_dense(), m.to_dense());
    println!("{} nonzeros survive the round trip", back.nnz());
    Ok(())
}
