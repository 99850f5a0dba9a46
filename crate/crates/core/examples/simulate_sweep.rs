//! Decode time against the number of slow workers on 98% sparse inputs,
//! with task costs taken from the actual flop counts.

use coded_matmul::baseline::poly_plan;
use coded_matmul::decoder::Decoder;
use coded_matmul::encoding::build_plan;
use coded_matmul::linalg::partition_columns;
use coded_matmul::simulator::{compare_overall, write_sweep_csv, SweepEntry, TaskCosts};
use coded_matmul::synthetic::random_matrix;
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let plan = build_plan(&SchemeParams::new(24, 4, 5, 0))?;
    let poly = poly_plan(24, 4, 5, None)?;
    let a = random_matrix(2000, 2400, 0.02, 1);
    let b = random_matrix(2000, 1000, 0.02, 2);
    let proposed = TaskCosts::measured_proposed(
        &plan,
        &partition_columns(&a, 24, false)?,
        &partition_columns(&b, 5, false)?,
    )?;
    let baseline = TaskCosts::measured_poly(
        &poly,
        &partition_columns(&a, 4, false)?,
        &partition_columns(&b, 5, false)?,
    )?;
    let decoder = Decoder::new(&plan);
    let entries = [
        SweepEntry { schedule: &decoder, costs: &proposed },
        SweepEntry { schedule: &poly, costs: &baseline },
    ];
    let rows = compare_overall(&entries, &[0, 1, 2, 3, 4, 5, 6], 0.2)?;
    write_sweep_csv(std::io::stdout(), &rows)?;
    Ok(())
}
