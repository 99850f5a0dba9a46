//! Build a plan, print each worker's task list and round-trip it through
//! the plan file format.

use coded_matmul::encoding::{build_plan, ATask};
use coded_matmul::plan_file::{read_plan, write_plan};
use coded_matmul::SchemeParams;

fn main() -> coded_matmul::Result<()> {
    let plan = build_plan(&SchemeParams::new(12, 3, 3, 0).with_seed(1))?;
    for w in &plan.workers {
        let tasks: Vec<String> = w
            .a_tasks
            .iter()
            .map(|t| match t {
                ATask::Uncoded { index } => format!("A{index}"),
                ATask::Coded { support, .. } => {
                    let s: Vec<String> = support.iter().map(|i| format!("A{i}")).collect();
                    format!("[{}]", s.join("+"))
                }
            })
            .collect();
        println!("W{:<2} type {}  {}  B{:?}", w.worker, w.b.type_id, tasks.join(" "), w.b.support);
    }
    let text = write_plan(&plan);
    assert_eq!(read_plan(&text)?, plan);
    println!("plan file: {} lines", text.lines().count());
    Ok(())
}
