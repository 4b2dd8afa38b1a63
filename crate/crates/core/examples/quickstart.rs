use repsel::exact::{brute_force, DEFAULT_ENUM_CAP};
use repsel::lp::solve_lstar;
use repsel::rounding::round_pessimistic;
use repsel::{Instance, Objective};

fn main() -> Result<(), repsel::Error> {
    let inst = Instance::with_group_sizes(&[2, 2], vec![vec![1, 3, 2, 0], vec![2, 0, 1, 4]])?;
    let lp = solve_lstar(&inst)?; // L* = 3
    let rounded = round_pessimistic(&inst, &lp)?;
    let opt = brute_force(&inst, Objective::MinMax, DEFAULT_ENUM_CAP)?;
    assert_eq!((rounded.cost1, opt.optimum), (3, 3));
    Ok(())
}
