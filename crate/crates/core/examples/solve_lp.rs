//! Build a small linear model by hand, solve it, and reuse the optimal
//! basis after tightening a bound.

use lpcc::{lp, Direction, LinearModel, Sense};

fn main() -> lpcc::Result<()> {
    let mut m = LinearModel::new(Direction::Max);
    let x = m.add_variable("x", 0.0, 4.0)?;
    let y = m.add_variable("y", 0.0, f64::INFINITY)?;
    m.set_objective(x, 3.0);
    m.set_objective(y, 2.0);
    m.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Le, 6.0)?;
    m.add_constraint(vec![(x, 1.0), (y, 3.0)], Sense::Le, 12.0)?;

    let first = lp::solve(&m)?;
    println!("status {}, value {:?}, x = {:?}, {} iterations", first.status.as_str(), first.value, first.x, first.iterations);

    m.set_bounds(x, 0.0, 2.0)?;
    let warm = lp::solve_from(&m, first.basis.as_ref())?;
    println!("after x <= 2: value {:?}, x = {:?}, {} iterations", warm.value, warm.x, warm.iterations);

    let mut text = Vec::new();
    lp::write_lp(&m, &[], &mut text)?;
    println!("\n{}", String::from_utf8_lossy(&text));
    Ok(())
}
