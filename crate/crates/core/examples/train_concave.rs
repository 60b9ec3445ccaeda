//! Concave losses: the counting loss (p = 0) and the square-root loss.

use relu_exact::concave::train_concave;
use relu_exact::model::Dataset;
use relu_exact::rational::{q, qi};

fn main() -> relu_exact::Result<()> {
    // an increasing trend with one point far below it
    let data = Dataset::from_pairs(
        1,
        [(vec![qi(0)], qi(0)), (vec![qi(1)], qi(1)), (vec![qi(2)], qi(2)), (vec![qi(3)], qi(-4))],
    )?;
    for p in [qi(0), q(1, 2), qi(1)] {
        let r = train_concave(&data, 1, &p)?;
        let n = &r.network.neurons()[0];
        println!("p = {p}: loss {} with w = {}, b = {}, a = {:+}", r.loss, n.w[0], n.b, n.a.as_i32());
    }
    Ok(())
}
