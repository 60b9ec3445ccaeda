//! Squared-loss training with exact rational optimum on a small planar set.

use relu_exact::convex::train_l2;
use relu_exact::io::model_to_json;
use relu_exact::model::Dataset;
use relu_exact::rational::{q, qi};

fn main() -> relu_exact::Result<()> {
    let data = Dataset::from_pairs(
        2,
        [
            (vec![qi(0), qi(0)], qi(0)),
            (vec![qi(1), qi(0)], qi(1)),
            (vec![qi(0), qi(1)], qi(1)),
            (vec![qi(1), qi(1)], q(5, 2)),
            (vec![qi(2), qi(1)], qi(2)),
        ],
    )?;
    let r = train_l2(&data, 1)?;
    println!("optimal squared loss: {}", r.loss);
    print!("{}", model_to_json(&r.network)?);
    Ok(())
}
