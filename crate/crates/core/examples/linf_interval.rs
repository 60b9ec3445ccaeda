//! Minimax fitting of interval labels and the zero-error realizability test.

use relu_exact::linf::{check_realizable, train_linf_interval};
use relu_exact::model::{Dataset, Label, LabeledPoint};
use relu_exact::rational::{q, qi};

fn main() -> relu_exact::Result<()> {
    let valley = Dataset::from_pairs(1, [(vec![qi(0)], qi(1)), (vec![qi(1)], qi(0)), (vec![qi(2)], qi(1))])?;
    let r = train_linf_interval(&valley)?;
    println!("valley: gamma* = {} (threshold index {}, {} LPs)", r.gamma_star, r.s_star, r.lp_solves);

    let banded = Dataset::new(
        1,
        vec![
            LabeledPoint { x: vec![qi(0)], label: Label::interval(qi(0), q(1, 2))?, multiplicity: 1 },
            LabeledPoint { x: vec![qi(1)], label: Label::interval(qi(1), qi(2))?, multiplicity: 1 },
            LabeledPoint { x: vec![qi(2)], label: Label::interval(qi(3), qi(4))?, multiplicity: 1 },
        ],
    )?;
    let real = check_realizable(&banded)?;
    match real.witness {
        Some((w, b)) => println!("bands are realizable by w = {}, b = {b}", w[0]),
        None => println!("bands are not realizable"),
    }
    Ok(())
}
