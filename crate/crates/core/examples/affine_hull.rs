//! Data on a lower-dimensional affine subspace is trained in its hull.

use relu_exact::convex::train_l1;
use relu_exact::model::{affine_hull_reduce, Dataset};
use relu_exact::rational::qi;

fn main() -> relu_exact::Result<()> {
    // points on the line (t, 2t + 1, 3) in R^3
    let data = Dataset::from_pairs(3, (0..5).map(|t| (vec![qi(t), qi(2 * t + 1), qi(3)], qi((t - 2).abs()))))?;
    let (reduced, transform) = affine_hull_reduce(&data);
    println!("hull dimension {} of ambient {}", reduced.dim(), transform.input_dim());
    let r = train_l1(&data, 2)?;
    println!("two-neuron absolute loss {} (weights live in R^{})", r.loss, r.network.dim());
    Ok(())
}
