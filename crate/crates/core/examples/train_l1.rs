//! Optimal one- and two-neuron fits of a bump under the absolute loss.

use relu_exact::convex::train_l1;
use relu_exact::model::Dataset;
use relu_exact::rational::qi;

fn main() -> relu_exact::Result<()> {
    let bump = Dataset::from_pairs(1, [(vec![qi(0)], qi(0)), (vec![qi(1)], qi(1)), (vec![qi(2)], qi(0))])?;
    for k in 1..=2 {
        let r = train_l1(&bump, k)?;
        println!("k = {k}: loss {} after {} cells", r.loss, r.stats.subproblems);
        for n in r.network.neurons() {
            println!("  a = {:+} w = {:?} b = {}", n.a.as_i32(), n.w.iter().map(ToString::to_string).collect::<Vec<_>>(), n.b);
        }
    }
    Ok(())
}
