//! A colored graph becomes a training instance whose optimum reveals a clique.

use relu_exact::convex::train_l1;
use relu_exact::reduction::{
    brute_force_multicolored_clique, decode_clique, generate_instance, witness_weights, ColoredGraph, Vertex,
};
use relu_exact::model::loss_value;
use relu_exact::model::LossSpec;
use relu_exact::rational::qi;

fn main() -> relu_exact::Result<()> {
    let v = |id: &str, color| Vertex { id: id.into(), color };
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    let graph = ColoredGraph::new(2, vec![v("a", 1), v("b", 1), v("c", 2), v("d", 2)], vec![e("b", "d")])?;

    let inst = generate_instance(&graph, &qi(1))?;
    println!("{} points in dimension {}, gamma = {}, delta = {}, M = {}",
        inst.dataset.points().len(), inst.dataset.dim(), inst.gamma, inst.delta, inst.m_copies);

    let clique = brute_force_multicolored_clique(&graph)?.expect("b-d is an edge");
    let witness = witness_weights(&graph, &clique)?;
    println!("witness loss {}", loss_value(&witness, &inst.dataset, &LossSpec::Lp(qi(1)))?);

    let trained = train_l1(&inst.dataset, 1)?;
    println!("trained loss {} <= gamma: {}", trained.loss, trained.loss.approx_value() <= &inst.gamma);
    println!("decoded clique {:?}", decode_clique(&trained.network, &inst)?);
    Ok(())
}
