//! Open dichotomies of a point set, checked against the Cover count.

use relu_exact::dichotomy::{cover_count, enumerate_open_dichotomies, enumerate_open_dichotomies_geometric};
use relu_exact::rational::qi;

fn main() -> relu_exact::Result<()> {
    let points: Vec<Vec<_>> = [[0, 0], [3, 1], [1, 4], [5, 5], [2, 7]]
        .iter()
        .map(|p| p.iter().map(|&v| qi(v)).collect())
        .collect();
    let geometric = enumerate_open_dichotomies_geometric(&points)?;
    let sweep = enumerate_open_dichotomies(&points, 16)?;
    println!("{} dichotomies (Cover count {}), sweep agrees: {}", geometric.len(), cover_count(5, 2), geometric == sweep);
    for d in geometric.iter().take(6) {
        println!("  plus {:?}", d.plus());
    }

    let collinear: Vec<Vec<_>> = (0..4).map(|i| vec![qi(i), qi(2 * i)]).collect();
    println!("collinear: {}", enumerate_open_dichotomies_geometric(&collinear)?.len());
    Ok(())
}
