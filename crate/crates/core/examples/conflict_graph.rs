//! Inspect the structure the cut generators work from: cliques, odd holes,
//! odd antiholes, a vertex cover and its partition into groups.

use lpcc::graph::{self, approx_min_vertex_cover, feasible_cover_partition, maximal_cliques, odd_antiholes, odd_holes};

fn main() -> lpcc::Result<()> {
    let g = graph::erdos_renyi(9, 0.4, 11);
    println!("{} nodes, {} edges", g.num_nodes(), g.num_edges());

    let cliques = maximal_cliques(&g);
    println!("maximal cliques: {:?}", cliques.cliques);
    println!("odd holes: {:?}", odd_holes(&g, 9));
    println!("odd antiholes: {:?}", odd_antiholes(&g, 9));

    let cover = approx_min_vertex_cover(&g);
    let partition = feasible_cover_partition(&g, &cover)?;
    println!("cover {cover:?}");
    for (t, group) in partition.groups().iter().enumerate() {
        println!("  group {t}: {group:?} with neighborhood {:?}", partition.neighborhood(t));
    }

    println!("\n{}", g.to_dot());
    Ok(())
}
