use crate::graph::Adjacency;

/// Share of nodes with at least one edge. Zero for a graph without nodes.
pub fn coverage(g: &Adjacency) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    (0..n).filter(|&v| g.degree(v) > 0).count() as f64 / n as f64
}

/// Triangle count by orienting each edge towards the endpoint of higher
/// (degree, index) rank.
pub fn triangle_count(g: &Adjacency) -> u64 {
    let n = g.node_count();
    let rank = |v: usize| (g.degree(v), v);
    let forward: Vec<Vec<u32>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().filter(|&u| rank(u as usize) > rank(v)).collect())
        .collect();
    let mut mark = vec![false; n];
    let mut triangles = 0u64;
    for v in 0..n {
        for &u in &forward[v] {
            mark[u as usize] = true;
        }
        for &u in &forward[v] {
            triangles += forward[u as usize].iter().filter(|&&w| mark[w as usize]).count() as u64;
        }
        for &u in &forward[v] {
            mark[u as usize] = false;
        }
    }
    triangles
}

/// Connected triples: paths of length two, counted once per centre.
pub fn triad_count(g: &Adjacency) -> u64 {
    (0..g.node_count())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

/// Global clustering coefficient `3·triangles / triads`, 0 without triads.
pub fn transitivity(g: &Adjacency) -> f64 {
    let triads = triad_count(g);
    if triads == 0 {
        return 0.0;
    }
    3.0 * triangle_count(g) as f64 / triads as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, edges: &[(u32, u32)]) -> Adjacency {
        Adjacency::from_edges(n, edges.iter().copied())
    }

    #[test]
    fn coverage_counts_non_isolated() {
        assert_eq!(coverage(&adj(4, &[])), 0.0);
        assert_eq!(coverage(&adj(3, &[(0, 1), (1, 2)])), 1.0);
        let g = adj(10, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        assert!((coverage(&g) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn triangle_and_star() {
        assert_eq!(transitivity(&adj(3, &[(0, 1), (1, 2), (0, 2)])), 1.0);
        assert_eq!(transitivity(&adj(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])), 0.0);
        assert_eq!(transitivity(&adj(2, &[(0, 1)])), 0.0);
    }

    #[test]
    fn triangle_with_pendant() {
        // enumerate triples by hand: centre 0 has 1 (pair {1,2}), centre 1 has 1,
        // centre 2 has 3 ({0,1},{0,3},{1,3}) -> 5 triads, one triangle
        let g = adj(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(triangle_count(&g), 1);
        assert_eq!(triad_count(&g), 5);
        assert!((transitivity(&g) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_triangles() {
        let n = 9u32;
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let g = adj(n as usize, &edges);
        assert_eq!(triangle_count(&g), 84);
        assert_eq!(transitivity(&g), 1.0);
    }
}
