//! Brute-force reference implementations shared by the integration tests.
//! Everything here is written for clarity over speed and avoids the code
//! paths it is used to check.
#![allow(dead_code)]

use std::collections::BTreeSet;

use backbone_lab::{BipartiteGraph, ProjectionMethod, Side};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Random bipartite graph with at most `max_left` + `max_right` nodes. Nodes
/// that draw no edge simply do not exist.
pub fn random_bipartite<R: Rng>(rng: &mut R, max_left: usize, max_right: usize) -> BipartiteGraph {
    loop {
        let nl = rng.gen_range(1..=max_left);
        let nr = rng.gen_range(1..=max_right);
        let p: f64 = rng.gen_range(0.1..0.7);
        let mut pairs = Vec::new();
        for l in 0..nl {
            for r in 0..nr {
                if rng.gen_bool(p) {
                    pairs.push((format!("u{l:02}"), format!("d{r:02}"), rng.gen_range(1..4)));
                }
            }
        }
        if !pairs.is_empty() {
            return BipartiteGraph::from_pairs(pairs).unwrap();
        }
    }
}

/// Biadjacency matrix with rows on `side`.
pub fn biadjacency(g: &BipartiteGraph, side: Side) -> DMatrix<f64> {
    let (n, m) = (g.node_count(side), g.node_count(side.other()));
    let mut b = DMatrix::zeros(n, m);
    for e in g.edges() {
        let (i, j) = match side {
            Side::Left => (e.left, e.right),
            Side::Right => (e.right, e.left),
        };
        b[(i as usize, j as usize)] = 1.0;
    }
    b
}

/// Dense projection matrix (diagonal included) for the three closed-form
/// methods.
pub fn dense_projection(g: &BipartiteGraph, side: Side, method: ProjectionMethod) -> DMatrix<f64> {
    let b = biadjacency(g, side);
    let k_other = DMatrix::from_diagonal(&b.row_sum().transpose().map(|k| 1.0 / k));
    match method {
        ProjectionMethod::Simple => &b * b.transpose(),
        ProjectionMethod::Hyperbolic => &b * &k_other * b.transpose(),
        ProjectionMethod::ProbS => {
            let k_side = DMatrix::from_diagonal(&b.column_sum().map(|k| 1.0 / k));
            let directed = &k_side * &b * &k_other * b.transpose();
            (&directed + directed.transpose()) * 0.5
        }
        ProjectionMethod::Ycn => panic!("no closed form"),
    }
}

/// Members of the largest connected component of the projected side, by
/// repeated squaring of the reachability matrix.
pub fn dense_largest_component(g: &BipartiteGraph, side: Side) -> Vec<usize> {
    let h = dense_projection(g, side, ProjectionMethod::Simple);
    let n = h.nrows();
    let mut reach = h.map(|x| if x > 0.0 { 1.0 } else { 0.0 });
    for _ in 0..n {
        reach = (&reach * &reach).map(|x| if x > 0.0 { 1.0 } else { 0.0 });
    }
    let mut best: Vec<usize> = Vec::new();
    for i in 0..n {
        let comp: Vec<usize> = (0..n).filter(|&j| reach[(i, j)] > 0.0).collect();
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

/// Stationary distribution of the two-step walk restricted to the largest
/// component, from the dominant eigenvector of the symmetrized transition
/// matrix `K^-1/2 H K^-1/2`. Zero outside the component.
pub fn dense_ycn_stationary(g: &BipartiteGraph, side: Side) -> Vec<f64> {
    let comp = dense_largest_component(g, side);
    let h = dense_projection(g, side, ProjectionMethod::Hyperbolic);
    let k = biadjacency(g, side).column_sum();
    let c = comp.len();
    let s = DMatrix::from_fn(c, c, |i, j| {
        let (u, v) = (comp[i], comp[j]);
        h[(u, v)] / (k[u] * k[v]).sqrt()
    });
    let eig = SymmetricEigen::new(s);
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let mut pi = vec![0.0; h.nrows()];
    for (i, &u) in comp.iter().enumerate() {
        pi[u] = v[i] * k[u].sqrt();
    }
    let total: f64 = pi.iter().sum();
    pi.iter().map(|p| p / total).collect()
}

/// Betweenness by listing every simple path between every pair, keeping
/// the shortest ones and counting intermediate nodes.
pub fn exhaustive_betweenness(n: usize, edges: &[(u32, u32)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    fn walk(adj: &[Vec<usize>], path: &mut Vec<usize>, target: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == target {
            out.push(path.clone());
            return;
        }
        for &next in &adj[last] {
            if !path.contains(&next) {
                path.push(next);
                walk(adj, path, target, out);
                path.pop();
            }
        }
    }
    let mut c = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths = Vec::new();
            walk(&adj, &mut vec![s], t, &mut paths);
            let Some(shortest) = paths.iter().map(Vec::len).min() else { continue };
            let shortest: Vec<_> = paths.into_iter().filter(|p| p.len() == shortest).collect();
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    c[v] += 1.0 / shortest.len() as f64;
                }
            }
        }
    }
    c
}

/// Bit index of the pair `i < j` among the `n(n-1)/2` pairs of 8 nodes.
fn pair_bit(i: usize, j: usize) -> u32 {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    (j * (j - 1) / 2 + i) as u32
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(n: usize, mask: u32, perms: &[Vec<usize>]) -> u32 {
    perms
        .iter()
        .map(|p| {
            let mut m = 0u32;
            for j in 1..n {
                for i in 0..j {
                    if mask >> pair_bit(i, j) & 1 == 1 {
                        m |= 1 << pair_bit(p[i], p[j]);
                    }
                }
            }
            m
        })
        .min()
        .unwrap()
}

/// Every connected graph on `1..=max_n` nodes up to isomorphism, as edge
/// lists grouped by node count. Each connected graph has a vertex whose
/// removal keeps it connected, so growing the previous level by one vertex
/// joined to every non-empty subset reaches all of them.
pub fn connected_graphs(max_n: usize) -> Vec<Vec<Vec<(u32, u32)>>> {
    assert!((1..=8).contains(&max_n));
    let mut levels: Vec<BTreeSet<u32>> = vec![BTreeSet::from([0])];
    for n in 2..=max_n {
        let perms = permutations(n);
        let mut next = BTreeSet::new();
        for &mask in &levels[n - 2] {
            for subset in 1u32..(1 << (n - 1)) {
                let mut m = mask;
                for i in 0..n - 1 {
                    if subset >> i & 1 == 1 {
                        m |= 1 << pair_bit(i, n - 1);
                    }
                }
                next.insert(canonical(n, m, &perms));
            }
        }
        levels.push(next);
    }
    levels
        .iter()
        .enumerate()
        .map(|(k, masks)| {
            let n = k + 1;
            masks
                .iter()
                .map(|&mask| {
                    let mut edges = Vec::new();
                    for j in 1..n {
                        for i in 0..j {
                            if mask >> pair_bit(i, j) & 1 == 1 {
                                edges.push((i as u32, j as u32));
                            }
                        }
                    }
                    edges
                })
                .collect()
        })
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
