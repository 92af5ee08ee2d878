//! Shortest-path betweenness and Freeman centralization on unweighted graphs.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Adjacency;
use crate::par;

/// Sources handled per task; fixed so that the summation order, and with it
/// every bit of the result, is independent of the worker count.
const SOURCE_CHUNK: usize = 32;

struct BrandesScratch {
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    order: Vec<u32>,
    queue: VecDeque<u32>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    /// Adds the dependencies of source `s` onto `acc`.
    fn accumulate(&mut self, g: &Adjacency, s: usize, acc: &mut [f64]) {
        self.order.clear();
        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s as u32);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let dv = self.dist[v as usize];
            for &w in g.neighbors(v as usize) {
                let w = w as usize;
                if self.dist[w] < 0 {
                    self.dist[w] = dv + 1;
                    self.queue.push_back(w as u32);
                }
                if self.dist[w] == dv + 1 {
                    self.sigma[w] += self.sigma[v as usize];
                }
            }
        }
        for &w in self.order.iter().rev() {
            let w = w as usize;
            let dw = self.dist[w];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in g.neighbors(w) {
                let v = v as usize;
                if self.dist[v] == dw - 1 {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
        for &w in &self.order {
            let w = w as usize;
            self.sigma[w] = 0.0;
            self.dist[w] = -1;
            self.delta[w] = 0.0;
        }
    }
}

/// Bitset rows of an adjacency, for graphs dense enough that word-parallel
/// set operations beat walking neighbour lists.
struct DenseRows {
    words: usize,
    bits: Vec<u64>,
}

impl DenseRows {
    fn new(g: &Adjacency) -> Self {
        let n = g.node_count();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for v in 0..n {
            for &w in g.neighbors(v) {
                bits[v * words + w as usize / 64] |= 1 << (w % 64);
            }
        }
        Self { words, bits }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    /// Worth it when one pass over every row (roughly what each source
    /// costs) is cheaper than walking every edge twice.
    fn pays_off(g: &Adjacency) -> bool {
        let n = g.node_count();
        3 * n * n.div_ceil(64) < 4 * g.edge_count()
    }
}

/// Calls `f` with every node whose bit is set in both `a` and `b`, in
/// increasing order.
fn for_each_common(a: &[u64], b: &[u64], mut f: impl FnMut(usize)) {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let mut word = x & y;
        while word != 0 {
            f(i * 64 + word.trailing_zeros() as usize);
            word &= word - 1;
        }
    }
}

/// Brandes over bitset rows. Levels are built by OR-ing frontier rows, and
/// path counts and dependencies only look at the neighbours one level up or
/// down, so edges inside a level cost nothing.
struct DenseScratch {
    sigma: Vec<f64>,
    delta: Vec<f64>,
    coeff: Vec<f64>,
    visited: Vec<u64>,
    levels: Vec<Vec<u32>>,
    level_bits: Vec<Vec<u64>>,
}

impl DenseScratch {
    fn new(n: usize, words: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            coeff: vec![0.0; n],
            visited: vec![0; words],
            levels: Vec::new(),
            level_bits: Vec::new(),
        }
    }

    fn level(&mut self, d: usize, words: usize) {
        if self.levels.len() <= d {
            self.levels.push(Vec::new());
            self.level_bits.push(vec![0; words]);
        }
        self.levels[d].clear();
        self.level_bits[d].iter_mut().for_each(|w| *w = 0);
    }

    fn accumulate(&mut self, g: &DenseRows, s: usize, acc: &mut [f64]) {
        let words = g.words;
        self.visited.iter_mut().for_each(|w| *w = 0);
        self.visited[s / 64] |= 1 << (s % 64);
        self.level(0, words);
        self.levels[0].push(s as u32);
        self.level_bits[0][s / 64] |= 1 << (s % 64);
        self.sigma[s] = 1.0;

        let mut depth = 0;
        loop {
            self.level(depth + 1, words);
            let (done, rest) = self.level_bits.split_at_mut(depth + 1);
            let next = &mut rest[0];
            for &v in &self.levels[depth] {
                for (n, r) in next.iter_mut().zip(g.row(v as usize)) {
                    *n |= r;
                }
            }
            let mut any = 0;
            for (n, seen) in next.iter_mut().zip(self.visited.iter_mut()) {
                *n &= !*seen;
                *seen |= *n;
                any |= *n;
            }
            if any == 0 {
                break;
            }
            let frontier = &done[depth];
            let list = &mut self.levels[depth + 1];
            for_each_common(next, next, |w| list.push(w as u32));
            for &w in list.iter() {
                let mut sigma = 0.0;
                for_each_common(g.row(w as usize), frontier, |v| sigma += self.sigma[v]);
                self.sigma[w as usize] = sigma;
            }
            depth += 1;
        }

        for d in (0..depth).rev() {
            for &w in &self.levels[d + 1] {
                let w = w as usize;
                self.coeff[w] = (1.0 + self.delta[w]) / self.sigma[w];
            }
            let upper = &self.level_bits[d + 1];
            for &v in &self.levels[d] {
                let v = v as usize;
                let mut sum = 0.0;
                for_each_common(g.row(v), upper, |w| sum += self.coeff[w]);
                self.delta[v] = self.sigma[v] * sum;
            }
        }
        for level in &self.levels[1..=depth] {
            for &w in level {
                acc[w as usize] += self.delta[w as usize];
            }
        }
        for level in &self.levels[..=depth] {
            for &w in level {
                self.sigma[w as usize] = 0.0;
                self.delta[w as usize] = 0.0;
            }
        }
    }
}

/// Runs `run` for every source in fixed-size chunks and sums the chunk
/// totals in chunk order.
fn sum_over_sources<S>(n: usize, scratch: impl Fn() -> S + Sync + Send, run: impl Fn(&mut S, usize, &mut [f64]) + Sync + Send) -> Vec<f64> {
    let chunks = n.div_ceil(SOURCE_CHUNK);
    let partials = par::map_range_with(chunks, scratch, |scratch, c| {
        let mut acc = vec![0.0; n];
        for s in c * SOURCE_CHUNK..((c + 1) * SOURCE_CHUNK).min(n) {
            run(scratch, s, &mut acc);
        }
        acc
    });
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Raw betweenness: for every unordered pair `{s, t}` connected by a path,
/// the share of shortest `s–t` paths through each intermediate node.
pub fn betweenness(g: &Adjacency) -> Vec<f64> {
    let n = g.node_count();
    let mut total = if DenseRows::pays_off(g) {
        let rows = DenseRows::new(g);
        sum_over_sources(n, || DenseScratch::new(n, rows.words), |scratch, s, acc| scratch.accumulate(&rows, s, acc))
    } else {
        sum_over_sources(n, || BrandesScratch::new(n), |scratch, s, acc| scratch.accumulate(g, s, acc))
    };
    // every unordered pair was visited from both ends
    for t in &mut total {
        *t /= 2.0;
    }
    total
}

/// Betweenness divided by `(n-1)(n-2)/2`, the value of a star's centre.
pub fn normalized_betweenness(g: &Adjacency) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::CentralizationUndefined(n));
    }
    let scale = ((n - 1) * (n - 2)) as f64 / 2.0;
    Ok(betweenness(g).into_iter().map(|c| c / scale).collect())
}

/// Freeman betweenness centralization, normalized so a star scores 1.
pub fn centralization(g: &Adjacency) -> Result<f64> {
    let c = normalized_betweenness(g)?;
    let max = c.iter().copied().fold(0.0, f64::max);
    let gap: f64 = c.iter().map(|v| max - v).sum();
    Ok(gap / (c.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, edges: &[(u32, u32)]) -> Adjacency {
        Adjacency::from_edges(n, edges.iter().copied())
    }

    #[test]
    fn path_five() {
        let g = adj(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(betweenness(&g), vec![0.0, 3.0, 4.0, 3.0, 0.0]);
        let c = centralization(&g).unwrap();
        assert!((c - 10.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn star_is_one_and_cycle_zero() {
        let star = adj(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(centralization(&star).unwrap(), 1.0);
        let cycle = adj(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        assert_eq!(centralization(&cycle).unwrap(), 0.0);
    }

    #[test]
    fn four_cycle_splits_paths() {
        let g = adj(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(betweenness(&g), vec![0.5; 4]);
    }

    #[test]
    fn disconnected_pairs_are_ignored() {
        // a path 0-1-2 plus an isolated node 3
        let g = adj(4, &[(0, 1), (1, 2)]);
        assert_eq!(betweenness(&g), vec![0.0, 1.0, 0.0, 0.0]);
        let c = normalized_betweenness(&g).unwrap();
        assert!((c[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bitset_and_list_walks_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (n, p) in [(70, 0.5), (130, 0.3), (200, 0.08)] {
            // two blocks, so some pairs are unreachable
            let mut edges = Vec::new();
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if (a < 20) == (b < 20) && rng.gen::<f64>() < p {
                        edges.push((a, b));
                    }
                }
            }
            let g = adj(n, &edges);
            let rows = DenseRows::new(&g);
            let dense = sum_over_sources(n, || DenseScratch::new(n, rows.words), |s, v, acc| s.accumulate(&rows, v, acc));
            let list = sum_over_sources(n, || BrandesScratch::new(n), |s, v, acc| s.accumulate(&g, v, acc));
            for (a, b) in dense.iter().zip(&list) {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn too_small() {
        assert!(matches!(centralization(&adj(2, &[(0, 1)])), Err(Error::CentralizationUndefined(2))));
    }
}
