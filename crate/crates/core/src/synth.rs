//! Synthetic fat-tailed, degree-disassortative bipartite graphs.
//!
//! Degrees are drawn from discrete power laws capped at the opposite side's
//! size, stubs are paired by a configuration model, and degree-preserving
//! double-edge swaps are annealed until the correlation of logged endpoint
//! degrees reaches the requested value.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteEdge, BipartiteGraph};

/// Accepted distance between achieved and requested correlation.
pub const CORRELATION_TOLERANCE: f64 = 0.05;

/// The annealer keeps going past the tolerance until it gets this close.
const CORRELATION_AIM: f64 = 0.005;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    pub n_left: usize,
    pub n_right: usize,
    pub left_exponent: f64,
    pub right_exponent: f64,
    /// Smallest degree drawn on each side; clamped to the opposite side's size.
    pub left_min_degree: usize,
    pub right_min_degree: usize,
    pub target_disassortativity: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            n_left: 400,
            n_right: 2000,
            left_exponent: 2.5,
            right_exponent: 2.5,
            left_min_degree: 17,
            right_min_degree: 4,
            target_disassortativity: -0.33,
            seed: 7,
        }
    }
}

impl SyntheticParams {
    fn validate(&self) -> Result<()> {
        if self.n_left < 2 || self.n_right < 2 {
            return Err(Error::InvalidParameter("n_left and n_right must be at least 2".into()));
        }
        if !(self.left_exponent > 1.0 && self.right_exponent > 1.0) {
            return Err(Error::InvalidParameter("power-law exponents must exceed 1".into()));
        }
        if self.left_min_degree == 0 || self.right_min_degree == 0 {
            return Err(Error::InvalidParameter("minimum degrees must be at least 1".into()));
        }
        if !(-1.0..=1.0).contains(&self.target_disassortativity) {
            return Err(Error::InvalidParameter("target correlation must lie in [-1, 1]".into()));
        }
        Ok(())
    }
}

/// Generator output with the diagnostics behind it.
#[derive(Clone, Debug)]
pub struct SyntheticOutcome {
    pub graph: BipartiteGraph,
    /// Degree sequences after reconciling both sides to the same stub total.
    pub drawn_left: Vec<usize>,
    pub drawn_right: Vec<usize>,
    /// Stub pairs dropped because they duplicated an edge and no repair swap was found.
    pub rejected: Vec<(u32, u32)>,
    /// `None` when a side has constant degree.
    pub achieved: Option<f64>,
    pub rewiring_steps: u64,
    /// True when no degree-preserving swap exists at all.
    pub rigid: bool,
}

pub fn generate_synthetic(params: &SyntheticParams) -> Result<BipartiteGraph> {
    generate_synthetic_detailed(params).map(|o| o.graph)
}

pub fn generate_synthetic_detailed(params: &SyntheticParams) -> Result<SyntheticOutcome> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut left = sample_power_law(params.n_left, params.left_exponent, params.left_min_degree, params.n_right, &mut rng);
    let mut right =
        sample_power_law(params.n_right, params.right_exponent, params.right_min_degree, params.n_left, &mut rng);
    reconcile(&mut left, params.n_right, &mut right, params.n_left, &mut rng)?;

    let (mut edges, rejected) = pair_stubs(&left, &right, &mut rng);
    let anneal = anneal(&mut edges, &left, &right, params.target_disassortativity, &mut rng);
    if let Some(r) = anneal.achieved {
        if !anneal.rigid && (r - params.target_disassortativity).abs() > CORRELATION_TOLERANCE {
            return Err(Error::UnreachableCorrelation {
                target: params.target_disassortativity,
                achieved: r,
                steps: anneal.steps,
            });
        }
    }

    let left_ids = padded_ids('u', params.n_left);
    let right_ids = padded_ids('d', params.n_right);
    let edges = edges
        .into_iter()
        .map(|(l, r)| BipartiteEdge { left: l, right: r, multiplicity: 1 })
        .collect();
    let graph = BipartiteGraph::from_indexed(left_ids, right_ids, edges)?;
    Ok(SyntheticOutcome {
        graph,
        drawn_left: left,
        drawn_right: right,
        rejected,
        achieved: anneal.achieved,
        rewiring_steps: anneal.steps,
        rigid: anneal.rigid,
    })
}

fn padded_ids(prefix: char, n: usize) -> Vec<String> {
    let width = (n - 1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// `n` draws from `P(k) ∝ k^-exponent` on `min..=cap`.
fn sample_power_law(n: usize, exponent: f64, min: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let min = min.min(cap);
    let weights: Vec<f64> = (min..=cap).map(|k| (k as f64).powf(-exponent)).collect();
    let dist = WeightedIndex::new(&weights).expect("positive weights");
    (0..n).map(|_| dist.sample(rng) + min).collect()
}

/// Make both sequences sum to the same stub total by rescaling one side.
fn reconcile(
    left: &mut [usize],
    left_cap: usize,
    right: &mut [usize],
    right_cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let sl: usize = left.iter().sum();
    let sr: usize = right.iter().sum();
    if sl == sr {
        return Ok(());
    }
    let feasible = |seq: &[usize], cap: usize, target: usize| seq.len() <= target && target <= seq.len() * cap;
    // prefer raising the smaller side so the heavy tail of the other survives
    let (small, small_cap, big, big_cap, s_small, s_big) = if sl < sr {
        (left, left_cap, right, right_cap, sl, sr)
    } else {
        (right, right_cap, left, left_cap, sr, sl)
    };
    if feasible(small, small_cap, s_big) {
        rescale(small, small_cap, s_big, rng);
    } else if feasible(big, big_cap, s_small) {
        rescale(big, big_cap, s_small, rng);
    } else {
        return Err(Error::InvalidParameter("degree sequences cannot be reconciled".into()));
    }
    Ok(())
}

fn rescale(seq: &mut [usize], cap: usize, target: usize, rng: &mut ChaCha8Rng) {
    let factor = target as f64 / seq.iter().sum::<usize>() as f64;
    for k in seq.iter_mut() {
        *k = ((*k as f64 * factor).round() as usize).clamp(1, cap);
    }
    let mut total: usize = seq.iter().sum();
    while total != target {
        let i = rng.gen_range(0..seq.len());
        if total < target && seq[i] < cap {
            seq[i] += 1;
            total += 1;
        } else if total > target && seq[i] > 1 {
            seq[i] -= 1;
            total -= 1;
        }
    }
}

type EdgeSet = HashSet<(u32, u32)>;

/// Configuration-model pairing. Duplicate pairs are repaired by swapping
/// with a random existing edge; pairs that cannot be repaired are returned.
fn pair_stubs(left: &[usize], right: &[usize], rng: &mut ChaCha8Rng) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
    let left_stubs: Vec<u32> = left.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i as u32, k)).collect();
    let mut right_stubs: Vec<u32> =
        right.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i as u32, k)).collect();
    right_stubs.shuffle(rng);

    let mut edges = Vec::with_capacity(left_stubs.len());
    let mut present: EdgeSet = HashSet::with_capacity(left_stubs.len());
    let mut duplicates = Vec::new();
    for (&l, &r) in left_stubs.iter().zip(&right_stubs) {
        if present.insert((l, r)) {
            edges.push((l, r));
        } else {
            duplicates.push((l, r));
        }
    }

    let mut rejected = Vec::new();
    'dup: for (l, r) in duplicates {
        for _ in 0..200 {
            let j = rng.gen_range(0..edges.len());
            let (l2, r2) = edges[j];
            if l2 == l || r2 == r || present.contains(&(l, r2)) || present.contains(&(l2, r)) {
                continue;
            }
            present.remove(&(l2, r2));
            present.insert((l2, r));
            present.insert((l, r2));
            edges[j] = (l2, r);
            edges.push((l, r2));
            continue 'dup;
        }
        rejected.push((l, r));
    }
    (edges, rejected)
}

struct Annealed {
    achieved: Option<f64>,
    steps: u64,
    rigid: bool,
}

fn anneal(edges: &mut [(u32, u32)], left: &[usize], right: &[usize], target: f64, rng: &mut ChaCha8Rng) -> Annealed {
    let m = edges.len();
    // realized degrees can be below drawn ones when duplicates were rejected
    let mut dl = vec![0usize; left.len()];
    let mut dr = vec![0usize; right.len()];
    for &(l, r) in edges.iter() {
        dl[l as usize] += 1;
        dr[r as usize] += 1;
    }
    let lx: Vec<f64> = dl.iter().map(|&k| (k.max(1) as f64).ln()).collect();
    let ly: Vec<f64> = dr.iter().map(|&k| (k.max(1) as f64).ln()).collect();

    let mf = m as f64;
    let mx = edges.iter().map(|&(l, _)| lx[l as usize]).sum::<f64>() / mf;
    let my = edges.iter().map(|&(_, r)| ly[r as usize]).sum::<f64>() / mf;
    let vx = edges.iter().map(|&(l, _)| (lx[l as usize] - mx).powi(2)).sum::<f64>() / mf;
    let vy = edges.iter().map(|&(_, r)| (ly[r as usize] - my).powi(2)).sum::<f64>() / mf;
    let exact = |edges: &[(u32, u32)]| {
        let sxy: f64 = edges.iter().map(|&(l, r)| (lx[l as usize] - mx) * (ly[r as usize] - my)).sum();
        sxy / mf / (vx * vy).sqrt()
    };
    if vx <= 1e-18 || vy <= 1e-18 || m < 2 {
        return Annealed { achieved: None, steps: 0, rigid: true };
    }

    let scale = 1.0 / (mf * (vx * vy).sqrt());
    let mut r = exact(edges);
    let mut present: EdgeSet = edges.iter().copied().collect();
    let budget = 400 * m as u64 + 20_000;
    let (t_start, t_end) = (2.0 / mf, 0.01 / mf);
    let mut valid = 0u64;
    let mut steps = 0u64;
    while steps < budget && (r - target).abs() > CORRELATION_AIM {
        steps += 1;
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        let (l1, r1) = edges[i];
        let (l2, r2) = edges[j];
        if l1 == l2 || r1 == r2 || present.contains(&(l1, r2)) || present.contains(&(l2, r1)) {
            continue;
        }
        valid += 1;
        let (x1, x2) = (lx[l1 as usize], lx[l2 as usize]);
        let (y1, y2) = (ly[r1 as usize], ly[r2 as usize]);
        let next = r - (x1 - x2) * (y1 - y2) * scale;
        let delta = (next - target).abs() - (r - target).abs();
        let temperature = t_start * (t_end / t_start).powf(steps as f64 / budget as f64);
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
            present.remove(&(l1, r1));
            present.remove(&(l2, r2));
            present.insert((l1, r2));
            present.insert((l2, r1));
            edges[i] = (l1, r2);
            edges[j] = (l2, r1);
            r = next;
        }
    }
    Annealed { achieved: Some(exact(edges)), steps, rigid: valid == 0 }
}
