//! Exact ground truth: independent-set counts, hard-core partition functions and
//! the hard-core distribution itself, all in arbitrary-precision arithmetic.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::simple::SimpleGraph;

pub const BIPARTITE_SIDE_CAP: usize = 30;
pub const GENERAL_VERTEX_CAP: usize = 40;
pub const DISTRIBUTION_CAP: usize = 1 << 20;

/// An independent set of a bipartite graph, stored per side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndependentSet {
    pub x: BitSet,
    pub y: BitSet,
}

impl IndependentSet {
    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() && self.y.is_empty()
    }

    pub fn side(&self, side: Side) -> &BitSet {
        match side {
            Side::X => &self.x,
            Side::Y => &self.y,
        }
    }

    pub fn is_independent_in(&self, g: &BipartiteGraph) -> bool {
        !g.nbhd_bits(Side::X, &self.x).intersects(&self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactCount {
    pub value: BigUint,
    pub fingerprint: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactWeighted {
    pub value: BigRational,
    pub fingerprint: u64,
    pub elapsed: Duration,
}

/// Hash of the sorted edge list, for tagging results with their instance.
pub fn fingerprint(g: &BipartiteGraph) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (g.n_x(), g.n_y(), g.degree()).hash(&mut h);
    g.edges().hash(&mut h);
    h.finish()
}

/// `hist[s][k]` = number of `S ⊆ X` with `|S| = s` and `|N(S)| = k`, by a Gray-code sweep
/// that maintains per-Y coverage counters.
fn side_histogram(g: &BipartiteGraph) -> Result<Vec<Vec<u64>>> {
    let nx = g.n_x();
    if nx > BIPARTITE_SIDE_CAP {
        return Err(Error::capacity(format!(
            "bipartite sweep limited to {BIPARTITE_SIDE_CAP} vertices per side, got {nx}"
        )));
    }
    let ny = g.n_y();
    let mut hist = vec![vec![0u64; ny + 1]; nx + 1];
    let mut cover = vec![0u32; ny];
    let mut in_set = vec![false; nx];
    let (mut size, mut covered) = (0usize, 0usize);
    hist[0][0] = 1;
    for step in 1u64..(1u64 << nx) {
        let x = step.trailing_zeros() as usize;
        if in_set[x] {
            in_set[x] = false;
            size -= 1;
            for &y in g.neighbors(Side::X, x) {
                cover[y] -= 1;
                if cover[y] == 0 {
                    covered -= 1;
                }
            }
        } else {
            in_set[x] = true;
            size += 1;
            for &y in g.neighbors(Side::X, x) {
                if cover[y] == 0 {
                    covered += 1;
                }
                cover[y] += 1;
            }
        }
        hist[size][covered] += 1;
    }
    Ok(hist)
}

/// `i(G) = Σ_{S⊆X} 2^{n_Y - |N(S)|}`.
pub fn exact_count_bipartite(g: &BipartiteGraph) -> Result<ExactCount> {
    let start = Instant::now();
    let hist = side_histogram(g)?;
    let ny = g.n_y();
    let mut value = BigUint::zero();
    for row in &hist {
        for (k, &c) in row.iter().enumerate() {
            if c != 0 {
                value += BigUint::from(c) << (ny - k);
            }
        }
    }
    Ok(ExactCount {
        value,
        fingerprint: fingerprint(g),
        elapsed: start.elapsed(),
    })
}

/// `Z_G(λ) = Σ_{S⊆X} λ^{|S|}(1+λ)^{n_Y - |N(S)|}`.
pub fn exact_hardcore(g: &BipartiteGraph, lambda: &BigRational) -> Result<ExactWeighted> {
    if *lambda <= BigRational::zero() {
        return Err(Error::invalid("fugacity must be positive"));
    }
    let start = Instant::now();
    let hist = side_histogram(g)?;
    let ny = g.n_y();
    let one_plus = BigRational::one() + lambda;
    let lam_pow = powers(lambda, hist.len());
    let cover_pow = powers(&one_plus, ny + 1);
    let mut value = BigRational::zero();
    for (s, row) in hist.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c != 0 {
                value += BigRational::from_integer(c.into()) * &lam_pow[s] * &cover_pow[ny - k];
            }
        }
    }
    Ok(ExactWeighted {
        value,
        fingerprint: fingerprint(g),
        elapsed: start.elapsed(),
    })
}

pub(crate) fn powers(base: &BigRational, count: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(count);
    let mut cur = BigRational::one();
    for _ in 0..count {
        out.push(cur.clone());
        cur *= base;
    }
    out
}

/// Exact `i(G)` for an arbitrary graph by branching `i(G) = i(G - v) + i(G - N[v])` on a
/// maximum-degree vertex, splitting into connected components first.
pub fn exact_count_general(g: &SimpleGraph) -> Result<ExactCount> {
    let start = Instant::now();
    let n = g.n();
    if n > GENERAL_VERTEX_CAP {
        return Err(Error::capacity(format!(
            "branching counter limited to {GENERAL_VERTEX_CAP} vertices, got {n}"
        )));
    }
    let rows: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).words().first().copied().unwrap_or(0))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo = HashMap::new();
    let value = count_mask(&rows, full, &mut memo);
    Ok(ExactCount {
        value: BigUint::from(value),
        fingerprint: 0,
        elapsed: start.elapsed(),
    })
}

fn count_mask(rows: &[u64], mask: u64, memo: &mut HashMap<u64, u128>) -> u128 {
    if mask == 0 {
        return 1;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    // split off the component of the lowest vertex
    let first = mask.trailing_zeros() as usize;
    let mut comp = 1u64 << first;
    let mut frontier = comp;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = rows[v] & mask & !comp;
        comp |= fresh;
        frontier |= fresh;
    }
    let result = if comp != mask {
        count_mask(rows, comp, memo) * count_mask(rows, mask & !comp, memo)
    } else {
        let mut best = first;
        let mut best_deg = 0;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let deg = (rows[v] & mask).count_ones();
            if deg > best_deg {
                best_deg = deg;
                best = v;
            }
        }
        if best_deg == 0 {
            2
        } else {
            let without = mask & !(1u64 << best);
            let closed = without & !rows[best];
            count_mask(rows, without, memo) + count_mask(rows, closed, memo)
        }
    };
    if mask.count_ones() > 8 {
        memo.insert(mask, result);
    }
    result
}

/// Every independent set with its exact hard-core probability `λ^{|I|} / Z_G(λ)`.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub entries: Vec<(IndependentSet, BigRational)>,
    pub partition_function: BigRational,
}

impl ExactDistribution {
    pub fn probability(&self, set: &IndependentSet) -> BigRational {
        self.entries
            .binary_search_by(|(s, _)| s.cmp(set))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> IndependentSet {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (s, p) in &self.entries {
            acc += p.to_f64().unwrap_or(0.0);
            if u < acc {
                return s.clone();
            }
        }
        self.entries.last().expect("distribution is never empty").0.clone()
    }
}

pub fn exact_distribution(g: &BipartiteGraph, lambda: &BigRational) -> Result<ExactDistribution> {
    let z = exact_hardcore(g, lambda)?.value;
    let total = exact_count_bipartite(g)?.value;
    if total > BigUint::from(DISTRIBUTION_CAP) {
        return Err(Error::capacity(format!(
            "distribution table limited to {DISTRIBUTION_CAP} independent sets, graph has {total}"
        )));
    }
    let (nx, ny) = (g.n_x(), g.n_y());
    let lam_pow = powers(lambda, nx + ny + 1);
    let mut entries = Vec::new();
    for xm in 0u64..(1u64 << nx) {
        let xs = BitSet::from_mask(nx, xm);
        let free = g.nbhd_bits(Side::X, &xs).complement().to_vec();
        for ym in 0u64..(1u64 << free.len()) {
            let ys = BitSet::from_indices(
                ny,
                free.iter().enumerate().filter(|(i, _)| ym >> i & 1 == 1).map(|(_, &y)| y),
            );
            let size = xs.len() + ys.len();
            entries.push((IndependentSet { x: xs.clone(), y: ys }, &lam_pow[size] / &z));
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ExactDistribution { entries, partition_function: z })
}

/// Draws one independent set from `μ_{G,λ}` through the exact table.
pub fn exact_sampler(g: &BipartiteGraph, lambda: &BigRational, seed: u64) -> Result<IndependentSet> {
    let dist = exact_distribution(g, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(dist.sample(&mut rng))
}
