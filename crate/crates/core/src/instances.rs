//! Generators for the regular bipartite instance families used in tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// The hypercube `Q_d`, split by coordinate parity.
    Hypercube { d: usize },
    /// The cycle on `m` vertices (`m` even): `x_i ~ y_i` and `x_i ~ y_{i-1}`.
    EvenCycle { m: usize },
    CompleteBipartite { d: usize },
    /// Uniform-ish random d-regular bipartite graph with `n` vertices per side.
    RandomRegular { n: usize, d: usize, seed: u64 },
    /// Product of cycles of the given even lengths (each at least 4).
    EvenTorus { dims: Vec<usize> },
}

/// Restarts allowed for the plain configuration model before switching to
/// sequential pairing.
const PAIRING_ATTEMPTS: usize = 2_000;
const SEQUENTIAL_ATTEMPTS: usize = 100_000;

pub fn generate(spec: &InstanceSpec) -> Result<BipartiteGraph> {
    match spec {
        InstanceSpec::Hypercube { d } => hypercube(*d),
        InstanceSpec::EvenCycle { m } => even_cycle(*m),
        InstanceSpec::CompleteBipartite { d } => {
            if *d == 0 {
                return Err(Error::invalid("complete bipartite graph needs d >= 1"));
            }
            let edges: Vec<_> = (0..*d).flat_map(|x| (0..*d).map(move |y| (x, y))).collect();
            BipartiteGraph::from_edges(*d, *d, *d, &edges)
        }
        InstanceSpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed),
        InstanceSpec::EvenTorus { dims } => torus(dims),
    }
}

fn even_cycle(m: usize) -> Result<BipartiteGraph> {
    if m < 4 || m % 2 != 0 {
        return Err(Error::invalid(format!("even cycle needs an even length of at least 4, got {m}")));
    }
    let n = m / 2;
    let edges: Vec<_> = (0..n).flat_map(|i| [(i, i), (i, (i + n - 1) % n)]).collect();
    BipartiteGraph::from_edges(n, n, 2, &edges)
}

/// Splits `0..count` by a parity function and returns per-vertex side-local indices.
fn parity_split(count: usize, parity: impl Fn(usize) -> bool) -> (Vec<usize>, usize) {
    let mut local = vec![0; count];
    let (mut ex, mut odd) = (0, 0);
    for (v, slot) in local.iter_mut().enumerate() {
        if parity(v) {
            *slot = odd;
            odd += 1;
        } else {
            *slot = ex;
            ex += 1;
        }
    }
    debug_assert_eq!(ex, odd);
    (local, ex)
}

fn hypercube(d: usize) -> Result<BipartiteGraph> {
    if d == 0 || d > 24 {
        return Err(Error::invalid(format!("hypercube dimension must lie in 1..=24, got {d}")));
    }
    let count = 1usize << d;
    let odd = |v: usize| v.count_ones() % 2 == 1;
    let (local, n) = parity_split(count, odd);
    let mut edges = Vec::with_capacity(n * d);
    for v in (0..count).filter(|&v| !odd(v)) {
        for b in 0..d {
            edges.push((local[v], local[v ^ (1 << b)]));
        }
    }
    BipartiteGraph::from_edges(n, n, d, &edges)
}

fn torus(dims: &[usize]) -> Result<BipartiteGraph> {
    if dims.is_empty() {
        return Err(Error::invalid("torus needs at least one dimension"));
    }
    if let Some(bad) = dims.iter().find(|&&l| l < 4 || l % 2 != 0) {
        return Err(Error::invalid(format!("torus side lengths must be even and at least 4, got {bad}")));
    }
    let count: usize = dims.iter().product();
    let coords = |mut v: usize| {
        dims.iter()
            .map(|&l| {
                let c = v % l;
                v /= l;
                c
            })
            .collect::<Vec<_>>()
    };
    let index = |c: &[usize]| c.iter().zip(dims).rev().fold(0, |acc, (&ci, &l)| acc * l + ci);
    let odd = |v: usize| coords(v).iter().sum::<usize>() % 2 == 1;
    let (local, n) = parity_split(count, odd);
    let mut edges = Vec::new();
    for v in (0..count).filter(|&v| !odd(v)) {
        let c = coords(v);
        for (axis, &l) in dims.iter().enumerate() {
            for step in [1, l - 1] {
                let mut nc = c.clone();
                nc[axis] = (nc[axis] + step) % l;
                edges.push((local[v], local[index(&nc)]));
            }
        }
    }
    BipartiteGraph::from_edges(n, n, 2 * dims.len(), &edges)
}

fn random_regular(n: usize, d: usize, seed: u64) -> Result<BipartiteGraph> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::invalid(format!("random regular graph needs 1 <= d <= n, got n={n}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|y| std::iter::repeat(y).take(d)).collect();
    for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        if let Some(edges) = pair_stubs(n, d, &stubs) {
            return BipartiteGraph::from_edges(n, n, d, &edges);
        }
    }
    for _ in 0..SEQUENTIAL_ATTEMPTS {
        if let Some(edges) = sequential_pairing(n, d, &mut rng) {
            return BipartiteGraph::from_edges(n, n, d, &edges);
        }
    }
    Err(Error::capacity(format!(
        "no simple pairing found for n={n}, d={d} after {} restarts",
        PAIRING_ATTEMPTS + SEQUENTIAL_ATTEMPTS
    )))
}

/// Pairs the i-th X-stub (vertex `i / d`) with `stubs[i]`; `None` on a parallel edge.
fn pair_stubs(n: usize, d: usize, stubs: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut edges = Vec::with_capacity(n * d);
    for x in 0..n {
        let ys = &stubs[x * d..(x + 1) * d];
        for (i, &y) in ys.iter().enumerate() {
            if ys[..i].contains(&y) {
                return None;
            }
            edges.push((x, y));
        }
    }
    Some(edges)
}

/// Each X-stub draws a uniformly random free Y-stub among vertices not yet adjacent to
/// its owner; a dead end restarts the whole pairing.
fn sequential_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut free = vec![d; n];
    let mut edges = Vec::with_capacity(n * d);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &x in &order {
        let mut mine: Vec<usize> = Vec::with_capacity(d);
        for _ in 0..d {
            let total: usize = (0..n).filter(|y| !mine.contains(y)).map(|y| free[y]).sum();
            if total == 0 {
                return None;
            }
            let mut pick = rng.gen_range(0..total);
            let y = (0..n)
                .filter(|y| !mine.contains(y))
                .find(|&y| {
                    if pick < free[y] {
                        true
                    } else {
                        pick -= free[y];
                        false
                    }
                })
                .expect("pick lies inside the total");
            free[y] -= 1;
            mine.push(y);
            edges.push((x, y));
        }
    }
    Some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Side;

    #[test]
    fn small_families() {
        let q3 = generate(&InstanceSpec::Hypercube { d: 3 }).unwrap();
        assert_eq!((q3.n_x(), q3.n_y(), q3.degree()), (4, 4, 3));
        let c8 = generate(&InstanceSpec::EvenCycle { m: 8 }).unwrap();
        assert_eq!(c8.neighbors(Side::X, 0), &[0, 3]);
        assert_eq!(c8.neighbors(Side::X, 1), &[0, 1]);
        let k22 = generate(&InstanceSpec::CompleteBipartite { d: 2 }).unwrap();
        assert_eq!(k22.edges(), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let t = generate(&InstanceSpec::EvenTorus { dims: vec![4, 6] }).unwrap();
        assert_eq!((t.n(), t.degree()), (12, 4));
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate(&InstanceSpec::EvenCycle { m: 7 }).is_err());
        assert!(generate(&InstanceSpec::EvenTorus { dims: vec![3] }).is_err());
        assert!(generate(&InstanceSpec::RandomRegular { n: 3, d: 4, seed: 0 }).is_err());
    }

    #[test]
    fn random_regular_is_reproducible_and_valid() {
        for (n, d) in [(6, 3), (10, 4), (16, 8), (20, 16), (5, 5)] {
            let a = generate(&InstanceSpec::RandomRegular { n, d, seed: 42 }).unwrap();
            let b = generate(&InstanceSpec::RandomRegular { n, d, seed: 42 }).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            // passes the loader's validation
            assert_eq!(BipartiteGraph::parse(&a.to_text()).unwrap(), a);
        }
    }
}
