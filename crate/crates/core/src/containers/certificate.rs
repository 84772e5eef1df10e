//! Certificates for independent sets of size at least `T`.
//!
//! Starting from `V_0 = V(G)`, repeatedly pick the vertex of largest degree inside the
//! current set (ties broken by a fixed ordering). If it belongs to `I`, remove its closed
//! neighbourhood and record a 1; otherwise remove it alone and record a 0. The run stops
//! after `T` ones. The recorded bits determine every removal, so they determine the final
//! set `V_ξ` and the part of `I` outside it.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::simple::SimpleGraph;

/// Upper limit on certificates visited by [`for_each_certificate`].
pub const MAX_CERTIFICATES: usize = 1 << 22;

/// Upper limit on sets enumerated by [`count_below`].
pub const MAX_SMALL_SETS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    /// One entry per loop step.
    pub xi: Vec<bool>,
    pub t: usize,
    /// Vertices listed from highest to lowest tie-breaking priority.
    pub ordering: Vec<usize>,
}

impl Certificate {
    pub fn ones(&self) -> usize {
        self.xi.iter().filter(|&&b| b).count()
    }

    pub fn to_bit_string(&self) -> String {
        self.xi.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// What a certificate pins down: the terminal vertex set and the forced members of `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub v_xi: BitSet,
    pub forced: BitSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCensus {
    pub t: usize,
    pub certificates: usize,
    pub largest_region: usize,
    /// `Σ_ξ i(G[V_ξ])`, the number of independent sets of size at least `t`.
    pub at_least_t: BigUint,
}

fn rank_of(n: usize, ordering: &[usize]) -> Result<Vec<usize>> {
    if ordering.len() != n {
        return Err(Error::invalid(format!("ordering has {} entries for {n} vertices", ordering.len())));
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &v) in ordering.iter().enumerate() {
        if v >= n || rank[v] != usize::MAX {
            return Err(Error::invalid("ordering is not a permutation of the vertices"));
        }
        rank[v] = i;
    }
    Ok(rank)
}

/// Tracks `V_i` and the degrees inside it.
struct Run<'a> {
    g: &'a SimpleGraph,
    rank: Vec<usize>,
    alive: BitSet,
    degree: Vec<usize>,
}

impl<'a> Run<'a> {
    fn new(g: &'a SimpleGraph, rank: Vec<usize>) -> Self {
        let degree = (0..g.n()).map(|v| g.degree(v)).collect();
        Run {
            g,
            rank,
            alive: BitSet::full(g.n()),
            degree,
        }
    }

    fn pick(&self) -> Option<usize> {
        self.alive
            .iter()
            .max_by(|&u, &v| self.degree[u].cmp(&self.degree[v]).then(self.rank[v].cmp(&self.rank[u])))
    }

    fn drop_vertex(&mut self, v: usize) {
        if self.alive.contains(v) {
            self.alive.remove(v);
            for u in self.g.neighbors(v).iter() {
                self.degree[u] -= 1;
            }
        }
    }

    fn step(&mut self, v: usize, chosen: bool) {
        if chosen {
            for u in self.g.neighbors(v).to_vec() {
                self.drop_vertex(u);
            }
        }
        self.drop_vertex(v);
    }
}

pub fn compute_certificate(g: &SimpleGraph, i: &BitSet, t: usize, ordering: &[usize]) -> Result<Certificate> {
    let rank = rank_of(g.n(), ordering)?;
    if i.universe() != g.n() || !g.is_independent(i) {
        return Err(Error::invalid("input is not an independent set of the graph"));
    }
    if i.len() < t {
        return Err(Error::invalid(format!("independent set of size {} is smaller than T = {t}", i.len())));
    }
    let mut run = Run::new(g, rank);
    let mut xi = Vec::new();
    let mut ones = 0;
    while ones < t {
        let v = run.pick().expect("vertices of I remain while fewer than T are found");
        let chosen = i.contains(v);
        run.step(v, chosen);
        xi.push(chosen);
        ones += usize::from(chosen);
    }
    Ok(Certificate {
        xi,
        t,
        ordering: ordering.to_vec(),
    })
}

/// Replays a certificate without knowledge of `I`.
pub fn certificate_region(g: &SimpleGraph, cert: &Certificate) -> Result<Region> {
    let rank = rank_of(g.n(), &cert.ordering)?;
    if cert.ones() != cert.t {
        return Err(Error::MalformedCertificate(format!(
            "certificate records {} ones but T = {}",
            cert.ones(),
            cert.t
        )));
    }
    if cert.xi.last() == Some(&false) {
        return Err(Error::MalformedCertificate("certificate runs past its last 1".into()));
    }
    let mut run = Run::new(g, rank);
    let mut forced = BitSet::new(g.n());
    for (step, &bit) in cert.xi.iter().enumerate() {
        let v = run
            .pick()
            .ok_or_else(|| Error::MalformedCertificate(format!("no vertex left at step {step}")))?;
        if bit {
            forced.insert(v);
        }
        run.step(v, bit);
    }
    Ok(Region {
        v_xi: run.alive,
        forced,
    })
}

/// Visits every certificate with `t` ones that some independent set produces, with its region.
pub fn for_each_certificate<F>(g: &SimpleGraph, t: usize, ordering: &[usize], visit: &mut F) -> Result<usize>
where
    F: FnMut(&Certificate, &Region) -> Result<()>,
{
    let rank = rank_of(g.n(), ordering)?;
    let mut run = Run::new(g, rank);
    let mut xi = Vec::new();
    let mut forced = BitSet::new(g.n());
    let mut count = 0;
    branch(g, t, ordering, &mut run, &mut xi, &mut forced, &mut count, visit)?;
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn branch<F>(
    g: &SimpleGraph,
    t: usize,
    ordering: &[usize],
    run: &mut Run<'_>,
    xi: &mut Vec<bool>,
    forced: &mut BitSet,
    count: &mut usize,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&Certificate, &Region) -> Result<()>,
{
    let ones = forced.len();
    if ones == t {
        *count += 1;
        if *count > MAX_CERTIFICATES {
            return Err(Error::capacity(format!("more than {MAX_CERTIFICATES} certificates")));
        }
        let cert = Certificate {
            xi: xi.clone(),
            t,
            ordering: ordering.to_vec(),
        };
        let region = Region {
            v_xi: run.alive.clone(),
            forced: forced.clone(),
        };
        return visit(&cert, &region);
    }
    if run.alive.len() < t - ones {
        return Ok(());
    }
    let Some(v) = run.pick() else {
        return Ok(());
    };
    for chosen in [false, true] {
        let saved_alive = run.alive.clone();
        let saved_degree = run.degree.clone();
        run.step(v, chosen);
        xi.push(chosen);
        if chosen {
            forced.insert(v);
        }
        let r = branch(g, t, ordering, run, xi, forced, count, visit);
        xi.pop();
        forced.remove(v);
        run.alive = saved_alive;
        run.degree = saved_degree;
        r?;
    }
    Ok(())
}

/// Sums `counter(G[V_ξ])` over all certificates with `t` ones.
pub fn count_via_certificates<C>(g: &SimpleGraph, t: usize, ordering: &[usize], counter: C) -> Result<CertificateCensus>
where
    C: Fn(&SimpleGraph) -> Result<BigUint>,
{
    let mut total = BigUint::zero();
    let mut largest = 0;
    let certificates = for_each_certificate(g, t, ordering, &mut |_, region| {
        largest = largest.max(region.v_xi.len());
        total += counter(&g.induced(&region.v_xi))?;
        Ok(())
    })?;
    Ok(CertificateCensus {
        t,
        certificates,
        largest_region: largest,
        at_least_t: total,
    })
}

/// Number of independent sets of size less than `t`, by direct enumeration.
pub fn count_below(g: &SimpleGraph, t: usize) -> Result<BigUint> {
    fn grow(g: &SimpleGraph, cand: &BitSet, size: usize, t: usize, count: &mut u64) -> Result<()> {
        *count += 1;
        if *count > MAX_SMALL_SETS {
            return Err(Error::capacity(format!("more than {MAX_SMALL_SETS} small independent sets")));
        }
        if size + 1 >= t {
            return Ok(());
        }
        for v in cand.iter() {
            let mut next = cand.difference(g.neighbors(v));
            // only later vertices, so each set is built in ascending order once
            for u in 0..=v {
                next.remove(u);
            }
            grow(g, &next, size + 1, t, count)?;
        }
        Ok(())
    }
    if t == 0 {
        return Ok(BigUint::zero());
    }
    let mut count = 0u64;
    grow(g, &BitSet::full(g.n()), 0, t, &mut count)?;
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec};
    use crate::oracle::exact_count_general;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    fn simple(spec: InstanceSpec) -> SimpleGraph {
        SimpleGraph::from_bipartite(&generate(&spec).unwrap())
    }

    fn identity(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    fn exact(h: &SimpleGraph) -> Result<BigUint> {
        Ok(exact_count_general(h)?.value)
    }

    fn all_independent_sets(g: &SimpleGraph) -> Vec<BitSet> {
        let n = g.n();
        (0u64..1 << n)
            .map(|m| BitSet::from_mask(n, m))
            .filter(|s| g.is_independent(s))
            .collect()
    }

    #[test]
    fn zero_threshold() {
        let g = simple(InstanceSpec::EvenCycle { m: 8 });
        let cert = compute_certificate(&g, &BitSet::new(8), 0, &identity(8)).unwrap();
        assert!(cert.xi.is_empty());
        let region = certificate_region(&g, &cert).unwrap();
        assert_eq!(region.v_xi, BitSet::full(8));
        assert!(region.forced.is_empty());
        let census = count_via_certificates(&g, 0, &identity(8), exact).unwrap();
        assert_eq!(census.certificates, 1);
        assert_eq!(census.at_least_t, BigUint::from(47u32));
    }

    #[test]
    fn cycle_worked_example() {
        // X = 0..4, Y = 4..8; I = the whole X side
        let g = simple(InstanceSpec::EvenCycle { m: 8 });
        let i = BitSet::from_indices(8, [0, 1, 2, 3]);
        let cert = compute_certificate(&g, &i, 2, &identity(8)).unwrap();
        assert_eq!(cert.ones(), 2);
        // every degree is 2, so vertex 0 is picked and lies in I; then its non-neighbours
        // 1 and 3 (degree 1) tie below 2 (degree 2), and vertex 2 is picked
        assert_eq!(cert.to_bit_string(), "11");
        let region = certificate_region(&g, &cert).unwrap();
        assert!(region.v_xi.len() <= 6);
        assert_eq!(region.forced.to_vec(), vec![0, 2]);
        let rebuilt = region.forced.union(&i.intersection(&region.v_xi));
        assert_eq!(rebuilt, i);
        assert_eq!(compute_certificate(&g, &i, 2, &identity(8)).unwrap(), cert);
    }

    #[test]
    fn invalid_inputs() {
        let g = simple(InstanceSpec::EvenCycle { m: 8 });
        let edge = BitSet::from_indices(8, [0, 4]);
        assert!(compute_certificate(&g, &edge, 1, &identity(8)).is_err());
        let one = BitSet::from_indices(8, [0]);
        assert!(compute_certificate(&g, &one, 2, &identity(8)).is_err());
        let bad = Certificate {
            xi: vec![true; 6],
            t: 6,
            ordering: identity(8),
        };
        assert!(matches!(certificate_region(&g, &bad), Err(Error::MalformedCertificate(_))));
        let trailing = Certificate {
            xi: vec![true, false],
            t: 1,
            ordering: identity(8),
        };
        assert!(matches!(certificate_region(&g, &trailing), Err(Error::MalformedCertificate(_))));
    }

    #[test]
    fn certificate_identity_on_small_graphs() {
        let cases = [
            (InstanceSpec::EvenCycle { m: 8 }, 1usize),
            (InstanceSpec::EvenCycle { m: 8 }, 2),
            (InstanceSpec::CompleteBipartite { d: 2 }, 1),
            (InstanceSpec::Hypercube { d: 3 }, 2),
            (InstanceSpec::EvenCycle { m: 12 }, 3),
        ];
        for (spec, t) in cases {
            let g = simple(spec.clone());
            let census = count_via_certificates(&g, t, &identity(g.n()), exact).unwrap();
            let below = count_below(&g, t).unwrap();
            assert_eq!(below + census.at_least_t, exact(&g).unwrap(), "{spec:?} T={t}");
        }
        let k22 = simple(InstanceSpec::CompleteBipartite { d: 2 });
        assert_eq!(count_below(&k22, 1).unwrap(), BigUint::from(1u32));
        let census = count_via_certificates(&k22, 1, &identity(4), exact).unwrap();
        assert_eq!(census.at_least_t, BigUint::from(6u32));
    }

    #[test]
    fn certificate_map_is_a_bijection() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut graphs = vec![
            simple(InstanceSpec::EvenCycle { m: 12 }),
            simple(InstanceSpec::Hypercube { d: 3 }),
            simple(InstanceSpec::EvenTorus { dims: vec![4, 4] }),
        ];
        graphs.push(simple(InstanceSpec::RandomRegular { n: 7, d: 3, seed: 5 }));
        for g in graphs {
            let n = g.n();
            let mut ordering = identity(n);
            use rand::seq::SliceRandom;
            ordering.shuffle(&mut rng);
            let sets = all_independent_sets(&g);
            for t in 0..=3 {
                let mut pairs = HashSet::new();
                let mut expected = 0usize;
                for i in sets.iter().filter(|s| s.len() >= t) {
                    expected += 1;
                    let cert = compute_certificate(&g, i, t, &ordering).unwrap();
                    let region = certificate_region(&g, &cert).unwrap();
                    assert!(region.forced.is_subset(i));
                    assert!(!region.v_xi.intersects(&region.forced));
                    let rest = i.intersection(&region.v_xi);
                    assert_eq!(region.forced.union(&rest), *i);
                    assert!(pairs.insert((cert.xi.clone(), rest)));
                }
                // every pair (certificate, independent subset of its region) arises
                let mut produced = 0usize;
                for_each_certificate(&g, t, &ordering, &mut |_, region| {
                    let h = g.induced(&region.v_xi);
                    produced += all_independent_sets(&h).len();
                    Ok(())
                })
                .unwrap();
                assert_eq!(produced, expected);
                assert_eq!(pairs.len(), expected);
            }
            let _ = rng.gen::<u8>();
        }
    }

    #[test]
    fn region_bound_on_random_regular_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for (n, d) in [(40, 8), (64, 16)] {
            let bip = generate(&InstanceSpec::RandomRegular { n, d, seed: 9 }).unwrap();
            let g = SimpleGraph::from_bipartite(&bip);
            let total = g.n() as f64;
            let t = (total * (d as f64).ln() / d as f64).ceil() as usize;
            for _ in 0..50 {
                // random maximal independent set grown in a random order
                let mut order = identity(g.n());
                use rand::seq::SliceRandom;
                order.shuffle(&mut rng);
                let mut i = BitSet::new(g.n());
                for v in order {
                    if !g.neighbors(v).intersects(&i) {
                        i.insert(v);
                    }
                }
                if i.len() < t {
                    continue;
                }
                let cert = compute_certificate(&g, &i, t, &identity(g.n())).unwrap();
                let region = certificate_region(&g, &cert).unwrap();
                let bound = total / 2.0 + 4.0 * total * (d as f64).ln() / d as f64;
                assert!(region.v_xi.len() as f64 <= bound);
            }
        }
    }
}
