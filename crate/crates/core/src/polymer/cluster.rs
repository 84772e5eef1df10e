//! Clusters of a polymer universe.
//!
//! A cluster is a multiset of polymers whose incompatibility graph is connected,
//! where distinct copies of the same polymer count as incompatible. The multiset
//! `{γ_1^{m_1}, …, γ_s^{m_s}}` contributes `φ(H) Π w_i^{m_i} / Π m_i!`, with `H` the
//! incompatibility graph on all `Σ m_i` copies. Summed over every cluster, these terms
//! give `ln Ξ` as a formal series.
//!
//! Supports (the distinct polymers) are listed by connected-set enumeration in the
//! incompatibility graph, rooted at the lowest polymer index; multiplicities are then
//! distributed over the remaining size budget.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use super::ursell::{ursell_blowup, SmallGraph, MAX_URSELL_VERTICES};
use super::PolymerUniverse;
use crate::bitset::BitSet;
use crate::connected;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterOptions {
    /// Largest number of polymers (with repetition) in one cluster.
    pub max_polymers: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions { max_polymers: MAX_URSELL_VERTICES }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClusterStats {
    pub clusters: usize,
    pub largest: usize,
}

impl ClusterStats {
    pub fn merge(self, other: ClusterStats) -> ClusterStats {
        ClusterStats {
            clusters: self.clusters + other.clusters,
            largest: self.largest.max(other.largest),
        }
    }
}

/// One cluster and its Ursell coefficient.
#[derive(Debug, Clone, Copy)]
pub struct ClusterTerm<'a> {
    /// Distinct polymer indices, ascending.
    pub support: &'a [usize],
    pub multiplicity: &'a [usize],
    /// `‖Γ‖`: total vertex count with repetition.
    pub size: usize,
    /// `φ(H)` of the full incompatibility graph on all copies.
    pub ursell: i64,
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

impl ClusterTerm<'_> {
    /// Number of polymers counted with multiplicity.
    pub fn len(&self) -> usize {
        self.multiplicity.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The polymer list with repetition, ascending.
    pub fn polymers(&self) -> Vec<usize> {
        self.support
            .iter()
            .zip(self.multiplicity)
            .flat_map(|(&i, &m)| std::iter::repeat(i).take(m))
            .collect()
    }

    /// `φ(H) / Π m_i!`.
    pub fn coefficient(&self) -> BigRational {
        let mut denom = BigUint::one();
        for &m in self.multiplicity {
            for k in 2..=m {
                denom *= k;
            }
        }
        BigRational::new(BigInt::from(self.ursell), BigInt::from(denom))
    }

    /// The term in floating point, from natural-log weights.
    pub fn value_f64(&self, ln_w: &[f64]) -> f64 {
        let mut ln = (self.ursell.unsigned_abs() as f64).ln();
        for (&i, &m) in self.support.iter().zip(self.multiplicity) {
            ln += m as f64 * ln_w[i] - ln_factorial(m);
        }
        ln.exp().copysign(self.ursell as f64)
    }

    /// The exact term, from exact weights.
    pub fn value_exact(&self, w: &[BigRational]) -> BigRational {
        let mut value = self.coefficient();
        for (&i, &m) in self.support.iter().zip(self.multiplicity) {
            value *= num_traits::pow(w[i].clone(), m);
        }
        value
    }
}

/// Memoised Ursell values keyed by the support's incompatibility graph and the multiplicities.
#[derive(Debug, Default)]
pub struct UrsellCache {
    map: RwLock<HashMap<(Vec<u32>, Vec<usize>), i64>>,
}

impl UrsellCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, support: &SmallGraph, mult: &[usize]) -> i64 {
        let key = (support.adjacency().to_vec(), mult.to_vec());
        if let Some(&v) = self.map.read().expect("cache lock").get(&key) {
            return v;
        }
        let v = ursell_blowup(support, mult);
        self.map.write().expect("cache lock").insert(key, v);
        v
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Streams every cluster with `‖Γ‖ ≤ ell`.
pub fn for_each_cluster<F>(u: &PolymerUniverse, ell: usize, opts: ClusterOptions, visit: &mut F) -> Result<ClusterStats>
where
    F: FnMut(&ClusterTerm<'_>) -> Result<()>,
{
    let cache = UrsellCache::new();
    let mut stats = ClusterStats::default();
    for root in 0..u.len() {
        stats = stats.merge(for_each_cluster_rooted(u, root, ell, opts, &cache, visit)?);
    }
    Ok(stats)
}

/// Streams the clusters whose lowest polymer index is `root`.
pub fn for_each_cluster_rooted<F>(
    u: &PolymerUniverse,
    root: usize,
    ell: usize,
    opts: ClusterOptions,
    cache: &UrsellCache,
    visit: &mut F,
) -> Result<ClusterStats>
where
    F: FnMut(&ClusterTerm<'_>) -> Result<()>,
{
    if opts.max_polymers > MAX_URSELL_VERTICES {
        return Err(Error::invalid(format!(
            "clusters are limited to {MAX_URSELL_VERTICES} polymers, asked for {}",
            opts.max_polymers
        )));
    }
    let sizes: Vec<usize> = u.polymers().iter().map(|p| p.size()).collect();
    let all = BitSet::full(u.len());
    let mut stats = ClusterStats::default();
    connected::for_each_rooted(u.incompatibility(), &all, root, ell, &|i| sizes[i], &mut |support, total| {
        let support = support.to_vec();
        let mut mult = vec![1; support.len()];
        distribute(
            u,
            &support,
            &sizes,
            &mut mult,
            0,
            ell - total,
            total,
            opts,
            cache,
            &mut stats,
            visit,
        )
    })?;
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn distribute<F>(
    u: &PolymerUniverse,
    support: &[usize],
    sizes: &[usize],
    mult: &mut Vec<usize>,
    at: usize,
    budget: usize,
    total: usize,
    opts: ClusterOptions,
    cache: &UrsellCache,
    stats: &mut ClusterStats,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&ClusterTerm<'_>) -> Result<()>,
{
    if at == support.len() {
        let k: usize = mult.iter().sum();
        if k > opts.max_polymers {
            return Err(Error::capacity(format!(
                "a cluster of {k} polymers exceeds the limit of {}; lower the truncation size",
                opts.max_polymers
            )));
        }
        let h = support_graph(u, support);
        let term = ClusterTerm {
            support,
            multiplicity: mult,
            size: total,
            ursell: cache.get(&h, mult),
        };
        stats.clusters += 1;
        stats.largest = stats.largest.max(k);
        return visit(&term);
    }
    let s = sizes[support[at]];
    let mut extra = 0;
    loop {
        mult[at] = 1 + extra;
        distribute(
            u,
            support,
            sizes,
            mult,
            at + 1,
            budget - extra * s,
            total + extra * s,
            opts,
            cache,
            stats,
            visit,
        )?;
        if (extra + 1) * s > budget {
            break;
        }
        extra += 1;
    }
    mult[at] = 1;
    Ok(())
}

/// Incompatibility graph among the distinct polymers of a support.
fn support_graph(u: &PolymerUniverse, support: &[usize]) -> SmallGraph {
    let mut h = SmallGraph::new(support.len());
    for a in 0..support.len() {
        for b in a + 1..support.len() {
            if u.incompatible_with(support[a]).contains(support[b]) {
                h.add_edge(a, b);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BipartiteGraph, ExpansionParams, Side};
    use crate::instances::{generate, InstanceSpec};
    use crate::polymer::{PolymerFamily, WeightModel};
    use num_traits::Zero;

    fn c8_universe() -> (BipartiteGraph, PolymerUniverse) {
        let g = generate(&InstanceSpec::EvenCycle { m: 8 }).unwrap();
        let fam = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(1.0).unwrap());
        let u = PolymerUniverse::build(&g, &fam, 4).unwrap();
        (g, u)
    }

    fn sum_exact(u: &PolymerUniverse, ell: usize, model: &WeightModel) -> BigRational {
        let w = u.exact_weights(model).unwrap();
        let mut total = BigRational::zero();
        for_each_cluster(u, ell, ClusterOptions::default(), &mut |t| {
            total += t.value_exact(&w);
            Ok(())
        })
        .unwrap();
        total
    }

    #[test]
    fn singleton_level() {
        let (_, u) = c8_universe();
        let mut terms = Vec::new();
        for_each_cluster(&u, 1, ClusterOptions::default(), &mut |t| {
            terms.push((t.polymers(), t.ursell, t.size));
            Ok(())
        })
        .unwrap();
        assert_eq!(terms.len(), 4);
        assert!(terms.iter().all(|(p, phi, s)| p.len() == 1 && *phi == 1 && *s == 1));
        assert_eq!(sum_exact(&u, 1, &WeightModel::Unweighted), BigRational::one());
    }

    #[test]
    fn two_incompatible_polymers_second_order() {
        // C8 polymers {x0} and {x1} are incompatible; restrict the universe to them
        let (_, full) = c8_universe();
        let (u, _) = full.restrict(&BitSet::from_indices(4, [0, 1]));
        assert_eq!(u.len(), 3); // {x0}, {x1}, {x0, x1}
        let (pair, _) = u.restrict(&BitSet::from_indices(4, [0]));
        assert_eq!(pair.len(), 1);
        // keep only the two singletons
        let singles = PolymerUniverse::from_polymers(Side::X, u.polymers()[..2].to_vec()).unwrap();
        let w = singles.exact_weights(&WeightModel::Unweighted).unwrap();
        let mut second = BigRational::zero();
        for_each_cluster(&singles, 2, ClusterOptions::default(), &mut |t| {
            if t.len() == 2 {
                second += t.value_exact(&w);
            }
            Ok(())
        })
        .unwrap();
        let (a, b) = (w[0].clone(), w[1].clone());
        let two = BigRational::from_integer(2.into());
        let expect = -(a.clone() * b.clone()) - a.clone() * a / two.clone() - b.clone() * b / two;
        assert_eq!(second, expect);
    }

    #[test]
    fn float_and_exact_terms_agree() {
        let (_, u) = c8_universe();
        let model = WeightModel::Unweighted;
        let w = u.exact_weights(&model).unwrap();
        let lw = u.ln_weights(&model);
        for_each_cluster(&u, 6, ClusterOptions::default(), &mut |t| {
            let exact: f64 = num_traits::ToPrimitive::to_f64(&t.value_exact(&w)).unwrap();
            assert!((exact - t.value_f64(&lw)).abs() <= 1e-14 * exact.abs().max(1e-300));
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn cluster_cap_is_reported() {
        let (_, u) = c8_universe();
        let opts = ClusterOptions { max_polymers: 3 };
        let r = for_each_cluster(&u, 6, opts, &mut |_| Ok(()));
        assert!(matches!(r, Err(Error::Capacity(_))));
    }
}
