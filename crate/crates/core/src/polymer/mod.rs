//! Polymers on one side of the bipartition, their weights and their clusters.
//!
//! A polymer is a nonempty 2-linked set on a fixed side that passes a membership
//! test. Two polymers are compatible when their union is not 2-linked, which for
//! 2-linked sets means exactly that their neighbourhoods are disjoint.

mod cluster;
pub mod ursell;
mod weight;

pub use cluster::{for_each_cluster, for_each_cluster_rooted, ClusterOptions, ClusterStats, ClusterTerm, UrsellCache};
pub use ursell::{ursell, SmallGraph, DEFAULT_URSELL_CAP};
pub use weight::{Fugacity, WeightModel};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::connected;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, ExpansionParams, Side, SideSet};

/// Upper limit on the size of a polymer universe.
pub const MAX_POLYMERS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    /// 2-linked expanding sets.
    Expanding(ExpansionParams),
    /// 2-linked sets whose closure holds at most half the side.
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolymerFamily {
    pub membership: Membership,
    pub side: Side,
}

impl PolymerFamily {
    pub fn expanding(side: Side, params: ExpansionParams) -> Self {
        PolymerFamily {
            membership: Membership::Expanding(params),
            side,
        }
    }

    pub fn small(side: Side) -> Self {
        PolymerFamily {
            membership: Membership::Small,
            side,
        }
    }

    /// The same membership rule on the other side.
    pub fn mirrored(&self) -> Self {
        PolymerFamily {
            side: self.side.opposite(),
            ..*self
        }
    }

    /// Membership test for a 2-linked set on `self.side`.
    pub fn admits(&self, g: &BipartiteGraph, set: &BitSet) -> bool {
        match self.membership {
            Membership::Expanding(p) => g.is_expanding_bits(self.side, set, &p),
            Membership::Small => 2 * g.closure_bits(self.side, set).len() <= g.side_len(self.side),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polymer {
    pub vertices: SideSet,
    pub boundary: SideSet,
}

impl Polymer {
    /// Wraps a 2-linked set, caching its neighbourhood.
    pub fn new(g: &BipartiteGraph, vertices: SideSet) -> Result<Self> {
        if !g.is_two_linked(&vertices)? {
            return Err(Error::invalid(format!("{vertices:?} is not a nonempty 2-linked set")));
        }
        let boundary = g.neighborhood(&vertices)?;
        Ok(Polymer { vertices, boundary })
    }

    pub fn side(&self) -> Side {
        self.vertices.side
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }
}

/// Whether `γ ∪ γ'` fails to be 2-linked.
pub fn are_compatible(a: &Polymer, b: &Polymer) -> Result<bool> {
    if a.side() != b.side() {
        return Err(Error::invalid("polymers lie on different sides"));
    }
    Ok(!a.boundary.members.intersects(&b.boundary.members))
}

/// Every admitted polymer with at most `size_cap` vertices, sorted by (size, vertices).
pub fn enumerate_polymers(g: &BipartiteGraph, fam: &PolymerFamily, size_cap: usize) -> Result<Vec<Polymer>> {
    enumerate_polymers_within(g, fam, size_cap, None)
}

/// As [`enumerate_polymers`], keeping only polymers inside `within`.
pub fn enumerate_polymers_within(
    g: &BipartiteGraph,
    fam: &PolymerFamily,
    size_cap: usize,
    within: Option<&BitSet>,
) -> Result<Vec<Polymer>> {
    let side = fam.side;
    let n = g.side_len(side);
    let allowed = match within {
        Some(w) if w.universe() != n => {
            return Err(Error::invalid("restriction set does not match the polymer side"));
        }
        Some(w) => w.clone(),
        None => BitSet::full(n),
    };
    let mut out = Vec::new();
    connected::for_each_connected(g.square(side), &allowed, size_cap, &|_| 1, &mut |set, _| {
        if fam.admits(g, set) {
            if out.len() >= MAX_POLYMERS {
                return Err(Error::capacity(format!(
                    "polymer universe exceeds {MAX_POLYMERS} polymers of size at most {size_cap} ({} found so far)",
                    out.len()
                )));
            }
            out.push(Polymer {
                vertices: g.wrap(side, set.clone()),
                boundary: g.wrap(side.opposite(), g.nbhd_bits(side, set)),
            });
        }
        Ok(())
    })?;
    out.sort_by_cached_key(|p| (p.size(), p.vertices.to_vec()));
    Ok(out)
}

/// A finite list of polymers together with their incompatibility graph.
#[derive(Debug, Clone)]
pub struct PolymerUniverse {
    pub side: Side,
    polymers: Vec<Polymer>,
    incompatible: Vec<BitSet>,
}

impl PolymerUniverse {
    pub fn build(g: &BipartiteGraph, fam: &PolymerFamily, size_cap: usize) -> Result<Self> {
        Self::from_polymers(fam.side, enumerate_polymers(g, fam, size_cap)?)
    }

    pub fn build_within(g: &BipartiteGraph, fam: &PolymerFamily, size_cap: usize, within: &BitSet) -> Result<Self> {
        Self::from_polymers(fam.side, enumerate_polymers_within(g, fam, size_cap, Some(within))?)
    }

    /// Builds the incompatibility graph (loops omitted; self-incompatibility is implicit).
    pub fn from_polymers(side: Side, polymers: Vec<Polymer>) -> Result<Self> {
        let p = polymers.len();
        if p > MAX_POLYMERS {
            return Err(Error::capacity(format!("{p} polymers exceed the limit of {MAX_POLYMERS}")));
        }
        if polymers.iter().any(|q| q.side() != side) {
            return Err(Error::invalid("polymers lie on different sides"));
        }
        // index polymers by boundary vertex; incompatible pairs share one
        let width = polymers.first().map_or(0, |q| q.boundary.members.universe());
        let mut by_vertex = vec![Vec::new(); width];
        for (i, q) in polymers.iter().enumerate() {
            for y in q.boundary.iter() {
                by_vertex[y].push(i);
            }
        }
        let mut incompatible = vec![BitSet::new(p); p];
        for list in &by_vertex {
            for &i in list {
                for &j in list {
                    if i != j {
                        incompatible[i].insert(j);
                    }
                }
            }
        }
        Ok(PolymerUniverse {
            side,
            polymers,
            incompatible,
        })
    }

    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn polymer(&self, i: usize) -> &Polymer {
        &self.polymers[i]
    }

    /// Neighbours of polymer `i` in the incompatibility graph, itself excluded.
    pub fn incompatible_with(&self, i: usize) -> &BitSet {
        &self.incompatible[i]
    }

    pub fn incompatibility(&self) -> &[BitSet] {
        &self.incompatible
    }

    pub fn total_size(&self) -> usize {
        self.polymers.iter().map(Polymer::size).sum()
    }

    /// The sub-universe of polymers lying inside `allowed`, with the index map back.
    pub fn restrict(&self, allowed: &BitSet) -> (PolymerUniverse, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.polymers[i].vertices.members.is_subset(allowed))
            .collect();
        let mut position = vec![usize::MAX; self.len()];
        for (k, &i) in keep.iter().enumerate() {
            position[i] = k;
        }
        let incompatible = keep
            .iter()
            .map(|&i| {
                BitSet::from_indices(
                    keep.len(),
                    self.incompatible[i].iter().filter(|&j| position[j] != usize::MAX).map(|j| position[j]),
                )
            })
            .collect();
        let sub = PolymerUniverse {
            side: self.side,
            polymers: keep.iter().map(|&i| self.polymers[i].clone()).collect(),
            incompatible,
        };
        (sub, keep)
    }

    /// Natural-log weights of every polymer.
    pub fn ln_weights(&self, model: &WeightModel) -> Vec<f64> {
        self.polymers
            .iter()
            .map(|q| model.ln_weight(q.size(), q.boundary_len()))
            .collect()
    }

    /// Exact weights, when the model admits them.
    pub fn exact_weights(&self, model: &WeightModel) -> Option<Vec<num_rational::BigRational>> {
        self.polymers
            .iter()
            .map(|q| model.exact_weight(q.size(), q.boundary_len()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec};

    fn c8() -> BipartiteGraph {
        generate(&InstanceSpec::EvenCycle { m: 8 }).unwrap()
    }

    fn poly(g: &BipartiteGraph, side: Side, v: &[usize]) -> Polymer {
        Polymer::new(g, g.side_set(side, v.iter().copied()).unwrap()).unwrap()
    }

    #[test]
    fn compatibility_examples() {
        let g = c8();
        let (a, b, c) = (poly(&g, Side::X, &[0]), poly(&g, Side::X, &[2]), poly(&g, Side::X, &[1]));
        assert!(are_compatible(&a, &b).unwrap());
        assert!(!are_compatible(&a, &c).unwrap());
        assert!(!are_compatible(&a, &a).unwrap());
        let y = poly(&g, Side::Y, &[0]);
        assert!(are_compatible(&a, &y).is_err());
        assert!(Polymer::new(&g, g.side_set(Side::X, [0, 2]).unwrap()).is_err());
    }

    #[test]
    fn compatibility_is_union_not_two_linked() {
        let g = generate(&InstanceSpec::Hypercube { d: 3 }).unwrap();
        let fam = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(0.01).unwrap());
        let all = enumerate_polymers(&g, &fam, 4).unwrap();
        assert!(!all.is_empty());
        for a in &all {
            for b in &all {
                let union = a.vertices.members.union(&b.vertices.members);
                let linked = g.is_two_linked_bits(Side::X, &union);
                assert_eq!(are_compatible(a, b).unwrap(), !linked);
                assert_eq!(are_compatible(a, b).unwrap(), are_compatible(b, a).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let g = c8();
        let fam = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(1.0).unwrap());
        let list = enumerate_polymers(&g, &fam, 4).unwrap();
        let sets: Vec<Vec<usize>> = list.iter().map(|q| q.vertices.to_vec()).collect();
        assert_eq!(
            sets,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![3],
                vec![0, 1],
                vec![0, 3],
                vec![1, 2],
                vec![2, 3]
            ]
        );
        let k22 = generate(&InstanceSpec::CompleteBipartite { d: 2 }).unwrap();
        // every nonempty set of K_{2,2} has the whole side as its closure
        assert!(enumerate_polymers(&k22, &PolymerFamily::small(Side::X), 2).unwrap().is_empty());
        let small = enumerate_polymers(&g, &PolymerFamily::small(Side::X), 4).unwrap();
        assert_eq!(small.len(), 8);
        assert!(enumerate_polymers(&g, &fam, 0).unwrap().is_empty());
    }

    #[test]
    fn universe_graph_matches_pairwise_check() {
        for spec in [
            InstanceSpec::EvenCycle { m: 12 },
            InstanceSpec::Hypercube { d: 3 },
            InstanceSpec::RandomRegular { n: 8, d: 3, seed: 1 },
        ] {
            let g = generate(&spec).unwrap();
            let u = PolymerUniverse::build(&g, &PolymerFamily::small(Side::Y), 3).unwrap();
            for i in 0..u.len() {
                for j in 0..u.len() {
                    let expect = i != j && !are_compatible(u.polymer(i), u.polymer(j)).unwrap();
                    assert_eq!(u.incompatible_with(i).contains(j), expect);
                }
            }
            let allowed = BitSet::from_indices(g.n_y(), [0, 1, 2, 3]);
            let (sub, map) = u.restrict(&allowed);
            for (k, &i) in map.iter().enumerate() {
                assert!(u.polymer(i).vertices.members.is_subset(&allowed));
                for (l, &j) in map.iter().enumerate() {
                    assert_eq!(sub.incompatible_with(k).contains(l), u.incompatible_with(i).contains(j));
                }
            }
        }
    }

    #[test]
    fn restriction_matches_enumeration_within() {
        let g = generate(&InstanceSpec::EvenCycle { m: 12 }).unwrap();
        let fam = PolymerFamily::small(Side::X);
        let u = PolymerUniverse::build(&g, &fam, 3).unwrap();
        let allowed = BitSet::from_indices(6, [0, 1, 2, 4]);
        let (sub, _) = u.restrict(&allowed);
        let direct = PolymerUniverse::build_within(&g, &fam, 3, &allowed).unwrap();
        assert_eq!(sub.polymers(), direct.polymers());
    }
}
