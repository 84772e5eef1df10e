//! Arbitrary simple graphs, used where the bipartite structure is lost:
//! induced subgraphs of the certificate construction and the exact branching counter.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<BitSet>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { adj: vec![BitSet::new(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SimpleGraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge {u}-{v} outside 0..{n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    /// Relabels a bipartite graph: X-vertex `i` becomes `i`, Y-vertex `j` becomes `n_x + j`.
    pub fn from_bipartite(g: &BipartiteGraph) -> Self {
        let nx = g.n_x();
        let edges: Vec<_> = g.edges().into_iter().map(|(x, y)| (x, nx + y)).collect();
        SimpleGraph::from_edges(nx + g.n_y(), &edges).expect("bipartite edges are valid")
    }

    pub fn vertex_of(g: &BipartiteGraph, side: Side, v: usize) -> usize {
        match side {
            Side::X => v,
            Side::Y => g.n_x() + v,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    /// Common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, |r| r.len());
        self.adj.iter().all(|r| r.len() == d).then_some(d)
    }

    pub fn is_independent(&self, set: &BitSet) -> bool {
        set.iter().all(|v| !self.adj[v].intersects(set))
    }

    /// The subgraph induced by `keep`, relabelled to `0..|keep|` in ascending order.
    pub fn induced(&self, keep: &BitSet) -> SimpleGraph {
        let verts = keep.to_vec();
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
        }
        let k = verts.len();
        let adj = verts
            .iter()
            .map(|&v| BitSet::from_indices(k, self.adj[v].intersection(keep).iter().map(|u| index[u])))
            .collect();
        SimpleGraph { adj }
    }
}
