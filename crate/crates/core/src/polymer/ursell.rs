//! The Ursell function `φ(H) = Σ_{E' ⊆ E(H), (V, E') connected} (-1)^{|E'|}`.

use crate::error::{Error, Result};

pub const DEFAULT_URSELL_CAP: usize = 10;

/// Hard ceiling from the `u32` masks and `i64` arithmetic (|φ| ≤ (k-1)!).
pub const MAX_URSELL_VERTICES: usize = 20;

/// A small undirected graph on at most [`MAX_URSELL_VERTICES`] vertices, one neighbour mask per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    adj: Vec<u32>,
}

impl SmallGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_URSELL_VERTICES, "small graphs hold at most {MAX_URSELL_VERTICES} vertices");
        SmallGraph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SmallGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loops are not allowed");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            let mut m = self.adj[u] >> (u + 1);
            while m != 0 {
                let v = u + 1 + m.trailing_zeros() as usize;
                m &= m - 1;
                out.push((u, v));
            }
        }
        out
    }
}

/// `φ(H)` with the vertex cap enforced.
pub fn ursell(h: &SmallGraph, cap: usize) -> Result<i64> {
    if h.n() > cap {
        return Err(Error::capacity(format!(
            "Ursell function limited to {cap} vertices, got {}",
            h.n()
        )));
    }
    Ok(ursell_unchecked(h))
}

/// Computes `φ(H)` by the connected-part recursion over vertex subsets.
///
/// Writing `A(S) = Σ_{E' ⊆ E(S)} (-1)^{|E'|}`, which is 1 when `S` spans no edge and 0
/// otherwise, and splitting `E'` by the component of vertex 0 gives
/// `A(S) = Σ_{0 ∈ T ⊆ S} φ(H[T]) A(S \ T)`. Solving for `φ(H[S])` over all subsets that
/// contain vertex 0 costs `O(3^{n-1})`.
pub(crate) fn ursell_unchecked(h: &SmallGraph) -> i64 {
    let n = h.n();
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return 1;
    }
    let adj = h.adjacency();
    let size = 1usize << n;
    let mut independent = vec![false; size];
    independent[0] = true;
    for s in 1..size {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        independent[s] = independent[rest] && (adj[v] as usize & rest) == 0;
    }
    // phi over subsets containing vertex 0, indexed by the remaining bits shifted down
    let half = 1usize << (n - 1);
    let mut phi = vec![0i64; half];
    for t in 0..half {
        let set = (t << 1) | 1;
        let mut value = i64::from(independent[set]);
        // proper subsets u ∋ 0 of set: iterate submasks of t excluding t itself
        let mut sub = (t.wrapping_sub(1)) & t;
        loop {
            if sub == t {
                break;
            }
            let u = (sub << 1) | 1;
            let rest = set & !u;
            if independent[rest] {
                value -= phi[sub];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & t;
        }
        phi[t] = value;
    }
    phi[half - 1]
}

/// `φ` of the graph obtained from `support` (on `s` vertices) by replacing vertex `i` with a
/// clique of `mult[i]` copies, copies of adjacent vertices being joined.
///
/// Grouping the subset recursion by how many copies of each vertex a subset holds, and
/// noting that an edgeless subset takes at most one copy per vertex from an independent
/// set of `support`, gives
/// `φ(c) = A(c) - Σ_r k(r, c) φ(c - r)` over nonempty independent 0/1 vectors `r ≤ c`
/// with `r_0 < c_0`, where `k(r, c) = (c_0 - 1)^{r_0} Π_{i ≥ 1, r_i = 1} c_i` counts the
/// ways to pick those copies.
pub(crate) fn ursell_blowup(support: &SmallGraph, mult: &[usize]) -> i64 {
    let s = support.n();
    assert_eq!(mult.len(), s);
    if s == 0 || mult.iter().any(|&m| m == 0) {
        return 0;
    }
    let adj = support.adjacency();
    let independent: Vec<u32> = (1u32..1 << s)
        .filter(|&r| (0..s).all(|i| r >> i & 1 == 0 || adj[i] & r == 0))
        .collect();
    let mut radix = vec![1usize; s + 1];
    for i in 0..s {
        radix[i + 1] = radix[i] * (mult[i] + 1);
    }
    let states = radix[s];
    let mut phi = vec![0i128; states];
    let mut c = vec![0usize; s];
    for idx in 0..states {
        let mut rest = idx;
        for i in 0..s {
            c[i] = rest % (mult[i] + 1);
            rest /= mult[i] + 1;
        }
        if c[0] == 0 {
            continue;
        }
        let ones = (0..s).filter(|&i| c[i] > 0).fold(0u32, |m, i| m | 1 << i);
        let a = i128::from(c.iter().all(|&x| x <= 1) && independent.contains(&ones));
        let mut value = a;
        for &r in &independent {
            if r & !ones != 0 || (r & 1 == 1 && c[0] < 2) {
                continue;
            }
            let mut k: i128 = 1;
            let mut sub = idx;
            for i in 0..s {
                if r >> i & 1 == 1 {
                    k *= if i == 0 { c[0] as i128 - 1 } else { c[i] as i128 };
                    sub -= radix[i];
                }
            }
            value -= k * phi[sub];
        }
        phi[idx] = value;
    }
    i64::try_from(phi[states - 1]).expect("Ursell value fits in 64 bits below the vertex cap")
}
