//! Regular bipartite graphs and the one-sided set operators built on them:
//! neighbourhoods, closures, 2-linked components and the expansion test.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::connected;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::X => "X",
            Side::Y => "Y",
        })
    }
}

/// A subset of one side of the bipartition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SideSet {
    pub side: Side,
    pub members: BitSet,
}

impl SideSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(v)
    }

    pub fn iter(&self) -> crate::bitset::Iter<'_> {
        self.members.iter()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.to_vec()
    }
}

impl fmt::Debug for SideSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.side, self.members)
    }
}

/// Constants of the expansion definitions.
///
/// A 2-linked set `A` with `W = N(A)` is expanding when
/// `|W| - |[A]| >= (c1 / 2) * (log2(d)^2 / d) * |W|`; `alpha` is the promised
/// vertex expansion `|N(A)| >= (1 + alpha)|A|` for one-sided sets of size at most `n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub c1: f64,
    pub alpha: f64,
}

impl ExpansionParams {
    pub const DEFAULT_C1: f64 = 100.0;
    pub const DEFAULT_ALPHA: f64 = 0.5;

    pub fn new(c1: f64, alpha: f64) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::invalid(format!("C1 must be positive, got {c1}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(ExpansionParams { c1, alpha })
    }

    pub fn with_c1(c1: f64) -> Result<Self> {
        Self::new(c1, Self::DEFAULT_ALPHA)
    }

    /// The fraction `(c1/2) log2(d)^2 / d` of `|N(A)|` that `|N(A)| - |[A]|` must reach.
    pub fn slack(&self, d: usize) -> f64 {
        let l = (d as f64).log2();
        self.c1 / 2.0 * l * l / d as f64
    }

    /// The expansion inequality for given `w = |N(A)|` and `a = |[A]|`.
    pub fn expanding(&self, d: usize, w: usize, a: usize) -> bool {
        if a > w {
            return false;
        }
        let lhs = (w - a) as f64;
        let rhs = self.slack(d) * w as f64;
        lhs >= rhs - 1e-12 * rhs.abs().max(1.0)
    }
}

impl Default for ExpansionParams {
    fn default() -> Self {
        ExpansionParams {
            c1: Self::DEFAULT_C1,
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// A simple d-regular bipartite graph with sides `X = 0..n_x` and `Y = 0..n_y`.
#[derive(Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_x: usize,
    n_y: usize,
    degree: usize,
    adj_x: Vec<Vec<usize>>,
    adj_y: Vec<Vec<usize>>,
    rows_x: Vec<BitSet>,
    rows_y: Vec<BitSet>,
    square_x: Vec<BitSet>,
    square_y: Vec<BitSet>,
}

impl fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BipartiteGraph")
            .field("n_x", &self.n_x)
            .field("n_y", &self.n_y)
            .field("degree", &self.degree)
            .finish()
    }
}

impl BipartiteGraph {
    /// Builds and validates a graph from `(x, y)` edges.
    pub fn from_edges(n_x: usize, n_y: usize, degree: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = Builder::new(n_x, n_y, degree);
        for (i, &(u, v)) in edges.iter().enumerate() {
            b.add(u, v).map_err(|m| Error::invalid(format!("edge #{i}: {m}")))?;
        }
        b.finish().map_err(Error::invalid)
    }

    /// Parses the `p bis` text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder: Option<(Builder, usize)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("p") => {
                    if builder.is_some() {
                        return Err(parse_err("duplicate header".into()));
                    }
                    if tok.next() != Some("bis") {
                        return Err(parse_err("header must be `p bis <nX> <nY> <d>`".into()));
                    }
                    let nums: Vec<usize> = tok
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(format!("bad header number: {e}")))?;
                    if nums.len() != 3 {
                        return Err(parse_err("header must be `p bis <nX> <nY> <d>`".into()));
                    }
                    builder = Some((Builder::new(nums[0], nums[1], nums[2]), line_no));
                }
                Some("e") => {
                    let Some((b, _)) = builder.as_mut() else {
                        return Err(parse_err("edge before header".into()));
                    };
                    let nums: Vec<usize> = tok
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(format!("bad edge endpoint: {e}")))?;
                    if nums.len() != 2 {
                        return Err(parse_err("edge must be `e <x> <y>`".into()));
                    }
                    b.add(nums[0], nums[1]).map_err(parse_err)?;
                }
                Some(other) => return Err(parse_err(format!("unknown record `{other}`"))),
                None => {}
            }
        }
        let Some((b, header_line)) = builder else {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "missing `p bis` header".into(),
            });
        };
        b.finish().map_err(|message| Error::Parse { line: header_line, message })
    }

    /// Renders the graph in the `p bis` text format, edges sorted.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p bis {} {} {}", self.n_x, self.n_y, self.degree).unwrap();
        for (x, ys) in self.adj_x.iter().enumerate() {
            for &y in ys {
                writeln!(s, "e {x} {y}").unwrap();
            }
        }
        s
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Side size when both sides are equal (always the case for d ≥ 1).
    pub fn n(&self) -> usize {
        self.n_x
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::X => self.n_x,
            Side::Y => self.n_y,
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj_x
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
            .collect()
    }

    /// Sorted neighbour list of vertex `v` on `side`.
    pub fn neighbors(&self, side: Side, v: usize) -> &[usize] {
        match side {
            Side::X => &self.adj_x[v],
            Side::Y => &self.adj_y[v],
        }
    }

    /// Neighbourhood row of `v` as a bit set over the opposite side.
    pub fn row(&self, side: Side, v: usize) -> &BitSet {
        match side {
            Side::X => &self.rows_x[v],
            Side::Y => &self.rows_y[v],
        }
    }

    /// Adjacency of the square graph restricted to `side`: `u ~ v` iff they share a neighbour.
    pub fn square(&self, side: Side) -> &[BitSet] {
        match side {
            Side::X => &self.square_x,
            Side::Y => &self.square_y,
        }
    }

    pub fn empty_set(&self, side: Side) -> SideSet {
        SideSet {
            side,
            members: BitSet::new(self.side_len(side)),
        }
    }

    pub fn full_set(&self, side: Side) -> SideSet {
        SideSet {
            side,
            members: BitSet::full(self.side_len(side)),
        }
    }

    /// Builds a side set, rejecting out-of-range vertices.
    pub fn side_set<I: IntoIterator<Item = usize>>(&self, side: Side, vertices: I) -> Result<SideSet> {
        let n = self.side_len(side);
        let mut members = BitSet::new(n);
        for v in vertices {
            if v >= n {
                return Err(Error::invalid(format!("vertex {v} outside side {side} of size {n}")));
            }
            members.insert(v);
        }
        Ok(SideSet { side, members })
    }

    pub fn wrap(&self, side: Side, members: BitSet) -> SideSet {
        debug_assert_eq!(members.universe(), self.side_len(side));
        SideSet { side, members }
    }

    fn check(&self, a: &SideSet) -> Result<()> {
        let n = self.side_len(a.side);
        if a.members.universe() != n {
            return Err(Error::invalid(format!(
                "set over a universe of {} does not match side {} of size {n}",
                a.members.universe(),
                a.side
            )));
        }
        Ok(())
    }

    /// `N(A)` as raw bits over the opposite side.
    pub fn nbhd_bits(&self, side: Side, a: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.side_len(side.opposite()));
        for v in a.iter() {
            out.union_with(self.row(side, v));
        }
        out
    }

    /// `[A]`: every vertex of `side` whose neighbourhood lies inside `N(A)`.
    pub fn closure_bits(&self, side: Side, a: &BitSet) -> BitSet {
        let w = self.nbhd_bits(side, a);
        self.closed_from_boundary(side, &w)
    }

    /// `{u on side : N(u) ⊆ w}` for a set `w` on the opposite side.
    pub fn closed_from_boundary(&self, side: Side, w: &BitSet) -> BitSet {
        let n = self.side_len(side);
        let mut out = BitSet::new(n);
        for u in 0..n {
            if self.row(side, u).is_subset(w) {
                out.insert(u);
            }
        }
        out
    }

    pub fn is_two_linked_bits(&self, side: Side, a: &BitSet) -> bool {
        connected::is_connected(self.square(side), a)
    }

    /// `N²(v)`-style union: vertices of `side` within distance two of the set (the set included).
    pub fn square_closed_nbhd(&self, side: Side, a: &BitSet) -> BitSet {
        let mut out = a.clone();
        for v in a.iter() {
            out.union_with(&self.square(side)[v]);
        }
        out
    }

    pub fn neighborhood(&self, a: &SideSet) -> Result<SideSet> {
        self.check(a)?;
        Ok(self.wrap(a.side.opposite(), self.nbhd_bits(a.side, &a.members)))
    }

    pub fn closure(&self, a: &SideSet) -> Result<SideSet> {
        self.check(a)?;
        Ok(self.wrap(a.side, self.closure_bits(a.side, &a.members)))
    }

    pub fn is_two_linked(&self, a: &SideSet) -> Result<bool> {
        self.check(a)?;
        Ok(self.is_two_linked_bits(a.side, &a.members))
    }

    /// Maximal 2-linked pieces of `A`, ordered by minimum vertex.
    pub fn two_linked_components(&self, a: &SideSet) -> Result<Vec<SideSet>> {
        self.check(a)?;
        Ok(connected::components(self.square(a.side), &a.members)
            .into_iter()
            .map(|c| self.wrap(a.side, c))
            .collect())
    }

    pub fn is_expanding(&self, a: &SideSet, p: &ExpansionParams) -> Result<bool> {
        self.check(a)?;
        if a.is_empty() {
            return Err(Error::invalid("expansion is undefined for the empty set"));
        }
        Ok(self.is_expanding_bits(a.side, &a.members, p))
    }

    pub(crate) fn is_expanding_bits(&self, side: Side, a: &BitSet, p: &ExpansionParams) -> bool {
        let w = self.nbhd_bits(side, a);
        let closed = self.closed_from_boundary(side, &w);
        p.expanding(self.degree, w.len(), closed.len())
    }

    /// Tests the vertex-expansion promise `|N(A)| >= (1 + alpha)|A|` for one-sided sets of
    /// size at most `n/2`.
    pub fn check_alpha_expander(&self, alpha: f64, mode: ExpanderCheck) -> Result<ExpanderVerdict> {
        if !(alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be nonnegative, got {alpha}")));
        }
        let fails = |a: usize, w: usize| (w as f64) < (1.0 + alpha) * a as f64 - 1e-12;
        match mode {
            ExpanderCheck::Exhaustive { cap } => {
                let n = self.n_x.max(self.n_y);
                if n > cap || n > 63 {
                    return Err(Error::capacity(format!(
                        "exhaustive expansion check limited to sides of {cap} vertices, got {n}"
                    )));
                }
                for side in [Side::X, Side::Y] {
                    let ns = self.side_len(side);
                    let rows: Vec<u64> = (0..ns).map(|v| self.row(side, v).words().first().copied().unwrap_or(0)).collect();
                    for k in 1..=ns / 2 {
                        let mut mask: u64 = (1u64 << k) - 1;
                        while mask < (1u64 << ns) {
                            let mut nb = 0u64;
                            let mut m = mask;
                            while m != 0 {
                                nb |= rows[m.trailing_zeros() as usize];
                                m &= m - 1;
                            }
                            if fails(k, nb.count_ones() as usize) {
                                return Ok(ExpanderVerdict::Falsified {
                                    witness: self.wrap(side, BitSet::from_mask(ns, mask)),
                                });
                            }
                            // next combination with the same popcount
                            let c = mask & mask.wrapping_neg();
                            let r = mask + c;
                            mask = (((r ^ mask) >> 2) / c) | r;
                        }
                    }
                }
                Ok(ExpanderVerdict::Verified)
            }
            ExpanderCheck::Heuristic { samples, linked_size_cap, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for side in [Side::X, Side::Y] {
                    let ns = self.side_len(side);
                    let half = ns / 2;
                    if half == 0 {
                        continue;
                    }
                    let mut witness = None;
                    connected::for_each_connected(
                        self.square(side),
                        &BitSet::full(ns),
                        linked_size_cap.min(half),
                        &|_| 1,
                        &mut |s, k| {
                            if fails(k, self.nbhd_bits(side, s).len()) {
                                witness = Some(s.clone());
                                return Err(Error::capacity("witness found"));
                            }
                            Ok(())
                        },
                    )
                    .ok();
                    if let Some(w) = witness {
                        return Ok(ExpanderVerdict::Falsified { witness: self.wrap(side, w) });
                    }
                    let mut order: Vec<usize> = (0..ns).collect();
                    for _ in 0..samples {
                        let k = rng.gen_range(1..=half);
                        order.shuffle(&mut rng);
                        let s = BitSet::from_indices(ns, order[..k].iter().copied());
                        if fails(k, self.nbhd_bits(side, &s).len()) {
                            return Ok(ExpanderVerdict::Falsified { witness: self.wrap(side, s) });
                        }
                    }
                }
                Ok(ExpanderVerdict::Unknown)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpanderCheck {
    /// Every one-sided set of size at most `n/2`; sides larger than `cap` are refused.
    Exhaustive { cap: usize },
    /// Random sets plus every 2-linked set up to `linked_size_cap` vertices.
    Heuristic { samples: usize, linked_size_cap: usize, seed: u64 },
}

impl ExpanderCheck {
    pub const DEFAULT_CAP: usize = 20;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpanderVerdict {
    Verified,
    Falsified { witness: SideSet },
    Unknown,
}

struct Builder {
    n_x: usize,
    n_y: usize,
    degree: usize,
    adj_x: Vec<Vec<usize>>,
    adj_y: Vec<Vec<usize>>,
}

impl Builder {
    fn new(n_x: usize, n_y: usize, degree: usize) -> Self {
        Builder {
            n_x,
            n_y,
            degree,
            adj_x: vec![Vec::new(); n_x],
            adj_y: vec![Vec::new(); n_y],
        }
    }

    fn add(&mut self, x: usize, y: usize) -> std::result::Result<(), String> {
        if x >= self.n_x {
            return Err(format!("X-vertex {x} out of range 0..{}", self.n_x));
        }
        if y >= self.n_y {
            return Err(format!("Y-vertex {y} out of range 0..{}", self.n_y));
        }
        if self.adj_x[x].contains(&y) {
            return Err(format!("parallel edge {x}-{y}"));
        }
        if self.adj_x[x].len() == self.degree {
            return Err(format!("X-vertex {x} exceeds degree {}", self.degree));
        }
        if self.adj_y[y].len() == self.degree {
            return Err(format!("Y-vertex {y} exceeds degree {}", self.degree));
        }
        self.adj_x[x].push(y);
        self.adj_y[y].push(x);
        Ok(())
    }

    fn finish(mut self) -> std::result::Result<BipartiteGraph, String> {
        if self.degree == 0 {
            return Err("degree must be at least 1".into());
        }
        if self.n_x != self.n_y {
            return Err(format!("a regular bipartite graph needs equal sides, got {} and {}", self.n_x, self.n_y));
        }
        for (x, ys) in self.adj_x.iter().enumerate() {
            if ys.len() != self.degree {
                return Err(format!("not regular: X-vertex {x} has degree {} instead of {}", ys.len(), self.degree));
            }
        }
        for (y, xs) in self.adj_y.iter().enumerate() {
            if xs.len() != self.degree {
                return Err(format!("not regular: Y-vertex {y} has degree {} instead of {}", xs.len(), self.degree));
            }
        }
        self.adj_x.iter_mut().for_each(|l| l.sort_unstable());
        self.adj_y.iter_mut().for_each(|l| l.sort_unstable());
        let rows_x: Vec<BitSet> = self.adj_x.iter().map(|l| BitSet::from_indices(self.n_y, l.iter().copied())).collect();
        let rows_y: Vec<BitSet> = self.adj_y.iter().map(|l| BitSet::from_indices(self.n_x, l.iter().copied())).collect();
        let square = |rows: &[BitSet], back: &[BitSet]| -> Vec<BitSet> {
            rows.iter()
                .enumerate()
                .map(|(v, row)| {
                    let mut s = BitSet::new(rows.len());
                    for u in row.iter() {
                        s.union_with(&back[u]);
                    }
                    s.remove(v);
                    s
                })
                .collect()
        };
        let square_x = square(&rows_x, &rows_y);
        let square_y = square(&rows_y, &rows_x);
        Ok(BipartiteGraph {
            n_x: self.n_x,
            n_y: self.n_y,
            degree: self.degree,
            adj_x: self.adj_x,
            adj_y: self.adj_y,
            rows_x,
            rows_y,
            square_x,
            square_y,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec};

    fn c8() -> BipartiteGraph {
        generate(&InstanceSpec::EvenCycle { m: 8 }).unwrap()
    }

    fn k22() -> BipartiteGraph {
        generate(&InstanceSpec::CompleteBipartite { d: 2 }).unwrap()
    }

    fn xs(g: &BipartiteGraph, v: &[usize]) -> SideSet {
        g.side_set(Side::X, v.iter().copied()).unwrap()
    }

    #[test]
    fn neighborhood_examples() {
        let k = k22();
        assert_eq!(k.neighborhood(&xs(&k, &[0])).unwrap().to_vec(), vec![0, 1]);
        let c = c8();
        assert_eq!(c.neighborhood(&xs(&c, &[0])).unwrap().to_vec(), vec![0, 3]);
        assert!(c.neighborhood(&xs(&c, &[])).unwrap().is_empty());
    }

    #[test]
    fn neighborhood_rejects_side_mismatch() {
        let c = c8();
        let bogus = SideSet { side: Side::X, members: BitSet::new(5) };
        assert!(matches!(c.neighborhood(&bogus), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn closure_examples() {
        let k = k22();
        assert_eq!(k.closure(&xs(&k, &[0])).unwrap().to_vec(), vec![0, 1]);
        let c = c8();
        assert_eq!(c.closure(&xs(&c, &[0])).unwrap().to_vec(), vec![0]);
        assert!(c.closure(&xs(&c, &[])).unwrap().is_empty());
        assert_eq!(c.closure(&xs(&c, &[0, 1, 2])).unwrap().to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_linked_examples() {
        let c = c8();
        let comps = c.two_linked_components(&xs(&c, &[0, 1])).unwrap();
        assert_eq!(comps.len(), 1);
        let comps = c.two_linked_components(&xs(&c, &[0, 2])).unwrap();
        assert_eq!(comps.iter().map(|s| s.to_vec()).collect::<Vec<_>>(), vec![vec![0], vec![2]]);
        assert_eq!(c.two_linked_components(&xs(&c, &[3])).unwrap().len(), 1);
        assert!(c.two_linked_components(&xs(&c, &[])).unwrap().is_empty());
    }

    #[test]
    fn expanding_examples() {
        let c = c8();
        let p1 = ExpansionParams::with_c1(1.0).unwrap();
        let p4 = ExpansionParams::with_c1(4.0).unwrap();
        assert!(c.is_expanding(&xs(&c, &[0]), &p1).unwrap());
        assert!(!c.is_expanding(&xs(&c, &[0, 1, 2]), &p1).unwrap());
        assert!(!c.is_expanding(&xs(&c, &[0]), &p4).unwrap());
        assert!(matches!(c.is_expanding(&xs(&c, &[]), &p1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn alpha_expander_examples() {
        let k33 = generate(&InstanceSpec::CompleteBipartite { d: 3 }).unwrap();
        let ex = ExpanderCheck::Exhaustive { cap: 20 };
        assert_eq!(k33.check_alpha_expander(1.0, ex).unwrap(), ExpanderVerdict::Verified);
        let c = c8();
        match c.check_alpha_expander(1.0, ex).unwrap() {
            ExpanderVerdict::Falsified { witness } => assert_eq!(witness, xs(&c, &[0, 1])),
            other => panic!("expected witness, got {other:?}"),
        }
        assert_eq!(c.check_alpha_expander(0.0, ex).unwrap(), ExpanderVerdict::Verified);
        let heur = ExpanderCheck::Heuristic { samples: 50, linked_size_cap: 3, seed: 1 };
        assert!(matches!(c.check_alpha_expander(1.0, heur).unwrap(), ExpanderVerdict::Falsified { .. }));
        assert_eq!(k33.check_alpha_expander(1.0, heur).unwrap(), ExpanderVerdict::Unknown);
        assert!(matches!(c.check_alpha_expander(1.0, ExpanderCheck::Exhaustive { cap: 3 }), Err(Error::Capacity(_))));
    }

    #[test]
    fn text_round_trip_and_diagnostics() {
        let c = c8();
        let back = BipartiteGraph::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        let err = BipartiteGraph::parse("c hi\np bis 2 2 2\ne 0 0\ne 0 1\ne 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = BipartiteGraph::parse("p bis 2 2 1\ne 0 0\ne 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = BipartiteGraph::parse("p bis 2 2 1\ne 0 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(BipartiteGraph::parse("e 0 0\n").is_err());
    }
}
