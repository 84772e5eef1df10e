//! Enumeration of connected vertex subsets.
//!
//! Every connected set is produced exactly once, rooted at its minimum
//! element, by the exclusive-neighbourhood extension scheme (ESU). Elements
//! carry positive integer weights and the enumeration is pruned at a total
//! weight cap.

use crate::bitset::BitSet;
use crate::error::Result;

/// Visits every connected subset `S` of the graph `adj` restricted to
/// `allowed` such that `min(S) == root` and the total weight is at most
/// `max_weight`. The visitor receives the set and its weight.
pub fn for_each_rooted<W, F>(
    adj: &[BitSet],
    allowed: &BitSet,
    root: usize,
    max_weight: usize,
    weight: &W,
    visit: &mut F,
) -> Result<()>
where
    W: Fn(usize) -> usize,
    F: FnMut(&BitSet, usize) -> Result<()>,
{
    if !allowed.contains(root) || weight(root) > max_weight {
        return Ok(());
    }
    let universe = adj.len();
    let mut above = allowed.clone();
    for i in 0..=root {
        above.remove(i);
    }
    let mut sub = BitSet::new(universe);
    sub.insert(root);
    let mut closed = adj[root].clone();
    closed.insert(root);
    let ext = adj[root].intersection(&above);
    extend(adj, &above, &mut sub, &closed, ext, weight(root), max_weight, weight, visit)
}

/// Visits every connected subset `S` of `allowed` with `root ∈ S` and total
/// weight at most `max_weight`, each exactly once.
pub fn for_each_containing<W, F>(
    adj: &[BitSet],
    allowed: &BitSet,
    root: usize,
    max_weight: usize,
    weight: &W,
    visit: &mut F,
) -> Result<()>
where
    W: Fn(usize) -> usize,
    F: FnMut(&BitSet, usize) -> Result<()>,
{
    if !allowed.contains(root) || weight(root) > max_weight {
        return Ok(());
    }
    let mut others = allowed.clone();
    others.remove(root);
    let mut sub = BitSet::new(adj.len());
    sub.insert(root);
    let mut closed = adj[root].clone();
    closed.insert(root);
    let ext = adj[root].intersection(&others);
    extend(adj, &others, &mut sub, &closed, ext, weight(root), max_weight, weight, visit)
}

/// Visits every connected subset of `allowed` with total weight at most
/// `max_weight`, grouped by ascending minimum element.
pub fn for_each_connected<W, F>(
    adj: &[BitSet],
    allowed: &BitSet,
    max_weight: usize,
    weight: &W,
    visit: &mut F,
) -> Result<()>
where
    W: Fn(usize) -> usize,
    F: FnMut(&BitSet, usize) -> Result<()>,
{
    for root in allowed.iter() {
        for_each_rooted(adj, allowed, root, max_weight, weight, visit)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend<W, F>(
    adj: &[BitSet],
    above: &BitSet,
    sub: &mut BitSet,
    closed: &BitSet,
    mut ext: BitSet,
    total: usize,
    max_weight: usize,
    weight: &W,
    visit: &mut F,
) -> Result<()>
where
    W: Fn(usize) -> usize,
    F: FnMut(&BitSet, usize) -> Result<()>,
{
    visit(sub, total)?;
    while let Some(w) = ext.first() {
        ext.remove(w);
        let wt = weight(w);
        if total + wt > max_weight {
            continue;
        }
        let mut fresh = adj[w].difference(closed);
        fresh.intersect_with(above);
        let next_ext = ext.union(&fresh);
        let mut next_closed = closed.union(&adj[w]);
        next_closed.insert(w);
        sub.insert(w);
        extend(adj, above, sub, &next_closed, next_ext, total + wt, max_weight, weight, visit)?;
        sub.remove(w);
    }
    Ok(())
}

/// True when `set` induces a connected subgraph of `adj` (the empty set is not connected).
pub fn is_connected(adj: &[BitSet], set: &BitSet) -> bool {
    let Some(start) = set.first() else {
        return false;
    };
    let mut seen = BitSet::new(set.universe());
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for v in adj[u].intersection(set).difference(&seen).iter() {
            seen.insert(v);
            stack.push(v);
        }
    }
    seen.len() == set.len()
}

/// Connected components of the subgraph induced by `set`, ordered by minimum element.
pub fn components(adj: &[BitSet], set: &BitSet) -> Vec<BitSet> {
    let mut remaining = set.clone();
    let mut out = Vec::new();
    while let Some(start) = remaining.first() {
        let mut comp = BitSet::new(set.universe());
        comp.insert(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in adj[u].intersection(&remaining).difference(&comp).iter() {
                comp.insert(v);
                stack.push(v);
            }
        }
        remaining.difference_with(&comp);
        out.push(comp);
    }
    out
}
