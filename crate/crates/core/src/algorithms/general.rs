//! Counting on arbitrary regular bipartite graphs by grouping non-expanding components.
//!
//! Each independent set is split by the 2-linked components of its `X` part. A
//! non-expanding component `B` is grouped under its closure `A = [B]`, which has the same
//! neighbourhood; the closures of a set form a family with disjoint neighbourhoods.
//! Summing over families,
//! `i(G) = Σ_A Π D(A_i) · 2^{|Y| - Σ|N(A_i)|} · Ξ^{X_A}`,
//! where `D(A)` counts the 2-linked `B ⊆ A` with `N(B) = N(A)` and `Ξ^{X_A}` is the
//! expanding-polymer partition function on `X_A = X ∖ N²(∪A_i)`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expander::check_shape;
use super::{in_polymer_side, ApproxCount, Method};
use crate::bitset::BitSet;
use crate::containers::{enumerate_nonexpanding_closed, small_generator};
use crate::error::{Error, Result};
use crate::expansion::{certified_bound, cluster_sum, ln_rational};
use crate::graph::{BipartiteGraph, ExpansionParams, Side, SideSet};
use crate::polymer::{ClusterOptions, PolymerFamily, PolymerUniverse, WeightModel};

/// Largest number of subsets drawn by one D estimate.
pub const MAX_D_SAMPLES: u64 = 1 << 34;
/// Largest set handled by the exhaustive D count and the exact restricted `Ξ`.
pub const EXHAUSTIVE_CAP: usize = 26;
/// Largest number of families enumerated.
pub const MAX_FAMILIES: usize = 2_000_000;

const CHUNK: u64 = 1 << 14;

/// A Monte-Carlo estimate of `D(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEstimate {
    pub value: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub samples_used: u64,
    pub hits: u64,
    /// `2^{-|A''|}`: every superset of the small generator `A''` is a hit.
    pub p_lower: f64,
}

fn check_closed_two_linked(g: &BipartiteGraph, a: &SideSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::invalid("the set is empty"));
    }
    if !g.is_two_linked(a)? {
        return Err(Error::invalid(format!("{a:?} is not 2-linked")));
    }
    if g.closure_bits(a.side, &a.members) != a.members {
        return Err(Error::invalid(format!("{a:?} is not closed")));
    }
    Ok(())
}

fn hits_d(g: &BipartiteGraph, side: Side, b: &BitSet, target: &BitSet) -> bool {
    !b.is_empty() && g.nbhd_bits(side, b) == *target && g.is_two_linked_bits(side, b)
}

/// Sample count `⌈3 ε⁻² ln(2/δ) 2^{|A''|}⌉`, with `ε` capped at 1.
pub fn d_sample_count(epsilon: f64, delta: f64, generator_len: usize) -> f64 {
    let e = epsilon.min(1.0);
    (3.0 / (e * e) * (2.0 / delta).ln() * (generator_len as f64).exp2()).ceil()
}

/// Estimates `D(A)` for a closed 2-linked `A` from uniform subsets of `A`.
pub fn estimate_d(g: &BipartiteGraph, a: &SideSet, epsilon: f64, delta: f64, seed: u64) -> Result<DEstimate> {
    check_closed_two_linked(g, a)?;
    if !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "need epsilon > 0 and delta in (0, 1), got {epsilon}, {delta}"
        )));
    }
    let (_, a2) = small_generator(g, a)?;
    let samples = d_sample_count(epsilon, delta, a2.len());
    if samples > MAX_D_SAMPLES as f64 {
        return Err(Error::capacity(format!("a D estimate would need {samples:e} samples")));
    }
    let samples = samples as u64;
    let side = a.side;
    let members = a.members.to_vec();
    let target = g.nbhd_bits(side, &a.members);
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut b = BitSet::new(a.members.universe());
            let mut hits = 0;
            for _ in 0..len {
                b.clear();
                let mut bits = 0u64;
                for (k, &v) in members.iter().enumerate() {
                    if k % 64 == 0 {
                        bits = rng.gen();
                    }
                    if bits >> (k % 64) & 1 == 1 {
                        b.insert(v);
                    }
                }
                hits += u64::from(hits_d(g, side, &b, &target));
            }
            hits
        })
        .sum();
    Ok(DEstimate {
        value: hits as f64 / samples as f64 * (members.len() as f64).exp2(),
        epsilon,
        delta,
        samples_used: samples,
        hits,
        p_lower: (-(a2.len() as f64)).exp2(),
    })
}

/// `D(A)` by checking every subset.
pub fn exhaustive_d(g: &BipartiteGraph, a: &SideSet) -> Result<u64> {
    check_closed_two_linked(g, a)?;
    let members = a.members.to_vec();
    if members.len() > EXHAUSTIVE_CAP {
        return Err(Error::capacity(format!(
            "exhaustive D is limited to {EXHAUSTIVE_CAP} vertices, got {}",
            members.len()
        )));
    }
    let target = g.nbhd_bits(a.side, &a.members);
    let count = (1u64..1 << members.len())
        .into_par_iter()
        .filter(|&mask| {
            let b = BitSet::from_indices(
                a.members.universe(),
                members.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &v)| v),
            );
            hits_d(g, a.side, &b, &target)
        })
        .count();
    Ok(count as u64)
}

/// Closed, 2-linked, non-expanding sets with pairwise disjoint neighbourhoods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonExpandingFamily {
    /// Members in canonical order (ascending index into the closed-set list).
    pub sets: Vec<Vec<usize>>,
    /// Minimum vertex of each member.
    pub anchors: Vec<usize>,
    pub sizes: Vec<usize>,
}

/// Every closed, 2-linked, non-expanding set on `side`, each listed once under its
/// minimum vertex, ordered by `(size, vertices)`.
pub fn closed_nonexpanding_sets(g: &BipartiteGraph, side: Side, p: &ExpansionParams) -> Result<Vec<SideSet>> {
    let n = g.side_len(side);
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|v| (1..=n).map(move |a| (v, a))).collect();
    let found: Vec<Vec<SideSet>> = jobs
        .par_iter()
        .map(|&(v, a)| {
            Ok(enumerate_nonexpanding_closed(g, side, v, a, p)?
                .into_iter()
                .filter(|s| s.members.first() == Some(v))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<SideSet> = found.into_iter().flatten().collect();
    all.sort_by_cached_key(|s| (s.len(), s.to_vec()));
    all.dedup();
    Ok(all)
}

/// Streams every family (including the empty one) built from `sets`.
pub fn for_each_family<F>(g: &BipartiteGraph, sets: &[SideSet], visit: &mut F) -> Result<usize>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    let Some(first) = sets.first() else {
        visit(&[])?;
        return Ok(1);
    };
    let side = first.side;
    let boundaries: Vec<BitSet> = sets.iter().map(|s| g.nbhd_bits(side, &s.members)).collect();
    let max_len = g.side_len(side) / g.degree().max(1);
    let mut count = 0;
    let mut stack = Vec::new();
    let used = BitSet::new(g.side_len(side.opposite()));
    family_dfs(&boundaries, 0, &used, max_len, &mut stack, &mut count, visit)?;
    Ok(count)
}

fn family_dfs<F>(
    boundaries: &[BitSet],
    from: usize,
    used: &BitSet,
    max_len: usize,
    stack: &mut Vec<usize>,
    count: &mut usize,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    *count += 1;
    if *count > MAX_FAMILIES {
        return Err(Error::capacity(format!("more than {MAX_FAMILIES} families")));
    }
    visit(stack)?;
    if stack.len() == max_len {
        return Ok(());
    }
    for i in from..boundaries.len() {
        if boundaries[i].intersects(used) {
            continue;
        }
        stack.push(i);
        family_dfs(boundaries, i + 1, &used.union(&boundaries[i]), max_len, stack, count, visit)?;
        stack.pop();
    }
    Ok(())
}

/// All families on `side`, materialised.
pub fn enumerate_families(g: &BipartiteGraph, side: Side, p: &ExpansionParams) -> Result<Vec<NonExpandingFamily>> {
    let sets = closed_nonexpanding_sets(g, side, p)?;
    let mut out = Vec::new();
    for_each_family(g, &sets, &mut |f| {
        out.push(NonExpandingFamily {
            sets: f.iter().map(|&i| sets[i].to_vec()).collect(),
            anchors: f.iter().map(|&i| sets[i].members.first().expect("nonempty")).collect(),
            sizes: f.iter().map(|&i| sets[i].len()).collect(),
        });
        Ok(())
    })?;
    Ok(out)
}

/// `Σ_{S ⊆ within} 2^{-|N(S)|}` over sets whose components are all in `fam`: the exact
/// partition function of the family restricted to `within`.
pub fn exact_xi_within(g: &BipartiteGraph, fam: &PolymerFamily, within: &BitSet) -> Result<BigRational> {
    let members = within.to_vec();
    if members.len() > EXHAUSTIVE_CAP {
        return Err(Error::capacity(format!(
            "exact restricted partition function is limited to {EXHAUSTIVE_CAP} vertices"
        )));
    }
    let side = fam.side;
    let by_boundary: Vec<u64> = (0u64..1 << members.len())
        .into_par_iter()
        .filter_map(|mask| {
            let s = BitSet::from_indices(
                within.universe(),
                members.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &v)| v),
            );
            in_polymer_side(g, fam, &s).then(|| g.nbhd_bits(side, &s).len() as u64)
        })
        .collect();
    let ny = g.side_len(side.opposite());
    let mut hist = vec![BigUint::zero(); ny + 1];
    for b in by_boundary {
        hist[b as usize] += 1u32;
    }
    let scale = BigUint::one() << ny;
    let num = hist
        .iter()
        .enumerate()
        .fold(BigUint::zero(), |acc, (b, c)| acc + c * (BigUint::one() << (ny - b)));
    Ok(BigRational::new(BigInt::from(num), BigInt::from(scale)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneralMode {
    /// Monte-Carlo D estimates and truncated cluster expansions.
    #[default]
    MonteCarlo,
    /// Exhaustive D and exact restricted partition functions.
    Exact,
}

#[derive(Debug, Clone, Default)]
pub struct GeneralOptions {
    pub mode: GeneralMode,
    pub cluster: ClusterOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralReport {
    pub count: ApproxCount,
    pub families: usize,
    pub distinct_sets: usize,
    pub largest_family: usize,
    /// The truncation size `L`.
    pub truncation: usize,
    /// True when `d > √n` and the expanding factor was replaced by 1.
    pub skipped_expanding: bool,
    pub d_samples: u64,
    /// Accuracy and failure probability given to each D estimate.
    pub d_epsilon: f64,
    pub d_delta: f64,
    /// Polymers of restricted universes checked to avoid the family's neighbourhood.
    pub restricted_polymers_checked: usize,
}

/// `L = ⌈d / (2 log²d) · log(2n/ε)⌉`, at least 1.
pub fn general_truncation(n: usize, d: usize, epsilon: f64) -> usize {
    let l = (d as f64).log2();
    let x = d as f64 / (2.0 * l * l) * (2.0 * n as f64 / epsilon).log2();
    (x - 1e-9).ceil().max(1.0) as usize
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Approximates `i(G)` for any regular bipartite graph with equal sides.
pub fn count_general(
    g: &BipartiteGraph,
    epsilon: f64,
    delta: f64,
    seed: u64,
    p: &ExpansionParams,
    opts: &GeneralOptions,
) -> Result<GeneralReport> {
    check_shape(g)?;
    if !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "need epsilon > 0 and delta in (0, 1), got {epsilon}, {delta}"
        )));
    }
    let (n, d) = (g.n_x(), g.degree());
    if d < 2 {
        return Err(Error::invalid("the general algorithm needs degree at least 2"));
    }
    let side = Side::X;
    let fam = PolymerFamily::expanding(side, *p);
    let exact = opts.mode == GeneralMode::Exact;
    let skip = !exact && (d * d > n);
    let truncation = general_truncation(n, d, epsilon);

    let sets = closed_nonexpanding_sets(g, side, p)?;
    let mut families = Vec::new();
    let family_count = for_each_family(g, &sets, &mut |f| {
        families.push(f.to_vec());
        Ok(())
    })?;
    let largest_family = families.iter().map(Vec::len).max().unwrap_or(0);

    // D for every set that occurs, estimated once each
    let d_epsilon = epsilon / (2.0 * largest_family.max(1) as f64);
    let d_delta = delta / sets.len().max(1) as f64;
    let d_values: Vec<(f64, Option<u64>, u64)> = sets
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            if exact {
                let v = exhaustive_d(g, s)?;
                Ok((v as f64, Some(v), 0))
            } else {
                let e = estimate_d(g, s, d_epsilon, d_delta, splitmix(seed ^ splitmix(i as u64)))?;
                Ok((e.value, None, e.samples_used))
            }
        })
        .collect::<Result<_>>()?;
    let d_samples = d_values.iter().map(|v| v.2).sum();

    // restricted partition functions, one per distinct X_A
    let universe = if exact || skip {
        None
    } else {
        Some(PolymerUniverse::build(g, &fam, truncation)?)
    };
    let mut xa_of = Vec::with_capacity(families.len());
    let mut distinct: HashMap<BitSet, usize> = HashMap::new();
    let mut keys = Vec::new();
    for f in &families {
        let mut union = BitSet::new(n);
        for &i in f {
            union.union_with(&sets[i].members);
        }
        let n_a = g.nbhd_bits(side, &union);
        let xa = BitSet::full(n).difference(&g.nbhd_bits(side.opposite(), &n_a));
        let next = distinct.len();
        let k = *distinct.entry(xa.clone()).or_insert_with(|| {
            keys.push((xa, n_a));
            next
        });
        xa_of.push(k);
    }
    type Xi = (f64, Option<BigRational>, usize);
    let xis: Vec<Xi> = keys
        .par_iter()
        .map(|(xa, n_a)| -> Result<Xi> {
            if skip {
                return Ok((0.0, None, 0));
            }
            if exact {
                let v = exact_xi_within(g, &fam, xa)?;
                return Ok((ln_rational(&v), Some(v), 0));
            }
            let u = universe.as_ref().expect("universe built in Monte-Carlo mode");
            let (sub, _) = u.restrict(xa);
            for q in sub.polymers() {
                if q.boundary.members.intersects(n_a) {
                    return Err(Error::invalid("a restricted polymer meets the family's neighbourhood"));
                }
            }
            let (v, _, _) = cluster_sum(&sub, &WeightModel::Unweighted, truncation, opts.cluster, false)?;
            Ok((v, None, sub.len()))
        })
        .collect::<Result<_>>()?;
    let restricted_polymers_checked = xis.iter().map(|x| x.2).sum();

    let ln2 = std::f64::consts::LN_2;
    let mut log_terms = Vec::with_capacity(families.len());
    let mut exact_total = exact.then(BigRational::zero);
    for (f, &k) in families.iter().zip(&xa_of) {
        let boundary: usize = f.iter().map(|&i| g.nbhd_bits(side, &sets[i].members).len()).sum();
        let ln_d: f64 = f.iter().map(|&i| d_values[i].0.ln()).sum();
        log_terms.push(ln_d + (n - boundary) as f64 * ln2 + xis[k].0);
        if let Some(total) = exact_total.as_mut() {
            let prod = f.iter().fold(BigUint::one(), |acc, &i| acc * d_values[i].1.expect("exact D"));
            let pow = BigUint::one() << (n - boundary);
            *total += BigRational::from_integer(BigInt::from(prod * pow)) * xis[k].1.clone().expect("exact Xi");
        }
    }
    let m = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_value = m + log_terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();

    let mut notes = vec![format!(
        "failure probability split over {} distinct D estimates instead of the worst-case count",
        sets.len()
    )];
    let count = if let Some(total) = exact_total {
        let mut c = ApproxCount::exact(total, Method::General);
        c.notes = vec!["exact mode: exhaustive D and exact restricted partition functions".to_string()];
        c
    } else {
        let t = if skip { 0.0 } else { certified_bound(n, d, truncation, false) };
        let k = largest_family as f64;
        let upper = (k * d_epsilon.ln_1p() + t).exp_m1();
        let lower = 1.0 - (1.0 - d_epsilon).max(0.0).powf(k) * (-t).exp();
        if skip {
            notes.push("d > sqrt(n): the expanding factor is replaced by 1".to_string());
        }
        ApproxCount {
            log_value,
            rel_error_bound: upper.max(lower),
            method: Method::General,
            side_breakdown: None,
            certified: !skip,
            kp_status: None,
            exact: None,
            notes,
        }
    };
    Ok(GeneralReport {
        count,
        families: family_count,
        distinct_sets: sets.len(),
        largest_family,
        truncation,
        skipped_expanding: skip,
        d_samples,
        d_epsilon,
        d_delta,
        restricted_polymers_checked,
    })
}
