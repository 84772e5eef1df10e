//! Truncated cluster expansion of `ln Ξ`, its error certificate, the Kotecký–Preiss
//! check, and exact partition functions of small polymer universes.

use std::collections::HashMap;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::polymer::{
    for_each_cluster_rooted, ClusterOptions, ClusterStats, PolymerFamily, PolymerUniverse, UrsellCache, WeightModel,
};

/// Default limit on the universe size for exact partition functions.
pub const EXACT_UNIVERSE_CAP: usize = 24;

/// How the Kotecký–Preiss condition stands for an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpStatus {
    /// Checked numerically on every polymer up to the size cap, and it held.
    VerifiedToCap,
    /// Not checked; the asymptotic lemma is taken on trust.
    Assumed,
    /// Checked numerically up to the size cap, and some polymer violated it.
    FailedAtCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPartitionEstimate {
    /// `ln Ξ(ℓ)`, the truncated cluster sum.
    pub log_value: f64,
    pub ell_used: usize,
    pub certified_bound: f64,
    pub kp_status: KpStatus,
    pub polymers: usize,
    pub clusters: usize,
    /// The same sum in exact arithmetic, when requested and available.
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// The truncation size: `⌈d / (2 log²d) · log(n/ε)⌉` for the unweighted model and
/// `⌈d / (1000 log²d) · log(n/ε)⌉` for the hard-core model, floored at 1.
pub fn choose_ell(n: usize, d: usize, epsilon: f64, weighted: bool) -> Result<usize> {
    if n == 0 || d < 2 {
        return Err(Error::invalid(format!("truncation needs n >= 1 and d >= 2, got n={n}, d={d}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let l = (d as f64).log2();
    let scale = if weighted { 1000.0 } else { 2.0 };
    let x = d as f64 / (scale * l * l) * (n as f64 / epsilon).log2();
    Ok((x - 1e-9).ceil().max(1.0) as usize)
}

/// `n · 2^{-2ℓ log²d / d}` (unweighted) or `n · 2^{-500 ℓ log²d / d}` (hard-core).
pub fn certified_bound(n: usize, d: usize, ell: usize, weighted: bool) -> f64 {
    let l = (d as f64).log2();
    let rate = if weighted { 500.0 } else { 2.0 };
    n as f64 * (-rate * ell as f64 * l * l / d as f64).exp2()
}

/// The functions `f(γ) = f_per_vertex · |γ|` and `g(γ) = g_per_boundary · |N(γ)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpFunctions {
    pub f_per_vertex: f64,
    pub g_per_boundary: f64,
}

impl KpFunctions {
    /// `f = ln2 |γ| log²d / d`, `g = 2 ln2 |N(γ)| log²d / d`.
    pub fn unweighted(d: usize) -> Self {
        let l = (d as f64).log2();
        let base = std::f64::consts::LN_2 * l * l / d as f64;
        KpFunctions {
            f_per_vertex: base,
            g_per_boundary: 2.0 * base,
        }
    }

    /// `f = c5 α ln2 β |γ| / 8`, `g = c5 α ln2 β |N(γ)| / 8`.
    pub fn weighted(c5: f64, alpha: f64, beta: f64) -> Self {
        let base = c5 * alpha * std::f64::consts::LN_2 * beta / 8.0;
        KpFunctions {
            f_per_vertex: base,
            g_per_boundary: base,
        }
    }

    /// The pair used with the inflated hard-core weights: `f` halves, `g` is unchanged.
    pub fn weighted_tilde(c5: f64, alpha: f64, beta: f64) -> Self {
        let w = Self::weighted(c5, alpha, beta);
        KpFunctions {
            f_per_vertex: w.f_per_vertex / 2.0,
            ..w
        }
    }

    pub fn f(&self, size: usize) -> f64 {
        self.f_per_vertex * size as f64
    }

    pub fn g(&self, boundary: usize) -> f64 {
        self.g_per_boundary * boundary as f64
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExpansionOptions {
    pub cluster: ClusterOptions,
    /// When set, the condition is checked on the truncated universe and recorded.
    pub kp: Option<KpFunctions>,
    /// Also accumulate the sum in exact rational arithmetic.
    pub exact: bool,
}

/// `ln Ξ(ℓ)` for the family on `g`, using polymers of size at most `ℓ`.
pub fn truncated_log_xi(
    g: &BipartiteGraph,
    fam: &PolymerFamily,
    model: &WeightModel,
    ell: usize,
    opts: &ExpansionOptions,
) -> Result<LogPartitionEstimate> {
    let u = PolymerUniverse::build(g, fam, ell)?;
    truncated_log_xi_universe(g, &u, model, ell, opts)
}

/// As [`truncated_log_xi`] on a prepared universe (polymers larger than `ℓ` never contribute).
pub fn truncated_log_xi_universe(
    g: &BipartiteGraph,
    u: &PolymerUniverse,
    model: &WeightModel,
    ell: usize,
    opts: &ExpansionOptions,
) -> Result<LogPartitionEstimate> {
    if ell == 0 {
        return Err(Error::invalid("truncation size must be at least 1"));
    }
    let (log_value, exact, stats) = cluster_sum(u, model, ell, opts.cluster, opts.exact)?;
    let kp_status = match &opts.kp {
        None => KpStatus::Assumed,
        Some(kp) => {
            if kp_report(u, model, kp, ell).all_pass {
                KpStatus::VerifiedToCap
            } else {
                KpStatus::FailedAtCap
            }
        }
    };
    Ok(LogPartitionEstimate {
        log_value,
        ell_used: ell,
        certified_bound: certified_bound(g.side_len(u.side), g.degree(), ell, model.is_weighted()),
        kp_status,
        polymers: u.len(),
        clusters: stats.clusters,
        exact,
    })
}

/// Sums cluster terms with `‖Γ‖ ≤ ell`, partitioned by root polymer across threads and
/// combined in ascending `‖Γ‖`.
pub fn cluster_sum(
    u: &PolymerUniverse,
    model: &WeightModel,
    ell: usize,
    opts: ClusterOptions,
    exact: bool,
) -> Result<(f64, Option<BigRational>, ClusterStats)> {
    let ln_w = u.ln_weights(model);
    let exact_w = if exact { u.exact_weights(model) } else { None };
    let cache = UrsellCache::new();
    type Part = (Vec<CompensatedSum>, Option<BigRational>, ClusterStats);
    let parts: Vec<Part> = (0..u.len())
        .into_par_iter()
        .map(|root| -> Result<Part> {
            let mut by_size = vec![CompensatedSum::default(); ell + 1];
            let mut ex = exact_w.as_ref().map(|_| BigRational::zero());
            let stats = for_each_cluster_rooted(u, root, ell, opts, &cache, &mut |t| {
                by_size[t.size].add(t.value_f64(&ln_w));
                if let (Some(acc), Some(w)) = (ex.as_mut(), exact_w.as_ref()) {
                    *acc += t.value_exact(w);
                }
                Ok(())
            })?;
            Ok((by_size, ex, stats))
        })
        .collect::<Result<_>>()?;
    let mut total = CompensatedSum::default();
    for size in 0..=ell {
        for part in &parts {
            total.add(part.0[size].value());
        }
    }
    let exact_total = exact_w.as_ref().map(|_| {
        parts
            .iter()
            .fold(BigRational::zero(), |acc, p| acc + p.1.clone().unwrap_or_else(BigRational::zero))
    });
    let stats = parts.iter().fold(ClusterStats::default(), |acc, p| acc.merge(p.2));
    Ok((total.value(), exact_total, stats))
}

/// Coefficients of `Ξ(z) = Σ_Λ Π_{γ∈Λ} w_γ z^{|γ|}` over compatible collections `Λ`.
pub fn partition_polynomial<T>(u: &PolymerUniverse, weights: &[T], cap: usize) -> Result<Vec<T>>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + One,
{
    if u.len() > cap {
        return Err(Error::capacity(format!(
            "exact partition function limited to {cap} polymers, universe has {}",
            u.len()
        )));
    }
    let sizes: Vec<usize> = u.polymers().iter().map(|p| p.size()).collect();
    let mut memo: HashMap<BitSet, Vec<T>> = HashMap::new();
    Ok(poly_rec(u, weights, &sizes, &BitSet::full(u.len()), &mut memo))
}

/// Minimal multiplicative identity trait so the same recursion serves `f64` and `BigRational`.
pub trait One {
    fn one() -> Self;
}

impl One for f64 {
    fn one() -> Self {
        1.0
    }
}

impl One for BigRational {
    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }
}

fn poly_rec<T>(
    u: &PolymerUniverse,
    w: &[T],
    sizes: &[usize],
    rest: &BitSet,
    memo: &mut HashMap<BitSet, Vec<T>>,
) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + One,
{
    let Some(v) = rest.first() else {
        return vec![T::one()];
    };
    if let Some(p) = memo.get(rest) {
        return p.clone();
    }
    let mut without = rest.clone();
    without.remove(v);
    let skip = poly_rec(u, w, sizes, &without, memo);
    let mut after = without.clone();
    after.difference_with(u.incompatible_with(v));
    let take = poly_rec(u, w, sizes, &after, memo);
    let mut out = skip;
    let need = take.len() + sizes[v];
    if out.len() < need {
        out.resize(need, T::zero());
    }
    for (k, c) in take.into_iter().enumerate() {
        out[k + sizes[v]] = out[k + sizes[v]].clone() + w[v].clone() * c;
    }
    memo.insert(rest.clone(), out.clone());
    out
}

/// The exact partition function of a universe.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPartition {
    pub ln_value: f64,
    pub value: Option<BigRational>,
    /// `P(‖Λ‖ = k)` numerators: the weight of configurations by total polymer size.
    pub by_size: Vec<f64>,
    pub by_size_exact: Option<Vec<BigRational>>,
}

pub fn exact_partition(u: &PolymerUniverse, model: &WeightModel, cap: usize) -> Result<ExactPartition> {
    let (by_size_exact, value) = match u.exact_weights(model) {
        Some(w) => {
            let poly = partition_polynomial(u, &w, cap)?;
            let total = poly.iter().fold(BigRational::zero(), |a, c| a + c);
            (Some(poly), Some(total))
        }
        None => (None, None),
    };
    let by_size: Vec<f64> = match &by_size_exact {
        Some(p) => p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
        None => {
            let w: Vec<f64> = u.ln_weights(model).into_iter().map(f64::exp).collect();
            partition_polynomial(u, &w, cap)?
        }
    };
    let ln_value = match &value {
        Some(v) => ln_rational(v),
        None => by_size.iter().sum::<f64>().ln(),
    };
    Ok(ExactPartition {
        ln_value,
        value,
        by_size,
        by_size_exact,
    })
}

/// `Ξ` for the full family (every polymer size) on `g`.
pub fn exact_log_xi(g: &BipartiteGraph, fam: &PolymerFamily, model: &WeightModel) -> Result<ExactPartition> {
    let u = PolymerUniverse::build(g, fam, g.side_len(fam.side))?;
    exact_partition(&u, model, EXACT_UNIVERSE_CAP)
}

/// Natural log of a positive rational without overflowing `f64` on huge numerators.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Taylor coefficients `c_0..c_order` of `ln A(z)` for a series with `A(0) = 1` (so `c_0 = 0`).
pub fn log_series(a: &[BigRational], order: usize) -> Vec<BigRational> {
    let coef = |s: usize| a.get(s).cloned().unwrap_or_else(BigRational::zero);
    let mut c = vec![BigRational::zero(); order + 1];
    for s in 1..=order {
        let mut acc = BigRational::zero();
        for j in 1..s {
            acc += BigRational::from_integer(j.into()) * &c[j] * coef(s - j);
        }
        c[s] = coef(s) - acc / BigRational::from_integer(s.into());
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpEntry {
    pub polymer: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpReport {
    pub size_cap: usize,
    pub entries: Vec<KpEntry>,
    pub all_pass: bool,
    /// Always true: only polymers up to the cap enter the sums.
    pub truncated_universe: bool,
}

/// Checks `Σ_{γ' ≁ γ} w_{γ'} e^{f(γ') + g(γ')} ≤ f(γ)` for every polymer up to `size_cap`.
pub fn verify_kp(
    g: &BipartiteGraph,
    fam: &PolymerFamily,
    model: &WeightModel,
    kp: &KpFunctions,
    size_cap: usize,
) -> Result<KpReport> {
    let u = PolymerUniverse::build(g, fam, size_cap)?;
    Ok(kp_report(&u, model, kp, size_cap))
}

pub fn kp_report(u: &PolymerUniverse, model: &WeightModel, kp: &KpFunctions, size_cap: usize) -> KpReport {
    let inflated: Vec<f64> = u
        .polymers()
        .iter()
        .map(|p| (model.ln_weight(p.size(), p.boundary_len()) + kp.f(p.size()) + kp.g(p.boundary_len())).exp())
        .collect();
    let entries: Vec<KpEntry> = (0..u.len())
        .map(|i| {
            let mut lhs = CompensatedSum::default();
            lhs.add(inflated[i]);
            for j in u.incompatible_with(i).iter() {
                lhs.add(inflated[j]);
            }
            let p = u.polymer(i);
            let rhs = kp.f(p.size());
            KpEntry {
                polymer: p.vertices.to_vec(),
                lhs: lhs.value(),
                rhs,
                pass: lhs.value() <= rhs,
            }
        })
        .collect();
    KpReport {
        size_cap,
        all_pass: entries.iter().all(|e| e.pass),
        entries,
        truncated_universe: true,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailMass {
    /// `P(‖Λ‖ ≥ δn)` under the polymer measure.
    pub probability: f64,
    pub exact: Option<BigRational>,
    /// `2^{-δ n log²d / (2d)}`.
    pub bound: f64,
}

pub fn tail_mass(g: &BipartiteGraph, fam: &PolymerFamily, model: &WeightModel, delta: f64) -> Result<TailMass> {
    let n = g.side_len(fam.side);
    let u = PolymerUniverse::build(g, fam, n)?;
    let part = exact_partition(&u, model, EXACT_UNIVERSE_CAP)?;
    let threshold = (delta * n as f64 - 1e-12).ceil().max(0.0) as usize;
    let exact = part.by_size_exact.as_ref().map(|p| {
        let total = p.iter().fold(BigRational::zero(), |a, c| a + c);
        let tail = p.iter().skip(threshold).fold(BigRational::zero(), |a, c| a + c);
        tail / total
    });
    let probability = match &exact {
        Some(r) => r.to_f64().unwrap_or(f64::NAN),
        None => part.by_size.iter().skip(threshold).sum::<f64>() / part.by_size.iter().sum::<f64>(),
    };
    let l = (g.degree() as f64).log2();
    let bound = (-delta * n as f64 * l * l / (2.0 * g.degree() as f64)).exp2();
    Ok(TailMass {
        probability,
        exact,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExpansionParams, Side};
    use crate::instances::{generate, InstanceSpec};
    use crate::polymer::{Fugacity, Polymer};

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    fn c8() -> BipartiteGraph {
        generate(&InstanceSpec::EvenCycle { m: 8 }).unwrap()
    }

    fn c8_family() -> PolymerFamily {
        PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(1.0).unwrap())
    }

    #[test]
    fn choose_ell_examples() {
        assert_eq!(choose_ell(16, 2, 1.0 / 16.0, false).unwrap(), 8);
        assert_eq!(choose_ell(4, 4, 8.0, false).unwrap(), 1);
        for d in [2usize, 4, 8, 16] {
            let l = (d as f64).log2();
            let step = (d as f64 / (2.0 * l * l)).ceil() as usize;
            for k in 1..10 {
                let e = 2f64.powi(-k);
                let a = choose_ell(100, d, e, false).unwrap();
                let b = choose_ell(100, d, e / 2.0, false).unwrap();
                assert!(b >= a && b - a <= step);
            }
        }
        assert!(choose_ell(10, 1, 0.1, false).is_err());
    }

    #[test]
    fn exact_partition_examples() {
        let g = c8();
        let part = exact_log_xi(&g, &c8_family(), &WeightModel::Unweighted).unwrap();
        assert_eq!(part.value, Some(q(21, 8)));
        assert!((part.ln_value - (21.0f64 / 8.0).ln()).abs() < 1e-14);

        let one = vec![Polymer::new(&g, g.side_set(Side::X, [0]).unwrap()).unwrap()];
        let u = PolymerUniverse::from_polymers(Side::X, one).unwrap();
        let p = exact_partition(&u, &WeightModel::Unweighted, 24).unwrap();
        assert_eq!(p.value, Some(q(5, 4)));

        let two: Vec<_> = [[0], [1]]
            .iter()
            .map(|v| Polymer::new(&g, g.side_set(Side::X, *v).unwrap()).unwrap())
            .collect();
        let u = PolymerUniverse::from_polymers(Side::X, two).unwrap();
        assert_eq!(exact_partition(&u, &WeightModel::Unweighted, 24).unwrap().value, Some(q(3, 2)));
        assert!(matches!(exact_partition(&u, &WeightModel::Unweighted, 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn truncated_examples() {
        let g = c8();
        let opts = ExpansionOptions {
            exact: true,
            ..Default::default()
        };
        let one = truncated_log_xi(&g, &c8_family(), &WeightModel::Unweighted, 1, &opts).unwrap();
        assert_eq!(one.exact, Some(q(1, 1)));
        assert!((one.log_value - 1.0).abs() < 1e-15);
        assert_eq!(one.kp_status, KpStatus::Assumed);

        let none = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(100.0).unwrap());
        let empty = truncated_log_xi(&g, &none, &WeightModel::Unweighted, 4, &opts).unwrap();
        assert_eq!(empty.log_value, 0.0);
        assert_eq!(empty.polymers, 0);

        // every nonempty set of K_{3,3} has the whole side as closure, so nothing is small
        let k = generate(&InstanceSpec::CompleteBipartite { d: 3 }).unwrap();
        let fam = PolymerFamily::small(Side::X);
        let e = truncated_log_xi(&k, &fam, &WeightModel::Unweighted, 1, &opts).unwrap();
        assert_eq!(e.log_value, 0.0);
    }

    /// Cluster sums grouped by `‖Γ‖` equal the Taylor coefficients of `ln Ξ(z)`.
    fn check_convention(u: &PolymerUniverse, model: &WeightModel, order: usize) {
        let w = u.exact_weights(model).unwrap();
        let poly = partition_polynomial(u, &w, 24).unwrap();
        let want = log_series(&poly, order);
        let mut got = vec![BigRational::zero(); order + 1];
        let cache = UrsellCache::new();
        for root in 0..u.len() {
            for_each_cluster_rooted(u, root, order, ClusterOptions::default(), &cache, &mut |t| {
                got[t.size] += t.value_exact(&w);
                Ok(())
            })
            .unwrap();
        }
        assert_eq!(got[1..], want[1..]);
    }

    #[test]
    fn cluster_convention_matches_log_series() {
        let g = c8();
        let u = PolymerUniverse::build(&g, &c8_family(), 4).unwrap();
        check_convention(&u, &WeightModel::Unweighted, 9);
        check_convention(&u, &WeightModel::hardcore(Fugacity::exact(q(1, 2)).unwrap()), 7);
        for spec in [
            InstanceSpec::EvenCycle { m: 12 },
            InstanceSpec::Hypercube { d: 3 },
            InstanceSpec::RandomRegular { n: 6, d: 3, seed: 4 },
        ] {
            let g = generate(&spec).unwrap();
            let full = PolymerUniverse::build(&g, &PolymerFamily::small(Side::X), 3).unwrap();
            let keep: Vec<_> = full.polymers().iter().take(12).cloned().collect();
            let u = PolymerUniverse::from_polymers(Side::X, keep).unwrap();
            check_convention(&u, &WeightModel::Unweighted, 6);
        }
    }

    #[test]
    fn convergence_when_weights_are_small() {
        // Q_4 singletons: eight polymers of weight 1/16
        let g = generate(&InstanceSpec::Hypercube { d: 4 }).unwrap();
        let fam = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(0.5).unwrap());
        let u = PolymerUniverse::build(&g, &fam, 8).unwrap();
        let sub: Vec<_> = u.polymers().iter().filter(|p| p.size() == 1).cloned().collect();
        let u = PolymerUniverse::from_polymers(Side::X, sub).unwrap();
        let model = WeightModel::Unweighted;
        let exact = exact_partition(&u, &model, 24).unwrap();
        let series: Vec<f64> = log_series(exact.by_size_exact.as_ref().unwrap(), 12)
            .iter()
            .map(|c| c.to_f64().unwrap())
            .collect();
        let lw = u.ln_weights(&model);
        let mut by_size = vec![0.0; 13];
        crate::polymer::for_each_cluster(&u, 12, ClusterOptions { max_polymers: 12 }, &mut |t| {
            by_size[t.size] += t.value_f64(&lw);
            Ok(())
        })
        .unwrap();
        let mut last = f64::INFINITY;
        for ell in [3, 6, 9, 12] {
            let partial: f64 = by_size[1..=ell].iter().sum();
            let want: f64 = series[1..=ell].iter().sum();
            assert!((partial - want).abs() < 1e-13, "order {ell}: {partial} vs {want}");
            let err = (partial - exact.ln_value).abs();
            assert!(err < last / 4.0, "order {ell}: error {err} after {last}");
            last = err;
        }
        assert!(last < 5e-6, "{last}");
    }

    #[test]
    fn kp_reports() {
        let g = c8();
        let kp = KpFunctions::unweighted(2);
        let none = PolymerFamily::expanding(Side::X, ExpansionParams::with_c1(100.0).unwrap());
        let r = verify_kp(&g, &none, &WeightModel::Unweighted, &kp, 4).unwrap();
        assert!(r.entries.is_empty() && r.all_pass);

        let r = verify_kp(&g, &c8_family(), &WeightModel::Unweighted, &kp, 4).unwrap();
        assert_eq!(r.entries.len(), 8);
        assert!(r.truncated_universe);
        // d = 2 is far below the regime of the lemma; the singletons fail
        assert!(!r.all_pass);

        let one = vec![Polymer::new(&g, g.side_set(Side::X, [0]).unwrap()).unwrap()];
        let u = PolymerUniverse::from_polymers(Side::X, one).unwrap();
        let r = kp_report(&u, &WeightModel::Unweighted, &kp, 1);
        let want = (0.25f64.ln() + kp.f(1) + kp.g(2)).exp();
        assert!((r.entries[0].lhs - want).abs() < 1e-15);
        assert_eq!(r.entries[0].rhs, kp.f(1));
    }

    #[test]
    fn tail_mass_examples() {
        let g = c8();
        let fam = c8_family();
        let zero = tail_mass(&g, &fam, &WeightModel::Unweighted, 0.0).unwrap();
        assert_eq!(zero.exact, Some(q(1, 1)));
        let beyond = tail_mass(&g, &fam, &WeightModel::Unweighted, 2.0).unwrap();
        assert_eq!(beyond.exact, Some(q(0, 1)));
        // ‖Λ‖ ≥ 2 collects 2/16 + 4/8 out of 21/8; no two adjacent pairs are compatible
        let half = tail_mass(&g, &fam, &WeightModel::Unweighted, 0.5).unwrap();
        assert_eq!(half.exact, Some(q(5, 21)));
        let full = tail_mass(&g, &fam, &WeightModel::Unweighted, 1.0).unwrap();
        assert_eq!(full.exact, Some(q(0, 1)));
        assert!(full.bound > 0.0);
    }

    #[test]
    fn restriction_monotonicity() {
        use crate::bitset::BitSet;
        for spec in [InstanceSpec::EvenCycle { m: 12 }, InstanceSpec::Hypercube { d: 3 }] {
            let g = generate(&spec).unwrap();
            let fam = PolymerFamily::small(Side::X);
            let u = PolymerUniverse::build(&g, &fam, g.n_x()).unwrap();
            if u.len() > 20 {
                continue;
            }
            let full = exact_partition(&u, &WeightModel::Unweighted, 24).unwrap().value.unwrap();
            let n = g.n_x();
            for mask in 0u64..1 << n {
                let allowed = BitSet::from_mask(n, mask);
                let (sub, _) = u.restrict(&allowed);
                let direct = PolymerUniverse::build_within(&g, &fam, n, &allowed).unwrap();
                assert_eq!(sub.polymers(), direct.polymers());
                let part = exact_partition(&sub, &WeightModel::Unweighted, 24).unwrap().value.unwrap();
                assert!(part <= full);
            }
        }
    }
}
