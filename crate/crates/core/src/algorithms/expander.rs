//! Counting and sampling on bipartite expanders through the two-sided polymer mixture.
//!
//! Every independent set has all its `X`-side 2-linked components in the polymer family
//! or all its `Y`-side ones, and the sets of the first kind are weighed exactly by
//! `(1+λ)^n Ξ^X`. Adding both sides therefore overcounts only the sets of both kinds.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{combine_error, epsilon_zero, in_polymer_side, log_add_exp, ApproxCount, Method, SideBreakdown};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::expansion::{
    choose_ell, cluster_sum, exact_log_xi, ln_rational, truncated_log_xi, ExpansionOptions, KpFunctions, KpStatus,
};
use crate::graph::{BipartiteGraph, ExpansionParams, Side};
use crate::oracle::{exact_count_bipartite, exact_distribution, IndependentSet};
use crate::polymer::{ClusterOptions, PolymerFamily, PolymerUniverse, WeightModel};

/// Which branch of the counting algorithm runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Brute force when `ε <= 2ε₀`, the cluster expansion otherwise.
    #[default]
    Auto,
    Brute,
    Expansion,
}

#[derive(Debug, Clone, Default)]
pub struct ExpanderOptions {
    pub strategy: Strategy,
    /// Check the Kotecký–Preiss condition on the truncated universes.
    pub check_kp: bool,
    pub cluster: ClusterOptions,
}

pub(crate) fn check_shape(g: &BipartiteGraph) -> Result<()> {
    if g.n_x() != g.n_y() {
        return Err(Error::invalid(format!(
            "the two sides must have equal size, got {} and {}",
            g.n_x(),
            g.n_y()
        )));
    }
    Ok(())
}

/// The model-dependent parts of a mixture count.
pub(crate) struct MixtureSpec {
    pub fam: PolymerFamily,
    pub model: WeightModel,
    pub kp: Option<KpFunctions>,
}

pub(crate) fn mixture_count(
    g: &BipartiteGraph,
    spec: &MixtureSpec,
    epsilon: f64,
    opts: &ExpanderOptions,
    brute: impl FnOnce() -> Result<BigRational>,
) -> Result<ApproxCount> {
    check_shape(g)?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let (n, d) = (g.n_x(), g.degree());
    let eps0 = epsilon_zero(n, d);
    let use_brute = match opts.strategy {
        Strategy::Auto => epsilon <= 2.0 * eps0,
        Strategy::Brute => true,
        Strategy::Expansion => false,
    };
    if use_brute {
        let mut r = ApproxCount::exact(brute()?, Method::Brute);
        if opts.strategy == Strategy::Auto {
            r.notes.push(format!("epsilon {epsilon} <= 2 eps0 = {:.6}: counted exactly", 2.0 * eps0));
        }
        return Ok(r);
    }
    let ell = choose_ell(n, d, epsilon / 4.0, spec.model.is_weighted())?;
    let eo = ExpansionOptions {
        cluster: opts.cluster,
        kp: if opts.check_kp { spec.kp } else { None },
        exact: false,
    };
    let fy = spec.fam.mirrored();
    let (ex, ey) = rayon::join(
        || truncated_log_xi(g, &spec.fam, &spec.model, ell, &eo),
        || truncated_log_xi(g, &fy, &spec.model, ell, &eo),
    );
    let (ex, ey) = (ex?, ey?);
    let log_value = n as f64 * spec.model.lambda().ln_1p() + log_add_exp(ex.log_value, ey.log_value);
    let rel_error_bound = combine_error(ex.certified_bound.max(ey.certified_bound), eps0);
    let kp_status = match (ex.kp_status, ey.kp_status) {
        (KpStatus::FailedAtCap, _) | (_, KpStatus::FailedAtCap) => KpStatus::FailedAtCap,
        (KpStatus::VerifiedToCap, KpStatus::VerifiedToCap) => KpStatus::VerifiedToCap,
        _ => KpStatus::Assumed,
    };
    let mut notes = Vec::new();
    if eps0 >= 0.25 {
        notes.push(format!("uncertified (small-n regime): eps0 = {eps0:.4} is not below 1/4"));
    }
    if kp_status == KpStatus::FailedAtCap {
        notes.push("the Kotecky-Preiss check failed on the truncated universe".to_string());
    }
    if rel_error_bound >= 1.0 {
        notes.push(format!("the error bound {rel_error_bound:.4} is vacuous"));
    }
    Ok(ApproxCount {
        log_value,
        rel_error_bound,
        method: Method::ExpanderCe,
        side_breakdown: Some(SideBreakdown {
            ln_xi_x: ex.log_value,
            ln_xi_y: ey.log_value,
            ell,
        }),
        certified: notes.is_empty(),
        kp_status: Some(kp_status),
        exact: None,
        notes,
    })
}

/// Approximates the number of independent sets of a bipartite expander by
/// `2^n (Ξ^X(ℓ) + Ξ^Y(ℓ))` over expanding polymers, or exactly when `ε` is tiny.
pub fn count_expander(
    g: &BipartiteGraph,
    epsilon: f64,
    p: &ExpansionParams,
    opts: &ExpanderOptions,
) -> Result<ApproxCount> {
    let spec = MixtureSpec {
        fam: PolymerFamily::expanding(Side::X, *p),
        model: WeightModel::Unweighted,
        kp: (g.degree() >= 2).then(|| KpFunctions::unweighted(g.degree())),
    };
    mixture_count(g, &spec, epsilon, opts, || {
        Ok(BigRational::from_integer(BigInt::from(exact_count_bipartite(g)?.value)))
    })
}

/// How polymer configurations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    /// A table when the side has at most [`AUTO_EXACT_SIDE`] vertices and it fits, else sequential.
    #[default]
    Auto,
    /// Tabulate every compatible collection of polymers.
    Exact,
    /// Resolve vertices one at a time from ratios of truncated partition functions.
    SelfReducible,
}

/// Largest side on which [`SamplerMode::Auto`] tries a table.
pub const AUTO_EXACT_SIDE: usize = 20;

#[derive(Debug, Clone)]
pub struct SamplerOptions {
    pub mode: SamplerMode,
    pub cluster: ClusterOptions,
    /// Largest number of tabulated configurations per side.
    pub config_cap: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            mode: SamplerMode::Auto,
            cluster: ClusterOptions::default(),
            config_cap: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymerSample {
    pub set: IndependentSet,
    /// The side whose polymer model was used.
    pub side: Side,
    /// The polymer configuration, as vertex sets on `side`.
    pub polymers: Vec<BitSet>,
}

struct Table {
    universe: PolymerUniverse,
    configs: Vec<Vec<usize>>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

struct Sequential {
    universe: PolymerUniverse,
    /// Polymers grouped by their smallest vertex.
    by_min: Vec<Vec<usize>>,
    ln_w: Vec<f64>,
    model: WeightModel,
    ell: usize,
    cluster: ClusterOptions,
    memo: Mutex<HashMap<BitSet, f64>>,
}

enum SideSampler {
    Table(Table),
    Sequential(Sequential),
}

/// A prepared sampler for `μ̂ = (Ξ^X ν̂^X + Ξ^Y ν̂^Y) / (Ξ^X + Ξ^Y)`.
pub struct MixtureSampler {
    graph: BipartiteGraph,
    sides: [SideSampler; 2],
    p_x: f64,
    fill: f64,
    /// `ln Ξ^X` and `ln Ξ^Y` as used for the side choice.
    pub ln_xi: [f64; 2],
    /// The truncation size used by sequential sides (zero when both sides are tables).
    pub ell: usize,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::X => 0,
        Side::Y => 1,
    }
}

fn build_table(g: &BipartiteGraph, fam: &PolymerFamily, model: &WeightModel, cap: usize) -> Result<(Table, f64)> {
    let universe = PolymerUniverse::build(g, fam, g.side_len(fam.side))?;
    let mut configs = Vec::new();
    let mut stack = Vec::new();
    collect_configs(&universe, 0, &BitSet::new(universe.len()), &mut stack, &mut configs, cap)?;
    let (probs, ln_xi) = match universe.exact_weights(model) {
        Some(w) => {
            let weights: Vec<BigRational> = configs
                .iter()
                .map(|c| c.iter().fold(BigRational::one(), |acc, &i| acc * &w[i]))
                .collect();
            let xi = weights.iter().fold(BigRational::zero(), |a, b| a + b);
            let probs: Vec<f64> = weights.iter().map(|x| (x / &xi).to_f64().unwrap_or(0.0)).collect();
            (probs, ln_rational(&xi))
        }
        None => {
            let lw = universe.ln_weights(model);
            let logs: Vec<f64> = configs.iter().map(|c| c.iter().map(|&i| lw[i]).sum()).collect();
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = logs.iter().map(|l| (l - m).exp()).sum();
            (logs.iter().map(|l| (l - m).exp() / total).collect(), m + total.ln())
        }
    };
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    Ok((
        Table {
            universe,
            configs,
            probs,
            cumulative,
        },
        ln_xi,
    ))
}

fn collect_configs(
    u: &PolymerUniverse,
    from: usize,
    blocked: &BitSet,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::capacity(format!("more than {cap} polymer configurations")));
    }
    out.push(stack.clone());
    for i in from..u.len() {
        if blocked.contains(i) {
            continue;
        }
        let mut next = blocked.clone();
        next.union_with(u.incompatible_with(i));
        next.insert(i);
        stack.push(i);
        collect_configs(u, i + 1, &next, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

impl Sequential {
    fn new(g: &BipartiteGraph, fam: &PolymerFamily, model: &WeightModel, ell: usize, cluster: ClusterOptions) -> Result<Self> {
        let universe = PolymerUniverse::build(g, fam, ell)?;
        let mut by_min = vec![Vec::new(); g.side_len(fam.side)];
        for (i, p) in universe.polymers().iter().enumerate() {
            by_min[p.vertices.members.first().expect("polymers are nonempty")].push(i);
        }
        Ok(Sequential {
            ln_w: universe.ln_weights(model),
            universe,
            by_min,
            model: model.clone(),
            ell,
            cluster,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// `ln Ξ(ℓ)` of the polymers lying inside `allowed`.
    fn ln_xi(&self, allowed: &BitSet) -> Result<f64> {
        if let Some(&v) = self.memo.lock().expect("memo lock").get(allowed) {
            return Ok(v);
        }
        let (sub, _) = self.universe.restrict(allowed);
        let (v, _, _) = cluster_sum(&sub, &self.model, self.ell, self.cluster, false)?;
        self.memo.lock().expect("memo lock").insert(allowed.clone(), v);
        Ok(v)
    }

    fn draw(&self, g: &BipartiteGraph, rng: &mut impl Rng) -> Result<Vec<usize>> {
        let side = self.universe.side;
        let mut allowed = BitSet::full(g.side_len(side));
        let mut chosen = Vec::new();
        for v in 0..g.side_len(side) {
            if !allowed.contains(v) {
                continue;
            }
            let mut without = allowed.clone();
            without.remove(v);
            let mut options = vec![(None, self.ln_xi(&without)?)];
            for &i in &self.by_min[v] {
                let p = self.universe.polymer(i);
                if !p.vertices.members.is_subset(&allowed) {
                    continue;
                }
                let rest = allowed.difference(&g.nbhd_bits(side.opposite(), &p.boundary.members));
                options.push((Some(i), self.ln_w[i] + self.ln_xi(&rest)?));
            }
            let m = options.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = options.iter().map(|o| (o.1 - m).exp()).sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = options.last().expect("at least one option").0;
            for (o, l) in &options {
                u -= (l - m).exp();
                if u < 0.0 {
                    pick = *o;
                    break;
                }
            }
            match pick {
                None => allowed = without,
                Some(i) => {
                    let p = self.universe.polymer(i);
                    allowed.difference_with(&g.nbhd_bits(side.opposite(), &p.boundary.members));
                    chosen.push(i);
                }
            }
        }
        Ok(chosen)
    }
}

impl MixtureSampler {
    /// Prepares both sides; `fam` is the `X`-side family and the fill probability is
    /// `λ/(1+λ)` of the model.
    pub fn new(
        g: &BipartiteGraph,
        fam: &PolymerFamily,
        model: &WeightModel,
        epsilon: f64,
        opts: &SamplerOptions,
    ) -> Result<Self> {
        check_shape(g)?;
        if !(epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let fams = [PolymerFamily { side: Side::X, ..*fam }, PolymerFamily { side: Side::Y, ..*fam }];
        let n = g.n_x();
        let mut ell = 0;
        let mut build = |f: &PolymerFamily| -> Result<(SideSampler, f64)> {
            let try_table = match opts.mode {
                SamplerMode::Exact => true,
                SamplerMode::Auto => n <= AUTO_EXACT_SIDE,
                SamplerMode::SelfReducible => false,
            };
            if try_table {
                match build_table(g, f, model, opts.config_cap) {
                    Ok((t, l)) => return Ok((SideSampler::Table(t), l)),
                    Err(e) if opts.mode == SamplerMode::Exact => return Err(e),
                    Err(Error::Capacity(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let l = choose_ell(n, g.degree(), epsilon / 8.0, model.is_weighted())?;
            ell = l;
            let s = Sequential::new(g, f, model, l, opts.cluster)?;
            let (v, _, _) = cluster_sum(&s.universe, model, l, opts.cluster, false)?;
            Ok((SideSampler::Sequential(s), v))
        };
        let (sx, lx) = build(&fams[0])?;
        let (sy, ly) = build(&fams[1])?;
        let p_x = 1.0 / (1.0 + (ly - lx).exp());
        Ok(MixtureSampler {
            graph: g.clone(),
            sides: [sx, sy],
            p_x,
            fill: model.occupation(),
            ln_xi: [lx, ly],
            ell,
        })
    }

    /// True when both sides are tabulated, so the output law is known exactly.
    pub fn is_exact(&self) -> bool {
        self.sides.iter().all(|s| matches!(s, SideSampler::Table(_)))
    }

    pub fn side_probability(&self, side: Side) -> f64 {
        match side {
            Side::X => self.p_x,
            Side::Y => 1.0 - self.p_x,
        }
    }

    fn universe(&self, i: usize) -> &PolymerUniverse {
        match &self.sides[i] {
            SideSampler::Table(t) => &t.universe,
            SideSampler::Sequential(s) => &s.universe,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<PolymerSample> {
        let side = if rng.gen::<f64>() < self.p_x { Side::X } else { Side::Y };
        let k = side_index(side);
        let chosen = match &self.sides[k] {
            SideSampler::Table(t) => {
                let u: f64 = rng.gen();
                let at = t.cumulative.partition_point(|&c| c <= u).min(t.configs.len() - 1);
                t.configs[at].clone()
            }
            SideSampler::Sequential(s) => s.draw(&self.graph, rng)?,
        };
        let universe = self.universe(k);
        let polymers: Vec<BitSet> = chosen.iter().map(|&i| universe.polymer(i).vertices.members.clone()).collect();
        let mut own = BitSet::new(self.graph.side_len(side));
        for p in &polymers {
            own.union_with(p);
        }
        let blocked = self.graph.nbhd_bits(side, &own);
        let mut other = BitSet::new(self.graph.side_len(side.opposite()));
        for v in 0..other.universe() {
            if !blocked.contains(v) && rng.gen::<f64>() < self.fill {
                other.insert(v);
            }
        }
        let set = match side {
            Side::X => IndependentSet { x: own, y: other },
            Side::Y => IndependentSet { x: other, y: own },
        };
        Ok(PolymerSample { set, side, polymers })
    }

    /// `count` samples; sample `i` uses stream `i` of the seeded generator, so results do
    /// not depend on the thread count.
    pub fn sample_many(&self, seed: u64, count: usize) -> Result<Vec<PolymerSample>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.sample(&mut rng)
            })
            .collect()
    }

    /// The exact law of [`Self::sample`] when both sides are tabulated.
    pub fn induced_distribution(&self) -> Result<HashMap<IndependentSet, f64>> {
        let mut out: HashMap<IndependentSet, f64> = HashMap::new();
        for side in [Side::X, Side::Y] {
            let k = side_index(side);
            let SideSampler::Table(t) = &self.sides[k] else {
                return Err(Error::invalid("the induced law is only available when both sides are tabulated"));
            };
            let ps = self.side_probability(side);
            for (config, &pc) in t.configs.iter().zip(&t.probs) {
                let mut own = BitSet::new(self.graph.side_len(side));
                for &i in config {
                    own.union_with(&t.universe.polymer(i).vertices.members);
                }
                let free = self.graph.nbhd_bits(side, &own).complement().to_vec();
                if free.len() > 24 {
                    return Err(Error::capacity("too many free vertices to tabulate fills"));
                }
                for mask in 0u64..1 << free.len() {
                    let k = mask.count_ones() as i32;
                    let p = ps * pc * self.fill.powi(k) * (1.0 - self.fill).powi(free.len() as i32 - k);
                    let other = BitSet::from_indices(
                        self.graph.side_len(side.opposite()),
                        free.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &v)| v),
                    );
                    let set = match side {
                        Side::X => IndependentSet { x: own.clone(), y: other },
                        Side::Y => IndependentSet { x: other, y: own.clone() },
                    };
                    *out.entry(set).or_insert(0.0) += p;
                }
            }
        }
        Ok(out)
    }
}

/// `λ` of a model as an exact rational, when it has one.
pub fn exact_lambda(model: &WeightModel) -> Option<BigRational> {
    match model {
        WeightModel::Unweighted => Some(BigRational::one()),
        WeightModel::HardCore { lambda } => lambda.as_exact().cloned(),
        WeightModel::Tilde { .. } => None,
    }
}

/// The mixture `μ̂` computed from its definition:
/// `μ̂(I) = m(I) λ^{|I|} / ((1+λ)^n (Ξ^X + Ξ^Y))` with `m(I)` the number of sides whose
/// components of `I` are all polymers.
pub fn mixture_formula(
    g: &BipartiteGraph,
    fam: &PolymerFamily,
    model: &WeightModel,
) -> Result<HashMap<IndependentSet, BigRational>> {
    check_shape(g)?;
    let lambda = exact_lambda(model).ok_or_else(|| Error::invalid("the mixture formula needs an exact fugacity"))?;
    let fx = PolymerFamily { side: Side::X, ..*fam };
    let fy = fx.mirrored();
    let xi = |f: &PolymerFamily| -> Result<BigRational> {
        exact_log_xi(g, f, model)?
            .value
            .ok_or_else(|| Error::invalid("exact weights are unavailable"))
    };
    let denom = num_traits::pow(BigRational::one() + &lambda, g.n_x()) * (xi(&fx)? + xi(&fy)?);
    let table = exact_distribution(g, &lambda)?;
    let mut out = HashMap::new();
    for (set, _) in table.entries {
        let m = usize::from(in_polymer_side(g, &fx, &set.x)) + usize::from(in_polymer_side(g, &fy, &set.y));
        if m > 0 {
            let w = num_traits::pow(lambda.clone(), set.len()) * BigRational::from_integer(m.into()) / &denom;
            out.insert(set, w);
        }
    }
    Ok(out)
}

/// Total-variation distance between two finite laws.
pub fn total_variation(a: &HashMap<IndependentSet, f64>, b: &HashMap<IndependentSet, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &p) in a {
        sum += (p - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &q) in b {
        if !a.contains_key(k) {
            sum += q;
        }
    }
    sum / 2.0
}

/// Converts an exact law to floating point.
pub fn to_f64_law(law: &HashMap<IndependentSet, BigRational>) -> HashMap<IndependentSet, f64> {
    law.iter().map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(f64::NAN))).collect()
}

/// A prepared sampler for uniform independent sets on an expander.
pub fn expander_sampler(
    g: &BipartiteGraph,
    epsilon: f64,
    p: &ExpansionParams,
    opts: &SamplerOptions,
) -> Result<MixtureSampler> {
    MixtureSampler::new(g, &PolymerFamily::expanding(Side::X, *p), &WeightModel::Unweighted, epsilon, opts)
}

/// One approximately uniform independent set.
pub fn sample_expander(
    g: &BipartiteGraph,
    epsilon: f64,
    p: &ExpansionParams,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<PolymerSample> {
    let sampler = expander_sampler(g, epsilon, p, opts)?;
    sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}
