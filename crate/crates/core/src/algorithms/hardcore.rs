//! The hard-core model at fugacity `λ` on bipartite `α`-expanders, with small polymers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expander::{mixture_count, ExpanderOptions, MixtureSampler, MixtureSpec, PolymerSample, SamplerOptions};
use super::ApproxCount;
use crate::error::{Error, Result};
use crate::expansion::KpFunctions;
use crate::graph::{BipartiteGraph, Side};
use crate::oracle::exact_hardcore;
use crate::polymer::{Fugacity, PolymerFamily, WeightModel};

/// Fugacity, promised expansion and the constants of the weighted container bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardCoreParams {
    pub lambda: Fugacity,
    pub alpha: f64,
    pub c4: f64,
    pub c5: f64,
}

/// The hypotheses checked for a given degree, and the fugacity they call for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardCoreConditions {
    pub beta: f64,
    /// `β >= c4 max(log(d⁵/α)/√d, 2 log²d/(α d))`.
    pub container_hypothesis: bool,
    /// `α β >= (4000/c5) log²d / d`.
    pub alpha_beta: bool,
    /// `log2(1 + λ_min)` for the least `λ_min` meeting both conditions.
    pub log2_one_plus_lambda_min: f64,
    /// `C₂ = λ_min d^{1/4} / log d`; infinite when `λ_min` overflows.
    pub c2: f64,
}

impl HardCoreConditions {
    pub fn hold(&self) -> bool {
        self.container_hypothesis && self.alpha_beta
    }
}

/// `log2 r` when `r` is a power of two (possibly negative).
fn exact_log2(r: &BigRational) -> Option<i64> {
    if !r.is_positive() {
        return None;
    }
    let pow = |x: &BigInt| -> Option<i64> {
        let bits = x.bits();
        (x.trailing_zeros()? == bits - 1).then(|| bits as i64 - 1)
    };
    Some(pow(r.numer())? - pow(r.denom())?)
}

/// The least `t` with `t² / (t + l2) >= k`.
fn beta_threshold(k: f64, l2: f64) -> f64 {
    (k + (k * k + 4.0 * k * l2).sqrt()) / 2.0
}

impl HardCoreParams {
    pub const DEFAULT_C4: f64 = 1.0;
    pub const DEFAULT_C5: f64 = 1.0;

    pub fn new(lambda: Fugacity, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(lambda.to_f64() > 0.0) {
            return Err(Error::invalid(format!("fugacity must be positive, got {lambda}")));
        }
        Ok(HardCoreParams {
            lambda,
            alpha,
            c4: Self::DEFAULT_C4,
            c5: Self::DEFAULT_C5,
        })
    }

    fn log2_spread(&self, d: usize) -> f64 {
        (2.0 * (d as f64).powi(5) / self.alpha).log2()
    }

    /// `β(λ) = log²(1+λ) / (log(1+λ) + log(2d⁵/α))`.
    pub fn beta(&self, d: usize) -> f64 {
        let t = self.lambda.to_f64().ln_1p() / std::f64::consts::LN_2;
        t * t / (t + self.log2_spread(d))
    }

    /// `β(λ)` as a rational, when both logarithms are integers.
    pub fn beta_exact(&self, d: usize) -> Option<BigRational> {
        let lambda = self.lambda.as_exact()?;
        let alpha = BigRational::from_float(self.alpha)?;
        let t = exact_log2(&(lambda + BigRational::one()))?;
        let spread = BigRational::from_integer(BigInt::from(2) * num_traits::pow(BigInt::from(d), 5)) / alpha;
        let l2 = exact_log2(&spread)?;
        if t + l2 == 0 {
            return None;
        }
        Some(BigRational::new(BigInt::from(t * t), BigInt::from(t + l2)))
    }

    pub fn conditions(&self, d: usize) -> HardCoreConditions {
        let beta = self.beta(d);
        let l = (d as f64).log2();
        let dd = d as f64;
        let k4 = self.c4 * ((dd.powi(5) / self.alpha).log2() / dd.sqrt()).max(2.0 * l * l / (self.alpha * dd));
        // α β >= (4000/c5) log²d / d, solved for β
        let k5 = 4000.0 / self.c5 * l * l / (dd * self.alpha);
        let l2 = self.log2_spread(d);
        let t_min = beta_threshold(k4, l2).max(beta_threshold(k5, l2));
        let lambda_min = t_min.exp2() - 1.0;
        HardCoreConditions {
            beta,
            container_hypothesis: beta >= k4,
            alpha_beta: beta >= k5,
            log2_one_plus_lambda_min: t_min,
            c2: lambda_min * dd.powf(0.25) / l.max(f64::MIN_POSITIVE),
        }
    }

    pub fn model(&self) -> WeightModel {
        WeightModel::hardcore(self.lambda.clone())
    }

    fn exact_lambda(&self) -> Result<BigRational> {
        match &self.lambda {
            Fugacity::Exact(r) => Ok(r.clone()),
            Fugacity::Float(x) => {
                BigRational::from_float(*x).ok_or_else(|| Error::invalid(format!("fugacity {x} is not finite")))
            }
        }
    }
}

/// Approximates `Z_G(λ)` by `(1+λ)^n (Ξ^X(ℓ, λ) + Ξ^Y(ℓ, λ))` over small polymers.
pub fn count_hardcore_expander(
    g: &BipartiteGraph,
    hp: &HardCoreParams,
    epsilon: f64,
    opts: &ExpanderOptions,
) -> Result<ApproxCount> {
    let d = g.degree();
    let cond = hp.conditions(d);
    let spec = MixtureSpec {
        fam: PolymerFamily::small(Side::X),
        model: hp.model(),
        kp: Some(KpFunctions::weighted(hp.c5, hp.alpha, cond.beta)),
    };
    let lambda = hp.exact_lambda()?;
    let mut r = mixture_count(g, &spec, epsilon, opts, || Ok(exact_hardcore(g, &lambda)?.value))?;
    if r.method == super::Method::ExpanderCe {
        if !cond.hold() {
            r.certified = false;
            r.notes.push(format!(
                "uncertified: beta = {:.4} misses the expander hypotheses (container {}, alpha-beta {}); they need log2(1+lambda) >= {:.4}",
                cond.beta, cond.container_hypothesis, cond.alpha_beta, cond.log2_one_plus_lambda_min
            ));
        }
        if lambda.is_one() {
            r.notes
                .push("lambda = 1 with small polymers; the unweighted counter uses expanding polymers".to_string());
        }
    }
    Ok(r)
}

pub fn hardcore_sampler(
    g: &BipartiteGraph,
    hp: &HardCoreParams,
    epsilon: f64,
    opts: &SamplerOptions,
) -> Result<MixtureSampler> {
    MixtureSampler::new(g, &PolymerFamily::small(Side::X), &hp.model(), epsilon, opts)
}

/// One independent set approximately distributed as `μ_{G,λ}`.
pub fn sample_hardcore_expander(
    g: &BipartiteGraph,
    hp: &HardCoreParams,
    epsilon: f64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<PolymerSample> {
    hardcore_sampler(g, hp, epsilon, opts)?.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `β` rendered for reports: the exact fraction when available.
pub fn beta_display(hp: &HardCoreParams, d: usize) -> String {
    match hp.beta_exact(d) {
        Some(b) => b.to_string(),
        None => format!("{}", hp.beta(d)),
    }
}
