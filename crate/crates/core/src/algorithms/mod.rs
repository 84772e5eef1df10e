//! Counting and sampling algorithms built on the polymer machinery.

pub mod expander;
pub mod general;
pub mod hardcore;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::expansion::KpStatus;
use crate::graph::BipartiteGraph;
use crate::polymer::PolymerFamily;

/// How an approximate count was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "expander-CE")]
    ExpanderCe,
    #[serde(rename = "general")]
    General,
    #[serde(rename = "oracle")]
    Oracle,
}

/// The two truncated side partition functions behind a mixture estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideBreakdown {
    pub ln_xi_x: f64,
    pub ln_xi_y: f64,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxCount {
    /// Natural log of the estimate.
    pub log_value: f64,
    /// Relative error `ε` with `1 - ε <= truth / estimate <= 1 + ε`; zero for exact methods.
    pub rel_error_bound: f64,
    pub method: Method,
    pub side_breakdown: Option<SideBreakdown>,
    /// Whether `rel_error_bound` is backed by the hypotheses it relies on.
    pub certified: bool,
    pub kp_status: Option<KpStatus>,
    /// The count itself, when it was computed exactly.
    #[serde(skip)]
    pub exact: Option<BigRational>,
    pub notes: Vec<String>,
}

impl ApproxCount {
    pub(crate) fn exact(value: BigRational, method: Method) -> Self {
        ApproxCount {
            log_value: crate::expansion::ln_rational(&value),
            rel_error_bound: 0.0,
            method,
            side_breakdown: None,
            certified: true,
            kp_status: None,
            exact: Some(value),
            notes: Vec::new(),
        }
    }

    /// The estimate as a float (infinite when it overflows).
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `2^{-n log²d / (60 d)}`: the overlap term of the two-sided mixture.
pub fn epsilon_zero(n: usize, d: usize) -> f64 {
    if d < 2 {
        return 1.0;
    }
    let l = (d as f64).log2();
    (-(n as f64) * l * l / (60.0 * d as f64)).exp2()
}

/// Combines a per-side log truncation error `t` with the mixture overlap `eps0`: with
/// `truth ∈ [(1 - eps0) S, S]` and `estimate / S ∈ [e^{-t}, e^t]`, the ratio
/// `truth / estimate` lies in `[e^{-t}(1 - eps0), e^t]`.
pub fn combine_error(t: f64, eps0: f64) -> f64 {
    let upper = t.exp_m1();
    let lower = 1.0 - (-t).exp() * (1.0 - eps0);
    upper.max(lower)
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Whether every 2-linked component of `set` (on the family's side) is a family member.
pub fn in_polymer_side(g: &BipartiteGraph, fam: &PolymerFamily, set: &BitSet) -> bool {
    crate::connected::components(g.square(fam.side), set)
        .iter()
        .all(|c| fam.admits(g, c))
}
