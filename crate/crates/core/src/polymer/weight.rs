use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fugacity `λ > 0`, exact when given as a fraction.
#[derive(Clone, PartialEq)]
pub enum Fugacity {
    Exact(BigRational),
    Float(f64),
}

impl Fugacity {
    pub fn exact(lambda: BigRational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::invalid(format!("fugacity must be positive, got {lambda}")));
        }
        Ok(Fugacity::Exact(lambda))
    }

    pub fn float(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("fugacity must be positive and finite, got {lambda}")));
        }
        Ok(Fugacity::Float(lambda))
    }

    /// Parses `p/q`, an integer, or a decimal such as `0.25` (decimals are read as exact fractions).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::invalid(format!("cannot read fugacity {text:?}"));
        let value = if let Some((p, q)) = text.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        } else if let Some((int, frac)) = text.split_once('.') {
            let digits = format!("{int}{frac}");
            let p: BigInt = digits.parse().map_err(|_| bad())?;
            BigRational::new(p, num_traits::pow(BigInt::from(10), frac.len()))
        } else {
            BigRational::from_integer(text.parse().map_err(|_| bad())?)
        };
        Fugacity::exact(value)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Fugacity::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Fugacity::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Fugacity::Exact(r) => Some(r),
            Fugacity::Float(_) => None,
        }
    }

    /// `λ / (1 + λ)`.
    pub fn occupation(&self) -> f64 {
        let l = self.to_f64();
        l / (1.0 + l)
    }
}

impl fmt::Debug for Fugacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Fugacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fugacity::Exact(r) => write!(f, "{r}"),
            Fugacity::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Fugacity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Fugacity::Exact(r) => s.serialize_str(&r.to_string()),
            Fugacity::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Fugacity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => Fugacity::parse(&t).map_err(serde::de::Error::custom),
            Raw::Number(x) => Fugacity::float(x).map_err(serde::de::Error::custom),
        }
    }
}

/// Polymer weights as a function of `|γ|` and `|N(γ)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum WeightModel {
    /// `2^{-|N(γ)|}`.
    Unweighted,
    /// `λ^{|γ|} (1 + λ)^{-|N(γ)|}`.
    HardCore { lambda: Fugacity },
    /// The base weight times `2^{kappa |γ|}`.
    Tilde { base: Box<WeightModel>, kappa: f64 },
}

impl WeightModel {
    pub fn hardcore(lambda: Fugacity) -> Self {
        WeightModel::HardCore { lambda }
    }

    /// The unweighted model inflated by `2^{|γ| log²d / d}`.
    pub fn unweighted_tilde(d: usize) -> Self {
        let l = (d as f64).log2();
        WeightModel::Tilde {
            base: Box::new(WeightModel::Unweighted),
            kappa: l * l / d as f64,
        }
    }

    /// The hard-core model inflated by `2^{c5 α β |γ| / 16}`.
    pub fn hardcore_tilde(lambda: Fugacity, c5: f64, alpha: f64, beta: f64) -> Self {
        WeightModel::Tilde {
            base: Box::new(WeightModel::HardCore { lambda }),
            kappa: c5 * alpha * beta / 16.0,
        }
    }

    /// Whether the model carries a fugacity (the tilde variant inherits from its base).
    pub fn is_weighted(&self) -> bool {
        match self {
            WeightModel::Unweighted => false,
            WeightModel::HardCore { .. } => true,
            WeightModel::Tilde { base, .. } => base.is_weighted(),
        }
    }

    /// `λ` of the underlying model (1 for the unweighted one).
    pub fn lambda(&self) -> f64 {
        match self {
            WeightModel::Unweighted => 1.0,
            WeightModel::HardCore { lambda } => lambda.to_f64(),
            WeightModel::Tilde { base, .. } => base.lambda(),
        }
    }

    /// `λ / (1 + λ)`: the probability that a free vertex on the other side is occupied.
    pub fn occupation(&self) -> f64 {
        let l = self.lambda();
        l / (1.0 + l)
    }

    pub fn ln_weight(&self, size: usize, boundary: usize) -> f64 {
        match self {
            WeightModel::Unweighted => -(boundary as f64) * std::f64::consts::LN_2,
            WeightModel::HardCore { lambda } => {
                let l = lambda.to_f64();
                size as f64 * l.ln() - boundary as f64 * l.ln_1p()
            }
            WeightModel::Tilde { base, kappa } => {
                base.ln_weight(size, boundary) + kappa * size as f64 * std::f64::consts::LN_2
            }
        }
    }

    pub fn weight(&self, size: usize, boundary: usize) -> f64 {
        self.ln_weight(size, boundary).exp()
    }

    /// The exact weight, available for rational fugacities and integral tilde exponents.
    pub fn exact_weight(&self, size: usize, boundary: usize) -> Option<BigRational> {
        match self {
            WeightModel::Unweighted => Some(BigRational::new(
                BigInt::one(),
                num_traits::pow(BigInt::from(2), boundary),
            )),
            WeightModel::HardCore { lambda } => {
                let l = lambda.as_exact()?;
                let denom = num_traits::pow(l + BigRational::one(), boundary);
                Some(num_traits::pow(l.clone(), size) / denom)
            }
            WeightModel::Tilde { base, kappa } => {
                let e = kappa * size as f64;
                if e.fract() != 0.0 || e.abs() > 4096.0 {
                    return None;
                }
                let factor = if e >= 0.0 {
                    BigRational::from_integer(num_traits::pow(BigInt::from(2), e as usize))
                } else {
                    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), (-e) as usize))
                };
                Some(base.exact_weight(size, boundary)? * factor)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn weight_examples() {
        let u = WeightModel::Unweighted;
        assert_eq!(u.exact_weight(1, 2), Some(q(1, 4)));
        assert!((u.weight(1, 2) - 0.25).abs() < 1e-15);
        let one = WeightModel::hardcore(Fugacity::exact(q(1, 1)).unwrap());
        for (s, b) in [(1, 2), (3, 5), (2, 7)] {
            assert_eq!(one.exact_weight(s, b), u.exact_weight(s, b));
            assert!((one.ln_weight(s, b) - u.ln_weight(s, b)).abs() < 1e-12);
        }
        let half = WeightModel::hardcore(Fugacity::exact(q(1, 2)).unwrap());
        assert_eq!(half.exact_weight(1, 2), Some(q(2, 9)));
        assert!((half.weight(1, 2) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_weights() {
        // d = 4: log²d / d = 1, so the inflation is exactly 2^{|γ|}
        let t = WeightModel::unweighted_tilde(4);
        assert_eq!(t.exact_weight(2, 6), Some(q(1, 16)));
        assert!((t.weight(2, 6) - 1.0 / 16.0).abs() < 1e-15);
        let t3 = WeightModel::unweighted_tilde(3);
        assert_eq!(t3.exact_weight(1, 3), None);
        assert!(t3.weight(1, 3) > WeightModel::Unweighted.weight(1, 3));
    }

    #[test]
    fn fugacity_parsing() {
        assert_eq!(Fugacity::parse("3/4").unwrap(), Fugacity::Exact(q(3, 4)));
        assert_eq!(Fugacity::parse("0.25").unwrap(), Fugacity::Exact(q(1, 4)));
        assert_eq!(Fugacity::parse("2").unwrap(), Fugacity::Exact(q(2, 1)));
        assert!(Fugacity::parse("-1").is_err());
        assert!(Fugacity::parse("1/0").is_err());
        assert!(Fugacity::parse("x").is_err());
        assert!(Fugacity::float(0.0).is_err());
        let json = serde_json::to_string(&WeightModel::hardcore(Fugacity::parse("1/2").unwrap())).unwrap();
        let back: WeightModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, WeightModel::hardcore(Fugacity::Exact(q(1, 2))));
    }
}
