//! Site and transient space weights.
//!
//! File format: `{"default_site_weight": "1", "transient": [{"mod": 3, "residue": 1, "weight": "1/2"}]}`.
//! Rationals are `"p/q"` strings; plain JSON integers are accepted too.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientRule {
    #[serde(rename = "mod")]
    pub modulus: usize,
    pub residue: usize,
    #[serde(with = "ratio_str")]
    pub weight: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct WeightProfile {
    #[serde(with = "ratio_str")]
    pub default_site_weight: Rational64,
    pub transient: Vec<TransientRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(with = "ratio_str", default = "Rational64::one")]
    default_site_weight: Rational64,
    #[serde(default)]
    transient: Vec<TransientRule>,
}

impl TryFrom<RawProfile> for WeightProfile {
    type Error = String;

    fn try_from(raw: RawProfile) -> Result<Self, String> {
        if raw.default_site_weight < Rational64::zero() {
            return Err("default_site_weight must be non-negative".into());
        }
        for r in &raw.transient {
            if r.modulus == 0 {
                return Err("transient rule with mod 0".into());
            }
            if r.residue >= r.modulus {
                return Err(format!("residue {} not below mod {}", r.residue, r.modulus));
            }
            if r.weight < Rational64::zero() {
                return Err("transient weight must be non-negative".into());
            }
        }
        Ok(WeightProfile { default_site_weight: raw.default_site_weight, transient: raw.transient })
    }
}

impl Default for WeightProfile {
    fn default() -> Self {
        Self::unit()
    }
}

impl WeightProfile {
    /// Every site weighs 1, no transient cost.
    pub fn unit() -> Self {
        WeightProfile { default_site_weight: Rational64::one(), transient: Vec::new() }
    }

    /// Unit sites plus `tau` on every index `i ≡ 1 (mod w+1)`.
    pub fn factoring(window: usize, tau: Rational64) -> Self {
        WeightProfile {
            default_site_weight: Rational64::one(),
            transient: vec![TransientRule { modulus: window + 1, residue: 1 % (window + 1), weight: tau }],
        }
    }

    pub fn site_weight(&self, _i: usize) -> Rational64 {
        self.default_site_weight
    }

    /// Sum of all matching transient rules.
    pub fn transient_weight(&self, i: usize) -> Rational64 {
        self.transient
            .iter()
            .filter(|r| i % r.modulus == r.residue)
            .fold(Rational64::zero(), |acc, r| acc + r.weight)
    }

    pub fn is_unit(&self) -> bool {
        self.default_site_weight.is_one() && self.transient.iter().all(|r| r.weight.is_zero())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weight profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, crate::format::ParseError> {
        serde_json::from_str(text).map_err(crate::format::ParseError::from)
    }
}

/// Weights multiplied through by the lcm of all denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledWeights {
    pub scale: i64,
    pub site: i64,
    rules: Vec<(usize, usize, i64)>,
}

impl ScaledWeights {
    /// Also folds `extra` (typically a space cap) into the common scale.
    pub fn new(profile: &WeightProfile, extra: &[Rational64]) -> Self {
        let mut scale = *profile.default_site_weight.denom();
        for r in &profile.transient {
            scale = num_integer::lcm(scale, *r.weight.denom());
        }
        for x in extra {
            scale = num_integer::lcm(scale, *x.denom());
        }
        let lift = |x: Rational64| (x * scale).to_integer();
        ScaledWeights {
            scale,
            site: lift(profile.default_site_weight),
            rules: profile.transient.iter().map(|r| (r.modulus, r.residue, lift(r.weight))).collect(),
        }
    }

    pub fn lift(&self, x: Rational64) -> i64 {
        (x * self.scale).to_integer()
    }

    pub fn transient(&self, i: usize) -> i64 {
        self.rules.iter().filter(|&&(m, r, _)| i % m == r).map(|&(_, _, w)| w).sum()
    }

    pub fn unscale(&self, x: i64) -> Rational64 {
        Rational64::new(x, self.scale)
    }
}

/// Serde helpers that write a ratio as `"p/q"` (or `"p"`).
pub mod ratio_str {
    use num_rational::Rational64;
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        d.deserialize_any(RatioVisitor)
    }

    struct RatioVisitor;

    impl<'de> Visitor<'de> for RatioVisitor {
        type Value = Rational64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational as \"p/q\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational64, E> {
            let v = v.trim();
            let parsed = match v.split_once('/') {
                Some((p, q)) => {
                    let p: i64 = p.trim().parse().map_err(E::custom)?;
                    let q: i64 = q.trim().parse().map_err(E::custom)?;
                    if q == 0 {
                        return Err(E::custom("zero denominator"));
                    }
                    Rational64::new(p, q)
                }
                None => Rational64::from_integer(v.parse().map_err(E::custom)?),
            };
            Ok(parsed)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational64, E> {
            Ok(Rational64::from_integer(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational64, E> {
            i64::try_from(v).map(Rational64::from_integer).map_err(E::custom)
        }
    }
}
