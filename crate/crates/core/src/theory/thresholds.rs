//! Closed-form bounds on the granularity `s` (and on the input bias `c`) that
//! decide which action pair the one-bit team settles into.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::OneBitEnv;
use crate::error::{check_granularity, check_probability, Error, Result};
use crate::pair::ActionPair;

/// Open-interval membership slack.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    #[serde(with = "crate::float")]
    pub s1: f64,
    #[serde(with = "crate::float")]
    pub s2: f64,
    #[serde(with = "crate::float")]
    pub s3: f64,
    #[serde(with = "crate::float")]
    pub s4: f64,
    #[serde(with = "crate::float")]
    pub s5: f64,
    #[serde(with = "crate::float")]
    pub s6: f64,
}

fn ratio(name: &'static str, num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        if num == 0.0 {
            Err(Error::UndefinedThreshold { name })
        } else {
            Ok(f64::INFINITY)
        }
    } else {
        Ok(num / den)
    }
}

impl ThresholdSet {
    /// Every threshold shares the numerator `P(y = 1) = ac + b(1-c)`.
    pub fn compute(env: &OneBitEnv) -> Result<Self> {
        let OneBitEnv { a, b, c } = *env;
        let ones = a * c + b * (1.0 - c);
        let true_pos = a * c;
        let false_pos_x0 = b * (1.0 - c);
        let true_neg_x0 = (1.0 - b) * (1.0 - c);
        let false_neg_x1 = (1.0 - a) * c;
        Ok(Self {
            s1: ratio("s1", ones, true_pos + true_neg_x0)?,
            s2: ratio("s2", ones, true_pos)?,
            s3: ratio("s3", ones, true_neg_x0)?,
            s4: ratio("s4", ones, false_pos_x0 + false_neg_x1)?,
            s5: ratio("s5", ones, false_pos_x0)?,
            s6: ratio("s6", ones, false_neg_x1)?,
        })
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.s1, self.s2, self.s3, self.s4, self.s5, self.s6]
    }
}

impl fmt::Display for ThresholdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.as_array().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "s{}={}", i + 1, v)?;
        }
        Ok(())
    }
}

pub fn thresholds(env: &OneBitEnv) -> Result<ThresholdSet> {
    ThresholdSet::compute(env)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CThresholds {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl CThresholds {
    pub fn compute(a: f64, b: f64) -> Result<Self> {
        check_probability("a", a)?;
        check_probability("b", b)?;
        let finite = |name, num: f64, den: f64| {
            if den == 0.0 {
                Err(Error::UndefinedThreshold { name })
            } else {
                Ok(num / den)
            }
        };
        Ok(Self {
            c1: finite("c1", 1.0 - b, a + 1.0 - b)?,
            c2: finite("c2", b, a + b)?,
            c3: finite("c3", 1.0 - b, 2.0 - a - b)?,
            c4: finite("c4", b, 1.0 - a + b)?,
        })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }
}

impl fmt::Display for CThresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c1={} c2={} c3={} c4={}", self.c1, self.c2, self.c3, self.c4)
    }
}

pub fn c_thresholds(a: f64, b: f64) -> Result<CThresholds> {
    CThresholds::compute(a, b)
}

/// Action pairs the team can be absorbed into at a given `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RegionPrediction {
    /// Non-empty, sorted in [`ActionPair::ALL`] order.
    Outcomes(Vec<ActionPair>),
    NoConvergence,
}

impl RegionPrediction {
    pub fn outcomes(&self) -> &[ActionPair] {
        match self {
            RegionPrediction::Outcomes(v) => v,
            RegionPrediction::NoConvergence => &[],
        }
    }

    pub fn contains(&self, pair: ActionPair) -> bool {
        self.outcomes().contains(&pair)
    }

    pub fn is_single(&self) -> bool {
        self.outcomes().len() == 1
    }

    /// Compact code for tables: `IE`, `IE+EI` or `none`.
    pub fn code(&self) -> String {
        match self {
            RegionPrediction::NoConvergence => "none".to_owned(),
            RegionPrediction::Outcomes(v) => v.iter().map(ActionPair::code).collect::<Vec<_>>().join("+"),
        }
    }

    fn from_codes(code: &str) -> Result<Self> {
        if code == "none" {
            return Ok(RegionPrediction::NoConvergence);
        }
        let mut pairs = code.split('+').map(str::parse).collect::<Result<Vec<ActionPair>>>()?;
        pairs.sort();
        pairs.dedup();
        Ok(RegionPrediction::Outcomes(pairs))
    }
}

impl fmt::Display for RegionPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionPrediction::NoConvergence => f.write_str("no-convergence"),
            RegionPrediction::Outcomes(v) if v.len() == 1 => write!(f, "{}", v[0]),
            RegionPrediction::Outcomes(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

impl Serialize for RegionPrediction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for RegionPrediction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RegionPrediction::from_codes(&s).map_err(serde::de::Error::custom)
    }
}

#[inline]
fn inside(s: f64, lo: f64, hi: f64) -> bool {
    s > lo + BOUNDARY_TOLERANCE && s < hi - BOUNDARY_TOLERANCE
}

/// Union of `{(E,E)}` if `1 < s < min(s1, s4)`, `{(I,E)}` if `s2 < s < s6`
/// and `{(E,I)}` if `s5 < s < s3`. Undefined (0/0) thresholds leave their
/// interval empty.
pub fn predict_regions(env: &OneBitEnv, s: f64) -> Result<RegionPrediction> {
    check_granularity(s)?;
    let t = lenient_thresholds(env);
    let mut outcomes = Vec::new();
    if inside(s, 1.0, t.s1.min(t.s4)) && !t.s1.is_nan() && !t.s4.is_nan() {
        outcomes.push(ActionPair::EE);
    }
    if inside(s, t.s2, t.s6) {
        outcomes.push(ActionPair::IE);
    }
    if inside(s, t.s5, t.s3) {
        outcomes.push(ActionPair::EI);
    }
    Ok(if outcomes.is_empty() {
        RegionPrediction::NoConvergence
    } else {
        RegionPrediction::Outcomes(outcomes)
    })
}

/// Like [`ThresholdSet::compute`] but maps 0/0 to NaN, which fails every
/// interval test.
fn lenient_thresholds(env: &OneBitEnv) -> ThresholdSet {
    let OneBitEnv { a, b, c } = *env;
    let ones = a * c + b * (1.0 - c);
    let r = |den: f64| ratio("", ones, den).unwrap_or(f64::NAN);
    ThresholdSet {
        s1: r(a * c + (1.0 - b) * (1.0 - c)),
        s2: r(a * c),
        s3: r((1.0 - b) * (1.0 - c)),
        s4: r(b * (1.0 - c) + (1.0 - a) * c),
        s5: r(b * (1.0 - c)),
        s6: r((1.0 - a) * c),
    }
}
