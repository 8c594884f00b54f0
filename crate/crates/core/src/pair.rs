use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automaton::ActionKind::{self, Exclude, Include};
use crate::error::Error;

/// Joint action of the one-bit team: `TA_1` on `x`, `TA_2` on `¬x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActionPair {
    pub ta1: ActionKind,
    pub ta2: ActionKind,
}

impl ActionPair {
    pub const EE: Self = Self::new(Exclude, Exclude);
    /// The IDENTITY clause `x`.
    pub const IE: Self = Self::new(Include, Exclude);
    /// The NOT clause `¬x`.
    pub const EI: Self = Self::new(Exclude, Include);
    pub const II: Self = Self::new(Include, Include);

    /// Canonical order used in reports and CSV columns.
    pub const ALL: [Self; 4] = [Self::EE, Self::IE, Self::EI, Self::II];

    pub const fn new(ta1: ActionKind, ta2: ActionKind) -> Self {
        Self { ta1, ta2 }
    }

    pub fn index(&self) -> usize {
        match (self.ta1, self.ta2) {
            (Exclude, Exclude) => 0,
            (Include, Exclude) => 1,
            (Exclude, Include) => 2,
            (Include, Include) => 3,
        }
    }

    /// Two-letter code, e.g. `IE`.
    pub fn code(&self) -> String {
        format!("{}{}", self.ta1.letter(), self.ta2.letter())
    }
}

impl PartialOrd for ActionPair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ActionPair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for ActionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.ta1.letter(), self.ta2.letter())
    }
}

impl FromStr for ActionPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: String = s.chars().filter(|c| c.is_ascii_alphabetic()).collect();
        Self::ALL
            .into_iter()
            .find(|p| p.code() == letters.to_ascii_uppercase())
            .ok_or_else(|| Error::invalid(format!("unknown action pair {s:?}")))
    }
}

impl Serialize for ActionPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for ActionPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
