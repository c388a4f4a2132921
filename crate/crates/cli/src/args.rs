//! Argument types shared by flags and config files.
//!
//! Each accepts the compact command-line spelling (`2,3,5`, `+1`, `1,2;2,3`)
//! and, in a config file, the structured TOML form as well.

use std::fmt;
use std::str::FromStr;

use euclidlab_core::{Sign, Subset};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Comma-separated numbers, or a TOML array.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<T>()
                    .map_err(|e| format!("bad list entry {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Serialize> Serialize for List<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de, T> Deserialize<'de> for List<T>
where
    T: Deserialize<'de> + FromStr,
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Many(Vec<T>),
            One(T),
            Text(String),
        }
        match Raw::<T>::deserialize(d)? {
            Raw::Many(v) => Ok(List(v)),
            Raw::One(v) => Ok(List(vec![v])),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `+1`, `-1` or `both`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignArg {
    One(Sign),
    Both,
}

impl SignArg {
    pub fn signs(self) -> Vec<Sign> {
        match self {
            SignArg::One(s) => vec![s],
            SignArg::Both => Sign::BOTH.to_vec(),
        }
    }

    /// The single sign, rejecting `both`.
    pub fn single(self, key: &str) -> Result<Sign, String> {
        match self {
            SignArg::One(s) => Ok(s),
            SignArg::Both => Err(format!("{key}: expected +1 or -1, not both")),
        }
    }
}

impl FromStr for SignArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "both" => Ok(SignArg::Both),
            "1" => Ok(SignArg::One(Sign::Plus)),
            other => other.parse().map(SignArg::One).map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for SignArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignArg::One(s) => s.fmt(f),
            SignArg::Both => f.write_str("both"),
        }
    }
}

impl Serialize for SignArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Sign::from_value(v)
                .map(SignArg::One)
                .map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Subsets separated by `;`, each a comma list of 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubsetList(pub Vec<Subset>);

impl FromStr for SubsetList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Subset>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(SubsetList)
    }
}

impl Serialize for SubsetList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsetList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Many(Vec<Subset>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Many(v) => Ok(SubsetList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `smallest`, or the largest prime to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolArg {
    Smallest,
    UpTo(u64),
}

impl FromStr for PoolArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "smallest" => Ok(PoolArg::Smallest),
            other => other
                .parse()
                .map(PoolArg::UpTo)
                .map_err(|_| format!("pool must be `smallest` or a prime bound, got {other:?}")),
        }
    }
}

impl Serialize for PoolArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PoolArg::Smallest => s.serialize_str("smallest"),
            PoolArg::UpTo(b) => s.serialize_u64(*b),
        }
    }
}

impl<'de> Deserialize<'de> for PoolArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bound(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Bound(b) => Ok(PoolArg::UpTo(b)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
