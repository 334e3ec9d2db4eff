use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

/// A positive symbol identifier.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct SymbolId(NonZeroU32);

impl SymbolId {
    pub fn new(id: u32) -> Option<Self> {
        NonZeroU32::new(id).map(SymbolId)
    }

    /// Id for the `rank`-th symbol (0-based), i.e. `rank + 1`.
    pub(crate) fn from_rank(rank: usize) -> Option<Self> {
        u32::try_from(rank + 1).ok().and_then(SymbolId::new)
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0.get()
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An input matrix entry.
///
/// Numbers compare by value, text compares lexicographically and sorts after
/// every number. Integral reals that fit an `i64` are stored as `Int`, so `5`
/// and `5.0` are the same token. Equality is otherwise exact: no tolerance.
#[derive(Clone)]
pub enum ValueToken {
    Int(i64),
    Real(f64),
    Text(String),
}

impl ValueToken {
    pub fn parse(s: &str) -> Self {
        let s = s.trim();
        if let Ok(i) = s.parse::<i64>() {
            return ValueToken::Int(i);
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => ValueToken::from_f64(x),
            _ => ValueToken::Text(s.to_string()),
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if !x.is_finite() {
            return ValueToken::Text(x.to_string());
        }
        if x.fract() == 0.0 && x >= i64::MIN as f64 && x < i64::MAX as f64 {
            return ValueToken::Int(x as i64);
        }
        ValueToken::Real(x)
    }

    fn kind_rank(&self) -> u8 {
        match self {
            ValueToken::Int(_) | ValueToken::Real(_) => 0,
            ValueToken::Text(_) => 1,
        }
    }
}

impl From<i64> for ValueToken {
    fn from(v: i64) -> Self {
        ValueToken::Int(v)
    }
}

impl From<f64> for ValueToken {
    fn from(v: f64) -> Self {
        ValueToken::from_f64(v)
    }
}

impl From<&str> for ValueToken {
    fn from(v: &str) -> Self {
        ValueToken::Text(v.to_string())
    }
}

impl Ord for ValueToken {
    fn cmp(&self, other: &Self) -> Ordering {
        use ValueToken::*;
        match (self, other) {
            (Int(a), Int(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Int(a), Real(b)) => (*a as f64).total_cmp(b).then(Ordering::Less),
            (Real(a), Int(b)) => a.total_cmp(&(*b as f64)).then(Ordering::Greater),
            (Text(a), Text(b)) => a.cmp(b),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for ValueToken {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ValueToken {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ValueToken {}

impl Hash for ValueToken {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            ValueToken::Int(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            ValueToken::Real(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
            ValueToken::Text(s) => {
                2u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl fmt::Display for ValueToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueToken::Int(i) => write!(f, "{i}"),
            ValueToken::Real(x) => write!(f, "{x:?}"),
            ValueToken::Text(s) => f.write_str(s),
        }
    }
}

impl fmt::Debug for ValueToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueToken::Text(s) => write!(f, "{s:?}"),
            other => write!(f, "{other}"),
        }
    }
}

impl Serialize for ValueToken {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ValueToken::Int(i) => s.serialize_i64(*i),
            ValueToken::Real(x) => s.serialize_f64(*x),
            ValueToken::Text(t) => s.serialize_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for ValueToken {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Real(f64),
            Text(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(i) => ValueToken::Int(i),
            Raw::Real(x) => ValueToken::from_f64(x),
            Raw::Text(t) => ValueToken::Text(t),
        })
    }
}
