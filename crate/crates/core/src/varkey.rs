//! Stable names for the columns of extended relaxations.
//!
//! Indices are stored 0-based and rendered 1-based, e.g. `VarKey::V(Group::Cover(2), 6)`
//! prints as `v[T3,y7]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A disjunction owner: a group of a cover partition or an edge of the conflict graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Cover(usize),
    Edge(usize),
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Cover(t) => write!(f, "T{}", t + 1),
            Group::Edge(e) => write!(f, "E{}", e + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    X(usize),
    Y(usize),
    /// Binary indicator of the big-M reformulation.
    Z(usize),
    Q(Group),
    QBar(Group),
    U(Group, usize),
    UBar(Group, usize),
    V(Group, usize),
    VBar(Group, usize),
}

impl VarKey {
    pub fn group(&self) -> Option<Group> {
        match *self {
            VarKey::X(_) | VarKey::Y(_) | VarKey::Z(_) => None,
            VarKey::Q(g) | VarKey::QBar(g) => Some(g),
            VarKey::U(g, _) | VarKey::UBar(g, _) | VarKey::V(g, _) | VarKey::VBar(g, _) => Some(g),
        }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKey::X(i) => write!(f, "x[{}]", i + 1),
            VarKey::Y(i) => write!(f, "y[{}]", i + 1),
            VarKey::Z(i) => write!(f, "z[{}]", i + 1),
            VarKey::Q(g) => write!(f, "q[{g}]"),
            VarKey::QBar(g) => write!(f, "qbar[{g}]"),
            VarKey::U(g, i) => write!(f, "u[{g},x{}]", i + 1),
            VarKey::UBar(g, i) => write!(f, "ubar[{g},x{}]", i + 1),
            VarKey::V(g, i) => write!(f, "v[{g},y{}]", i + 1),
            VarKey::VBar(g, i) => write!(f, "vbar[{g},y{}]", i + 1),
        }
    }
}

fn one_based(s: &str, whole: &str) -> Result<usize, Error> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k - 1),
        _ => Err(Error::UnknownVariable(whole.to_string())),
    }
}

fn parse_group(s: &str, whole: &str) -> Result<Group, Error> {
    if let Some(rest) = s.strip_prefix('T') {
        Ok(Group::Cover(one_based(rest, whole)?))
    } else if let Some(rest) = s.strip_prefix('E') {
        Ok(Group::Edge(one_based(rest, whole)?))
    } else {
        Err(Error::UnknownVariable(whole.to_string()))
    }
}

impl FromStr for VarKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::UnknownVariable(s.to_string());
        let open = s.find('[').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
        let head = &s[..open];
        match head {
            "x" => Ok(VarKey::X(one_based(inner, s)?)),
            "y" => Ok(VarKey::Y(one_based(inner, s)?)),
            "z" => Ok(VarKey::Z(one_based(inner, s)?)),
            "q" => Ok(VarKey::Q(parse_group(inner, s)?)),
            "qbar" => Ok(VarKey::QBar(parse_group(inner, s)?)),
            _ => {
                let (g, idx) = inner.split_once(',').ok_or_else(bad)?;
                let g = parse_group(g, s)?;
                let (prefix, ctor): (char, fn(Group, usize) -> VarKey) = match head {
                    "u" => ('x', VarKey::U),
                    "ubar" => ('x', VarKey::UBar),
                    "v" => ('y', VarKey::V),
                    "vbar" => ('y', VarKey::VBar),
                    _ => return Err(bad()),
                };
                let idx = idx.strip_prefix(prefix).ok_or_else(bad)?;
                Ok(ctor(g, one_based(idx, s)?))
            }
        }
    }
}

impl Serialize for VarKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_based() {
        assert_eq!(VarKey::V(Group::Cover(2), 6).to_string(), "v[T3,y7]");
        assert_eq!(VarKey::UBar(Group::Edge(0), 0).to_string(), "ubar[E1,x1]");
        assert_eq!(VarKey::QBar(Group::Cover(9)).to_string(), "qbar[T10]");
        assert_eq!(VarKey::X(6).to_string(), "x[7]");
    }

    #[test]
    fn parse_inverts_display() {
        let keys = [
            VarKey::X(0),
            VarKey::Y(11),
            VarKey::Z(3),
            VarKey::Q(Group::Edge(4)),
            VarKey::QBar(Group::Cover(0)),
            VarKey::U(Group::Cover(1), 2),
            VarKey::UBar(Group::Edge(7), 5),
            VarKey::V(Group::Cover(12), 40),
            VarKey::VBar(Group::Edge(2), 1),
        ];
        for k in keys {
            assert_eq!(k.to_string().parse::<VarKey>().unwrap(), k);
        }
        assert!("v[T0,y1]".parse::<VarKey>().is_err());
        assert!("v[T1,x1]".parse::<VarKey>().is_err());
        assert!("w[1]".parse::<VarKey>().is_err());
    }
}
