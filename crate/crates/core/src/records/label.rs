//! Curve labels `C^{A,B}_{N}` and `C^{A}_{N,A_{e}}` with an optional flex
//! marker prefix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlexMarker {
    #[default]
    None,
    /// Printed as `♦`.
    Flex,
    /// Printed as `★`.
    Hyperflex,
}

impl FlexMarker {
    pub fn symbol(self) -> &'static str {
        match self {
            FlexMarker::None => "",
            FlexMarker::Flex => "♦",
            FlexMarker::Hyperflex => "★",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveLabel {
    pub marker: FlexMarker,
    pub level: u64,
    /// Isogeny-class letters of the factors, as written in the superscript.
    pub letters: Vec<String>,
    /// Nebentypus annotation such as `A_{0,6}`, when present.
    pub character: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed curve label {0:?}")]
pub struct CurveLabelError(pub String);

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}C^{{{}}}_{{{}", self.marker.symbol(), self.letters.join(","), self.level)?;
        if let Some(c) = &self.character {
            write!(f, ",{c}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for CurveLabel {
    type Err = CurveLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CurveLabelError(s.to_string());
        let (marker, rest) = if let Some(r) = s.strip_prefix('♦') {
            (FlexMarker::Flex, r)
        } else if let Some(r) = s.strip_prefix('★') {
            (FlexMarker::Hyperflex, r)
        } else {
            (FlexMarker::None, s)
        };
        let rest = rest.trim_start().strip_prefix("C^{").ok_or_else(err)?;
        let (sup, rest) = rest.split_once('}').ok_or_else(err)?;
        let letters: Vec<String> = sup.split(',').map(|l| l.trim().to_string()).collect();
        if letters.iter().any(|l| l.is_empty() || !l.chars().all(|c| c.is_ascii_uppercase())) {
            return Err(err());
        }
        let sub = rest.strip_prefix("_{").and_then(|r| r.strip_suffix('}')).ok_or_else(err)?;
        let (level, character) = match sub.split_once(',') {
            Some((l, c)) => (l, Some(c.to_string())),
            None => (sub, None),
        };
        if !level.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let level: u64 = level.parse().map_err(|_| err())?;
        if level == 0 {
            return Err(err());
        }
        if let Some(c) = &character {
            let ok = c.split_once("_{").is_some_and(|(l, e)| {
                !l.is_empty()
                    && l.chars().all(|ch| ch.is_ascii_uppercase())
                    && e.strip_suffix('}').is_some_and(|e| {
                        !e.is_empty() && e.split(',').all(|x| !x.is_empty() && x.chars().all(|ch| ch.is_ascii_digit()))
                    })
            });
            if !ok {
                return Err(err());
            }
        }
        Ok(CurveLabel { marker, level, letters, character })
    }
}

impl Serialize for CurveLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CurveLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table_notation() {
        let l: CurveLabel = "★C^{A}_{39,A_{0,6}}".parse().unwrap();
        assert_eq!(l.marker, FlexMarker::Hyperflex);
        assert_eq!(l.level, 39);
        assert_eq!(l.letters, ["A"]);
        assert_eq!(l.character.as_deref(), Some("A_{0,6}"));
        let m: CurveLabel = "C^{A,B}_{43}".parse().unwrap();
        assert_eq!(m.letters, ["A", "B"]);
        assert_eq!(m.character, None);
    }

    #[test]
    fn round_trip() {
        for s in ["♦C^{E}_{243}", "C^{A,B,C}_{57}", "★C^{A}_{39,A_{0,6}}", "C^{AL}_{1215}"] {
            assert_eq!(s.parse::<CurveLabel>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in ["C^{}_{43}", "C^{A}_{}", "C^{a}_{43}", "C^{A}_{43,A_{}}", "X^{A}_{43}", "C^{A}_{0}"] {
            assert!(s.parse::<CurveLabel>().is_err(), "{s}");
        }
    }
}
