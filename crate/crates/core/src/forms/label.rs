//! Newform labels such as `97A`, `49A_{14}` or `120A_{0,0,0,2}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::character::{CharacterError, DirichletCharacterCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("malformed label {0:?}")]
    Syntax(String),
    #[error("label {label}: {source}")]
    Character {
        label: String,
        #[source]
        source: CharacterError,
    },
}

/// Level, isogeny letter and Nebentypus code of a newform orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EigenformLabel {
    pub letter: String,
    pub character: DirichletCharacterCode,
}

impl EigenformLabel {
    pub fn new(level: u64, letter: &str, character: DirichletCharacterCode) -> Self {
        assert_eq!(level, character.level());
        EigenformLabel { letter: letter.to_string(), character }
    }

    pub fn level(&self) -> u64 {
        self.character.level()
    }
}

impl fmt::Display for EigenformLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.level(), self.letter)?;
        if !self.character.is_trivial() {
            let flat: Vec<String> = self.character.flat().iter().map(|e| e.to_string()).collect();
            write!(f, "_{{{}}}", flat.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for EigenformLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, LabelError> {
        let bad = || LabelError::Syntax(s.to_string());
        let digits = s.find(|c: char| !c.is_ascii_digit()).ok_or_else(bad)?;
        let level: u64 = s[..digits].parse().map_err(|_| bad())?;
        if level == 0 {
            return Err(bad());
        }
        let rest = &s[digits..];
        let letters = rest.find(|c: char| !c.is_ascii_uppercase()).unwrap_or(rest.len());
        if letters == 0 {
            return Err(bad());
        }
        let letter = &rest[..letters];
        let tail = &rest[letters..];
        let flat: Vec<u64> = if tail.is_empty() {
            vec![]
        } else {
            let inner = tail.strip_prefix("_{").and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
            inner.split(',').map(|e| e.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let character = if flat.is_empty() {
            DirichletCharacterCode::trivial(level)
        } else {
            DirichletCharacterCode::from_flat(level, &flat)
                .map_err(|source| LabelError::Character { label: s.to_string(), source })?
        };
        Ok(EigenformLabel { letter: letter.to_string(), character })
    }
}

impl Serialize for EigenformLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EigenformLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        for s in ["97A", "49A_{14}", "120A_{0,0,0,2}", "30A_{0,2}", "1215AL", "24A_{1,1,1}"] {
            let l: EigenformLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        let l: EigenformLabel = "120A_{0,0,0,2}".parse().unwrap();
        assert_eq!(l.level(), 120);
        assert_eq!(l.character.flat(), vec![0, 0, 0, 2]);
    }

    #[test]
    fn explicit_trivial_code_formats_without_subscript() {
        let l: EigenformLabel = "30A_{0,0}".parse().unwrap();
        assert_eq!(l.to_string(), "30A");
    }

    #[test]
    fn rejects_malformed_labels() {
        for s in ["A", "49", "49a", "49A_14", "49A_{x}", "0A", "49A_{42}"] {
            assert!(s.parse::<EigenformLabel>().is_err(), "{s}");
        }
    }
}
