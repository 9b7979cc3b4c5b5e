//! Cantor normal forms below ω^ω.
//!
//! An ordinal is a sum `w^e1*c1 + ... + w^ek*ck` with strictly decreasing
//! natural exponents and positive coefficients; the empty sum is 0.
//! Exponent 0 terms are plain naturals. This is all the game engine
//! needs: game lengths, α-tags on generator keys, and values of monotone
//! maps all live below ω^ω.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("coefficient overflow in ordinal arithmetic")]
    Overflow,
    #[error("cannot parse ordinal from {0:?}")]
    Parse(String),
}

/// Ordinal below ω^ω in Cantor normal form.
///
/// Terms are (exponent, coefficient) pairs with exponents strictly
/// decreasing and coefficients ≥ 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    pub fn omega() -> Self {
        Ordinal {
            terms: vec![(1, 1)],
        }
    }

    /// Build from raw terms; validates the CNF invariants.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::Parse(format!("{terms:?}")));
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(OrdinalError::Parse(format!("{terms:?}")));
        }
        Ok(Ordinal { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.len() <= 1 && self.terms.first().is_none_or(|&(e, _)| e == 0)
    }

    /// The natural this ordinal denotes, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        if self.is_zero() {
            Some(0)
        } else if self.is_finite() {
            Some(self.terms[0].1)
        } else {
            None
        }
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    /// Successor ordinal.
    pub fn succ(&self) -> Result<Self, OrdinalError> {
        self.add(&Ordinal::nat(1))
    }

    pub fn compare(&self, other: &Ordinal) -> Ordering {
        let mut i = 0;
        loop {
            match (self.terms.get(i), other.terms.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(ea, ca)), Some(&(eb, cb))) => {
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    if ca != cb {
                        return ca.cmp(&cb);
                    }
                }
            }
            i += 1;
        }
    }

    /// Ordinal addition in CNF: left terms strictly below the right head
    /// are absorbed.
    pub fn add(&self, other: &Ordinal) -> Result<Self, OrdinalError> {
        let Some(&(head, head_coeff)) = other.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms: Vec<(u32, u64)> = Vec::new();
        for &(e, c) in &self.terms {
            if e > head {
                terms.push((e, c));
            } else if e == head {
                let merged = c.checked_add(head_coeff).ok_or(OrdinalError::Overflow)?;
                terms.push((e, merged));
                terms.extend(other.terms[1..].iter().copied());
                return Ok(Ordinal { terms });
            } else {
                break;
            }
        }
        terms.extend(other.terms.iter().copied());
        Ok(Ordinal { terms })
    }

    /// Maximum under the ordinal order; 0 on an empty set.
    pub fn sup<'a, I: IntoIterator<Item = &'a Ordinal>>(xs: I) -> Ordinal {
        let mut best = Ordinal::zero();
        for x in xs {
            if x.compare(&best) == Ordering::Greater {
                best = x.clone();
            }
        }
        best
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "w*{c}")?,
                _ => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || OrdinalError::Parse(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(bad());
            }
            let (e, c) = if let Some(rest) = part.strip_prefix("w^") {
                let (exp, coeff) = rest.split_once('*').ok_or_else(bad)?;
                (
                    exp.trim().parse::<u32>().map_err(|_| bad())?,
                    coeff.trim().parse::<u64>().map_err(|_| bad())?,
                )
            } else if let Some(rest) = part.strip_prefix("w*") {
                (1, rest.trim().parse::<u64>().map_err(|_| bad())?)
            } else {
                (0, part.parse::<u64>().map_err(|_| bad())?)
            };
            terms.push((e, c));
        }
        Ordinal::from_terms(terms).map_err(|_| bad())
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
