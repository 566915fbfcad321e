//! Derivative words: compositions of the momentum derivative `𝒟 = (M p)·∇`
//! and the gradient derivative `D̄ = (M ∇V)·∇` applied to the potential.
//!
//! Letters are stored left to right in operator order, so the leftmost letter
//! is applied last: `[Dg, Dp, Dp]` is `D̄(𝒟(𝒟V))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::config::Order;
use crate::error::{Error, Result};
use crate::schemes::coefficients;

/// Longest word any supported scheme order needs.
pub const MAX_WORD_LEN: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// Directional derivative along the raised momentum `M p`.
    Dp,
    /// Directional derivative along the raised gradient `M ∇V(q)`.
    Dg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Special {
    None,
    /// `D̄₃V = ∇³V[M∇V, M∇V, M∇V]`, the gradient field frozen at the point.
    Dbar3,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    special: Special,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        if letters.len() > MAX_WORD_LEN {
            return Err(Error::InvalidWord(format!(
                "length {} exceeds {MAX_WORD_LEN}",
                letters.len()
            )));
        }
        Ok(Self {
            letters,
            special: Special::None,
        })
    }

    pub fn dbar3() -> Self {
        Self {
            letters: Vec::new(),
            special: Special::Dbar3,
        }
    }

    /// `𝒟ⁿ`.
    pub fn dp_power(n: usize) -> Result<Self> {
        Self::new(vec![Letter::Dp; n])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn special(&self) -> Special {
        self.special
    }

    pub fn is_dbar3(&self) -> bool {
        self.special == Special::Dbar3
    }

    /// Number of derivatives taken of `V`.
    pub fn len(&self) -> usize {
        match self.special {
            Special::None => self.letters.len(),
            Special::Dbar3 => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Degree of homogeneity in `p`.
    pub fn momentum_degree(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::Dp).count()
    }

    pub fn gradient_count(&self) -> usize {
        match self.special {
            Special::None => self.letters.iter().filter(|&&l| l == Letter::Dg).count(),
            Special::Dbar3 => 3,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.special == Special::Dbar3 {
            return f.write_str("Dbar3");
        }
        for l in &self.letters {
            f.write_str(match l {
                Letter::Dp => "Dp",
                Letter::Dg => "Dg",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "Dbar3" {
            return Ok(Self::dbar3());
        }
        let mut letters = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let (l, tail) = if let Some(t) = rest.strip_prefix("Dp") {
                (Letter::Dp, t)
            } else if let Some(t) = rest.strip_prefix("Dg") {
                (Letter::Dg, t)
            } else {
                return Err(Error::InvalidWord(s.to_string()));
            };
            letters.push(l);
            rest = tail;
        }
        Self::new(letters)
    }
}

/// Words whose values or gradients the kick and move steps of `order` consume.
pub fn required_words(order: Order) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for (_, terms) in coefficients::potential_corrections(order) {
        out.extend(terms.iter().map(|(w, _)| w.clone()));
    }
    for (_, terms) in coefficients::generating_terms(order) {
        out.extend(terms.iter().map(|(w, _)| w.clone()));
    }
    out
}

/// Convenience for [`required_words`] from a raw integer order.
pub fn required_words_for(order: u32) -> Result<BTreeSet<Word>> {
    Ok(required_words(Order::try_from(order)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["Dp", "DgDpDp", "DpDgDpDgDp", "Dbar3"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert!("Dx".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
        assert!("DpDpDpDpDpDpDpDp".parse::<Word>().is_err());
    }

    #[test]
    fn order_two_needs_nothing() {
        assert!(required_words(Order::Two).is_empty());
    }

    #[test]
    fn order_four_words() {
        let got = required_words(Order::Four);
        let want: BTreeSet<Word> = ["DpDp", "DpDpDp", "Dg"].iter().map(|s| w(s)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn word_sets_are_nested() {
        let w4 = required_words(Order::Four);
        let w6 = required_words(Order::Six);
        let w8 = required_words(Order::Eight);
        assert!(w4.is_subset(&w6));
        assert!(w6.is_subset(&w8));
        assert!(w8.contains(&w("DpDpDpDpDpDpDp")));
        assert!(w8.contains(&Word::dbar3()));
        assert!(w8.iter().all(|x| x.len() <= MAX_WORD_LEN));
    }

    #[test]
    fn unsupported_order() {
        assert_eq!(required_words_for(3), Err(Error::UnsupportedOrder(3)));
    }

    #[test]
    fn degrees() {
        assert_eq!(w("DgDpDgDp").momentum_degree(), 2);
        assert_eq!(w("DgDpDgDp").gradient_count(), 2);
        assert_eq!(Word::dbar3().len(), 3);
    }
}
