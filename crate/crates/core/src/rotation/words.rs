use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter of the alphabet `{0, …, d} ∪ {0̲, …, d̲}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub value: u32,
    pub underlined: bool,
}

impl Symbol {
    pub fn plain(value: u32) -> Self {
        Symbol { value, underlined: false }
    }

    pub fn under(value: u32) -> Self {
        Symbol { value, underlined: true }
    }
}

/// Written as the digit, with a leading `_` when underlined.
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.underlined {
            write!(f, "_{}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (underlined, digits) = match s.strip_prefix('_') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let value = digits.parse().map_err(|_| Error::InvalidParameter(format!("bad symbol {s:?}")))?;
        Ok(Symbol { value, underlined })
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses a comma-separated word such as `_0,2,1`.
pub fn parse_word(s: &str) -> Result<Vec<Symbol>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordClass {
    pub admissible: bool,
    pub in_s: bool,
    pub in_s0: bool,
    pub in_s2: bool,
}

fn admissible(d: u32, w: &[Symbol]) -> bool {
    // (a) last symbol plain
    if w.last().map_or(false, |s| s.underlined) {
        return false;
    }
    w.windows(2).all(|pair| {
        let (x, y) = (pair[0], pair[1]);
        if x.underlined {
            // (b) underlined letters are followed by d
            y == Symbol::plain(d)
        } else {
            // (c) plain letters are not followed by d
            y.value != d
        }
    })
}

/// Admissibility and membership in `S = {d, 0̲, d̲}*`, `S⁰ = {0̲, d}*` and
/// `S² = {d̲, d}*`.
pub fn word_classify(d: u32, w: &[Symbol]) -> Result<WordClass> {
    if let Some(s) = w.iter().find(|s| s.value > d) {
        return Err(Error::SymbolOutOfRange { value: s.value, d });
    }
    if !admissible(d, w) {
        return Ok(WordClass { admissible: false, in_s: false, in_s0: false, in_s2: false });
    }
    let all = |f: &dyn Fn(&Symbol) -> bool| w.iter().all(f);
    let top = Symbol::plain(d);
    Ok(WordClass {
        admissible: true,
        in_s: all(&|s| *s == top || *s == Symbol::under(0) || *s == Symbol::under(d)),
        in_s0: all(&|s| *s == Symbol::under(0) || *s == top),
        in_s2: all(&|s| *s == Symbol::under(d) || *s == top),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleWord {
    d: u32,
    symbols: Vec<Symbol>,
}

impl AdmissibleWord {
    pub fn new(d: u32, symbols: Vec<Symbol>) -> Result<Self> {
        if !word_classify(d, &symbols)?.admissible {
            return Err(Error::NotAdmissible);
        }
        Ok(AdmissibleWord { d, symbols })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// All admissible words of length `k` over the alphabet for `d`.
    pub fn enumerate(d: u32, k: usize) -> Vec<AdmissibleWord> {
        let letters: Vec<Symbol> = (0..=d).map(Symbol::plain).chain((0..=d).map(Symbol::under)).collect();
        let mut words: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..k {
            words = words
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&s| {
                        let mut v = w.clone();
                        v.push(s);
                        v
                    })
                })
                .collect();
        }
        words
            .into_iter()
            .filter(|w| admissible(d, w))
            .map(|symbols| AdmissibleWord { d, symbols })
            .collect()
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(Symbol::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Drops the first letter.
pub fn word_shift(w: &AdmissibleWord) -> Result<AdmissibleWord> {
    if w.len() <= 1 {
        return Err(Error::LengthTooShort);
    }
    AdmissibleWord::new(w.d, w.symbols[1..].to_vec())
}
