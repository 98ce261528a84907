//! Symbols and finite words over the bracket alphabet `{a1..am, b1..bm}`.
//!
//! Words serialize as concatenated `a<k>` / `b<k>` tokens with decimal,
//! 1-based type indices, so `a1a2b2b1` is the word α₁α₂β₂β₁ and the empty
//! string is the empty word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bracket {
    Open,
    Close,
}

/// One letter of the alphabet: an opener `a<k>` or a closer `b<k>`.
///
/// Ordering puts every opener before every closer, then sorts by type
/// index; this is the token order used by enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub bracket: Bracket,
    pub index: u32,
}

impl Symbol {
    pub const fn open(index: u32) -> Self {
        Symbol { bracket: Bracket::Open, index }
    }

    pub const fn close(index: u32) -> Self {
        Symbol { bracket: Bracket::Close, index }
    }

    #[inline]
    pub fn is_open(self) -> bool {
        self.bracket == Bracket::Open
    }

    #[inline]
    pub fn is_close(self) -> bool {
        self.bracket == Bracket::Close
    }

    /// The same type with the bracket direction flipped.
    pub fn dual(self) -> Self {
        match self.bracket {
            Bracket::Open => Symbol::close(self.index),
            Bracket::Close => Symbol::open(self.index),
        }
    }

    /// +1 for an opener, -1 for a closer.
    #[inline]
    pub fn step(self) -> i64 {
        if self.is_open() {
            1
        } else {
            -1
        }
    }

    /// All `2m` symbols in token order.
    pub fn alphabet(m: u32) -> Vec<Symbol> {
        (1..=m).map(Symbol::open).chain((1..=m).map(Symbol::close)).collect()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bracket {
            Bracket::Open => write!(f, "a{}", self.index),
            Bracket::Close => write!(f, "b{}", self.index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("malformed token at offset {offset}: expected `a<k>` or `b<k>`")]
    MalformedToken { offset: usize },
    #[error("type index 0 at offset {offset}; indices start at 1")]
    ZeroIndex { offset: usize },
    #[error("type index {index} at offset {offset} exceeds alphabet size {m}")]
    IndexOutOfRange { offset: usize, index: u32, m: u32 },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },
}

/// A finite word together with the alphabet size it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    m: u32,
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(m: u32, symbols: Vec<Symbol>) -> Result<Self, WordError> {
        if m == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        for (offset, s) in symbols.iter().enumerate() {
            if s.index == 0 {
                return Err(WordError::ZeroIndex { offset });
            }
            if s.index > m {
                return Err(WordError::IndexOutOfRange { offset, index: s.index, m });
            }
        }
        Ok(Word { m, symbols })
    }

    /// The empty word Λ.
    pub fn empty(m: u32) -> Self {
        assert!(m >= 1, "alphabet size must be at least 1");
        Word { m, symbols: Vec::new() }
    }

    /// Skips index validation; callers guarantee every index is in `1..=m`.
    pub(crate) fn from_trusted(m: u32, symbols: Vec<Symbol>) -> Self {
        debug_assert!(symbols.iter().all(|s| s.index >= 1 && s.index <= m));
        Word { m, symbols }
    }

    /// Parses the token format. Offsets in errors are byte offsets into `text`.
    pub fn parse(text: &str, m: u32) -> Result<Self, WordError> {
        if m == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        let bytes = text.as_bytes();
        let mut symbols = Vec::with_capacity(bytes.len() / 2);
        let mut pos = 0;
        while pos < bytes.len() {
            let offset = pos;
            let bracket = match bytes[pos] {
                b'a' => Bracket::Open,
                b'b' => Bracket::Close,
                _ => return Err(WordError::MalformedToken { offset }),
            };
            pos += 1;
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == digits_start {
                return Err(WordError::MalformedToken { offset });
            }
            let index: u32 = text[digits_start..pos]
                .parse()
                .map_err(|_| WordError::IndexOutOfRange { offset, index: u32::MAX, m })?;
            if index == 0 {
                return Err(WordError::ZeroIndex { offset });
            }
            if index > m {
                return Err(WordError::IndexOutOfRange { offset, index, m });
            }
            symbols.push(Symbol { bracket, index });
        }
        Ok(Word { m, symbols })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    /// `self · other`.
    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        if self.m != other.m {
            return Err(WordError::AlphabetMismatch { left: self.m, right: other.m });
        }
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Ok(Word { m: self.m, symbols })
    }

    /// Concatenation of several words sharing one alphabet.
    pub fn join(parts: &[&Word]) -> Result<Word, WordError> {
        let m = parts.first().map(|w| w.m).unwrap_or(1);
        let mut symbols = Vec::with_capacity(parts.iter().map(|w| w.len()).sum());
        for w in parts {
            if w.m != m {
                return Err(WordError::AlphabetMismatch { left: m, right: w.m });
            }
            symbols.extend_from_slice(&w.symbols);
        }
        Ok(Word { m, symbols })
    }

    pub fn push(&mut self, s: Symbol) -> Result<(), WordError> {
        if s.index == 0 || s.index > self.m {
            return Err(WordError::IndexOutOfRange { offset: self.len(), index: s.index, m: self.m });
        }
        self.symbols.push(s);
        Ok(())
    }

    /// Sub-word on the half-open range `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word { m: self.m, symbols: self.symbols[start..end].to_vec() }
    }

    /// Mirror image: reverse the word and swap openers with closers of the
    /// same type. This is the involution exchanging the two maximal measures.
    pub fn mirror(&self) -> Word {
        Word { m: self.m, symbols: self.symbols.iter().rev().map(|s| s.dual()).collect() }
    }

    /// The same symbols regarded in a (possibly larger) alphabet.
    pub fn with_alphabet(&self, m: u32) -> Result<Word, WordError> {
        Word::new(m, self.symbols.clone())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses with the smallest alphabet that contains every index (at least 1).
impl FromStr for Word {
    type Err = WordError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let loose = Word::parse(text, u32::MAX)?;
        let m = loose.symbols.iter().map(|s| s.index).max().unwrap_or(1);
        Ok(Word { m, symbols: loose.symbols })
    }
}

/// Serialized as its token string; the alphabet size is not carried.
impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_tokens() {
        let w = Word::parse("a1b1", 2).unwrap();
        assert_eq!(w.symbols(), &[Symbol::open(1), Symbol::close(1)]);
        assert_eq!(w.m(), 2);
    }

    #[test]
    fn empty_text_is_empty_word() {
        let w = Word::parse("", 3).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.to_string(), "");
    }

    #[test]
    fn rejects_index_above_alphabet() {
        assert_eq!(
            Word::parse("a3", 2),
            Err(WordError::IndexOutOfRange { offset: 0, index: 3, m: 2 })
        );
    }

    #[test]
    fn error_names_offending_offset() {
        assert_eq!(Word::parse("a1b0", 2), Err(WordError::ZeroIndex { offset: 2 }));
        assert_eq!(Word::parse("a1c1", 2), Err(WordError::MalformedToken { offset: 2 }));
        assert_eq!(Word::parse("a1b", 2), Err(WordError::MalformedToken { offset: 2 }));
        assert_eq!(Word::parse("a12a1", 9).unwrap_err(), WordError::IndexOutOfRange { offset: 0, index: 12, m: 9 });
    }

    #[test]
    fn multi_digit_indices() {
        let w = Word::parse("a10b12a1", 12).unwrap();
        assert_eq!(w.symbols(), &[Symbol::open(10), Symbol::close(12), Symbol::open(1)]);
        assert_eq!(w.to_string(), "a10b12a1");
    }

    #[test]
    fn mirror_reverses_and_swaps() {
        let w = Word::parse("b1a1a2", 2).unwrap();
        assert_eq!(w.mirror().to_string(), "b2b1a1");
        assert_eq!(w.mirror().mirror(), w);
    }

    #[test]
    fn from_str_infers_alphabet() {
        let w: Word = "a1b7".parse().unwrap();
        assert_eq!(w.m(), 7);
        let e: Word = "".parse().unwrap();
        assert_eq!(e.m(), 1);
    }

    #[test]
    fn alphabet_token_order() {
        let names: Vec<String> = Symbol::alphabet(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["a1", "a2", "b1", "b2"]);
    }
}
