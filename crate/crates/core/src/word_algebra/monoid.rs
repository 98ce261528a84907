//! The syntactic monoid of the Dyck language.
//!
//! Generators are the `2m` symbols subject to `a_j b_j = 1` and
//! `a_i b_j = 0` for `i != j`. Every nonzero element has a unique normal
//! form `b…b a…a`: a run of closers nothing to their left can cancel,
//! followed by a run of openers still waiting for a partner.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::word_algebra::word::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonoidForm {
    Zero,
    /// Type indices of the unmatched closers and openers, left to right.
    Reduced { betas: Vec<u32>, alphas: Vec<u32> },
}

impl MonoidForm {
    pub fn identity() -> Self {
        MonoidForm::Reduced { betas: Vec::new(), alphas: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, MonoidForm::Zero)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, MonoidForm::Reduced { betas, alphas } if betas.is_empty() && alphas.is_empty())
    }

    pub fn unmatched_betas(&self) -> Option<&[u32]> {
        match self {
            MonoidForm::Zero => None,
            MonoidForm::Reduced { betas, .. } => Some(betas),
        }
    }

    pub fn unmatched_alphas(&self) -> Option<&[u32]> {
        match self {
            MonoidForm::Zero => None,
            MonoidForm::Reduced { alphas, .. } => Some(alphas),
        }
    }

    /// Product `self · other` in the monoid.
    pub fn concat(&self, other: &MonoidForm) -> MonoidForm {
        let (MonoidForm::Reduced { betas: xb, alphas: xa }, MonoidForm::Reduced { betas: yb, alphas: ya }) =
            (self, other)
        else {
            return MonoidForm::Zero;
        };
        // The openers of x meet the closers of y innermost first.
        let cancel = xa.len().min(yb.len());
        for k in 0..cancel {
            if xa[xa.len() - 1 - k] != yb[k] {
                return MonoidForm::Zero;
            }
        }
        let mut betas = xb.clone();
        betas.extend_from_slice(&yb[cancel..]);
        let mut alphas = xa[..xa.len() - cancel].to_vec();
        alphas.extend_from_slice(ya);
        MonoidForm::Reduced { betas, alphas }
    }

    /// A shortest word representing this element.
    pub fn to_word(&self, m: u32) -> Option<Word> {
        let (betas, alphas) = (self.unmatched_betas()?, self.unmatched_alphas()?);
        let symbols =
            betas.iter().map(|&j| Symbol::close(j)).chain(alphas.iter().map(|&j| Symbol::open(j))).collect();
        Word::new(m, symbols).ok()
    }
}

impl fmt::Display for MonoidForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidForm::Zero => write!(f, "0"),
            MonoidForm::Reduced { betas, alphas } if betas.is_empty() && alphas.is_empty() => write!(f, "1"),
            MonoidForm::Reduced { betas, alphas } => {
                for j in betas {
                    write!(f, "b{j}")?;
                }
                for j in alphas {
                    write!(f, "a{j}")?;
                }
                Ok(())
            }
        }
    }
}

/// Left-to-right evaluation state of the reduction; also used to drive
/// the pruned enumerators symbol by symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StackState {
    betas: Vec<u32>,
    stack: Vec<u32>,
    zero: bool,
}

impl StackState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds one symbol; returns `false` once the word has become zero.
    #[inline]
    pub fn push(&mut self, s: Symbol) -> bool {
        if self.zero {
            return false;
        }
        if s.is_open() {
            self.stack.push(s.index);
        } else {
            match self.stack.last() {
                Some(&top) if top == s.index => {
                    self.stack.pop();
                }
                Some(_) => self.zero = true,
                None => self.betas.push(s.index),
            }
        }
        !self.zero
    }

    /// Like [`push`](Self::push) but leaves the state untouched when `s`
    /// would make the word zero. `Some(matched)` tells whether a closer
    /// cancelled an opener, which [`pop`](Self::pop) needs to undo it.
    #[inline]
    pub fn try_push(&mut self, s: Symbol) -> Option<bool> {
        if self.zero {
            return None;
        }
        if s.is_open() {
            self.stack.push(s.index);
            return Some(false);
        }
        match self.stack.last() {
            Some(&top) if top == s.index => {
                self.stack.pop();
                Some(true)
            }
            Some(_) => None,
            None => {
                self.betas.push(s.index);
                Some(false)
            }
        }
    }

    /// Undoes the most recent successful `try_push` of `s`.
    #[inline]
    pub fn pop(&mut self, s: Symbol, matched: bool) {
        if s.is_open() {
            self.stack.pop();
        } else if matched {
            self.stack.push(s.index);
        } else {
            self.betas.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn open_stack(&self) -> &[u32] {
        &self.stack
    }

    pub fn unmatched_betas(&self) -> &[u32] {
        &self.betas
    }

    pub fn form(&self) -> MonoidForm {
        if self.zero {
            MonoidForm::Zero
        } else {
            MonoidForm::Reduced { betas: self.betas.clone(), alphas: self.stack.clone() }
        }
    }
}

/// Evaluates a word in the monoid.
pub fn reduce(w: &Word) -> MonoidForm {
    reduce_symbols(w.symbols())
}

pub fn reduce_symbols(symbols: &[Symbol]) -> MonoidForm {
    let mut state = StackState::new();
    for &s in symbols {
        if !state.push(s) {
            return MonoidForm::Zero;
        }
    }
    state.form()
}

/// Admissible means nonzero in the monoid.
pub fn is_admissible(symbols: &[Symbol]) -> bool {
    let mut state = StackState::new();
    symbols.iter().all(|&s| state.push(s))
}
