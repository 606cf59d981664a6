//! The five-symbol string notation for terms.
//!
//! Prefix `@` for application, `λ` for abstraction, and `▶` for a variable
//! occurrence. A bound occurrence is followed by its deBruijn index in binary
//! (most significant bit first, `0` for index zero); a free occurrence is a
//! bare `▶`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{Term, TermKind};

/// Name given to every bare `▶` when decoding.
pub const CANONICAL_FREE: &str = "free";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaSymbol {
    Lambda,
    App,
    Zero,
    One,
    Var,
}

impl ThetaSymbol {
    pub fn ascii(self) -> char {
        match self {
            ThetaSymbol::Lambda => 'L',
            ThetaSymbol::App => '@',
            ThetaSymbol::Zero => '0',
            ThetaSymbol::One => '1',
            ThetaSymbol::Var => '*',
        }
    }

    pub fn unicode(self) -> char {
        match self {
            ThetaSymbol::Lambda => 'λ',
            ThetaSymbol::Var => '▶',
            s => s.ascii(),
        }
    }

    pub fn from_char(c: char) -> Option<ThetaSymbol> {
        Some(match c {
            'L' | 'λ' => ThetaSymbol::Lambda,
            '@' => ThetaSymbol::App,
            '0' => ThetaSymbol::Zero,
            '1' => ThetaSymbol::One,
            '*' | '▶' => ThetaSymbol::Var,
            _ => return None,
        })
    }

    pub fn is_digit(self) -> bool {
        matches!(self, ThetaSymbol::Zero | ThetaSymbol::One)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("invalid symbol '{ch}' at offset {offset}")]
    InvalidSymbol { offset: usize, ch: char },
    #[error("unexpected end of string: an @ or λ is missing a subterm")]
    Truncated,
    #[error("unexpected symbol at offset {offset}: expected the start of a subterm")]
    Unexpected { offset: usize },
    #[error("trailing symbols after offset {offset}")]
    Trailing { offset: usize },
    #[error("index {index} at offset {offset} is out of scope")]
    OutOfScope { offset: usize, index: usize },
    #[error("index at offset {offset} has a leading zero")]
    LeadingZero { offset: usize },
    #[error("index at offset {offset} does not fit in a machine word")]
    IndexOverflow { offset: usize },
}

/// A word over the five-letter alphabet.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ThetaString(pub Vec<ThetaSymbol>);

impl ThetaString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[ThetaSymbol] {
        &self.0
    }

    pub fn to_ascii(&self) -> String {
        self.0.iter().map(|s| s.ascii()).collect()
    }

    pub fn parse(text: &str) -> Result<ThetaString, ThetaError> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .enumerate()
            .map(|(offset, ch)| {
                ThetaSymbol::from_char(ch).ok_or(ThetaError::InvalidSymbol { offset, ch })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ThetaString)
    }
}

impl FromStr for ThetaString {
    type Err = ThetaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ThetaString::parse(s)
    }
}

impl fmt::Display for ThetaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.unicode()))
    }
}

impl fmt::Debug for ThetaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Appends the binary digits of `n`, most significant first.
pub fn push_binary(out: &mut Vec<ThetaSymbol>, n: usize) {
    if n == 0 {
        out.push(ThetaSymbol::Zero);
        return;
    }
    let bits = usize::BITS - n.leading_zeros();
    for k in (0..bits).rev() {
        out.push(if (n >> k) & 1 == 1 {
            ThetaSymbol::One
        } else {
            ThetaSymbol::Zero
        });
    }
}

fn binary_len(n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        u64::from(usize::BITS - n.leading_zeros())
    }
}

pub fn encode_theta(t: &Term) -> ThetaString {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t.kind() {
            TermKind::App(f, a) => {
                out.push(ThetaSymbol::App);
                stack.push(a);
                stack.push(f);
            }
            TermKind::Abs(b) => {
                out.push(ThetaSymbol::Lambda);
                stack.push(b);
            }
            TermKind::Bound(i) => {
                out.push(ThetaSymbol::Var);
                push_binary(&mut out, *i);
            }
            TermKind::Free(_) => out.push(ThetaSymbol::Var),
        }
    }
    ThetaString(out)
}

/// Length of the encoding, computed without building it.
pub fn true_length(t: &Term) -> u64 {
    let mut total = 0u64;
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        total += match t.kind() {
            TermKind::App(f, a) => {
                stack.push(a);
                stack.push(f);
                1
            }
            TermKind::Abs(b) => {
                stack.push(b);
                1
            }
            TermKind::Bound(i) => 1 + binary_len(*i),
            TermKind::Free(_) => 1,
        };
    }
    total
}

/// `λx.λy₁…λyₙ.x x … x` with `n + 1` occurrences of `x`, each of which
/// needs an index of about `log₂ n` bits.
pub fn deep_reference_family(n: usize) -> Term {
    let x = Term::bound(n);
    let mut body = x.clone();
    for _ in 0..n {
        body = Term::app(body, x.clone());
    }
    for _ in 0..=n {
        body = Term::abs(body);
    }
    body
}

/// The two size measures side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeReport {
    pub length: u64,
    pub true_length: u64,
}

pub fn size_report(t: &Term) -> SizeReport {
    SizeReport {
        length: t.size(),
        true_length: true_length(t),
    }
}

/// Reads one variable block starting at `pos` (which holds `▶`). Returns the
/// index, if any, and the position after the block.
pub(crate) fn read_var_block(
    syms: &[ThetaSymbol],
    pos: usize,
) -> Result<(Option<usize>, usize), ThetaError> {
    let start = pos + 1;
    let mut end = start;
    while end < syms.len() && syms[end].is_digit() {
        end += 1;
    }
    if end == start {
        return Ok((None, end));
    }
    if end - start > 1 && syms[start] == ThetaSymbol::Zero {
        return Err(ThetaError::LeadingZero { offset: start });
    }
    let mut n: usize = 0;
    for s in &syms[start..end] {
        n = n
            .checked_mul(2)
            .and_then(|n| n.checked_add(usize::from(*s == ThetaSymbol::One)))
            .ok_or(ThetaError::IndexOverflow { offset: start })?;
    }
    Ok((Some(n), end))
}

enum Frame {
    Abs,
    AppFun,
    AppArg(Term),
}

/// Decodes a well-formed string. Every bare `▶` becomes the free variable
/// [`CANONICAL_FREE`].
pub fn decode_theta(s: &ThetaString) -> Result<Term, ThetaError> {
    let syms = s.symbols();
    let mut pos = 0;
    let mut frames: Vec<Frame> = Vec::new();
    let mut depth = 0usize;
    loop {
        // Descend to the next leaf.
        let mut leaf = loop {
            match syms.get(pos) {
                None => return Err(ThetaError::Truncated),
                Some(ThetaSymbol::App) => {
                    frames.push(Frame::AppFun);
                    pos += 1;
                }
                Some(ThetaSymbol::Lambda) => {
                    frames.push(Frame::Abs);
                    depth += 1;
                    pos += 1;
                }
                Some(ThetaSymbol::Var) => {
                    let (index, next) = read_var_block(syms, pos)?;
                    let t = match index {
                        None => Term::free(CANONICAL_FREE),
                        Some(i) if i < depth => Term::bound(i),
                        Some(i) => {
                            return Err(ThetaError::OutOfScope {
                                offset: pos,
                                index: i,
                            })
                        }
                    };
                    pos = next;
                    break t;
                }
                Some(_) => return Err(ThetaError::Unexpected { offset: pos }),
            }
        };
        // Climb while frames are complete.
        loop {
            match frames.pop() {
                None => {
                    if pos != syms.len() {
                        return Err(ThetaError::Trailing { offset: pos });
                    }
                    return Ok(leaf);
                }
                Some(Frame::Abs) => {
                    depth -= 1;
                    leaf = Term::abs(leaf);
                }
                Some(Frame::AppFun) => {
                    frames.push(Frame::AppArg(leaf));
                    break;
                }
                Some(Frame::AppArg(f)) => leaf = Term::app(f, leaf),
            }
        }
    }
}
