//! Finite sets, Scott-encoded strings, the call-by-value fixed point, and
//! the string combinators built on them.

use std::fmt;

use thiserror::Error;

use crate::term::{Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("symbol '{0}' appears twice in the alphabet")]
    DuplicateSymbol(String),
    #[error("symbol '{0}' is not a valid identifier")]
    InvalidSymbol(String),
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("term does not encode a string over this alphabet")]
    NotAStringEncoding,
    #[error("term does not encode a symbol of this alphabet")]
    NotASymbolEncoding,
}

/// Indices into an [`Alphabet`].
pub type Word = Vec<usize>;

/// An ordered set of distinct symbols. Position determines the encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Alphabet, EncodingError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(EncodingError::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(EncodingError::InvalidSymbol(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(EncodingError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Parses a comma-separated symbol list such as `0,1,#`.
    pub fn parse_list(text: &str) -> Result<Alphabet, EncodingError> {
        Alphabet::new(text.split(',').map(str::trim))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &str) -> Option<usize> {
        self.symbols.iter().position(|x| x == s)
    }

    fn single_chars(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Splits raw text into symbols: character by character when every symbol
    /// is one character, otherwise on whitespace.
    pub fn word(&self, text: &str) -> Result<Word, EncodingError> {
        let lookup = |tok: &str| {
            self.index_of(tok)
                .ok_or_else(|| EncodingError::UnknownSymbol(tok.to_string()))
        };
        if self.single_chars() {
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }

    pub fn render(&self, word: &[usize]) -> String {
        let sep = if self.single_chars() { "" } else { " " };
        word.iter()
            .map(|&i| self.symbols[i].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Whether every symbol of `other` also belongs to `self`.
    pub fn contains_all(&self, other: &Alphabet) -> bool {
        other.symbols.iter().all(|s| self.symbols.contains(s))
    }

    /// Re-indexes a word from `src` into `self`, dropping absent symbols.
    pub fn translate(&self, src: &Alphabet, word: &[usize]) -> Word {
        word.iter()
            .filter_map(|&i| self.index_of(src.symbol(i)))
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbols.join(","))
    }
}

// Named-term shorthands for the builders below.
pub(crate) fn v(name: &str) -> Term {
    Term::free(name)
}

pub(crate) fn l(names: &[&str], body: Term) -> Term {
    Term::lams(names, body)
}

pub(crate) fn ap<const N: usize>(f: Term, args: [Term; N]) -> Term {
    Term::apps(f, args)
}

pub(crate) fn xs(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub(crate) fn lam_xs(n: usize, trailing: &[&str], body: Term) -> Term {
    let names = xs(n);
    let mut all: Vec<&str> = names.iter().map(String::as_str).collect();
    all.extend_from_slice(trailing);
    l(&all, body)
}

fn wrap_abs(mut t: Term, n: usize) -> Term {
    for _ in 0..n {
        t = Term::abs(t);
    }
    t
}

/// `λx1…λxn.xi` for a set of `n` elements, `i` counted from 0.
pub fn encode_symbol_index(n: usize, i: usize) -> Term {
    assert!(i < n, "symbol index {i} out of range for {n} elements");
    wrap_abs(Term::bound(n - 1 - i), n)
}

pub fn encode_symbol(a: &Alphabet, s: &str) -> Result<Term, EncodingError> {
    let i = a
        .index_of(s)
        .ok_or_else(|| EncodingError::UnknownSymbol(s.to_string()))?;
    Ok(encode_symbol_index(a.len(), i))
}

/// Inverse of [`encode_symbol_index`].
pub fn decode_symbol_index(n: usize, t: &Term) -> Result<usize, EncodingError> {
    let mut t = t;
    for _ in 0..n {
        t = t.abs_body().ok_or(EncodingError::NotASymbolEncoding)?;
    }
    match t.kind() {
        TermKind::Bound(k) if *k < n => Ok(n - 1 - k),
        _ => Err(EncodingError::NotASymbolEncoding),
    }
}

/// Scott encoding of a word over an alphabet of `n` symbols.
pub fn encode_word(n: usize, word: &[usize]) -> Term {
    let mut acc = wrap_abs(Term::bound(0), n + 1);
    for &i in word.iter().rev() {
        assert!(i < n, "symbol index {i} out of range for {n} symbols");
        acc = wrap_abs(Term::app(Term::bound(n - i), acc), n + 1);
    }
    acc
}

pub fn encode_string(a: &Alphabet, text: &str) -> Result<Term, EncodingError> {
    Ok(encode_word(a.len(), &a.word(text)?))
}

/// Inverse of [`encode_word`].
pub fn decode_word(n: usize, t: &Term) -> Result<Word, EncodingError> {
    let mut out = Vec::new();
    let mut t = t;
    loop {
        for _ in 0..=n {
            t = t.abs_body().ok_or(EncodingError::NotAStringEncoding)?;
        }
        match t.kind() {
            TermKind::Bound(0) => return Ok(out),
            TermKind::App(head, tail) => match head.kind() {
                TermKind::Bound(k) if (1..=n).contains(k) && tail.is_closed() => {
                    out.push(n - k);
                    t = tail;
                }
                _ => return Err(EncodingError::NotAStringEncoding),
            },
            _ => return Err(EncodingError::NotAStringEncoding),
        }
    }
}

pub fn decode_string(a: &Alphabet, t: &Term) -> Result<String, EncodingError> {
    decode_word(a.len(), t).map(|w| a.render(&w))
}

/// `λx.λy.x(x(…(x y)…))` with `n` applications.
pub fn church_numeral(n: u64) -> Term {
    let mut body = Term::bound(0);
    for _ in 0..n {
        body = Term::app(Term::bound(1), body);
    }
    wrap_abs(body, 2)
}

/// `⌜n⌝ ⌜2⌝ c` for a free variable `c`: normalizes to a term of size
/// exponential in `n`.
pub fn exponential_term(n: u64) -> Term {
    Term::apps(church_numeral(n), [church_numeral(2), Term::free("c")])
}

/// `MM` with `M ≡ λx.λf.f(λz.xxfz)`.
pub fn fixpoint_h() -> Term {
    let m = l(
        &["x", "f"],
        ap(v("f"), [l(&["z"], ap(v("x"), [v("x"), v("f"), v("z")]))]),
    );
    Term::app(m.clone(), m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppendKind {
    /// `⌜a⌝ ⌜u⌝ ↦ ⌜au⌝`
    Char,
    /// `⌜u⌝ ⌜v⌝ ↦ ⌜uv⌝`
    String,
    /// `⌜u⌝ ⌜v⌝ ↦ ⌜uʳv⌝`
    Reverse,
}

pub fn build_append(a: &Alphabet, kind: AppendKind) -> Term {
    append_term(a.len(), kind)
}

pub(crate) fn append_term(n: usize, kind: AppendKind) -> Term {
    let names = xs(n);
    match kind {
        AppendKind::Char => {
            let ms = (0..n).map(|i| l(&["y"], lam_xs(n, &["w"], ap(v(&names[i]), [v("y")]))));
            l(&["x", "y"], Term::app(Term::apps(v("x"), ms), v("y")))
        }
        AppendKind::String => {
            let ns = (0..n).map(|i| {
                let cons = l(&["h"], lam_xs(n, &["g"], ap(v(&names[i]), [v("h")])));
                l(&["w", "k"], ap(cons, [ap(v("x"), [v("w"), v("k")])]))
            });
            recursive_dispatch(ns)
        }
        AppendKind::Reverse => {
            let ps = (0..n).map(|i| {
                let push = lam_xs(n, &["h"], ap(v(&names[i]), [v("k")]));
                l(&["w", "k"], ap(v("x"), [v("w"), push]))
            });
            recursive_dispatch(ps)
        }
    }
}

/// `H(λx.λy.λz.y C1 … Cn (λw.w) z)`
fn recursive_dispatch(cases: impl Iterator<Item = Term>) -> Term {
    let body = Term::apps(v("y"), cases);
    let body = ap(body, [l(&["w"], v("w")), v("z")]);
    Term::app(fixpoint_h(), l(&["x", "y", "z"], body))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvertKind {
    /// `⌜a⌝_src ↦ ⌜a⌝_dst*` (or `⌜ε⌝` when `a` is absent from `dst`)
    Char,
    /// `⌜u⌝_src* ↦ ⌜u'⌝_dst*` dropping symbols absent from `dst`
    String,
}

pub fn build_convert(src: &Alphabet, dst: &Alphabet, kind: ConvertKind) -> Term {
    let m = dst.len();
    let target = |i: usize| dst.index_of(src.symbol(i));
    match kind {
        ConvertKind::Char => {
            let cases = (0..src.len()).map(|i| match target(i) {
                Some(j) => encode_word(m, &[j]),
                None => encode_word(m, &[]),
            });
            l(&["x"], Term::apps(v("x"), cases))
        }
        ConvertKind::String => {
            let names = xs(m);
            let cases = (0..src.len()).map(|i| match target(i) {
                Some(j) => {
                    let cons = l(&["w"], lam_xs(m, &["h"], ap(v(&names[j]), [v("w")])));
                    l(&["z"], ap(cons, [ap(v("x"), [v("z")])]))
                }
                None => l(&["z"], ap(v("x"), [v("z")])),
            });
            let body = ap(Term::apps(v("y"), cases), [encode_word(m, &[])]);
            Term::app(fixpoint_h(), l(&["x", "y"], body))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{normalize, Strategy};
    use crate::syntax::parse_term;

    fn ab() -> Alphabet {
        Alphabet::parse_list("a,b").unwrap()
    }

    fn nf(t: Term) -> Term {
        let out = normalize(&t, Strategy::Leftmost, 100_000).unwrap();
        assert!(out.is_normal_form());
        out.term().clone()
    }

    #[test]
    fn alphabet_validation() {
        assert_eq!(
            Alphabet::new(Vec::<String>::new()),
            Err(EncodingError::EmptyAlphabet)
        );
        assert!(matches!(
            Alphabet::parse_list("a,a"),
            Err(EncodingError::DuplicateSymbol(_))
        ));
        assert!(matches!(
            Alphabet::parse_list("a,,b"),
            Err(EncodingError::InvalidSymbol(_))
        ));
        let tf = Alphabet::parse_list("t,f").unwrap();
        assert_eq!(tf.word("tft").unwrap(), vec![0, 1, 0]);
        assert!(tf.word("tx").is_err());
        let multi = Alphabet::parse_list("q0,q1").unwrap();
        assert_eq!(multi.word("q1 q0").unwrap(), vec![1, 0]);
        assert_eq!(multi.render(&[1, 0]), "q1 q0");
    }

    #[test]
    fn symbols() {
        let tf = Alphabet::parse_list("t,f").unwrap();
        assert_eq!(
            encode_symbol(&tf, "t").unwrap(),
            parse_term("\\x1.\\x2.x1").unwrap()
        );
        let t = Alphabet::parse_list("t").unwrap();
        assert_eq!(
            encode_symbol(&t, "t").unwrap(),
            parse_term("\\x1.x1").unwrap()
        );
        assert_eq!(
            encode_symbol(&tf, "g"),
            Err(EncodingError::UnknownSymbol("g".into()))
        );
        assert_eq!(decode_symbol_index(2, &encode_symbol_index(2, 1)), Ok(1));
    }

    #[test]
    fn strings() {
        assert_eq!(
            encode_string(&ab(), "").unwrap(),
            parse_term("\\x1.\\x2.\\y.y").unwrap()
        );
        assert_eq!(
            encode_string(&ab(), "a").unwrap(),
            parse_term("\\x1.\\x2.\\y.x1 (\\x1.\\x2.\\y.y)").unwrap()
        );
        let single = Alphabet::parse_list("a").unwrap();
        assert_ne!(
            encode_string(&single, "a").unwrap(),
            encode_string(&ab(), "a").unwrap()
        );
    }

    #[test]
    fn decoding() {
        assert_eq!(
            decode_string(&ab(), &parse_term("\\x.x").unwrap()),
            Err(EncodingError::NotAStringEncoding)
        );
        let a = Alphabet::parse_list("a").unwrap();
        assert_eq!(
            decode_string(&a, &encode_string(&a, "aaa").unwrap()).unwrap(),
            "aaa"
        );
        let bits = Alphabet::parse_list("0,1").unwrap();
        for len in 0..=4u32 {
            for code in 0..(1u32 << len) {
                let s: String = (0..len)
                    .map(|k| if code >> k & 1 == 1 { '1' } else { '0' })
                    .collect();
                let t = encode_string(&bits, &s).unwrap();
                assert_eq!(decode_string(&bits, &t).unwrap(), s);
            }
        }
    }

    #[test]
    fn church() {
        assert_eq!(church_numeral(0), parse_term("\\x.\\y.y").unwrap());
        assert_eq!(church_numeral(2), parse_term("\\x.\\y.x (x y)").unwrap());
        for n in 0..10 {
            assert_eq!(church_numeral(n).size(), 2 * n + 3);
        }
    }

    #[test]
    fn exponential_family() {
        for n in 1..6 {
            let out = normalize(&exponential_term(n), Strategy::Leftmost, 1000).unwrap();
            assert!(out.is_normal_form());
            assert_eq!(out.trace().step_count() as u64, n + 2);
        }
    }

    #[test]
    fn fixpoint_shape() {
        let h = fixpoint_h();
        assert!(h.is_closed());
        assert!(!h.is_value());
        assert_eq!(crate::reduce::find_redexes(&h).len(), 1);
        // H(λg.λy.y) reduces to the identity.
        let k = parse_term("\\g.\\y.y").unwrap();
        let r = nf(Term::app(h, k));
        assert_eq!(r, parse_term("\\y.y").unwrap());
    }

    #[test]
    fn append_semantics() {
        let a = ab();
        let enc = |s: &str| encode_string(&a, s).unwrap();
        let ch = build_append(&a, AppendKind::Char);
        let r = nf(Term::apps(ch, [encode_symbol(&a, "a").unwrap(), enc("b")]));
        assert_eq!(decode_string(&a, &r).unwrap(), "ab");
        let st = build_append(&a, AppendKind::String);
        let r = nf(Term::apps(st, [enc("ab"), enc("a")]));
        assert_eq!(decode_string(&a, &r).unwrap(), "aba");
        let abc = Alphabet::parse_list("a,b,c").unwrap();
        let rv = build_append(&abc, AppendKind::Reverse);
        let r = nf(Term::apps(
            rv,
            [
                encode_string(&abc, "ab").unwrap(),
                encode_string(&abc, "c").unwrap(),
            ],
        ));
        assert_eq!(decode_string(&abc, &r).unwrap(), "bac");
    }

    #[test]
    fn convert_semantics() {
        let src = Alphabet::parse_list("0,1,#").unwrap();
        let dst = Alphabet::parse_list("0,1").unwrap();
        let conv = build_convert(&src, &dst, ConvertKind::String);
        let r = nf(Term::app(conv, encode_string(&src, "0#1").unwrap()));
        assert_eq!(decode_string(&dst, &r).unwrap(), "01");
        let ch = build_convert(&src, &dst, ConvertKind::Char);
        let r = nf(Term::app(ch.clone(), encode_symbol(&src, "1").unwrap()));
        assert_eq!(decode_string(&dst, &r).unwrap(), "1");
        let r = nf(Term::app(ch, encode_symbol(&src, "#").unwrap()));
        assert_eq!(decode_string(&dst, &r).unwrap(), "");
        let same = build_convert(&dst, &dst, ConvertKind::String);
        for s in ["", "0", "10", "0110"] {
            let r = nf(Term::app(same.clone(), encode_string(&dst, s).unwrap()));
            assert_eq!(decode_string(&dst, &r).unwrap(), s);
        }
    }

    #[test]
    fn builders_are_closed_values_except_h() {
        let a = ab();
        for kind in [AppendKind::Char, AppendKind::String, AppendKind::Reverse] {
            assert!(build_append(&a, kind).is_closed());
        }
        assert!(build_append(&a, AppendKind::Char).is_value());
        assert!(build_convert(&a, &a, ConvertKind::Char).is_value());
        assert!(build_convert(&a, &a, ConvertKind::String).is_closed());
    }
}
