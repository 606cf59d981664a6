//! Single-tape deterministic Turing machines: a native simulator and a
//! compiler to lambda terms whose reduction cost tracks the machine's time.

use std::fmt;

use thiserror::Error;

use crate::encodings::{
    ap, append_term, build_convert, decode_symbol_index, decode_word, encode_symbol_index,
    encode_word, fixpoint_h, l, v, Alphabet, AppendKind, ConvertKind, EncodingError, Word,
};
use crate::reduce::{normalize, EngineError, ReductionOutcome, Strategy};
use crate::term::{Term, TermKind};

/// Machine files bundled with the crate.
pub mod samples {
    pub const FLIP: &str = include_str!("../machines/flip.tm");
    pub const EVEN_PALINDROME: &str = include_str!("../machines/even_palindrome.tm");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    fn parse(tok: &str) -> Option<Move> {
        match tok {
            "L" => Some(Move::Left),
            "R" => Some(Move::Right),
            "S" => Some(Move::Stay),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "S",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub next: usize,
    pub write: usize,
    pub movement: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown symbol '{symbol}'")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: unknown state '{state}'")]
    UnknownState { line: usize, state: String },
    #[error("line {line}: transition defined on the final state")]
    DeltaOnFinal { line: usize },
    #[error("line {line}: duplicate transition for ({state}, {symbol})")]
    DuplicateDelta {
        line: usize,
        state: String,
        symbol: String,
    },
    #[error("missing transition for ({state}, {symbol})")]
    MissingDelta { state: String, symbol: String },
    #[error("missing '{0}:' line")]
    MissingField(&'static str),
    #[error("line {line}: invalid symbol list")]
    Alphabet {
        line: usize,
        #[source]
        source: EncodingError,
    },
}

/// A deterministic machine with total transitions off its final state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    alphabet: Alphabet,
    blank: usize,
    states: Alphabet,
    initial: usize,
    final_state: usize,
    /// Indexed by `state * |alphabet| + symbol`; `None` exactly on the final state.
    delta: Vec<Option<Transition>>,
}

impl TuringMachine {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn final_state(&self) -> usize {
        self.final_state
    }

    pub fn delta(&self, state: usize, symbol: usize) -> Option<Transition> {
        self.delta[state * self.alphabet.len() + symbol]
    }

    /// Default input/output alphabet: every symbol except the blank.
    pub fn io_alphabet(&self) -> Alphabet {
        let syms = self
            .alphabet
            .symbols()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.blank)
            .map(|(_, s)| s.clone());
        Alphabet::new(syms).unwrap_or_else(|_| self.alphabet.clone())
    }

    pub fn initial_config(&self, input: &[usize]) -> TMConfig {
        match input.split_first() {
            Some((&a, rest)) => TMConfig {
                left: Vec::new(),
                head: a,
                right: rest.to_vec(),
                state: self.initial,
            },
            None => TMConfig {
                left: Vec::new(),
                head: self.blank,
                right: Vec::new(),
                state: self.initial,
            },
        }
    }

    /// One transition; `None` on a final configuration.
    pub fn step(&self, c: &TMConfig) -> Option<TMConfig> {
        let t = self.delta(c.state, c.head)?;
        let mut left = c.left.clone();
        let mut right = c.right.clone();
        let head = match t.movement {
            Move::Stay => t.write,
            Move::Left => {
                right.insert(0, t.write);
                left.pop().unwrap_or(self.blank)
            }
            Move::Right => {
                left.push(t.write);
                if right.is_empty() {
                    self.blank
                } else {
                    right.remove(0)
                }
            }
        };
        Some(TMConfig {
            left,
            head,
            right,
            state: t.next,
        })
    }
}

struct Fields<'a> {
    alphabet: Option<(usize, Vec<&'a str>)>,
    blank: Option<(usize, &'a str)>,
    states: Option<(usize, Vec<&'a str>)>,
    initial: Option<(usize, &'a str)>,
    final_state: Option<(usize, &'a str)>,
    delta: Vec<(usize, Vec<&'a str>)>,
}

/// Parses the line-oriented machine format (see the crate README).
pub fn parse_tm(text: &str) -> Result<TuringMachine, TmError> {
    let mut f = Fields {
        alphabet: None,
        blank: None,
        states: None,
        initial: None,
        final_state: None,
        delta: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| TmError::Syntax { line, message };
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| syntax(format!("expected 'key: value', found '{content}'")))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let single = || match toks.as_slice() {
            [t] => Ok(*t),
            _ => Err(syntax(format!("'{}' takes exactly one token", key.trim()))),
        };
        let dup = |set: bool| {
            if set {
                Err(syntax(format!("'{}' given twice", key.trim())))
            } else {
                Ok(())
            }
        };
        match key.trim() {
            "alphabet" => {
                dup(f.alphabet.is_some())?;
                f.alphabet = Some((line, toks));
            }
            "states" => {
                dup(f.states.is_some())?;
                f.states = Some((line, toks));
            }
            "blank" => {
                dup(f.blank.is_some())?;
                f.blank = Some((line, single()?));
            }
            "initial" => {
                dup(f.initial.is_some())?;
                f.initial = Some((line, single()?));
            }
            "final" => {
                dup(f.final_state.is_some())?;
                f.final_state = Some((line, single()?));
            }
            "delta" => {
                if toks.len() != 6 || toks[2] != "->" {
                    return Err(syntax(
                        "expected 'delta: STATE SYMBOL -> STATE SYMBOL MOVE'".to_string(),
                    ));
                }
                f.delta.push((line, toks));
            }
            other => return Err(syntax(format!("unknown key '{other}'"))),
        }
    }

    let (aline, asyms) = f.alphabet.ok_or(TmError::MissingField("alphabet"))?;
    let alphabet = Alphabet::new(asyms).map_err(|source| TmError::Alphabet {
        line: aline,
        source,
    })?;
    let (sline, ssyms) = f.states.ok_or(TmError::MissingField("states"))?;
    let states = Alphabet::new(ssyms).map_err(|source| TmError::Alphabet {
        line: sline,
        source,
    })?;

    let symbol = |line: usize, s: &str| {
        alphabet.index_of(s).ok_or_else(|| TmError::UnknownSymbol {
            line,
            symbol: s.to_string(),
        })
    };
    let state = |line: usize, s: &str| {
        states.index_of(s).ok_or_else(|| TmError::UnknownState {
            line,
            state: s.to_string(),
        })
    };

    let (bline, b) = f.blank.ok_or(TmError::MissingField("blank"))?;
    let blank = symbol(bline, b)?;
    let (iline, i) = f.initial.ok_or(TmError::MissingField("initial"))?;
    let initial = state(iline, i)?;
    let (fline, fs) = f.final_state.ok_or(TmError::MissingField("final"))?;
    let final_state = state(fline, fs)?;

    let width = alphabet.len();
    let mut delta = vec![None; states.len() * width];
    for (line, toks) in &f.delta {
        let line = *line;
        let q = state(line, toks[0])?;
        let a = symbol(line, toks[1])?;
        let next = state(line, toks[3])?;
        let write = symbol(line, toks[4])?;
        let movement = Move::parse(toks[5]).ok_or_else(|| TmError::Syntax {
            line,
            message: format!("move must be L, R or S, found '{}'", toks[5]),
        })?;
        if q == final_state {
            return Err(TmError::DeltaOnFinal { line });
        }
        let slot = &mut delta[q * width + a];
        if slot.is_some() {
            return Err(TmError::DuplicateDelta {
                line,
                state: toks[0].to_string(),
                symbol: toks[1].to_string(),
            });
        }
        *slot = Some(Transition {
            next,
            write,
            movement,
        });
    }
    for q in (0..states.len()).filter(|&q| q != final_state) {
        for a in 0..width {
            if delta[q * width + a].is_none() {
                return Err(TmError::MissingDelta {
                    state: states.symbol(q).to_string(),
                    symbol: alphabet.symbol(a).to_string(),
                });
            }
        }
    }
    Ok(TuringMachine {
        alphabet,
        blank,
        states,
        initial,
        final_state,
        delta,
    })
}

/// `(u, a, v, q)`: tape left of the head in reading order, head symbol,
/// tape right of the head, state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TMConfig {
    pub left: Word,
    pub head: usize,
    pub right: Word,
    pub state: usize,
}

impl TMConfig {
    /// The string `u a v`.
    pub fn tape(&self) -> Word {
        let mut w = self.left.clone();
        w.push(self.head);
        w.extend_from_slice(&self.right);
        w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmRun {
    pub output: Word,
    pub steps: u64,
    pub last: TMConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("machine did not halt within {fuel} steps")]
pub struct FuelExhausted {
    pub fuel: u64,
}

/// Runs the machine on `input` (indices into its alphabet).
pub fn simulate_tm(m: &TuringMachine, input: &[usize], fuel: u64) -> Result<TmRun, FuelExhausted> {
    let mut c = m.initial_config(input);
    let mut steps = 0;
    while let Some(next) = m.step(&c) {
        if steps == fuel {
            return Err(FuelExhausted { fuel });
        }
        steps += 1;
        c = next;
    }
    Ok(TmRun {
        output: c.tape(),
        steps,
        last: c,
    })
}

/// `λx.x ⌜uʳ⌝ ⌜a⌝ ⌜v⌝ ⌜q⌝`
pub fn encode_config(m: &TuringMachine, c: &TMConfig) -> Term {
    let n = m.alphabet.len();
    let rev: Word = c.left.iter().rev().copied().collect();
    Term::abs(Term::apps(
        Term::bound(0),
        [
            encode_word(n, &rev),
            encode_symbol_index(n, c.head),
            encode_word(n, &c.right),
            encode_symbol_index(m.states.len(), c.state),
        ],
    ))
}

pub fn decode_config(m: &TuringMachine, t: &Term) -> Result<TMConfig, EncodingError> {
    let bad = EncodingError::NotAStringEncoding;
    let body = t.abs_body().ok_or(bad.clone())?;
    let mut args = Vec::new();
    let mut cur = body;
    while let TermKind::App(f, a) = cur.kind() {
        args.push(a);
        cur = f;
    }
    if !matches!(cur.kind(), TermKind::Bound(0)) || args.len() != 4 {
        return Err(bad);
    }
    args.reverse();
    let n = m.alphabet.len();
    let mut left = decode_word(n, args[0])?;
    left.reverse();
    Ok(TMConfig {
        left,
        head: decode_symbol_index(n, args[1])?,
        right: decode_word(n, args[2])?,
        state: decode_symbol_index(m.states.len(), args[3])?,
    })
}

fn check_subset(m: &TuringMachine, a: &Alphabet) {
    assert!(
        m.alphabet.contains_all(a),
        "alphabet {a} is not contained in the machine alphabet {}",
        m.alphabet
    );
}

fn config_term(left_rev: Term, head: Term, right: Term, state: Term) -> Term {
    l(&["x"], ap(v("x"), [left_rev, head, right, state]))
}

/// Maps `⌜u⌝` over `input` to the encoded initial configuration for `u`.
pub fn build_init(m: &TuringMachine, input: &Alphabet) -> Term {
    check_subset(m, input);
    let n = m.alphabet.len();
    let conv = build_convert(input, &m.alphabet, ConvertKind::String);
    let eps = encode_word(n, &[]);
    let q0 = encode_symbol_index(m.states.len(), m.initial);
    let cases = (0..input.len()).map(|i| {
        let a = m
            .alphabet
            .index_of(input.symbol(i))
            .expect("checked subset");
        let mk = l(
            &["w"],
            config_term(eps.clone(), encode_symbol_index(n, a), v("w"), q0.clone()),
        );
        l(&["z"], ap(mk, [ap(conv.clone(), [v("z")])]))
    });
    let empty = encode_config(m, &m.initial_config(&[]));
    l(&["y"], ap(Term::apps(v("y"), cases), [empty]))
}

/// Runs an encoded configuration to its final configuration.
pub fn build_trans(m: &TuringMachine) -> Term {
    let n = m.alphabet.len();
    let nq = m.states.len();
    let sym = |a: usize| encode_symbol_index(n, a);
    let st = |q: usize| encode_symbol_index(nq, q);
    let eps = encode_word(n, &[]);
    let push = append_term(n, AppendKind::Char);

    let p_cases: Vec<Term> = (0..n)
        .map(|i| {
            l(
                &["u", "v", "q"],
                config_term(v("u"), sym(i), v("v"), v("q")),
            )
        })
        .collect();
    let p_empty = l(
        &["v", "q"],
        config_term(eps.clone(), sym(m.blank), v("v"), v("q")),
    );
    let r_cases: Vec<Term> = (0..n)
        .map(|i| {
            l(
                &["v", "u", "q"],
                config_term(v("u"), sym(i), v("v"), v("q")),
            )
        })
        .collect();
    let r_empty = l(
        &["u", "q"],
        config_term(v("u"), sym(m.blank), eps.clone(), v("q")),
    );

    let per_state = (0..nq).map(|q| {
        let per_symbol = (0..n).map(|a| {
            let body = match m.delta(q, a) {
                None => config_term(v("u"), sym(a), v("v"), st(q)),
                Some(t) => {
                    let next = match t.movement {
                        Move::Stay => l(
                            &["z"],
                            ap(v("z"), [v("u"), sym(t.write), v("v"), st(t.next)]),
                        ),
                        Move::Left => ap(
                            Term::apps(v("u"), p_cases.iter().cloned()),
                            [
                                p_empty.clone(),
                                ap(push.clone(), [sym(t.write), v("v")]),
                                st(t.next),
                            ],
                        ),
                        Move::Right => ap(
                            Term::apps(v("v"), r_cases.iter().cloned()),
                            [
                                r_empty.clone(),
                                ap(push.clone(), [sym(t.write), v("u")]),
                                st(t.next),
                            ],
                        ),
                    };
                    ap(v("x"), [next])
                }
            };
            l(&["u", "v"], body)
        });
        l(
            &["u", "a", "v"],
            ap(Term::apps(v("a"), per_symbol), [v("u"), v("v")]),
        )
    });
    let dispatch = l(
        &["u", "a", "v", "q"],
        ap(Term::apps(v("q"), per_state), [v("u"), v("a"), v("v")]),
    );
    Term::app(fixpoint_h(), l(&["x", "y"], ap(v("y"), [dispatch])))
}

/// Extracts `⌜u a v⌝` over `output` from an encoded final configuration,
/// dropping symbols outside `output`.
pub fn build_final(m: &TuringMachine, output: &Alphabet) -> Term {
    check_subset(m, output);
    let n = output.len();
    let conv_s = build_convert(&m.alphabet, output, ConvertKind::String);
    let conv_c = build_convert(&m.alphabet, output, ConvertKind::Char);
    let rest = ap(
        append_term(n, AppendKind::String),
        [ap(conv_c, [v("a")]), ap(conv_s.clone(), [v("v")])],
    );
    let whole = ap(
        append_term(n, AppendKind::Reverse),
        [ap(conv_s, [v("u")]), rest],
    );
    l(&["x"], ap(v("x"), [l(&["u", "a", "v", "q"], whole)]))
}

/// `λx.final(trans(init x))`
pub fn build_function(m: &TuringMachine, io: &Alphabet) -> Term {
    let inner = ap(build_trans(m), [ap(build_init(m, io), [v("x")])]);
    l(&["x"], ap(build_final(m, io), [inner]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRun {
    pub output: String,
    pub lambda_cost: u64,
    pub lambda_steps: u64,
    pub tm_steps: u64,
}

impl CompiledRun {
    /// `lambda_cost / (tm_steps + |u| + 1)`
    pub fn overhead(&self, input_len: usize) -> f64 {
        self.lambda_cost as f64 / (self.tm_steps + input_len as u64 + 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] EncodingError),
    #[error("io alphabet {0} is not contained in the machine alphabet")]
    AlphabetMismatch(String),
    #[error("native simulation: {0}")]
    OracleFuel(FuelExhausted),
    #[error("lambda reduction did not reach a normal form within {fuel} steps")]
    LambdaFuel { fuel: u64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("compiled output '{lambda}' differs from the simulator's '{oracle}'")]
    Mismatch { lambda: String, oracle: String },
}

/// Runs the machine natively and as a compiled term, checking that the
/// compiled output equals the simulator's output restricted to `io`.
pub fn run_compiled(
    m: &TuringMachine,
    io: &Alphabet,
    input: &str,
    fuel: u64,
) -> Result<CompiledRun, RunError> {
    if !m.alphabet.contains_all(io) {
        return Err(RunError::AlphabetMismatch(io.to_string()));
    }
    let word = io.word(input)?;
    let native = m.alphabet.translate(io, &word);
    let run = simulate_tm(m, &native, fuel).map_err(RunError::OracleFuel)?;
    let oracle = io.render(&io.translate(&m.alphabet, &run.output));

    let term = Term::app(build_function(m, io), encode_word(io.len(), &word));
    let (nf, trace) = match normalize(&term, Strategy::Leftmost, fuel)? {
        ReductionOutcome::NormalForm { term, trace } => (term, trace),
        ReductionOutcome::FuelExhausted { .. } => return Err(RunError::LambdaFuel { fuel }),
    };
    let lambda = io.render(&decode_word(io.len(), &nf)?);
    if lambda != oracle {
        return Err(RunError::Mismatch { lambda, oracle });
    }
    Ok(CompiledRun {
        output: lambda,
        lambda_cost: trace.total_cost(),
        lambda_steps: trace.step_count() as u64,
        tm_steps: run.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip() -> TuringMachine {
        parse_tm(samples::FLIP).unwrap()
    }

    fn pal() -> TuringMachine {
        parse_tm(samples::EVEN_PALINDROME).unwrap()
    }

    fn nf(t: Term) -> Term {
        let out = normalize(&t, Strategy::Leftmost, 1_000_000).unwrap();
        assert!(out.is_normal_form());
        out.term().clone()
    }

    #[test]
    fn parse_samples() {
        let m = flip();
        assert_eq!(m.states().len(), 2);
        assert_eq!(m.alphabet().len(), 3);
        assert_eq!(m.alphabet().symbol(m.blank()), "_");
        assert_eq!(pal().states().len(), 9);
    }

    #[test]
    fn parse_rejects_delta_on_final() {
        let text = format!("{}delta: qf 0 -> qf 0 S\n", samples::FLIP);
        assert!(matches!(
            parse_tm(&text),
            Err(TmError::DeltaOnFinal { line: 10 })
        ));
    }

    #[test]
    fn parse_rejects_missing_entry() {
        let text = samples::FLIP.replace("delta: q0 1 -> q0 0 R\n", "");
        assert_eq!(
            parse_tm(&text),
            Err(TmError::MissingDelta {
                state: "q0".into(),
                symbol: "1".into()
            })
        );
    }

    #[test]
    fn parse_diagnostics() {
        assert!(matches!(
            parse_tm("alphabet 0 1"),
            Err(TmError::Syntax { line: 1, .. })
        ));
        let bad_move = samples::FLIP.replace("q0 _ -> qf _ S", "q0 _ -> qf _ X");
        assert!(matches!(
            parse_tm(&bad_move),
            Err(TmError::Syntax { line: 9, .. })
        ));
        let bad_state = samples::FLIP.replace("-> q0 1 R", "-> q9 1 R");
        assert!(matches!(
            parse_tm(&bad_state),
            Err(TmError::UnknownState { line: 7, .. })
        ));
        assert!(matches!(
            parse_tm("alphabet: 0\nstates: a\ninitial: a\nfinal: a"),
            Err(TmError::MissingField("blank"))
        ));
    }

    #[test]
    fn flip_trace() {
        let m = flip();
        let input = m.alphabet().word("011").unwrap();
        let run = simulate_tm(&m, &input, 100).unwrap();
        assert_eq!(m.alphabet().render(&run.output), "100_");
        assert_eq!(run.steps, 4);
        let empty = simulate_tm(&m, &[], 10).unwrap();
        assert_eq!(m.initial_config(&[]).head, m.blank());
        assert_eq!(m.alphabet().render(&empty.output), "_");
        assert_eq!(empty.steps, 1);
    }

    #[test]
    fn looping_machine_exhausts_fuel() {
        let text = "alphabet: 0 _\nblank: _\nstates: a b\ninitial: a\nfinal: b\n\
                    delta: a 0 -> a 0 S\ndelta: a _ -> a _ S\n";
        let m = parse_tm(text).unwrap();
        assert_eq!(simulate_tm(&m, &[0], 50), Err(FuelExhausted { fuel: 50 }));
        let io = m.io_alphabet();
        assert!(matches!(
            run_compiled(&m, &io, "0", 2000),
            Err(RunError::OracleFuel(_))
        ));
        let t = Term::app(build_function(&m, &io), encode_word(io.len(), &[0]));
        assert!(!normalize(&t, Strategy::Leftmost, 5000)
            .unwrap()
            .is_normal_form());
    }

    #[test]
    fn palindrome_answers() {
        let m = pal();
        let run = |s: &str| {
            let w = m.alphabet().word(s).unwrap();
            let out = simulate_tm(&m, &w, 10_000).unwrap().output;
            m.io_alphabet()
                .render(&m.io_alphabet().translate(m.alphabet(), &out))
        };
        assert_eq!(run(""), "1");
        assert_eq!(run("0110"), "1");
        assert_eq!(run("11"), "1");
        assert_eq!(run("010"), "0");
        assert_eq!(run("0111"), "0");
        assert_eq!(run("1"), "0");
    }

    #[test]
    fn config_round_trip() {
        let m = flip();
        let c = TMConfig {
            left: vec![0, 1],
            head: 2,
            right: vec![1],
            state: 1,
        };
        let t = encode_config(&m, &c);
        assert!(t.is_closed() && t.is_value());
        assert_eq!(decode_config(&m, &t).unwrap(), c);
        // the left part is stored reversed
        let TermKind::Abs(body) = t.kind() else {
            panic!()
        };
        let TermKind::App(f, _) = body.kind() else {
            panic!()
        };
        let TermKind::App(f, _) = f.kind() else {
            panic!()
        };
        let TermKind::App(f, _) = f.kind() else {
            panic!()
        };
        let TermKind::App(_, left) = f.kind() else {
            panic!()
        };
        assert_eq!(*left, encode_word(3, &[1, 0]));
    }

    #[test]
    fn init_builds_initial_config() {
        let m = flip();
        let io = m.io_alphabet();
        let init = build_init(&m, &io);
        assert!(init.is_closed());
        for s in ["", "0", "10", "011"] {
            let w = io.word(s).unwrap();
            let got = nf(Term::app(init.clone(), encode_word(io.len(), &w)));
            let expect = m.initial_config(&m.alphabet().translate(&io, &w));
            assert_eq!(decode_config(&m, &got).unwrap(), expect, "input {s:?}");
        }
    }

    #[test]
    fn trans_reaches_final_config() {
        let m = pal();
        let trans = build_trans(&m);
        for s in ["", "0", "01", "0110", "101"] {
            let w = m.alphabet().word(s).unwrap();
            let start = m.initial_config(&w);
            let got = nf(Term::app(trans.clone(), encode_config(&m, &start)));
            let expect = simulate_tm(&m, &w, 10_000).unwrap().last;
            assert_eq!(decode_config(&m, &got).unwrap(), expect, "input {s:?}");
        }
    }

    #[test]
    fn trans_fixes_final_configs() {
        let m = flip();
        let c = TMConfig {
            left: vec![1],
            head: 0,
            right: vec![],
            state: m.final_state(),
        };
        let got = nf(Term::app(build_trans(&m), encode_config(&m, &c)));
        assert_eq!(got, encode_config(&m, &c));
    }

    #[test]
    fn final_extracts_tape() {
        let m = flip();
        let io = m.io_alphabet();
        let c = TMConfig {
            left: vec![0, 1],
            head: 2,
            right: vec![1, 0],
            state: 1,
        };
        let got = nf(Term::app(build_final(&m, &io), encode_config(&m, &c)));
        assert_eq!(io.render(&decode_word(io.len(), &got).unwrap()), "0110");
        let all = m.alphabet().clone();
        let got = nf(Term::app(build_final(&m, &all), encode_config(&m, &c)));
        assert_eq!(all.render(&decode_word(all.len(), &got).unwrap()), "01_10");
    }

    #[test]
    fn compiled_flip() {
        let m = flip();
        let io = m.io_alphabet();
        let r = run_compiled(&m, &io, "011", 100_000).unwrap();
        assert_eq!(r.output, "100");
        assert_eq!(r.tm_steps, 4);
        assert!(r.lambda_cost > 0);
        let r = run_compiled(&m, &io, "", 100_000).unwrap();
        assert_eq!(r.output, "");
    }

    #[test]
    fn compiled_over_full_alphabet_keeps_blanks() {
        let m = flip();
        let all = m.alphabet().clone();
        let r = run_compiled(&m, &all, "01", 100_000).unwrap();
        assert_eq!(r.output, "10_");
    }
}
