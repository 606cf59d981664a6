//! Weighted call-by-value reduction.
//!
//! A redex `(λx.M)V` fires only when `V` is a value and the redex does not
//! sit under an abstraction. Each step is charged `max{1, |N| - |M|}` where
//! `M` and `N` are the whole term before and after.

use std::fmt;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::term::{occurrences_top, substitute_top, Term, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Fun,
    Arg,
}

/// Path from the root to a redex through application nodes only.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RedexPosition(pub Vec<Side>);

impl RedexPosition {
    pub fn root() -> RedexPosition {
        RedexPosition(Vec::new())
    }
}

impl fmt::Display for RedexPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, side) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            f.write_str(match side {
                Side::Fun => "F",
                Side::Arg => "A",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("position {0} does not address a redex")]
    InvalidPosition(String),
    #[error("cost counter overflowed")]
    CostOverflow,
    #[error("reduct would have more than u64::MAX symbols")]
    SizeOverflow,
}

fn is_redex(t: &Term) -> bool {
    match t.kind() {
        TermKind::App(f, a) => f.is_abs() && a.is_value(),
        _ => false,
    }
}

/// All redex positions outside abstractions, left to right.
pub fn find_redexes(t: &Term) -> Vec<RedexPosition> {
    fn go(t: &Term, path: &mut Vec<Side>, out: &mut Vec<RedexPosition>) {
        if let TermKind::App(f, a) = t.kind() {
            if is_redex(t) {
                // Neither side of a redex can contain another redex.
                out.push(RedexPosition(path.clone()));
                return;
            }
            path.push(Side::Fun);
            go(f, path, out);
            path.pop();
            path.push(Side::Arg);
            go(a, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// First (or last) redex in left-to-right order without listing the others.
fn extreme_redex(t: &Term, rightmost: bool) -> Option<RedexPosition> {
    fn go(t: &Term, rightmost: bool, path: &mut Vec<Side>) -> bool {
        match t.kind() {
            TermKind::App(f, a) => {
                if f.is_abs() && a.is_value() {
                    return true;
                }
                let order = if rightmost {
                    [(Side::Arg, a), (Side::Fun, f)]
                } else {
                    [(Side::Fun, f), (Side::Arg, a)]
                };
                for (side, sub) in order {
                    path.push(side);
                    if go(sub, rightmost, path) {
                        return true;
                    }
                    path.pop();
                }
                false
            }
            _ => false,
        }
    }
    let mut path = Vec::new();
    go(t, rightmost, &mut path).then_some(RedexPosition(path))
}

pub fn leftmost_redex(t: &Term) -> Option<RedexPosition> {
    extreme_redex(t, false)
}

pub fn rightmost_redex(t: &Term) -> Option<RedexPosition> {
    extreme_redex(t, true)
}

fn contract(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::App(f, a) if a.is_value() => f.abs_body().map(|body| substitute_top(body, a)),
        _ => None,
    }
}

fn rewrite_at(t: &Term, path: &[Side]) -> Option<Term> {
    match path.split_first() {
        None => contract(t),
        Some((side, rest)) => match t.kind() {
            TermKind::App(f, a) => Some(match side {
                Side::Fun => Term::app(rewrite_at(f, rest)?, a.clone()),
                Side::Arg => Term::app(f.clone(), rewrite_at(a, rest)?),
            }),
            _ => None,
        },
    }
}

/// Refuses steps whose result could not be represented, before building it.
fn check_reduct_size(t: &Term, pos: &RedexPosition) -> Result<(), EngineError> {
    let invalid = || EngineError::InvalidPosition(pos.to_string());
    let mut redex = t;
    for side in &pos.0 {
        redex = match (redex.kind(), side) {
            (TermKind::App(f, _), Side::Fun) => f,
            (TermKind::App(_, a), Side::Arg) => a,
            _ => return Err(invalid()),
        };
    }
    let TermKind::App(f, a) = redex.kind() else {
        return Err(invalid());
    };
    let body = f.abs_body().ok_or_else(invalid)?;
    let k = occurrences_top(body).ok_or(EngineError::SizeOverflow)?;
    (body.size() - k)
        .checked_add(
            k.checked_mul(a.size() - 1)
                .ok_or(EngineError::SizeOverflow)?,
        )
        .and_then(|r| (t.size() - redex.size()).checked_add(r))
        .map(|_| ())
        .ok_or(EngineError::SizeOverflow)
}

/// Per-step charge of the difference cost model.
pub fn step_cost(size_before: u64, size_after: u64) -> u64 {
    size_after.saturating_sub(size_before).max(1)
}

/// Fires the redex at `pos` and returns the reduct with its cost.
pub fn step_at(t: &Term, pos: &RedexPosition) -> Result<(Term, u64), EngineError> {
    check_reduct_size(t, pos)?;
    let reduct =
        rewrite_at(t, &pos.0).ok_or_else(|| EngineError::InvalidPosition(pos.to_string()))?;
    let cost = step_cost(t.size(), reduct.size());
    Ok((reduct, cost))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    /// Uniform choice among the available redexes, driven by a seeded stream.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub position: RedexPosition,
    pub cost: u64,
    pub size_after: u64,
}

/// The cost sequence of a reduction together with where each step fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTrace {
    pub initial_size: u64,
    pub steps: Vec<StepRecord>,
    total: u64,
}

impl CostTrace {
    pub fn new(initial_size: u64) -> CostTrace {
        CostTrace {
            initial_size,
            steps: Vec::new(),
            total: 0,
        }
    }

    pub fn push(&mut self, record: StepRecord) -> Result<(), EngineError> {
        self.total = self
            .total
            .checked_add(record.cost)
            .ok_or(EngineError::CostOverflow)?;
        self.steps.push(record);
        Ok(())
    }

    /// Sum of the step costs.
    pub fn total_cost(&self) -> u64 {
        self.total
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Total cost plus the size of the starting term.
    pub fn time(&self) -> Result<u64, EngineError> {
        self.total
            .checked_add(self.initial_size)
            .ok_or(EngineError::CostOverflow)
    }

    pub fn costs(&self) -> impl Iterator<Item = u64> + '_ {
        self.steps.iter().map(|s| s.cost)
    }

    /// CSV with header `step,cost,size_after,position`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "cost", "size_after", "position"])?;
        for (i, s) in self.steps.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.cost.to_string(),
                s.size_after.to_string(),
                s.position.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    NormalForm { term: Term, trace: CostTrace },
    FuelExhausted { term: Term, trace: CostTrace },
}

impl ReductionOutcome {
    pub fn term(&self) -> &Term {
        match self {
            ReductionOutcome::NormalForm { term, .. }
            | ReductionOutcome::FuelExhausted { term, .. } => term,
        }
    }

    pub fn trace(&self) -> &CostTrace {
        match self {
            ReductionOutcome::NormalForm { trace, .. }
            | ReductionOutcome::FuelExhausted { trace, .. } => trace,
        }
    }

    pub fn is_normal_form(&self) -> bool {
        matches!(self, ReductionOutcome::NormalForm { .. })
    }

    /// Time of the starting term; `None` unless a normal form was reached.
    pub fn time(&self) -> Result<Option<u64>, EngineError> {
        match self {
            ReductionOutcome::NormalForm { trace, .. } => trace.time().map(Some),
            ReductionOutcome::FuelExhausted { .. } => Ok(None),
        }
    }
}

/// Reduces until no redex is left or `fuel` steps have been taken.
pub fn normalize(t: &Term, strategy: Strategy, fuel: u64) -> Result<ReductionOutcome, EngineError> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut term = t.clone();
    let mut trace = CostTrace::new(t.size());
    loop {
        let pos = match strategy {
            Strategy::Leftmost => leftmost_redex(&term),
            Strategy::Rightmost => rightmost_redex(&term),
            Strategy::Random(_) => {
                let mut all = find_redexes(&term);
                if all.is_empty() {
                    None
                } else {
                    let rng = rng.as_mut().expect("random strategy carries a generator");
                    let k = rng.random_range(0..all.len());
                    Some(all.swap_remove(k))
                }
            }
        };
        let Some(pos) = pos else {
            return Ok(ReductionOutcome::NormalForm { term, trace });
        };
        if trace.step_count() as u64 >= fuel {
            return Ok(ReductionOutcome::FuelExhausted { term, trace });
        }
        let (next, cost) = step_at(&term, &pos)?;
        trace.push(StepRecord {
            position: pos,
            cost,
            size_after: next.size(),
        })?;
        term = next;
    }
}

/// Time of a term, or `Infinite` when no normal form appears within `fuel` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMeasure {
    Finite(u64),
    InfiniteWithinFuel,
}

pub fn time_of(t: &Term, fuel: u64) -> Result<TimeMeasure, EngineError> {
    Ok(match normalize(t, Strategy::Leftmost, fuel)?.time()? {
        Some(n) => TimeMeasure::Finite(n),
        None => TimeMeasure::InfiniteWithinFuel,
    })
}

/// Replays `trace` from `initial`, checking every recorded size and cost.
/// Returns the final term.
pub fn replay(initial: &Term, trace: &CostTrace) -> Result<Term, String> {
    if initial.size() != trace.initial_size {
        return Err(format!(
            "initial size {} does not match recorded {}",
            initial.size(),
            trace.initial_size
        ));
    }
    let mut term = initial.clone();
    for (i, rec) in trace.steps.iter().enumerate() {
        let (next, cost) =
            step_at(&term, &rec.position).map_err(|e| format!("step {}: {e}", i + 1))?;
        if cost != rec.cost || next.size() != rec.size_after {
            return Err(format!(
                "step {}: recorded (cost {}, size {}), replayed (cost {}, size {})",
                i + 1,
                rec.cost,
                rec.size_after,
                cost,
                next.size()
            ));
        }
        term = next;
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn no_redex_under_lambda() {
        assert!(find_redexes(&p("\\x.(\\y.y) x")).is_empty());
    }

    #[test]
    fn argument_must_be_a_value() {
        let r = find_redexes(&p("(\\x.x)((\\y.y)(\\z.z))"));
        assert_eq!(r, vec![RedexPosition(vec![Side::Arg])]);
    }

    #[test]
    fn two_independent_redexes() {
        let t = p("((\\x.x)(\\y.y))((\\x.x)(\\y.y))");
        let r = find_redexes(&t);
        assert_eq!(
            r,
            vec![
                RedexPosition(vec![Side::Fun]),
                RedexPosition(vec![Side::Arg])
            ]
        );
        assert_eq!(leftmost_redex(&t), Some(r[0].clone()));
        assert_eq!(rightmost_redex(&t), Some(r[1].clone()));
    }

    #[test]
    fn step_costs() {
        let (n, c) = step_at(&p("(\\x.x)(\\y.y)"), &RedexPosition::root()).unwrap();
        assert_eq!((n, c), (p("\\y.y"), 1));
        let (n, c) = step_at(&p("(\\x.z x x x)(\\y.\\w.\\u.u)"), &RedexPosition::root()).unwrap();
        assert_eq!(n, p("z (\\y.\\w.\\u.u) (\\y.\\w.\\u.u) (\\y.\\w.\\u.u)"));
        assert_eq!(n.size(), 16);
        assert_eq!(c, 3);
    }

    #[test]
    fn invalid_position() {
        assert!(matches!(
            step_at(&p("\\x.x"), &RedexPosition::root()),
            Err(EngineError::InvalidPosition(_))
        ));
        assert!(step_at(&p("x y"), &RedexPosition(vec![Side::Fun])).is_err());
    }

    #[test]
    fn identity_application() {
        for s in [Strategy::Leftmost, Strategy::Rightmost, Strategy::Random(7)] {
            let out = normalize(&p("(\\x.x)(\\y.y)"), s, 10).unwrap();
            assert!(out.is_normal_form());
            assert_eq!(out.term(), &p("\\y.y"));
            assert_eq!(out.trace().step_count(), 1);
            assert_eq!(out.trace().total_cost(), 1);
        }
        assert_eq!(
            time_of(&p("(\\x.x)(\\y.y)"), 10).unwrap(),
            TimeMeasure::Finite(6)
        );
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        let out = normalize(&p("(\\x.x x)(\\x.x x)"), Strategy::Leftmost, 1000).unwrap();
        assert!(!out.is_normal_form());
        assert_eq!(out.trace().step_count(), 1000);
        assert_eq!(
            time_of(&p("(\\x.x x)(\\x.x x)"), 50).unwrap(),
            TimeMeasure::InfiniteWithinFuel
        );
    }

    #[test]
    fn values_cost_their_size() {
        let v = p("\\x.\\y.x y y");
        assert_eq!(time_of(&v, 1).unwrap(), TimeMeasure::Finite(v.size()));
    }

    #[test]
    fn trace_csv_and_replay() {
        let t = p("((\\x.x)(\\y.y))((\\x.x x)(\\y.y))");
        let out = normalize(&t, Strategy::Rightmost, 100).unwrap();
        assert_eq!(&replay(&t, out.trace()).unwrap(), out.term());
        let mut buf = Vec::new();
        out.trace().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,cost,size_after,position"));
        assert_eq!(lines.next(), Some("1,1,11,A"));
    }

    #[test]
    fn replay_detects_tampering() {
        let t = p("(\\x.x)(\\y.y)");
        let out = normalize(&t, Strategy::Leftmost, 10).unwrap();
        let mut bad = out.trace().clone();
        bad.steps[0].cost = 2;
        assert!(replay(&t, &bad).is_err());
    }

    #[test]
    fn random_strategy_is_reproducible() {
        let t = p("((\\x.x)(\\y.y))((\\x.x)(\\y.y)) ((\\x.x)(\\y.y))");
        let a = normalize(&t, Strategy::Random(3), 100).unwrap();
        let b = normalize(&t, Strategy::Random(3), 100).unwrap();
        assert_eq!(a, b);
    }
}
