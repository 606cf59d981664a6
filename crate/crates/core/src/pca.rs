//! Closed values under application: pairs, the structural combinators, and
//! their reduction costs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::reduce::{normalize, EngineError, ReductionOutcome, Strategy};
use crate::syntax::parse_term;
use crate::term::Term;

/// A closed value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XiValue(Term);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcaError {
    #[error("term is not a closed value: {0}")]
    NotInXi(String),
    #[error("application has no normal form within {fuel} steps")]
    Undefined { fuel: u64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl XiValue {
    pub fn new(t: Term) -> Result<XiValue, PcaError> {
        if t.is_closed() && t.is_value() {
            Ok(XiValue(t))
        } else {
            Err(PcaError::NotInXi(t.to_string()))
        }
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn size(&self) -> u64 {
        self.0.size()
    }
}

impl fmt::Display for XiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `⟨V,U⟩ ≡ λx.xVU`
pub fn pair(v: &XiValue, u: &XiValue) -> XiValue {
    XiValue(Term::abs(Term::apps(
        Term::bound(0),
        [v.0.clone(), u.0.clone()],
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combinator {
    Id,
    Swap,
    Assl,
    Tens,
    Conc,
    Cont,
    Eval,
    Curry,
}

impl Combinator {
    pub const ALL: [Combinator; 8] = [
        Combinator::Id,
        Combinator::Swap,
        Combinator::Assl,
        Combinator::Tens,
        Combinator::Conc,
        Combinator::Cont,
        Combinator::Eval,
        Combinator::Curry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Combinator::Id => "id",
            Combinator::Swap => "swap",
            Combinator::Assl => "assl",
            Combinator::Tens => "tens",
            Combinator::Conc => "conc",
            Combinator::Cont => "cont",
            Combinator::Eval => "eval",
            Combinator::Curry => "curry",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Combinator::Id => "\\x.x",
            Combinator::Swap => "\\x.x (\\y.\\w.\\z.z w y)",
            Combinator::Assl => "\\x.x (\\y.\\w.w (\\z.\\q.\\r.r (\\s.s y z) q))",
            Combinator::Tens => "\\s.\\x.x (\\y.\\w.(\\x.\\z.z x w) (s y))",
            Combinator::Conc => "\\x.x (\\x.\\y.\\z.x (y z))",
            Combinator::Cont => "\\x.\\y.y x x",
            Combinator::Eval => "\\x.x (\\y.\\w.y w)",
            Combinator::Curry => "\\x.\\y.\\w.x (\\z.z y w)",
        }
    }
}

impl fmt::Display for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown combinator '{0}'")]
pub struct UnknownCombinator(pub String);

impl FromStr for Combinator {
    type Err = UnknownCombinator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Combinator::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownCombinator(s.to_string()))
    }
}

pub fn build_combinator(c: Combinator) -> XiValue {
    let t = parse_term(c.source()).expect("combinator sources parse");
    XiValue::new(t).expect("combinators are closed values")
}

/// The normal form of `UV` and the cost of reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppResult {
    pub result: XiValue,
    /// Sum of step costs, without the initial size.
    pub cost: u64,
    pub steps: u64,
}

pub fn apply_in_xi(u: &XiValue, v: &XiValue, fuel: u64) -> Result<AppResult, PcaError> {
    let t = Term::app(u.0.clone(), v.0.clone());
    match normalize(&t, Strategy::Leftmost, fuel)? {
        ReductionOutcome::NormalForm { term, trace } => Ok(AppResult {
            result: XiValue::new(term)?,
            cost: trace.total_cost(),
            steps: trace.step_count() as u64,
        }),
        ReductionOutcome::FuelExhausted { .. } => Err(PcaError::Undefined { fuel }),
    }
}

/// Costs of one combinator on concrete arguments, split into the parts that
/// should be constant and the parts spent inside the arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageCosts {
    pub combinator: Combinator,
    /// Cost of each application stage, in order.
    pub stages: Vec<u64>,
    /// Cost of the last stage minus the applications of the arguments it
    /// performs; equal to the last entry of `stages` when there are none.
    pub overhead: i64,
}

/// Measures `c` on the value triple `(v, u, w)`:
///
/// | combinator | stages |
/// |---|---|
/// | id, cont | `M V` |
/// | swap, eval | `M ⟨V,U⟩` |
/// | assl | `M ⟨V,⟨U,W⟩⟩` |
/// | tens | `M V`, then `· ⟨U,W⟩` |
/// | conc | `M ⟨V,U⟩`, then `· W` |
/// | curry | `M V`, then `· U`, then `· W` |
pub fn measure(
    c: Combinator,
    v: &XiValue,
    u: &XiValue,
    w: &XiValue,
    fuel: u64,
) -> Result<StageCosts, PcaError> {
    let m = build_combinator(c);
    let app = |f: &XiValue, x: &XiValue| apply_in_xi(f, x, fuel);
    let (stages, inner) = match c {
        Combinator::Id | Combinator::Cont => (vec![app(&m, v)?.cost], 0),
        Combinator::Swap => (vec![app(&m, &pair(v, u))?.cost], 0),
        Combinator::Eval => (vec![app(&m, &pair(v, u))?.cost], app(v, u)?.cost),
        Combinator::Assl => (vec![app(&m, &pair(v, &pair(u, w)))?.cost], 0),
        Combinator::Tens => {
            let s1 = app(&m, v)?;
            let s2 = app(&s1.result, &pair(u, w))?;
            (vec![s1.cost, s2.cost], app(v, u)?.cost)
        }
        Combinator::Conc => {
            let s1 = app(&m, &pair(v, u))?;
            let s2 = app(&s1.result, w)?;
            let uw = app(u, w)?;
            let inner = uw.cost + app(v, &uw.result)?.cost;
            (vec![s1.cost, s2.cost], inner)
        }
        Combinator::Curry => {
            let s1 = app(&m, v)?;
            let s2 = app(&s1.result, u)?;
            let s3 = app(&s2.result, w)?;
            (vec![s1.cost, s2.cost, s3.cost], app(v, &pair(u, w))?.cost)
        }
    };
    let last = *stages.last().expect("at least one stage");
    Ok(StageCosts {
        combinator: c,
        stages,
        overhead: last as i64 - inner as i64,
    })
}
