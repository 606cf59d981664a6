//! Locally-nameless lambda terms.
//!
//! Bound variables are deBruijn indices, free variables keep their names.
//! Every node caches its size and a scoping summary so that substitution
//! can skip subterms that cannot mention the variable being replaced.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// An immutable lambda term. Cloning is a reference-count bump.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: TermKind,
    size: u64,
    /// `1 + max(index - binders above it)` over all bound occurrences, 0 when
    /// every index is captured inside this subterm.
    loose: usize,
    has_free: bool,
}

/// The four shapes a term can take.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    Bound(usize),
    Free(Arc<str>),
    Abs(Term),
    App(Term, Term),
}

fn add_size(parts: &[u64]) -> u64 {
    parts
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_add(p))
        .expect("term size overflows u64")
}

impl Term {
    fn from_kind(kind: TermKind) -> Term {
        let (size, loose, has_free) = match &kind {
            TermKind::Bound(i) => (1, i + 1, false),
            TermKind::Free(_) => (1, 0, true),
            TermKind::Abs(body) => (
                add_size(&[body.size()]),
                body.0.loose.saturating_sub(1),
                body.0.has_free,
            ),
            TermKind::App(f, a) => (
                add_size(&[f.size(), a.size()]),
                f.0.loose.max(a.0.loose),
                f.0.has_free || a.0.has_free,
            ),
        };
        Term(Arc::new(Node {
            kind,
            size,
            loose,
            has_free,
        }))
    }

    pub fn bound(index: usize) -> Term {
        Term::from_kind(TermKind::Bound(index))
    }

    pub fn free(name: &str) -> Term {
        Term::from_kind(TermKind::Free(Arc::from(name)))
    }

    pub fn abs(body: Term) -> Term {
        Term::from_kind(TermKind::Abs(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::from_kind(TermKind::App(fun, arg))
    }

    /// Left-nested application `fun a1 a2 ... an`.
    pub fn apps<I>(fun: Term, args: I) -> Term
    where
        I: IntoIterator<Item = Term>,
    {
        args.into_iter().fold(fun, Term::app)
    }

    /// Named abstraction: binds every free occurrence of `name` in `body`.
    pub fn lam(name: &str, body: Term) -> Term {
        Term::abs(body.close(name, 0))
    }

    /// `lam` over several names, outermost first.
    pub fn lams(names: &[&str], body: Term) -> Term {
        names.iter().rev().fold(body, |acc, n| Term::lam(n, acc))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Symbol count: variables count 1, each abstraction and application adds 1.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Variables and abstractions are values.
    pub fn is_value(&self) -> bool {
        !matches!(self.kind(), TermKind::App(..))
    }

    /// No bound index escapes the term.
    pub fn is_well_scoped(&self) -> bool {
        self.0.loose == 0
    }

    pub fn is_closed(&self) -> bool {
        self.0.loose == 0 && !self.0.has_free
    }

    pub fn has_free_vars(&self) -> bool {
        self.0.has_free
    }

    pub fn is_abs(&self) -> bool {
        matches!(self.kind(), TermKind::Abs(_))
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Distinct free variable names, in first-occurrence order.
    pub fn free_names(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !t.0.has_free {
                continue;
            }
            match t.kind() {
                TermKind::Free(n) => {
                    if !out.iter().any(|m| m == n) {
                        out.push(n.clone());
                    }
                }
                TermKind::Bound(_) => {}
                TermKind::Abs(b) => stack.push(b),
                TermKind::App(f, a) => {
                    stack.push(a);
                    stack.push(f);
                }
            }
        }
        out
    }

    fn close(&self, name: &str, depth: usize) -> Term {
        if !self.0.has_free {
            return self.clone();
        }
        match self.kind() {
            TermKind::Free(n) if &**n == name => Term::bound(depth),
            TermKind::Free(_) | TermKind::Bound(_) => self.clone(),
            TermKind::Abs(b) => Term::abs(b.close(name, depth + 1)),
            TermKind::App(f, a) => Term::app(f.close(name, depth), a.close(name, depth)),
        }
    }

    /// Body of an abstraction, if this is one.
    pub fn abs_body(&self) -> Option<&Term> {
        match self.kind() {
            TermKind::Abs(b) => Some(b),
            _ => None,
        }
    }

    /// Whether the application spine outside any abstraction has no redex.
    pub fn is_normal(&self) -> bool {
        match self.kind() {
            TermKind::App(f, a) => !(f.is_abs() && a.is_value()) && f.is_normal() && a.is_normal(),
            _ => true,
        }
    }
}

/// Replaces the variable bound by the outermost binder of `body` with `value`.
///
/// The redex this comes from never sits under a binder, so `value` has no
/// loose indices and no shifting is needed anywhere.
pub fn substitute_top(body: &Term, value: &Term) -> Term {
    debug_assert!(value.is_well_scoped());
    subst_at(body, value, 0)
}

/// Number of occurrences of the variable bound by the outermost binder of
/// `body`, or `None` if it does not fit in a `u64`.
pub fn occurrences_top(body: &Term) -> Option<u64> {
    fn go(t: &Term, depth: usize) -> Option<u64> {
        if t.0.loose <= depth {
            return Some(0);
        }
        match t.kind() {
            TermKind::Bound(i) => Some(u64::from(*i == depth)),
            TermKind::Free(_) => Some(0),
            TermKind::Abs(b) => go(b, depth + 1),
            TermKind::App(f, a) => go(f, depth)?.checked_add(go(a, depth)?),
        }
    }
    go(body, 0)
}

fn subst_at(t: &Term, value: &Term, depth: usize) -> Term {
    if t.0.loose <= depth {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) if *i == depth => value.clone(),
        TermKind::Bound(_) | TermKind::Free(_) => t.clone(),
        TermKind::Abs(b) => Term::abs(subst_at(b, value, depth + 1)),
        TermKind::App(f, a) => Term::app(subst_at(f, value, depth), subst_at(a, value, depth)),
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.ptr_eq(other) || (self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
