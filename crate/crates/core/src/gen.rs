//! Seeded random term generation for property checks and benchmarks.

use rand::Rng;

use crate::term::Term;

/// Generates terms of an exact size. Free variables are drawn from `free`;
/// with an empty list every generated term is closed.
#[derive(Debug, Clone)]
pub struct TermGen<'a> {
    pub free: &'a [&'a str],
    /// Probability of choosing an abstraction when an application also fits.
    pub abs_bias: f64,
}

impl Default for TermGen<'_> {
    fn default() -> Self {
        TermGen {
            free: &[],
            abs_bias: 0.35,
        }
    }
}

impl TermGen<'_> {
    fn leaf_possible(&self, depth: usize) -> bool {
        depth > 0 || !self.free.is_empty()
    }

    fn feasible(&self, size: u64, depth: usize) -> bool {
        size >= 2 || (size == 1 && self.leaf_possible(depth))
    }

    /// A term of exactly `size` symbols whose loose indices are below `depth`.
    ///
    /// Panics if no such term exists (size 0, or size 1 with no variable in scope).
    pub fn term<R: Rng + ?Sized>(&self, rng: &mut R, size: u64, depth: usize) -> Term {
        assert!(
            self.feasible(size, depth),
            "no term of size {size} at depth {depth}"
        );
        if size == 1 {
            let k = rng.random_range(0..depth + self.free.len());
            return if k < depth {
                Term::bound(k)
            } else {
                Term::free(self.free[k - depth])
            };
        }
        let splits: Vec<u64> = (1..size - 1)
            .filter(|&l| self.feasible(l, depth) && self.feasible(size - 1 - l, depth))
            .collect();
        if splits.is_empty() || rng.random_bool(self.abs_bias) {
            return Term::abs(self.term(rng, size - 1, depth + 1));
        }
        let left = splits[rng.random_range(0..splits.len())];
        let f = self.term(rng, left, depth);
        let a = self.term(rng, size - 1 - left, depth);
        Term::app(f, a)
    }

    /// A value (abstraction, or a free variable when size is 1) of exactly `size`.
    pub fn value<R: Rng + ?Sized>(&self, rng: &mut R, size: u64) -> Term {
        assert!(size >= 2, "closed values have size at least 2");
        Term::abs(self.term(rng, size - 1, 1))
    }
}
