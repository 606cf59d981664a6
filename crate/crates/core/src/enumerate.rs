//! Exhaustive enumeration of closed terms by size.

use thiserror::Error;

use crate::term::Term;

/// Largest size accepted by [`enumerate_closed_terms`].
pub const MAX_ENUMERATION_SIZE: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration size {requested} exceeds the guardrail of {MAX_ENUMERATION_SIZE}")]
pub struct GuardrailError {
    pub requested: u64,
}

/// All closed terms of size `<= max_size`, ordered by size. The output for
/// `k` is a prefix of the output for `k + 1`.
pub fn enumerate_closed_terms(max_size: u64) -> Result<Vec<Term>, GuardrailError> {
    if max_size > MAX_ENUMERATION_SIZE {
        return Err(GuardrailError {
            requested: max_size,
        });
    }
    let n = max_size as usize;
    // table[s][d]: terms of size s whose loose indices are all < d.
    let mut table: Vec<Vec<Vec<Term>>> = vec![vec![Vec::new(); n + 1]; n + 1];
    for s in 1..=n {
        // A term of size s sits under at most n - s binders of a size-n term.
        for d in 0..=(n - s) {
            let mut out = Vec::new();
            if s == 1 {
                out.extend((0..d).map(Term::bound));
            } else {
                out.extend(table[s - 1][d + 1].iter().cloned().map(Term::abs));
                for left in 1..s - 1 {
                    let right = s - 1 - left;
                    for f in &table[left][d] {
                        for a in &table[right][d] {
                            out.push(Term::app(f.clone(), a.clone()));
                        }
                    }
                }
            }
            table[s][d] = out;
        }
    }
    Ok((1..=n).flat_map(|s| table[s][0].iter().cloned()).collect())
}
