//! Call-by-value lambda calculus with the difference cost model.
//!
//! Terms are locally nameless ([`term`]). The reduction engine ([`reduce`])
//! never steps under an abstraction, so substitution needs no shifting.

pub mod bench;
pub mod encodings;
pub mod enumerate;
pub mod gen;
pub mod machine_r;
pub mod pca;
pub mod reduce;
pub mod syntax;
pub mod term;
pub mod theta;
pub mod tm;

pub use encodings::{Alphabet, AppendKind, ConvertKind, EncodingError};
pub use reduce::{normalize, CostTrace, EngineError, ReductionOutcome, Strategy};
pub use syntax::{parse_term, print_term, ParseError};
pub use term::{Term, TermKind};
pub use theta::{decode_theta, encode_theta, ThetaError, ThetaString};
