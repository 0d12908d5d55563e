//! Hypergradient estimation and bilevel optimization for problems whose
//! lower level is the fixed point of a stochastic contraction map.
//!
//! The library covers the whole pipeline at desk scale:
//!
//! * [`problem::BilevelProblem`] — an oracle interface for bilevel problems
//!   `min f(λ) = E(w(λ), λ)` subject to `w(λ) = Φ(w(λ), λ)`, with both
//!   deterministic and single-sample stochastic oracles.
//! * [`hypergrad`] — reference (deterministic) lower-level and linear-system
//!   solves and the exact hypergradient via implicit differentiation.
//! * [`solvers`] — stochastic Krasnoselskii–Mann iterations for the lower
//!   level and the linear system, with validated step-size schedules.
//! * [`sid`] — the stochastic implicit differentiation estimator: a lower
//!   level solve, mini-batch gradient estimates, a linear-system solve and
//!   the assembled approximate hypergradient, plus Monte Carlo MSE probes.
//! * [`bsgm`] — projected inexact gradient descent driven by fresh SID calls
//!   each iteration (no warm-start), with exact sample accounting.
//! * [`bounds`] — every smoothness/variance constant and error bound of the
//!   underlying convergence analysis in closed form, so experiments can be
//!   checked against theory.
//! * [`problems`] — analytic benchmark problems with known constants and
//!   closed-form solutions.
//! * [`harness`] — seeded, reproducible experiment drivers emitting CSV/JSON
//!   reports; also backs the `bilevel-sid` command line tool.
//!
//! The `book/` directory of the repository walks through the concepts with
//! runnable snippets; those snippets double as doc-tests (see the end of this
//! file).

pub mod bounds;
pub mod bsgm;
pub mod harness;
pub mod hypergrad;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod set;
pub mod sid;
pub mod solvers;
pub mod stream;
pub mod vector;

mod error;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use problem::{BilevelProblem, Dims, ProblemConstants};
pub use set::FeasibleSet;
pub use stream::SeedStream;
pub use vector::{LlVector, UlVector};

// Book chapters contain runnable snippets; compiling them as doc-tests keeps
// the guide in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/hypergradients.md")]
    mod hypergradients {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/estimator.md")]
    mod estimator {}
    #[doc = include_str!("../../../book/src/bsgm.md")]
    mod bsgm {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
