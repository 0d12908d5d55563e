//! Deterministic reference solves: the lower-level fixed point, the adjoint
//! linear system, and the exact hypergradient through the implicit function
//! theorem,
//!
//! ```text
//!   ∇f(λ) = ∇₂E(w(λ), λ) + ∂₂Φ(w(λ), λ)ᵀ v(λ),
//!   (I − ∂₁Φ(w(λ), λ)ᵀ) v(λ) = ∇₁E(w(λ), λ).
//! ```
//!
//! Both solves are plain fixed-point iterations, which converge at the
//! geometric rate q and never form a matrix, so the lower-level dimension
//! need not be small. Tolerances are fixed at 1e-10 so reference values
//! dominate statistical test noise by several orders of magnitude.

use crate::problem::BilevelProblem;
use crate::{Error, LlVector, Result, UlVector};

/// Tolerance of the reference solves.
pub const REFERENCE_TOL: f64 = 1e-10;

const MAX_FIXED_POINT_ITERS: usize = 1_000_000;

/// Result of a deterministic fixed-point solve.
#[derive(Debug, Clone)]
pub struct FixedPointSolve {
    pub value: LlVector,
    /// Norm of the final step, which bounds the residual of the returned
    /// iterate by a factor q.
    pub residual: f64,
    pub iterations: usize,
}

/// Iterates `w ← Φ(w, λ)` from `w0` until `‖Φ(w) − w‖ ≤ tol·(1 + ‖w‖)`.
pub fn solve_ll_fixed_point(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    w0: &LlVector,
    tol: f64,
) -> Result<FixedPointSolve> {
    let mut w = w0.clone();
    for iter in 0..MAX_FIXED_POINT_ITERS {
        let next = problem.ll_map(&w, lambda);
        next.check_finite("lower-level fixed-point iterate")?;
        let step = next.dist(&w);
        if step <= tol * (1.0 + next.norm()) {
            return Ok(FixedPointSolve {
                value: next,
                residual: step,
                iterations: iter + 1,
            });
        }
        w = next;
    }
    Err(Error::numerical(
        "lower-level fixed-point iteration budget exhausted",
        problem.ll_map(&w, lambda).dist(&w),
    ))
}

/// Lower-level solution `w(λ)`: the problem's own direct solve when it has
/// one, otherwise the deterministic fixed-point iteration at the reference
/// tolerance.
pub fn lower_level_solution(problem: &dyn BilevelProblem, lambda: &UlVector) -> Result<LlVector> {
    if let Some(w) = problem.exact_ll(lambda) {
        return Ok(w);
    }
    let d = problem.dims().ll;
    Ok(solve_ll_fixed_point(problem, lambda, &LlVector::zeros(d), REFERENCE_TOL)?.value)
}

/// Solves `(I − ∂₁Φ(w, λ)ᵀ) v = rhs` by the fixed-point iteration
/// `v ← ∂₁Φᵀv + rhs`, to residual `1e-10·(1 + ‖rhs‖)`.
///
/// Since `‖∂₁Φ‖ ≤ q < 1`, the system matrix is invertible and the iteration
/// converges geometrically at rate q.
pub fn exact_ls_solution(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    w: &LlVector,
    rhs: &LlVector,
) -> Result<LlVector> {
    let tol = REFERENCE_TOL * (1.0 + rhs.norm());
    let mut v = rhs.clone();
    for _ in 0..MAX_FIXED_POINT_ITERS {
        let mut next = problem.ll_jac_w_tvp(w, lambda, &v);
        next.axpy(1.0, rhs);
        next.check_finite("linear-system iterate")?;
        // The step ‖v_next − v‖ equals the residual of v; the residual of
        // v_next is at most q times smaller, so returning v_next is safe.
        let step = next.dist(&v);
        if step <= tol {
            return Ok(next);
        }
        v = next;
    }
    let mut fp = problem.ll_jac_w_tvp(w, lambda, &v);
    fp.axpy(1.0, rhs);
    Err(Error::numerical(
        "linear-system iteration budget exhausted",
        fp.dist(&v),
    ))
}

/// Exact hypergradient at a supplied lower-level solution.
pub fn exact_hypergradient_at(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    w: &LlVector,
) -> Result<UlVector> {
    let rhs = problem.ul_grad_w(w, lambda);
    let v = exact_ls_solution(problem, lambda, w, &rhs)?;
    let grad = problem
        .ul_grad_lambda(w, lambda)
        .add(&problem.ll_jac_lambda_tvp(w, lambda, &v));
    grad.check_finite("hypergradient")?;
    Ok(grad)
}

/// Exact hypergradient `∇f(λ)` through the implicit function theorem.
pub fn exact_hypergradient(problem: &dyn BilevelProblem, lambda: &UlVector) -> Result<UlVector> {
    let w = lower_level_solution(problem, lambda)?;
    exact_hypergradient_at(problem, lambda, &w)
}

/// Central finite differences of `f(λ) = E(w(λ), λ)` computed through the
/// lower-level solve; the independent oracle the exact hypergradient is
/// checked against.
pub fn finite_difference_hypergradient(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    step: f64,
) -> Result<UlVector> {
    if !(step > 0.0) {
        return Err(Error::config("finite-difference step must be positive"));
    }
    let f = |point: &UlVector| -> Result<f64> {
        let w = lower_level_solution(problem, point)?;
        Ok(problem.ul_objective(&w, point))
    };
    let m = problem.dims().ul;
    let mut grad = UlVector::zeros(m);
    for j in 0..m {
        let mut plus = lambda.clone();
        plus[j] += step;
        let mut minus = lambda.clone();
        minus[j] -= step;
        grad[j] = (f(&plus)? - f(&minus)?) / (2.0 * step);
    }
    Ok(grad)
}
