//! The bilevel problem oracle interface.
//!
//! A problem is `min_{λ∈Λ} f(λ) = E(w(λ), λ)` subject to the fixed-point
//! condition `w(λ) = Φ(w(λ), λ)`, where `Φ(·, λ)` is a q-contraction.
//! Implementations expose deterministic oracles for `E`, `Φ` and their
//! partial derivatives (Jacobians only through transposed products), plus
//! unbiased single-sample stochastic versions of each.
//!
//! Stochastic Jacobians appear only as Jacobian-vector products: the
//! estimator needs nothing else, and products cost about as much as
//! gradients.

use crate::{Error, FeasibleSet, LlVector, Result, UlVector};
use rand::RngCore;

/// Problem dimensions: `ll` is the lower-level dimension d, `ul` the
/// upper-level dimension m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Dims {
    pub ll: usize,
    pub ul: usize,
}

/// Smoothness and variance constants of a problem.
///
/// These are the quantities the convergence analysis is stated in terms of:
/// the contraction factor `q`, Lipschitz constants of the oracles in each
/// argument, bounds along the solution path and variance levels of the
/// stochastic oracles. Benchmark problems compute them analytically (never
/// estimated from samples) so that bound checks are not circular.
///
/// Matrix-valued variances (`sigma1_prime`, `sigma2_prime`) are measured in
/// the Frobenius norm, which dominates the spectral-norm deviation and keeps
/// the benchmark constants in closed form.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProblemConstants {
    /// Contraction factor of `Φ(·, λ)`; must lie in (0, 1).
    pub q: f64,
    /// Lipschitz constant of `∂₁Φ(·, λ)` in w.
    pub nu1: f64,
    /// Lipschitz constant of `∂₂Φ(·, λ)` in w.
    pub nu2: f64,
    /// Lipschitz constant of `∂₁Φ(w, ·)` in λ.
    pub nu1_bar: f64,
    /// Lipschitz constant of `∂₂Φ(w, ·)` in λ.
    pub nu2_bar: f64,
    /// Lipschitz constant of `∇₁E(·, λ)` in w.
    pub mu1: f64,
    /// Lipschitz constant of `∇₂E(·, λ)` in w.
    pub mu2: f64,
    /// Lipschitz constant of `∇₁E(w, ·)` in λ.
    pub mu1_bar: f64,
    /// Lipschitz constant of `∇₂E(w, ·)` in λ.
    pub mu2_bar: f64,
    /// Lipschitz constant of `E(·, λ)` in w, i.e. a bound on `‖∇₁E‖`
    /// (over the problem's declared iterate region when E is quadratic).
    pub l_e: f64,
    /// Bound on `‖∂₂Φ(w(λ), λ)‖` along the solution path.
    pub l_phi: f64,
    /// Bound on `‖w(λ)‖` over the feasible set.
    pub b: f64,
    /// State-independent part of `V[Φ̂]`.
    pub sigma1: f64,
    /// Growth coefficient: `V[Φ̂] ≤ σ₁ + σ₂‖Φ(w,λ) − w‖²`.
    pub sigma2: f64,
    /// Bound on `V[∂₁Φ̂]` (Frobenius).
    pub sigma1_prime: f64,
    /// Bound on `V[∂₂Φ̂]` (Frobenius).
    pub sigma2_prime: f64,
    /// Bound on `V[∇₁Ê]`.
    pub sigma1_e: f64,
    /// Bound on `V[∇₂Ê]`.
    pub sigma2_e: f64,
}

impl ProblemConstants {
    /// All-zero variances and unit smoothness; a convenient deterministic
    /// starting point for hand-built problems.
    pub fn deterministic(q: f64) -> Self {
        Self {
            q,
            nu1: 0.0,
            nu2: 0.0,
            nu1_bar: 0.0,
            nu2_bar: 0.0,
            mu1: 0.0,
            mu2: 0.0,
            mu1_bar: 0.0,
            mu2_bar: 0.0,
            l_e: 0.0,
            l_phi: 0.0,
            b: 0.0,
            sigma1: 0.0,
            sigma2: 0.0,
            sigma1_prime: 0.0,
            sigma2_prime: 0.0,
            sigma1_e: 0.0,
            sigma2_e: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::config(format!(
                "contraction factor q must lie in (0,1), got {}",
                self.q
            )));
        }
        let named = [
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("nu1_bar", self.nu1_bar),
            ("nu2_bar", self.nu2_bar),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("mu1_bar", self.mu1_bar),
            ("mu2_bar", self.mu2_bar),
            ("l_e", self.l_e),
            ("l_phi", self.l_phi),
            ("b", self.b),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("sigma1_prime", self.sigma1_prime),
            ("sigma2_prime", self.sigma2_prime),
            ("sigma1_e", self.sigma1_e),
            ("sigma2_e", self.sigma2_e),
        ];
        for (name, v) in named {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "constant {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `σ̃₂ = max{2σ'₁/(1−q)², σ₂}` — the variance scale entering step-size
    /// schedule validation.
    pub fn sigma2_tilde(&self) -> f64 {
        (2.0 * self.sigma1_prime / (1.0 - self.q).powi(2)).max(self.sigma2)
    }
}

/// Oracle bundle for a bilevel problem with a contraction lower level.
///
/// Stochastic oracles draw one sample per call from the `rng` they are
/// handed; calls with independently derived streams are independent. All
/// methods are pure given the rng state, so shared problem data can be used
/// from multiple threads.
pub trait BilevelProblem: Sync {
    fn dims(&self) -> Dims;

    /// Upper-level objective `E(w, λ)`.
    fn ul_objective(&self, w: &LlVector, lambda: &UlVector) -> f64;

    /// `∇₁E(w, λ)`.
    fn ul_grad_w(&self, w: &LlVector, lambda: &UlVector) -> LlVector;

    /// `∇₂E(w, λ)`.
    fn ul_grad_lambda(&self, w: &LlVector, lambda: &UlVector) -> UlVector;

    /// Lower-level map `Φ(w, λ)`.
    fn ll_map(&self, w: &LlVector, lambda: &UlVector) -> LlVector;

    /// `∂₁Φ(w, λ)ᵀ v`.
    fn ll_jac_w_tvp(&self, w: &LlVector, lambda: &UlVector, v: &LlVector) -> LlVector;

    /// `∂₂Φ(w, λ)ᵀ v`.
    fn ll_jac_lambda_tvp(&self, w: &LlVector, lambda: &UlVector, v: &LlVector) -> UlVector;

    /// One draw of `Φ̂(w, λ, ζ)`.
    fn sample_ll_map(&self, w: &LlVector, lambda: &UlVector, rng: &mut dyn RngCore) -> LlVector;

    /// One draw of `∂₁Φ̂(w, λ, ζ)ᵀ v`.
    fn sample_ll_jac_w_tvp(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        v: &LlVector,
        rng: &mut dyn RngCore,
    ) -> LlVector;

    /// One draw of `∂₂Φ̂(w, λ, ζ)ᵀ v`.
    fn sample_ll_jac_lambda_tvp(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        v: &LlVector,
        rng: &mut dyn RngCore,
    ) -> UlVector;

    /// One draw of `(∇₁Ê, ∇₂Ê)(w, λ, ξ)` — both partials from the same ξ.
    fn sample_ul_grads(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        rng: &mut dyn RngCore,
    ) -> (LlVector, UlVector);

    /// One draw of `∇₁Ê(w, λ, ξ)`.
    fn sample_ul_grad_w(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        rng: &mut dyn RngCore,
    ) -> LlVector {
        self.sample_ul_grads(w, lambda, rng).0
    }

    /// One draw of `∇₂Ê(w, λ, ξ)`.
    fn sample_ul_grad_lambda(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        rng: &mut dyn RngCore,
    ) -> UlVector {
        self.sample_ul_grads(w, lambda, rng).1
    }

    fn constants(&self) -> &ProblemConstants;

    fn feasible_set(&self) -> &FeasibleSet;

    /// Closed-form (or direct-solve) lower-level solution, when the problem
    /// has one. Benchmarks override this.
    fn exact_ll(&self, _lambda: &UlVector) -> Option<LlVector> {
        None
    }

    /// Minimum of `f` over the feasible set, when known; used for `Δ_f` in
    /// the descent bounds.
    fn objective_minimum(&self) -> Option<f64> {
        None
    }

    /// Radius of the declared region `‖w‖ ≤ R` on which the w-dependent
    /// constants (`l_e`, `sigma1_e`, ...) are valid. `None` means the
    /// constants hold globally. Solvers check iterates against it.
    fn region_radius(&self) -> Option<f64> {
        None
    }

    /// Upper-level objective value `f(λ) = E(w(λ), λ)` through the exact
    /// lower-level solution, when available.
    fn objective(&self, lambda: &UlVector) -> Option<f64> {
        self.exact_ll(lambda)
            .map(|w| self.ul_objective(&w, lambda))
    }
}
