//! Small hand-checkable problems shared by the unit tests.

use crate::problem::{BilevelProblem, Dims, ProblemConstants};
use crate::{FeasibleSet, LlVector, UlVector};
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

/// One-dimensional affine problem:
///
/// ```text
///   Φ(w, λ) = a·w + b·λ + c (+ noise),   E(w, λ) = ½(w − w_t)² + r/2·(λ − λ_t)²
/// ```
///
/// Everything about it is known in closed form, which makes it the fixture
/// of choice for hand-iterated solver tests and noise-scaling checks.
pub struct ScalarProblem {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub w_target: f64,
    pub ul_reg: f64,
    pub lambda_target: f64,
    pub phi_std: f64,
    pub jac_w_std: f64,
    pub jac_lambda_std: f64,
    pub grad_w_std: f64,
    pub grad_lambda_std: f64,
    pub set: FeasibleSet,
    constants: ProblemConstants,
    region: f64,
}

impl ScalarProblem {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        let mut p = Self {
            a,
            b,
            c,
            w_target: 0.0,
            ul_reg: 0.0,
            lambda_target: 0.0,
            phi_std: 0.0,
            jac_w_std: 0.0,
            jac_lambda_std: 0.0,
            grad_w_std: 0.0,
            grad_lambda_std: 0.0,
            set: FeasibleSet::symmetric_box(1, 2.0),
            constants: ProblemConstants::deterministic(a.abs().max(1e-6)),
            region: 0.0,
        };
        p.refresh_constants();
        p
    }

    pub fn deterministic(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c)
    }

    pub fn with_noise(mut self, phi: f64, jac_w: f64, jac_lambda: f64, grad_e: f64) -> Self {
        self.phi_std = phi;
        self.jac_w_std = jac_w;
        self.jac_lambda_std = jac_lambda;
        self.grad_w_std = grad_e;
        self.grad_lambda_std = grad_e;
        self.refresh_constants();
        self
    }

    pub fn with_ul_reg(mut self, r: f64, lambda_target: f64) -> Self {
        self.ul_reg = r;
        self.lambda_target = lambda_target;
        self.refresh_constants();
        self
    }

    pub fn refresh_constants(&mut self) {
        let q = self.a.abs().max(1e-6);
        let lam_max = self.set.max_norm().unwrap_or(2.0);
        let b_bound = (self.b.abs() * lam_max + self.c.abs()) / (1.0 - q);
        // generous iterate region: fixed-point ball inflated for noise excursions
        let region = 4.0 * (b_bound + 1.0) + 60.0 * self.phi_std;
        self.region = region;
        self.constants = ProblemConstants {
            q,
            nu1: 0.0,
            nu2: 0.0,
            nu1_bar: 0.0,
            nu2_bar: 0.0,
            mu1: 1.0,
            mu2: 0.0,
            mu1_bar: 0.0,
            mu2_bar: self.ul_reg,
            l_e: region + self.w_target.abs(),
            l_phi: self.b.abs(),
            b: b_bound,
            sigma1: self.phi_std.powi(2),
            sigma2: 0.0,
            sigma1_prime: self.jac_w_std.powi(2),
            sigma2_prime: self.jac_lambda_std.powi(2),
            sigma1_e: self.grad_w_std.powi(2),
            sigma2_e: self.grad_lambda_std.powi(2),
        };
    }

    fn gauss(&self, rng: &mut dyn RngCore) -> f64 {
        StandardNormal.sample(rng)
    }
}

impl BilevelProblem for ScalarProblem {
    fn dims(&self) -> Dims {
        Dims { ll: 1, ul: 1 }
    }

    fn ul_objective(&self, w: &LlVector, lambda: &UlVector) -> f64 {
        0.5 * (w[0] - self.w_target).powi(2)
            + 0.5 * self.ul_reg * (lambda[0] - self.lambda_target).powi(2)
    }

    fn ul_grad_w(&self, w: &LlVector, _lambda: &UlVector) -> LlVector {
        LlVector::new(vec![w[0] - self.w_target])
    }

    fn ul_grad_lambda(&self, _w: &LlVector, lambda: &UlVector) -> UlVector {
        UlVector::new(vec![self.ul_reg * (lambda[0] - self.lambda_target)])
    }

    fn ll_map(&self, w: &LlVector, lambda: &UlVector) -> LlVector {
        LlVector::new(vec![self.a * w[0] + self.b * lambda[0] + self.c])
    }

    fn ll_jac_w_tvp(&self, _w: &LlVector, _lambda: &UlVector, v: &LlVector) -> LlVector {
        LlVector::new(vec![self.a * v[0]])
    }

    fn ll_jac_lambda_tvp(&self, _w: &LlVector, _lambda: &UlVector, v: &LlVector) -> UlVector {
        UlVector::new(vec![self.b * v[0]])
    }

    fn sample_ll_map(&self, w: &LlVector, lambda: &UlVector, rng: &mut dyn RngCore) -> LlVector {
        let mut out = self.ll_map(w, lambda);
        out[0] += self.phi_std * self.gauss(rng);
        out
    }

    fn sample_ll_jac_w_tvp(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        v: &LlVector,
        rng: &mut dyn RngCore,
    ) -> LlVector {
        let mut out = self.ll_jac_w_tvp(w, lambda, v);
        out[0] += self.jac_w_std * self.gauss(rng) * v[0];
        out
    }

    fn sample_ll_jac_lambda_tvp(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        v: &LlVector,
        rng: &mut dyn RngCore,
    ) -> UlVector {
        let mut out = self.ll_jac_lambda_tvp(w, lambda, v);
        out[0] += self.jac_lambda_std * self.gauss(rng) * v[0];
        out
    }

    fn sample_ul_grads(
        &self,
        w: &LlVector,
        lambda: &UlVector,
        rng: &mut dyn RngCore,
    ) -> (LlVector, UlVector) {
        let mut g1 = self.ul_grad_w(w, lambda);
        g1[0] += self.grad_w_std * self.gauss(rng);
        let mut g2 = self.ul_grad_lambda(w, lambda);
        g2[0] += self.grad_lambda_std * self.gauss(rng);
        (g1, g2)
    }

    fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }

    fn exact_ll(&self, lambda: &UlVector) -> Option<LlVector> {
        Some(LlVector::new(vec![
            (self.b * lambda[0] + self.c) / (1.0 - self.a),
        ]))
    }

    fn objective_minimum(&self) -> Option<f64> {
        // f(λ) = ½(mλ + c0 − w_t)² + r/2 (λ − λ_t)², convex scalar; the
        // clamped unconstrained minimizer is the constrained one.
        let m = self.b / (1.0 - self.a);
        let c0 = self.c / (1.0 - self.a);
        let denom = m * m + self.ul_reg;
        let lam_star = if denom > 0.0 {
            (m * (self.w_target - c0) + self.ul_reg * self.lambda_target) / denom
        } else {
            0.0
        };
        let clamped = match &self.set {
            FeasibleSet::Box { lower, upper } => lam_star.max(lower[0]).min(upper[0]),
            _ => lam_star,
        };
        let lam = UlVector::new(vec![clamped]);
        let w = self.exact_ll(&lam)?;
        Some(self.ul_objective(&w, &lam))
    }

    fn region_radius(&self) -> Option<f64> {
        Some(self.region)
    }
}
