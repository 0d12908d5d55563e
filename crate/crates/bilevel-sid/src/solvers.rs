//! Stochastic Krasnoselskii–Mann iterations for the lower-level problem and
//! the adjoint linear system,
//!
//! ```text
//!   w_{i+1} = w_i + η_i (Φ̂(w_i, λ, ζ_i) − w_i)
//!   v_{i+1} = v_i + η_i (∂₁Φ̂(w, λ, ζ̂_i)ᵀ v_i + rhs − v_i)
//! ```
//!
//! together with the step-size schedules under which they converge and the
//! closed-form mean-squared-error rates those schedules guarantee. One
//! schedule drives both solvers; the linear-system right-hand side is frozen
//! by the caller (it is the mini-batch gradient computed once per estimator
//! call, not resampled per iteration).

use crate::problem::{BilevelProblem, ProblemConstants};
use crate::{Error, LlVector, Result, UlVector};
use rand::RngCore;

/// Step-size sequence `η_i` for the KM solvers.
///
/// The decreasing variant is `η_i = β/(γ+i)`; the constant variant uses a
/// fixed η. Validation against a problem's constants checks the region in
/// which the convergence guarantees hold: `β > 1/(1−q²)` and
/// `γ ≥ β(1+σ̃₂)` for the decreasing schedule, `η ≤ 1/(1+σ̃₂)` for the
/// constant one, where `σ̃₂ = max{2σ'₁/(1−q)², σ₂}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum StepSchedule {
    Decreasing { beta: f64, gamma: f64 },
    Constant { eta: f64 },
}

impl StepSchedule {
    /// Step size at iteration `i`; always in (0, 1] for a well-formed
    /// schedule.
    pub fn step(&self, i: usize) -> f64 {
        match self {
            StepSchedule::Decreasing { beta, gamma } => beta / (gamma + i as f64),
            StepSchedule::Constant { eta } => *eta,
        }
    }

    /// Structural well-formedness: positive parameters and steps in (0, 1].
    pub fn validate_basic(&self) -> Result<()> {
        match self {
            StepSchedule::Decreasing { beta, gamma } => {
                if !(beta.is_finite() && gamma.is_finite() && *beta > 0.0 && *gamma > 0.0) {
                    return Err(Error::config("decreasing schedule needs beta, gamma > 0"));
                }
                if beta > gamma {
                    return Err(Error::config(
                        "decreasing schedule needs beta <= gamma so that steps stay in (0, 1]",
                    ));
                }
                Ok(())
            }
            StepSchedule::Constant { eta } => {
                if *eta > 0.0 && *eta <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::config("constant schedule needs eta in (0, 1]"))
                }
            }
        }
    }

    /// Checks that the schedule lies in the region where the convergence
    /// rates of the KM solvers are guaranteed for this problem.
    pub fn validate_for(&self, constants: &ProblemConstants) -> Result<()> {
        self.validate_basic()?;
        constants.validate()?;
        let q = constants.q;
        let sigma2_tilde = constants.sigma2_tilde();
        match self {
            StepSchedule::Decreasing { beta, gamma } => {
                let beta_min = 1.0 / (1.0 - q * q);
                if *beta <= beta_min {
                    return Err(Error::config(format!(
                        "decreasing schedule requires beta > 1/(1-q^2) = {beta_min:.6}, got {beta}"
                    )));
                }
                let gamma_min = beta * (1.0 + sigma2_tilde);
                if *gamma < gamma_min {
                    return Err(Error::config(format!(
                        "decreasing schedule requires gamma >= beta(1+sigma2_tilde) = \
                         {gamma_min:.6}, got {gamma}"
                    )));
                }
                Ok(())
            }
            StepSchedule::Constant { eta } => {
                let eta_max = 1.0 / (1.0 + sigma2_tilde);
                if *eta > eta_max {
                    return Err(Error::config(format!(
                        "constant schedule requires eta <= 1/(1+sigma2_tilde) = {eta_max:.6}, \
                         got {eta}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The canonical valid decreasing schedule for a problem:
    /// `β = margin/(1−q²)` and `γ = β(1+σ̃₂)`, with `margin > 1`.
    pub fn theorem_decreasing(constants: &ProblemConstants, margin: f64) -> Result<Self> {
        if !(margin > 1.0) {
            return Err(Error::config("margin must exceed 1"));
        }
        let beta = margin / (1.0 - constants.q * constants.q);
        let gamma = beta * (1.0 + constants.sigma2_tilde());
        let schedule = StepSchedule::Decreasing { beta, gamma };
        schedule.validate_for(constants)?;
        Ok(schedule)
    }
}

/// Closed-form bounds on the solver mean squared errors,
/// `E‖w_t − w(λ)‖² ≤ ρ(t)` and `E‖v_k − v*‖² ≤ σ(k)`, for iterations
/// started at zero.
///
/// For the decreasing schedule `ρ(t) = d_w/(γ+t)` and `σ(k) = d_v/(γ+k)`
/// with
///
/// ```text
///   d_w = max{ γB², β²σ₁/(β(1−q²)−1) }
///   d_v = max{ γ(L_E²+σ₁ᴱ)/(1−q)², 2(L_E²+σ₁ᴱ)σ'₁β²/[(1−q)²(β(1−q²)−1)] }
/// ```
///
/// and for a constant step η
///
/// ```text
///   ρ(t) = (1−η(1−q²))ᵗ B² + ησ₁/(1−q²)
///   σ(k) = (1−η(1−q²))ᵏ (L_E²+σ₁ᴱ)/(1−q)² + 2η(L_E²+σ₁ᴱ)σ'₁/[(1−q²)(1−q)²].
/// ```
///
/// `B` bounds `‖w(λ)‖`, so the zero start has squared error at most `B²`;
/// likewise the linear-system start is bounded through `E‖∇₁Ē_J‖² ≤
/// L_E²+σ₁ᴱ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctions {
    schedule: StepSchedule,
    q: f64,
    b_sq: f64,
    sigma1: f64,
    ls_start_sq: f64,
    sigma1_prime: f64,
    /// `d_w`, `d_v` for the decreasing schedule.
    pub d_w: Option<f64>,
    pub d_v: Option<f64>,
}

impl RateFunctions {
    pub fn new(constants: &ProblemConstants, schedule: &StepSchedule) -> Result<Self> {
        schedule.validate_for(constants)?;
        let q = constants.q;
        let b_sq = constants.b * constants.b;
        let ls_start_sq =
            (constants.l_e * constants.l_e + constants.sigma1_e) / (1.0 - q).powi(2);
        let (d_w, d_v) = match schedule {
            StepSchedule::Decreasing { beta, gamma } => {
                let denom = beta * (1.0 - q * q) - 1.0;
                let d_w = (gamma * b_sq).max(beta * beta * constants.sigma1 / denom);
                let d_v = (gamma * ls_start_sq)
                    .max(2.0 * ls_start_sq * constants.sigma1_prime * beta * beta / denom);
                (Some(d_w), Some(d_v))
            }
            StepSchedule::Constant { .. } => (None, None),
        };
        Ok(Self {
            schedule: *schedule,
            q,
            b_sq,
            sigma1: constants.sigma1,
            ls_start_sq,
            sigma1_prime: constants.sigma1_prime,
            d_w,
            d_v,
        })
    }

    /// Bound on `E‖w_t − w(λ)‖²`.
    pub fn rho(&self, t: usize) -> f64 {
        match self.schedule {
            StepSchedule::Decreasing { gamma, .. } => self.d_w.unwrap() / (gamma + t as f64),
            StepSchedule::Constant { eta } => {
                let contraction = 1.0 - eta * (1.0 - self.q * self.q);
                contraction.powi(t as i32) * self.b_sq + eta * self.sigma1 / (1.0 - self.q * self.q)
            }
        }
    }

    /// Bound on `E‖v_k − v*‖²`.
    pub fn sigma(&self, k: usize) -> f64 {
        match self.schedule {
            StepSchedule::Decreasing { gamma, .. } => self.d_v.unwrap() / (gamma + k as f64),
            StepSchedule::Constant { eta } => {
                let contraction = 1.0 - eta * (1.0 - self.q * self.q);
                contraction.powi(k as i32) * self.ls_start_sq
                    + 2.0 * eta * self.ls_start_sq * self.sigma1_prime
                        / ((1.0 - self.q * self.q) * (1.0 - self.q).powi(2))
            }
        }
    }
}

/// Output of a KM solve.
#[derive(Debug, Clone)]
pub struct KmRun {
    pub value: LlVector,
    pub samples_used: usize,
}

fn guard_iterate(x: &LlVector, region: Option<f64>, what: &str) -> Result<()> {
    let norm_sq = x.norm_sq();
    if !norm_sq.is_finite() {
        return Err(Error::numerical(
            format!("non-finite {what} iterate"),
            f64::NAN,
        ));
    }
    if let Some(r) = region {
        if norm_sq > r * r {
            return Err(Error::numerical(
                format!("{what} iterate left the declared constants region (radius {r})"),
                norm_sq.sqrt(),
            ));
        }
    }
    Ok(())
}

/// Stochastic KM solver for the lower-level problem. Runs `t` iterations
/// from `w0` with fresh ζ draws from `rng`; `t = 0` returns `w0` unchanged.
pub fn km_ll(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    w0: &LlVector,
    t: usize,
    schedule: &StepSchedule,
    rng: &mut dyn RngCore,
) -> Result<KmRun> {
    schedule.validate_basic()?;
    let region = problem.region_radius();
    let mut w = w0.clone();
    for i in 0..t {
        let sample = problem.sample_ll_map(&w, lambda, rng);
        let eta = schedule.step(i);
        for (wj, sj) in w.as_mut_slice().iter_mut().zip(sample.as_slice()) {
            *wj += eta * (sj - *wj);
        }
        guard_iterate(&w, region, "lower-level")?;
    }
    Ok(KmRun {
        value: w,
        samples_used: t,
    })
}

/// Stochastic KM solver for the linear system `(I − ∂₁Φ(w,λ)ᵀ) v = rhs`.
///
/// `rhs` is frozen for the whole solve; the ζ̂ draws must come from a stream
/// independent of the one used for the lower-level solve.
#[allow(clippy::too_many_arguments)]
pub fn km_ls(
    problem: &dyn BilevelProblem,
    lambda: &UlVector,
    w: &LlVector,
    rhs: &LlVector,
    v0: &LlVector,
    k: usize,
    schedule: &StepSchedule,
    rng: &mut dyn RngCore,
) -> Result<KmRun> {
    schedule.validate_basic()?;
    let mut v = v0.clone();
    for i in 0..k {
        let jvp = problem.sample_ll_jac_w_tvp(w, lambda, &v, rng);
        let eta = schedule.step(i);
        for ((vj, jj), rj) in v
            .as_mut_slice()
            .iter_mut()
            .zip(jvp.as_slice())
            .zip(rhs.as_slice())
        {
            *vj += eta * (jj + rj - *vj);
        }
        guard_iterate(&v, None, "linear-system")?;
    }
    Ok(KmRun {
        value: v,
        samples_used: k,
    })
}
