//! Closed convex feasible sets for the upper-level variable, Euclidean
//! projections onto them, and the proximal gradient mapping
//! `G_α(λ) = (λ − P(λ − α g))/α` used to measure constrained stationarity.

use crate::{Error, Result, UlVector};

/// A closed convex subset of the upper-level space.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FeasibleSet {
    /// The whole space; projection is the identity.
    FullSpace,
    /// Axis-aligned box `[lower, upper]` (componentwise).
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Euclidean ball of a given center and radius.
    Ball { center: Vec<f64>, radius: f64 },
}

impl FeasibleSet {
    pub fn full_space() -> Self {
        FeasibleSet::FullSpace
    }

    pub fn symmetric_box(dim: usize, half_width: f64) -> Self {
        FeasibleSet::Box {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
        }
    }

    /// Checks well-formedness: box bounds ordered, ball radius positive.
    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::FullSpace => Ok(()),
            FeasibleSet::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::config("box bounds have mismatched dimensions"));
                }
                if lower.iter().zip(upper).any(|(l, u)| l > u) {
                    return Err(Error::config("box requires lower <= upper componentwise"));
                }
                Ok(())
            }
            FeasibleSet::Ball { radius, .. } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::config("ball requires radius > 0"))
                }
            }
        }
    }

    /// Largest Euclidean norm attained on the set, if the set is bounded.
    pub fn max_norm(&self) -> Option<f64> {
        match self {
            FeasibleSet::FullSpace => None,
            FeasibleSet::Box { lower, upper } => Some(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            FeasibleSet::Ball { center, radius } => {
                Some(center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius)
            }
        }
    }

    /// Euclidean distance from `point` to the set (0 when feasible).
    pub fn distance(&self, point: &UlVector) -> f64 {
        match self.project_unchecked(point) {
            Ok(p) => p.dist(point),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn contains(&self, point: &UlVector, tol: f64) -> bool {
        self.distance(point) <= tol
    }

    fn project_unchecked(&self, point: &UlVector) -> Result<UlVector> {
        match self {
            FeasibleSet::FullSpace => Ok(point.clone()),
            FeasibleSet::Box { lower, upper } => {
                if lower.len() != point.dim() {
                    return Err(Error::config("box dimension does not match point"));
                }
                Ok(UlVector::new(
                    point
                        .as_slice()
                        .iter()
                        .zip(lower.iter().zip(upper))
                        .map(|(x, (l, u))| x.max(*l).min(*u))
                        .collect(),
                ))
            }
            FeasibleSet::Ball { center, radius } => {
                if center.len() != point.dim() {
                    return Err(Error::config("ball dimension does not match point"));
                }
                let diff: Vec<f64> = point
                    .as_slice()
                    .iter()
                    .zip(center)
                    .map(|(x, c)| x - c)
                    .collect();
                let norm = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm <= *radius {
                    Ok(point.clone())
                } else {
                    let s = radius / norm;
                    Ok(UlVector::new(
                        center.iter().zip(&diff).map(|(c, d)| c + s * d).collect(),
                    ))
                }
            }
        }
    }
}

/// Euclidean projection of `point` onto `set`.
pub fn project(set: &FeasibleSet, point: &UlVector) -> Result<UlVector> {
    set.validate()?;
    set.project_unchecked(point)
}

/// Proximal gradient mapping `G_α(λ) = (λ − P(λ − α·grad))/α`.
///
/// On the full space this reduces to `grad`; it vanishes exactly at
/// constrained stationary points.
pub fn prox_grad_mapping(
    lambda: &UlVector,
    grad: &UlVector,
    alpha: f64,
    set: &FeasibleSet,
) -> Result<UlVector> {
    if !(alpha > 0.0) {
        return Err(Error::config("prox_grad_mapping requires alpha > 0"));
    }
    let step = lambda.sub(&grad.scale(alpha));
    let projected = project(set, &step)?;
    Ok(lambda.sub(&projected).scale(1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_projection_is_identity() {
        let p = UlVector::new(vec![3.0, -1.0]);
        let out = project(&FeasibleSet::FullSpace, &p).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn box_projection_clamps() {
        let set = FeasibleSet::Box {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        let out = project(&set, &UlVector::new(vec![2.0, -0.5])).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn ball_projection_scales_onto_boundary() {
        let set = FeasibleSet::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let p = UlVector::new(vec![3.0, 4.0]);
        let out = project(&set, &p).unwrap();
        assert!((out[0] - 0.6).abs() < 1e-12);
        assert!((out[1] - 0.8).abs() < 1e-12);

        // Independent oracle: the projection minimizes ‖x − p‖ over the ball;
        // scan a fine grid of the boundary and check nothing beats it.
        let best = out.dist(&p);
        let steps = 20_000;
        for k in 0..steps {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            let cand = UlVector::new(vec![theta.cos(), theta.sin()]);
            assert!(cand.dist(&p) >= best - 1e-7);
        }
    }

    #[test]
    fn malformed_box_is_a_configuration_error() {
        let set = FeasibleSet::Box {
            lower: vec![1.0],
            upper: vec![0.0],
        };
        assert!(matches!(
            project(&set, &UlVector::new(vec![0.5])),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn prox_mapping_examples() {
        // Unconstrained case reduces to the gradient.
        let g = UlVector::new(vec![0.3, -2.0]);
        let out = prox_grad_mapping(
            &UlVector::new(vec![10.0, 4.0]),
            &g,
            0.7,
            &FeasibleSet::FullSpace,
        )
        .unwrap();
        assert!(out.sub(&g).norm() < 1e-12);

        let unit_box = FeasibleSet::Box {
            lower: vec![0.0],
            upper: vec![1.0],
        };
        // λ = 0, grad = 1, α = 0.5: projection of −0.5 onto [0,1] is 0, so G = 0.
        let out = prox_grad_mapping(
            &UlVector::new(vec![0.0]),
            &UlVector::new(vec![1.0]),
            0.5,
            &unit_box,
        )
        .unwrap();
        assert!(out[0].abs() < 1e-12);

        // Interior point: projection inactive, mapping equals the gradient.
        let out = prox_grad_mapping(
            &UlVector::new(vec![0.5]),
            &UlVector::new(vec![0.2]),
            0.5,
            &unit_box,
        )
        .unwrap();
        assert!((out[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_alpha_rejected() {
        let res = prox_grad_mapping(
            &UlVector::new(vec![0.0]),
            &UlVector::new(vec![1.0]),
            0.0,
            &FeasibleSet::FullSpace,
        );
        assert!(matches!(res, Err(crate::Error::Config(_))));
    }
}
