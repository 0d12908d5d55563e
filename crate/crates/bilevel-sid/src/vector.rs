//! Dense double-precision vectors for the lower-level variable `w` and the
//! upper-level variable `λ`.
//!
//! The two newtypes keep d-dimensional and m-dimensional quantities apart at
//! compile time. Solver outputs are checked for finiteness; a NaN or Inf
//! entry surfaces as [`crate::Error::Numerical`] instead of propagating.

use crate::{Error, Result};

macro_rules! dense_vector {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(entries: Vec<f64>) -> Self {
                Self(entries)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(vec![0.0; dim])
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn as_mut_slice(&mut self) -> &mut [f64] {
                &mut self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|x| x.is_finite())
            }

            /// Errors out if any entry is NaN or infinite.
            pub fn check_finite(&self, context: &str) -> Result<()> {
                if self.is_finite() {
                    Ok(())
                } else {
                    Err(Error::numerical(
                        format!("non-finite entries in {context}"),
                        f64::NAN,
                    ))
                }
            }

            pub fn dot(&self, other: &Self) -> f64 {
                self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
            }

            pub fn norm_sq(&self) -> f64 {
                self.dot(self)
            }

            pub fn norm(&self) -> f64 {
                self.norm_sq().sqrt()
            }

            pub fn add(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
            }

            pub fn scale(&self, c: f64) -> Self {
                Self(self.0.iter().map(|a| c * a).collect())
            }

            /// `self += c * other`, in place.
            pub fn axpy(&mut self, c: f64, other: &Self) {
                for (a, b) in self.0.iter_mut().zip(&other.0) {
                    *a += c * b;
                }
            }

            pub fn dist(&self, other: &Self) -> f64 {
                self.sub(other).norm()
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl std::ops::IndexMut<usize> for $name {
            fn index_mut(&mut self, i: usize) -> &mut f64 {
                &mut self.0[i]
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }
    };
}

dense_vector!(
    LlVector,
    "Lower-level variable `w` (dimension d); also used for linear-system iterates `v`."
);
dense_vector!(UlVector, "Upper-level variable `λ` (dimension m).");
