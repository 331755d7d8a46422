//! Functions on the lattice `{0, 1/M, ..., 1}^L` and the discrete copula axioms.
//!
//! A grid point `(i_1/M, ..., i_L/M)` is addressed by its integer coordinates
//! `(i_1, ..., i_L)`, each in `0..=M`. Values are stored densely in row-major
//! order with the first coordinate varying slowest.

use crate::error::{Error, Result};
use crate::lattice;
use crate::report::{Axiom, AxiomReport, Violation, Witness};

/// Default tolerance for all floating-point axiom comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    resolution: usize,
    dim: usize,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps `(M+1)^L` row-major values.
    pub fn new(resolution: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if resolution == 0 || dim == 0 {
            return Err(Error::EmptyShape { resolution, dim });
        }
        let expected = lattice::dense_len(resolution + 1, dim)?;
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                found: values.len(),
            });
        }
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinite { position, value });
        }
        Ok(GridFunction {
            resolution,
            dim,
            strides: lattice::strides(&vec![resolution + 1; dim]),
            values,
        })
    }

    /// Tabulates `f` at every grid point.
    pub fn from_fn(resolution: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        if resolution == 0 || dim == 0 {
            return Err(Error::EmptyShape { resolution, dim });
        }
        let len = lattice::dense_len(resolution + 1, dim)?;
        let mut values = Vec::with_capacity(len);
        lattice::for_each_index(&vec![resolution + 1; dim], |idx| values.push(f(idx)));
        Self::new(resolution, dim, values)
    }

    /// `M`.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `L`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at integer coordinates, checked against the grid bounds.
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.values[lattice::offset(&self.strides, index)])
    }

    /// Value at integer coordinates.
    ///
    /// # Panics
    /// If `index` lies outside the grid.
    pub fn at(&self, index: &[usize]) -> f64 {
        debug_assert!(self.check_index(index).is_ok());
        self.values[lattice::offset(&self.strides, index)]
    }

    pub(crate) fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.dim || index.iter().any(|&i| i > self.resolution) {
            return Err(Error::IndexOutOfRange {
                index: index.to_vec(),
                resolution: self.resolution,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// Largest pointwise absolute difference; `inf` if the shapes differ.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        if self.resolution != other.resolution || self.dim != other.dim {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The independence copula `Π(u) = ∏ u_ℓ`.
pub fn product_copula(resolution: usize, dim: usize) -> Result<GridFunction> {
    let denom = (resolution as f64).powi(dim as i32);
    GridFunction::from_fn(resolution, dim, |idx| {
        idx.iter().map(|&i| i as f64).product::<f64>() / denom
    })
}

/// The comonotone copula `𝓜(u) = min u_ℓ`.
pub fn min_copula(resolution: usize, dim: usize) -> Result<GridFunction> {
    GridFunction::from_fn(resolution, dim, |idx| {
        *idx.iter().min().expect("dim >= 1") as f64 / resolution as f64
    })
}

/// Inclusion-exclusion volume of `f` over the box `[lower, upper]`.
pub fn box_volume(f: &GridFunction, lower: &[usize], upper: &[usize]) -> Result<f64> {
    f.check_index(lower)?;
    f.check_index(upper)?;
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Err(Error::InvertedBox {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        });
    }
    Ok(lattice::alternating_sum(lower, upper, |c| f.at(c)))
}

/// Checks groundedness (D1), uniform margins (D2) and L-increasingness (D3).
///
/// D3 is checked on the `M^L` unit cells only; nonnegativity on arbitrary
/// boxes follows by telescoping.
pub fn check_discrete_copula(f: &GridFunction, eps: f64) -> AxiomReport {
    let m = f.resolution;
    let dim = f.dim;
    let mut violations = Vec::new();

    lattice::for_each_index(&vec![m + 1; dim], |idx| {
        if idx.contains(&0) {
            let v = f.at(idx);
            if v.abs() > eps {
                violations.push(Violation {
                    axiom: Axiom::D1,
                    witness: Witness::Point { index: idx.to_vec() },
                    observed: v,
                    required: "= 0".into(),
                });
            }
        }
    });

    let mut point = vec![m; dim];
    for axis in 0..dim {
        for i in 0..=m {
            point[axis] = i;
            let v = f.at(&point);
            let target = i as f64 / m as f64;
            if (v - target).abs() > eps {
                violations.push(Violation {
                    axiom: Axiom::D2,
                    witness: Witness::Point {
                        index: point.clone(),
                    },
                    observed: v,
                    required: format!("= {target}"),
                });
            }
        }
        point[axis] = m;
    }

    let mut lower = vec![0; dim];
    let mut upper = vec![0; dim];
    lattice::for_each_index(&vec![m; dim], |idx| {
        for axis in 0..dim {
            lower[axis] = idx[axis];
            upper[axis] = idx[axis] + 1;
        }
        let vol = lattice::alternating_sum(&lower, &upper, |c| f.at(c));
        if vol < -eps {
            violations.push(Violation {
                axiom: Axiom::D3,
                witness: Witness::Cell {
                    lower: lower.clone(),
                    upper: upper.clone(),
                },
                observed: vol,
                required: ">= 0".into(),
            });
        }
    });

    AxiomReport::from_violations(violations)
}

/// True iff every value lies within `eps` of some `k/M`, `k ∈ 0..=M`.
pub fn is_irreducible(f: &GridFunction, eps: f64) -> bool {
    on_lattice(f.values(), f.resolution, eps)
}

pub(crate) fn on_lattice(values: &[f64], resolution: usize, eps: f64) -> bool {
    let m = resolution as f64;
    values.iter().all(|&v| {
        let k = (v * m).round().clamp(0.0, m);
        (v - k / m).abs() <= eps
    })
}
