//! Both directions of Sklar's theorem for joint distributions whose joint cdf
//! takes values in `{0, 1/M, ..., 1}`.
//!
//! Composition plugs margins into an irreducible discrete copula. Extraction
//! builds the subcopula on the margins' ranges and extends it; the copula is
//! unique exactly when every margin attains every level `k/M`.

use crate::error::{Error, Result};
use crate::grid::{check_discrete_copula, is_irreducible, GridFunction, DEFAULT_EPS};
use crate::lattice;
use crate::subcopula::{extend_irreducible, DiscreteSubcopula};

/// Tolerance when converting a real mass or level to a multiple of `1/M`.
pub const LEVEL_TOL: f64 = 1e-9;

fn to_units(value: f64, resolution: usize) -> Option<usize> {
    let scaled = value * resolution as f64;
    let k = scaled.round();
    (value.is_finite() && k >= 0.0 && (scaled - k).abs() <= LEVEL_TOL * resolution as f64)
        .then_some(k as usize)
}

/// A right-continuous step distribution function with levels in `I_M`.
///
/// `F(x) = levels[j] / M` for the largest `j` with `support[j] <= x`, and `0`
/// below the first support point.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    resolution: usize,
    support: Vec<f64>,
    levels: Vec<usize>,
}

impl StepCdf {
    /// `levels` are integer numerators over `M`; the last must equal `M`.
    pub fn new(resolution: usize, support: Vec<f64>, levels: Vec<usize>) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::EmptyShape { resolution, dim: 1 });
        }
        if support.is_empty() || support.len() != levels.len() {
            return Err(Error::BadStepCdf(format!(
                "{} support points but {} levels",
                support.len(),
                levels.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) || support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadStepCdf("support must be finite and strictly increasing".into()));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadStepCdf("levels must be non-decreasing".into()));
        }
        if *levels.last().expect("non-empty") != resolution {
            return Err(Error::BadStepCdf(format!("final level must be {resolution}/{resolution}")));
        }
        Ok(StepCdf {
            resolution,
            support,
            levels,
        })
    }

    /// Levels given as probabilities, each a multiple of `1/M`.
    pub fn from_probabilities(resolution: usize, support: Vec<f64>, levels: &[f64]) -> Result<Self> {
        let units = levels
            .iter()
            .map(|&p| {
                to_units(p, resolution)
                    .filter(|&k| k <= resolution)
                    .ok_or_else(|| Error::BadStepCdf(format!("level {p} is not a multiple of 1/{resolution}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(resolution, support, units)
    }

    /// Uniform on `support`: level `j/n` at the `j`-th point, with `n = M`.
    pub fn uniform(support: Vec<f64>) -> Result<Self> {
        let n = support.len();
        Self::new(n, support, (1..=n).collect())
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// `M · F(x)`; `+inf` maps to `M` and `-inf` to `0`.
    pub fn level_at(&self, x: f64) -> usize {
        match self.support.partition_point(|&s| s <= x) {
            0 => 0,
            j => self.levels[j - 1],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.level_at(x) as f64 / self.resolution as f64
    }

    /// The range of `M · F`, always including `0` and `M`.
    pub fn range(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.levels.len() + 1);
        r.push(0);
        for &l in &self.levels {
            if *r.last().expect("non-empty") != l {
                r.push(l);
            }
        }
        r
    }

    /// Whether `F` attains every level `k/M`.
    pub fn has_full_range(&self) -> bool {
        self.range().len() == self.resolution + 1
    }
}

/// A finitely supported joint distribution whose masses are multiples of `1/M`.
///
/// Masses are stored as integer counts of `1/M` over the product of the
/// per-axis supports.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJointDistribution {
    resolution: usize,
    supports: Vec<Vec<f64>>,
    strides: Vec<usize>,
    counts: Vec<usize>,
    cumulative: Vec<usize>,
}

impl DiscreteJointDistribution {
    pub fn from_counts(resolution: usize, supports: Vec<Vec<f64>>, counts: Vec<usize>) -> Result<Self> {
        if resolution == 0 || supports.is_empty() {
            return Err(Error::EmptyShape {
                resolution,
                dim: supports.len(),
            });
        }
        for (axis, s) in supports.iter().enumerate() {
            if s.is_empty() || s.iter().any(|x| !x.is_finite()) || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NotIncreasing { axis: axis + 1 });
            }
        }
        let extents: Vec<usize> = supports.iter().map(Vec::len).collect();
        let expected = lattice::product_len(&extents)?;
        if counts.len() != expected {
            return Err(Error::Shape {
                expected,
                found: counts.len(),
            });
        }
        let total: usize = counts.iter().sum();
        if total != resolution {
            return Err(Error::MassTotal { total, resolution });
        }
        let strides = lattice::strides(&extents);
        let mut cumulative = counts.clone();
        for axis in 0..extents.len() {
            let stride = strides[axis];
            for off in 0..cumulative.len() {
                if !(off / stride).is_multiple_of(extents[axis]) {
                    cumulative[off] += cumulative[off - stride];
                }
            }
        }
        Ok(DiscreteJointDistribution {
            resolution,
            supports,
            strides,
            counts,
            cumulative,
        })
    }

    /// Dense real masses over the support grid.
    pub fn new(resolution: usize, supports: Vec<Vec<f64>>, masses: &[f64]) -> Result<Self> {
        let counts = masses
            .iter()
            .map(|&mass| to_units(mass, resolution).ok_or(Error::NotRepresentable { mass, resolution }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_counts(resolution, supports, counts)
    }

    /// Sparse `(point, mass)` records; supports are the distinct coordinates.
    pub fn from_points(resolution: usize, points: &[(Vec<f64>, f64)]) -> Result<Self> {
        let dim = points.first().map_or(0, |(p, _)| p.len());
        if dim == 0 {
            return Err(Error::EmptyShape { resolution, dim });
        }
        let mut supports = vec![Vec::new(); dim];
        for (p, _) in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            for (axis, &x) in p.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { position: axis, value: x });
                }
                supports[axis].push(x);
            }
        }
        for s in &mut supports {
            s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            s.dedup();
        }
        let extents: Vec<usize> = supports.iter().map(Vec::len).collect();
        let strides = lattice::strides(&extents);
        let mut counts = vec![0; lattice::product_len(&extents)?];
        let mut filled = vec![false; counts.len()];
        for (p, mass) in points {
            let off: usize = p
                .iter()
                .zip(&supports)
                .zip(&strides)
                .map(|((x, s), st)| s.binary_search_by(|y| y.partial_cmp(x).expect("finite")).expect("present") * st)
                .sum();
            if filled[off] {
                return Err(Error::DuplicatePoint { point: p.clone() });
            }
            filled[off] = true;
            counts[off] = to_units(*mass, resolution).ok_or(Error::NotRepresentable {
                mass: *mass,
                resolution,
            })?;
        }
        Self::from_counts(resolution, supports, counts)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[Vec<f64>] {
        &self.supports
    }

    /// Counts of `1/M` at support-grid positions.
    pub fn count_at(&self, position: &[usize]) -> usize {
        self.counts[lattice::offset(&self.strides, position)]
    }

    /// `(point, count)` for every support point with positive mass, row-major.
    pub fn atoms(&self) -> Vec<(Vec<f64>, usize)> {
        let extents: Vec<usize> = self.supports.iter().map(Vec::len).collect();
        let mut out = Vec::new();
        let mut k = 0;
        lattice::for_each_index(&extents, |pos| {
            let c = self.counts[k];
            k += 1;
            if c > 0 {
                out.push((pos.iter().zip(&self.supports).map(|(&p, s)| s[p]).collect(), c));
            }
        });
        out
    }

    /// `M · H(x)`, where `H(x) = P(X_1 ≤ x_1, ..., X_L ≤ x_L)`.
    pub fn cdf_count(&self, x: &[f64]) -> usize {
        let mut off = 0;
        for ((s, &xi), st) in self.supports.iter().zip(x).zip(&self.strides) {
            match s.partition_point(|&v| v <= xi) {
                0 => return 0,
                j => off += (j - 1) * st,
            }
        }
        self.cumulative[off]
    }

    pub fn cdf(&self, x: &[f64]) -> f64 {
        self.cdf_count(x) as f64 / self.resolution as f64
    }

    pub fn margins(&self) -> Vec<StepCdf> {
        (0..self.dim())
            .map(|axis| {
                let mut x = vec![f64::INFINITY; self.dim()];
                let levels = self.supports[axis]
                    .iter()
                    .map(|&v| {
                        x[axis] = v;
                        self.cdf_count(&x)
                    })
                    .collect();
                StepCdf::new(self.resolution, self.supports[axis].clone(), levels).expect("valid margin")
            })
            .collect()
    }
}

/// `H(x) = D(F_1(x_1), ..., F_L(x_L))`.
#[derive(Debug, Clone)]
pub struct JointCdf {
    copula: GridFunction,
    margins: Vec<StepCdf>,
}

impl JointCdf {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let levels: Vec<usize> = self.margins.iter().zip(x).map(|(f, &xi)| f.level_at(xi)).collect();
        self.copula.at(&levels)
    }

    pub fn copula(&self) -> &GridFunction {
        &self.copula
    }

    pub fn margins(&self) -> &[StepCdf] {
        &self.margins
    }

    /// The joint distribution with this cdf: the mass at a support point is the
    /// copula volume between consecutive margin levels.
    pub fn materialize(&self) -> Result<DiscreteJointDistribution> {
        let m = self.copula.resolution();
        let supports: Vec<Vec<f64>> = self.margins.iter().map(|f| f.support.clone()).collect();
        let extents: Vec<usize> = supports.iter().map(Vec::len).collect();
        let mut counts = Vec::with_capacity(lattice::product_len(&extents)?);
        let dim = extents.len();
        let mut lower = vec![0; dim];
        let mut upper = vec![0; dim];
        lattice::for_each_index(&extents, |pos| {
            for axis in 0..dim {
                let levels = &self.margins[axis].levels;
                upper[axis] = levels[pos[axis]];
                lower[axis] = if pos[axis] == 0 { 0 } else { levels[pos[axis] - 1] };
            }
            let vol = lattice::alternating_sum(&lower, &upper, |c| self.copula.at(c));
            counts.push((vol * m as f64).round().max(0.0) as usize);
        });
        DiscreteJointDistribution::from_counts(m, supports, counts)
    }
}

/// Composes an irreducible discrete copula with margins of the same resolution.
pub fn compose(copula: &GridFunction, margins: &[StepCdf]) -> Result<JointCdf> {
    if margins.len() != copula.dim() {
        return Err(Error::DimensionMismatch {
            expected: copula.dim(),
            found: margins.len(),
        });
    }
    if let Some(f) = margins.iter().find(|f| f.resolution != copula.resolution()) {
        return Err(Error::ResolutionMismatch {
            expected: copula.resolution(),
            found: f.resolution,
        });
    }
    let report = check_discrete_copula(copula, DEFAULT_EPS);
    if !report.passed {
        return Err(Error::Axioms(report));
    }
    if !is_irreducible(copula, DEFAULT_EPS) {
        return Err(Error::NotIrreducible);
    }
    Ok(JointCdf {
        copula: copula.clone(),
        margins: margins.to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct SklarExtraction {
    /// An irreducible copula with `H = D ∘ (F_1, ..., F_L)`.
    pub copula: GridFunction,
    /// Whether this is the only such copula (all margins have full range).
    pub unique: bool,
    /// `D` as forced by `H` on the margins' ranges.
    pub subcopula: DiscreteSubcopula,
    pub margins: Vec<StepCdf>,
}

/// Recovers an irreducible discrete copula from a joint distribution.
pub fn extract_copula(joint: &DiscreteJointDistribution) -> Result<SklarExtraction> {
    let m = joint.resolution;
    let margins = joint.margins();
    let domains: Vec<Vec<usize>> = margins.iter().map(StepCdf::range).collect();
    // For each attained level, a point where the margin reaches it.
    let witnesses: Vec<Vec<f64>> = domains
        .iter()
        .zip(&margins)
        .map(|(d, f)| {
            d.iter()
                .map(|&k| match f.levels.iter().position(|&l| l == k) {
                    Some(j) => f.support[j],
                    None => f64::NEG_INFINITY,
                })
                .collect()
        })
        .collect();
    let extents: Vec<usize> = domains.iter().map(Vec::len).collect();
    let mut values = Vec::with_capacity(lattice::product_len(&extents)?);
    let mut x = vec![0.0; extents.len()];
    lattice::for_each_index(&extents, |pos| {
        for ((xi, &p), w) in x.iter_mut().zip(pos).zip(&witnesses) {
            *xi = w[p];
        }
        values.push(joint.cdf_count(&x) as f64 / m as f64);
    });
    let subcopula = DiscreteSubcopula::new(m, domains, values)?;
    let copula = extend_irreducible(&subcopula)?;
    Ok(SklarExtraction {
        copula,
        unique: subcopula.is_full(),
        subcopula,
        margins,
    })
}
