//! Stochastic arrays, permutation arrays and rank matrices.
//!
//! A discrete copula on `I_M^L` corresponds one-to-one with an `M^L` stochastic
//! array through scaled prefix sums: `D(i/M) = (1/M) Σ_{j ≤ i} a_j`. The
//! inverse is unit-cell differencing. Permutation arrays (0/1 entries) are the
//! irreducible case and are stored sparsely as [`RankMatrix`] values.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{check_discrete_copula, GridFunction, DEFAULT_EPS};
use crate::lattice;
use crate::report::{Axiom, AxiomReport, Violation, Witness};

/// Dense `M^L` array indexed by `{1..=M}^L` (stored 0-based, row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticArray {
    resolution: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl StochasticArray {
    pub fn new(resolution: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if resolution == 0 || dim == 0 {
            return Err(Error::EmptyShape { resolution, dim });
        }
        let expected = lattice::dense_len(resolution, dim)?;
        if entries.len() != expected {
            return Err(Error::Shape {
                expected,
                found: entries.len(),
            });
        }
        if let Some((position, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinite { position, value });
        }
        Ok(StochasticArray {
            resolution,
            dim,
            entries,
        })
    }

    /// Tabulates `f` at every 1-based index in `{1..=M}^L`.
    pub fn from_fn(resolution: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        if resolution == 0 || dim == 0 {
            return Err(Error::EmptyShape { resolution, dim });
        }
        let len = lattice::dense_len(resolution, dim)?;
        let mut entries = Vec::with_capacity(len);
        let mut one_based = vec![0; dim];
        lattice::for_each_index(&vec![resolution; dim], |idx| {
            for (o, &i) in one_based.iter_mut().zip(idx) {
                *o = i + 1;
            }
            entries.push(f(&one_based));
        });
        Self::new(resolution, dim, entries)
    }

    /// The array with every entry `1/M^{L-1}`; it induces the product copula.
    pub fn uniform(resolution: usize, dim: usize) -> Result<Self> {
        let entry = 1.0 / (resolution as f64).powi(dim as i32 - 1);
        Self::from_fn(resolution, dim, |_| entry)
    }

    /// The identity array (1 on the main diagonal); it induces the min copula.
    pub fn identity(resolution: usize, dim: usize) -> Result<Self> {
        Self::from_fn(resolution, dim, |idx| {
            if idx.iter().all(|&i| i == idx[0]) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Convex combination `Σ w_k P_k` of permutation arrays given as rank matrices.
    pub fn mixture(resolution: usize, dim: usize, components: &[(f64, RankMatrix)]) -> Result<Self> {
        let len = lattice::dense_len(resolution, dim)?;
        let strides = lattice::strides(&vec![resolution; dim]);
        let mut entries = vec![0.0; len];
        for (weight, ranks) in components {
            if ranks.members() != resolution {
                return Err(Error::ResolutionMismatch {
                    expected: resolution,
                    found: ranks.members(),
                });
            }
            if ranks.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ranks.dim(),
                });
            }
            for row in ranks.rows() {
                let off: usize = row.iter().zip(&strides).map(|(&r, s)| (r - 1) * s).sum();
                entries[off] += weight;
            }
        }
        Self::new(resolution, dim, entries)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry at 1-based indices.
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        if index.len() != self.dim || index.iter().any(|&i| i == 0 || i > self.resolution) {
            return Err(Error::IndexOutOfRange {
                index: index.to_vec(),
                resolution: self.resolution,
                dim: self.dim,
            });
        }
        let strides = lattice::strides(&vec![self.resolution; self.dim]);
        let off: usize = index.iter().zip(&strides).map(|(&i, s)| (i - 1) * s).sum();
        Ok(self.entries[off])
    }

    pub fn max_abs_diff(&self, other: &StochasticArray) -> f64 {
        if self.resolution != other.resolution || self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Checks nonnegativity (A1) and unit hyperplane sums (A2).
pub fn check_stochastic(array: &StochasticArray, eps: f64) -> AxiomReport {
    let m = array.resolution;
    let dim = array.dim;
    let mut violations = Vec::new();
    let mut line_sums = vec![vec![0.0; m]; dim];

    let mut k = 0;
    lattice::for_each_index(&vec![m; dim], |idx| {
        let a = array.entries[k];
        k += 1;
        if a < -eps {
            violations.push(Violation {
                axiom: Axiom::A1,
                witness: Witness::Point {
                    index: idx.iter().map(|i| i + 1).collect(),
                },
                observed: a,
                required: ">= 0".into(),
            });
        }
        for (axis, &i) in idx.iter().enumerate() {
            line_sums[axis][i] += a;
        }
    });

    for (axis, sums) in line_sums.iter().enumerate() {
        for (i, &s) in sums.iter().enumerate() {
            if (s - 1.0).abs() > eps {
                violations.push(Violation {
                    axiom: Axiom::A2,
                    witness: Witness::Line {
                        axis: axis + 1,
                        index: i + 1,
                    },
                    observed: s,
                    required: "= 1".into(),
                });
            }
        }
    }

    AxiomReport::from_violations(violations)
}

/// The copula `D(i/M) = (1/M) Σ_{j_1 ≤ i_1} ⋯ Σ_{j_L ≤ i_L} a_j` induced by a
/// stochastic array.
pub fn copula_from_array(array: &StochasticArray) -> Result<GridFunction> {
    let report = check_stochastic(array, DEFAULT_EPS);
    if !report.passed {
        return Err(Error::Axioms(report));
    }
    let m = array.resolution;
    let dim = array.dim;
    let extents = vec![m + 1; dim];
    let len = lattice::dense_len(m + 1, dim)?;
    let strides = lattice::strides(&extents);

    // Embed with a zero margin at coordinate 0 on every axis, then take
    // cumulative sums one axis at a time.
    let mut grid = vec![0.0; len];
    let mut k = 0;
    lattice::for_each_index(&vec![m; dim], |idx| {
        let off: usize = idx.iter().zip(&strides).map(|(&i, s)| (i + 1) * s).sum();
        grid[off] = array.entries[k];
        k += 1;
    });
    for axis in 0..dim {
        let stride = strides[axis];
        for off in 0..len {
            if !(off / stride).is_multiple_of(m + 1) {
                grid[off] += grid[off - stride];
            }
        }
    }
    let scale = m as f64;
    for v in &mut grid {
        *v /= scale;
    }
    GridFunction::new(m, dim, grid)
}

/// The stochastic array of a discrete copula, `a_i = M · Δ D` over the unit
/// cell ending at `i`. Differencing noise in `[-eps, 0)` is clamped to zero.
pub fn array_from_copula(copula: &GridFunction) -> Result<StochasticArray> {
    let report = check_discrete_copula(copula, DEFAULT_EPS);
    if !report.passed {
        return Err(Error::Axioms(report));
    }
    let m = copula.resolution();
    let dim = copula.dim();
    let strides = lattice::strides(&vec![m + 1; dim]);
    let mut grid = copula.values().to_vec();
    let len = grid.len();

    // Backward differences along each axis; iterate offsets downwards so each
    // predecessor is still undifferenced along the current axis.
    for axis in 0..dim {
        let stride = strides[axis];
        for off in (0..len).rev() {
            if !(off / stride).is_multiple_of(m + 1) {
                grid[off] -= grid[off - stride];
            }
        }
    }

    let scale = m as f64;
    let mut entries = Vec::with_capacity(lattice::dense_len(m, dim)?);
    lattice::for_each_index(&vec![m; dim], |idx| {
        let off: usize = idx.iter().zip(&strides).map(|(&i, s)| (i + 1) * s).sum();
        let a = scale * grid[off];
        entries.push(if (-DEFAULT_EPS..0.0).contains(&a) { 0.0 } else { a });
    });
    StochasticArray::new(m, dim, entries)
}

/// True iff every entry lies within `eps` of 0 or 1.
pub fn is_permutation_array(array: &StochasticArray, eps: f64) -> bool {
    array
        .entries
        .iter()
        .all(|&a| a.abs() <= eps || (a - 1.0).abs() <= eps)
}

/// `M × L` matrix of 1-based ranks whose columns are permutations of `1..=M`.
///
/// Row `m` names the position `(r_{m,1}, ..., r_{m,L})` of one unit entry of a
/// permutation array; equivalently the matrix is a Latin hypercube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankMatrix {
    members: usize,
    dim: usize,
    ranks: Vec<usize>,
}

impl RankMatrix {
    /// From row-major ranks (`members` rows of `dim` entries).
    pub fn new(members: usize, dim: usize, ranks: Vec<usize>) -> Result<Self> {
        if members == 0 || dim == 0 {
            return Err(Error::EmptyShape {
                resolution: members,
                dim,
            });
        }
        if ranks.len() != members * dim {
            return Err(Error::Shape {
                expected: members * dim,
                found: ranks.len(),
            });
        }
        let mut seen = vec![false; members + 1];
        for column in 0..dim {
            seen.iter_mut().for_each(|s| *s = false);
            for row in 0..members {
                let r = ranks[row * dim + column];
                if r == 0 || r > members || seen[r] {
                    return Err(Error::NotPermutation {
                        column: column + 1,
                        members,
                    });
                }
                seen[r] = true;
            }
        }
        Ok(RankMatrix {
            members,
            dim,
            ranks,
        })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Shape {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    /// From per-axis permutations (each of length `members`).
    pub fn from_columns(columns: &[Vec<usize>]) -> Result<Self> {
        let dim = columns.len();
        let members = columns.first().map_or(0, Vec::len);
        let mut ranks = vec![0; members * dim];
        for (c, col) in columns.iter().enumerate() {
            if col.len() != members {
                return Err(Error::Shape {
                    expected: members,
                    found: col.len(),
                });
            }
            for (row, &r) in col.iter().enumerate() {
                ranks[row * dim + c] = r;
            }
        }
        Self::new(members, dim, ranks)
    }

    /// The identity template: row `m` is `(m, ..., m)`.
    pub fn identity(members: usize, dim: usize) -> Result<Self> {
        Self::new(
            members,
            dim,
            (1..=members)
                .flat_map(|m| std::iter::repeat_n(m, dim))
                .collect(),
        )
    }

    /// A uniformly random Latin hypercube.
    pub fn random<R: Rng + ?Sized>(members: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let columns: Vec<Vec<usize>> = (0..dim)
            .map(|_| {
                let mut col: Vec<usize> = (1..=members).collect();
                col.shuffle(rng);
                col
            })
            .collect();
        Self::from_columns(&columns)
    }

    /// `M`, the number of rows.
    pub fn members(&self) -> usize {
        self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self, member: usize, axis: usize) -> usize {
        self.ranks[member * self.dim + axis]
    }

    pub fn row(&self, member: usize) -> &[usize] {
        &self.ranks[member * self.dim..(member + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.ranks.chunks(self.dim)
    }

    pub fn column(&self, axis: usize) -> Vec<usize> {
        self.ranks.iter().skip(axis).step_by(self.dim).copied().collect()
    }

    /// Row-major ranks.
    pub fn as_slice(&self) -> &[usize] {
        &self.ranks
    }

    /// Rows reordered by their first coordinate; the canonical form of the
    /// permutation array this matrix encodes.
    pub fn canonical(&self) -> RankMatrix {
        let mut rows: Vec<&[usize]> = self.rows().collect();
        rows.sort_by_key(|r| r[0]);
        RankMatrix {
            members: self.members,
            dim: self.dim,
            ranks: rows.concat(),
        }
    }
}

/// Reads off the unit entries of a permutation array, ordered by the first
/// coordinate.
pub fn rank_matrix_from_permutation_array(array: &StochasticArray) -> Result<RankMatrix> {
    if !is_permutation_array(array, DEFAULT_EPS) {
        return Err(Error::NotPermutationArray);
    }
    let m = array.resolution;
    let dim = array.dim;
    let mut ranks = Vec::with_capacity(m * dim);
    let mut k = 0;
    let mut ones = 0;
    lattice::for_each_index(&vec![m; dim], |idx| {
        if array.entries[k] > 0.5 {
            ranks.extend(idx.iter().map(|i| i + 1));
            ones += 1;
        }
        k += 1;
    });
    if ones != m {
        return Err(Error::NotPermutationArray);
    }
    RankMatrix::new(m, dim, ranks).map_err(|_| Error::NotPermutationArray)
}

pub fn permutation_array_from_rank_matrix(ranks: &RankMatrix) -> Result<StochasticArray> {
    StochasticArray::mixture(ranks.members, ranks.dim, &[(1.0, ranks.clone())])
}

/// Convex combination of `components` independent uniformly random
/// permutation arrays with random weights summing to one.
///
/// Deterministic in `seed`.
pub fn random_stochastic_array(
    resolution: usize,
    dim: usize,
    components: usize,
    seed: u64,
) -> Result<StochasticArray> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let components = components.max(1);
    let raw: Vec<f64> = (0..components).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut parts = Vec::with_capacity(components);
    for w in raw {
        parts.push((w / total, RankMatrix::random(resolution, dim, &mut rng)?));
    }
    StochasticArray::mixture(resolution, dim, &parts)
}
