//! Ranks and empirical copulas of multivariate samples.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice;
use crate::stochastic::RankMatrix;

/// `M` sample points in `L` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    members: usize,
    dim: usize,
    points: Vec<f64>,
}

impl SampleSet {
    pub fn new(members: usize, dim: usize, points: Vec<f64>) -> Result<Self> {
        if members == 0 || dim == 0 {
            return Err(Error::EmptyShape {
                resolution: members,
                dim,
            });
        }
        if points.len() != members * dim {
            return Err(Error::Shape {
                expected: members * dim,
                found: points.len(),
            });
        }
        if let Some((position, &value)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(SampleSet {
            members,
            dim,
            points,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Shape {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, member: usize) -> &[f64] {
        &self.points[member * self.dim..(member + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dim)
    }

    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.points.iter().skip(axis).step_by(self.dim).copied().collect()
    }
}

/// How equal values within one column are ordered when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Fail on the first tie.
    #[default]
    Reject,
    /// Order tied values uniformly at random; column `ℓ` draws from stream
    /// `ℓ` of a generator seeded with the given seed.
    Random(u64),
    /// Earlier members get the smaller rank.
    FirstOccurrence,
}

fn cmp_finite(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("values are finite")
}

/// 1-based ranks of `values` (1 = smallest) with ties resolved per `policy`.
/// `column` selects the random stream and is reported in tie errors.
pub fn rank_values(values: &[f64], policy: TiePolicy, column: usize) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    if let TiePolicy::Random(seed) = policy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(column as u64);
        order.shuffle(&mut rng);
    }
    // Stable sort: tied values keep the (possibly shuffled) prior order.
    order.sort_by(|&a, &b| cmp_finite(values[a], values[b]));
    if policy == TiePolicy::Reject {
        if let Some(w) = order.windows(2).find(|w| values[w[0]] == values[w[1]]) {
            return Err(Error::Tie {
                column: column + 1,
                value: values[w[0]],
            });
        }
    }
    let mut ranks = vec![0; values.len()];
    for (r, &member) in order.iter().enumerate() {
        ranks[member] = r + 1;
    }
    Ok(ranks)
}

/// Per-column ranks of a sample.
pub fn ranks(sample: &SampleSet, policy: TiePolicy) -> Result<RankMatrix> {
    let columns = (0..sample.dim)
        .map(|axis| rank_values(&sample.column(axis), policy, axis))
        .collect::<Result<Vec<_>>>()?;
    RankMatrix::from_columns(&columns)
}

/// The empirical copula
/// `E_M(i/M) = (1/M) #{m : rk(x_m^ℓ) ≤ i_ℓ for all ℓ}`.
///
/// Counts are exact integers divided by `M` once, so the result is exactly
/// irreducible.
pub fn empirical_copula(sample: &SampleSet, policy: TiePolicy) -> Result<GridFunction> {
    let ranks = ranks(sample, policy)?;
    empirical_copula_from_ranks(&ranks)
}

pub(crate) fn empirical_copula_from_ranks(ranks: &RankMatrix) -> Result<GridFunction> {
    let m = ranks.members();
    let dim = ranks.dim();
    let len = lattice::dense_len(m + 1, dim)?;
    let mut values = Vec::with_capacity(len);
    lattice::for_each_index(&vec![m + 1; dim], |idx| {
        let count = ranks
            .rows()
            .filter(|row| row.iter().zip(idx).all(|(r, i)| r <= i))
            .count();
        values.push(count as f64 / m as f64);
    });
    GridFunction::new(m, dim, values)
}

/// A sample whose rank matrix is `ranks`: member `m` takes the
/// `ranks(m, ℓ)`-th smallest value of `grids[ℓ]` on axis `ℓ`.
pub fn sample_set_from_rank_matrix(ranks: &RankMatrix, grids: &[Vec<f64>]) -> Result<SampleSet> {
    if grids.len() != ranks.dim() {
        return Err(Error::DimensionMismatch {
            expected: ranks.dim(),
            found: grids.len(),
        });
    }
    for (axis, g) in grids.iter().enumerate() {
        if g.len() != ranks.members() {
            return Err(Error::Shape {
                expected: ranks.members(),
                found: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { axis: axis + 1 });
        }
    }
    let points = ranks
        .rows()
        .flat_map(|row| row.iter().zip(grids).map(|(&r, g)| g[r - 1]))
        .collect();
    SampleSet::new(ranks.members(), ranks.dim(), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{check_discrete_copula, is_irreducible, min_copula, DEFAULT_EPS};

    #[test]
    fn ranks_of_column() {
        assert_eq!(rank_values(&[10.0, 12.0, 11.0], TiePolicy::Reject, 0).unwrap(), vec![1, 3, 2]);
    }

    #[test]
    fn first_occurrence_ties() {
        assert_eq!(
            rank_values(&[5.0, 5.0, 6.0], TiePolicy::FirstOccurrence, 0).unwrap(),
            vec![1, 2, 3]
        );
        assert_eq!(
            rank_values(&[6.0, 5.0, 5.0], TiePolicy::FirstOccurrence, 0).unwrap(),
            vec![3, 1, 2]
        );
    }

    #[test]
    fn reject_ties() {
        let err = rank_values(&[5.0, 5.0], TiePolicy::Reject, 2).unwrap_err();
        assert!(matches!(err, Error::Tie { column: 3, value } if value == 5.0));
    }

    #[test]
    fn random_ties_are_seeded() {
        let v = [7.0; 6];
        let a = rank_values(&v, TiePolicy::Random(1), 0).unwrap();
        let b = rank_values(&v, TiePolicy::Random(1), 0).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn three_point_example() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.5], vec![2.0, 1.5], vec![3.0, 3.5]]).unwrap();
        let e = empirical_copula(&s, TiePolicy::Reject).unwrap();
        assert_eq!(e.at(&[1, 1]), 0.0);
        assert_eq!(e.at(&[2, 2]), 2.0 / 3.0);
        assert_eq!(e.at(&[3, 3]), 1.0);
        assert!(check_discrete_copula(&e, 0.0).passed);
        assert!(is_irreducible(&e, 0.0));
    }

    #[test]
    fn comonotone_sample_gives_min_copula() {
        let s = SampleSet::from_rows(&[vec![1.0, -3.0], vec![2.0, 0.0], vec![4.0, 8.0], vec![9.0, 9.5]])
            .unwrap();
        let e = empirical_copula(&s, TiePolicy::Reject).unwrap();
        assert_eq!(e, min_copula(4, 2).unwrap());
        assert!(check_discrete_copula(&e, DEFAULT_EPS).passed);
    }

    #[test]
    fn reconstruct_samples() {
        let id = RankMatrix::from_rows(&[vec![1, 1], vec![2, 2]]).unwrap();
        let s = sample_set_from_rank_matrix(&id, &[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s, SampleSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap());

        let anti = RankMatrix::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        let s = sample_set_from_rank_matrix(&anti, &[vec![10.0, 20.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(s, SampleSet::from_rows(&[vec![10.0, 6.0], vec![20.0, 5.0]]).unwrap());

        assert!(matches!(
            sample_set_from_rank_matrix(&anti, &[vec![10.0, 20.0], vec![6.0, 6.0]]),
            Err(Error::NotIncreasing { axis: 2 })
        ));
    }
}
