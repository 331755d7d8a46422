//! Discrete subcopulas and their extension to irreducible copulas.
//!
//! A subcopula lives on a product of domains `K^(ℓ) ⊆ {0, ..., M}`, each
//! containing `0` and `M`. Consecutive domain points `a_s < a_{s+1}` on every
//! axis cut the lattice into blocks; an irreducible subcopula assigns each block
//! an integer number of unit masses, and any permutation array that places
//! exactly that many ones in every block induces an extension.

use crate::error::{Error, Result};
use crate::grid::{on_lattice, GridFunction, DEFAULT_EPS};
use crate::lattice;
use crate::report::{Axiom, AxiomReport, Violation, Witness};
use crate::stochastic::{copula_from_array, permutation_array_from_rank_matrix, RankMatrix};

/// Slack allowed when rounding `M · volume` to an integer block count.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSubcopula {
    resolution: usize,
    domains: Vec<Vec<usize>>,
    extents: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

fn validate_domains(resolution: usize, domains: &[Vec<usize>]) -> Result<()> {
    if resolution == 0 || domains.is_empty() {
        return Err(Error::EmptyShape {
            resolution,
            dim: domains.len(),
        });
    }
    for (axis, d) in domains.iter().enumerate() {
        let ok = d.first() == Some(&0)
            && d.last() == Some(&resolution)
            && d.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::BadDomain {
                axis: axis + 1,
                resolution,
            });
        }
    }
    Ok(())
}

impl DiscreteSubcopula {
    /// `values` are row-major over the product of the domains.
    pub fn new(resolution: usize, domains: Vec<Vec<usize>>, values: Vec<f64>) -> Result<Self> {
        validate_domains(resolution, &domains)?;
        let extents: Vec<usize> = domains.iter().map(Vec::len).collect();
        let expected = lattice::product_len(&extents)?;
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                found: values.len(),
            });
        }
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(DiscreteSubcopula {
            resolution,
            strides: lattice::strides(&extents),
            extents,
            domains,
            values,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Vec<usize>] {
        &self.domains
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when every domain is all of `{0, ..., M}`.
    pub fn is_full(&self) -> bool {
        self.extents.iter().all(|&e| e == self.resolution + 1)
    }

    /// Value at positions within the domains (not grid coordinates).
    pub fn at_position(&self, position: &[usize]) -> f64 {
        self.values[lattice::offset(&self.strides, position)]
    }

    /// Value at grid coordinates, if every coordinate belongs to its domain.
    pub fn get(&self, coords: &[usize]) -> Option<f64> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut off = 0;
        for ((d, &c), s) in self.domains.iter().zip(coords).zip(&self.strides) {
            off += d.binary_search(&c).ok()? * s;
        }
        Some(self.values[off])
    }

    fn coords_of(&self, position: &[usize]) -> Vec<usize> {
        position
            .iter()
            .zip(&self.domains)
            .map(|(&p, d)| d[p])
            .collect()
    }

    /// Volume over the box between domain positions `lower` and `upper`.
    fn volume(&self, lower: &[usize], upper: &[usize]) -> f64 {
        lattice::alternating_sum(lower, upper, |p| self.at_position(p))
    }

    /// True iff every value is within `eps` of a multiple of `1/M`.
    pub fn is_irreducible(&self, eps: f64) -> bool {
        on_lattice(&self.values, self.resolution, eps)
    }
}

/// Checks S1 at zero coordinates, S2 along each margin and S3 on every box
/// spanned by adjacent domain points.
pub fn check_subcopula(sub: &DiscreteSubcopula, eps: f64) -> AxiomReport {
    let m = sub.resolution;
    let dim = sub.dim();
    let mut violations = Vec::new();

    lattice::for_each_index(&sub.extents, |pos| {
        if pos.contains(&0) {
            let v = sub.at_position(pos);
            if v.abs() > eps {
                violations.push(Violation {
                    axiom: Axiom::S1,
                    witness: Witness::Point {
                        index: sub.coords_of(pos),
                    },
                    observed: v,
                    required: "= 0".into(),
                });
            }
        }
    });

    let mut pos: Vec<usize> = sub.extents.iter().map(|e| e - 1).collect();
    for axis in 0..dim {
        for (p, &k) in sub.domains[axis].iter().enumerate() {
            pos[axis] = p;
            let v = sub.at_position(&pos);
            let target = k as f64 / m as f64;
            if (v - target).abs() > eps {
                violations.push(Violation {
                    axiom: Axiom::S2,
                    witness: Witness::Point {
                        index: sub.coords_of(&pos),
                    },
                    observed: v,
                    required: format!("= {target}"),
                });
            }
        }
        pos[axis] = sub.extents[axis] - 1;
    }

    let blocks: Vec<usize> = sub.extents.iter().map(|e| e - 1).collect();
    let mut upper = vec![0; dim];
    lattice::for_each_index(&blocks, |lower| {
        for axis in 0..dim {
            upper[axis] = lower[axis] + 1;
        }
        let vol = sub.volume(lower, &upper);
        if vol < -eps {
            violations.push(Violation {
                axiom: Axiom::S3,
                witness: Witness::Cell {
                    lower: sub.coords_of(lower),
                    upper: sub.coords_of(&upper),
                },
                observed: vol,
                required: ">= 0".into(),
            });
        }
    });

    AxiomReport::from_violations(violations)
}

/// Pointwise restriction of a copula to a product of domains.
pub fn restrict(copula: &GridFunction, domains: &[Vec<usize>]) -> Result<DiscreteSubcopula> {
    validate_domains(copula.resolution(), domains)?;
    if domains.len() != copula.dim() {
        return Err(Error::DimensionMismatch {
            expected: copula.dim(),
            found: domains.len(),
        });
    }
    let extents: Vec<usize> = domains.iter().map(Vec::len).collect();
    let mut values = Vec::with_capacity(lattice::product_len(&extents)?);
    let mut coords = vec![0; domains.len()];
    lattice::for_each_index(&extents, |pos| {
        for ((c, &p), d) in coords.iter_mut().zip(pos).zip(domains) {
            *c = d[p];
        }
        values.push(copula.at(&coords));
    });
    DiscreteSubcopula::new(copula.resolution(), domains.to_vec(), values)
}

/// Number of unit masses in each block between adjacent domain points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCounts {
    extents: Vec<usize>,
    counts: Vec<usize>,
}

impl BlockCounts {
    /// Number of blocks along each axis.
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    /// Row-major counts.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn get(&self, block: &[usize]) -> usize {
        self.counts[lattice::offset(&lattice::strides(&self.extents), block)]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// For each slab along `axis`, the sum of counts over all other axes.
    pub fn slab_sums(&self, axis: usize) -> Vec<usize> {
        let mut sums = vec![0; self.extents[axis]];
        let mut k = 0;
        lattice::for_each_index(&self.extents, |block| {
            sums[block[axis]] += self.counts[k];
            k += 1;
        });
        sums
    }
}

/// `c(s) = M · Δ D*` over the block between domain positions `s` and `s + 1`.
///
/// Fails when a count is negative or not within [`INTEGRALITY_TOL`] of an
/// integer, which happens exactly when the subcopula is not irreducible.
pub fn block_counts(sub: &DiscreteSubcopula) -> Result<BlockCounts> {
    let dim = sub.dim();
    let extents: Vec<usize> = sub.extents.iter().map(|e| e - 1).collect();
    let mut counts = Vec::with_capacity(lattice::product_len(&extents)?);
    let mut upper = vec![0; dim];
    let mut failure = None;
    lattice::for_each_index(&extents, |lower| {
        if failure.is_some() {
            return;
        }
        for axis in 0..dim {
            upper[axis] = lower[axis] + 1;
        }
        let scaled = sub.resolution as f64 * sub.volume(lower, &upper);
        let rounded = scaled.round();
        if (scaled - rounded).abs() >= INTEGRALITY_TOL || rounded < 0.0 {
            failure = Some(Error::ExtensionInfeasible {
                block: lower.to_vec(),
                count: scaled,
            });
            return;
        }
        counts.push(rounded as usize);
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(BlockCounts { extents, counts }),
    }
}

/// Rank matrix of the permutation array built by the greedy block fill.
///
/// Blocks are visited in lexicographic order. Each axis keeps, per slab, the
/// lowest line not yet used; a block with count `c` takes the next `c` lines
/// on every axis and pairs them diagonally.
pub fn extension_rank_matrix(sub: &DiscreteSubcopula) -> Result<RankMatrix> {
    let report = check_subcopula(sub, DEFAULT_EPS);
    if !report.passed {
        return Err(Error::Axioms(report));
    }
    let counts = block_counts(sub)?;
    let dim = sub.dim();
    let m = sub.resolution;
    if counts.total() != m {
        return Err(Error::ExtensionInfeasible {
            block: vec![],
            count: counts.total() as f64,
        });
    }

    // next[axis][slab]: the next free 1-based line in that slab.
    let mut next: Vec<Vec<usize>> = sub
        .domains
        .iter()
        .map(|d| d[..d.len() - 1].iter().map(|a| a + 1).collect())
        .collect();
    let mut rows = Vec::with_capacity(m);
    let mut k = 0;
    let mut underflow = None;
    lattice::for_each_index(&counts.extents, |block| {
        let c = counts.counts[k];
        k += 1;
        if c == 0 || underflow.is_some() {
            return;
        }
        for axis in 0..dim {
            let s = block[axis];
            if next[axis][s] + c > sub.domains[axis][s + 1] + 1 {
                underflow = Some(block.to_vec());
                return;
            }
        }
        for j in 0..c {
            rows.push((0..dim).map(|axis| next[axis][block[axis]] + j).collect::<Vec<_>>());
        }
        for axis in 0..dim {
            next[axis][block[axis]] += c;
        }
    });
    if let Some(block) = underflow {
        return Err(Error::ExtensionInfeasible {
            block,
            count: f64::NAN,
        });
    }
    Ok(RankMatrix::from_rows(&rows)?.canonical())
}

/// An irreducible discrete copula whose restriction to the subcopula's
/// domains equals the subcopula.
pub fn extend_irreducible(sub: &DiscreteSubcopula) -> Result<GridFunction> {
    let ranks = extension_rank_matrix(sub)?;
    copula_from_array(&permutation_array_from_rank_matrix(&ranks)?)
}
