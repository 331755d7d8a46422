//! Multivariate discrete copulas on the grid `I_M^L = {0, 1/M, ..., 1}^L`.
//!
//! * [`grid`]: copula axioms, the product and min copulas, box volumes.
//! * [`stochastic`]: stochastic arrays and the prefix-sum bijection with
//!   discrete copulas; permutation arrays as rank matrices.
//! * [`empirical`]: ranks and empirical copulas of samples.
//! * [`subcopula`]: subcopulas and their extension to irreducible copulas.
//! * [`sklar`]: both directions of the discrete Sklar theorem.
//! * [`ecc`]: ensemble copula coupling for forecast postprocessing.
//! * [`io`] and [`cli`]: file formats and the command-line front end.
//!
//! All objects are immutable values and all operations are pure; randomized
//! helpers take explicit seeds.

pub mod cli;
pub mod ecc;
pub mod empirical;
pub mod error;
pub mod grid;
pub mod io;
mod lattice;
pub mod normal;
pub mod report;
pub mod sklar;
pub mod stochastic;
pub mod subcopula;

pub use error::{Error, Result};
pub use grid::{box_volume, check_discrete_copula, is_irreducible, min_copula, product_copula, GridFunction, DEFAULT_EPS};
pub use lattice::MAX_DENSE_POINTS;
pub use report::{Axiom, AxiomReport, Violation, Witness};
pub use stochastic::{
    array_from_copula, check_stochastic, copula_from_array, is_permutation_array, permutation_array_from_rank_matrix,
    random_stochastic_array, rank_matrix_from_permutation_array, RankMatrix, StochasticArray,
};
