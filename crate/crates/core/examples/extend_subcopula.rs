//! Restricts an irreducible copula to a coarse domain and extends it back.

use discopula::grid::{check_discrete_copula, DEFAULT_EPS};
use discopula::io::{write_grid, write_subcopula};
use discopula::stochastic::{copula_from_array, permutation_array_from_rank_matrix, RankMatrix};
use discopula::subcopula::{block_counts, extend_irreducible, extension_rank_matrix, restrict};

fn main() -> discopula::error::Result<()> {
    let ranks = RankMatrix::from_rows(&[vec![1, 3], vec![2, 1], vec![3, 4], vec![4, 2]])?;
    let copula = copula_from_array(&permutation_array_from_rank_matrix(&ranks)?)?;

    let domains = vec![vec![0, 2, 4], vec![0, 2, 4]];
    let sub = restrict(&copula, &domains)?;
    print!("{}", write_subcopula(&sub));
    println!("block counts: {:?}", block_counts(&sub)?.counts());

    println!("extension ranks: {:?}", extension_rank_matrix(&sub)?.rows().collect::<Vec<_>>());
    let ext = extend_irreducible(&sub)?;
    print!("{}", write_grid(&ext));
    println!("axioms: {}", check_discrete_copula(&ext, DEFAULT_EPS));
    println!("restricts to input: {}", restrict(&ext, &domains)? == sub);
    Ok(())
}
