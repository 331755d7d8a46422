//! Maps a stochastic array to its copula and back.

use discopula::grid::{check_discrete_copula, is_irreducible, DEFAULT_EPS};
use discopula::io::{write_array, write_grid};
use discopula::stochastic::{array_from_copula, copula_from_array, is_permutation_array, random_stochastic_array};

fn main() -> discopula::error::Result<()> {
    let array = random_stochastic_array(3, 2, 2, 42)?;
    print!("{}", write_array(&array));

    let copula = copula_from_array(&array)?;
    print!("{}", write_grid(&copula));
    println!("axioms: {}", check_discrete_copula(&copula, DEFAULT_EPS));

    let back = array_from_copula(&copula)?;
    println!("round-trip deviation: {:e}", back.max_abs_diff(&array));
    println!(
        "irreducible: {}, permutation array: {}",
        is_irreducible(&copula, DEFAULT_EPS),
        is_permutation_array(&array, DEFAULT_EPS)
    );
    Ok(())
}
