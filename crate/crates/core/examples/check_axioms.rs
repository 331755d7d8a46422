//! Checks a few grid functions against the discrete copula axioms.

use discopula::grid::{check_discrete_copula, min_copula, product_copula, GridFunction, DEFAULT_EPS};

fn main() -> discopula::error::Result<()> {
    let product = product_copula(4, 3)?;
    println!("product copula M=4 L=3: {}", check_discrete_copula(&product, DEFAULT_EPS));

    let min = min_copula(4, 2)?;
    println!("minimum copula M=4 L=2: {}", check_discrete_copula(&min, DEFAULT_EPS));

    // Margins are uniform, but two unit cells have negative mass.
    let bad = GridFunction::new(2, 2, vec![0.0, 0.0, 0.0, 0.0, 0.6, 0.5, 0.0, 0.5, 1.0])?;
    println!("perturbed grid:\n{}", check_discrete_copula(&bad, DEFAULT_EPS));
    Ok(())
}
