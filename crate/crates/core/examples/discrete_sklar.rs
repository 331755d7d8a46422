//! Splits a discrete joint distribution into copula and margins, then
//! composes them again.

use discopula::sklar::{compose, extract_copula, DiscreteJointDistribution};

fn main() -> discopula::error::Result<()> {
    // Three equally likely points with distinct coordinates: full-range margins.
    let full = DiscreteJointDistribution::from_points(
        3,
        &[(vec![1.5, 10.0], 1.0 / 3.0), (vec![2.5, 30.0], 1.0 / 3.0), (vec![4.0, 20.0], 1.0 / 3.0)],
    )?;
    let extraction = extract_copula(&full)?;
    println!("unique: {}", extraction.unique);
    let h = compose(&extraction.copula, &extraction.margins)?;
    for x in [[1.5, 10.0], [2.5, 20.0], [4.0, 30.0]] {
        println!("H({x:?}) = {} (joint cdf {})", h.eval(&x), full.cdf(&x));
    }

    // Two atoms of mass 1/2 on a resolution-4 lattice: margins skip levels 1/4, 3/4.
    let reduced = DiscreteJointDistribution::from_points(4, &[(vec![0.0, 0.0], 0.5), (vec![1.0, 1.0], 0.5)])?;
    let extraction = extract_copula(&reduced)?;
    println!("reduced margins, unique: {}", extraction.unique);
    println!("one compatible copula: {:?}", extraction.copula.values());
    Ok(())
}
