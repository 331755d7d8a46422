//! Empirical copula and rank matrix of a small sample, with and without ties.

use discopula::empirical::{empirical_copula, ranks, SampleSet, TiePolicy};
use discopula::io::{write_grid, write_rank_matrix};

fn main() -> discopula::error::Result<()> {
    let sample = SampleSet::from_rows(&[vec![0.1, 0.5], vec![0.4, 0.9], vec![0.7, 0.2]])?;
    print!("{}", write_rank_matrix(&ranks(&sample, TiePolicy::Reject)?));
    print!("{}", write_grid(&empirical_copula(&sample, TiePolicy::Reject)?));

    let tied = SampleSet::from_rows(&[vec![1.0, 3.0], vec![1.0, 2.0], vec![2.0, 2.0]])?;
    match ranks(&tied, TiePolicy::Reject) {
        Ok(_) => unreachable!(),
        Err(e) => println!("reject: {e}"),
    }
    print!("first occurrence:\n{}", write_rank_matrix(&ranks(&tied, TiePolicy::FirstOccurrence)?));
    print!("random (seed 7):\n{}", write_rank_matrix(&ranks(&tied, TiePolicy::Random(7))?));
    Ok(())
}
