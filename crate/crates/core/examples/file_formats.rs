//! Writes and re-reads each header-based file format.

use discopula::grid::min_copula;
use discopula::io::{parse_array, parse_grid, parse_rank_matrix, write_array, write_grid, write_rank_matrix};
use discopula::stochastic::{array_from_copula, RankMatrix};

fn main() -> discopula::error::Result<()> {
    let grid = min_copula(2, 2)?;
    let text = write_grid(&grid);
    print!("{text}");
    assert_eq!(parse_grid(&text)?, grid);

    let array = array_from_copula(&grid)?;
    let text = write_array(&array);
    print!("{text}");
    assert_eq!(parse_array(&text)?, array);

    let ranks = RankMatrix::from_rows(&[vec![2, 1], vec![1, 2]])?;
    let text = write_rank_matrix(&ranks);
    print!("{text}");
    assert_eq!(parse_rank_matrix(&text)?, ranks);

    match parse_grid("GRIDFN M=1 L=1\n0 oops\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
