//! Ensemble copula coupling on a toy three-member, two-location forecast.

use discopula::ecc::{run_ecc, EnsembleDataset, MarginId, PredictiveMargin, SamplingScheme};
use discopula::io::{write_ecc_csv, write_report_json};

fn main() -> discopula::error::Result<()> {
    let raw = EnsembleDataset::new(
        vec![MarginId::new("t2m", "berlin", "24"), MarginId::new("t2m", "hamburg", "24")],
        vec![vec![10.0, 12.0, 11.0], vec![5.0, 4.0, 6.0]],
    )?;
    let margins = vec![PredictiveMargin::gaussian(21.0, 1.5)?, PredictiveMargin::gaussian(0.2, 0.1)?];

    let quantiles = run_ecc(&raw, &margins, SamplingScheme::Quantiles, 1)?;
    print!("{}", write_ecc_csv(&raw, &quantiles.ensemble)?);
    print!("{}", write_report_json(&quantiles.report));

    let draws = run_ecc(&raw, &margins, SamplingScheme::RandomDraws { seed: 99 }, 1)?;
    print!("{}", write_ecc_csv(&raw, &draws.ensemble)?);
    Ok(())
}
