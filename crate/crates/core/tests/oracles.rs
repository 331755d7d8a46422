//! Library results against independent brute-force or hand-derived oracles.

mod common;

use common::*;
use discopula::empirical::{empirical_copula, rank_values, ranks, SampleSet, TiePolicy};
use discopula::grid::{box_volume, check_discrete_copula, min_copula, GridFunction};
use discopula::normal::standard_normal_quantile;
use discopula::report::{Axiom, Witness};
use discopula::stochastic::{random_stochastic_array, copula_from_array, RankMatrix};
use discopula::subcopula::{extend_irreducible, restrict, DiscreteSubcopula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn d3_violations_match_nested_differences() {
    // Uniform margins hold, but two unit cells carry mass -0.1.
    let f = GridFunction::new(2, 2, vec![0.0, 0.0, 0.0, 0.0, 0.6, 0.5, 0.0, 0.5, 1.0]).unwrap();
    let report = check_discrete_copula(&f, 1e-9);
    assert_eq!(report.of(Axiom::D1).count(), 0);
    assert_eq!(report.of(Axiom::D2).count(), 0);

    let oracle = negative_unit_cells(&f, 1e-9);
    let expected: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 0]];
    assert_eq!(oracle.iter().map(|(c, _)| c.clone()).collect::<Vec<_>>(), expected);
    for (_, v) in &oracle {
        assert!((v + 0.1).abs() < 1e-12);
    }

    let found: Vec<(Vec<usize>, f64)> = report
        .of(Axiom::D3)
        .map(|v| match &v.witness {
            Witness::Cell { lower, upper } => {
                assert!(lower.iter().zip(upper).all(|(a, b)| a + 1 == *b));
                (lower.clone(), v.observed)
            }
            other => panic!("unexpected witness {other:?}"),
        })
        .collect();
    let mut found_cells: Vec<_> = found.iter().map(|(c, _)| c.clone()).collect();
    found_cells.sort();
    assert_eq!(found_cells, expected);
    for (_, v) in found {
        assert!((v + 0.1).abs() < 1e-12);
    }
}

#[test]
fn axiom_checker_agrees_with_brute_force_on_perturbed_copulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..60 {
        let m = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=3);
        let array = random_stochastic_array(m, l, rng.gen_range(1..=3), case).unwrap();
        let mut values = copula_from_array(&array).unwrap().into_values();
        let k = rng.gen_range(0..values.len());
        values[k] += rng.gen_range(-0.3..0.3);
        let f = GridFunction::new(m, l, values).unwrap();
        let report = check_discrete_copula(&f, 1e-9);

        let mut cells: Vec<Vec<usize>> = report
            .of(Axiom::D3)
            .map(|v| match &v.witness {
                Witness::Cell { lower, .. } => lower.clone(),
                other => panic!("unexpected witness {other:?}"),
            })
            .collect();
        cells.sort();
        let oracle: Vec<Vec<usize>> = negative_unit_cells(&f, 1e-9).into_iter().map(|(c, _)| c).collect();
        assert_eq!(cells, oracle, "case {case}");

        let grounded_ok = all_points(m, l)
            .iter()
            .filter(|p| p.contains(&0))
            .all(|p| f.at(p).abs() <= 1e-9);
        assert_eq!(report.of(Axiom::D1).count() == 0, grounded_ok, "case {case}");
        assert_eq!(report.of(Axiom::D2).count() == 0, bad_margin_points(&f, 1e-9).is_empty(), "case {case}");
    }
}

#[test]
fn box_volume_matches_nested_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let m = rng.gen_range(1..=5);
        let l = rng.gen_range(1..=4);
        let f = copula_from_array(&random_stochastic_array(m, l, 3, case).unwrap()).unwrap();
        let (lower, upper): (Vec<usize>, Vec<usize>) = (0..l)
            .map(|_| {
                let a = rng.gen_range(0..=m);
                let b = rng.gen_range(0..=m);
                (a.min(b), a.max(b))
            })
            .unzip();
        let expected = nested_difference(&|p| f.at(p), &lower, &upper);
        let got = box_volume(&f, &lower, &upper).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }
}

#[test]
fn min_copula_box_by_hand() {
    // M((1,1),(2,2)) on M = 3, L = 2: min(2,2) - min(1,2) - min(2,1) + min(1,1) = 1.
    let f = min_copula(3, 2).unwrap();
    assert!((box_volume(&f, &[1, 1], &[2, 2]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    // An off-diagonal cell carries no mass.
    assert_eq!(box_volume(&f, &[0, 1], &[1, 2]).unwrap(), 0.0);
}

#[test]
fn empirical_copula_matches_order_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..80 {
        let m = rng.gen_range(1..=7);
        let l = rng.gen_range(1..=3);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..l).map(|_| rng.gen::<f64>()).collect()).collect();
        let sample = SampleSet::from_rows(&rows).unwrap();
        let got = empirical_copula(&sample, TiePolicy::Reject).unwrap();
        assert_eq!(got.values(), &empirical_by_order_statistics(&rows)[..]);
    }
}

#[test]
fn three_point_sample_by_hand() {
    // Ranks (1,2), (2,3), (3,1).
    let rows = vec![vec![0.1, 0.5], vec![0.4, 0.9], vec![0.7, 0.2]];
    let e = empirical_copula(&SampleSet::from_rows(&rows).unwrap(), TiePolicy::Reject).unwrap();
    let third = 1.0 / 3.0;
    let expected = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, third, third],
        [0.0, 0.0, third, 2.0 * third],
        [0.0, third, 2.0 * third, 1.0],
    ];
    for i in 0..=3 {
        for j in 0..=3 {
            assert_eq!(e.at(&[i, j]), expected[i][j], "({i},{j})");
        }
    }
}

#[test]
fn first_occurrence_ties_match_stable_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let n = rng.gen_range(1..20);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
        // Rank = 1 + #{smaller values} + #{equal values earlier in the list}.
        let oracle: Vec<usize> = (0..n)
            .map(|i| {
                1 + values.iter().filter(|&&v| v < values[i]).count()
                    + values[..i].iter().filter(|&&v| v == values[i]).count()
            })
            .collect();
        assert_eq!(rank_values(&values, TiePolicy::FirstOccurrence, 0).unwrap(), oracle);
    }
}

#[test]
fn random_ties_stay_within_tie_groups() {
    let values = [2.0, 1.0, 2.0, 2.0, 0.0, 1.0];
    for seed in 0..20 {
        let r = rank_values(&values, TiePolicy::Random(seed), 0).unwrap();
        assert_eq!(r[4], 1);
        let mut ones = vec![r[1], r[5]];
        ones.sort();
        assert_eq!(ones, vec![2, 3]);
        let mut twos = vec![r[0], r[2], r[3]];
        twos.sort();
        assert_eq!(twos, vec![4, 5, 6]);
    }
}

#[test]
fn ranks_of_sample_are_per_column_orders() {
    let rows = vec![vec![3.0, -1.0], vec![1.0, 5.0], vec![2.0, 0.0]];
    let r = ranks(&SampleSet::from_rows(&rows).unwrap(), TiePolicy::Reject).unwrap();
    assert_eq!(r, RankMatrix::from_rows(&[vec![3, 1], vec![1, 3], vec![2, 2]]).unwrap());
}

#[test]
fn normal_quantile_matches_high_precision_oracle() {
    let oracle = normal_quantile_oracle();
    assert_eq!(oracle.len(), 1000);
    let worst = oracle
        .iter()
        .map(|&(p, q)| (standard_normal_quantile(p) - q).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "max error {worst}");
}

#[test]
fn trivial_subcopula_admits_both_bivariate_permutations() {
    let sub = DiscreteSubcopula::new(2, vec![vec![0, 2], vec![0, 2]], vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let (lo, hi, valid) = bivariate_extension_bounds(&sub);
    assert_eq!(valid, 2);
    // The two extensions differ only at (1,1): 1/2 for the identity, 0 for the swap.
    assert_eq!(lo[4], 0.0);
    assert_eq!(hi[4], 0.5);
    let ext = extend_irreducible(&sub).unwrap();
    assert!(ext.at(&[1, 1]) == 0.0 || ext.at(&[1, 1]) == 0.5);
}

#[test]
fn extensions_lie_between_enumerated_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..120 {
        let m = rng.gen_range(1..=4);
        let source = copula_of(&random_ranks(m, 2, &mut rng));
        let domains = random_domains(m, 2, &mut rng);
        let sub = restrict(&source, &domains).unwrap();
        let (lo, hi, valid) = bivariate_extension_bounds(&sub);
        assert!(valid >= 1);
        let ext = extend_irreducible(&sub).unwrap();
        for (k, &v) in ext.values().iter().enumerate() {
            assert!(lo[k] <= v && v <= hi[k], "case {case}, point {k}");
        }
    }
}
