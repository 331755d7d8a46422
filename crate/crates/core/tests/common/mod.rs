//! Independent oracles and fixture generators shared by the integration tests.
//!
//! Nothing here calls the library routine it is used to check.
#![allow(dead_code)]

use discopula::grid::GridFunction;
use discopula::stochastic::{copula_from_array, permutation_array_from_rank_matrix, RankMatrix};
use discopula::subcopula::DiscreteSubcopula;
use rand::seq::SliceRandom;
use rand::Rng;

/// Iterated difference `Δ_{lower_L}^{upper_L} ⋯ Δ_{lower_1}^{upper_1} f`,
/// expanded one axis at a time by recursion.
pub fn nested_difference(f: &dyn Fn(&[usize]) -> f64, lower: &[usize], upper: &[usize]) -> f64 {
    fn go(f: &dyn Fn(&[usize]) -> f64, lower: &[usize], upper: &[usize], point: &mut Vec<usize>, axis: usize) -> f64 {
        if axis == lower.len() {
            return f(point);
        }
        point[axis] = upper[axis];
        let hi = go(f, lower, upper, point, axis + 1);
        point[axis] = lower[axis];
        let lo = go(f, lower, upper, point, axis + 1);
        hi - lo
    }
    let mut point = lower.to_vec();
    go(f, lower, upper, &mut point, 0)
}

/// All points of `{0..=m}^l`, first coordinate slowest, by plain counting.
pub fn all_points(m: usize, l: usize) -> Vec<Vec<usize>> {
    let n = (m + 1).pow(l as u32);
    (0..n)
        .map(|mut k| {
            let mut p = vec![0; l];
            for axis in (0..l).rev() {
                p[axis] = k % (m + 1);
                k /= m + 1;
            }
            p
        })
        .collect()
}

/// Unit cells violating L-increasingness (lower corners), by brute force.
pub fn negative_unit_cells(f: &GridFunction, eps: f64) -> Vec<(Vec<usize>, f64)> {
    let m = f.resolution();
    let l = f.dim();
    let value = |p: &[usize]| f.at(p);
    all_points(m, l)
        .into_iter()
        .filter(|p| p.iter().all(|&i| i < m))
        .filter_map(|lower| {
            let upper: Vec<usize> = lower.iter().map(|i| i + 1).collect();
            let v = nested_difference(&value, &lower, &upper);
            (v < -eps).then_some((lower, v))
        })
        .collect()
}

/// Margin lines `D(1, ..., i/M, ..., 1)` that are off `i/M`.
pub fn bad_margin_points(f: &GridFunction, eps: f64) -> Vec<Vec<usize>> {
    let m = f.resolution();
    all_points(m, f.dim())
        .into_iter()
        .filter(|p| p.iter().filter(|&&i| i != m).count() <= 1)
        .filter(|p| {
            let i = p.iter().copied().min().unwrap();
            (f.at(p) - i as f64 / m as f64).abs() > eps
        })
        .collect()
}

/// Empirical copula from order statistics:
/// `#{m : x_m^ℓ ≤ x_(i_ℓ)^ℓ for all ℓ} / M`, and 0 when some `i_ℓ = 0`.
pub fn empirical_by_order_statistics(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = rows.len();
    let l = rows[0].len();
    let order_stats: Vec<Vec<f64>> = (0..l)
        .map(|axis| {
            let mut c: Vec<f64> = rows.iter().map(|r| r[axis]).collect();
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            c
        })
        .collect();
    all_points(m, l)
        .into_iter()
        .map(|p| {
            if p.contains(&0) {
                return 0.0;
            }
            let count = rows
                .iter()
                .filter(|r| (0..l).all(|axis| r[axis] <= order_stats[axis][p[axis] - 1]))
                .count();
            count as f64 / m as f64
        })
        .collect()
}

pub fn random_ranks<R: Rng>(m: usize, l: usize, rng: &mut R) -> RankMatrix {
    let columns: Vec<Vec<usize>> = (0..l)
        .map(|_| {
            let mut c: Vec<usize> = (1..=m).collect();
            c.shuffle(rng);
            c
        })
        .collect();
    RankMatrix::from_columns(&columns).unwrap()
}

/// Each axis keeps 0 and `m` plus a random subset of the interior points.
pub fn random_domains<R: Rng>(m: usize, l: usize, rng: &mut R) -> Vec<Vec<usize>> {
    (0..l)
        .map(|_| {
            let mut d = vec![0];
            d.extend((1..m).filter(|_| rng.gen_bool(0.4)));
            d.push(m);
            d
        })
        .collect()
}

/// Strictly increasing random grid of `m` values.
pub fn random_increasing<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut x = rng.gen_range(-10.0..10.0);
    (0..m)
        .map(|_| {
            x += rng.gen_range(0.01..3.0);
            x
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n);
            out.push(q);
        }
    }
    out
}

/// Pointwise smallest and largest irreducible extensions of a bivariate
/// subcopula, found by trying every `M × M` permutation matrix. Returns the
/// bounds and the number of valid extensions.
pub fn bivariate_extension_bounds(sub: &DiscreteSubcopula) -> (Vec<f64>, Vec<f64>, usize) {
    assert_eq!(sub.dim(), 2);
    let m = sub.resolution();
    let n = (m + 1) * (m + 1);
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut valid = 0;
    for perm in permutations(m) {
        let ranks = RankMatrix::from_columns(&[(1..=m).collect(), perm]).unwrap();
        // Count-based copula: #{k : k ≤ i, perm(k) ≤ j} / M.
        let copula = |i: usize, j: usize| -> f64 {
            (0..m).filter(|&k| ranks.rank(k, 0) <= i && ranks.rank(k, 1) <= j).count() as f64 / m as f64
        };
        let restricts = sub.domains()[0].iter().all(|&i| {
            sub.domains()[1].iter().all(|&j| sub.get(&[i, j]).unwrap() == copula(i, j))
        });
        if !restricts {
            continue;
        }
        valid += 1;
        for i in 0..=m {
            for j in 0..=m {
                let v = copula(i, j);
                let k = i * (m + 1) + j;
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
    }
    (lo, hi, valid)
}

pub fn copula_of(ranks: &RankMatrix) -> GridFunction {
    copula_from_array(&permutation_array_from_rank_matrix(ranks).unwrap()).unwrap()
}

/// `(p, Φ⁻¹(p))` pairs computed offline with 50-digit arithmetic.
pub fn normal_quantile_oracle() -> Vec<(f64, f64)> {
    let text = include_str!("../data/normal_quantile_oracle.csv");
    text.lines()
        .skip(1)
        .map(|line| {
            let (p, q) = line.split_once(',').unwrap();
            (p.parse().unwrap(), q.parse().unwrap())
        })
        .collect()
}

/// Integer counts `M · D(i)` of a grid, asserting every value is exactly a
/// multiple of `1/M` as produced by `k as f64 / M as f64`.
pub fn exact_counts(f: &GridFunction) -> Vec<i64> {
    let m = f.resolution() as f64;
    f.values()
        .iter()
        .map(|&v| {
            let k = (v * m).round();
            assert_eq!(v, k / m, "value {v} is not an exact lattice point");
            k as i64
        })
        .collect()
}

/// Copula axioms checked in integer arithmetic on `M · D`.
pub fn exact_copula_axioms_hold(f: &GridFunction) -> bool {
    let m = f.resolution();
    let l = f.dim();
    let counts = exact_counts(f);
    let points = all_points(m, l);
    let at = |p: &[usize]| -> i64 {
        let off = p.iter().fold(0, |acc, &i| acc * (m + 1) + i);
        counts[off]
    };
    for p in &points {
        if p.contains(&0) && at(p) != 0 {
            return false;
        }
        let free: Vec<usize> = (0..l).filter(|&a| p[a] != m).collect();
        if free.len() <= 1 {
            let i = free.first().map_or(m, |&a| p[a]);
            if at(p) != i as i64 {
                return false;
            }
        }
        if p.iter().all(|&i| i < m) {
            let upper: Vec<usize> = p.iter().map(|i| i + 1).collect();
            let v = nested_difference(&|q| at(q) as f64, p, &upper);
            if v < 0.0 {
                return false;
            }
        }
    }
    true
}

pub fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn run_cli(args: &[String]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_discopula"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// One invocation of every subcommand, writing into `dir`. Each entry is the
/// subcommand name, its arguments and the files it writes.
pub fn every_subcommand(dir: &std::path::Path) -> Vec<(&'static str, Vec<String>, Vec<String>)> {
    let out = |name: &str| dir.join(name).display().to_string();
    let s = |x: &str| x.to_string();
    vec![
        ("check", vec![s("check"), fixture("min_m3_l2.grid"), s("--format"), s("json")], vec![]),
        ("to-array", vec![s("to-array"), fixture("min_m3_l2.grid"), s("-o"), out("a.arr")], vec![out("a.arr")]),
        ("from-array", vec![s("from-array"), fixture("mixture_m2_l3.arr"), s("-o"), out("g.grid")], vec![out("g.grid")]),
        (
            "empirical",
            vec![s("empirical"), fixture("samples_3x2.csv"), s("--ties"), s("random"), s("--seed"), s("4"), s("-o"), out("e.grid"), s("--ranks-out"), out("e.ranks")],
            vec![out("e.grid"), out("e.ranks")],
        ),
        ("extend", vec![s("extend"), fixture("min_restricted_m4.subcop"), s("-o"), out("x.grid")], vec![out("x.grid")]),
        (
            "sklar-compose",
            vec![s("sklar-compose"), s("--grid"), fixture("min_m3_l2.grid"), s("--margin"), fixture("uniform3_margin.csv"), s("--margin"), fixture("uniform3_margin.csv"), s("-o"), out("j.csv")],
            vec![out("j.csv")],
        ),
        ("sklar-extract", vec![s("sklar-extract"), fixture("joint_reduced_m4.csv"), s("-M"), s("4"), s("-o"), out("s.grid")], vec![out("s.grid")]),
        (
            "ecc",
            vec![s("ecc"), s("--raw"), fixture("ecc_raw_3x2.csv"), s("--margins"), fixture("ecc_margins_gaussian_3x2.json"), s("--seed"), s("7"), s("--scheme"), s("random"), s("-o"), out("ecc.csv"), s("--report"), out("ecc.json")],
            vec![out("ecc.csv"), out("ecc.json")],
        ),
        (
            "plot-data",
            vec![s("plot-data"), fixture("ecc_raw_3x2.csv"), s("--x"), s("t2m,berlin,24"), s("--y"), s("t2m,hamburg,24"), s("--scatter"), out("sc.csv"), s("--copula"), out("cg.csv")],
            vec![out("sc.csv"), out("cg.csv")],
        ),
    ]
}
