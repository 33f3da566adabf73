//! Brute-force integer linear algebra over `i128`, independent of the
//! library's bignum routines.
#![allow(dead_code)]

use crystfib::ratlin::{Int, IntMat, Rat};
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::Rng;

pub type M = Vec<Vec<i128>>;

pub fn to_m(a: &IntMat) -> M {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| i128::try_from(a.get(i, j)).expect("small entry"))
                .collect()
        })
        .collect()
}

pub fn from_m(m: &M, cols: usize) -> IntMat {
    let data: Vec<i64> = m.iter().flatten().map(|&x| x as i64).collect();
    IntMat::from_i64(m.len(), cols, &data)
}

pub fn random_m(rng: &mut StdRng, rows: usize, cols: usize, r: i64) -> M {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-r..=r) as i128).collect())
        .collect()
}

pub fn mul(a: &M, b: &M, inner: usize) -> M {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Laplace expansion along the first row.
pub fn det(m: &M) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: M = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] * det(&minor);
    }
    total
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// gcd of all `k x k` minors; `0` when all vanish, `1` for `k = 0`.
pub fn minor_gcd(m: &M, rows: usize, cols: usize, k: usize) -> i128 {
    if k == 0 {
        return 1;
    }
    let mut g = 0i128;
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let sub: M = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| m[i][j]).collect())
                .collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

pub fn rank(m: &M, rows: usize, cols: usize) -> usize {
    (1..=rows.min(cols))
        .rev()
        .find(|&k| minor_gcd(m, rows, cols, k) != 0)
        .unwrap_or(0)
}

/// Invariant factors from determinantal divisors.
pub fn invariant_factors(m: &M, rows: usize, cols: usize) -> Vec<i128> {
    let r = rank(m, rows, cols);
    (1..=r)
        .map(|k| minor_gcd(m, rows, cols, k) / minor_gcd(m, rows, cols, k - 1))
        .collect()
}

/// Column echelon form required of an HNF.
pub fn is_column_hnf(h: &M, rows: usize, cols: usize) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for j in 0..cols {
        let pivot = (0..rows).find(|&i| h[i][j] != 0);
        match pivot {
            None => seen_zero = true,
            Some(p) => {
                if seen_zero || last_pivot.is_some_and(|q| p <= q) || h[p][j] <= 0 {
                    return false;
                }
                if (0..j).any(|c| h[p][c] < 0 || h[p][c] >= h[p][j]) {
                    return false;
                }
                last_pivot = Some(p);
            }
        }
    }
    true
}

/// Integer solvability of `a x = b` by comparing ranks and gcds of maximal
/// minors of `a` and `[a | b]`.
pub fn solvable(a: &M, rows: usize, cols: usize, b: &[i128]) -> bool {
    let aug: M = a
        .iter()
        .zip(b)
        .map(|(r, x)| r.iter().copied().chain([*x]).collect())
        .collect();
    let r = rank(a, rows, cols);
    if rank(&aug, rows, cols + 1) != r {
        return false;
    }
    minor_gcd(a, rows, cols, r) == minor_gcd(&aug, rows, cols + 1, r)
}

pub fn rat_vec_i128(v: &[i128]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(Int::from(x))).collect()
}

use crystfib::ratlin::{hnf, snf, solve_integer_affine, IntLattice};

fn dims(rng: &mut StdRng) -> (usize, usize) {
    (rng.gen_range(1..=4), rng.gen_range(1..=4))
}

/// One random HNF case: `h = m u`, `u` unimodular, `h` in echelon form.
pub fn hnf_case(rng: &mut StdRng) -> Result<(), String> {
    let (r, c) = dims(rng);
    let m = random_m(rng, r, c, 5);
    let (h, u) = hnf(&from_m(&m, c));
    let (hm, um) = (to_m(&h), to_m(&u));
    if mul(&m, &um, c) != hm {
        return Err(format!("h != m u for {m:?}"));
    }
    if det(&um).abs() != 1 {
        return Err(format!("transform not unimodular for {m:?}"));
    }
    if !is_column_hnf(&hm, r, c) {
        return Err(format!("not in Hermite form: {hm:?} from {m:?}"));
    }
    Ok(())
}

/// One random SNF case: `d = l m r` with unimodular transforms, and the
/// diagonal matches the determinantal-divisor invariants.
pub fn snf_case(rng: &mut StdRng) -> Result<(), String> {
    let (r, c) = dims(rng);
    let m = random_m(rng, r, c, 5);
    let (d, l, rt) = snf(&from_m(&m, c));
    let (dm, lm, rm) = (to_m(&d), to_m(&l), to_m(&rt));
    if mul(&mul(&lm, &m, r), &rm, c) != dm {
        return Err(format!("d != l m r for {m:?}"));
    }
    if det(&lm).abs() != 1 || det(&rm).abs() != 1 {
        return Err(format!("transforms not unimodular for {m:?}"));
    }
    let diag: Vec<i128> = (0..r.min(c))
        .map(|i| dm[i][i])
        .filter(|x| *x != 0)
        .collect();
    let off = (0..r).any(|i| (0..c).any(|j| i != j && dm[i][j] != 0));
    if off || diag != invariant_factors(&m, r, c) {
        return Err(format!(
            "diagonal {dm:?} disagrees with invariants of {m:?}"
        ));
    }
    Ok(())
}

/// One random solve case against the minor criterion and a direct check of
/// any returned solution.
pub fn solve_case(rng: &mut StdRng) -> Result<(), String> {
    let (r, n) = dims(rng);
    let a = random_m(rng, r, n, 3);
    let lattice = if rng.gen_bool(0.5) {
        IntLattice::standard(n)
    } else {
        let k = rng.gen_range(0..=n);
        let gens: Vec<Vec<Int>> = random_m(rng, k, n, 2)
            .into_iter()
            .map(|v| v.into_iter().map(Int::from).collect())
            .collect();
        IntLattice::from_generators(n, &gens)
    };
    let basis = to_m(lattice.basis());
    let k = lattice.rank();
    let b: Vec<i128> = match rng.gen_range(0..3) {
        0 => {
            let mu: Vec<i128> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
            let x: Vec<i128> = (0..n)
                .map(|i| (0..k).map(|j| basis[i][j] * mu[j]).sum())
                .collect();
            (0..r)
                .map(|i| (0..n).map(|j| a[i][j] * x[j]).sum())
                .collect()
        }
        _ => (0..r).map(|_| rng.gen_range(-6..=6)).collect(),
    };
    let half = rng.gen_bool(0.1);
    let mut rhs = rat_vec_i128(&b);
    if half {
        rhs[0] += Rat::new(Int::from(1), Int::from(2));
    }
    let got = solve_integer_affine(&from_m(&a, n), &rhs, &lattice).map_err(|e| e.to_string())?;
    let want = !half && {
        if k == 0 {
            b.iter().all(|x| *x == 0)
        } else {
            solvable(&mul(&a, &basis, n), r, k, &b)
        }
    };
    match got {
        Some(x) => {
            let xi: Vec<i128> = x
                .iter()
                .map(|v| i128::try_from(v).expect("small solution"))
                .collect();
            let ax: Vec<i128> = (0..r)
                .map(|i| (0..n).map(|j| a[i][j] * xi[j]).sum())
                .collect();
            if !want || half || ax != b || !lattice.contains_int(&x) {
                return Err(format!("bad solution {xi:?} for a={a:?} b={b:?}"));
            }
        }
        None if want => {
            return Err(format!(
                "missed solution for a={a:?} b={b:?} lattice={basis:?}"
            ))
        }
        None => {}
    }
    Ok(())
}
