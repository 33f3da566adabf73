mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

fn run(case: fn(&mut StdRng) -> Result<(), String>, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..1000 {
        if let Err(e) = case(&mut rng) {
            panic!("case {i}: {e}");
        }
    }
}

#[test]
fn hnf_matches_oracle() {
    run(common::hnf_case, 11);
}

#[test]
fn snf_matches_determinantal_divisors() {
    run(common::snf_case, 12);
}

#[test]
fn solve_matches_minor_criterion() {
    run(common::solve_case, 13);
}

#[test]
fn oracle_self_check() {
    let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    assert_eq!(common::det(&m), -144);
    assert_eq!(common::invariant_factors(&m, 3, 3), vec![2, 6, 12]);
    assert!(common::solvable(&vec![vec![2, 4]], 1, 2, &[6]));
    assert!(!common::solvable(&vec![vec![2, 4]], 1, 2, &[3]));
}
