use super::problem::{CoverageProblem, PlacementSolution};
use crate::error::{Error, Result};

/// Enumeration ceiling on C(n, k).
pub const MAX_COMBINATIONS: f64 = 1e6;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive search over all subsets of at most k candidates, visited in
/// lexicographic order of their sorted indices; the first maximum wins.
pub fn brute_force_placement(problem: &CoverageProblem) -> Result<PlacementSolution> {
    problem.validate()?;
    let n = problem.candidates.len();
    let combos = binomial(n, problem.k);
    if combos > MAX_COMBINATIONS {
        return Err(Error::SizeLimit(format!("C({n}, {}) = {combos} exceeds {MAX_COMBINATIONS}", problem.k)));
    }
    let np = problem.grid.len();
    let words = np.div_ceil(64);
    let masks: Vec<Vec<u64>> = problem
        .candidates
        .iter()
        .map(|c| {
            let mut m = vec![0u64; words];
            for (p, _) in c.covered.iter().enumerate().filter(|(_, &v)| v) {
                m[p / 64] |= 1 << (p % 64);
            }
            m
        })
        .collect();
    let weights = problem.weights();
    let value = |bits: &[u64]| -> f64 {
        (0..np).filter(|&p| bits[p / 64] >> (p % 64) & 1 == 1).map(|p| weights[p]).sum()
    };

    let mut best_val = 0.0;
    let mut best: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut unions: Vec<Vec<u64>> = vec![vec![0u64; words]];
    // Iterative DFS: extend with the next index, or backtrack and advance.
    let mut next = 0usize;
    loop {
        if stack.len() < problem.k && next < n {
            let mut u = unions.last().expect("root union").clone();
            for (a, b) in u.iter_mut().zip(&masks[next]) {
                *a |= b;
            }
            stack.push(next);
            let v = value(&u);
            if v > best_val {
                best_val = v;
                best = stack.clone();
            }
            unions.push(u);
            next += 1;
        } else {
            match stack.pop() {
                Some(last) => {
                    unions.pop();
                    next = last + 1;
                }
                None => break,
            }
        }
    }
    Ok(problem.evaluate(&best, true))
}
