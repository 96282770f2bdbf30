use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dendrogram, Merge};
use crate::error::{Error, Result};

/// Random hierarchy from the top-down split process.
///
/// Points are placed in a random order `x_1..x_n`. Positions `j` are drawn
/// uniformly from `1..n-1`; when `x_j` and `x_{j+1}` still share a cluster,
/// that cluster is split between them. The splits are recorded bottom-up,
/// so merge `t` undoes the `(n-1-t)`-th split. Its height is `n` minus the
/// number of clusters right after that split, which is `t`.
pub fn random_hierarchy(n: usize, seed: u64) -> Result<Dendrogram> {
    random_hierarchy_with_order(n, seed).map(|(d, _)| d)
}

/// As [`random_hierarchy`], also returning the point order `x_1..x_n`.
pub fn random_hierarchy_with_order(n: usize, seed: u64) -> Result<(Dendrogram, Vec<usize>)> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    // split_at[j] for j in 1..n separates positions j-1 and j (0-based).
    let mut split = vec![false; n];
    let mut splits = Vec::with_capacity(n - 1);
    while splits.len() + 1 < n {
        let j = rng.gen_range(1..n);
        if !split[j] {
            split[j] = true;
            splits.push(j);
        }
    }

    // Bottom-up: undo splits last to first. Clusters are runs of positions;
    // track the id and extent of the run starting at each position.
    let mut run_id: Vec<usize> = order.clone();
    let mut run_end: Vec<usize> = (1..=n).collect();
    let mut run_start: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for (t, &j) in splits.iter().rev().enumerate() {
        let left_start = run_start[j - 1];
        let right_end = run_end[j];
        let (l, r) = (run_id[left_start], run_id[j]);
        merges.push(Merge { left: l, right: r, height: t as f64, size: right_end - left_start });
        run_id[left_start] = n + t;
        run_end[left_start] = right_end;
        run_start[right_end - 1] = left_start;
    }
    Ok((Dendrogram::from_trusted(n, merges), order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let d = random_hierarchy(2, 99).unwrap();
        assert_eq!(d.merges().len(), 1);
        assert_eq!(d.merges()[0].size, 2);
        assert_eq!(d.merges()[0].height, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_hierarchy(8, 5).unwrap(), random_hierarchy(8, 5).unwrap());
        assert!(random_hierarchy(0, 1).is_err());
    }

    #[test]
    fn cuts_are_runs_of_the_order() {
        for seed in 0..200 {
            let (d, order) = random_hierarchy_with_order(9, seed).unwrap();
            for k in 1..=9 {
                let c = d.cut(k).unwrap();
                let along: Vec<usize> = order.iter().map(|&p| c.label(p)).collect();
                let changes = along.windows(2).filter(|w| w[0] != w[1]).count();
                assert_eq!(changes, k - 1, "seed {seed} k {k}");
            }
        }
    }
}
