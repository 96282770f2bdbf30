#![allow(dead_code)]

use avglink::{Dendrogram, DistanceSource, Norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points in `[0, 10)^d`, either uniform or around a few random centres,
/// with an occasional exact duplicate.
pub fn random_features(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    let centres: Vec<Vec<f64>> = (0..rng.gen_range(1..=4)).map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
    let spread = if rng.gen_bool(0.5) { 10.0 } else { 1.0 };
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        if !rows.is_empty() && rng.gen_bool(0.05) {
            let i = rng.gen_range(0..rows.len());
            rows.push(rows[i].clone());
            continue;
        }
        let c = &centres[rng.gen_range(0..centres.len())];
        rows.push(c.iter().map(|&x| x + spread * (rng.gen::<f64>() - 0.5)).collect());
    }
    rows
}

pub fn random_norm(rng: &mut ChaCha8Rng) -> Norm {
    Norm::ALL[rng.gen_range(0..3)]
}

/// Feature-backed metric source with `n` points.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> DistanceSource {
    let d = rng.gen_range(1..=4);
    let rows = random_features(rng, n, d);
    let norm = random_norm(rng);
    DistanceSource::from_features(&rows, norm).unwrap()
}

/// Matrix-backed metric: shortest-path closure of random edge weights.
pub fn random_path_metric(rng: &mut ChaCha8Rng, n: usize) -> DistanceSource {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1.0..10.0);
            m[i][j] = w;
            m[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    DistanceSource::from_fn(n, |i, j| m[i][j]).unwrap()
}

/// Matrix-backed source with arbitrary non-negative entries; small integer
/// entries are mixed in so ties are common.
pub fn random_dissimilarity(rng: &mut ChaCha8Rng, n: usize) -> DistanceSource {
    let integer = rng.gen_bool(0.5);
    DistanceSource::from_fn(n, |_, _| if integer { rng.gen_range(0..6) as f64 } else { rng.gen_range(0.0..100.0) })
        .unwrap()
}

/// Any of the metric generators above.
pub fn any_metric(rng: &mut ChaCha8Rng, n: usize) -> DistanceSource {
    if rng.gen_bool(0.7) {
        random_metric(rng, n)
    } else {
        random_path_metric(rng, n)
    }
}

/// Plain double sums, independent of the library's accumulation.
pub fn plain_avg_between(src: &DistanceSource, a: &[usize], b: &[usize]) -> f64 {
    let mut s = 0.0;
    for &i in a {
        for &j in b {
            s += src.dist(i, j);
        }
    }
    s / (a.len() * b.len()) as f64
}

pub fn plain_diam(src: &DistanceSource, a: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (x, &i) in a.iter().enumerate() {
        for &j in &a[x + 1..] {
            d = d.max(src.dist(i, j));
        }
    }
    d
}

/// `H_p = 1 + 1/2 + ... + 1/p`, with `H_0 = 0`.
pub fn harmonic(p: usize) -> f64 {
    (1..=p).map(|i| 1.0 / i as f64).sum()
}

/// `sum_{i<j} d(i,j) * |leaves(lca(i,j))|` with explicit ancestor walks.
pub fn lca_cost(d: &Dendrogram, src: &DistanceSource) -> f64 {
    let n = d.n();
    let mut parent = vec![usize::MAX; 2 * n];
    let mut size = vec![1usize; 2 * n];
    for (t, m) in d.merges().iter().enumerate() {
        parent[m.left] = n + t;
        parent[m.right] = n + t;
        size[n + t] = m.size;
    }
    let ancestors = |mut v: usize| {
        let mut out = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            out.push(v);
        }
        out
    };
    let mut total = 0.0;
    for i in 0..n {
        let ai = ancestors(i);
        for j in i + 1..n {
            let lca = ancestors(j).into_iter().find(|v| ai.contains(v)).unwrap();
            total += src.dist(i, j) * size[lca] as f64;
        }
    }
    total
}
