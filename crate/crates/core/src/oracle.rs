//! Exhaustive ground truth for small inputs: optimal criterion values over
//! all `k`-partitions, the best `k`-point subset, and a table of the
//! average-link guarantees checked against those optima.

use std::fmt::Write as _;

use crate::criteria::{cs_ratio, BlockStats};
use crate::error::{Error, Result};
use crate::linkage::{build_naive, Clustering, LinkageRule, TieBreak};
use crate::metric::{harmonic_unchecked, is_metric, sum_within, pairs, DistanceSource, IndexSet, METRIC_TOL};

/// Largest point count accepted by the partition enumerator.
pub const MAX_ENUM_N: usize = 13;
/// Largest number of subsets [`max_avg_subset`] will scan.
pub const MAX_SUBSETS: u128 = 2_000_000;
/// Absolute slack added to every bound check.
pub const BOUND_SLACK: f64 = 1e-9;

/// Partitions of `0..n` into exactly `k` nonempty blocks, as restricted
/// growth strings in lexicographic order.
#[derive(Clone, Debug)]
pub struct Partitions {
    k: usize,
    rgs: Vec<usize>,
    /// `prefix_max[i]` is the largest label among `rgs[..=i]`.
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl Partitions {
    fn fill_from(&mut self, start: usize) -> bool {
        // Smallest completion of rgs[..start] that still reaches k labels:
        // zeros, then the missing labels in increasing order at the tail.
        let n = self.rgs.len();
        let top = if start == 0 { 0 } else { self.prefix_max[start - 1] };
        let missing = self.k - 1 - top;
        if n - start < missing {
            return false;
        }
        for i in start..n {
            let tail = n - i;
            self.rgs[i] = if tail <= missing { self.k - tail } else { 0 };
            let prev = if i == 0 { 0 } else { self.prefix_max[i - 1] };
            self.prefix_max[i] = prev.max(self.rgs[i]);
        }
        true
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.rgs[0] = 0;
            self.prefix_max[0] = 0;
            if !self.fill_from(1) {
                self.done = true;
                return None;
            }
            return Some(self.rgs.clone());
        }
        let n = self.rgs.len();
        for i in (1..n).rev() {
            let cap = (self.prefix_max[i - 1] + 1).min(self.k - 1);
            if self.rgs[i] < cap {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                if self.fill_from(i + 1) {
                    return Some(self.rgs.clone());
                }
            }
        }
        self.done = true;
        None
    }
}

/// Restricted growth strings for all partitions of `0..n` into `k` blocks.
pub fn partition_labels(n: usize, k: usize) -> Result<Partitions> {
    if n > MAX_ENUM_N {
        return Err(Error::BudgetExceeded(format!(
            "partition enumeration supports n <= {MAX_ENUM_N}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(Partitions { k, rgs: vec![0; n], prefix_max: vec![0; n], started: false, done: false })
}

/// Every partition of `0..n` into exactly `k` nonempty blocks, once each.
pub fn enumerate_partitions(n: usize, k: usize) -> Result<impl Iterator<Item = Clustering>> {
    Ok(partition_labels(n, k)?.map(move |rgs| Clustering::from_canonical(rgs, k)))
}

/// Exact optima over all `k`-partitions, each with the lexicographically
/// smallest optimal partition as witness.
#[derive(Clone, Debug, PartialEq)]
pub struct OptReport {
    pub k: usize,
    /// Maximum `sep_av`.
    pub opt_sep: f64,
    /// Minimum `max_diam`.
    pub opt_dm: f64,
    /// Minimum `avg_diam`.
    pub opt_av: f64,
    /// Minimum `cs_ratio_dm`.
    pub opt_cs_dm: f64,
    pub sep_witness: Clustering,
    pub dm_witness: Clustering,
    pub av_witness: Clustering,
    pub cs_dm_witness: Clustering,
    /// Number of partitions scanned.
    pub partitions: u64,
}

/// Brute-force optima for `2 <= k <= n`, `n <= 13`.
pub fn compute_opts(src: &DistanceSource, k: usize) -> Result<OptReport> {
    let n = src.n();
    if k < 2 {
        return Err(Error::TooFewBlocks(k));
    }
    let parts = partition_labels(n, k)?;
    let m = src.materialize();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut w: [Vec<usize>; 4] = Default::default();
    let mut count = 0u64;
    for rgs in parts {
        count += 1;
        let st = BlockStats::compute(&m, &rgs, k);
        let sep = st.sep_av();
        let dm = st.max_diam();
        let av = st.avg_diam();
        let cs = cs_ratio(dm, st.sep_min());
        match &mut best {
            None => {
                best = Some((sep, dm, av, cs));
                w = [rgs.clone(), rgs.clone(), rgs.clone(), rgs];
            }
            Some(b) => {
                // strict improvement keeps the lexicographically first witness
                if sep > b.0 {
                    b.0 = sep;
                    w[0].clone_from(&rgs);
                }
                if dm < b.1 {
                    b.1 = dm;
                    w[1].clone_from(&rgs);
                }
                if av < b.2 {
                    b.2 = av;
                    w[2].clone_from(&rgs);
                }
                if cs < b.3 {
                    b.3 = cs;
                    w[3] = rgs;
                }
            }
        }
    }
    let (opt_sep, opt_dm, opt_av, opt_cs_dm) = best.expect("k <= n gives at least one partition");
    let [a, b, c, d] = w;
    let wit = |labels| Clustering::from_canonical(labels, k);
    Ok(OptReport {
        k,
        opt_sep,
        opt_dm,
        opt_av,
        opt_cs_dm,
        sep_witness: wit(a),
        dm_witness: wit(b),
        av_witness: wit(c),
        cs_dm_witness: wit(d),
        partitions: count,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `k`-point subset with the largest mean pairwise distance; the
/// lexicographically first one on ties.
pub fn max_avg_subset(src: &DistanceSource, k: usize) -> Result<(IndexSet, f64)> {
    let n = src.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let total = binomial(n, k);
    if total > MAX_SUBSETS {
        return Err(Error::BudgetExceeded(format!(
            "C({n},{k}) = {total} subsets exceeds {MAX_SUBSETS}"
        )));
    }
    let m = src.materialize();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = (idx.clone(), f64::NEG_INFINITY);
    loop {
        let v = if k < 2 { 0.0 } else { sum_within(&m, &idx) / pairs(k) };
        if v > best.1 {
            best = (idx.clone(), v);
        }
        // next combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok((IndexSet::new(best.0)?, best.1))
}

/// Direction of a bound check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `lhs <= rhs + slack`
    AtMost,
    /// `lhs >= rhs - slack`
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    Pass,
    Fail,
    /// The guarantee assumes a metric and the source is not one.
    SkippedNonMetric,
}

/// One row of the bounds table.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub status: BoundStatus,
    /// Free-form detail, such as the worst triple found.
    pub detail: String,
}

impl BoundCheck {
    /// Distance from the bound in the safe direction; negative means violated.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::AtMost => self.rhs - self.lhs,
            Relation::AtLeast => self.lhs - self.rhs,
        }
    }

    fn new(name: &'static str, relation: Relation, lhs: f64, rhs: f64, needs_metric: bool, metric: bool) -> Self {
        let ok = match relation {
            Relation::AtMost => lhs <= rhs + BOUND_SLACK,
            Relation::AtLeast => lhs >= rhs - BOUND_SLACK,
        };
        let status = if needs_metric && !metric {
            BoundStatus::SkippedNonMetric
        } else if ok {
            BoundStatus::Pass
        } else {
            BoundStatus::Fail
        };
        BoundCheck { name, relation, lhs, rhs, status, detail: String::new() }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }
}

/// Bounds evaluated on one `k`-cut.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub rule: LinkageRule,
    pub metric: bool,
    pub cut: Clustering,
    pub opts: OptReport,
    pub subset_value: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    /// No check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != BoundStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fixed-order text table: bound, lhs, rhs, margin, status.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "n = {}, k = {}, rule = {}, metric = {}",
            self.n, self.k, self.rule, self.metric
        );
        let _ = writeln!(out, "{:<24} {:>14} {:>14} {:>14}  status", "bound", "lhs", "rhs", "margin");
        for c in &self.checks {
            let status = match c.status {
                BoundStatus::Pass => "PASS",
                BoundStatus::Fail => "FAIL",
                BoundStatus::SkippedNonMetric => "SKIP (non-metric)",
            };
            let _ = writeln!(
                out,
                "{:<24} {:>14.6e} {:>14.6e} {:>14.6e}  {status}",
                c.name,
                c.lhs,
                c.rhs,
                c.margin()
            );
        }
        out
    }
}

/// Worst case of `diam(X) <= 2 H_{|X|-1} avg(Y,Z)` over all clusters `X`
/// and distinct `Y`, `Z` of `cut`: returns `(lhs, rhs, description)` of the
/// triple with the smallest margin.
pub fn worst_diameter_triple(src: &DistanceSource, cut: &Clustering) -> Option<(f64, f64, String)> {
    let k = cut.k();
    if k < 2 {
        return None;
    }
    let st = BlockStats::compute(src, cut.labels(), k);
    let sizes = cut.block_sizes();
    let blocks = cut.blocks();
    let min_cross = min_cross_pair(&st, k);
    let mut worst: Option<(f64, f64, String)> = None;
    for x in 0..k {
        let d = crate::metric::diam_of(src, &blocks[x]);
        let rhs = 2.0 * harmonic_unchecked(sizes[x] - 1) * min_cross.0;
        if worst.as_ref().map_or(true, |w| rhs - d < w.1 - w.0) {
            worst = Some((d, rhs, format!("X=#{x} Y=#{} Z=#{}", min_cross.1, min_cross.2)));
        }
    }
    worst
}

/// Worst case of `avg(x, X-x) <= H_{|X|-1} avg(Y,Z)` over every point `x`
/// of every cluster with at least two points.
pub fn worst_outlier(src: &DistanceSource, cut: &Clustering) -> Option<(f64, f64, String)> {
    let k = cut.k();
    if k < 2 {
        return None;
    }
    let st = BlockStats::compute(src, cut.labels(), k);
    let min_cross = min_cross_pair(&st, k);
    let mut worst: Option<(f64, f64, String)> = None;
    for (b, block) in cut.blocks().iter().enumerate() {
        if block.len() < 2 {
            continue;
        }
        let rhs = harmonic_unchecked(block.len() - 1) * min_cross.0;
        for &x in block {
            let rest: Vec<usize> = block.iter().copied().filter(|&y| y != x).collect();
            let lhs = crate::metric::sum_between(src, &[x], &rest) / rest.len() as f64;
            if worst.as_ref().map_or(true, |w| rhs - lhs < w.1 - w.0) {
                worst = Some((lhs, rhs, format!("x={x} X=#{b} Y=#{} Z=#{}", min_cross.1, min_cross.2)));
            }
        }
    }
    worst
}

/// Smallest cross-block average and the pair attaining it. The right-hand
/// sides only ever use `avg(Y,Z)` through its minimum.
fn min_cross_pair(st: &BlockStats, k: usize) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 1);
    for a in 0..k {
        for b in a + 1..k {
            let v = st.avg_between(a, b);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    best
}

/// Checks the average-link guarantees on the `k`-cut of `rule`'s hierarchy
/// (naive engine, lexicographic tie-break) against the exhaustive optima.
///
/// Rows, in order:
/// * `cs_av_at_most_1`: `cs_ratio_av <= 1`, holds without a metric.
/// * `cs_dm_at_most_2hn`: `cs_ratio_dm <= 2 H_n`.
/// * `diam_vs_cross_avg`: worst `diam(X) <= 2 H_{|X|-1} avg(Y,Z)`.
/// * `outlier_vs_cross_avg`: worst `avg(x, X-x) <= H_{|X|-1} avg(Y,Z)`.
/// * `cs_dm_approx`: `cs_ratio_dm <= 6 H_n opt_cs_dm` when `opt_cs_dm >= 1/3`,
///   otherwise `cs_ratio_dm <= opt_cs_dm` (the cut is optimal).
/// * `sep_av_approx`: `sep_av >= opt_sep / (k + 2 H_n)`.
/// * `subset_avg_vs_opt_sep`: best `k`-subset average `>= opt_sep`, holds
///   without a metric.
/// * `diam_vs_opt_av`: `max_diam <= min(k, 4 ln n + 1) k^{log2 3} opt_av`.
pub fn verify_bounds(src: &DistanceSource, k: usize, rule: LinkageRule) -> Result<BoundsReport> {
    let n = src.n();
    let opts = compute_opts(src, k)?;
    let m = src.materialize();
    let metric = is_metric(src, METRIC_TOL);
    let cut = build_naive(&m, rule, TieBreak::LexMinId)?.cut(k)?;
    let st = BlockStats::compute(&m, cut.labels(), k);
    let hn = harmonic_unchecked(n);
    let (subset, subset_value) = max_avg_subset(&m, k)?;

    let mut checks = Vec::with_capacity(8);
    let cs_av = cs_ratio(st.max_avg(), st.sep_min());
    let cs_dm = cs_ratio(st.max_diam(), st.sep_min());
    checks.push(BoundCheck::new("cs_av_at_most_1", Relation::AtMost, cs_av, 1.0, false, metric));
    checks.push(BoundCheck::new("cs_dm_at_most_2hn", Relation::AtMost, cs_dm, 2.0 * hn, true, metric));

    let (lhs, rhs, detail) = worst_diameter_triple(&m, &cut).expect("k >= 2");
    checks.push(BoundCheck::new("diam_vs_cross_avg", Relation::AtMost, lhs, rhs, true, metric).with_detail(detail));
    match worst_outlier(&m, &cut) {
        Some((lhs, rhs, detail)) => checks.push(
            BoundCheck::new("outlier_vs_cross_avg", Relation::AtMost, lhs, rhs, true, metric).with_detail(detail),
        ),
        None => checks.push(
            BoundCheck::new("outlier_vs_cross_avg", Relation::AtMost, 0.0, 0.0, true, metric)
                .with_detail("all clusters are singletons".into()),
        ),
    }

    let approx_rhs = if opts.opt_cs_dm >= 1.0 / 3.0 { 6.0 * hn * opts.opt_cs_dm } else { opts.opt_cs_dm };
    checks.push(
        BoundCheck::new("cs_dm_approx", Relation::AtMost, cs_dm, approx_rhs, true, metric)
            .with_detail(format!("opt_cs_dm = {}", opts.opt_cs_dm)),
    );
    checks.push(BoundCheck::new(
        "sep_av_approx",
        Relation::AtLeast,
        st.sep_av(),
        opts.opt_sep / (k as f64 + 2.0 * hn),
        true,
        metric,
    ));
    checks.push(
        BoundCheck::new("subset_avg_vs_opt_sep", Relation::AtLeast, subset_value, opts.opt_sep, false, metric)
            .with_detail(format!("P = {subset}")),
    );
    let factor = (k as f64).min(4.0 * (n as f64).ln() + 1.0) * (k as f64).powf(3f64.log2());
    checks.push(BoundCheck::new(
        "diam_vs_opt_av",
        Relation::AtMost,
        st.max_diam(),
        factor * opts.opt_av,
        true,
        metric,
    ));

    Ok(BoundsReport { n, k, rule, metric, cut, opts, subset_value, checks })
}
