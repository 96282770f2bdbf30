//! Distance access and the average / diameter primitives every other module
//! is built on.
//!
//! A [`DistanceSource`] is either a feature matrix paired with a norm, or an
//! explicit condensed (upper-triangular) dissimilarity matrix. Feature-backed
//! sources are metrics by construction; matrix-backed ones need not be.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default slack for metricity checks.
pub const METRIC_TOL: f64 = 1e-9;

/// Error-compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Norm used to turn feature vectors into distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInf];

    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::LInf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" | "l_inf" | "inf" => Ok(Norm::LInf),
            other => Err(Error::InvalidArgument(format!("unknown norm {other:?}"))),
        }
    }
}

/// Position of the pair `(i, j)`, `i < j`, in row-major upper-triangular
/// packing: `i*n - i*(i+1)/2 + (j - i - 1)`.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

#[derive(Clone, Debug)]
enum Backing {
    Features { data: Vec<f64>, dim: usize, norm: Norm },
    Condensed(Vec<f64>),
}

/// Pairwise dissimilarities over `n` points. Immutable once built.
#[derive(Clone, Debug)]
pub struct DistanceSource {
    n: usize,
    backing: Backing,
    name: String,
}

impl DistanceSource {
    /// Feature-backed source from one row per point.
    pub fn from_features(rows: &[Vec<f64>], norm: Norm) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidSource(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat_features(data, dim, norm)
    }

    /// Feature-backed source from a row-major `n × dim` buffer.
    pub fn from_flat_features(data: Vec<f64>, dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSource("zero-dimensional features".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidSource(format!(
                "{} values do not split into rows of {dim}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSource(format!(
                "non-finite feature at flat position {bad}"
            )));
        }
        Ok(Self {
            n: data.len() / dim,
            backing: Backing::Features { data, dim, norm },
            name: String::new(),
        })
    }

    /// Matrix-backed source from `n(n-1)/2` condensed values.
    pub fn from_condensed(n: usize, values: Vec<f64>) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if values.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidSource(format!(
                "condensed entry {bad} = {} is not a finite nonnegative value",
                values[bad]
            )));
        }
        Ok(Self {
            n,
            backing: Backing::Condensed(values),
            name: String::new(),
        })
    }

    /// Matrix-backed source filled from `f(i, j)` for every `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                values.push(f(i, j));
            }
        }
        Self::from_condensed(n, values)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_feature_backed(&self) -> bool {
        matches!(self.backing, Backing::Features { .. })
    }

    pub fn norm(&self) -> Option<Norm> {
        match &self.backing {
            Backing::Features { norm, .. } => Some(*norm),
            Backing::Condensed(_) => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.backing {
            Backing::Features { dim, .. } => Some(*dim),
            Backing::Condensed(_) => None,
        }
    }

    /// Feature row of point `i`, if feature-backed.
    pub fn row(&self, i: usize) -> Option<&[f64]> {
        match &self.backing {
            Backing::Features { data, dim, .. } => Some(&data[i * dim..(i + 1) * dim]),
            Backing::Condensed(_) => None,
        }
    }

    /// Distance between points `i` and `j`.
    ///
    /// Panics if either index is out of range; see [`try_dist`](Self::try_dist).
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        assert!(
            i < self.n && j < self.n,
            "point index out of range: ({i}, {j}) with n = {}",
            self.n
        );
        if i == j {
            return 0.0;
        }
        match &self.backing {
            Backing::Features { data, dim, norm } => {
                norm.distance(&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim])
            }
            Backing::Condensed(values) => {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                values[condensed_index(self.n, a, b)]
            }
        }
    }

    pub fn try_dist(&self, i: usize, j: usize) -> Result<f64> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        Ok(self.dist(i, j))
    }

    /// Condensed vector of all pairwise distances, in [`condensed_index`] order.
    pub fn condensed(&self) -> Vec<f64> {
        match &self.backing {
            Backing::Condensed(values) => values.clone(),
            Backing::Features { .. } => {
                let n = self.n;
                let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(self.dist(i, j));
                    }
                }
                out
            }
        }
    }

    /// Matrix-backed copy holding exactly the same distance values.
    pub fn materialize(&self) -> DistanceSource {
        match &self.backing {
            Backing::Condensed(_) => self.clone(),
            Backing::Features { .. } => DistanceSource {
                n: self.n,
                backing: Backing::Condensed(self.condensed()),
                name: self.name.clone(),
            },
        }
    }
}

/// Sorted set of distinct point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds a set; rejects empty input and duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate index {} in set",
                w[0]
            )));
        }
        Ok(Self(indices))
    }

    pub fn singleton(i: usize) -> Self {
        Self(vec![i])
    }

    /// `start..end`, which must be nonempty.
    pub fn range(start: usize, end: usize) -> Self {
        assert!(start < end, "empty range {start}..{end}");
        Self((start..end).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    /// Set minus one element; `None` if that would leave it empty.
    pub fn without(&self, i: usize) -> Option<IndexSet> {
        let v: Vec<usize> = self.0.iter().copied().filter(|&x| x != i).collect();
        (!v.is_empty()).then_some(IndexSet(v))
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= n => Err(Error::IndexOutOfRange { index: last, n }),
            _ => Ok(()),
        }
    }

    fn first_common(&self, other: &IndexSet) -> Option<usize> {
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return Some(self.0[a]),
            }
        }
        None
    }
}

impl IntoIterator for IndexSet {
    type Item = usize;
    type IntoIter = std::vec::IntoIter<usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn sum_within(src: &DistanceSource, s: &[usize]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (a, &i) in s.iter().enumerate() {
        for &j in &s[a + 1..] {
            acc.add(src.dist(i, j));
        }
    }
    acc.value()
}

pub(crate) fn sum_between(src: &DistanceSource, s: &[usize], t: &[usize]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &i in s {
        for &j in t {
            acc.add(src.dist(i, j));
        }
    }
    acc.value()
}

pub(crate) fn diam_of(src: &DistanceSource, s: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in s.iter().enumerate() {
        for &j in &s[a + 1..] {
            best = best.max(src.dist(i, j));
        }
    }
    best
}

#[inline]
pub(crate) fn pairs(m: usize) -> f64 {
    (m * m.saturating_sub(1) / 2) as f64
}

/// Mean distance over unordered pairs of `s`; `0` for singletons.
pub fn avg_within(src: &DistanceSource, s: &IndexSet) -> Result<f64> {
    s.check_bounds(src.n())?;
    if s.len() < 2 {
        return Ok(0.0);
    }
    Ok(sum_within(src, s.as_slice()) / pairs(s.len()))
}

/// Mean distance over the `|s|·|t|` cross pairs of two disjoint sets.
pub fn avg_between(src: &DistanceSource, s: &IndexSet, t: &IndexSet) -> Result<f64> {
    s.check_bounds(src.n())?;
    t.check_bounds(src.n())?;
    if let Some(i) = s.first_common(t) {
        return Err(Error::Overlap(i));
    }
    Ok(sum_between(src, s.as_slice(), t.as_slice()) / (s.len() * t.len()) as f64)
}

/// Largest pairwise distance in `s`; `0` for singletons.
pub fn diam(src: &DistanceSource, s: &IndexSet) -> Result<f64> {
    s.check_bounds(src.n())?;
    Ok(diam_of(src, s.as_slice()))
}

/// A triple breaking `dist(i,k) <= dist(i,j) + dist(j,k) + tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `dist(i,k) - dist(i,j) - dist(j,k)`, always `> tol`.
    pub slack: f64,
}

/// Every triple (with `i < k`, `j` distinct from both) whose triangle
/// inequality fails by more than `tol`. Empty iff the source is a metric.
pub fn check_metricity(src: &DistanceSource, tol: f64) -> Vec<MetricViolation> {
    let m = src.materialize();
    let n = m.n();
    let mut out = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            let direct = m.dist(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let slack = direct - m.dist(i, j) - m.dist(j, k);
                if slack > tol {
                    out.push(MetricViolation { i, j, k, slack });
                }
            }
        }
    }
    out
}

/// Whether the source is a metric within `tol`.
///
/// Exact duplicates (zero mutual distance, identical distance rows) are
/// collapsed first, so sources made of a few heavily repeated locations stay
/// cheap to verify.
pub fn is_metric(src: &DistanceSource, tol: f64) -> bool {
    if src.is_feature_backed() {
        return true;
    }
    let n = src.n();
    let row_hash = |i: usize| {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        // dist(i,i) = 0 is included so that duplicates hash alike
        for j in 0..n {
            src.dist(i, j).to_bits().hash(&mut h);
        }
        h.finish()
    };
    let same_location = |a: usize, b: usize| {
        src.dist(a, b) == 0.0 && (0..n).all(|j| j == a || j == b || src.dist(a, j) == src.dist(b, j))
    };
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut reps = Vec::new();
    for i in 0..n {
        let bucket = buckets.entry(row_hash(i)).or_default();
        if !bucket.iter().any(|&r| same_location(r, i)) {
            bucket.push(i);
            reps.push(i);
        }
    }
    for (a, &i) in reps.iter().enumerate() {
        for &k in &reps[a + 1..] {
            let direct = src.dist(i, k);
            for &j in &reps {
                if j != i && j != k && direct - src.dist(i, j) - src.dist(j, k) > tol {
                    return false;
                }
            }
        }
    }
    true
}

/// `H_p = 1 + 1/2 + ... + 1/p`.
pub fn harmonic(p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument("harmonic number needs p >= 1".into()));
    }
    Ok(harmonic_unchecked(p))
}

pub(crate) fn harmonic_unchecked(p: usize) -> f64 {
    // smallest terms first
    (1..=p).rev().map(|i| 1.0 / i as f64).collect::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> DistanceSource {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        DistanceSource::from_features(&rows, Norm::L2).unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dist_norms() {
        let rows = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        let l2 = DistanceSource::from_features(&rows, Norm::L2).unwrap();
        let l1 = DistanceSource::from_features(&rows, Norm::L1).unwrap();
        let linf = DistanceSource::from_features(&rows, Norm::LInf).unwrap();
        assert_eq!(l2.dist(0, 1), 5.0);
        assert_eq!(l1.dist(0, 1), 7.0);
        assert_eq!(linf.dist(1, 0), 4.0);
        assert_eq!(l2.dist(1, 1), 0.0);
        assert!(matches!(l2.try_dist(0, 2), Err(Error::IndexOutOfRange { index: 2, n: 2 })));
    }

    #[test]
    fn condensed_layout() {
        let n = 5;
        let mut expect = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(condensed_index(n, i, j), expect);
                expect += 1;
            }
        }
        let src = DistanceSource::from_fn(4, |i, j| (10 * i + j) as f64).unwrap();
        assert_eq!(src.dist(2, 1), 12.0);
        assert_eq!(src.dist(0, 3), 3.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DistanceSource::from_condensed(3, vec![1.0, 2.0]).is_err());
        assert!(DistanceSource::from_condensed(2, vec![-1.0]).is_err());
        assert!(DistanceSource::from_condensed(2, vec![f64::NAN]).is_err());
        assert!(DistanceSource::from_features(&[vec![1.0], vec![1.0, 2.0]], Norm::L1).is_err());
    }

    #[test]
    fn averages_on_a_line() {
        let src = line(&[0.0, 1.0, 2.0]);
        assert!((avg_within(&src, &set(&[0, 1, 2])).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(avg_within(&src, &set(&[1])).unwrap(), 0.0);
        assert_eq!(avg_between(&src, &set(&[0]), &set(&[1, 2])).unwrap(), 1.5);
        assert_eq!(avg_between(&src, &set(&[0]), &set(&[2])).unwrap(), src.dist(0, 2));
        assert!(matches!(
            avg_between(&src, &set(&[0, 1]), &set(&[1, 2])),
            Err(Error::Overlap(1))
        ));
        let pair = DistanceSource::from_condensed(2, vec![7.0]).unwrap();
        assert_eq!(avg_within(&pair, &set(&[0, 1])).unwrap(), 7.0);
    }

    #[test]
    fn diameters() {
        let src = line(&[0.0, 1.0, 5.0]);
        assert_eq!(diam(&src, &set(&[0, 1, 2])).unwrap(), 5.0);
        assert_eq!(diam(&src, &set(&[2])).unwrap(), 0.0);
        let same = line(&[3.0, 3.0, 3.0]);
        assert_eq!(diam(&same, &set(&[0, 1, 2])).unwrap(), 0.0);
        assert!(diam(&src, &set(&[3])).is_err());
    }

    #[test]
    fn index_set_rules() {
        assert!(IndexSet::new(vec![]).is_err());
        assert!(IndexSet::new(vec![1, 1]).is_err());
        assert_eq!(set(&[3, 1, 2]).as_slice(), &[1, 2, 3]);
        assert_eq!(set(&[1, 3]).union(&set(&[2])).to_string(), "{1,2,3}");
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert!((harmonic(3).unwrap() - 11.0 / 6.0).abs() < 1e-15);
        // 1 + 1/2 + ... + 1/6 = 49/20
        assert!((harmonic(6).unwrap() - 2.45).abs() < 1e-15);
        assert!(harmonic(0).is_err());
    }

    #[test]
    fn metricity() {
        assert!(check_metricity(&line(&[0.0, 2.0, 7.0, 1.5]), METRIC_TOL).is_empty());
        let ones = DistanceSource::from_fn(6, |_, _| 1.0).unwrap();
        assert!(check_metricity(&ones, METRIC_TOL).is_empty());
        assert!(is_metric(&ones, METRIC_TOL));
        // 0-2 is longer than the detour through 1
        let bad = DistanceSource::from_condensed(3, vec![1.0, 5.0, 1.0]).unwrap();
        let v = check_metricity(&bad, METRIC_TOL);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].i, v[0].j, v[0].k), (0, 1, 2));
        assert_eq!(v[0].slack, 3.0);
        assert!(!is_metric(&bad, METRIC_TOL));
    }

    #[test]
    fn duplicate_collapse_keeps_violations() {
        // two copies of point 0, then the same violating geometry
        let pts = [0usize, 0, 1, 2];
        let base = [[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]];
        let src = DistanceSource::from_fn(4, |i, j| base[pts[i]][pts[j]]).unwrap();
        assert!(!is_metric(&src, METRIC_TOL));
        assert!(!check_metricity(&src, METRIC_TOL).is_empty());
    }

    #[test]
    fn interleaved_duplicates_are_metric() {
        let loc = |i: usize| i % 3;
        let base = [[0.0, 1.0, 1.5], [1.0, 0.0, 2.0], [1.5, 2.0, 0.0]];
        let src = DistanceSource::from_fn(30, |i, j| base[loc(i)][loc(j)]).unwrap();
        assert!(is_metric(&src, METRIC_TOL));
        assert!(check_metricity(&src, METRIC_TOL).is_empty());
    }
}
