//! Separability and cohesion criteria of a clustering, plus the CKMM cost
//! of a full hierarchy.
//!
//! All clustering criteria go through one pass over the point pairs that
//! accumulates per-block sums and diameters, so every caller (including the
//! oracle) sees bit-identical values for the same partition.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linkage::{Clustering, Dendrogram};
use crate::metric::{pairs, sum_between, CompensatedSum, DistanceSource};

/// A named clustering criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    SepAv,
    SepMin,
    MaxDiam,
    MaxAvg,
    AvgDiam,
    CsRatioAv,
    CsRatioDm,
    /// Hierarchy cost; needs a dendrogram rather than a single cut.
    Ckmm,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::SepAv,
        Criterion::SepMin,
        Criterion::MaxDiam,
        Criterion::MaxAvg,
        Criterion::AvgDiam,
        Criterion::CsRatioAv,
        Criterion::CsRatioDm,
        Criterion::Ckmm,
    ];

    /// The criteria defined on a single clustering.
    pub const CLUSTERING: [Criterion; 7] = [
        Criterion::SepAv,
        Criterion::SepMin,
        Criterion::MaxDiam,
        Criterion::MaxAvg,
        Criterion::AvgDiam,
        Criterion::CsRatioAv,
        Criterion::CsRatioDm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::SepAv => "sep_av",
            Criterion::SepMin => "sep_min",
            Criterion::MaxDiam => "max_diam",
            Criterion::MaxAvg => "max_avg",
            Criterion::AvgDiam => "avg_diam",
            Criterion::CsRatioAv => "cs_ratio_av",
            Criterion::CsRatioDm => "cs_ratio_dm",
            Criterion::Ckmm => "ckmm",
        }
    }

    /// Separability criteria are maximized, everything else minimized.
    pub fn higher_is_better(self) -> bool {
        matches!(self, Criterion::SepAv | Criterion::SepMin)
    }

    /// Whether the criterion is undefined for a single block.
    pub fn needs_two_blocks(self) -> bool {
        matches!(
            self,
            Criterion::SepAv | Criterion::SepMin | Criterion::CsRatioAv | Criterion::CsRatioDm
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown criterion {s:?}")))
    }
}

/// Per-block sums and diameters of one partition.
#[derive(Clone, Debug)]
pub(crate) struct BlockStats {
    k: usize,
    sizes: Vec<usize>,
    within: Vec<f64>,
    diam: Vec<f64>,
    /// Cross sums, `k × k`, only `a < b` filled.
    cross: Vec<f64>,
}

impl BlockStats {
    /// One pass over all pairs `i < j`. `labels` must be canonical in `0..k`.
    pub(crate) fn compute(src: &DistanceSource, labels: &[usize], k: usize) -> Self {
        let n = labels.len();
        let mut acc = vec![CompensatedSum::new(); k * k];
        let mut diam = vec![0.0f64; k];
        let mut sizes = vec![0usize; k];
        for i in 0..n {
            let a = labels[i];
            sizes[a] += 1;
            for j in i + 1..n {
                let b = labels[j];
                let d = src.dist(i, j);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                acc[lo * k + hi].add(d);
                if a == b && d > diam[a] {
                    diam[a] = d;
                }
            }
        }
        let within = (0..k).map(|a| acc[a * k + a].value()).collect();
        let cross = acc.iter().map(CompensatedSum::value).collect();
        BlockStats { k, sizes, within, diam, cross }
    }

    pub(crate) fn avg_within(&self, a: usize) -> f64 {
        if self.sizes[a] < 2 {
            0.0
        } else {
            self.within[a] / pairs(self.sizes[a])
        }
    }

    pub(crate) fn avg_between(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.cross[lo * self.k + hi] / (self.sizes[a] * self.sizes[b]) as f64
    }

    fn cross_avgs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).flat_map(move |a| (a + 1..self.k).map(move |b| self.avg_between(a, b)))
    }

    pub(crate) fn sep_av(&self) -> f64 {
        let total: CompensatedSum = self.cross_avgs().collect();
        total.value() / pairs(self.k)
    }

    pub(crate) fn sep_min(&self) -> f64 {
        self.cross_avgs().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn max_diam(&self) -> f64 {
        self.diam.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn max_avg(&self) -> f64 {
        (0..self.k).map(|a| self.avg_within(a)).fold(0.0, f64::max)
    }

    pub(crate) fn avg_diam(&self) -> f64 {
        let total: CompensatedSum = self.diam.iter().copied().collect();
        total.value() / self.k as f64
    }

    pub(crate) fn value(&self, c: Criterion) -> f64 {
        match c {
            Criterion::SepAv => self.sep_av(),
            Criterion::SepMin => self.sep_min(),
            Criterion::MaxDiam => self.max_diam(),
            Criterion::MaxAvg => self.max_avg(),
            Criterion::AvgDiam => self.avg_diam(),
            Criterion::CsRatioAv => cs_ratio(self.max_avg(), self.sep_min()),
            Criterion::CsRatioDm => cs_ratio(self.max_diam(), self.sep_min()),
            Criterion::Ckmm => unreachable!("ckmm is a hierarchy cost"),
        }
    }
}

/// `num / den` with `0/0 = 0` and `x/0 = +inf`.
pub fn cs_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn stats(c: &Clustering, src: &DistanceSource) -> Result<BlockStats> {
    if c.n() != src.n() {
        return Err(Error::SizeMismatch { expected: src.n(), got: c.n() });
    }
    Ok(BlockStats::compute(src, c.labels(), c.k()))
}

fn two_block_stats(c: &Clustering, src: &DistanceSource) -> Result<BlockStats> {
    if c.k() < 2 {
        return Err(Error::TooFewBlocks(c.k()));
    }
    stats(c, src)
}

/// Mean of the cross-block averages over all block pairs.
pub fn sep_av(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(two_block_stats(c, src)?.sep_av())
}

/// Smallest cross-block average.
pub fn sep_min(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(two_block_stats(c, src)?.sep_min())
}

/// Largest block diameter.
pub fn max_diam(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(stats(c, src)?.max_diam())
}

/// Largest within-block average.
pub fn max_avg(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(stats(c, src)?.max_avg())
}

/// Mean block diameter.
pub fn avg_diam(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(stats(c, src)?.avg_diam())
}

/// `max_avg / sep_min`, see [`cs_ratio`] for a zero denominator.
pub fn cs_ratio_av(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(two_block_stats(c, src)?.value(Criterion::CsRatioAv))
}

/// `max_diam / sep_min`, see [`cs_ratio`] for a zero denominator.
pub fn cs_ratio_dm(c: &Clustering, src: &DistanceSource) -> Result<f64> {
    Ok(two_block_stats(c, src)?.value(Criterion::CsRatioDm))
}

/// Evaluates one clustering criterion.
pub fn evaluate(c: &Clustering, src: &DistanceSource, criterion: Criterion) -> Result<f64> {
    if criterion == Criterion::Ckmm {
        return Err(Error::InvalidArgument("ckmm needs a dendrogram".into()));
    }
    if criterion.needs_two_blocks() && c.k() < 2 {
        return Err(Error::TooFewBlocks(c.k()));
    }
    Ok(stats(c, src)?.value(criterion))
}

/// Sum over point pairs of their distance times the size of the subtree
/// rooted at their lowest common ancestor, accumulated merge by merge.
pub fn ckmm_cost(d: &Dendrogram, src: &DistanceSource) -> Result<f64> {
    let n = d.n();
    if n != src.n() {
        return Err(Error::SizeMismatch { expected: src.n(), got: n });
    }
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut total = CompensatedSum::new();
    for m in d.merges() {
        let left = std::mem::take(&mut members[m.left]);
        let right = std::mem::take(&mut members[m.right]);
        total.add(sum_between(src, &left, &right) * m.size as f64);
        let mut joined = left;
        joined.extend(right);
        members.push(joined);
    }
    Ok(total.value())
}

/// Criterion values for one clustering of one source.
#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    /// Source name, usually the dataset.
    pub source: String,
    /// Norm name, or `matrix` for matrix-backed sources.
    pub norm: String,
    /// Linkage rule name, or `external` for clusterings from elsewhere.
    pub method: String,
    pub k: usize,
    values: Vec<(Criterion, f64)>,
}

impl CriteriaReport {
    /// Evaluates the requested clustering criteria in one pass.
    pub fn for_clustering(
        c: &Clustering,
        src: &DistanceSource,
        method: impl Into<String>,
        criteria: &[Criterion],
    ) -> Result<Self> {
        let st = stats(c, src)?;
        let mut values = Vec::with_capacity(criteria.len());
        for &cr in criteria {
            if cr == Criterion::Ckmm {
                return Err(Error::InvalidArgument("ckmm needs a dendrogram".into()));
            }
            if cr.needs_two_blocks() && c.k() < 2 {
                return Err(Error::TooFewBlocks(c.k()));
            }
            values.push((cr, st.value(cr)));
        }
        Ok(CriteriaReport {
            source: src.name().to_string(),
            norm: src.norm().map_or_else(|| "matrix".to_string(), |n| n.to_string()),
            method: method.into(),
            k: c.k(),
            values,
        })
    }

    /// Evaluates the requested criteria on the `k`-cut of a hierarchy;
    /// [`Criterion::Ckmm`] is taken over the whole hierarchy.
    pub fn for_cut(
        d: &Dendrogram,
        k: usize,
        src: &DistanceSource,
        method: impl Into<String>,
        criteria: &[Criterion],
    ) -> Result<Self> {
        let flat: Vec<Criterion> = criteria.iter().copied().filter(|&c| c != Criterion::Ckmm).collect();
        let mut report = Self::for_clustering(&d.cut(k)?, src, method, &flat)?;
        if criteria.contains(&Criterion::Ckmm) {
            let cost = ckmm_cost(d, src)?;
            report.values = criteria
                .iter()
                .map(|&c| (c, if c == Criterion::Ckmm { cost } else { report.get(c).unwrap() }))
                .collect();
        }
        Ok(report)
    }

    pub fn get(&self, c: Criterion) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == c).map(|&(_, v)| v)
    }

    pub fn values(&self) -> &[(Criterion, f64)] {
        &self.values
    }

    /// Rows of `dataset,norm,method,k,criterion,value`; infinity prints as `inf`.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.values
            .iter()
            .map(|(c, v)| {
                [
                    self.source.clone(),
                    self.norm.clone(),
                    self.method.clone(),
                    self.k.to_string(),
                    c.name().to_string(),
                    format_value(*v),
                ]
            })
            .collect()
    }
}

/// Shortest round-trip rendering, with `inf` for positive infinity.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}
