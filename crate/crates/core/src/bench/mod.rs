//! Benchmark harness: k-set selection, the method-by-norm run matrix and
//! the "ratio against the best method" aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::criteria::{format_value, Criterion, CriteriaReport};
use crate::error::{Error, Result};
use crate::io::{read_feature_csv, FeatureTable};
use crate::linkage::{build, Engine, LinkageRule, TieBreak};
use crate::metric::{DistanceSource, Norm};

/// The criteria reported in the ratio tables, in row order.
pub const TABLE_CRITERIA: [Criterion; 6] = [
    Criterion::SepMin,
    Criterion::SepAv,
    Criterion::MaxDiam,
    Criterion::MaxAvg,
    Criterion::CsRatioDm,
    Criterion::CsRatioAv,
];

/// Method column order of the ratio tables.
pub const METHODS: [LinkageRule; 3] = LinkageRule::ALL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KSetName {
    Small,
    Medium,
    Large,
}

impl KSetName {
    pub const ALL: [KSetName; 3] = [KSetName::Small, KSetName::Medium, KSetName::Large];
}

impl fmt::Display for KSetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KSetName::Small => "small",
            KSetName::Medium => "medium",
            KSetName::Large => "large",
        })
    }
}

impl FromStr for KSetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(KSetName::Small),
            "medium" => Ok(KSetName::Medium),
            "large" => Ok(KSetName::Large),
            other => Err(Error::InvalidArgument(format!("unknown k-set {other:?}"))),
        }
    }
}

/// A named group of cluster counts for one dataset size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSet {
    pub name: KSetName,
    /// Distinct values in `2..=n`, ascending.
    pub ks: Vec<usize>,
    /// Values dropped as duplicates or as out of range.
    pub dropped: usize,
    /// Set when `n` is too small for the set's definition.
    pub issue: Option<String>,
}

impl KSet {
    fn from_candidates(name: KSetName, n: usize, candidates: Vec<usize>, issue: Option<String>) -> Self {
        let total = candidates.len();
        let ks: BTreeSet<usize> = candidates.into_iter().filter(|&k| (2..=n).contains(&k)).collect();
        KSet { name, dropped: total - ks.len(), ks: ks.into_iter().collect(), issue }
    }

    pub fn is_valid(&self) -> bool {
        self.issue.is_none()
    }
}

/// `round(x)` with halves rounded up, for `x >= 0`.
fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// SMALL = `2..=10`; MEDIUM = nine consecutive values centred on
/// `round(sqrt(n))`; LARGE = `floor(n / i)` for `i = 2..=10`.
pub fn k_sets(n: usize) -> [KSet; 3] {
    let small_issue = (n < 10).then(|| format!("n = {n} is below 10"));
    let small = KSet::from_candidates(KSetName::Small, n, (2..=10).collect(), small_issue);

    let centre = round_half_up((n as f64).sqrt());
    let medium_issue = (centre < 6).then(|| format!("n = {n} puts round(sqrt(n)) - 4 below 2"));
    let medium = KSet::from_candidates(
        KSetName::Medium,
        n,
        (centre.saturating_sub(4)..=centre + 4).collect(),
        medium_issue,
    );

    let large_issue = (n < 20).then(|| format!("n = {n} puts n/10 below 2"));
    let large = KSet::from_candidates(KSetName::Large, n, (2..=10).map(|i| n / i).collect(), large_issue);
    [small, medium, large]
}

/// Random subsample of `m` rows, kept in their original order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub struct Subsample {
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Subsample {
    pub fn apply(&self, rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        if self.m >= rows.len() {
            return rows;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut keep = sample(&mut rng, rows.len(), self.m).into_vec();
        keep.sort_unstable();
        let mut rows: Vec<Option<Vec<f64>>> = rows.into_iter().map(Some).collect();
        keep.into_iter().map(|i| rows[i].take().expect("distinct indices")).collect()
    }
}

/// A feature dataset loaded for benchmarking.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub path: PathBuf,
    pub table: FeatureTable,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn source(&self, norm: Norm) -> Result<DistanceSource> {
        Ok(DistanceSource::from_features(&self.table.rows, norm)?.with_name(&self.name))
    }
}

/// Reads a feature CSV, optionally subsampled. The dataset is named after
/// the file stem.
pub fn load_dataset(path: &Path, subsample: Option<Subsample>) -> Result<Dataset> {
    let mut table = read_feature_csv(path)?;
    if table.rows.is_empty() {
        return Err(Error::parse(Some(path), "no data rows"));
    }
    if let Some(s) = subsample {
        table.rows = s.apply(table.rows);
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Dataset { name, path: path.to_path_buf(), table })
}

/// Feature-backed source for a CSV file under one norm.
pub fn load_source(path: &Path, norm: Norm) -> Result<DistanceSource> {
    load_dataset(path, None)?.source(norm)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    datasets: Vec<PathBuf>,
    #[serde(default = "default_norms")]
    norms: Vec<Norm>,
    #[serde(default = "default_ksets")]
    ksets: Vec<String>,
    #[serde(default)]
    criteria: Vec<String>,
    #[serde(default)]
    engine: Option<String>,
    #[serde(default)]
    tie_break: TieBreak,
    #[serde(default)]
    subsample: Option<Subsample>,
}

fn default_norms() -> Vec<Norm> {
    vec![Norm::L2]
}

fn default_ksets() -> Vec<String> {
    KSetName::ALL.iter().map(ToString::to_string).collect()
}

/// A benchmark run description.
///
/// ```toml
/// datasets = ["iris.csv", "wine.csv"]   # relative to the config file
/// norms = ["l1", "l2", "linf"]
/// ksets = ["small", "medium", "large"]
/// criteria = ["sep_min", "sep_av", "max_diam", "max_avg", "cs_ratio_dm", "cs_ratio_av"]
/// engine = "nnchain"                     # or "naive"
/// tie_break = "lex_min_id"               # naive engine only
/// subsample = { m = 300, seed = 7 }
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub datasets: Vec<PathBuf>,
    pub norms: Vec<Norm>,
    pub ksets: Vec<KSetName>,
    pub criteria: Vec<Criterion>,
    pub engine: Engine,
    pub subsample: Option<Subsample>,
}

impl BenchConfig {
    pub fn new(datasets: Vec<PathBuf>) -> Self {
        BenchConfig {
            datasets,
            norms: default_norms(),
            ksets: KSetName::ALL.to_vec(),
            criteria: TABLE_CRITERIA.to_vec(),
            engine: Engine::NnChain,
            subsample: None,
        }
    }

    /// Parses TOML text; relative dataset paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let path = base.map(|b| b.join("<config>"));
        let err = |msg: String| Error::parse(path.as_deref(), msg);
        let raw: RawConfig = toml::from_str(text).map_err(|e| err(e.to_string()))?;
        if raw.datasets.is_empty() {
            return Err(err("no datasets listed".into()));
        }
        let datasets = raw
            .datasets
            .into_iter()
            .map(|p| match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            })
            .collect();
        let ksets = raw.ksets.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?;
        let criteria = if raw.criteria.is_empty() {
            TABLE_CRITERIA.to_vec()
        } else {
            raw.criteria.iter().map(|s| s.parse()).collect::<Result<Vec<Criterion>>>()?
        };
        if criteria.contains(&Criterion::Ckmm) {
            return Err(err("ckmm is a hierarchy cost, not a per-k criterion".into()));
        }
        let engine = match raw.engine.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None | Some("nnchain") | Some("nn_chain") | Some("nn-chain") => Engine::NnChain,
            Some("naive") => Engine::Naive(raw.tie_break),
            Some(other) => return Err(err(format!("unknown engine {other:?}"))),
        };
        if raw.norms.is_empty() || ksets.is_empty() {
            return Err(err("norms and ksets must be non-empty".into()));
        }
        Ok(BenchConfig { datasets, norms: raw.norms, ksets, criteria, engine, subsample: raw.subsample })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent()).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(Some(path), msg),
            other => other,
        })
    }
}

/// One (dataset, norm, method, k) evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub norm: Norm,
    pub method: LinkageRule,
    pub k: usize,
    pub report: CriteriaReport,
}

/// Size and k-sets of one dataset as it entered the matrix.
#[derive(Clone, Debug)]
pub struct DatasetInfo {
    pub name: String,
    pub n: usize,
    pub dim: usize,
    pub ksets: Vec<KSet>,
}

impl DatasetInfo {
    /// The valid k-set called `name`, if the run requested it.
    pub fn kset(&self, name: KSetName) -> Option<&KSet> {
        self.ksets.iter().find(|s| s.name == name && s.is_valid())
    }
}

/// A dataset-level failure that was isolated from the rest of the matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub dataset: String,
    pub stage: String,
    pub message: String,
}

/// Everything a matrix run produced.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub datasets: Vec<DatasetInfo>,
    pub records: Vec<RunRecord>,
    pub failures: Vec<Failure>,
}

/// Runs every (dataset, norm, method) hierarchy once and evaluates its cuts
/// at the union of the dataset's valid k-sets. Records come out ordered by
/// dataset, norm, method and k regardless of scheduling.
pub fn run_matrix(config: &BenchConfig) -> BenchRun {
    let loaded: Vec<Result<Dataset>> =
        config.datasets.par_iter().map(|p| load_dataset(p, config.subsample)).collect();
    let mut datasets = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in config.datasets.iter().zip(loaded) {
        match result {
            Ok(d) => datasets.push(d),
            Err(e) => failures.push(Failure {
                dataset: path.display().to_string(),
                stage: "load".into(),
                message: e.to_string(),
            }),
        }
    }

    let infos: Vec<DatasetInfo> = datasets
        .iter()
        .map(|d| DatasetInfo {
            name: d.name.clone(),
            n: d.n(),
            dim: d.dim(),
            ksets: k_sets(d.n()).into_iter().filter(|s| config.ksets.contains(&s.name)).collect(),
        })
        .collect();

    let jobs: Vec<(usize, Norm, LinkageRule)> = (0..datasets.len())
        .flat_map(|d| config.norms.iter().flat_map(move |&norm| METHODS.iter().map(move |&m| (d, norm, m))))
        .collect();
    let results: Vec<Result<Vec<RunRecord>>> = jobs
        .par_iter()
        .map(|&(d, norm, method)| {
            let info = &infos[d];
            let ks: BTreeSet<usize> =
                info.ksets.iter().filter(|s| s.is_valid()).flat_map(|s| s.ks.iter().copied()).collect();
            let src = datasets[d].source(norm)?;
            let tree = build(&src, method, config.engine)?;
            ks.into_iter()
                .map(|k| {
                    let report = CriteriaReport::for_clustering(&tree.cut(k)?, &src, method.to_string(), &config.criteria)?;
                    Ok(RunRecord { dataset: info.name.clone(), norm, method, k, report })
                })
                .collect()
        })
        .collect();

    let mut records = Vec::new();
    for (&(d, norm, method), result) in jobs.iter().zip(results) {
        match result {
            Ok(rs) => records.extend(rs),
            Err(e) => failures.push(Failure {
                dataset: infos[d].name.clone(),
                stage: format!("{norm}/{method}"),
                message: e.to_string(),
            }),
        }
    }
    BenchRun { datasets: infos, records, failures }
}

/// Average ratios of one (norm, criterion, k-set) row group.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioCell {
    pub norm: Norm,
    pub criterion: Criterion,
    pub kset: KSetName,
    /// Averages in [`METHODS`] order; `NaN` when nothing was included.
    pub averages: [f64; 3],
    /// Number of (dataset, k) pairs averaged.
    pub included: usize,
    /// Pairs left out for a missing method, a non-finite value or `0/0`.
    pub excluded: usize,
}

impl RatioCell {
    /// The method with the strictly highest average, if any.
    pub fn leader(&self) -> Option<LinkageRule> {
        let best = self.averages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let at_best: Vec<usize> = (0..3).filter(|&i| self.averages[i] == best).collect();
        (at_best.len() == 1 && best.is_finite()).then(|| METHODS[at_best[0]])
    }

    pub fn average(&self, method: LinkageRule) -> f64 {
        self.averages[METHODS.iter().position(|&m| m == method).expect("all methods listed")]
    }
}

/// Per-method ratios `min(v, best) / max(v, best)` for one comparison, or
/// `None` when the comparison is excluded.
pub fn method_ratios(values: [f64; 3], criterion: Criterion) -> Option<[f64; 3]> {
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let best = if criterion.higher_is_better() {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let mut out = [0.0; 3];
    for (o, &v) in out.iter_mut().zip(&values) {
        let (lo, hi) = (v.min(best), v.max(best));
        if hi == 0.0 {
            return None;
        }
        *o = lo / hi;
    }
    Some(out)
}

/// The aggregated "ratio against the best method" table.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioTable {
    pub cells: Vec<RatioCell>,
}

/// Aggregates records into ratio cells. A record's k counts towards every
/// requested k-set of its dataset that contains it. The result does not
/// depend on record order.
pub fn ratio_table(records: &[RunRecord], datasets: &[DatasetInfo], criteria: &[Criterion]) -> RatioTable {
    type Key = (String, Norm, usize, Criterion);
    let mut values: BTreeMap<Key, [Option<f64>; 3]> = BTreeMap::new();
    for r in records {
        let slot = METHODS.iter().position(|&m| m == r.method).expect("all methods listed");
        for &c in criteria {
            if let Some(v) = r.report.get(c) {
                values.entry((r.dataset.clone(), r.norm, r.k, c)).or_default()[slot] = Some(v);
            }
        }
    }
    let norms: BTreeSet<Norm> = records.iter().map(|r| r.norm).collect();
    let mut cells = Vec::new();
    for &norm in &norms {
        for &criterion in criteria {
            for kset in KSetName::ALL {
                let mut sums = [0.0; 3];
                let (mut included, mut excluded) = (0, 0);
                let mut any = false;
                for info in datasets {
                    let Some(set) = info.kset(kset) else { continue };
                    any = true;
                    for &k in &set.ks {
                        let got = values.get(&(info.name.clone(), norm, k, criterion));
                        let triple = got.and_then(|t| Some([t[0]?, t[1]?, t[2]?]));
                        match triple.and_then(|v| method_ratios(v, criterion)) {
                            Some(ratios) => {
                                included += 1;
                                for (s, r) in sums.iter_mut().zip(ratios) {
                                    *s += r;
                                }
                            }
                            None => excluded += 1,
                        }
                    }
                }
                if any {
                    let averages = sums.map(|s| if included > 0 { s / included as f64 } else { f64::NAN });
                    cells.push(RatioCell { norm, criterion, kset, averages, included, excluded });
                }
            }
        }
    }
    RatioTable { cells }
}

impl RatioTable {
    pub fn cell(&self, norm: Norm, criterion: Criterion, kset: KSetName) -> Option<&RatioCell> {
        self.cells.iter().find(|c| c.norm == norm && c.criterion == criterion && c.kset == kset)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("norm,criterion,kset,average,complete,single,included,excluded\n");
        for c in &self.cells {
            let [a, co, s] = c.averages.map(format_value);
            writeln!(out, "{},{},{},{a},{co},{s},{},{}", c.norm, c.criterion.name(), c.kset, c.included, c.excluded)
                .unwrap();
        }
        out
    }

    /// One table per norm: criteria rows, method columns grouped by k-set,
    /// the leader of each group in bold.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let norms: BTreeSet<Norm> = self.cells.iter().map(|c| c.norm).collect();
        for norm in norms {
            let cells: Vec<&RatioCell> = self.cells.iter().filter(|c| c.norm == norm).collect();
            let ksets: Vec<KSetName> =
                KSetName::ALL.into_iter().filter(|k| cells.iter().any(|c| c.kset == *k)).collect();
            let criteria: Vec<Criterion> = cells.iter().fold(Vec::new(), |mut acc, c| {
                if !acc.contains(&c.criterion) {
                    acc.push(c.criterion);
                }
                acc
            });
            writeln!(out, "### {norm}\n").unwrap();
            let mut head = String::from("| criterion |");
            let mut rule = String::from("|---|");
            for k in &ksets {
                for m in METHODS {
                    write!(head, " {k} {} |", m.initial()).unwrap();
                    rule.push_str("---:|");
                }
            }
            writeln!(out, "{head}\n{rule}").unwrap();
            let mut excluded = Vec::new();
            for &criterion in &criteria {
                write!(out, "| {} |", criterion.name()).unwrap();
                for &k in &ksets {
                    let Some(cell) = cells.iter().find(|c| c.criterion == criterion && c.kset == k) else {
                        out.push_str(" - | - | - |");
                        continue;
                    };
                    let leader = cell.leader();
                    for (i, m) in METHODS.iter().enumerate() {
                        let v = cell.averages[i];
                        let text = if v.is_nan() { "-".to_string() } else { format!("{v:.2}") };
                        if leader == Some(*m) {
                            write!(out, " **{text}** |").unwrap();
                        } else {
                            write!(out, " {text} |").unwrap();
                        }
                    }
                    if cell.excluded > 0 {
                        excluded.push(format!("{} {}: {} of {}", criterion.name(), k, cell.excluded, cell.excluded + cell.included));
                    }
                }
                out.push('\n');
            }
            if !excluded.is_empty() {
                writeln!(out, "\nExcluded (dataset, k) pairs: {}", excluded.join("; ")).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Raw records as `dataset,norm,method,k,criterion,value`.
pub fn records_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "norm", "method", "k", "criterion", "value"])?;
    for r in records {
        for row in r.report.csv_rows() {
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Dataset sizes, k-set notes and failures as Markdown.
pub fn summary_markdown(run: &BenchRun) -> String {
    let mut out = String::from("| dataset | n | d | k-sets |\n|---|---:|---:|---|\n");
    for d in &run.datasets {
        let sets: Vec<String> = d
            .ksets
            .iter()
            .map(|s| match &s.issue {
                Some(issue) => format!("{} skipped ({issue})", s.name),
                None if s.dropped > 0 => format!("{} {:?} ({} dropped)", s.name, s.ks, s.dropped),
                None => format!("{} {:?}", s.name, s.ks),
            })
            .collect();
        writeln!(out, "| {} | {} | {} | {} |", d.name, d.n, d.dim, sets.join("; ")).unwrap();
    }
    if !run.failures.is_empty() {
        out.push_str("\nFailures:\n\n");
        for f in &run.failures {
            writeln!(out, "- {} ({}): {}", f.dataset, f.stage, f.message).unwrap();
        }
    }
    out
}

/// Paths written by [`write_outputs`].
#[derive(Clone, Debug)]
pub struct BenchOutputs {
    pub records: PathBuf,
    pub table_csv: PathBuf,
    pub table_md: PathBuf,
}

/// Writes `records.csv`, `ratio_table.csv` and `ratio_table.md` into `dir`.
pub fn write_outputs(run: &BenchRun, table: &RatioTable, dir: &Path) -> Result<BenchOutputs> {
    fs::create_dir_all(dir)?;
    let out = BenchOutputs {
        records: dir.join("records.csv"),
        table_csv: dir.join("ratio_table.csv"),
        table_md: dir.join("ratio_table.md"),
    };
    fs::write(&out.records, records_csv(&run.records)?)?;
    fs::write(&out.table_csv, table.to_csv())?;
    fs::write(&out.table_md, format!("{}\n{}", table.to_markdown(), summary_markdown(run)))?;
    Ok(out)
}

/// Loads the config, runs the matrix and writes all outputs.
pub fn run_config(config_path: &Path, out_dir: &Path) -> Result<(BenchRun, RatioTable, BenchOutputs)> {
    let config = BenchConfig::load(config_path)?;
    let run = run_matrix(&config);
    let table = ratio_table(&run.records, &run.datasets, &config.criteria);
    let outputs = write_outputs(&run, &table, out_dir)?;
    Ok((run, table, outputs))
}
