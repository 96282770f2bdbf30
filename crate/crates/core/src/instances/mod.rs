//! Generators for the adversarial instance families. Each generator returns
//! an [`InstanceBundle`]: the distance source, named point groups, and the
//! outcomes it is expected to produce, stated as data so they can be checked
//! by [`InstanceBundle::check`] or written next to the source.

mod generators;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use generators::*;

use crate::criteria::{self, Criterion};
use crate::error::{Error, Result};
use crate::linkage::{self, random_hierarchy, Clustering, Dendrogram, Engine, LinkageRule, TieBreak};
use crate::metric::{avg_between, avg_within, diam, is_metric, DistanceSource, IndexSet, METRIC_TOL};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Exact value derived from the construction.
    ClosedForm,
    /// Inequality guaranteed by the analysis of the construction.
    TheoreticalBound,
    /// Value observed from an engine run and frozen.
    EngineRun,
    /// Lower or upper bound fixed from a first run to catch regressions.
    Regression,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::TheoreticalBound => "bound",
            Provenance::EngineRun => "engine-run",
            Provenance::Regression => "regression",
        })
    }
}

/// A clustering to evaluate a criterion on.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// The `k`-cut of a linkage hierarchy built on the bundle's source.
    Cut { rule: LinkageRule, engine: Engine, k: usize },
    /// An explicit clustering, usually the rival the instance is built around.
    Partition { label: String, clustering: Clustering },
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Cut { rule, engine, k } => write!(f, "{rule}[{engine}] k={k}"),
            Target::Partition { label, .. } => write!(f, "{label}"),
        }
    }
}

/// A scalar computed from the bundle.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Criterion(Criterion, Target),
    AvgBetween(Vec<usize>, Vec<usize>),
    AvgWithin(Vec<usize>),
    Diam(Vec<usize>),
    Ratio(Box<Quantity>, Box<Quantity>),
    Scaled(Box<Quantity>, f64),
    /// 1 when the source is a metric within the default tolerance, else 0.
    IsMetric,
    /// Fraction of random hierarchies (seeds `0..seeds`) whose `k`-cut puts
    /// `point` in a block with at least one other point.
    NonSingletonFraction { point: usize, k: usize, seeds: u64 },
}

impl Quantity {
    pub fn ratio(num: Quantity, den: Quantity) -> Self {
        Quantity::Ratio(Box::new(num), Box::new(den))
    }

    pub fn scaled(q: Quantity, factor: f64) -> Self {
        Quantity::Scaled(Box::new(q), factor)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Criterion(c, t) => write!(f, "{c}({t})"),
            Quantity::AvgBetween(a, b) => write!(f, "avg_between(|{}|,|{}| pts)", a.len(), b.len()),
            Quantity::AvgWithin(a) => write!(f, "avg_within(|{}| pts)", a.len()),
            Quantity::Diam(a) => write!(f, "diam(|{}| pts)", a.len()),
            Quantity::Ratio(a, b) => write!(f, "{a} / {b}"),
            Quantity::Scaled(a, s) => write!(f, "{s} * {a}"),
            Quantity::IsMetric => f.write_str("is_metric"),
            Quantity::NonSingletonFraction { point, k, seeds } => {
                write!(f, "frac_random_non_singleton(point={point}, k={k}, seeds={seeds})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Le,
    Ge,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Eq => "==",
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        })
    }
}

/// `quantity cmp value`, with absolute tolerance `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarExpectation {
    pub name: String,
    pub quantity: Quantity,
    pub cmp: Cmp,
    pub value: f64,
    pub tol: f64,
    pub provenance: Provenance,
}

/// The cut a linkage run is expected to produce.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionExpectation {
    pub name: String,
    pub rule: LinkageRule,
    pub engine: Engine,
    pub k: usize,
    pub expected: Clustering,
    pub provenance: Provenance,
}

/// A generated instance with its expectations.
#[derive(Clone, Debug)]
pub struct InstanceBundle {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub source: DistanceSource,
    /// Named point groups in index order.
    pub groups: Vec<(String, Vec<usize>)>,
    /// How points are laid out in index order; ties under the lexicographic
    /// tie-break depend on it.
    pub point_order: String,
    pub declared_metric: bool,
    pub partitions: Vec<PartitionExpectation>,
    pub scalars: Vec<ScalarExpectation>,
    /// Remarks on expectations that differ from the informal description
    /// of the construction.
    pub notes: Vec<String>,
}

/// Result of checking one expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
    pub provenance: Provenance,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: expected {}, got {} [{}]",
            if self.passed { "ok  " } else { "FAIL" },
            self.name,
            self.expected,
            self.actual,
            self.provenance
        )
    }
}

/// Evaluates quantities on one source, caching hierarchies.
pub struct Evaluator<'a> {
    src: &'a DistanceSource,
    cache: HashMap<(LinkageRule, Engine), Dendrogram>,
}

impl<'a> Evaluator<'a> {
    pub fn new(src: &'a DistanceSource) -> Self {
        Evaluator { src, cache: HashMap::new() }
    }

    pub fn dendrogram(&mut self, rule: LinkageRule, engine: Engine) -> Result<&Dendrogram> {
        if !self.cache.contains_key(&(rule, engine)) {
            let d = linkage::build(self.src, rule, engine)?;
            self.cache.insert((rule, engine), d);
        }
        Ok(&self.cache[&(rule, engine)])
    }

    pub fn cut(&mut self, rule: LinkageRule, engine: Engine, k: usize) -> Result<Clustering> {
        self.dendrogram(rule, engine)?.cut(k)
    }

    fn target(&mut self, t: &Target) -> Result<Clustering> {
        match t {
            Target::Cut { rule, engine, k } => self.cut(*rule, *engine, *k),
            Target::Partition { clustering, .. } => Ok(clustering.clone()),
        }
    }

    pub fn eval(&mut self, q: &Quantity) -> Result<f64> {
        let set = |v: &[usize]| IndexSet::new(v.to_vec());
        Ok(match q {
            Quantity::Criterion(c, t) => {
                let clustering = self.target(t)?;
                criteria::evaluate(&clustering, self.src, *c)?
            }
            Quantity::AvgBetween(a, b) => avg_between(self.src, &set(a)?, &set(b)?)?,
            Quantity::AvgWithin(a) => avg_within(self.src, &set(a)?)?,
            Quantity::Diam(a) => diam(self.src, &set(a)?)?,
            Quantity::Ratio(a, b) => self.eval(a)? / self.eval(b)?,
            Quantity::Scaled(a, s) => self.eval(a)? * s,
            Quantity::IsMetric => f64::from(u8::from(is_metric(self.src, METRIC_TOL))),
            Quantity::NonSingletonFraction { point, k, seeds } => {
                let n = self.src.n();
                let mut hits = 0u64;
                for seed in 0..*seeds {
                    let c = random_hierarchy(n, seed)?.cut(*k)?;
                    let label = c.label(*point);
                    if c.labels().iter().filter(|&&l| l == label).count() > 1 {
                        hits += 1;
                    }
                }
                hits as f64 / *seeds as f64
            }
        })
    }
}

impl ScalarExpectation {
    pub fn holds(&self, actual: f64) -> bool {
        match self.cmp {
            Cmp::Eq => (actual - self.value).abs() <= self.tol,
            Cmp::Le => actual <= self.value + self.tol,
            Cmp::Ge => actual >= self.value - self.tol,
        }
    }
}

impl InstanceBundle {
    /// Points of the named group.
    pub fn group(&self, name: &str) -> Option<&[usize]> {
        self.groups.iter().find(|(g, _)| g == name).map(|(_, v)| v.as_slice())
    }

    pub fn scalar(&self, name: &str) -> Option<&ScalarExpectation> {
        self.scalars.iter().find(|s| s.name == name)
    }

    /// Union of several named groups, sorted.
    pub fn groups_union(&self, names: &[&str]) -> Vec<usize> {
        let mut out: Vec<usize> = names.iter().flat_map(|g| self.group(g).unwrap_or(&[]).iter().copied()).collect();
        out.sort_unstable();
        out
    }

    /// Evaluates every expectation.
    pub fn check(&self) -> Result<Vec<Outcome>> {
        let mut ev = Evaluator::new(&self.source);
        let mut out = Vec::with_capacity(self.partitions.len() + self.scalars.len());
        for p in &self.partitions {
            let got = ev.cut(p.rule, p.engine, p.k)?;
            out.push(Outcome {
                name: p.name.clone(),
                expected: abbreviate(&p.expected),
                actual: abbreviate(&got),
                passed: got == p.expected,
                provenance: p.provenance,
            });
        }
        for s in &self.scalars {
            let v = ev.eval(&s.quantity)?;
            out.push(Outcome {
                name: s.name.clone(),
                expected: format!("{} {} (tol {:e})", s.cmp, s.value, s.tol),
                actual: format!("{v}"),
                passed: s.holds(v),
                provenance: s.provenance,
            });
        }
        Ok(out)
    }

    /// Structured text listing of the expectations.
    pub fn render_expectations(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# instance {}", self.name);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# param {k} = {v}");
        }
        let _ = writeln!(out, "# n = {}", self.source.n());
        let _ = writeln!(out, "# metric = {}", self.declared_metric);
        let _ = writeln!(out, "# point order: {}", self.point_order);
        for (g, pts) in &self.groups {
            let _ = writeln!(out, "# group {g}: {}", describe_indices(pts));
        }
        for note in &self.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        let _ = writeln!(out, "kind\tname\tquantity\trelation\texpected\ttolerance\tprovenance");
        for p in &self.partitions {
            let _ = writeln!(
                out,
                "partition\t{}\t{}[{}] k={}\t==\t{}\t0\t{}",
                p.name, p.rule, p.engine, p.k, p.expected, p.provenance
            );
        }
        for s in &self.scalars {
            let _ = writeln!(
                out,
                "scalar\t{}\t{}\t{}\t{}\t{:e}\t{}",
                s.name, s.quantity, s.cmp, s.value, s.tol, s.provenance
            );
        }
        out
    }

    /// Writes the source (feature CSV or condensed matrix) and the
    /// expectations file into `dir`. Returns both paths.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let src_path = if self.source.is_feature_backed() {
            let p = dir.join(format!("{}.csv", self.name));
            let rows: Vec<Vec<f64>> =
                (0..self.source.n()).map(|i| self.source.row(i).expect("feature-backed").to_vec()).collect();
            crate::io::write_feature_csv(&p, &rows)?;
            p
        } else {
            let p = dir.join(format!("{}.dist", self.name));
            crate::io::write_matrix(&p, &self.source)?;
            p
        };
        let exp_path = dir.join(format!("{}.expect.tsv", self.name));
        std::fs::write(&exp_path, self.render_expectations())?;
        Ok((src_path, exp_path))
    }
}

fn abbreviate(c: &Clustering) -> String {
    let s = c.to_string();
    if s.len() <= 120 {
        s
    } else {
        let sizes: Vec<String> = c.block_sizes().iter().map(usize::to_string).collect();
        format!("k={} sizes [{}]", c.k(), sizes.join(","))
    }
}

/// Compact rendering of a sorted index list as ranges, e.g. `0-3,7`.
pub fn describe_indices(v: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[j] + 1 {
            j += 1;
        }
        parts.push(if i == j { v[i].to_string() } else { format!("{}-{}", v[i], v[j]) });
        i = j + 1;
    }
    parts.join(",")
}

/// Engine used for expectations: the naive engine while it stays fast,
/// nearest-neighbor chain above that.
pub fn default_engine(n: usize) -> Engine {
    if n <= 800 {
        Engine::Naive(TieBreak::LexMinId)
    } else {
        Engine::NnChain
    }
}

/// Names accepted by [`generate`].
pub const GENERATORS: [&str; 9] = [
    "ics",
    "ics_augmented",
    "sep",
    "sl_line",
    "cl_l1",
    "random_bad",
    "unbounded_av",
    "nonmetric",
    "sl_sep",
];

/// Runs a generator by name with `key=value` parameters; missing keys take
/// the defaults used in the examples.
pub fn generate(name: &str, params: &BTreeMap<String, String>) -> Result<InstanceBundle> {
    let known: &[&str] = match name {
        "ics" => &["t", "eps"],
        "ics_augmented" => &["k", "eps"],
        "sep" => &["k", "d", "eps"],
        "sl_line" => &["n", "eps"],
        "cl_l1" => &["m"],
        "random_bad" => &["n", "d"],
        "unbounded_av" => &["n", "t", "eps"],
        "nonmetric" => &["n"],
        "sl_sep" => &["n", "eps"],
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown generator {other:?}; expected one of {}",
                GENERATORS.join(", ")
            )))
        }
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::InvalidArgument(format!(
            "generator {name} takes {}, not {bad:?}",
            known.join(", ")
        )));
    }
    let int = |key: &str, default: usize| -> Result<usize> {
        params.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|e| Error::InvalidArgument(format!("{key}={v}: {e}")))
        })
    };
    let real = |key: &str, default: f64| -> Result<f64> {
        params.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|e| Error::InvalidArgument(format!("{key}={v}: {e}")))
        })
    };
    match name {
        "ics" => gen_ics(int("t", 4)?, real("eps", 1e-6)?),
        "ics_augmented" => gen_ics_augmented(int("k", 4)?, real("eps", 1e-6)?),
        "sep" => gen_sep(int("k", 5)?, real("d", 100.0)?, real("eps", 1e-3)?),
        "sl_line" => gen_sl_line(int("n", 12)?, real("eps", 0.01)?),
        "cl_l1" => gen_cl_l1(int("m", 2)?),
        "random_bad" => gen_random_bad(int("n", 21)?, real("d", 500.0)?),
        "unbounded_av" => gen_unbounded_av(int("n", 16)?, real("t", 10.0)?, real("eps", 1e-4)?),
        "nonmetric" => gen_nonmetric(int("n", 16)?),
        "sl_sep" => gen_sl_sep(int("n", 49)?, real("eps", 1e-3)?),
        _ => unreachable!(),
    }
}
