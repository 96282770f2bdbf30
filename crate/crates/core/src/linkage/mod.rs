//! Agglomerative hierarchies: the greedy merge loop under average, single
//! and complete linkage, a nearest-neighbor-chain fast path, random
//! hierarchies, and cutting a hierarchy into `k` blocks.

mod clustering;
mod dendrogram;
mod naive;
mod nnchain;
mod random;

use std::fmt;
use std::str::FromStr;

pub use clustering::Clustering;
pub use dendrogram::{Dendrogram, Merge};
pub use naive::build_naive;
pub use nnchain::build_nnchain;
pub use random::{random_hierarchy, random_hierarchy_with_order};

use crate::error::{Error, Result};
use crate::metric::{sum_between, DistanceSource};

/// Cluster-to-cluster distance used by the merge loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkageRule {
    /// Mean of all cross distances.
    Average,
    /// Minimum cross distance.
    Single,
    /// Maximum cross distance.
    Complete,
}

impl LinkageRule {
    pub const ALL: [LinkageRule; 3] = [LinkageRule::Average, LinkageRule::Complete, LinkageRule::Single];

    /// Single-letter tag used in result tables (A, C, S).
    pub fn initial(self) -> char {
        match self {
            LinkageRule::Average => 'A',
            LinkageRule::Single => 'S',
            LinkageRule::Complete => 'C',
        }
    }

    /// Rule distance between two disjoint member lists, from scratch.
    pub fn distance(self, src: &DistanceSource, a: &[usize], b: &[usize]) -> f64 {
        match self {
            LinkageRule::Average => sum_between(src, a, b) / (a.len() * b.len()) as f64,
            LinkageRule::Single => a
                .iter()
                .flat_map(|&i| b.iter().map(move |&j| (i, j)))
                .map(|(i, j)| src.dist(i, j))
                .fold(f64::INFINITY, f64::min),
            LinkageRule::Complete => a
                .iter()
                .flat_map(|&i| b.iter().map(move |&j| (i, j)))
                .map(|(i, j)| src.dist(i, j))
                .fold(0.0, f64::max),
        }
    }

    /// Distance from `A ∪ B` to a third cluster `C`, given `d(A,C)`, `d(B,C)`
    /// and the sizes of `A` and `B`.
    #[inline]
    pub fn merged_distance(self, d_ac: f64, d_bc: f64, size_a: usize, size_b: usize) -> f64 {
        match self {
            LinkageRule::Average => {
                let (sa, sb) = (size_a as f64, size_b as f64);
                (sa * d_ac + sb * d_bc) / (sa + sb)
            }
            LinkageRule::Single => d_ac.min(d_bc),
            LinkageRule::Complete => d_ac.max(d_bc),
        }
    }
}

impl fmt::Display for LinkageRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkageRule::Average => "average",
            LinkageRule::Single => "single",
            LinkageRule::Complete => "complete",
        })
    }
}

impl FromStr for LinkageRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" | "a" => Ok(LinkageRule::Average),
            "single" | "s" => Ok(LinkageRule::Single),
            "complete" | "c" => Ok(LinkageRule::Complete),
            other => Err(Error::InvalidArgument(format!("unknown linkage rule {other:?}"))),
        }
    }
}

/// Which minimal pair the naive engine merges when several tie.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographically smallest `(min cluster id, max cluster id)`.
    #[default]
    LexMinId,
    /// First minimal pair met while scanning live clusters in slot order.
    /// A merged cluster takes over the lower slot of its two parents.
    FirstFound,
}

impl FromStr for TieBreak {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lex_min_id" | "lex" => Ok(TieBreak::LexMinId),
            "first_found" | "first" => Ok(TieBreak::FirstFound),
            other => Err(Error::InvalidArgument(format!("unknown tie-break {other:?}"))),
        }
    }
}

/// Engine choice for building a hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Naive(TieBreak),
    NnChain,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Naive(TieBreak::LexMinId)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Naive(TieBreak::LexMinId) => f.write_str("naive/lex_min_id"),
            Engine::Naive(TieBreak::FirstFound) => f.write_str("naive/first_found"),
            Engine::NnChain => f.write_str("nnchain"),
        }
    }
}

/// Builds the full hierarchy with the chosen engine.
pub fn build(src: &DistanceSource, rule: LinkageRule, engine: Engine) -> Result<Dendrogram> {
    match engine {
        Engine::Naive(tb) => build_naive(src, rule, tb),
        Engine::NnChain => build_nnchain(src, rule),
    }
}

/// `k`-cut of the average-link hierarchy, naive engine, default tie-break.
pub fn average_link_cut(src: &DistanceSource, k: usize) -> Result<Clustering> {
    build_naive(src, LinkageRule::Average, TieBreak::LexMinId)?.cut(k)
}
