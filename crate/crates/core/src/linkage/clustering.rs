use std::fmt;

use crate::error::{Error, Result};
use crate::metric::IndexSet;

/// A partition of `0..n` into `k` nonempty blocks.
///
/// Labels are canonical: block ids are assigned in order of first
/// appearance, so two clusterings are equal exactly when they describe the
/// same partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    /// Builds a clustering from arbitrary per-point labels.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = std::collections::HashMap::new();
        let canon = labels
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Clustering { labels: canon, k: seen.len() })
    }

    /// Builds a clustering from explicit blocks that must partition `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::EmptySet);
            }
            for &i in block {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                if labels[i] != usize::MAX {
                    return Err(Error::Overlap(i));
                }
                labels[i] = b;
            }
        }
        if let Some(missing) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidArgument(format!("point {missing} is in no block")));
        }
        Self::from_labels(&labels)
    }

    /// Same as [`from_blocks`](Self::from_blocks) for index sets.
    pub fn from_sets(n: usize, blocks: &[IndexSet]) -> Result<Self> {
        let raw: Vec<Vec<usize>> = blocks.iter().map(|b| b.as_slice().to_vec()).collect();
        Self::from_blocks(n, &raw)
    }

    pub(crate) fn from_canonical(labels: Vec<usize>, k: usize) -> Self {
        debug_assert!(labels.iter().all(|&l| l < k));
        Clustering { labels, k }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Blocks as sorted index lists, in label order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn index_sets(&self) -> Vec<IndexSet> {
        self.blocks()
            .into_iter()
            .map(|b| IndexSet::new(b).expect("blocks are nonempty and distinct"))
            .collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// True when every block of `self` lies inside some block of `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        let mut image = vec![usize::MAX; self.k];
        self.labels.iter().zip(&coarser.labels).all(|(&a, &b)| {
            if image[a] == usize::MAX {
                image[a] = b;
            }
            image[a] == b
        })
    }
}

impl fmt::Display for Clustering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                f.write_str("|")?;
            }
            let items: Vec<String> = block.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels() {
        let a = Clustering::from_labels(&[7, 7, 2, 9, 2]).unwrap();
        let b = Clustering::from_labels(&["x", "x", "y", "z", "y"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(a.k(), 3);
        assert_eq!(a.to_string(), "{0,1}|{2,4}|{3}");
        assert_eq!(a.block_sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn blocks_must_partition() {
        assert!(Clustering::from_blocks(3, &[vec![0, 1], vec![2]]).is_ok());
        assert!(Clustering::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Clustering::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Clustering::from_blocks(3, &[vec![0, 1, 2], vec![]]).is_err());
        assert!(Clustering::from_blocks(3, &[vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn refinement() {
        let fine = Clustering::from_blocks(4, &[vec![0], vec![1], vec![2, 3]]).unwrap();
        let coarse = Clustering::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }
}
