//! Agents and coalition structures (set partitions of `1..=n`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 1-based agent index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(usize);

impl AgentId {
    pub const fn new(id: usize) -> Self {
        AgentId(id)
    }

    pub const fn get(self) -> usize {
        self.0
    }

    /// Checks `1 <= id <= n`.
    pub fn checked(self, n: usize) -> Result<Self> {
        if self.0 >= 1 && self.0 <= n {
            Ok(self)
        } else {
            Err(Error::AgentOutOfRange { agent: self.0, n })
        }
    }
}

impl From<usize> for AgentId {
    fn from(id: usize) -> Self {
        AgentId(id)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sorts members inside each block and orders blocks by their minimum.
pub fn canonicalize(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b
        })
        .collect();
    out.sort_by_key(|b| b.first().copied().unwrap_or(usize::MAX));
    out
}

/// A set partition of the agents `1..=n`, always held in canonical form.
///
/// Serializes as a JSON array of arrays, e.g. `[[1,4],[2,3]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct CoalitionStructure {
    blocks: Vec<Vec<usize>>,
    // owner[i - 1] is the index into `blocks` of agent i's block.
    owner: Vec<usize>,
}

impl CoalitionStructure {
    /// Every agent in its own block.
    pub fn singletons(n: usize) -> Self {
        CoalitionStructure {
            blocks: (1..=n).map(|i| vec![i]).collect(),
            owner: (0..n).collect(),
        }
    }

    /// Builds a partition from arbitrary blocks; the population size is the
    /// total number of members, which must be exactly `1..=n`.
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        Self::with_population(n, blocks)
    }

    /// Builds a partition of `1..=n` from arbitrary blocks.
    pub fn with_population(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPartition { n, reason };
        let mut owner = vec![usize::MAX; n];
        let blocks = canonicalize(&blocks);
        for (idx, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(invalid("empty block".into()));
            }
            for &a in block {
                if a == 0 || a > n {
                    return Err(invalid(format!("agent {a} out of range")));
                }
                if owner[a - 1] != usize::MAX {
                    return Err(invalid(format!("agent {a} appears twice")));
                }
                owner[a - 1] = idx;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(invalid(format!("agent {} missing", missing + 1)));
        }
        Ok(CoalitionStructure { blocks, owner })
    }

    /// Builds a partition from a per-agent block label (`labels[i - 1]`).
    /// Agents sharing a label share a block.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut by_label: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(i + 1);
        }
        Self::with_population(labels.len(), by_label.into_values().collect())
            .expect("labels always describe a partition")
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the largest block (0 for the empty population).
    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The block containing agent `i`.
    pub fn lookup_block(&self, i: AgentId) -> Result<&[usize]> {
        let i = i.checked(self.n())?;
        Ok(&self.blocks[self.owner[i.get() - 1]])
    }

    /// Unchecked-by-type variant of [`lookup_block`](Self::lookup_block) for 1-based indices.
    pub fn block_of(&self, i: usize) -> &[usize] {
        &self.blocks[self.owner[i - 1]]
    }

    pub fn block_index(&self, i: usize) -> usize {
        self.owner[i - 1]
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.owner[i - 1] == self.owner[j - 1]
    }

    /// Unifies the blocks of `i` and `j`.
    pub fn merge_blocks(&self, i: AgentId, j: AgentId) -> Result<Self> {
        let n = self.n();
        let (i, j) = (i.checked(n)?.get(), j.checked(n)?.get());
        let (bi, bj) = (self.owner[i - 1], self.owner[j - 1]);
        if bi == bj {
            return Ok(self.clone());
        }
        let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(self.blocks.len() - 1);
        let mut merged = Vec::with_capacity(self.blocks[bi].len() + self.blocks[bj].len());
        for (idx, b) in self.blocks.iter().enumerate() {
            if idx == bi || idx == bj {
                merged.extend_from_slice(b);
            } else {
                blocks.push(b.clone());
            }
        }
        blocks.push(merged);
        Self::with_population(n, blocks)
    }

    /// Per-agent block labels, equal to the block's canonical position.
    pub fn labels(&self) -> &[usize] {
        &self.owner
    }
}

impl TryFrom<Vec<Vec<usize>>> for CoalitionStructure {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_blocks(blocks)
    }
}

impl From<CoalitionStructure> for Vec<Vec<usize>> {
    fn from(s: CoalitionStructure) -> Self {
        s.blocks
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (m, a) in b.iter().enumerate() {
                if m > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Enumerates every set partition of `1..=n` as a restricted growth string.
///
/// `labels()` exposes the current string; `advance()` moves to the next one
/// and returns `false` once all `B_n` partitions have been visited.
pub struct PartitionEnumerator {
    labels: Vec<usize>,
    // prefix_max[k] = max(labels[..=k])
    prefix_max: Vec<usize>,
    done: bool,
}

impl PartitionEnumerator {
    pub fn new(n: usize) -> Self {
        PartitionEnumerator {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        let n = self.labels.len();
        // Find the rightmost position that can still grow.
        let mut k = n;
        while k > 1 {
            k -= 1;
            if self.labels[k] <= self.prefix_max[k - 1] {
                self.labels[k] += 1;
                self.prefix_max[k] = self.prefix_max[k - 1].max(self.labels[k]);
                for t in k + 1..n {
                    self.labels[t] = 0;
                    self.prefix_max[t] = self.prefix_max[t - 1];
                }
                return true;
            }
        }
        self.done = true;
        false
    }
}

/// Counts set partitions of `1..=n` by exhaustive enumeration.
pub fn count_partitions(n: usize) -> u64 {
    let mut e = PartitionEnumerator::new(n);
    let mut count = 1;
    while e.advance() {
        count += 1;
    }
    count
}

/// Materializes every partition of `1..=n`. Intended for small `n`.
pub fn all_partitions(n: usize) -> Vec<CoalitionStructure> {
    let mut e = PartitionEnumerator::new(n);
    let mut out = vec![CoalitionStructure::from_labels(e.labels())];
    while e.advance() {
        out.push(CoalitionStructure::from_labels(e.labels()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cs(blocks: &[&[usize]]) -> CoalitionStructure {
        CoalitionStructure::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn lookup_block_examples() {
        let s = cs(&[&[1, 4], &[2, 3]]);
        assert_eq!(s.lookup_block(AgentId::new(4)).unwrap(), &[1, 4]);
        assert_eq!(cs(&[&[1]]).lookup_block(AgentId::new(1)).unwrap(), &[1]);
        assert_eq!(cs(&[&[1, 2, 3]]).lookup_block(AgentId::new(2)).unwrap(), &[1, 2, 3]);
    }

    #[test]
    fn lookup_block_rejects_out_of_range() {
        let s = CoalitionStructure::singletons(3);
        assert!(matches!(
            s.lookup_block(AgentId::new(0)),
            Err(Error::AgentOutOfRange { agent: 0, n: 3 })
        ));
        assert!(s.lookup_block(AgentId::new(4)).is_err());
    }

    #[test]
    fn merge_examples() {
        let s = CoalitionStructure::singletons(4);
        let s = s.merge_blocks(1.into(), 4.into()).unwrap();
        assert_eq!(s, cs(&[&[1, 4], &[2], &[3]]));
        let s = s.merge_blocks(2.into(), 3.into()).unwrap();
        assert_eq!(s, cs(&[&[1, 4], &[2, 3]]));
        let one = cs(&[&[1, 2]]);
        assert_eq!(one.merge_blocks(1.into(), 2.into()).unwrap(), one);
        assert!(one.merge_blocks(1.into(), 3.into()).is_err());
    }

    #[test]
    fn rejects_malformed_blocks() {
        assert!(CoalitionStructure::from_blocks(vec![vec![1, 2], vec![2]]).is_err());
        assert!(CoalitionStructure::from_blocks(vec![vec![1, 3]]).is_err());
        assert!(CoalitionStructure::with_population(2, vec![vec![1, 2], vec![]]).is_err());
        assert!(CoalitionStructure::from_blocks(vec![vec![0]]).is_err());
    }

    #[test]
    fn json_is_canonical_array_of_arrays() {
        let s = cs(&[&[3, 2], &[4, 1]]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[1,4],[2,3]]");
        let back: CoalitionStructure = serde_json::from_str("[[2,3],[4,1]]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<CoalitionStructure>("[[1,1]]").is_err());
        assert_eq!(s.to_string(), "[[1,4],[2,3]]");
    }

    #[test]
    fn enumeration_counts_small_bell_numbers() {
        let expected = [1u64, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(count_partitions(n), b, "n = {n}");
        }
        let all = all_partitions(4);
        let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 15);
    }

    fn arb_partition(max_n: usize) -> impl Strategy<Value = CoalitionStructure> {
        (1..=max_n)
            .prop_flat_map(|n| proptest::collection::vec(0..n, n))
            .prop_map(|labels| CoalitionStructure::from_labels(&labels))
    }

    proptest! {
        #[test]
        fn merge_preserves_partition(s in arb_partition(32), a in 1usize..=32, b in 1usize..=32) {
            let n = s.n();
            let (i, j) = ((a - 1) % n + 1, (b - 1) % n + 1);
            let m = s.merge_blocks(i.into(), j.into()).unwrap();
            prop_assert_eq!(m.n(), n);
            prop_assert_eq!(m.blocks().iter().map(Vec::len).sum::<usize>(), n);
            prop_assert!(m.same_block(i, j));
            let expected = if s.same_block(i, j) { s.num_blocks() } else { s.num_blocks() - 1 };
            prop_assert_eq!(m.num_blocks(), expected);
            // Round trip through the validating constructor.
            prop_assert_eq!(CoalitionStructure::from_blocks(m.blocks().to_vec()).unwrap(), m);
        }

        #[test]
        fn canonicalize_is_idempotent(s in arb_partition(16), seed in any::<u64>()) {
            // Scramble block and member order, then canonicalize twice.
            let mut raw: Vec<Vec<usize>> = s.blocks().to_vec();
            let shift = (seed as usize) % raw.len().max(1);
            raw.rotate_left(shift);
            for b in raw.iter_mut() { b.reverse(); }
            let once = canonicalize(&raw);
            prop_assert_eq!(canonicalize(&once), once.clone());
            prop_assert_eq!(once, s.blocks().to_vec());
        }
    }
}
