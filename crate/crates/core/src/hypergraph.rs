//! Hypergraph and label containers plus their text formats.
//!
//! Hypergraph file: a header line `n d m`, then `m` lines each holding the
//! `d` 1-based node ids of one hyperedge in increasing order. Labels file:
//! `n` lines with one 1-based community index each.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// d-uniform hypergraph on nodes `0..n`.
///
/// Each hyperedge is stored as a strictly increasing `d`-tuple; the edge
/// list is sorted and duplicate-free. This is the canonical form of the
/// symmetric 0/1 adjacency tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    d: usize,
    // row-major, `d` ids per edge
    flat: Vec<u32>,
}

impl Hypergraph {
    pub fn empty(n: usize, d: usize) -> Self {
        Self { n, d, flat: Vec::new() }
    }

    /// Canonicalizes (sorts) every edge. Rejects repeated nodes inside an
    /// edge, out-of-range ids, wrong arity and duplicate edges.
    pub fn new(n: usize, d: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut sorted: Vec<Vec<u32>> = Vec::new();
        for mut e in edges {
            if e.len() != d {
                return Err(Error::InvalidEdge { edge: e, reason: "wrong number of nodes" });
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge { edge: e, reason: "repeated node" });
            }
            if e.last().is_some_and(|&v| v >= n) {
                return Err(Error::InvalidEdge { edge: e, reason: "node id out of range" });
            }
            sorted.push(e.into_iter().map(|v| v as u32).collect());
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEdge {
                edge: w[0].iter().map(|&v| v as usize).collect(),
                reason: "duplicate edge",
            });
        }
        Ok(Self { n, d, flat: sorted.concat() })
    }

    /// Caller guarantees every chunk is strictly increasing and in range;
    /// the chunks are sorted here. Duplicates must not occur.
    pub(crate) fn from_canonical_chunks(n: usize, d: usize, mut flat: Vec<u32>) -> Self {
        debug_assert_eq!(flat.len() % d.max(1), 0);
        let mut chunks: Vec<&[u32]> = flat.chunks_exact(d).collect();
        let already_sorted = chunks.windows(2).all(|w| w[0] < w[1]);
        if !already_sorted {
            chunks.sort_unstable();
            debug_assert!(chunks.windows(2).all(|w| w[0] != w[1]));
            flat = chunks.concat();
        }
        Self { n, d, flat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_edges(&self) -> usize {
        self.flat.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.flat.chunks_exact(self.d)
    }

    pub fn edge(&self, idx: usize) -> &[u32] {
        &self.flat[idx * self.d..(idx + 1) * self.d]
    }

    /// Membership test; `nodes` need not be sorted.
    pub fn contains(&self, nodes: &[usize]) -> bool {
        if nodes.len() != self.d {
            return false;
        }
        let mut key: Vec<u32> = nodes.iter().map(|&v| v as u32).collect();
        key.sort_unstable();
        let m = self.num_edges();
        let (mut lo, mut hi) = (0, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(key.as_slice()) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for &v in &self.flat {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { left: perm.len(), right: self.n });
        }
        Self::new(
            self.n,
            self.d,
            self.edges().map(|e| e.iter().map(|&v| perm[v as usize]).collect()),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 + self.flat.len() * 5);
        let _ = writeln!(out, "{} {} {}", self.n, self.d, self.num_edges());
        for e in self.edges() {
            for (i, v) in e.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", v + 1);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| err("missing header".into()))?;
        let nums = parse_usizes(header).map_err(&err)?;
        let [n, d, m] = nums[..] else {
            return Err(err(format!("header must be `n d m`, got `{header}`")));
        };
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let ids = parse_usizes(line).map_err(&err)?;
            if ids.contains(&0) {
                return Err(err(format!("node ids are 1-based, got `{line}`")));
            }
            edges.push(ids.into_iter().map(|v| v - 1).collect::<Vec<_>>());
        }
        if edges.len() != m {
            return Err(err(format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::new(n, d, edges).map_err(|e| err(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}

fn parse_usizes(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|e| format!("`{tok}`: {e}")))
        .collect()
}

/// Community labels `0..k` for nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::CommunityOutOfRange { index: bad, k });
        }
        Ok(Self { labels, k })
    }

    pub fn constant(n: usize, label: usize, k: usize) -> Result<Self> {
        Self::new(vec![label; n], k)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `|V_j|` for every community `j`.
    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Applies `map` to every label.
    pub fn relabeled(&self, map: &[usize]) -> Result<Self> {
        Self::new(self.labels.iter().map(|&l| map[l]).collect(), self.k)
    }

    /// Node `v` of the result carries the label of node `perm^-1(v)`,
    /// matching [`Hypergraph::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::LengthMismatch { left: perm.len(), right: self.len() });
        }
        let mut out = vec![0; self.len()];
        for (v, &target) in perm.iter().enumerate() {
            out[target] = self.labels[v];
        }
        Self::new(out, self.k)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 2);
        for &l in &self.labels {
            let _ = writeln!(out, "{}", l + 1);
        }
        out
    }

    /// Parses a labels file. `k` defaults to the largest label present.
    pub fn from_text(text: &str, k: Option<usize>, path: &Path) -> Result<Self> {
        let err = |message: String| Error::Parse { path: path.to_path_buf(), message };
        let mut labels = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let l: usize = line.trim().parse().map_err(|e| err(format!("`{line}`: {e}")))?;
            if l == 0 {
                return Err(err("labels are 1-based".into()));
            }
            labels.push(l - 1);
        }
        let k = k.unwrap_or_else(|| labels.iter().max().map_or(1, |m| m + 1));
        Self::new(labels, k).map_err(|e| err(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, k: Option<usize>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, k, path)
    }
}
