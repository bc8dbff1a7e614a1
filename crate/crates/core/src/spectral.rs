//! Stage 1: hypergraph spectral clustering.
//!
//! `L = H Hᵀ - D` counts, for each node pair, the hyperedges containing
//! both. Nodes whose degree exceeds `tau` are trimmed (their row and column
//! zeroed), the trimmed matrix is replaced by its best rank-`k`
//! approximation, and its columns are clustered greedily with balls of
//! squared radius `r` around `ceil(ln n)` random reference nodes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelVector};
use crate::model::{binomial, enumerate_assignments, ModelParams};
use crate::rng::{stream_rng, Stream};

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 10_000;

/// Pair co-occurrence counts with zero diagonal, plus node degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplacianMatrix {
    n: usize,
    // row-major n x n
    counts: Vec<u32>,
    degrees: Vec<u32>,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.counts[u * self.n + v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |u, v| self.get(u, v) as f64)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (0..u).all(|v| self.get(u, v) == self.get(v, u)))
    }
}

pub fn build_laplacian(g: &Hypergraph) -> LaplacianMatrix {
    let n = g.n();
    let mut counts = vec![0u32; n * n];
    for e in g.edges() {
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                counts[u as usize * n + v as usize] += 1;
                counts[v as usize * n + u as usize] += 1;
            }
        }
    }
    LaplacianMatrix { n, counts, degrees: g.degrees() }
}

/// Trimmed Laplacian and, once computed, its rank-`k` approximation.
#[derive(Clone, Debug)]
pub struct TrimmedSpectral {
    /// Retained nodes `{v : d_v <= tau}`, increasing.
    pub gamma_set: Vec<usize>,
    pub retained: Vec<bool>,
    pub l_trimmed: LaplacianMatrix,
    pub l_rank_k: Option<DMatrix<f64>>,
    pub tau: f64,
}

impl TrimmedSpectral {
    /// Fills [`Self::l_rank_k`].
    pub fn approximate(&mut self, k: usize) -> Result<&DMatrix<f64>> {
        let approx = rank_k_approx(&self.l_trimmed.to_dmatrix(), k)?;
        Ok(self.l_rank_k.insert(approx))
    }

    /// Writes `<prefix>_laplacian.csv`, `<prefix>_gamma.csv` and
    /// `<prefix>_singular_values.csv`.
    pub fn dump_csv(&self, prefix: &Path) -> Result<()> {
        let with_suffix = |s: &str| {
            let mut name = prefix.as_os_str().to_owned();
            name.push(s);
            std::path::PathBuf::from(name)
        };
        let n = self.l_trimmed.n();
        let mut lap = String::new();
        for u in 0..n {
            let row: Vec<String> = (0..n).map(|v| self.l_trimmed.get(u, v).to_string()).collect();
            let _ = writeln!(lap, "{}", row.join(","));
        }
        let mut gamma = String::from("node,degree,retained\n");
        for v in 0..n {
            let _ = writeln!(gamma, "{},{},{}", v + 1, self.l_trimmed.degrees()[v], self.retained[v]);
        }
        let mut sv = String::from("index,singular_value\n");
        for (i, s) in singular_values(&self.l_trimmed.to_dmatrix())?.iter().enumerate() {
            let _ = writeln!(sv, "{},{:.16e}", i + 1, s);
        }
        for (suffix, body) in [("_laplacian.csv", lap), ("_gamma.csv", gamma), ("_singular_values.csv", sv)] {
            let path = with_suffix(suffix);
            fs::write(&path, body).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// Keeps nodes with degree `<= tau` and zeroes the rows and columns of the rest.
pub fn trim(l: &LaplacianMatrix, tau: f64) -> Result<TrimmedSpectral> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::InvalidParams(format!("trim threshold must be positive, got {tau}")));
    }
    let n = l.n();
    let retained: Vec<bool> = l.degrees().iter().map(|&d| d as f64 <= tau).collect();
    let gamma_set: Vec<usize> = (0..n).filter(|&v| retained[v]).collect();
    if gamma_set.is_empty() {
        return Err(Error::EmptyTrimSet {
            tau,
            min_degree: l.degrees().iter().copied().min().unwrap_or(0),
            max_degree: l.degrees().iter().copied().max().unwrap_or(0),
        });
    }
    let mut trimmed = l.clone();
    for u in 0..n {
        for v in 0..n {
            if !(retained[u] && retained[v]) {
                trimmed.counts[u * n + v] = 0;
            }
        }
    }
    Ok(TrimmedSpectral { gamma_set, retained, l_trimmed: trimmed, l_rank_k: None, tau })
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    if m.is_square() && m == &m.transpose() {
        let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::SvdFailed { rows: m.nrows(), cols: m.ncols() })?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().map(|x| x.abs()).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        return Ok(DVector::from_vec(values));
    }
    let svd = SVD::try_new(m.clone(), false, false, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::SvdFailed { rows: m.nrows(), cols: m.ncols() })?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(DVector::from_vec(values))
}

/// Best rank-`k` approximation in Frobenius (and operator) norm: the
/// singular value decomposition truncated to its `k` largest values.
///
/// Symmetric inputs go through a symmetric eigendecomposition, keeping the
/// `k` eigenvalues of largest magnitude; the result is exactly symmetric.
pub fn rank_k_approx(m: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::InvalidRank { rank: k, n: rows.min(cols) });
    }
    if rows == cols && m == &m.transpose() {
        let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::SvdFailed { rows, cols })?;
        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()).then(a.cmp(&b))
        });
        let basis = DMatrix::from_fn(rows, k, |r, c| eig.eigenvectors[(r, order[c])]);
        let weighted = DMatrix::from_fn(rows, k, |r, c| basis[(r, c)] * eig.eigenvalues[order[c]]);
        let approx = &weighted * basis.transpose();
        return Ok((&approx + approx.transpose()) * 0.5);
    }
    // nalgebra's singular vectors are unreliable on rank-deficient inputs;
    // project onto the top-k eigenvectors of the smaller Gram matrix instead.
    let wide = rows < cols;
    let gram = if wide { m * m.transpose() } else { m.transpose() * m };
    let side = gram.nrows();
    let eig = SymmetricEigen::try_new(gram, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::SvdFailed { rows, cols })?;
    let mut order: Vec<usize> = (0..side).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let basis = DMatrix::from_fn(side, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let projector = &basis * basis.transpose();
    Ok(if wide { projector * m } else { m * projector })
}

/// `E[L]` for the first-stage sub-hypergraph, whose hyperedge probabilities
/// are `Q_T gamma_n / n^(d-1)`.
///
/// Entry `(u, v)` sums, over assignments `w` of the remaining `d - 2`
/// nodes, the number of `(d-2)`-subsets of `[n] \ {u, v}` realizing `w`
/// times the rate of `w + e_{z_u} + e_{z_v}`.
pub fn expected_laplacian(params: &ModelParams, z: &LabelVector, gamma_n: f64) -> Result<DMatrix<f64>> {
    let (n, k, d) = (params.n(), params.k(), params.d());
    if z.len() != n {
        return Err(Error::LengthMismatch { left: z.len(), right: n });
    }
    let sizes = z.community_sizes();
    let scale = gamma_n / (n as f64).powi(d as i32 - 1);
    let rest = enumerate_assignments(k, d as u32 - 2);
    let mut table = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let mut available: Vec<u64> = sizes.iter().map(|&s| s as u64).collect();
            available[a] = available[a].saturating_sub(1);
            available[b] = available[b].saturating_sub(1);
            let mut total = 0.0;
            for w in &rest {
                let count: f64 = w
                    .counts()
                    .iter()
                    .zip(&available)
                    .map(|(&c, &avail)| binomial(avail, c as u64) as f64)
                    .product();
                if count == 0.0 {
                    continue;
                }
                let mut t = w.counts().to_vec();
                t[a] += 1;
                t[b] += 1;
                total += count * params.rate(&t);
            }
            table[a * k + b] = total * scale;
        }
    }
    let labels = z.labels();
    Ok(DMatrix::from_fn(n, n, |u, v| {
        if u == v {
            0.0
        } else {
            table[labels[u] * k + labels[v]]
        }
    }))
}

fn column(m: &DMatrix<f64>, v: usize) -> &[f64] {
    let n = m.nrows();
    &m.as_slice()[v * n..(v + 1) * n]
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Reference-node ball clustering on the columns of the rank-`k` matrix.
///
/// Untrimmed nodes get a uniformly random community. Greedy ties go to the
/// smallest node id, nearest-center ties to the smallest community.
pub fn spectral_cluster(spec: &TrimmedSpectral, k: usize, r: f64, seed: u64) -> Result<LabelVector> {
    let n = spec.l_trimmed.n();
    if k == 0 {
        return Err(Error::InvalidRank { rank: 0, n });
    }
    if k == 1 {
        return LabelVector::constant(n, 0, 1);
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidParams(format!("ball radius must be positive, got {r}")));
    }
    if spec.gamma_set.is_empty() {
        return Err(Error::EmptyTrimSet { tau: spec.tau, min_degree: 0, max_degree: 0 });
    }
    let computed;
    let approx = match &spec.l_rank_k {
        Some(m) => m,
        None => {
            computed = rank_k_approx(&spec.l_trimmed.to_dmatrix(), k)?;
            &computed
        }
    };

    let mut rng = stream_rng(seed, Stream::Clustering);
    let samples = (n as f64).ln().ceil().max(1.0) as usize;
    let reference: Vec<usize> = (0..samples)
        .map(|_| spec.gamma_set[rng.random_range(0..spec.gamma_set.len())])
        .collect();

    let mut distinct = reference.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let balls: Vec<(usize, Vec<usize>)> = distinct
        .iter()
        .map(|&v| {
            let center = column(approx, v);
            let members = spec
                .gamma_set
                .iter()
                .copied()
                .filter(|&u| squared_distance(column(approx, u), center) <= r)
                .collect();
            (v, members)
        })
        .collect();

    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut centers = Vec::with_capacity(k);
    for j in 0..k {
        // `balls` is sorted by node id, so the first maximum is the smallest id.
        let mut best: Option<(usize, usize)> = None;
        for (idx, (_, members)) in balls.iter().enumerate() {
            let fresh = members.iter().filter(|&&u| assigned[u].is_none()).count();
            if best.is_none_or(|(_, c)| fresh > c) {
                best = Some((idx, fresh));
            }
        }
        let (idx, _) = best.expect("at least one reference node");
        let (center, members) = &balls[idx];
        for &u in members {
            if assigned[u].is_none() {
                assigned[u] = Some(j);
            }
        }
        centers.push(*center);
    }

    for &v in &spec.gamma_set {
        if assigned[v].is_some() {
            continue;
        }
        let col = column(approx, v);
        let mut best = (0, f64::INFINITY);
        for (j, &c) in centers.iter().enumerate() {
            let dist = squared_distance(col, column(approx, c));
            if dist < best.1 {
                best = (j, dist);
            }
        }
        assigned[v] = Some(best.0);
    }

    let labels = (0..n)
        .map(|v| match assigned[v] {
            Some(j) => j,
            None => rng.random_range(0..k),
        })
        .collect();
    LabelVector::new(labels, k)
}

pub const DEFAULT_TRIM_CONSTANT: f64 = 20.0;

/// At n = 300 the unscaled radius is several times smaller than the typical
/// within-community spread of the rank-k columns, so the greedy step often
/// takes both centers from one community. 12 was the best of
/// {1, 4, 8, 12, 16, 24} over 200 seeds at n = 300, d = 2 and n = 200, d = 3.
pub const DEFAULT_RADIUS_MULTIPLIER: f64 = 12.0;

/// Stage-1 tuning: `tau = trim_constant * Q_max * gamma_n`,
/// `r = radius_multiplier * gamma_n^2 / (n ln gamma_n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageOneSettings {
    pub gamma_n: f64,
    pub trim_constant: f64,
    pub radius_multiplier: f64,
}

impl StageOneSettings {
    /// `gamma_n = sqrt(ln n)` with the default constants.
    pub fn for_n(n: usize) -> Self {
        Self {
            gamma_n: (n as f64).ln().sqrt(),
            trim_constant: DEFAULT_TRIM_CONSTANT,
            radius_multiplier: DEFAULT_RADIUS_MULTIPLIER,
        }
    }

    pub fn tau(&self, params: &ModelParams) -> f64 {
        self.trim_constant * params.q_max() * self.gamma_n
    }

    pub fn radius(&self, n: usize) -> f64 {
        self.radius_multiplier * self.gamma_n * self.gamma_n / (n as f64 * self.gamma_n.ln())
    }
}

/// Laplacian, trim, rank-`k` approximation and clustering of `g1`.
pub fn stage_one(
    g1: &Hypergraph,
    params: &ModelParams,
    settings: &StageOneSettings,
    seed: u64,
) -> Result<(LabelVector, TrimmedSpectral)> {
    let l = build_laplacian(g1);
    let mut spec = trim(&l, settings.tau(params))?;
    spec.approximate(params.k())?;
    let labels = spectral_cluster(&spec, params.k(), settings.radius(g1.n()), seed)?;
    Ok((labels, spec))
}
