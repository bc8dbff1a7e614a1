//! Ground-truth labels, random d-uniform hypergraphs and the two-way edge
//! split that decouples the two inference stages.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelVector};
use crate::model::{assignment_rank, binomial, ModelParams};
use crate::rng::{stream_rng, Stream};

/// Largest candidate count for which [`Strategy::auto`] picks exact enumeration.
pub const EXACT_CANDIDATE_LIMIT: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One Bernoulli draw per candidate d-subset.
    Exact,
    /// Per hyperedge class: a binomial edge count, then a uniform subset
    /// of the class without replacement.
    Stratified,
}

impl Strategy {
    pub fn auto(n: usize, d: usize) -> Self {
        if binomial(n as u64, d as u64) <= EXACT_CANDIDATE_LIMIT {
            Strategy::Exact
        } else {
            Strategy::Stratified
        }
    }
}

pub fn sample_labels(params: &ModelParams, seed: u64) -> LabelVector {
    sample_labels_with_prior(params.n(), params.prior(), seed)
        .expect("validated prior")
}

/// i.i.d. draws from `prior` by inversion of one uniform per node.
///
/// Unlike [`ModelParams`], zero entries are accepted here.
pub fn sample_labels_with_prior(n: usize, prior: &[f64], seed: u64) -> Result<LabelVector> {
    if prior.is_empty() || prior.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidParams(format!("invalid prior {prior:?}")));
    }
    let mut cumulative = Vec::with_capacity(prior.len());
    let mut acc = 0.0;
    for p in prior {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let last_positive = prior.iter().rposition(|&p| p > 0.0).ok_or_else(|| {
        Error::InvalidParams("prior has no positive entry".into())
    })?;
    let mut rng = stream_rng(seed, Stream::Labels);
    let labels = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cumulative
                .iter()
                .position(|&c| u < c)
                .unwrap_or(last_positive)
        })
        .collect();
    LabelVector::new(labels, prior.len())
}

/// Community sizes within `(1 ± n^(-1/2 + delta/2)) p_j n` for every `j`.
pub fn is_typical(z: &LabelVector, params: &ModelParams, delta: f64) -> bool {
    let n = z.len() as f64;
    let slack = n.powf(-0.5 + delta / 2.0);
    z.community_sizes()
        .iter()
        .zip(params.prior())
        .all(|(&size, &p)| {
            let size = size as f64;
            (1.0 - slack) * p * n <= size && size <= (1.0 + slack) * p * n
        })
}

fn check_labels(params: &ModelParams, z: &LabelVector) -> Result<()> {
    if z.len() != params.n() {
        return Err(Error::LengthMismatch { left: z.len(), right: params.n() });
    }
    if z.k() != params.k() {
        return Err(Error::InvalidParams(format!(
            "labels use k = {}, model has k = {}",
            z.k(),
            params.k()
        )));
    }
    Ok(())
}

/// Draws the d-HSBM hypergraph for labels `z`.
pub fn sample_hsbm(
    params: &ModelParams,
    z: &LabelVector,
    seed: u64,
    strategy: Strategy,
) -> Result<Hypergraph> {
    check_labels(params, z)?;
    let probs: Vec<f64> = params
        .hyperedge_classes()
        .iter()
        .map(|t| params.edge_probability(t.counts()))
        .collect();
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParams(format!("hyperedge probability {p} outside [0, 1]")));
    }
    let mut rng = stream_rng(seed, Stream::Edges);
    match strategy {
        Strategy::Exact => Ok(sample_exact(params, z, &probs, &mut rng)),
        Strategy::Stratified => sample_stratified(params, z, &probs, &mut rng),
    }
}

fn sample_exact(params: &ModelParams, z: &LabelVector, probs: &[f64], rng: &mut impl Rng) -> Hypergraph {
    let (n, d, k) = (params.n(), params.d(), params.k());
    let labels = z.labels();
    let mut flat = Vec::new();
    let mut counts = vec![0u32; k];
    let mut combo: Vec<usize> = (0..d).collect();
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        for &v in &combo {
            counts[labels[v]] += 1;
        }
        let p = probs[assignment_rank(&counts)];
        if p > 0.0 && rng.random::<f64>() < p {
            flat.extend(combo.iter().map(|&v| v as u32));
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    Hypergraph::from_canonical_chunks(n, d, flat)
}

/// Advances to the next `combo.len()`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let d = combo.len();
    let mut i = d;
    while i > 0 {
        i -= 1;
        if combo[i] < n - d + i {
            combo[i] += 1;
            for j in (i + 1)..d {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn sample_stratified(
    params: &ModelParams,
    z: &LabelVector,
    probs: &[f64],
    rng: &mut impl Rng,
) -> Result<Hypergraph> {
    let k = params.k();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (v, &l) in z.labels().iter().enumerate() {
        members[l].push(v as u32);
    }
    let mut flat = Vec::new();
    let mut edge = Vec::with_capacity(params.d());
    for (class, t) in params.hyperedge_classes().iter().enumerate() {
        let p = probs[class];
        if p == 0.0 {
            continue;
        }
        let radices: Vec<u128> = t
            .counts()
            .iter()
            .zip(&members)
            .map(|(&c, m)| binomial(m.len() as u64, c as u64))
            .collect();
        let size = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r))
            .filter(|&s| s <= u64::MAX as u128)
            .ok_or_else(|| Error::InvalidParams(format!("hyperedge class {t} is too large to sample")))?;
        if size == 0 {
            continue;
        }
        let count = Binomial::new(size as u64, p)
            .map_err(|e| Error::InvalidParams(format!("binomial({size}, {p}): {e}")))?
            .sample(rng) as u128;
        for mut idx in floyd_sample(size, count, rng) {
            edge.clear();
            for ((&c, m), &radix) in t.counts().iter().zip(&members).zip(&radices) {
                let digit = idx % radix;
                idx /= radix;
                unrank_combination(digit, c, m, &mut edge);
            }
            edge.sort_unstable();
            flat.extend_from_slice(&edge);
        }
    }
    Ok(Hypergraph::from_canonical_chunks(params.n(), params.d(), flat))
}

/// `count` distinct values from `0..size`, uniformly, in increasing order.
fn floyd_sample(size: u128, count: u128, rng: &mut impl Rng) -> Vec<u128> {
    let mut chosen: HashSet<u128> = HashSet::with_capacity(count as usize);
    for j in (size - count)..size {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut out: Vec<u128> = chosen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Appends the `rank`-th `size`-subset of `pool` (colexicographic order).
fn unrank_combination(mut rank: u128, size: u32, pool: &[u32], out: &mut Vec<u32>) {
    let mut upper = pool.len() as u64;
    for j in (1..=size as u64).rev() {
        // largest c < upper with C(c, j) <= rank
        let (mut lo, mut hi) = (j - 1, upper - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if binomial(mid, j) <= rank {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        rank -= binomial(lo, j);
        out.push(pool[lo as usize]);
        upper = lo;
    }
}

/// `G_1` and `G_2`: the present hyperedges routed to each side of the split.
#[derive(Clone, Debug)]
pub struct SplitPair {
    pub g1: Hypergraph,
    pub g2: Hypergraph,
    pub gamma_n: f64,
}

impl SplitPair {
    /// Per-edge probability of landing in `G_1`, `gamma_n / ln n`.
    pub fn rate(&self) -> f64 {
        self.gamma_n / (self.g1.n() as f64).ln()
    }
}

/// Routes every edge of `g` to `G_1` with probability `gamma_n / ln n`,
/// otherwise to `G_2`.
///
/// Absent candidate hyperedges are not split; only present ones are.
pub fn split_hypergraph(g: &Hypergraph, gamma_n: f64, seed: u64) -> Result<SplitPair> {
    let rate = gamma_n / (g.n() as f64).ln();
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    let mut rng = stream_rng(seed, Stream::Split);
    let mut first = Vec::new();
    let mut second = Vec::new();
    for e in g.edges() {
        if rng.random::<f64>() < rate {
            first.extend_from_slice(e);
        } else {
            second.extend_from_slice(e);
        }
    }
    Ok(SplitPair {
        g1: Hypergraph::from_canonical_chunks(g.n(), g.d(), first),
        g2: Hypergraph::from_canonical_chunks(g.n(), g.d(), second),
        gamma_n,
    })
}
