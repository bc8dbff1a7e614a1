//! Model parameters, community-assignment combinatorics, degree profiles and
//! the generalized Chernoff–Hellinger (GCH) divergence.
//!
//! An assignment vector counts how many nodes of a node subset fall into
//! each community. Vectors of order `d` index the hyperedge rates `Q_T`;
//! vectors of order `d - 1` describe the other members of a hyperedge that
//! contains a fixed node. Both families are enumerated in lexicographically
//! descending order, and [`assignment_rank`] maps a vector back to its
//! position in that order, so rate tables are plain `Vec<f64>`s.

use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on `sum(prior) == 1`.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Default relative tolerance for the second-order-profile equality test.
pub const XI_TOLERANCE: f64 = 1e-9;

/// Length-`k` vector of nonnegative counts; its order is the sum of the counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssignmentVector {
    counts: Vec<u32>,
}

impl AssignmentVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn order(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Position of this vector in [`enumerate_assignments`] order.
    pub fn rank(&self) -> usize {
        assignment_rank(&self.counts)
    }

    /// Joint assignment `m ⊕ i`: the vector with entry `i` incremented.
    ///
    /// Only defined for `m` of order at least one (i.e. `d >= 2`).
    pub fn oplus(&self, i: usize) -> Result<AssignmentVector> {
        if i >= self.k() {
            return Err(Error::CommunityOutOfRange { index: i, k: self.k() });
        }
        if self.order() == 0 {
            return Err(Error::InvalidParams(
                "m ⊕ i needs m of order d - 1 >= 1".into(),
            ));
        }
        let mut counts = self.counts.clone();
        counts[i] += 1;
        Ok(Self { counts })
    }
}

impl fmt::Display for AssignmentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, c) in self.counts.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Exact binomial coefficient. Saturates at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for j in 0..r {
        // acc * (n - j) is divisible by (j + 1) at every step.
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Falling-factorial binomial `x (x-1) ... (x-j+1) / j!` for real `x`.
///
/// Returns 0 when `x < j`: there is no way to choose `j` items out of fewer.
pub fn falling_binomial(x: f64, j: u32) -> f64 {
    if x < j as f64 {
        return 0.0;
    }
    (0..j).fold(1.0, |acc, i| acc * (x - i as f64) / (i as f64 + 1.0))
}

/// Number of assignment vectors of length `k` summing to `order`.
pub fn assignment_count(k: usize, order: u32) -> usize {
    if k == 0 {
        return usize::from(order == 0);
    }
    binomial(order as u64 + k as u64 - 1, k as u64 - 1) as usize
}

/// All length-`k` nonnegative integer vectors summing to `order`, in
/// lexicographically descending order.
pub fn enumerate_assignments(k: usize, order: u32) -> Vec<AssignmentVector> {
    let mut out = Vec::with_capacity(assignment_count(k, order));
    if k == 0 {
        if order == 0 {
            out.push(AssignmentVector::new(Vec::new()));
        }
        return out;
    }
    let mut current = vec![0u32; k];
    fill_assignments(&mut current, 0, order, &mut out);
    out
}

fn fill_assignments(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<AssignmentVector>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(AssignmentVector::new(current.to_vec()));
        return;
    }
    for x in (0..=remaining).rev() {
        current[pos] = x;
        fill_assignments(current, pos + 1, remaining - x, out);
    }
}

/// Index of `counts` within `enumerate_assignments(counts.len(), sum)`.
pub fn assignment_rank(counts: &[u32]) -> usize {
    let k = counts.len();
    let mut remaining: u32 = counts.iter().sum();
    let mut idx = 0usize;
    for (s, &c) in counts.iter().enumerate().take(k.saturating_sub(1)) {
        let parts = k - s - 1;
        for x in (c + 1)..=remaining {
            idx += assignment_count(parts, remaining - x);
        }
        remaining -= c;
    }
    idx
}

/// Community prior, rate table and sizes of a d-HSBM instance.
///
/// Hyperedge `e` appears with probability `Q_{T(e)} ln(n) / n^(d-1)` where
/// `T(e)` is the assignment vector of its members.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    n: usize,
    k: usize,
    d: usize,
    prior: Vec<f64>,
    // indexed by assignment_rank over order-d vectors
    rates: Vec<f64>,
}

impl ModelParams {
    pub fn new(n: usize, k: usize, d: usize, prior: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k must be >= 2, got {k}")));
        }
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must be >= 2, got {d}")));
        }
        if n < d {
            return Err(Error::InvalidParams(format!("n = {n} is smaller than d = {d}")));
        }
        if prior.len() != k {
            return Err(Error::InvalidParams(format!(
                "prior has length {}, expected k = {k}",
                prior.len()
            )));
        }
        if let Some(p) = prior.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidParams(format!("prior entries must be positive, got {p}")));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::InvalidParams(format!("prior sums to {total}, expected 1")));
        }
        let expected = assignment_count(k, d as u32);
        if rates.len() != expected {
            return Err(Error::InvalidParams(format!(
                "rate table has {} entries, expected {expected}",
                rates.len()
            )));
        }
        if let Some(q) = rates.iter().find(|q| !(q.is_finite() && **q >= 0.0)) {
            return Err(Error::InvalidParams(format!("rates must be finite and nonnegative, got {q}")));
        }
        let params = Self { n, k, d, prior, rates };
        let p_max = params.q_max() * params.edge_scale();
        // slack for rates computed as n^(d-1) / ln(n)
        if p_max > 1.0 + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "largest hyperedge probability is {p_max} > 1"
            )));
        }
        Ok(params)
    }

    /// Builds the rate table by evaluating `rate` on every order-`d` vector.
    pub fn from_fn(
        n: usize,
        k: usize,
        d: usize,
        prior: Vec<f64>,
        rate: impl Fn(&[u32]) -> f64,
    ) -> Result<Self> {
        let rates = enumerate_assignments(k, d as u32)
            .iter()
            .map(|t| rate(t.counts()))
            .collect();
        Self::new(n, k, d, prior, rates)
    }

    /// Balanced communities; rate `q_in` when all `d` nodes share a
    /// community and `q_out` otherwise.
    pub fn symmetric(n: usize, k: usize, d: usize, q_in: f64, q_out: f64) -> Result<Self> {
        let prior = vec![1.0 / k as f64; k];
        Self::from_fn(n, k, d, prior, |t| {
            if t.iter().filter(|&&c| c > 0).count() == 1 {
                q_in
            } else {
                q_out
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// Rate table in [`enumerate_assignments`]`(k, d)` order.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, t: &[u32]) -> f64 {
        debug_assert_eq!(t.len(), self.k);
        debug_assert_eq!(t.iter().sum::<u32>() as usize, self.d);
        self.rates[assignment_rank(t)]
    }

    pub fn q_max(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }

    pub fn q_min(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Natural logarithm of `n`.
    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `ln(n) / n^(d-1)`, the factor turning a rate into a probability.
    pub fn edge_scale(&self) -> f64 {
        self.log_n() / (self.n as f64).powi(self.d as i32 - 1)
    }

    pub fn edge_probability(&self, t: &[u32]) -> f64 {
        (self.rate(t) * self.edge_scale()).min(1.0)
    }

    /// Order-`d` assignment vectors (the set of hyperedge classes).
    pub fn hyperedge_classes(&self) -> Vec<AssignmentVector> {
        enumerate_assignments(self.k, self.d as u32)
    }

    /// Order-`d - 1` assignment vectors (neighbourhood shapes of a node).
    pub fn neighbour_shapes(&self) -> Vec<AssignmentVector> {
        enumerate_assignments(self.k, self.d as u32 - 1)
    }

    /// Same model with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParams(format!("scale factor must be positive, got {factor}")));
        }
        let rates = self.rates.iter().map(|q| q * factor).collect();
        Self::new(self.n, self.k, self.d, self.prior.clone(), rates)
    }

    /// Same prior and rates on a different node count.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        Self::new(n, self.k, self.d, self.prior.clone(), self.rates.clone())
    }

    fn check_community(&self, i: usize) -> Result<()> {
        if i >= self.k {
            Err(Error::CommunityOutOfRange { index: i, k: self.k })
        } else {
            Ok(())
        }
    }
}

/// `R'_m = prod_s C(n p_s, m_s) / n^(d-1)`: normalized expected number of
/// `(d-1)`-subsets whose community assignment is `m`.
pub fn normalized_weight(m: &AssignmentVector, params: &ModelParams) -> f64 {
    debug_assert_eq!(m.k(), params.k());
    let n = params.n() as f64;
    let product: f64 = m
        .counts()
        .iter()
        .zip(params.prior())
        .map(|(&c, &p)| falling_binomial(n * p, c))
        .product();
    product / n.powi(m.order() as i32)
}

/// `n -> infinity` limit of [`normalized_weight`]: `prod_s p_s^m_s / m_s!`.
pub fn limiting_weight(m: &AssignmentVector, prior: &[f64]) -> f64 {
    m.counts()
        .iter()
        .zip(prior)
        .map(|(&c, &p)| {
            let fact: f64 = (1..=c).map(f64::from).product();
            p.powi(c as i32) / fact
        })
        .product()
}

/// Normalized expected incident-hyperedge counts of a community, by shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile {
    pub community: usize,
    /// Neighbour shapes `m`, in enumeration order.
    pub shapes: Vec<AssignmentVector>,
    /// `mu_{m ⊕ i}` per shape.
    pub values: Vec<f64>,
    /// `R'_m` per shape (shared by every community).
    pub weights: Vec<f64>,
}

pub fn degree_profile(i: usize, params: &ModelParams) -> Result<DegreeProfile> {
    params.check_community(i)?;
    let shapes = params.neighbour_shapes();
    let weights: Vec<f64> = shapes.iter().map(|m| normalized_weight(m, params)).collect();
    let values = shapes
        .iter()
        .zip(&weights)
        .map(|(m, w)| Ok(w * params.rate(m.oplus(i)?.counts())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DegreeProfile { community: i, shapes, values, weights })
}

/// Second-order degree profile of community `i`: for each `s`, the sum of
/// `m_s * mu_{m ⊕ i}` over shapes with `m_s >= 1`.
///
/// Uses the limiting weights, so the result depends only on the prior and
/// the rates and not on `n`.
pub fn second_order_profile(i: usize, params: &ModelParams) -> Result<Vec<f64>> {
    params.check_community(i)?;
    let mut out = vec![0.0; params.k()];
    for m in params.neighbour_shapes() {
        let mu = limiting_weight(&m, params.prior()) * params.rate(m.oplus(i)?.counts());
        for (s, &c) in m.counts().iter().enumerate() {
            if c >= 1 {
                out[s] += c as f64 * mu;
            }
        }
    }
    Ok(out)
}

/// Returns the first pair `(i, j)`, `i < j`, whose second-order degree
/// profiles agree entrywise at relative tolerance `tol`, i.e. a witness that
/// the parameters lie in the degenerate set. `None` means not degenerate.
pub fn in_xi(params: &ModelParams, tol: f64) -> Option<(usize, usize)> {
    let profiles: Vec<Vec<f64>> = (0..params.k())
        .map(|i| second_order_profile(i, params).expect("community in range"))
        .collect();
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs());
    for i in 0..params.k() {
        for j in (i + 1)..params.k() {
            if profiles[i].iter().zip(&profiles[j]).all(|(&a, &b)| close(a, b)) {
                return Some((i, j));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GchResult {
    pub value: f64,
    pub t_star: f64,
    pub pair: (usize, usize),
}

/// `f(t) = sum_m t mu_i + (1-t) mu_j - mu_i^t mu_j^(1-t)`.
///
/// Zero entries follow the limit convention: `mu^0 = 1` (including `0^0`)
/// and `0^s = 0` for `s > 0`.
pub fn chernoff_objective(t: f64, mu_i: &[f64], mu_j: &[f64]) -> f64 {
    mu_i.iter()
        .zip(mu_j)
        .map(|(&a, &b)| t * a + (1.0 - t) * b - geometric_mix(t, a, b))
        .sum()
}

fn geometric_mix(t: f64, a: f64, b: f64) -> f64 {
    if t == 0.0 {
        b
    } else if t == 1.0 {
        a
    } else if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a.powf(t) * b.powf(1.0 - t)
    }
}

/// Derivative of [`chernoff_objective`] for strictly positive profiles.
fn chernoff_slope(t: f64, mu_i: &[f64], mu_j: &[f64]) -> f64 {
    mu_i.iter()
        .zip(mu_j)
        .map(|(&a, &b)| a - b - a.powf(t) * b.powf(1.0 - t) * (a / b).ln())
        .sum()
}

const GOLDEN_MAX_ITER: usize = 200;
const GOLDEN_WIDTH: f64 = 1e-13;
const GRID_STEP: f64 = 1e-4;

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_MAX_ITER {
        if hi - lo <= GOLDEN_WIDTH {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes [`chernoff_objective`] over `t in [0, 1]`, returning
/// `(t_star, value)`.
///
/// Strictly positive profiles give a concave objective: golden-section
/// search, then bisection on the sign of the derivative to pin `t_star`.
/// Profiles with zeros get a grid scan followed by a local golden search.
pub fn maximize_chernoff(mu_i: &[f64], mu_j: &[f64]) -> (f64, f64) {
    assert_eq!(mu_i.len(), mu_j.len());
    if mu_i == mu_j {
        return (0.5, 0.0);
    }
    let f = |t: f64| chernoff_objective(t, mu_i, mu_j);
    let positive = mu_i.iter().chain(mu_j).all(|&x| x > 0.0);
    if positive {
        let (tg, vg) = golden_section_max(f, 0.0, 1.0);
        // The slope is nonincreasing, nonnegative at 0 and nonpositive at 1.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..GOLDEN_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if chernoff_slope(mid, mu_i, mu_j) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tb = 0.5 * (lo + hi);
        let vb = f(tb);
        let endpoints = [(0.0, f(0.0)), (1.0, f(1.0))];
        // Near the maximum a flat objective compares at rounding level, so
        // the first-order point wins unless it is clearly worse.
        let slack = 64.0 * f64::EPSILON * vg.abs().max(1.0);
        let mut best = if vb >= vg - slack { (tb, vb) } else { (tg, vg) };
        for (t, v) in endpoints {
            if v > best.1 {
                best = (t, v);
            }
        }
        return best;
    }

    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut best = (0.0, f(0.0));
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    // Search the open neighbourhood; endpoint values were scanned above.
    let lo = (best.0 - GRID_STEP).max(0.0);
    let hi = (best.0 + GRID_STEP).min(1.0);
    let (tl, vl) = golden_section_max(f, lo, hi);
    if vl > best.1 {
        best = (tl, vl);
    }
    best
}

/// GCH divergence `D_+(i, j)` between communities `i != j`.
pub fn gch_divergence(i: usize, j: usize, params: &ModelParams) -> Result<GchResult> {
    if i == j {
        return Err(Error::SameCommunity(i));
    }
    let pi = degree_profile(i, params)?;
    let pj = degree_profile(j, params)?;
    let (t_star, value) = maximize_chernoff(&pi.values, &pj.values);
    Ok(GchResult { value, t_star, pair: (i, j) })
}

/// Minimum GCH divergence over unordered pairs. Ties go to the
/// lexicographically smallest pair.
pub fn gch_threshold(params: &ModelParams) -> Result<GchResult> {
    let profiles = (0..params.k())
        .map(|i| degree_profile(i, params))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<GchResult> = None;
    for i in 0..params.k() {
        for j in (i + 1)..params.k() {
            let (t_star, value) = maximize_chernoff(&profiles[i].values, &profiles[j].values);
            if best.is_none_or(|b| value < b.value) {
                best = Some(GchResult { value, t_star, pair: (i, j) });
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParams("need at least two communities".into()))
}
