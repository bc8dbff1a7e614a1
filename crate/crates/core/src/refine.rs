//! Stage 2: local MAP refinement.
//!
//! Each node is relabeled independently given the second sub-hypergraph and
//! the Stage-1 labels of every other node. Incident hyperedges are grouped
//! by the assignment vector of their other `d - 1` members; with `x_m`
//! present out of `D_m` candidates of shape `m`, community `i` scores
//!
//! ```text
//! ln p_i + sum_m [ x_m ln q_{m⊕i} + (D_m - x_m) ln(1 - q_{m⊕i}) ]
//! ```
//!
//! where `q_T = Q_T ln n / n^(d-1)`. The candidate totals `D_m` are not
//! observed (only present hyperedges are split), so they are replaced by
//! their expectation: the exact number of `(d-1)`-subsets of shape `m`
//! times `1 - gamma_n / ln n`.

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, LabelVector};
use crate::model::{assignment_count, assignment_rank, binomial, enumerate_assignments, ModelParams};

/// Present and expected-total hyperedge counts around one node, by shape.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidentCounts {
    pub node: usize,
    /// `x_{v,m}`, indexed by neighbour-shape rank.
    pub present: Vec<u64>,
    /// `D_{v,m}`, indexed by neighbour-shape rank.
    pub totals: Vec<f64>,
}

fn check_inputs(g2: &Hypergraph, labels: &LabelVector) -> Result<()> {
    if g2.n() != labels.len() {
        return Err(Error::LengthMismatch { left: g2.n(), right: labels.len() });
    }
    Ok(())
}

/// `x_{v,m}` for node `v`: incident edges of `g2` grouped by the labels of
/// their other members.
pub fn count_incident(g2: &Hypergraph, labels: &LabelVector, v: usize) -> Result<Vec<u64>> {
    check_inputs(g2, labels)?;
    if v >= g2.n() {
        return Err(Error::NodeOutOfRange { index: v, n: g2.n() });
    }
    let k = labels.k();
    let mut present = vec![0u64; assignment_count(k, g2.d() as u32 - 1)];
    let mut shape = vec![0u32; k];
    for e in g2.edges().filter(|e| e.contains(&(v as u32))) {
        classify_others(e, v as u32, labels.labels(), &mut shape);
        present[assignment_rank(&shape)] += 1;
    }
    Ok(present)
}

/// [`count_incident`] for every node in one pass over the edges.
pub fn count_incident_all(g2: &Hypergraph, labels: &LabelVector) -> Result<Vec<Vec<u64>>> {
    check_inputs(g2, labels)?;
    let k = labels.k();
    let shapes = assignment_count(k, g2.d() as u32 - 1);
    let mut present = vec![vec![0u64; shapes]; g2.n()];
    let mut shape = vec![0u32; k];
    for e in g2.edges() {
        for &v in e {
            classify_others(e, v, labels.labels(), &mut shape);
            present[v as usize][assignment_rank(&shape)] += 1;
        }
    }
    Ok(present)
}

fn classify_others(edge: &[u32], v: u32, labels: &[usize], shape: &mut [u32]) {
    shape.iter_mut().for_each(|c| *c = 0);
    for &u in edge.iter().filter(|&&u| u != v) {
        shape[labels[u as usize]] += 1;
    }
}

/// Number of `(d-1)`-subsets of `[n] \ {v}` realizing each shape, from the
/// label multiplicities.
pub fn subset_counts(labels: &LabelVector, v: usize, d: usize) -> Vec<u128> {
    let mut available: Vec<u64> = labels.community_sizes().iter().map(|&s| s as u64).collect();
    available[labels.get(v)] -= 1;
    enumerate_assignments(labels.k(), d as u32 - 1)
        .iter()
        .map(|m| {
            m.counts()
                .iter()
                .zip(&available)
                .map(|(&c, &a)| binomial(a, c as u64))
                .product()
        })
        .collect()
}

/// `D_{v,m} = (1 - gamma_n / ln n)` times the subset count of shape `m`.
pub fn effective_totals(labels: &LabelVector, v: usize, d: usize, gamma_n: f64) -> Vec<f64> {
    let keep = 1.0 - gamma_n / (labels.len() as f64).ln();
    subset_counts(labels, v, d).iter().map(|&c| keep * c as f64).collect()
}

/// Unnormalized log posterior of every community for one node.
/// Impossible communities score `-inf`.
pub fn log_posterior(counts: &IncidentCounts, params: &ModelParams) -> Result<Vec<f64>> {
    let shapes = params.neighbour_shapes();
    if counts.present.len() != shapes.len() || counts.totals.len() != shapes.len() {
        return Err(Error::LengthMismatch { left: counts.present.len(), right: shapes.len() });
    }
    (0..params.k())
        .map(|i| {
            let mut score = params.prior()[i].ln();
            for (idx, m) in shapes.iter().enumerate() {
                let q = params.edge_probability(m.oplus(i)?.counts());
                let x = counts.present[idx] as f64;
                let absent = counts.totals[idx] - x;
                score += xlogy(x, q) + xlogy(absent, 1.0 - q);
            }
            Ok(score)
        })
        .collect()
}

// x ln y with 0 ln 0 = 0.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::NEG_INFINITY
    } else {
        x * y.ln()
    }
}

/// MAP community for one node; ties go to the smallest index.
pub fn map_refine(counts: &IncidentCounts, params: &ModelParams) -> Result<usize> {
    let scores = log_posterior(counts, params)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s == f64::NEG_INFINITY {
            continue;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoFeasibleCommunity(counts.node))
}

/// One refinement pass over all nodes against the fixed `initial` labels.
pub fn refine_all(
    g2: &Hypergraph,
    initial: &LabelVector,
    params: &ModelParams,
    gamma_n: f64,
) -> Result<LabelVector> {
    if initial.k() != params.k() {
        return Err(Error::InvalidParams(format!(
            "labels use k = {}, model has k = {}",
            initial.k(),
            params.k()
        )));
    }
    let present = count_incident_all(g2, initial)?;
    // Totals only depend on the node's own label.
    let mut totals_by_label: Vec<Option<Vec<f64>>> = vec![None; params.k()];
    let mut out = Vec::with_capacity(g2.n());
    for (v, present) in present.into_iter().enumerate() {
        let own = initial.get(v);
        let totals = totals_by_label[own]
            .get_or_insert_with(|| effective_totals(initial, v, params.d(), gamma_n))
            .clone();
        let counts = IncidentCounts { node: v, present, totals };
        out.push(map_refine(&counts, params)?);
    }
    LabelVector::new(out, params.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_node_counts_zero() {
        let g = Hypergraph::new(5, 3, vec![vec![1, 2, 3]]).unwrap();
        let z = LabelVector::new(vec![0, 0, 1, 1, 0], 2).unwrap();
        assert_eq!(count_incident(&g, &z, 0).unwrap(), vec![0, 0, 0]);
        assert_eq!(count_incident(&g, &z, 4).unwrap(), vec![0, 0, 0]);
        assert!(count_incident(&g, &z, 5).is_err());
    }

    #[test]
    fn classification_example() {
        // node 1 (0-based 0) with edges {1,2,3} (labels 1,1) and {1,2,4} (labels 1,2)
        let g = Hypergraph::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let z = LabelVector::new(vec![0, 0, 0, 1], 2).unwrap();
        // shapes (2,0), (1,1), (0,2)
        assert_eq!(count_incident(&g, &z, 0).unwrap(), vec![1, 1, 0]);
        let all = count_incident_all(&g, &z).unwrap();
        for (v, row) in all.iter().enumerate() {
            assert_eq!(row, &count_incident(&g, &z, v).unwrap());
        }
    }

    #[test]
    fn totals_single_class() {
        let z = LabelVector::constant(20, 0, 1).unwrap();
        let gamma = 1.3;
        let keep = 1.0 - gamma / (20f64).ln();
        let t = effective_totals(&z, 4, 3, gamma);
        assert_eq!(t.len(), 1);
        assert!((t[0] - keep * 171.0).abs() < 1e-9);
    }

    #[test]
    fn totals_two_classes() {
        let z = LabelVector::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 2).unwrap();
        assert_eq!(subset_counts(&z, 0, 3), vec![6, 20, 10]);
        assert_eq!(subset_counts(&z, 7, 3), vec![10, 20, 6]);
        assert_eq!(subset_counts(&z, 0, 3).iter().sum::<u128>(), binomial(9, 2));
    }

    fn two_class_params(q_same: f64, q_cross: f64) -> ModelParams {
        // d = 2, n chosen so edge_scale = ln n / n is known
        ModelParams::from_fn(1000, 2, 2, vec![0.5, 0.5], |t| match t {
            [2, 0] | [0, 2] => q_same,
            _ => q_cross,
        })
        .unwrap()
    }

    #[test]
    fn identical_rates_tie_to_smallest_index() {
        let params = two_class_params(5.0, 5.0);
        let counts = IncidentCounts { node: 0, present: vec![3, 7], totals: vec![400.0, 500.0] };
        assert_eq!(map_refine(&counts, &params).unwrap(), 0);
    }

    #[test]
    fn binomial_likelihood_prefers_matching_rate() {
        // single informative class m = (1,0): q_{m⊕1} = 0.3, q_{m⊕2} = 0.05
        let scale = (1000f64).ln() / 1000.0;
        let params = ModelParams::from_fn(1000, 2, 2, vec![0.5, 0.5], |t| match t {
            [2, 0] => 0.3 / scale,
            [1, 1] => 0.05 / scale,
            _ => 0.0,
        })
        .unwrap();
        let counts = IncidentCounts { node: 0, present: vec![30, 0], totals: vec![100.0, 0.0] };
        let scores = log_posterior(&counts, &params).unwrap();
        // independent evaluation of both binomial log-likelihoods
        let ll = |q: f64| 30.0 * q.ln() + 70.0 * (1.0 - q).ln();
        assert!((scores[0] - (0.5f64.ln() + ll(0.3))).abs() < 1e-9);
        assert!((scores[1] - (0.5f64.ln() + ll(0.05))).abs() < 1e-9);
        assert_eq!(map_refine(&counts, &params).unwrap(), 0);
    }

    #[test]
    fn impossible_candidates_are_skipped() {
        let params = ModelParams::from_fn(1000, 2, 2, vec![0.5, 0.5], |t| match t {
            [1, 1] => 0.0,
            _ => 2.0,
        })
        .unwrap();
        // an edge to community 1 rules out community 2 (q_{(1,1)} = 0)
        let counts = IncidentCounts { node: 0, present: vec![1, 0], totals: vec![10.0, 10.0] };
        assert_eq!(map_refine(&counts, &params).unwrap(), 0);
        let both = IncidentCounts { node: 0, present: vec![1, 1], totals: vec![10.0, 10.0] };
        assert!(matches!(map_refine(&both, &params), Err(Error::NoFeasibleCommunity(0))));
    }

    #[test]
    fn constant_rates_follow_prior() {
        let params = ModelParams::from_fn(200, 3, 2, vec![0.2, 0.5, 0.3], |_| 4.0).unwrap();
        let z = LabelVector::new((0..200).map(|v| v % 3).collect(), 3).unwrap();
        let g = Hypergraph::new(200, 2, (0..199).map(|v| vec![v, v + 1])).unwrap();
        let out = refine_all(&g, &z, &params, 1.5).unwrap();
        assert!(out.labels().iter().all(|&l| l == 1));
    }

    #[test]
    fn prior_scale_invariance() {
        // scaling p by a constant shifts every score by the same amount
        let a = two_class_params(9.0, 1.0);
        let counts = IncidentCounts { node: 0, present: vec![4, 1], totals: vec![450.0, 500.0] };
        let sa = log_posterior(&counts, &a).unwrap();
        let shifted: Vec<f64> = sa.iter().map(|s| s + 3f64.ln()).collect();
        assert_eq!(
            map_refine(&counts, &a).unwrap(),
            shifted.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).unwrap().0
        );
    }

    #[test]
    fn more_evidence_never_flips_toward_weaker_rate() {
        let params = two_class_params(9.0, 1.0);
        // class m = (1,0): q_{m⊕1} = 9 s > q_{m⊕2} = s
        let mut last = 0;
        for x in 0..40 {
            let counts = IncidentCounts { node: 0, present: vec![x, 2], totals: vec![450.0, 500.0] };
            let d = map_refine(&counts, &params).unwrap();
            assert!(!(last == 0 && d == 1 && x > 0), "flipped to 2 at x = {x}");
            last = d;
        }
    }
}
