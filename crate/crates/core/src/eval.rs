//! Misclassification proportion under the best relabeling of communities.

use crate::error::{Error, Result};
use crate::hypergraph::LabelVector;

/// Above this many communities the permutation search switches from
/// enumeration to the Hungarian algorithm.
pub const BRUTE_FORCE_MAX_K: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub misclassification: f64,
    /// `best_permutation[true_label] = estimated_label`.
    pub best_permutation: Vec<usize>,
    pub exact: bool,
    /// `confusion[a][b]`: nodes estimated `a` whose true label is `b`.
    pub confusion: Vec<Vec<u64>>,
}

pub fn confusion_matrix(z_hat: &LabelVector, z: &LabelVector) -> Result<Vec<Vec<u64>>> {
    if z_hat.len() != z.len() {
        return Err(Error::LengthMismatch { left: z_hat.len(), right: z.len() });
    }
    let k = z_hat.k().max(z.k());
    let mut confusion = vec![vec![0u64; k]; k];
    for (&a, &b) in z_hat.labels().iter().zip(z.labels()) {
        confusion[a][b] += 1;
    }
    Ok(confusion)
}

/// `min over permutations pi of (1/n) #{v : z_hat_v != pi(z_v)}`.
pub fn misclassification(z_hat: &LabelVector, z: &LabelVector) -> Result<RecoveryReport> {
    let confusion = confusion_matrix(z_hat, z)?;
    let (best_permutation, agreement) = if confusion.len() <= BRUTE_FORCE_MAX_K {
        best_permutation_brute_force(&confusion)
    } else {
        best_permutation_assignment(&confusion)
    };
    let n = z.len() as u64;
    let misclassification = if n == 0 { 0.0 } else { (n - agreement) as f64 / n as f64 };
    Ok(RecoveryReport {
        misclassification,
        best_permutation,
        exact: agreement == n,
        confusion,
    })
}

/// Maximizes `sum_b confusion[pi(b)][b]` by enumerating every permutation
/// in lexicographic order; the first maximizer wins.
pub fn best_permutation_brute_force(confusion: &[Vec<u64>]) -> (Vec<usize>, u64) {
    let k = confusion.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let score = |p: &[usize]| (0..k).map(|b| confusion[p[b]][b]).sum::<u64>();
    let mut best = (perm.clone(), score(&perm));
    while next_permutation(&mut perm) {
        let s = score(&perm);
        if s > best.1 {
            best = (perm.clone(), s);
        }
    }
    best
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Same objective as [`best_permutation_brute_force`], solved as a maximum
/// weight assignment with the O(k^3) Hungarian algorithm.
pub fn best_permutation_assignment(confusion: &[Vec<u64>]) -> (Vec<usize>, u64) {
    let k = confusion.len();
    if k == 0 {
        return (Vec::new(), 0);
    }
    let max = confusion.iter().flatten().copied().max().unwrap_or(0) as i64;
    // Rows: true labels b; columns: estimated labels a; minimize max - weight.
    let cost = |b: usize, a: usize| max - confusion[a][b] as i64;

    // Potentials formulation, 1-based with a virtual column 0.
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut col0 = 0usize;
        let mut min_v = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = i64::MAX;
            let mut col1 = 0usize;
            for col in 1..=k {
                if used[col] {
                    continue;
                }
                let cur = cost(r - 1, col - 1) - u[r] - v[col];
                if cur < min_v[col] {
                    min_v[col] = cur;
                    way[col] = col0;
                }
                if min_v[col] < delta {
                    delta = min_v[col];
                    col1 = col;
                }
            }
            for col in 0..=k {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_v[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; k];
    for col in 1..=k {
        perm[owner[col] - 1] = col - 1;
    }
    let agreement = (0..k).map(|b| confusion[perm[b]][b]).sum();
    (perm, agreement)
}
