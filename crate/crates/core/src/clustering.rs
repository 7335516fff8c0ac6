//! k-means over L2-normalized TF-IDF rows with silhouette-based selection
//! of the cluster count.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::preprocess::{SparseVec, TfIdfMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel {
    pub k: usize,
    /// Dense centroids in vocabulary space.
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub iterations: usize,
    /// Within-cluster sum of squares after each Lloyd iteration.
    pub wcss_history: Vec<f64>,
}

impl ClusterModel {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Rows scaled to unit length; all-zero rows stay zero.
pub fn normalized_rows(matrix: &TfIdfMatrix) -> Vec<SparseVec> {
    matrix
        .rows
        .iter()
        .map(|row| {
            let norm = row.norm();
            if norm == 0.0 {
                row.clone()
            } else {
                SparseVec {
                    indices: row.indices.clone(),
                    values: row.values.iter().map(|v| v / norm).collect(),
                }
            }
        })
        .collect()
}

fn sq_dist_to_centroid(x: &SparseVec, x_sq: f64, c: &[f64], c_sq: f64) -> f64 {
    let dot: f64 = x.iter().map(|(i, v)| v * c[i]).sum();
    (x_sq - 2.0 * dot + c_sq).max(0.0)
}

fn sq_dist(a: &SparseVec, b: &SparseVec) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.nnz() && j < b.nnz() {
        match a.indices[i].cmp(&b.indices[j]) {
            std::cmp::Ordering::Less => {
                acc += a.values[i] * a.values[i];
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                acc += b.values[j] * b.values[j];
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let d = a.values[i] - b.values[j];
                acc += d * d;
                i += 1;
                j += 1;
            }
        }
    }
    acc += a.values[i..].iter().map(|v| v * v).sum::<f64>();
    acc += b.values[j..].iter().map(|v| v * v).sum::<f64>();
    acc
}

fn dist(a: &SparseVec, b: &SparseVec) -> f64 {
    sq_dist(a, b).sqrt()
}

fn to_dense(x: &SparseVec, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for (i, x) in x.iter() {
        v[i] = x;
    }
    v
}

fn wcss(points: &[SparseVec], sq_norms: &[f64], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    let c_sq: Vec<f64> = centroids.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    points
        .iter()
        .zip(assignments)
        .enumerate()
        .map(|(p, (x, &a))| sq_dist_to_centroid(x, sq_norms[p], &centroids[a], c_sq[a]))
        .sum()
}

/// k-means++ seeding followed by Lloyd iterations on the L2-normalized rows.
///
/// Ties in assignment go to the lower cluster id. A cluster that loses all
/// its points is re-seeded with the point farthest from its own centroid.
pub fn kmeans(matrix: &TfIdfMatrix, k: usize, seed: u64, max_iters: usize) -> Result<ClusterModel> {
    let points = normalized_rows(matrix);
    let non_empty: Vec<usize> = (0..points.len()).filter(|&i| points[i].nnz() > 0).collect();
    if non_empty.is_empty() {
        return Err(Error::InvalidArgument("k-means on an all-zero matrix".into()));
    }
    if k < 2 || k > non_empty.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 2..={} (non-empty rows)",
            non_empty.len()
        )));
    }
    let dim = matrix.vocabulary.len();
    let sq_norms: Vec<f64> = points.iter().map(|p| p.values.iter().map(|v| v * v).sum()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++
    let mut chosen: Vec<usize> = vec![*non_empty.choose(&mut rng).expect("non-empty")];
    let mut nearest: Vec<f64> = non_empty
        .iter()
        .map(|&p| sq_dist(&points[p], &points[chosen[0]]))
        .collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut pick = None;
            for (slot, &d) in nearest.iter().enumerate() {
                if d > 0.0 && u < d {
                    pick = Some(slot);
                    break;
                }
                u -= d;
            }
            // rounding can run past the end; fall back to the last positive slot
            pick.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).expect("positive mass"))
        } else {
            let free: Vec<usize> = (0..non_empty.len()).filter(|s| !chosen.contains(&non_empty[*s])).collect();
            *free.choose(&mut rng).expect("k <= non-empty rows")
        };
        let p = non_empty[pick];
        chosen.push(p);
        for (slot, &q) in non_empty.iter().enumerate() {
            nearest[slot] = nearest[slot].min(sq_dist(&points[q], &points[p]));
        }
    }
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|&p| to_dense(&points[p], dim)).collect();

    let mut assignments = vec![usize::MAX; points.len()];
    let mut wcss_history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iters.max(1) {
        iterations += 1;
        let c_sq: Vec<f64> = centroids.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
        let assigned: Vec<(usize, f64)> = points
            .par_iter()
            .enumerate()
            .map(|(p, x)| {
                let mut best = (0, f64::INFINITY);
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = sq_dist_to_centroid(x, sq_norms[p], centroid, c_sq[c]);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .collect();
        let mut changed = false;
        for (p, &(c, _)) in assigned.iter().enumerate() {
            if assignments[p] != c {
                assignments[p] = c;
                changed = true;
            }
        }

        let mut reseeded = false;
        let mut taken = vec![false; points.len()];
        loop {
            let mut sizes = vec![0usize; k];
            for &a in &assignments {
                sizes[a] += 1;
            }
            let Some(empty) = sizes.iter().position(|&s| s == 0) else { break };
            let mut far = None::<(usize, f64)>;
            for (p, x) in points.iter().enumerate() {
                let a = assignments[p];
                if taken[p] || sizes[a] < 2 {
                    continue;
                }
                let d = sq_dist_to_centroid(x, sq_norms[p], &centroids[a], c_sq[a]);
                if far.is_none_or(|(_, best)| d > best) {
                    far = Some((p, d));
                }
            }
            let (p, _) = far.expect("k <= number of points");
            taken[p] = true;
            assignments[p] = empty;
            centroids[empty] = to_dense(&points[p], dim);
            reseeded = true;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (x, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (i, v) in x.iter() {
                sums[a][i] += v;
            }
        }
        for (c, sum) in sums.into_iter().enumerate() {
            centroids[c] = sum.into_iter().map(|s| s / counts[c] as f64).collect();
        }
        wcss_history.push(wcss(&points, &sq_norms, &centroids, &assignments));
        if !changed && !reseeded {
            break;
        }
    }

    Ok(ClusterModel {
        k,
        centroids,
        assignments,
        seed,
        iterations,
        wcss_history,
    })
}

fn cluster_count(assignments: &[usize]) -> Result<usize> {
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::InvalidArgument("silhouette needs at least two clusters".into()));
    }
    let mut seen = vec![false; k];
    for &a in assignments {
        seen[a] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument("silhouette needs every cluster non-empty".into()));
    }
    Ok(k)
}

fn point_silhouette(points: &[SparseVec], assignments: &[usize], sizes: &[usize], p: usize) -> f64 {
    let own = assignments[p];
    if sizes[own] == 1 {
        return 0.0;
    }
    let mut sums = vec![0.0; sizes.len()];
    for (q, x) in points.iter().enumerate() {
        if q != p {
            sums[assignments[q]] += dist(&points[p], x);
        }
    }
    let a = sums[own] / (sizes[own] - 1) as f64;
    let b = (0..sizes.len())
        .filter(|&c| c != own)
        .map(|c| sums[c] / sizes[c] as f64)
        .fold(f64::INFINITY, f64::min);
    let m = a.max(b);
    if m == 0.0 {
        0.0
    } else {
        (b - a) / m
    }
}

/// Mean silhouette over all rows, exact O(n²). Singleton clusters
/// contribute 0.
pub fn silhouette(matrix: &TfIdfMatrix, assignments: &[usize]) -> Result<f64> {
    let scores = silhouette_values(matrix, assignments)?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Per-row silhouette values.
pub fn silhouette_values(matrix: &TfIdfMatrix, assignments: &[usize]) -> Result<Vec<f64>> {
    if assignments.len() != matrix.n_docs() {
        return Err(Error::InvalidArgument("one assignment per row required".into()));
    }
    let k = cluster_count(assignments)?;
    let points = normalized_rows(matrix);
    let mut sizes = vec![0; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    Ok((0..points.len())
        .into_par_iter()
        .map(|p| point_silhouette(&points, assignments, &sizes, p))
        .collect())
}

/// Silhouette averaged over a seeded sample of `sample` rows (distances
/// still use every row).
pub fn silhouette_sampled(matrix: &TfIdfMatrix, assignments: &[usize], sample: usize, seed: u64) -> Result<f64> {
    if sample >= matrix.n_docs() {
        return silhouette(matrix, assignments);
    }
    let k = cluster_count(assignments)?;
    let points = normalized_rows(matrix);
    let mut sizes = vec![0; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = rand::seq::index::sample(&mut rng, points.len(), sample).into_vec();
    idx.sort_unstable();
    let total: f64 = idx
        .par_iter()
        .map(|&p| point_silhouette(&points, assignments, &sizes, p))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(total / sample as f64)
}

/// First position of the maximal score, so ties resolve to the smaller k.
fn best_index(scores: &[(usize, f64)]) -> usize {
    let mut best = 0;
    for (i, (_, s)) in scores.iter().enumerate() {
        if *s > scores[best].1 {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub best_k: usize,
    pub model: ClusterModel,
    /// (k, silhouette) for every k tried, ascending k.
    pub scores: Vec<(usize, f64)>,
    pub models: Vec<ClusterModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectOptions {
    pub max_iters: usize,
    /// Switch to sampled silhouette above this many rows.
    pub silhouette_sample: Option<usize>,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            silhouette_sample: Some(2000),
        }
    }
}

/// Fits every k in `k_range` with the same seed and keeps the one with the
/// highest silhouette; ties go to the smaller k.
pub fn select_k(matrix: &TfIdfMatrix, k_range: RangeInclusive<usize>, seed: u64) -> Result<Selection> {
    select_k_with(matrix, k_range, seed, SelectOptions::default())
}

pub fn select_k_with(
    matrix: &TfIdfMatrix,
    k_range: RangeInclusive<usize>,
    seed: u64,
    options: SelectOptions,
) -> Result<Selection> {
    if k_range.is_empty() {
        return Err(Error::InvalidArgument("empty k range".into()));
    }
    let ks: Vec<usize> = k_range.collect();
    let fitted: Vec<(ClusterModel, f64)> = ks
        .par_iter()
        .map(|&k| {
            let model = kmeans(matrix, k, seed, options.max_iters)?;
            let score = match options.silhouette_sample {
                Some(n) if n < matrix.n_docs() => silhouette_sampled(matrix, &model.assignments, n, seed)?,
                _ => silhouette(matrix, &model.assignments)?,
            };
            Ok((model, score))
        })
        .collect::<Result<_>>()?;
    let scores: Vec<(usize, f64)> = ks.iter().copied().zip(fitted.iter().map(|f| f.1)).collect();
    let best = best_index(&scores);
    let models: Vec<ClusterModel> = fitted.into_iter().map(|f| f.0).collect();
    Ok(Selection {
        best_k: ks[best],
        model: models[best].clone(),
        scores,
        models,
    })
}


#[cfg(test)]
mod tests {
    use super::testutil::blobs;
    use super::*;
    use crate::preprocess::Vocabulary;

    fn matrix_from(points: &[Vec<f64>]) -> TfIdfMatrix {
        let dim = points[0].len();
        let vocab = Vocabulary {
            terms: (0..dim).map(|d| format!("t{d}")).collect(),
            doc_freq: vec![1; dim],
        };
        TfIdfMatrix::from_rows(vocab, points.iter().map(|p| SparseVec::from_dense(p)).collect()).unwrap()
    }

    #[test]
    fn separated_groups_recovered_exactly() {
        let (m, labels) = blobs(15, &[0, 3], 6, 0.05, 7);
        let model = kmeans(&m, 2, 1, 100).unwrap();
        let flip = model.assignments[0] != labels[0];
        for (a, l) in model.assignments.iter().zip(&labels) {
            assert_eq!(*a == 1, (*l == 1) != flip);
        }
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let m = matrix_from(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let model = kmeans(&m, 3, 4, 10).unwrap();
        let mut a = model.assignments.clone();
        a.sort_unstable();
        assert_eq!(a, vec![0, 1, 2]);
        assert!(model.wcss_history.last().unwrap().abs() < 1e-12);
        assert_eq!(silhouette(&m, &model.assignments).unwrap(), 0.0);
    }

    #[test]
    fn kmeans_is_deterministic_and_checks_range() {
        let (m, _) = blobs(10, &[0, 2, 4], 6, 0.2, 3);
        assert_eq!(kmeans(&m, 3, 9, 50).unwrap(), kmeans(&m, 3, 9, 50).unwrap());
        assert!(kmeans(&m, 1, 9, 50).is_err());
        assert!(kmeans(&m, 31, 9, 50).is_err());
        let zero = TfIdfMatrix::from_rows(m.vocabulary.clone(), vec![SparseVec::default(); 4]).unwrap();
        assert!(kmeans(&zero, 2, 0, 10).is_err());
    }

    #[test]
    fn silhouette_examples() {
        let (m, labels) = blobs(20, &[0, 3], 6, 0.03, 11);
        assert!(silhouette(&m, &labels).unwrap() > 0.9);

        let (m, _) = blobs(40, &[2], 6, 0.2, 12);
        let split: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let s = silhouette(&m, &split).unwrap();
        assert!(s < 0.25, "arbitrary split scored {s}");

        assert!(silhouette(&m, &vec![0; 40]).is_err());
        let mut gap = vec![0; 40];
        gap[0] = 2;
        assert!(silhouette(&m, &gap).is_err());
    }

    #[test]
    fn sampled_silhouette_close_to_exact() {
        let (m, labels) = blobs(30, &[0, 3, 5], 6, 0.1, 2);
        let exact = silhouette(&m, &labels).unwrap();
        let approx = silhouette_sampled(&m, &labels, 45, 1).unwrap();
        assert!((exact - approx).abs() < 0.1);
    }

    #[test]
    fn select_k_examples() {
        let (m, _) = blobs(20, &[0, 3, 6], 8, 0.08, 5);
        let sel = select_k(&m, 2..=6, 3).unwrap();
        assert_eq!(sel.best_k, 3);
        assert_eq!(sel.scores.len(), 5);

        let sel = select_k(&m, 4..=4, 3).unwrap();
        assert_eq!(sel.best_k, 4);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(select_k(&m, empty, 3).is_err());
    }

    #[test]
    fn ties_go_to_smaller_k() {
        assert_eq!(best_index(&[(2, 0.5), (3, 0.5), (4, 0.1)]), 0);
        assert_eq!(best_index(&[(2, 0.1), (3, 0.5), (4, 0.5)]), 1);
    }

    #[test]
    fn lloyd_descent_is_monotone() {
        for seed in 0..10 {
            let (m, _) = blobs(25, &[0, 1, 2, 3], 6, 0.3, seed);
            let model = kmeans(&m, 4, seed, 100).unwrap();
            for w in model.wcss_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{:?}", model.wcss_history);
            }
        }
    }
}
