//! Lloyd's algorithm with k-means++ seeding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub assignments: Vec<usize>,
    pub centroids: DenseMatrix,
    pub inertia: f64,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// k-means++ seeding: first centroid uniform, then D^2 sampling.
fn seed_plus_plus<R: Rng>(points: &DenseMatrix, k: usize, rng: &mut R) -> Vec<usize> {
    let n = points.n_rows();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(chosen[0])))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            // all points coincide with an existing centroid
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, slot) in d2.iter_mut().enumerate() {
            let d = sq_dist(points.row(i), points.row(next));
            if d < *slot {
                *slot = d;
            }
        }
    }
    chosen
}

/// Lloyd iterations until the max centroid displacement drops below `tol`
/// or `max_iter` passes. Empty clusters are reseeded to the point farthest
/// from its assigned centroid.
pub fn kmeans<R: Rng>(
    z: &DenseMatrix,
    k: usize,
    rng: &mut R,
    max_iter: usize,
    tol: f64,
) -> Result<ClusteringResult> {
    let n = z.n_rows();
    let d = z.n_cols();
    if k == 0 {
        return Err(Error::InvalidArgument("kmeans: k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "kmeans: k = {k} exceeds the number of points {n}"
        )));
    }

    let seeds = seed_plus_plus(z, k, rng);
    let mut centroids = DenseMatrix::zeros(k, d);
    for (c, &p) in seeds.iter().enumerate() {
        centroids.row_mut(c).copy_from_slice(z.row(p));
    }

    let mut assignments = vec![0usize; n];
    for _ in 0..max_iter {
        // assignment step
        for (i, a) in assignments.iter_mut().enumerate() {
            let row = z.row(i);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let dist = sq_dist(row, centroids.row(c));
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            *a = best;
        }

        // update step
        let mut sums = DenseMatrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, &a) in assignments.iter().enumerate() {
            counts[a] += 1;
            for (s, &v) in sums.row_mut(a).iter_mut().zip(z.row(i)) {
                *s += v;
            }
        }
        // reseed empty clusters to the currently farthest point
        let mut stolen = vec![false; n];
        let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        for c in empties {
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if stolen[i] {
                    continue;
                }
                let dist = sq_dist(z.row(i), centroids.row(assignments[i]));
                if dist > far_d {
                    far_d = dist;
                    far = Some(i);
                }
            }
            let i = far.expect("k <= n leaves a point to steal");
            stolen[i] = true;
            counts[c] = 1;
            sums.row_mut(c).copy_from_slice(z.row(i));
        }

        let mut shift: f64 = 0.0;
        for (c, &count) in counts.iter().enumerate() {
            let inv = 1.0 / count as f64;
            let mut disp = 0.0;
            for (cv, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                let new = s * inv;
                let dd = new - *cv;
                disp += dd * dd;
                *cv = new;
            }
            shift = shift.max(disp.sqrt());
        }
        if shift < tol {
            break;
        }
    }

    // final assignment against the final centroids
    let mut inertia = 0.0;
    for (i, a) in assignments.iter_mut().enumerate() {
        let row = z.row(i);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let dist = sq_dist(row, centroids.row(c));
            if dist < best_d {
                best_d = dist;
                best = c;
            }
        }
        *a = best;
        inertia += best_d;
    }

    Ok(ClusteringResult {
        assignments,
        centroids,
        inertia,
    })
}
