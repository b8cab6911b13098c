use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
}

/// Lloyd's algorithm with seeded k-means++ initialization.
///
/// Ties in the nearest-centroid assignment break to the lowest cluster
/// index, so the partition is deterministic given the seed. Returns the
/// cluster index per point.
pub fn kmeans(points: &[Vec<f64>], cfg: &KMeansConfig) -> Result<Vec<usize>> {
    let n = points.len();
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::config(format!(
            "k must be in 1..={n}, got {}",
            cfg.k
        )));
    }
    if cfg.k == 1 {
        return Ok(vec![0; n]);
    }
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(cfg.k);
    centroids.push(points[rng.gen_range(0..n)].clone());
    let mut dist2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < cfg.k {
        let total: f64 = dist2.iter().sum();
        let next = if total <= 0.0 {
            // All remaining points coincide with a centroid; pick uniformly.
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, d) in dist2.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centroids.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            let d = sq_dist(p, centroids.last().unwrap());
            if d < dist2[i] {
                dist2[i] = d;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..cfg.max_iters {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (i, p) in points.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, v) in sums[assignment[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..cfg.k {
            if counts[c] > 0 {
                for s in &mut sums[c] {
                    *s /= counts[c] as f64;
                }
                centroids[c] = std::mem::take(&mut sums[c]);
            }
            // Empty clusters keep their previous centroid.
        }
    }
    Ok(assignment)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
