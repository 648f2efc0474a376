//! Seeded sampling. All suites draw points from ChaCha8 seeded with a `u64`,
//! so identical seeds give identical points on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points with every coordinate uniform in `[lo, hi)`.
pub fn box_points(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<[f64; 4]> {
    (0..n).map(|_| std::array::from_fn(|_| rng.random_range(lo..hi))).collect()
}

/// `n` points with per-axis ranges.
pub fn ranged_points(rng: &mut ChaCha8Rng, n: usize, ranges: [(f64, f64); 4]) -> Vec<[f64; 4]> {
    (0..n).map(|_| std::array::from_fn(|k| rng.random_range(ranges[k].0..ranges[k].1))).collect()
}

/// Line-space chart points with `|xi| < xi_max` and `|eta| < eta_max`.
pub fn line_points(rng: &mut ChaCha8Rng, n: usize, xi_max: f64, eta_max: f64) -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p: [f64; 4] = std::array::from_fn(|k| {
            let m = if k < 2 { xi_max } else { eta_max };
            rng.random_range(-m..m)
        });
        if p[0].hypot(p[1]) < xi_max && p[2].hypot(p[3]) < eta_max {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let a = box_points(&mut rng(42), 5, -1.0, 1.0);
        let b = box_points(&mut rng(42), 5, -1.0, 1.0);
        assert_eq!(a, b);
        let c = box_points(&mut rng(43), 5, -1.0, 1.0);
        assert_ne!(a, c);
    }

    #[test]
    fn line_points_respect_bounds() {
        for p in line_points(&mut rng(7), 50, 0.9, 1.0) {
            assert!(p[0].hypot(p[1]) < 0.9);
        }
    }
}
