//! Deterministic low-discrepancy sampling of chart boxes.

/// How a verifier walks a chart: how many points, which seed, and the
/// absolute residual tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for Sampling {
    fn default() -> Sampling {
        Sampling {
            count: 100,
            seed: 42,
            tol: 1e-9,
        }
    }
}

impl Sampling {
    pub fn new(count: usize, seed: u64, tol: f64) -> Sampling {
        Sampling { count, seed, tol }
    }

    pub fn with_tol(self, tol: f64) -> Sampling {
        Sampling { tol, ..self }
    }
}

/// Primes used as Halton bases, one per coordinate.
const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse of `index` in base `base`, in (0, 1).
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut fraction = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * fraction;
        index /= base;
        fraction /= base as f64;
    }
    result
}

/// Halton points inside `box_` (per-coordinate closed intervals), shifted by
/// `seed`. The same `(seed, count, box_)` always yields the same points; the
/// leading indices are skipped so early points do not sit on box edges.
pub fn sample_box(box_: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(
        box_.len() <= PRIMES.len(),
        "sampling supports up to {} dimensions",
        PRIMES.len()
    );
    let offset = 20 + seed.wrapping_mul(7919) % 100_003;
    (0..count as u64)
        .map(|k| {
            box_.iter()
                .enumerate()
                .map(|(d, &(lo, hi))| {
                    let u = radical_inverse(offset + k, PRIMES[d]);
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_deterministic_and_inside_the_box() {
        let box_ = [(-1.0, 1.0), (0.25, 0.75)];
        let a = sample_box(&box_, 50, 42);
        let b = sample_box(&box_, 50, 42);
        assert_eq!(a, b);
        for p in &a {
            assert!(p[0] >= -1.0 && p[0] <= 1.0);
            assert!(p[1] >= 0.25 && p[1] <= 0.75);
        }
    }

    #[test]
    fn different_seeds_shift_the_sequence() {
        let box_ = [(0.0, 1.0)];
        assert_ne!(sample_box(&box_, 10, 1), sample_box(&box_, 10, 2));
    }

    #[test]
    fn points_spread_over_the_box() {
        let box_ = [(0.0, 1.0)];
        let pts = sample_box(&box_, 64, 0);
        let below = pts.iter().filter(|p| p[0] < 0.5).count();
        assert!((20..=44).contains(&below), "badly unbalanced: {below}/64");
    }
}
