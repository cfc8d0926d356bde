//! Probe directions for pointwise identity checks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{from_f64, Rational};
use crate::vector::Vector;

/// Scale applied to random unit directions before rounding to integers.
pub const RANDOM_SCALE: f64 = 1000.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All nonzero vectors with entries in `{-1, 0, 1}`.
pub fn sign_patterns(n: usize) -> Vec<Vector> {
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|mut k| {
            Vector::from_ints(
                &(0..n)
                    .map(|_| {
                        let d = (k % 3) as i64 - 1;
                        k /= 3;
                        d
                    })
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|v| !v.is_zero())
        .collect()
}

/// `e_i + e_j` and `e_i - e_j` for `i < j`.
pub fn pair_vectors(n: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut plus = vec![0i64; n];
            plus[i] = 1;
            plus[j] = 1;
            let mut minus = plus.clone();
            minus[j] = -1;
            out.push(Vector::from_ints(&plus));
            out.push(Vector::from_ints(&minus));
        }
    }
    out
}

/// The four-dimensional witnesses used in the sublinearity counterexample.
pub fn special_vectors(n: usize) -> Vec<Vector> {
    if n != 4 {
        return Vec::new();
    }
    [[1, 3, 3, 2], [1, 3, 2, 3], [2, 6, 5, 5]].iter().map(|v| Vector::from_ints(v)).collect()
}

/// A seeded direction close to uniform on the sphere, scaled and rounded to integers.
pub fn random_direction(rng: &mut impl Rng, n: usize) -> Vector {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        let v = Vector(
            g.iter()
                .map(|c| from_f64((c / norm * RANDOM_SCALE).round()).unwrap_or_else(|_| Rational::from_integer(0.into())))
                .collect(),
        );
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn random_directions(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut r = rng(seed);
    (0..count).map(|_| random_direction(&mut r, n)).collect()
}

/// The combinatorial probe set: sign patterns, pair vectors and special vectors, deduplicated.
pub fn combinatorial_probes(n: usize) -> Vec<Vector> {
    let mut set: BTreeSet<Vector> = sign_patterns(n).into_iter().collect();
    set.extend(pair_vectors(n));
    set.extend(special_vectors(n));
    set.into_iter().collect()
}

/// Combinatorial probes followed by `random` seeded integer directions.
pub fn probe_set(n: usize, random: usize, seed: u64) -> Vec<Vector> {
    let mut out = combinatorial_probes(n);
    out.extend(random_directions(n, random, seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(sign_patterns(3).len(), 26);
        assert_eq!(sign_patterns(4).len(), 80);
        assert_eq!(pair_vectors(4).len(), 12);
        assert!(combinatorial_probes(4).contains(&Vector::from_ints(&[2, 6, 5, 5])));
    }

    #[test]
    fn seeded_directions_repeat() {
        let a = random_directions(3, 20, 7);
        let b = random_directions(3, 20, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_directions(3, 20, 8));
        for v in &a {
            let norm: f64 = v.to_f64().iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - RANDOM_SCALE).abs() < 2.0);
        }
    }
}
