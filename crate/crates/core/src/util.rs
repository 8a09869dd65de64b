//! Deterministic sample generation. Reports must be byte-identical for a
//! fixed seed, so sampling uses a self-contained splitmix64 stream rather
//! than a platform RNG.

use crate::green::{cone_distance, ConePoint};

/// splitmix64: tiny, full-period, identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// uniform in [0, 1)
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (self.uniform(lo.ln(), hi.ln())).exp()
    }
}

/// Point pairs on the cone over S^1/Z_k with radii in [r_lo, r_hi], used by
/// the heat-kernel comparison.
pub fn sample_heat_pairs(
    k: u64,
    count: usize,
    seed: u64,
    r_lo: f64,
    r_hi: f64,
) -> Vec<(ConePoint, ConePoint)> {
    let mut rng = SplitMix64::new(seed);
    let period = 2.0 * std::f64::consts::PI / k as f64;
    (0..count)
        .map(|_| {
            let a = ConePoint::new(rng.uniform(r_lo, r_hi), rng.uniform(0.0, period));
            let b = ConePoint::new(rng.uniform(r_lo, r_hi), rng.uniform(0.0, period));
            (a, b)
        })
        .collect()
}

/// Pairs with geodesic distance in [d_lo, d_hi] and radii in (0, 1], biased
/// log-uniformly in distance so the near-diagonal regime is well covered.
pub fn sample_green_pairs(
    k: u64,
    count: usize,
    seed: u64,
    d_lo: f64,
    d_hi: f64,
) -> Vec<(ConePoint, ConePoint)> {
    let mut rng = SplitMix64::new(seed);
    let period = 2.0 * std::f64::consts::PI / k as f64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = rng.log_uniform(d_lo, d_hi);
        let r1 = rng.uniform(0.05f64.max(d * 0.51), 1.0);
        let beta = rng.uniform(0.0, std::f64::consts::PI);
        let dr = d * beta.cos();
        let arc = d * beta.sin();
        let r2 = r1 + dr;
        if !(0.02..=1.0).contains(&r2) {
            continue;
        }
        let dtheta = arc / r1.max(r2);
        if dtheta > period / 2.0 {
            continue;
        }
        let theta1 = rng.uniform(0.0, period);
        let theta2 = (theta1 + dtheta).rem_euclid(period);
        let a = ConePoint::new(r1, theta1);
        let b = ConePoint::new(r2, theta2);
        let dist = cone_distance(k, a, b);
        if dist >= d_lo && dist <= d_hi {
            out.push((a, b));
        }
    }
    out
}
