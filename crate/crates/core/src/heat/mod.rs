//! Heat kernels on the flat cone R^2/Z_k: the per-mode radial construction
//! summed over invariant Fourier modes, the exact image sum of the global
//! quotient, and their pointwise comparison away from the tip.

pub mod radial;

pub use radial::{
    bessel_mode_kernel, mode_heat_radial, RadialBoundary, RadialHeatSolver, SolverConfig,
};

use rayon::prelude::*;

use crate::cone::ConeIndices;
use crate::error::{invalid, Result};
use crate::green::ConePoint;
use crate::spectrum::{LinkSpectrum, ModeKind};
use crate::special::bessel_i_scaled;

/// Exact heat kernel of R^2/Z_k at degree 0 by the method of images:
/// (4 pi t)^{-1} sum over the k rotations of exp(-|g x1 - x2|^2 / 4t).
pub fn orbifold_image_kernel(k: u64, t: f64, x1: ConePoint, x2: ConePoint) -> f64 {
    assert!(t > 0.0, "time must be positive");
    let dtheta = x1.theta - x2.theta;
    let mut sum = 0.0;
    for j in 0..k {
        let ang = dtheta + 2.0 * std::f64::consts::PI * j as f64 / k as f64;
        let d2 = x1.r * x1.r + x2.r * x2.r - 2.0 * x1.r * x2.r * ang.cos();
        sum += (-d2 / (4.0 * t)).exp();
    }
    sum / (4.0 * std::f64::consts::PI * t)
}

/// Number of invariant Fourier modes needed before the closed-form envelope
/// of the discarded tail falls below 1e-11.
fn mode_truncation(k: u64, t_min: f64, z_max: f64) -> usize {
    let circumference = 2.0 * std::f64::consts::PI / k as f64;
    let scale = 1.0 / (t_min * circumference);
    let mut n = 1usize;
    loop {
        let nu = (k * n as u64) as f64;
        let env = scale * bessel_i_scaled(nu, z_max);
        if env < 1e-11 || n > 2000 {
            return n + 2;
        }
        n += 1;
    }
}

/// Mode-sum heat kernel on the infinite flat cone over S^1/Z_k: the n-th
/// invariant mode (eigenvalue (k n)^2) solved radially, paired with its
/// angular factor. Truncation follows the closed-form tail envelope.
pub fn cone_mode_sum_kernel(
    k: u64,
    t: f64,
    x1: ConePoint,
    x2: ConePoint,
    config: SolverConfig,
) -> Result<f64> {
    let grid = cone_mode_sum_grid(k, &[t], &[(x1, x2)], config)?;
    Ok(grid[0][0])
}

/// Batch mode-sum values for every (time, pair); one radial march per
/// (mode, source radius). Modes run in parallel and are reduced in a fixed
/// order, so results are reproducible.
pub fn cone_mode_sum_grid(
    k: u64,
    times: &[f64],
    pairs: &[(ConePoint, ConePoint)],
    config: SolverConfig,
) -> Result<Vec<Vec<f64>>> {
    if k < 1 {
        return Err(invalid("k must be >= 1"));
    }
    if times.is_empty() || pairs.is_empty() {
        return Ok(vec![vec![]; times.len()]);
    }
    let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
    if t_min <= 0.0 {
        return Err(invalid("times must be positive"));
    }
    let z_max = pairs
        .iter()
        .map(|(a, b)| a.r * b.r)
        .fold(0.0f64, f64::max)
        / (2.0 * t_min);
    let n_modes = mode_truncation(k, t_min, z_max);
    let circumference = 2.0 * std::f64::consts::PI / k as f64;

    let radial_pairs: Vec<(f64, f64)> = pairs.iter().map(|(a, b)| (a.r, b.r)).collect();
    let contributions: Vec<Vec<Vec<f64>>> = (0..=n_modes)
        .into_par_iter()
        .map(|n| -> Result<Vec<Vec<f64>>> {
            let mu = ((k * n as u64) * (k * n as u64)) as f64;
            let idx = ConeIndices::new(1, 0, mu).expect("valid cone index");
            let solver = RadialHeatSolver::new(&idx, RadialBoundary::None, config)?;
            let vals = solver.kernel_pairs(times, &radial_pairs)?;
            let mut acc = vec![vec![0.0f64; pairs.len()]; times.len()];
            for (pi, &(a, b)) in pairs.iter().enumerate() {
                let pairing = if n == 0 {
                    1.0 / circumference
                } else {
                    2.0 / circumference * ((k * n as u64) as f64 * (a.theta - b.theta)).cos()
                };
                for (ti, row) in vals.iter().enumerate() {
                    acc[ti][pi] = pairing * row[pi];
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut out = vec![vec![0.0f64; pairs.len()]; times.len()];
    for contrib in &contributions {
        for (ti, row) in contrib.iter().enumerate() {
            for (pi, v) in row.iter().enumerate() {
                out[ti][pi] += v;
            }
        }
    }
    Ok(out)
}

/// Sampled comparison of the mode-sum and image-sum kernels.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct HeatGrid {
    pub k: u64,
    pub times: Vec<f64>,
    pub pairs: Vec<((f64, f64), (f64, f64))>,
    pub values_c: Vec<Vec<f64>>,
    pub values_o: Vec<Vec<f64>>,
    pub sup_rel_discrepancy: f64,
    pub solver: SolverEcho,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolverEcho {
    pub dt: f64,
    pub cells: usize,
    pub grading: f64,
    pub r_out: f64,
    pub truncation_modes: usize,
}

/// Fill a HeatGrid with both kernels and their sup relative discrepancy.
/// Points must stay away from the tip (r >= r_min enforced by the caller's
/// pair generation); the kernels themselves are compared on the open cone.
pub fn duhamel_compare(
    k: u64,
    times: &[f64],
    pairs: &[(ConePoint, ConePoint)],
    config: SolverConfig,
) -> Result<HeatGrid> {
    let values_c = cone_mode_sum_grid(k, times, pairs, config)?;
    let mut values_o = vec![vec![0.0f64; pairs.len()]; times.len()];
    for (ti, &t) in times.iter().enumerate() {
        for (pi, &(a, b)) in pairs.iter().enumerate() {
            values_o[ti][pi] = orbifold_image_kernel(k, t, a, b);
        }
    }
    let mut sup = 0.0f64;
    for ti in 0..times.len() {
        for pi in 0..pairs.len() {
            let o = values_o[ti][pi];
            let c = values_c[ti][pi];
            let rel = (c - o).abs() / o.abs().max(1e-300);
            sup = sup.max(rel);
        }
    }
    let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let z_max = pairs.iter().map(|(a, b)| a.r * b.r).fold(0.0f64, f64::max) / (2.0 * t_min);
    Ok(HeatGrid {
        k,
        times: times.to_vec(),
        pairs: pairs
            .iter()
            .map(|(a, b)| ((a.r, a.theta), (b.r, b.theta)))
            .collect(),
        values_c,
        values_o,
        sup_rel_discrepancy: sup,
        solver: SolverEcho {
            dt: config.dt,
            cells: config.cells,
            grading: config.grading,
            r_out: config.r_out,
            truncation_modes: mode_truncation(k, t_min, z_max),
        },
    })
}

/// Trace sum over an explicit eigenvalue list (summed exactly as given).
pub fn heat_trace(eigenvalues: &[(f64, u64)], t: f64) -> f64 {
    assert!(t > 0.0);
    let mut sum = 0.0;
    for &(lam, mult) in eigenvalues {
        sum += mult as f64 * (-lam * t).exp();
    }
    sum
}

/// Trace of e^{-t Delta} restricted to one degree of a link spectrum, with
/// the harmonic families projected out.
pub fn heat_trace_spectrum(spectrum: &LinkSpectrum, degree: usize, t: f64) -> f64 {
    let eigs: Vec<(f64, u64)> = spectrum
        .degree(degree)
        .filter(|f| f.kind != ModeKind::Harmonic)
        .map(|f| (f.eigenvalue, f.multiplicity))
        .collect();
    heat_trace(&eigs, t)
}

/// Fit-and-validate result for the off-diagonal Gaussian decay bound
/// K <= A exp(-dist^2 / (margin t)).
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecayCheck {
    pub fitted_a: f64,
    pub violations: usize,
    pub checked: usize,
}

/// Fit A on the geometric midpoints of the grid (times a 10% headroom) and
/// validate the bound on the grid itself.
pub fn off_diagonal_decay_check(
    kernel: impl Fn(f64) -> f64,
    dist: f64,
    t_grid: &[f64],
    margin: f64,
) -> DecayCheck {
    let envelope = |t: f64| (-dist * dist / (margin * t)).exp();
    let mut fit = 0.0f64;
    for w in t_grid.windows(2) {
        let t = (w[0] * w[1]).sqrt();
        fit = fit.max(kernel(t) / envelope(t));
    }
    let fitted_a = 1.1 * fit;
    let mut violations = 0usize;
    for &t in t_grid {
        if kernel(t) > fitted_a * envelope(t) {
            violations += 1;
        }
    }
    DecayCheck {
        fitted_a,
        violations,
        checked: t_grid.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn image_kernel_free_case() {
        let x1 = ConePoint::new(0.7, 0.3);
        let x2 = ConePoint::new(1.1, 2.0);
        let t = 0.4;
        let d2 = x1.r * x1.r + x2.r * x2.r - 2.0 * x1.r * x2.r * (x1.theta - x2.theta).cos();
        let want = (-d2 / (4.0 * t)).exp() / (4.0 * PI * t);
        assert!((orbifold_image_kernel(1, t, x1, x2) - want).abs() < 1e-16);
    }

    #[test]
    fn image_kernel_antipodal_pair() {
        // k = 2, coincident points: (4 pi t)^{-1} (1 + e^{-r^2/t})
        let r = 0.8;
        let t = 0.5;
        let x = ConePoint::new(r, 0.3);
        let want = (1.0 + (-r * r / t).exp()) / (4.0 * PI * t);
        assert!((orbifold_image_kernel(2, t, x, x) - want).abs() < 1e-15);
    }

    #[test]
    fn image_kernel_near_tip_limit() {
        // x1 -> tip: all k images converge to distance r2
        let k = 5u64;
        let t = 0.3;
        let x1 = ConePoint::new(1e-9, 0.2);
        let x2 = ConePoint::new(0.9, 0.7);
        let want = k as f64 * (-(x2.r * x2.r) / (4.0 * t)).exp() / (4.0 * PI * t);
        let got = orbifold_image_kernel(k, t, x1, x2);
        assert!((got - want).abs() < 1e-8 * want);
    }

    #[test]
    fn image_kernel_symmetric() {
        for k in [1u64, 2, 3, 6] {
            let x1 = ConePoint::new(0.44, 0.9 / k as f64);
            let x2 = ConePoint::new(0.91, 2.3 / k as f64);
            let a = orbifold_image_kernel(k, 0.21, x1, x2);
            let b = orbifold_image_kernel(k, 0.21, x2, x1);
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn image_kernel_positive() {
        for k in [1u64, 3, 6] {
            for &t in &[0.01, 0.3, 1.0] {
                let v = orbifold_image_kernel(
                    k,
                    t,
                    ConePoint::new(0.4, 0.1),
                    ConePoint::new(0.9, 0.4),
                );
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn mode_sum_matches_plane_gaussian_at_k1() {
        let x1 = ConePoint::new(0.6, 0.5);
        let x2 = ConePoint::new(0.95, 2.4);
        let t = 0.2;
        let cfg = SolverConfig::default().with_resolution(1200, 1e-3);
        let got = cone_mode_sum_kernel(1, t, x1, x2, cfg).unwrap();
        let want = orbifold_image_kernel(1, t, x1, x2);
        assert!(
            (got - want).abs() < 5e-4 * want,
            "mode sum {got} vs Gaussian {want}"
        );
    }

    #[test]
    fn mode_sum_matches_image_sum_at_k2() {
        // coincident diagonal point, the worst case for the mode sum
        let x = ConePoint::new(1.0, 0.0);
        let t = 0.5;
        let cfg = SolverConfig::default().with_resolution(1500, 5e-4);
        let got = cone_mode_sum_kernel(2, t, x, x, cfg).unwrap();
        let want = orbifold_image_kernel(2, t, x, x);
        assert!(
            ((got - want) / want).abs() < 1e-4,
            "k=2 diagonal: {got} vs {want}"
        );
    }

    #[test]
    fn semigroup_property_image_kernel() {
        // int_cone K(s,x,z) K(t,z,y) dz = K(s+t,x,y) at k = 2; midpoint
        // quadrature at two resolutions, Richardson-extrapolated
        let k = 2u64;
        let s = 0.3;
        let t = 0.4;
        let x = ConePoint::new(0.8, 0.2);
        let y = ConePoint::new(1.2, 1.1);
        let period = 2.0 * PI / k as f64;
        let r_max = 8.0;
        let integrate = |nr: usize, na: usize| {
            let hr = r_max / nr as f64;
            let ha = period / na as f64;
            let mut acc = 0.0;
            for ir in 0..nr {
                let r = (ir as f64 + 0.5) * hr;
                for ia in 0..na {
                    let ang = (ia as f64 + 0.5) * ha;
                    let z = ConePoint::new(r, ang);
                    acc += orbifold_image_kernel(k, s, x, z)
                        * orbifold_image_kernel(k, t, z, y)
                        * r
                        * hr
                        * ha;
                }
            }
            acc
        };
        let coarse = integrate(500, 200);
        let fine = integrate(1000, 400);
        let acc = (4.0 * fine - coarse) / 3.0;
        let want = orbifold_image_kernel(k, s + t, x, y);
        assert!((acc - want).abs() < 1e-6, "semigroup: {acc} vs {want}");
    }

    #[test]
    fn duhamel_free_case_sits_at_solver_floor() {
        // k = 1: both kernels are the plane Gaussian; the reported
        // discrepancy only measures solver error
        let pairs = crate::util::sample_heat_pairs(1, 6, 3, 0.5, 1.0);
        let grid = duhamel_compare(1, &[0.1, 0.5], &pairs, SolverConfig::default()).unwrap();
        assert!(
            grid.sup_rel_discrepancy < 1e-3,
            "solver floor {}",
            grid.sup_rel_discrepancy
        );
    }

    #[test]
    fn duhamel_discrepancy_stable_toward_the_tip() {
        // shrinking the inner radius does not leak boundary terms
        let pairs = crate::util::sample_heat_pairs(2, 8, 5, 0.05, 0.3);
        let grid = duhamel_compare(2, &[0.2], &pairs, SolverConfig::default()).unwrap();
        assert!(
            grid.sup_rel_discrepancy < 1e-4,
            "near-tip discrepancy {}",
            grid.sup_rel_discrepancy
        );
    }

    #[test]
    fn trace_example_circle() {
        // 1 + 2 e^{-1} + 2 e^{-4} + ... at t = 1
        let eigs: Vec<(f64, u64)> = (0..40)
            .map(|n| ((n * n) as f64, if n == 0 { 1 } else { 2 }))
            .collect();
        let v = heat_trace(&eigs, 1.0);
        assert!((v - 1.77264).abs() < 1e-5, "{v}");
    }

    #[test]
    fn trace_linear_in_multiplicity() {
        let eigs = vec![(1.0, 2u64), (4.0, 2)];
        let doubled = vec![(1.0, 4u64), (4.0, 4)];
        assert!((2.0 * heat_trace(&eigs, 0.7) - heat_trace(&doubled, 0.7)).abs() < 1e-15);
    }

    #[test]
    fn trace_projector_drops_harmonics() {
        let s = crate::spectrum::circle_quotient_spectrum(1, 50.0).unwrap();
        let tr = heat_trace_spectrum(&s, 0, 30.0);
        // t -> inf at rate e^{-lambda_min t}
        assert!(tr < 2.1e-13 && tr > 0.0, "{tr}");
    }

    #[test]
    fn decay_bound_fit_validate() {
        // maximal separation available at k = 3 with radii <= 1
        let k = 3u64;
        let x1 = ConePoint::new(1.0, 0.0);
        let x2 = ConePoint::new(1.0, PI / 3.0);
        let dist = crate::green::cone_distance(k, x1, x2);
        assert!(dist >= 1.0 - 1e-12, "distance {dist}");
        let grid: Vec<f64> = (1..=50).map(|j| j as f64 / 50.0).collect();
        let check = off_diagonal_decay_check(
            |t| orbifold_image_kernel(k, t, x1, x2),
            1.0,
            &grid,
            5.0,
        );
        assert_eq!(check.violations, 0);
        assert!(check.fitted_a.is_finite() && check.fitted_a > 0.0);
    }

    #[test]
    fn small_time_beats_margin_bound() {
        // dist = 1, t = 0.01: value below e^{-1/(5 t)}
        let k = 2u64;
        let x1 = ConePoint::new(0.4, 0.0);
        let x2 = ConePoint::new(1.267, 0.6);
        let d = crate::green::cone_distance(k, x1, x2);
        assert!((d - 1.0).abs() < 0.05, "distance {d}");
        let t = 0.01;
        let v = orbifold_image_kernel(k, t, x1, x2);
        assert!(v < (-1.0 / (5.0 * t)).exp());
    }
}
