//! Acceptance suite: every headline property at its stated tolerance, one
//! pass/fail line per criterion (visible with `--nocapture`). Tolerances
//! are pinned here, not configurable.

use std::time::Instant;

use torsion_core::cohomology::{
    harmonic_dim_check, mayer_vietoris_betti, quotient_invariant_cohomology, spindle_gluing,
    MvOutcome,
};
use torsion_core::cone::ConeIndices;
use torsion_core::green::{
    absolute_boundary_residual, builtin_indices, cone_distance, flavor_h, green_bound_check,
    jump_condition_residual, ode_residual, relative_boundary_residual, ConePoint, KernelFlavor,
};
use torsion_core::heat::{
    bessel_mode_kernel, cone_mode_sum_grid, duhamel_compare, mode_heat_radial,
    off_diagonal_decay_check, orbifold_image_kernel, RadialBoundary, SolverConfig,
};
use torsion_core::spectrum::{
    circle_quotient_spectrum, sphere_coexact_spectrum, validate_spectrum,
};
use torsion_core::spindle::{degree_one_control_trace, spindle_torsion_compare};
use torsion_core::util::{sample_green_pairs, sample_heat_pairs};
use torsion_core::zeta::fit::geometric_grid;
use torsion_core::zeta::{
    circle_torsion_closed_form, circle_torsion_mellin, residue_check, weighted_residue_check,
};

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!("{} {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

/// 1. Circle torsion log T = -log L for L in {2pi, pi, 2pi/5}, both the
///    closed form and the numeric Mellin continuation, |error| < 1e-6, < 1 s.
#[test]
fn criterion_1_circle_torsion_closed_form() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &ell in &[
        2.0 * std::f64::consts::PI,
        std::f64::consts::PI,
        2.0 * std::f64::consts::PI / 5.0,
    ] {
        let expected = -ell.ln();
        let closed = circle_torsion_closed_form(ell).unwrap();
        let numeric = circle_torsion_mellin(ell).unwrap();
        worst = worst
            .max((closed.log_torsion - expected).abs())
            .max((numeric.log_torsion - expected).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 1 (circle torsion, both paths)",
        worst < 1e-6 && elapsed < 1.0,
        &format!("max |log T + log L| = {worst:.2e}, {elapsed:.2} s"),
    );
}

/// 2. Mode-sum vs image-sum heat kernels on R^2/Z_k, k in {2,3,6}; 20 pairs
///    with radii in [0.3, 1], t in {0.05, 0.2, 1.0}; sup relative discrepancy
///    < 1e-4; < 2 min.
#[test]
fn criterion_2_heat_kernel_equality() {
    let start = Instant::now();
    let times = [0.05, 0.2, 1.0];
    let mut worst = 0.0f64;
    for &k in &[2u64, 3, 6] {
        let pairs = sample_heat_pairs(k, 20, 7, 0.3, 1.0);
        let grid = duhamel_compare(k, &times, &pairs, SolverConfig::default()).unwrap();
        worst = worst.max(grid.sup_rel_discrepancy);
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 2 (heat kernel equality)",
        worst < 1e-4 && elapsed < 120.0,
        &format!("sup rel discrepancy = {worst:.2e}, {elapsed:.1} s"),
    );
}

/// 3. Flat-spindle torsion, conical vs orbifold route, k in {2, 3}:
///    |log T_c - log T_o| < 1e-4 after Richardson extrapolation; < 5 min.
#[test]
fn criterion_3_spindle_torsion_equality() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &k in &[2u64, 3] {
        let cmp = spindle_torsion_compare(k, 60.0).unwrap();
        worst = worst.max(cmp.rel_log_discrepancy);
        assert_eq!(cmp.kernel_dims, [1, 0, 1], "kernel dimensions at k={k}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 3 (spindle torsion equality)",
        worst < 1e-4 && elapsed < 300.0,
        &format!("|log T_c - log T_o| = {worst:.2e}, {elapsed:.1} s"),
    );
}

/// 4. Green kernel identities at every built-in index, m in {1, 3}:
///    absolute Neumann and relative Dirichlet boundary residuals, exact
///    symmetry, per-mode ODE annihilation, and the derivative jump -r^{2i-m},
///    each below 1e-10 over 100-point grids; < 10 s.
#[test]
fn criterion_4_green_kernel_identities() {
    let start = Instant::now();
    let grid: Vec<f64> = (1..=100).map(|j| j as f64 / 101.0).collect();
    let mut worst = 0.0f64;
    for idx in builtin_indices() {
        for flavor in [KernelFlavor::Model, KernelFlavor::Absolute, KernelFlavor::Relative] {
            if flavor == KernelFlavor::Absolute && idx.a_plus == 0.0 && idx.m == 1 {
                continue;
            }
            for &r in &grid {
                if flavor == KernelFlavor::Absolute && idx.mu > 0.0 {
                    worst = worst.max(absolute_boundary_residual(&idx, r).unwrap());
                }
                if flavor == KernelFlavor::Relative && idx.nu > 0.0 {
                    worst = worst.max(relative_boundary_residual(&idx, r).unwrap());
                }
                if r < 0.99 {
                    worst = worst.max(jump_condition_residual(&idx, flavor, r).unwrap());
                }
                // symmetry is literal: the kernel sorts its arguments
                let fwd = flavor_h(&idx, flavor, r, 0.63).unwrap();
                let bwd = flavor_h(&idx, flavor, 0.63, r).unwrap();
                worst = worst.max((fwd - bwd).abs());
                if (r - 0.63).abs() > 1e-9 {
                    worst = worst.max(ode_residual(&idx, flavor, r, 0.63).unwrap());
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 4 (green kernel identities)",
        worst < 1e-10 && elapsed < 10.0,
        &format!("max residual = {worst:.2e}, {elapsed:.1} s"),
    );
}

/// 5. Logarithmic kernel bound at m = 1: |G| <= C (1 + |log dist|) with C
///    fitted on half of 1e4 pairs (dist in [1e-3, 1]) and validated with zero
///    violations on the other half.
#[test]
fn criterion_5_green_operator_bound() {
    let spectrum = circle_quotient_spectrum(1, 9e10).unwrap();
    let pairs = sample_green_pairs(1, 10_000, 42, 1e-3, 1.0);
    let check = green_bound_check(&spectrum, 0, KernelFlavor::Absolute, &pairs).unwrap();
    verdict(
        "criterion 5 (green operator bound)",
        check.violations == 0,
        &format!(
            "C = {:.4}, validation max = {:.4}, {} violations over {} pairs",
            check.fitted_c, check.max_validation_ratio, check.violations, check.samples
        ),
    );
}

/// 6. Residue cancellation: the fitted log-t coefficient of the weighted
///    spindle trace combination stays below 1e-3 while the log-bearing
///    degree-one control family exceeds ten times that threshold.
#[test]
fn criterion_6_residue_cancellation() {
    let k = 3u64;
    let x_max = 80.0;
    let spec = torsion_core::spindle::conical_route(k, x_max).unwrap();
    let series: Vec<torsion_core::zeta::ZetaSeries> = spec
        .per_degree
        .iter()
        .map(|m| {
            torsion_core::zeta::ZetaSeries::new(
                m.clone(),
                torsion_core::zeta::Continuation::DirectOnly,
            )
            .unwrap()
        })
        .collect();
    let t_lo = 28.0 / (x_max * x_max);
    let weighted = weighted_residue_check(&series, (t_lo, 0.03), -1.0, 1e-3).unwrap();

    let grid = geometric_grid(1.5e-3, 0.08, 40);
    let control_samples: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| (t, degree_one_control_trace(k, t)))
        .collect();
    let control = residue_check(&control_samples, -1.0, 1e-3).unwrap();
    verdict(
        "criterion 6 (residue cancellation)",
        weighted.log_coefficient.abs() < 1e-3 && control.log_coefficient.abs() > 1e-2,
        &format!(
            "weighted |b| = {:.2e}, control |b| = {:.2e}",
            weighted.log_coefficient.abs(),
            control.log_coefficient.abs()
        ),
    );
}

/// 7. Cohomology comparison: the Mayer-Vietoris assembly of the L^2 cone
///    caps and the orbifold invariant route both give (1, 0, 1), k in {1,2,5}.
#[test]
fn criterion_7_cohomology_comparison() {
    let mut pass = true;
    for &k in &[1u64, 2, 5] {
        let mv = match mayer_vietoris_betti(&spindle_gluing(k)).unwrap() {
            MvOutcome::Determined(b) => b,
            MvOutcome::Indeterminate { .. } => panic!("spindle gluing must be determined"),
        };
        let orbifold = quotient_invariant_cohomology(2);
        pass &= mv.dims == vec![1, 0, 1];
        pass &= orbifold.dims == vec![1, 0, 1];
        pass &= harmonic_dim_check(k, &[0, 1, 2]).unwrap().iter().all(|r| r.1);
    }
    verdict(
        "criterion 7 (cohomology comparison)",
        pass,
        "both routes give Betti (1, 0, 1) for k in {1, 2, 5}",
    );
}

/// 8. Eigenvalue lower bound: zero validator violations on the built-in
///    spectra for every m in {1, 2, 3} and every degree.
#[test]
fn criterion_8_eigenvalue_lower_bound() {
    let mut violations = 0usize;
    for k in [1u64, 2, 3, 5] {
        violations += validate_spectrum(&circle_quotient_spectrum(k, 400.0).unwrap()).len();
    }
    for m in [1usize, 2, 3] {
        for i in 0..=m {
            violations +=
                validate_spectrum(&sphere_coexact_spectrum(m, i, 60.0).unwrap()).len();
        }
    }
    verdict(
        "criterion 8 (eigenvalue lower bound)",
        violations == 0,
        &format!("{violations} validator violations across built-in spectra"),
    );
}

/// 9. Off-diagonal decay: at separation 1, both kernels stay below
///    A e^{-1/(5t)} with one fitted A over a 50-point grid in (0, 1], zero
///    violations.
#[test]
fn criterion_9_off_diagonal_decay() {
    let k = 2u64;
    let x1 = ConePoint::new(0.4, 0.0);
    let x2 = ConePoint::new(1.267, 0.6);
    let dist = cone_distance(k, x1, x2);
    assert!((dist - 1.0).abs() < 0.05, "pair separation {dist}");
    let t_grid: Vec<f64> = (1..=50).map(|j| j as f64 / 50.0).collect();
    let image = off_diagonal_decay_check(
        |t| orbifold_image_kernel(k, t, x1, x2),
        1.0,
        &t_grid,
        5.0,
    );
    // the mode sum, batched over the validation grid and the offset fit grid
    let values = cone_mode_sum_grid(k, &t_grid, &[(x1, x2)], SolverConfig::default()).unwrap();
    let mut mode_fit = 0.0f64;
    let mid_grid: Vec<f64> = t_grid.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    let mid_values = cone_mode_sum_grid(k, &mid_grid, &[(x1, x2)], SolverConfig::default()).unwrap();
    for (ti, &t) in mid_grid.iter().enumerate() {
        mode_fit = mode_fit.max(mid_values[ti][0] / (-1.0 / (5.0 * t)).exp());
    }
    let fitted_a = 1.1 * mode_fit;
    let mut mode_violations = 0usize;
    for (ti, &t) in t_grid.iter().enumerate() {
        if values[ti][0] > fitted_a * (-1.0 / (5.0 * t)).exp() {
            mode_violations += 1;
        }
    }
    verdict(
        "criterion 9 (off-diagonal decay)",
        image.violations == 0 && mode_violations == 0,
        &format!(
            "image A = {:.3} ({} violations), mode-sum A = {:.3} ({} violations)",
            image.fitted_a, image.violations, fitted_a, mode_violations
        ),
    );
}

/// 10. Solver order: halving (dt, grid spacing) shrinks the error against
///     the closed-form kernel by at least 3x at three reference configurations.
#[test]
fn criterion_10_solver_order() {
    let configs = [
        (ConeIndices::new(1, 0, 1.0).unwrap(), 0.25, 0.7, 0.9),
        (ConeIndices::new(1, 0, 4.0).unwrap(), 0.1, 0.5, 0.8),
        (ConeIndices::new(3, 0, 3.0).unwrap(), 0.2, 0.6, 1.1),
    ];
    let mut worst_ratio = f64::INFINITY;
    let mut detail = String::new();
    for (idx, t, r1, r2) in configs {
        let run = |cells: usize, dt: f64| {
            let cfg = SolverConfig::default().with_resolution(cells, dt);
            let v = mode_heat_radial(&idx, t, r1, r2, RadialBoundary::None, cfg).unwrap();
            (v - bessel_mode_kernel(&idx, t, r1, r2)).abs()
        };
        let coarse = run(250, 8e-3);
        let fine = run(500, 4e-3);
        let ratio = coarse / fine;
        worst_ratio = worst_ratio.min(ratio);
        detail.push_str(&format!(
            "(m={} mu={}) {:.2e}->{:.2e} x{:.1}; ",
            idx.m, idx.mu, coarse, fine, ratio
        ));
    }
    verdict(
        "criterion 10 (solver order)",
        worst_ratio >= 3.0,
        &detail,
    );
}
