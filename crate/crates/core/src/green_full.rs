//! Full Green operator of the bounded flat cone at m = 1, assembled from
//! the coexact mode kernels:
//!
//!   G_{a,i} = G-coexact_i  +  d1 G_{a,i-1} o d2 G_{a,i-1}
//!           + star^{-1} G_{r,m+1-i} star
//!           + star^{-1} d1 G_{r,m-i} o d2 G_{r,m-i} star.
//!
//! At m = 1 the star is a pointwise rotation of the orthonormal co-frame
//! {dr, r dtheta} and the compositions reduce to radial integrals of the
//! explicit mode kernels, evaluated by per-interval Gauss quadrature with
//! the analytic branch derivatives.

use crate::cone::ConeIndices;
use crate::error::{invalid, Result};
use crate::green::{flavor_h, flavor_h_d1, ConePoint, KernelFlavor};
use crate::spectrum::{LinkSpectrum, ModeKind};

/// 2x2 kernel block of a 1-form operator in the orthonormal co-frame
/// {dr, r dtheta} at each argument.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FormKernel1 {
    pub rr: f64,
    pub rt: f64,
    pub tr: f64,
    pub tt: f64,
}

impl FormKernel1 {
    fn zero() -> Self {
        FormKernel1 {
            rr: 0.0,
            rt: 0.0,
            tr: 0.0,
            tt: 0.0,
        }
    }

    fn add(&mut self, o: FormKernel1) {
        self.rr += o.rr;
        self.rt += o.rt;
        self.tr += o.tr;
        self.tt += o.tt;
    }

    /// conjugation by the frame rotation of the Hodge star:
    /// swaps the diagonal and negates the off-diagonal entries
    fn star_conjugate(self) -> Self {
        FormKernel1 {
            rr: self.tt,
            rt: -self.tr,
            tr: -self.rt,
            tt: self.rr,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.rr * self.rr + self.rt * self.rt + self.tr * self.tr + self.tt * self.tt).sqrt()
    }

    pub fn transpose(self) -> Self {
        FormKernel1 {
            rr: self.rr,
            rt: self.tr,
            tr: self.rt,
            tt: self.tt,
        }
    }
}

const GL32_X: [f64; 16] = [
    0.048_307_665_687_738_32,
    0.144_471_961_582_796_5,
    0.239_287_362_252_137_2,
    0.331_868_602_282_127_65,
    0.421_351_276_130_635_3,
    0.506_899_908_932_229_4,
    0.587_715_757_240_762_3,
    0.663_044_266_930_215_2,
    0.732_182_118_740_289_7,
    0.794_483_795_967_942_4,
    0.849_367_613_732_57,
    0.896_321_155_766_052_1,
    0.934_906_075_937_739_7,
    0.964_762_255_587_506_4,
    0.985_611_511_545_268_3,
    0.997_263_861_849_481_6,
];
const GL32_W: [f64; 16] = [
    0.096_540_088_514_727_8,
    0.095_638_720_079_274_86,
    0.093_844_399_080_804_57,
    0.091_173_878_695_763_88,
    0.087_652_093_004_403_8,
    0.083_311_924_226_946_75,
    0.078_193_895_787_070_3,
    0.072_345_794_108_848_5,
    0.065_822_222_776_361_85,
    0.058_684_093_478_535_55,
    0.050_998_059_262_376_176,
    0.042_835_898_022_226_68,
    0.034_273_862_913_021_43,
    0.025_392_065_309_262_06,
    0.016_274_394_730_905_67,
    0.007_018_610_009_470_097,
];

/// int_a^b f on one smooth interval by 32-point Gauss-Legendre.
fn gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL32_X.iter().zip(GL32_W.iter()) {
        acc += w * (f(mid + half * x) + f(mid - half * x));
    }
    acc * half
}

/// int_0^1 f(rho) rho drho split at the kernel kinks r1, r2.
fn composed_integral(f: impl Fn(f64) -> f64, r1: f64, r2: f64) -> f64 {
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let g = |rho: f64| f(rho) * rho;
    gauss(&g, 1e-12, lo) + gauss(&g, lo, hi) + gauss(&g, hi, 1.0)
}

/// Composed mode kernel C(r1, r2) = int h(r1, rho) h(rho, r2) rho drho and
/// its first/mixed derivatives; h carries the given flavor at the given
/// function-mode index.
struct ComposedMode<'a> {
    idx: &'a ConeIndices,
    flavor: KernelFlavor,
}

impl ComposedMode<'_> {
    fn value(&self, r1: f64, r2: f64) -> Result<f64> {
        let f = |rho: f64| {
            flavor_h(self.idx, self.flavor, r1, rho).unwrap()
                * flavor_h(self.idx, self.flavor, rho, r2).unwrap()
        };
        Ok(composed_integral(f, r1, r2))
    }

    fn d1(&self, r1: f64, r2: f64) -> Result<f64> {
        let f = |rho: f64| {
            flavor_h_d1(self.idx, self.flavor, r1, rho, r1 > rho).unwrap()
                * flavor_h(self.idx, self.flavor, rho, r2).unwrap()
        };
        Ok(composed_integral(f, r1, r2))
    }

    fn d2(&self, r1: f64, r2: f64) -> Result<f64> {
        let f = |rho: f64| {
            flavor_h(self.idx, self.flavor, r1, rho).unwrap()
                * flavor_h_d1(self.idx, self.flavor, r2, rho, r2 > rho).unwrap()
        };
        Ok(composed_integral(f, r1, r2))
    }

    fn d1d2(&self, r1: f64, r2: f64) -> Result<f64> {
        let f = |rho: f64| {
            flavor_h_d1(self.idx, self.flavor, r1, rho, r1 > rho).unwrap()
                * flavor_h_d1(self.idx, self.flavor, r2, rho, r2 > rho).unwrap()
        };
        Ok(composed_integral(f, r1, r2))
    }
}

/// The exact-part block d1 G o d2 G of one function mode in the orthonormal
/// co-frame, with the angular pairings of the real eigenfunction pair.
fn exact_block(
    idx: &ConeIndices,
    flavor: KernelFlavor,
    freq: f64,
    circumference: f64,
    x1: ConePoint,
    x2: ConePoint,
) -> Result<FormKernel1> {
    let comp = ComposedMode { idx, flavor };
    let dtheta = x1.theta - x2.theta;
    if freq == 0.0 {
        // constant link mode: only the radial-radial entry survives
        return Ok(FormKernel1 {
            rr: comp.d1d2(x1.r, x2.r)? / circumference,
            rt: 0.0,
            tr: 0.0,
            tt: 0.0,
        });
    }
    let p = 2.0 / circumference * (freq * dtheta).cos();
    let p1 = -2.0 / circumference * freq * (freq * dtheta).sin(); // d/dtheta1
    let p2 = 2.0 / circumference * freq * (freq * dtheta).sin(); // d/dtheta2
    let p12 = 2.0 / circumference * freq * freq * (freq * dtheta).cos();
    Ok(FormKernel1 {
        rr: comp.d1d2(x1.r, x2.r)? * p,
        rt: comp.d1(x1.r, x2.r)? * p2 / x2.r,
        tr: comp.d2(x1.r, x2.r)? * p1 / x1.r,
        tt: comp.value(x1.r, x2.r)? * p12 / (x1.r * x2.r),
    })
}

/// Degree-0 full Green kernel: the coexact mode sum is already complete
/// (every function is a combination of the link function modes).
pub fn full_green_degree0(
    spectrum: &LinkSpectrum,
    x1: ConePoint,
    x2: ConePoint,
    truncation: Option<f64>,
) -> Result<f64> {
    Ok(
        crate::green::coexact_green_eval(spectrum, 0, KernelFlavor::Absolute, x1, x2, truncation)?
            .value,
    )
}

/// Degree-2 full Green kernel, as the scalar coefficient on vol (x) vol:
/// the star transports the problem to functions with the relative
/// condition.
pub fn full_green_degree2(
    spectrum: &LinkSpectrum,
    x1: ConePoint,
    x2: ConePoint,
    truncation: Option<f64>,
) -> Result<f64> {
    Ok(
        crate::green::coexact_green_eval(spectrum, 0, KernelFlavor::Relative, x1, x2, truncation)?
            .value,
    )
}

/// Degree-1 full Green kernel with absolute boundary conditions: the four
/// blocks of the assembly, summed over link modes up to `max_modes`.
pub fn full_green_degree1(
    spectrum: &LinkSpectrum,
    x1: ConePoint,
    x2: ConePoint,
    max_modes: usize,
) -> Result<FormKernel1> {
    if spectrum.m != 1 {
        return Err(crate::error::Error::Unsupported(
            "full assembly is implemented for m = 1".into(),
        ));
    }
    if x1.r <= 0.0 || x1.r > 1.0 || x2.r <= 0.0 || x2.r > 1.0 {
        return Err(invalid("points must lie on the bounded cone"));
    }
    let k = spectrum.group_order;
    let circumference = 2.0 * std::f64::consts::PI / k as f64;
    let mut out = FormKernel1::zero();

    // term 1: tangential harmonic-link family with the absolute kernel
    let idx_t = ConeIndices::new(1, 1, 0.0)?;
    let h_abs = flavor_h(&idx_t, KernelFlavor::Absolute, x1.r, x2.r)?;
    out.tt += h_abs / (circumference * x1.r * x2.r);

    // term 3: its relative partner, rotated onto the radial block
    let h_rel = flavor_h(&idx_t, KernelFlavor::Relative, x1.r, x2.r)?;
    out.add(
        FormKernel1 {
            rr: 0.0,
            rt: 0.0,
            tr: 0.0,
            tt: h_rel / (circumference * x1.r * x2.r),
        }
        .star_conjugate(),
    );

    // terms 2 and 4: exact parts of the absolute and (star-rotated)
    // relative function problems, mode by mode
    let mut count = 0usize;
    for fam in spectrum.degree(0) {
        if count >= max_modes {
            break;
        }
        if fam.kind == ModeKind::Exact {
            continue;
        }
        let idx = ConeIndices::new(1, 0, fam.eigenvalue)?;
        let freq = fam.eigenvalue.sqrt();
        out.add(exact_block(&idx, KernelFlavor::Absolute, freq, circumference, x1, x2)?);
        out.add(
            exact_block(&idx, KernelFlavor::Relative, freq, circumference, x1, x2)?
                .star_conjugate(),
        );
        count += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{bessel_j_prime_zeros, bessel_jn};
    use crate::spectrum::circle_quotient_spectrum;

    #[test]
    fn composed_kernel_is_squared_inverse_on_eigenfunctions() {
        // int C_n(r1, rho) u(rho) rho drho = u(r1)/lambda^2 for the Neumann
        // radial eigenfunction u = J_q(sqrt(lambda) r)
        let q = 2usize;
        let idx = ConeIndices::new(1, 0, (q * q) as f64).unwrap();
        let comp = ComposedMode {
            idx: &idx,
            flavor: KernelFlavor::Absolute,
        };
        let root = bessel_j_prime_zeros(q, 10.0)[0];
        let lambda = root * root;
        let u = |r: f64| bessel_jn(q, root * r);
        for &r1 in &[0.35, 0.7, 0.95] {
            let lhs = {
                let f = |rho: f64| comp.value(r1, rho).unwrap() * u(rho);
                composed_integral(f, r1, r1)
            };
            let rhs = u(r1) / (lambda * lambda);
            assert!(
                (lhs - rhs).abs() < 1e-7 * rhs.abs().max(1e-9),
                "r1 = {r1}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn composed_kernel_symmetric() {
        let idx = ConeIndices::new(1, 0, 4.0).unwrap();
        let comp = ComposedMode {
            idx: &idx,
            flavor: KernelFlavor::Absolute,
        };
        let a = comp.value(0.4, 0.8).unwrap();
        let b = comp.value(0.8, 0.4).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn degree1_kernel_adjoint_symmetry() {
        // K(x1, x2) = K(x2, x1)^T for a self-adjoint operator
        let s = circle_quotient_spectrum(2, 2500.0).unwrap();
        let x1 = ConePoint::new(0.5, 0.3);
        let x2 = ConePoint::new(0.8, 1.1);
        let a = full_green_degree1(&s, x1, x2, 12).unwrap();
        let b = full_green_degree1(&s, x2, x1, 12).unwrap().transpose();
        for (u, v) in [(a.rr, b.rr), (a.rt, b.rt), (a.tr, b.tr), (a.tt, b.tt)] {
            assert!((u - v).abs() < 1e-9 * u.abs().max(1e-6), "{u} vs {v}");
        }
    }

    #[test]
    fn degree0_and_2_reduce_to_mode_sums() {
        let s = circle_quotient_spectrum(1, 1e4).unwrap();
        let x1 = ConePoint::new(0.5, 0.2);
        let x2 = ConePoint::new(0.9, 2.5);
        let g0 = full_green_degree0(&s, x1, x2, None).unwrap();
        let g2 = full_green_degree2(&s, x1, x2, None).unwrap();
        assert!(g0.is_finite() && g2.is_finite());
        // the relative kernel vanishes when an argument reaches the seam
        let edge = full_green_degree2(&s, x1, ConePoint::new(1.0, 2.5), None).unwrap();
        assert!(edge.abs() < 1e-9, "relative kernel at the boundary: {edge}");
    }

    #[test]
    fn degree1_exact_block_inverts_eigenform() {
        // omega = d(J_q(sqrt(lam) r) cos(q theta)) is an absolute 1-eigenform;
        // G_1 omega = omega / lambda. After the angular integrals the radial
        // identity reads
        //   int_0^1 [d1 d2 C(r1, rho) sqrt(lam) J_q'(sqrt(lam) rho)
        //            + d1 C(r1, rho) q^2 J_q(sqrt(lam) rho)/rho^2] rho drho
        //   = sqrt(lam) J_q'(sqrt(lam) r1) / lam.
        let q = 1usize;
        let idx = ConeIndices::new(1, 0, (q * q) as f64).unwrap();
        let comp = ComposedMode {
            idx: &idx,
            flavor: KernelFlavor::Absolute,
        };
        let root = bessel_j_prime_zeros(q, 10.0)[0];
        let lambda = root * root;
        let jq = |r: f64| bessel_jn(q, root * r);
        let jq_prime = |r: f64| root * 0.5 * (bessel_jn(0, root * r) - bessel_jn(2, root * r));
        for &r1 in &[0.45, 0.8] {
            let f = |rho: f64| {
                comp.d1d2(r1, rho).unwrap() * jq_prime(rho)
                    + comp.d1(r1, rho).unwrap() * (q * q) as f64 * jq(rho) / (rho * rho)
            };
            let got = composed_integral(f, r1, r1);
            let want = jq_prime(r1) / lambda;
            assert!(
                (got - want).abs() < 1e-6 * want.abs().max(1e-8),
                "r1 = {r1}: {got} vs {want}"
            );
        }
    }
}
