//! Cone index machinery and the separated action of the Hodge Laplacian on
//! one link mode of the metric cone dr^2 + r^2 g_N.
//!
//! For a mode beta = g(r) phi + f(r) dr ^ psi (phi an i-form, psi an
//! (i-1)-form on the link) the Laplacian acts radially through
//!
//!   tangential:  -g'' - (m-2i) g'/r + mu_phi g / r^2        (times phi)
//!   normal:      -f'' - (m-2i+2) f'/r + (m-2i+2) f / r^2
//!                                     + mu_psi f / r^2      (times dr ^ psi)
//!
//! plus the coupling terms -2 g / r^3 (paired with dr ^ codiff phi) and
//! -2 f / r (paired with diff psi). The zeroth-order normal coefficient
//! (m-2i+2) f / r^2 is pinned by two oracles in the tests: an explicit polar
//! coordinate expansion of d delta + delta d at m = 1, and the exact
//! intertwining of the radial operators with d across degrees for m in
//! {1, 3, 5}.

use crate::error::{invalid, Result};

/// The exponent data attached to one link mode: alpha = (1+2i-m)/2,
/// nu = sqrt(mu + alpha^2), a_pm = alpha +- nu. r^{a_pm} solve the
/// homogeneous tangential equation; for nu = 0 the second solution
/// degenerates to r^alpha log r.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConeIndices {
    pub m: usize,
    pub degree: usize,
    pub mu: f64,
    pub alpha: f64,
    pub nu: f64,
    pub a_plus: f64,
    pub a_minus: f64,
}

impl ConeIndices {
    pub fn new(m: usize, degree: usize, mu: f64) -> Result<Self> {
        if degree > m {
            return Err(invalid(format!("degree {degree} out of range 0..={m}")));
        }
        if mu < 0.0 {
            return Err(invalid(format!("link eigenvalue must be nonnegative, got {mu}")));
        }
        let alpha = (1.0 + 2.0 * degree as f64 - m as f64) / 2.0;
        let nu = (mu + alpha * alpha).sqrt();
        Ok(ConeIndices {
            m,
            degree,
            mu,
            alpha,
            nu,
            a_plus: alpha + nu,
            a_minus: alpha - nu,
        })
    }

    /// nu = 0 happens exactly for mu = 0 on an odd link dimension with
    /// m = 2i + 1; the model kernel degenerates to -log max(r1, r2).
    pub fn is_log_case(&self) -> bool {
        self.nu == 0.0
    }

    /// Radial weight exponent: the mode lives in L^2((0,1], r^{m-2i} dr).
    pub fn weight_exponent(&self) -> f64 {
        self.m as f64 - 2.0 * self.degree as f64
    }
}

/// Radial samples of one separated form on a strictly increasing grid in (0,1].
#[derive(Debug, Clone)]
pub struct SeparatedForm {
    pub grid: Vec<f64>,
    /// coefficient g of the tangential part g(r) phi
    pub tangential: Vec<f64>,
    /// coefficient f of the normal part f(r) dr ^ psi
    pub normal: Vec<f64>,
    pub degree: usize,
    /// link eigenvalue of phi
    pub mu_tangential: f64,
    /// link eigenvalue of psi
    pub mu_normal: f64,
}

impl SeparatedForm {
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 4 {
            return Err(invalid("grid too short for second-order stencils (need >= 4 points)"));
        }
        if self.grid.len() != self.tangential.len() || self.grid.len() != self.normal.len() {
            return Err(invalid("component arrays must match the grid length"));
        }
        for w in self.grid.windows(2) {
            if w[1] <= w[0] {
                return Err(invalid("grid must be strictly increasing"));
            }
        }
        if self.grid[0] <= 0.0 || *self.grid.last().unwrap() > 1.0 + 1e-12 {
            return Err(invalid("grid must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// The four radial coefficient streams of Delta beta, tagged by the link
/// factor they multiply.
#[derive(Debug, Clone)]
pub struct SeparatedLaplacian {
    pub grid: Vec<f64>,
    /// multiplies phi
    pub tangential: Vec<f64>,
    /// multiplies dr ^ psi
    pub normal: Vec<f64>,
    /// multiplies dr ^ codiff phi
    pub cross_tangential: Vec<f64>,
    /// multiplies diff psi
    pub cross_normal: Vec<f64>,
}

/// Apply the separated Laplacian by finite differences: central second-order
/// stencils in the interior, one-sided second-order at the grid ends.
pub fn separated_laplacian(form: &SeparatedForm, m: usize) -> Result<SeparatedLaplacian> {
    form.validate()?;
    let i = form.degree as f64;
    let p_tan = m as f64 - 2.0 * i;
    let p_nor = p_tan + 2.0;
    let (g1, g2) = derivatives(&form.grid, &form.tangential);
    let (f1, f2) = derivatives(&form.grid, &form.normal);
    let n = form.grid.len();
    let mut out = SeparatedLaplacian {
        grid: form.grid.clone(),
        tangential: vec![0.0; n],
        normal: vec![0.0; n],
        cross_tangential: vec![0.0; n],
        cross_normal: vec![0.0; n],
    };
    for j in 0..n {
        let r = form.grid[j];
        let g = form.tangential[j];
        let f = form.normal[j];
        out.tangential[j] = -g2[j] - p_tan * g1[j] / r + form.mu_tangential * g / (r * r);
        out.normal[j] =
            -f2[j] - p_nor * f1[j] / r + p_nor * f / (r * r) + form.mu_normal * f / (r * r);
        out.cross_tangential[j] = -2.0 * g / (r * r * r);
        out.cross_normal[j] = -2.0 * f / r;
    }
    Ok(out)
}

/// First and second derivatives on an arbitrary grid: 3-point central
/// stencils inside, 4-point one-sided stencils at the two ends.
fn derivatives(grid: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for j in 0..n {
        let (lo, hi) = if j == 0 {
            (0, 3.min(n - 1))
        } else if j == n - 1 {
            (n - 4, n - 1)
        } else {
            (j - 1, j + 1)
        };
        let stencil = &grid[lo..=hi];
        let w1 = fd_weights(grid[j], stencil, 1);
        let w2 = fd_weights(grid[j], stencil, 2);
        for (s, idx) in (lo..=hi).enumerate() {
            d1[j] += w1[s] * values[idx];
            d2[j] += w2[s] * values[idx];
        }
    }
    (d1, d2)
}

/// Fornberg finite-difference weights for the m-th derivative at z over the
/// stencil x (exact for polynomials of degree x.len()-1).
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Residuals of the homogeneous solutions under the tangential operator,
/// evaluated analytically (no finite differences):
///   T[r^a]          = (mu - a^2 + 2 alpha a) r^{a-2}
///   T[r^a log r]    = ... + (2 alpha - 2a) r^{a-2}      (log branch, nu = 0)
#[derive(Debug, Clone, Copy)]
pub struct HarmonicCheck {
    pub residual_plus: f64,
    pub residual_minus: f64,
    /// residual of r^alpha log r; only meaningful when nu = 0
    pub residual_log: Option<f64>,
}

impl HarmonicCheck {
    pub fn max(&self) -> f64 {
        self.residual_plus
            .max(self.residual_minus)
            .max(self.residual_log.unwrap_or(0.0))
    }
}

pub fn radial_harmonic_check(idx: &ConeIndices, grid: &[f64]) -> HarmonicCheck {
    // T[r^a] = [-a(a-1) - (m-2i) a + mu] r^{a-2}; with m-2i = 1-2alpha the
    // bracket is mu - a^2 + 2 alpha a, which vanishes exactly at a = a_pm.
    let p = idx.weight_exponent();
    let bracket = |a: f64| idx.mu - a * a - p * a + a; // mu - a(a-1) - p a
    let mut check = HarmonicCheck {
        residual_plus: 0.0,
        residual_minus: 0.0,
        residual_log: None,
    };
    for &r in grid {
        check.residual_plus = check
            .residual_plus
            .max((bracket(idx.a_plus) * r.powf(idx.a_plus - 2.0)).abs());
        check.residual_minus = check
            .residual_minus
            .max((bracket(idx.a_minus) * r.powf(idx.a_minus - 2.0)).abs());
    }
    if idx.is_log_case() {
        // T[r^alpha log r] = bracket(alpha) log r r^{alpha-2}
        //                  + (2 alpha - 1 - (m-2i)) ... = (2alpha - 1 + 2alpha - ...)
        // with 2 alpha = 1 + 2i - m the non-log coefficient is
        // -(2 alpha - 1) - (m - 2i) = 0 exactly.
        let coef_log = bracket(idx.alpha);
        let coef_plain = -(2.0 * idx.alpha - 1.0) - p;
        let mut worst = 0.0f64;
        for &r in grid {
            let v = (coef_log * r.ln() + coef_plain) * r.powf(idx.alpha - 2.0);
            worst = worst.max(v.abs());
        }
        check.residual_log = Some(worst);
    }
    check
}

/// Uniform grid helper on (a, b], endpoint inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && b > a);
    (1..=n).map(|j| a + (b - a) * j as f64 / n as f64).collect()
}
