//! Least-squares fit of small-time heat-trace samples to a singular
//! expansion sum_p a_p t^p + b log t, the data behind both the Mellin
//! continuation at s = 0 and the residue diagnostics.

use crate::error::{Error, Result};

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceFit {
    /// exponents of the power basis, ascending
    pub powers: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// coefficient of log t
    pub log_coefficient: f64,
    /// 3-sigma band on the log coefficient from the fit residual
    pub log_coefficient_band: f64,
    /// rms of the relative residual over the window
    pub residual_rms: f64,
    /// diagonal-ratio estimate of the scaled design conditioning
    pub condition: f64,
    pub window: (f64, f64),
}

impl TraceFit {
    pub fn coefficient_of(&self, power: f64) -> f64 {
        for (p, c) in self.powers.iter().zip(&self.coefficients) {
            if (p - power).abs() < 1e-12 {
                return *c;
            }
        }
        0.0
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let mut v = self.log_coefficient * t.ln();
        for (p, c) in self.powers.iter().zip(&self.coefficients) {
            v += c * t.powf(*p);
        }
        v
    }
}

/// Fit trace samples (t, theta(t)) on a window to powers
/// min_power, min_power + 1/2, ..., plus one log t column. The number of
/// powers is chosen by even/odd cross-validation. Rows are weighted by
/// 1/|theta| so the flat large-t end of the window is not drowned by the
/// singular end.
pub fn fit_trace_expansion(
    samples: &[(f64, f64)],
    min_power: f64,
    max_powers: usize,
) -> Result<TraceFit> {
    if samples.len() < 8 {
        return Err(Error::InvalidArgument(
            "need at least 8 trace samples for a stable fit".into(),
        ));
    }
    let max_abs = samples.iter().fold(0.0f64, |a, &(_, v)| a.max(v.abs()));
    if max_abs < 1e-280 {
        // identically vanishing trace (exact cancellation): zero expansion
        return Ok(TraceFit {
            powers: vec![min_power, min_power + 0.5, min_power + 1.0],
            coefficients: vec![0.0; 3],
            log_coefficient: 0.0,
            log_coefficient_band: 0.0,
            residual_rms: 0.0,
            condition: 1.0,
            window: (samples[0].0, samples[samples.len() - 1].0),
        });
    }
    let even: Vec<(f64, f64)> = samples.iter().copied().step_by(2).collect();
    let odd: Vec<(f64, f64)> = samples.iter().skip(1).copied().step_by(2).collect();
    let mut trials: Vec<(f64, usize)> = Vec::new();
    let max_feasible = max_powers.min(even.len().saturating_sub(2));
    for n_pow in 3..=max_feasible.max(3) {
        let fit = solve_ls(&even, min_power, n_pow)?;
        let mut err = 0.0f64;
        for &(t, v) in &odd {
            let rel = (fit_eval(&fit, min_power, t) - v) / v.abs().max(1e-8 * max_abs);
            err += rel * rel;
        }
        trials.push(((err / odd.len() as f64).sqrt(), n_pow));
    }
    let best_err = trials.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    // parsimony: the smallest basis within 1.5x of the best validation
    // error; oversized bases let the log column absorb power-term mass
    let n_pow = trials
        .iter()
        .find(|(e, _)| *e <= 1.5 * best_err.max(1e-15))
        .map(|(_, n)| *n)
        .unwrap();
    let sol = solve_ls(samples, min_power, n_pow)?;
    let powers: Vec<f64> = (0..n_pow).map(|j| min_power + 0.5 * j as f64).collect();
    let mut residual = 0.0f64;
    for &(t, v) in samples {
        let rel = (fit_eval(&sol, min_power, t) - v) / v.abs().max(1e-300);
        residual += rel * rel;
    }
    let residual_rms = (residual / samples.len() as f64).sqrt();
    if sol.condition > 1e12 {
        return Err(Error::Numerical(format!(
            "trace fit is ill-conditioned (condition estimate {:.2e})",
            sol.condition
        )));
    }
    Ok(TraceFit {
        powers,
        coefficients: sol.coeffs[..n_pow].to_vec(),
        log_coefficient: sol.coeffs[n_pow],
        log_coefficient_band: 3.0 * residual_rms.max(1e-16) * sol.log_col_amplification,
        residual_rms,
        condition: sol.condition,
        window: (samples[0].0, samples[samples.len() - 1].0),
    })
}

struct LsSolution {
    coeffs: Vec<f64>,
    condition: f64,
    /// norm of the solution-map row for the log column: converts residual
    /// size into log-coefficient uncertainty
    log_col_amplification: f64,
}

fn fit_eval(sol: &LsSolution, min_power: f64, t: f64) -> f64 {
    let n_pow = sol.coeffs.len() - 1;
    let mut v = sol.coeffs[n_pow] * t.ln();
    for (j, c) in sol.coeffs[..n_pow].iter().enumerate() {
        v += c * t.powf(min_power + 0.5 * j as f64);
    }
    v
}

/// Weighted least squares via Householder QR with column scaling.
#[allow(clippy::needless_range_loop)]
fn solve_ls(samples: &[(f64, f64)], min_power: f64, n_pow: usize) -> Result<LsSolution> {
    let max_abs = samples.iter().fold(0.0f64, |a, &(_, v)| a.max(v.abs()));
    let rows = samples.len();
    let cols = n_pow + 1;
    if rows < cols + 1 {
        return Err(Error::InvalidArgument("fewer samples than coefficients".into()));
    }
    let mut a = vec![vec![0.0f64; cols]; rows];
    let mut b = vec![0.0f64; rows];
    for (r, &(t, v)) in samples.iter().enumerate() {
        let w = 1.0 / v.abs().max(1e-8 * max_abs);
        for j in 0..n_pow {
            a[r][j] = w * t.powf(min_power + 0.5 * j as f64);
        }
        a[r][n_pow] = w * t.ln();
        b[r] = w * v;
    }
    // column scaling for conditioning
    let mut scale = vec![0.0f64; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = a.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt();
        *s = if norm > 0.0 { norm } else { 1.0 };
    }
    for row in a.iter_mut() {
        for (j, s) in scale.iter().enumerate() {
            row[j] /= s;
        }
    }
    // Householder QR in place
    let mut diag_max = 0.0f64;
    let mut diag_min = f64::INFINITY;
    for j in 0..cols {
        let mut norm = 0.0f64;
        for row in a.iter().skip(j) {
            norm += row[j] * row[j];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return Err(Error::Numerical("rank-deficient design matrix".into()));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0f64; rows];
        for (r, row) in a.iter().enumerate().skip(j) {
            v[r] = row[j];
        }
        v[j] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in j..cols {
                let dot: f64 = (j..rows).map(|r| v[r] * a[r][c]).sum();
                let f = 2.0 * dot / vnorm2;
                for r in j..rows {
                    a[r][c] -= f * v[r];
                }
            }
            let dot: f64 = (j..rows).map(|r| v[r] * b[r]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in j..rows {
                b[r] -= f * v[r];
            }
        }
        a[j][j] = alpha;
        diag_max = diag_max.max(alpha.abs());
        diag_min = diag_min.min(alpha.abs());
    }
    // back substitution
    let mut x = vec![0.0f64; cols];
    for j in (0..cols).rev() {
        let mut s = b[j];
        for c in j + 1..cols {
            s -= a[j][c] * x[c];
        }
        x[j] = s / a[j][j];
    }
    // undo column scaling
    for (j, s) in scale.iter().enumerate() {
        x[j] /= s;
    }
    // amplification of the log column: solve R^T y = e_log, norm of R^{-1} y
    // approximated by the diagonal ratio (cheap, diagnostic only)
    let log_col_amplification = diag_max / a[cols - 1][cols - 1].abs() / scale[cols - 1];
    Ok(LsSolution {
        coeffs: x,
        condition: diag_max / diag_min,
        log_col_amplification,
    })
}

/// Geometric sample grid in [lo, hi].
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo && lo > 0.0);
    (0..count)
        .map(|j| lo * (hi / lo).powf(j as f64 / (count - 1) as f64))
        .collect()
}
