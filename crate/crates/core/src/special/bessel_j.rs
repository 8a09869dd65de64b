//! Bessel J_n for integer orders via Miller's downward recurrence, and the
//! zero/extremum finders used to build drum spectra on disks and cone sectors.

/// J_0(x), ..., J_{n_max}(x) in one pass. Stable for x up to a few hundred.
pub fn bessel_j_array(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "bessel_j_array requires x > 0");
    let start = n_max.max(x.ceil() as usize) + 1 + (15.0 + 2.0 * x.sqrt()) as usize;
    let mut out = vec![0.0f64; n_max + 1];
    let mut jp = 0.0f64; // J_{m+1} (unnormalized)
    let mut j = 1e-30f64; // J_m
    let mut norm = 0.0f64; // J_0 + 2 sum J_{2k}
    for m in (0..=start).rev() {
        let jm = (2.0 * (m as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        if m % 2 == 0 {
            norm += if m == 0 { j } else { 2.0 * j };
        }
        if m <= n_max {
            out[m] = j;
        }
        // rescale before overflow; rescaling preserves all ratios
        if j.abs() > 1e250 {
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            for v in out.iter_mut() {
                *v /= 1e250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

pub fn bessel_jn(n: usize, x: f64) -> f64 {
    bessel_j_array(n + 1, x)[n]
}

/// J_n'(x) = (J_{n-1} - J_{n+1})/2, with J_0' = -J_1.
pub fn bessel_jn_prime(n: usize, x: f64) -> f64 {
    let arr = bessel_j_array(n + 1, x);
    if n == 0 {
        -arr[1]
    } else {
        0.5 * (arr[n - 1] - arr[n + 1])
    }
}

/// All sign-change roots of `f` in (lo, hi], located by a fixed-step scan and
/// refined by bisection. The step must be below the minimal root spacing.
pub fn zeros_by_scan(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if hi <= lo {
        return roots;
    }
    let mut x0 = lo;
    let mut f0 = f(x0);
    while x0 < hi {
        let x1 = (x0 + step).min(hi);
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b) = (x0, x1);
            let mut fa = f0;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 || (b - a) < 1e-14 * m.max(1.0) {
                    a = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Positive zeros of J_n up to x_max.
pub fn bessel_j_zeros(n: usize, x_max: f64) -> Vec<f64> {
    // J_n > 0 on (0, j_{n,1}) and j_{n,1} > n; start the scan where the
    // function is still representable.
    let lo = if n == 0 { 0.05 } else { (0.75 * n as f64).max(0.05) };
    // consecutive zeros of J_n are separated by more than pi for n >= 1
    zeros_by_scan(|x| bessel_jn(n, x), lo, x_max, 0.5)
}

/// Positive zeros of J_n' up to x_max (x = 0 excluded).
pub fn bessel_j_prime_zeros(n: usize, x_max: f64) -> Vec<f64> {
    let lo = if n == 0 { 0.5 } else { (0.75 * n as f64).max(0.05) };
    zeros_by_scan(|x| bessel_jn_prime(n, x), lo, x_max, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt.
    fn jn_quadrature(n: usize, x: f64) -> f64 {
        let m = 200_000usize;
        let h = std::f64::consts::PI / m as f64;
        let f = |t: f64| ((n as f64) * t - x * t.sin()).cos();
        let mut s = f(0.0) + f(std::f64::consts::PI);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0 / std::f64::consts::PI
    }

    #[test]
    fn miller_matches_quadrature() {
        for &(n, x) in &[(0usize, 1.0), (0, 14.7), (1, 2.0), (5, 3.0), (12, 40.0), (40, 55.0), (80, 100.0)] {
            let got = bessel_jn(n, x);
            let want = jn_quadrature(n, x);
            assert!(
                (got - want).abs() < 1e-11,
                "J_{n}({x}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn classical_zeros() {
        let z0 = bessel_j_zeros(0, 15.0);
        assert!((z0[0] - 2.404_825_557_695_773).abs() < 1e-10);
        assert!((z0[1] - 5.520_078_110_286_311).abs() < 1e-10);
        let z1 = bessel_j_zeros(1, 15.0);
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-10);
        let zp1 = bessel_j_prime_zeros(1, 15.0);
        assert!((zp1[0] - 1.841_183_781_340_659).abs() < 1e-10);
        // J_0' = -J_1, so their zero sets coincide
        let zp0 = bessel_j_prime_zeros(0, 15.0);
        assert!((zp0[0] - z1[0]).abs() < 1e-10);
    }

    #[test]
    fn zero_counts_follow_mcmahon() {
        // number of zeros of J_n below x is ~ (x - n pi/2 - pi/4)/pi for x >> n
        for n in [0usize, 3, 10] {
            let x_max = 120.0;
            let count = bessel_j_zeros(n, x_max).len() as f64;
            let est = (x_max - n as f64 * std::f64::consts::FRAC_PI_2
                - std::f64::consts::FRAC_PI_4)
                / std::f64::consts::PI;
            assert!((count - est).abs() < 3.0, "n={n}: {count} vs {est}");
        }
    }

    #[test]
    fn high_order_zero_location() {
        // first zero of J_60: j_{60,1} ~ 60 + 1.8557*60^{1/3} + ...
        let z = bessel_j_zeros(60, 80.0);
        assert!(!z.is_empty());
        let approx = 60.0 + 1.855_757 * 60.0f64.powf(1.0 / 3.0);
        assert!((z[0] - approx).abs() < 1.0, "j_60_1 = {} vs {approx}", z[0]);
    }
}
