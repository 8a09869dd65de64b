//! Exponential integral E1, used for the exact upper Mellin tail
//! `int_1^inf t^{-1} e^{-lambda t} dt = E1(lambda)`.

use crate::special::gamma::EULER_GAMMA;

/// E1(x) for x > 0 to near machine precision.
pub fn expint_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires positive argument");
    if x <= 1.0 {
        // power series: E1 = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // modified Lentz continued fraction for E1(x) = e^{-x} * CF
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x).exp() * h
    }
}
