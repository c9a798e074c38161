//! Special functions: Faddeeva `w`, `sinc`, and the oscillatory power
//! integral behind the bare two-photon interference term.

use crate::{C64, I};
use errorfunctions::ComplexErrorFunctions;
use std::f64::consts::PI;

/// Faddeeva function `w(z) = e^{−z²} erfc(−iz)`.
#[inline]
pub fn faddeeva(z: C64) -> C64 {
    z.w()
}

/// `w'(z) = −2z w(z) + 2i/√π`.
#[inline]
pub fn faddeeva_derivative(z: C64, wz: C64) -> C64 {
    -2.0 * z * wz + 2.0 * I / PI.sqrt()
}

/// `sin(x)/x` with the removable point filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `K(T) = ∫_{1/2}^∞ (2v^{−3/2} − v^{−5/2}) e^{iTv} dv`, `T ≥ 0`.
///
/// Goes through upper incomplete gamma functions of negative half-integer
/// order: upward recurrence from `erfc` for small `T`, continued fraction
/// otherwise.
pub fn k_integral(t_big: f64) -> C64 {
    if t_big == 0.0 {
        return C64::new(8.0 * 2f64.sqrt() / 3.0, 0.0);
    }
    let x = C64::new(0.0, -t_big / 2.0);
    let mit = C64::new(0.0, -t_big);
    let (g1, g3) = if t_big <= 2.0 {
        let y = x.sqrt();
        let ex = (-x).exp();
        let g_half = PI.sqrt() * ex * faddeeva(I * y);
        let g_m_half = -2.0 * (g_half - ex / y);
        (g_m_half, (g_m_half - ex / (x * y)) / -1.5)
    } else {
        (gamma_upper_cf(-0.5, x), gamma_upper_cf(-1.5, x))
    };
    // ∫_{1/2}^∞ v^{a−1} e^{iTv} dv = (−iT)^{−a} Γ(a, −iT/2)
    2.0 * mit.powf(0.5) * g1 - mit.powf(1.5) * g3
}

/// Upper incomplete gamma `Γ(a, x)` by its continued fraction (modified
/// Lentz), for `|x|` of order one or larger off the negative real axis.
pub fn gamma_upper_cf(a: f64, x: C64) -> C64 {
    let tiny = 1e-300;
    let b0 = x + 1.0 - a;
    let mut f = if b0.norm() < tiny { C64::new(tiny, 0.0) } else { b0 };
    let mut c = f;
    let mut d = C64::new(0.0, 0.0);
    for n in 1..10_000 {
        let an = -(n as f64) * (n as f64 - a);
        let bn = x + (2 * n + 1) as f64 - a;
        d = bn + an * d;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = bn + an / c;
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-x).exp() * x.powf(a) / f
}

/// `∫_V^∞ v^s e^{iTv} dv` by repeated integration by parts; valid for `TV ≫ 1`.
pub fn power_tail(s: f64, t_big: f64, v: f64) -> C64 {
    let it = C64::new(0.0, t_big);
    let mut coef = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        let term = coef * v.powf(s - k as f64) / it.powi(k as i32 + 1);
        let mag = term.norm();
        if mag > prev {
            break;
        }
        sum += term;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        prev = mag;
        coef *= -(s - k as f64);
    }
    -(it * v).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_numeric(t_big: f64) -> C64 {
        let l = 200.0;
        let body = crate::contour::gl_panels(0.5, l, 200_000, |v| {
            (2.0 * v.powf(-1.5) - v.powf(-2.5)) * (I * t_big * v).exp()
        });
        body + 2.0 * power_tail(-1.5, t_big, l) - power_tail(-2.5, t_big, l)
    }

    #[test]
    fn k_branches_agree_with_brute_force() {
        for t in [0.5, 1.9, 2.1, 40.0, 99.0, 150.0, 2000.0] {
            let a = k_integral(t);
            let b = k_numeric(t);
            assert!((a - b).norm() < 1e-10, "T={t}: {a} vs {b}");
        }
    }

    #[test]
    fn k_is_continuous_at_switch() {
        let a = k_integral(2.0);
        let b = k_integral(2.0 + 1e-12);
        assert!((a - b).norm() < 1e-12, "{a} {b}");
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(1e-5) - (1e-5f64).sin() / 1e-5).abs() < 3e-16);
    }

    #[test]
    fn faddeeva_derivative_matches_difference() {
        let z = C64::new(0.3, 0.7);
        let h = 1e-6;
        let fd = (faddeeva(z + h) - faddeeva(z - h)) / (2.0 * h);
        assert!((faddeeva_derivative(z, faddeeva(z)) - fd).norm() < 1e-8);
    }
}
