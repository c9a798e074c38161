//! Brute-force real-axis quadrature, used to cross-check the contour method.

use crate::biphoton::{BiphotonSpec, ExponentSign};
use crate::contour::{biphoton_norm, QuadratureConfig};
use crate::response::ResponseFunction;
use crate::{Error, Result, C64, I};
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525029459,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// 21-point Kronrod estimate and its difference from the embedded Gauss rule.
fn gk21<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = C64::new(0.0, 0.0);
    for j in 0..10 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Piece {
    err: f64,
    a: f64,
    b: f64,
    val: C64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss–Kronrod: start from `n0` equal pieces, bisect the
/// worst piece until the summed error estimate is below `abs_tol`.
pub fn adaptive<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, n0: usize, abs_tol: f64, max_pieces: usize) -> Result<(C64, f64)> {
    let n0 = n0.max(1);
    let w = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut total_err = 0.0;
    for k in 0..n0 {
        let lo = a + w * k as f64;
        let hi = if k + 1 == n0 { b } else { lo + w };
        let (val, err) = gk21(&mut f, lo, hi);
        total_err += err;
        heap.push(Piece { err, a: lo, b: hi, val });
    }
    while total_err > abs_tol {
        if heap.len() >= max_pieces {
            return Err(Error::QuadratureFailure(format!(
                "adaptive budget exhausted, error estimate {total_err:e}"
            )));
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk21(&mut f, p.a, m);
        let (v2, e2) = gk21(&mut f, m, p.b);
        total_err += e1 + e2 - p.err;
        heap.push(Piece { err: e1, a: p.a, b: m, val: v1 });
        heap.push(Piece { err: e2, a: m, b: p.b, val: v2 });
    }
    // sum in position order so the result does not depend on heap layout
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let val = pieces.iter().map(|p| p.val).sum();
    Ok((val, total_err))
}

/// Half-width of the real-axis window: beyond it the oscillating part of
/// `|F|²` integrates to less than `tol`.
pub fn window(b: f64, abs_tol: f64) -> f64 {
    (1.0 / (8.0 * b.powi(3) * abs_tol)).powf(0.2).max(40.0)
}

/// `h(z) = S*(ω_L − z) S(ω_L + z)` by direct linear solves.
pub fn spectral_product_direct(resp: &ResponseFunction, omega_l: f64, z: f64) -> Result<C64> {
    Ok(resp.eval(C64::new(omega_l - z, 0.0))?.conj() * resp.eval(C64::new(omega_l + z, 0.0))?)
}

/// `∫|F(z)|² h(z) e^{±2izt} dz` on the real axis.
///
/// The window `[−Z, Z]` is integrated adaptively; outside it `|F|²` is
/// replaced by its envelope `1/(2b²z⁴)` and integrated after `z = Z/u`.
pub fn oracle_integral(t: f64, resp: &ResponseFunction, spec: &BiphotonSpec, cfg: &QuadratureConfig, sign: ExponentSign) -> Result<C64> {
    let b = spec.b;
    let s = sign.value();
    let abs_tol = cfg.oracle_tolerance * biphoton_norm(b) * 1e-2;
    let z_max = window(b, abs_tol);
    let mut failure = None;
    let mut f = |z: f64| -> C64 {
        let fz = crate::special::sinc(b * z * z);
        match spectral_product_direct(resp, spec.omega_l, z) {
            Ok(h) => fz * fz * h * (2.0 * I * s * z * t).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    };
    // pieces narrow enough to follow both sinc and delay oscillations
    let rate = 2.0 * b * z_max + 2.0 * t.abs() + 1.0;
    let n0 = ((2.0 * z_max * rate / std::f64::consts::PI) as usize).max(64);
    let (inner, _) = adaptive(&mut f, -z_max, z_max, n0, abs_tol, 50_000_000)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut tail_failure = None;
    let mut tail = |u: f64, zsgn: f64| -> C64 {
        if u == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let z = zsgn * z_max / u;
        match spectral_product_direct(resp, spec.omega_l, z) {
            Ok(h) => h * (2.0 * I * s * z * t).exp() * u * u / (2.0 * b * b * z_max.powi(3)),
            Err(e) => {
                tail_failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    };
    let mut g = |u: f64| tail(u, 1.0) + tail(u, -1.0);
    let (outer, _) = adaptive(&mut g, 0.0, 1.0, 64, abs_tol, 1_000_000)?;
    if let Some(e) = tail_failure {
        return Err(e);
    }
    Ok(inner + outer)
}
