//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use offshell_core::{FourVector, Real, WorldlineState};

pub const P: u32 = 256;

pub fn r(v: f64) -> Real {
    Real::from_f64(P, v)
}

pub fn rs(v: &str) -> Real {
    Real::parse(P, v).unwrap()
}

pub fn rel_err(a: &Real, b: &Real) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        return 0.0;
    }
    (d / b.abs().max(&a.abs())).to_f64()
}

/// Minkowski product written out independently of the library.
pub fn mdot(a: &FourVector, b: &FourVector) -> Real {
    &a.x * &b.x + &a.y * &b.y + &a.z * &b.z - &a.t * &b.t
}

/// An above-shell worldline state from spatial velocity, ε and the higher
/// derivatives (arbitrary four-vectors).
pub fn worldline(vs: [f64; 3], eps: f64, a: [f64; 4], j: [f64; 4]) -> WorldlineState {
    let [x, y, z] = vs.map(r);
    let ut = (r(1.0 + eps) + &x * &x + &y * &y + &z * &z).sqrt();
    WorldlineState::new(FourVector::new(ut, x, y, z), FourVector::from_f64(P, a), FourVector::from_f64(P, j))
}

/// Neville-style Richardson table on samples at h, h/q, h/q², … with error
/// powers 1, 2, 3, …
pub fn extrapolate(samples: &[Real], q: f64) -> Real {
    let mut t: Vec<Real> = samples.to_vec();
    let mut pow = q;
    for _ in 1..samples.len() {
        t = (1..t.len()).map(|i| (&t[i] * pow - &t[i - 1]) / (pow - 1.0)).collect();
        pow *= q;
    }
    t.remove(0)
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton on the three-term
/// recurrence), positive nodes only; `n` must be even.
pub fn gauss_legendre_rule(n: usize, p: u32) -> Vec<(Real, Real)> {
    assert!(n % 2 == 0);
    let mut out = Vec::new();
    for i in 1..=n / 2 {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Real::from_f64(p, guess);
        let mut dp = Real::one(p);
        for _ in 0..100 {
            let (mut p0, mut p1) = (Real::one(p), x.clone());
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((&x * &p1) * (2.0 * k - 1.0) - &p0 * (k - 1.0)) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = (&x * &p1 - &p0) * (n as f64) / (&x * &x - 1.0);
            let dx = &p1 / &dp;
            x -= &dx;
            if dx.abs() < Real::exp2i(p, -(p as i32) + 4) {
                break;
            }
        }
        let w = Real::from_i64(p, 2) / ((Real::one(p) - &x * &x) * &dp * &dp);
        out.push((x, w));
    }
    out
}

/// ∫ₐᵇ f with one n-point Gauss–Legendre panel.
pub fn gl_panel(f: &impl Fn(&Real) -> Real, a: &Real, b: &Real, rule: &[(Real, Real)]) -> Real {
    let mid = (a + b).mul_exp2(-1);
    let half = (b - a).mul_exp2(-1);
    let mut acc = Real::zero(a.prec());
    for (x, w) in rule {
        acc += w * (f(&(&mid + &half * x)) + f(&(&mid - &half * x)));
    }
    acc * half
}

/// ∫₀^b x^λ·φ(x) dx for λ > −1 and polynomial φ. The substitution x = b·y^k
/// with k = ⌈4/(λ+1)⌉ leaves the factor y^{k(λ+1)−1} (exponent ≥ 3); panels
/// [2^{−i−1}, 2^{−i}] graded towards 0 then make each panel smooth on its own
/// scale, and the neglected [0, 2^{−40}] contributes below 2^{−160}.
pub fn power_weighted_integral(lambda: &Real, coeffs: &[Real], b: &Real) -> Real {
    let p = b.prec();
    let k = (4.0 / (lambda.to_f64() + 1.0)).ceil().max(1.0);
    let expo = (lambda + 1.0) * k - 1.0;
    let scale = b.powf(&(lambda + 1.0)) * k;
    let f = |y: &Real| {
        let x = b * y.powf(&y.lit(k));
        let mut phi = y.zero_like();
        for c in coeffs.iter().rev() {
            phi = phi * &x + c;
        }
        y.powf(&expo) * phi
    };
    let rule = gauss_legendre_rule(40, p);
    let mut acc = Real::zero(p);
    for i in 0..40 {
        let hi = Real::exp2i(p, -i);
        let lo = hi.mul_exp2(-1);
        acc += gl_panel(&f, &lo, &hi, &rule);
    }
    acc * scale
}
