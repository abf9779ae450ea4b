//! Regularization of the self-interaction near the coincidence limit.
//!
//! Near τ′ → τ the interval R(τ, τ−h) vanishes like h², and the numerator
//! tensor h^{αβ} like h². Writing R = h²·T(h) and h^{αβ} = h²·k(h), the finite
//! part of the singular pairing is carried by
//!
//! ```text
//! φ(h) = k(h)·T(h)^{−5/2},   φ″(0) = (−10 b₀r₀r₂ + 35 b₀r₁² − 20 b₁r₀r₁ + 4 b₂r₀²) / (4 r₀^{9/2})
//! ```
//!
//! with k = b₀ + b₁h + ½b₂h² and T = r₀ + r₁h + ½r₂h². The Gel'fand machinery
//! below (regularized pairings of x₊^λ, their residues, and the residue of a
//! factorized R₊^{−λ}) is restricted to polynomial test functions, so every
//! integral is closed-form.

use crate::error::{Error, Result};
use crate::kinematics::{minkowski_dot, FourVector};
use crate::real::Real;
use crate::series::TaylorPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCoefficients {
    pub b0: Real,
    pub b1: Real,
    pub b2: Real,
    pub r0: Real,
    pub r1: Real,
    pub r2: Real,
}

impl ExpansionCoefficients {
    pub fn from_f64(prec: u32, b: [f64; 3], r: [f64; 3]) -> ExpansionCoefficients {
        let [b0, b1, b2] = b.map(|v| Real::from_f64(prec, v));
        let [r0, r1, r2] = r.map(|v| Real::from_f64(prec, v));
        ExpansionCoefficients { b0, b1, b2, r0, r1, r2 }
    }

    /// k(h) = b₀ + b₁h + ½b₂h²
    pub fn k_series(&self, order: usize) -> TaylorPoly {
        let half_b2 = self.b2.mul_exp2(-1);
        TaylorPoly::new(vec![self.b0.clone(), self.b1.clone(), half_b2], order).expect("non-empty")
    }

    /// T(h) = r₀ + r₁h + ½r₂h²
    pub fn t_series(&self, order: usize) -> TaylorPoly {
        let half_r2 = self.r2.mul_exp2(-1);
        TaylorPoly::new(vec![self.r0.clone(), self.r1.clone(), half_r2], order).expect("non-empty")
    }
}

pub fn phi_second_derivative(c: &ExpansionCoefficients) -> Result<Real> {
    if !(c.r0 > 0.0) {
        return Err(Error::Domain(format!("r0 must be positive (r0 = {})", c.r0)));
    }
    let r0 = &c.r0;
    let num = -10.0 * &c.b0 * r0 * &c.r2 + 35.0 * &c.b0 * &c.r1 * &c.r1 - 20.0 * &c.b1 * r0 * &c.r1
        + 4.0 * &c.b2 * r0 * r0;
    // r₀^{9/2} = r₀⁴·√r₀
    let den = 4.0 * r0.powi(4) * r0.sqrt();
    Ok(num / den)
}

/// A worldline x(s) = Σ cₖ sᵏ with four-vector coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyWorldline {
    coeffs: Vec<FourVector>,
}

impl PolyWorldline {
    pub fn new(coeffs: Vec<FourVector>) -> Result<PolyWorldline> {
        if coeffs.is_empty() {
            return Err(Error::Domain("worldline needs at least one coefficient".into()));
        }
        Ok(PolyWorldline { coeffs })
    }

    /// The polynomial whose derivatives at s = 0 are `jets` (x, ẋ, ẍ, …).
    pub fn from_jets(jets: &[FourVector]) -> Result<PolyWorldline> {
        let mut fact = 1.0f64;
        let mut coeffs = Vec::with_capacity(jets.len());
        for (k, v) in jets.iter().enumerate() {
            if k > 1 {
                fact *= k as f64;
            }
            let inv = v.t.lit(1.0) / fact;
            coeffs.push(v.scale(&inv));
        }
        PolyWorldline::new(coeffs)
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn position(&self, s: &Real) -> FourVector {
        self.derivative(0, s)
    }

    /// k-th derivative at s.
    pub fn derivative(&self, k: usize, s: &Real) -> FourVector {
        let prec = self.prec();
        let mut acc = FourVector::zero(prec);
        for n in (k..self.coeffs.len()).rev() {
            // n!/(n−k)!
            let mut falling = Real::one(prec);
            for i in 0..k {
                falling *= (n - i) as f64;
            }
            acc = &(&acc * s) + &self.coeffs[n].scale(&falling);
        }
        acc
    }
}

/// R(τ,τ′) = −(x(τ)−x(τ′))·(x(τ)−x(τ′)) − (τ−τ′)²
pub fn worldline_r(z: &PolyWorldline, tau: &Real, tau_prime: &Real) -> Real {
    let dx = &z.position(tau) - &z.position(tau_prime);
    let dt = tau - tau_prime;
    -minkowski_dot(&dx, &dx) - &dt * &dt
}

/// Antisymmetric tensor on the index set {0,1,2,3,5}; slot label 5 is stored
/// at position 4.
#[derive(Clone, Debug, PartialEq)]
pub struct HTensor {
    pub entries: [[Real; 5]; 5],
}

impl HTensor {
    pub const LABELS: [usize; 5] = [0, 1, 2, 3, 5];

    fn slot(label: usize) -> usize {
        match label {
            0..=3 => label,
            5 => 4,
            _ => panic!("no tensor slot labelled {label}"),
        }
    }

    /// Component by index label (0..=3 or 5).
    pub fn get(&self, alpha: usize, beta: usize) -> &Real {
        &self.entries[HTensor::slot(alpha)][HTensor::slot(beta)]
    }

    pub fn max_abs(&self) -> Real {
        let mut m = self.entries[0][0].abs();
        for row in &self.entries {
            for v in row {
                m = m.max(&v.abs());
            }
        }
        m
    }

    /// max |h^{αβ} + h^{βα}|
    pub fn antisymmetry_defect(&self) -> Real {
        let mut m = self.entries[0][0].zero_like();
        for i in 0..5 {
            for j in 0..5 {
                m = m.max(&(&self.entries[i][j] + &self.entries[j][i]).abs());
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(&Real) -> Real) -> HTensor {
        HTensor { entries: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.entries[i][j]))) }
    }

    pub fn add(&self, o: &HTensor) -> HTensor {
        HTensor { entries: std::array::from_fn(|i| std::array::from_fn(|j| &self.entries[i][j] + &o.entries[i][j])) }
    }

    pub fn sub(&self, o: &HTensor) -> HTensor {
        HTensor { entries: std::array::from_fn(|i| std::array::from_fn(|j| &self.entries[i][j] - &o.entries[i][j])) }
    }

    /// Tensor with entries p^α q^β − p^β q^α over five-vectors p, q.
    pub fn wedge(p: &[Real; 5], q: &[Real; 5]) -> HTensor {
        HTensor { entries: std::array::from_fn(|i| std::array::from_fn(|j| &p[i] * &q[j] - &p[j] * &q[i])) }
    }
}

/// Embeds a four-vector with a given fifth component.
pub fn five(v: &FourVector, fifth: Real) -> [Real; 5] {
    [v.t.clone(), v.x.clone(), v.y.clone(), v.z.clone(), fifth]
}

/// h^{αβ} = ż^α(τ′)·∂R/∂x_β − ż^β(τ′)·∂R/∂x_α with ∂R/∂x_μ = −2(x(τ)−x(τ′))^μ,
/// ż⁵ = 1 and x⁵(τ) − x⁵(τ′) = τ − τ′.
pub fn worldline_h_tensor(z: &PolyWorldline, tau: &Real, tau_prime: &Real) -> HTensor {
    let zdot = five(&z.derivative(1, tau_prime), Real::one(z.prec()));
    let dx = &z.position(tau) - &z.position(tau_prime);
    let grad = five(&dx, tau - tau_prime).map(|c| -c.mul_exp2(1));
    HTensor::wedge(&zdot, &grad)
}

/// Largest λ-pole index for a pairing with m subtraction terms: the poles sit
/// at λ = −1, …, −(m+1).
fn pole_at(lambda: &Real, m: usize) -> Option<i64> {
    if lambda.round() != *lambda || !(*lambda < 0.0) {
        return None;
    }
    let n = -lambda.to_f64() as i64;
    (1..=(m as i64 + 1)).contains(&n).then_some(-n)
}

/// Regularized (x₊^λ, φ) for polynomial φ supported on [0, b], with m Taylor
/// subtraction terms. For φ = Σ cₖxᵏ the subtracted integral and the
/// boundary terms combine into Σₖ cₖ b^{λ+k+1}/(λ+k+1).
pub fn gelfand_pair(lambda: &Real, phi: &TaylorPoly, b: &Real, m: usize) -> Result<Real> {
    if !(*b > 0.0) {
        return Err(Error::Domain(format!("support cutoff must be positive (b = {b})")));
    }
    if let Some(p) = pole_at(lambda, m) {
        return Err(Error::Pole(p));
    }
    let mut acc = Real::zero(lambda.prec());
    for (k, c) in phi.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = lambda + (k as f64 + 1.0);
        if k > m && !(e > 0.0) {
            return Err(Error::Domain(format!(
                "x^{lambda}·x^{k} is not integrable at 0; use at least {} subtraction terms",
                k
            )));
        }
        acc += c * b.powf(&e) / &e;
    }
    Ok(acc)
}

/// Residue of (x₊^λ, φ) at λ = −n: φ^{(n−1)}(0)/(n−1)!.
pub fn gelfand_residue(n: usize, phi: &TaylorPoly) -> Result<Real> {
    if n == 0 {
        return Err(Error::Domain("residues exist only at lambda = -1, -2, ...".into()));
    }
    Ok(phi.coeff(n - 1))
}

/// Residue of (R₊^{−λ}, φ) for R = h^m·T(h), φ = h^l·ψ(h), when mλ − l is a
/// positive integer n: b^λ·(−1)^{n−1}·q^{(n−1)}(0) with q = ψ·T^{−λ}.
/// The coefficients of R below h^m and of φ below h^l must vanish.
pub fn remainder_residue(
    r_series: &TaylorPoly,
    m: usize,
    phi_series: &TaylorPoly,
    l: usize,
    lambda: &Real,
    b: &Real,
) -> Result<Real> {
    let n_real = lambda * (m as f64) - (l as f64);
    if n_real.round() != n_real || !(n_real >= 1.0) {
        return Err(Error::Domain(format!("m*lambda - l = {n_real} is not a positive integer")));
    }
    let n = n_real.to_f64() as usize;
    let t = r_series.shift_down(m)?;
    if !(t.coeff(0) > 0.0) {
        return Err(Error::Domain(format!("T(0) = {} must be positive", t.coeff(0))));
    }
    let psi = phi_series.shift_down(l)?;
    let q = &psi * &t.powf(&-lambda)?;
    if q.order() < n - 1 {
        return Err(Error::Domain(format!(
            "series order {} too low for the derivative of order {}",
            q.order(),
            n - 1
        )));
    }
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(b.powf(lambda) * q.derivative_at_zero(n - 1) * sign)
}

/// [`remainder_residue`] without the b^λ prefactor, i.e. the b-independent
/// form that the main-text renormalization uses.
pub fn remainder_residue_unscaled(
    r_series: &TaylorPoly,
    m: usize,
    phi_series: &TaylorPoly,
    l: usize,
    lambda: &Real,
) -> Result<Real> {
    let one = Real::one(lambda.prec());
    remainder_residue(r_series, m, phi_series, l, lambda, &one)
}

/// τ-retarded kernel −(1/4π²)(−x·x − τ²)^{−3/2}, supported where τ > 0 and
/// −x·x − τ² > 0.
pub fn green_kernel(x: &FourVector, tau: &Real) -> Real {
    let zero = tau.zero_like();
    if !(*tau > 0.0) {
        return zero;
    }
    let s = -minkowski_dot(x, x) - tau * tau;
    if !(s > 0.0) {
        return zero;
    }
    let four_pi2 = Real::pi(tau.prec()).powi(2) * 4.0;
    -(s.powi(-3).sqrt()) / four_pi2
}

/// Richardson extrapolation to step 0 of samples taken at steps
/// h, h/r, h/r², … whose error expands in powers first_order, first_order+1, …
pub fn richardson(samples: &[Real], ratio: f64, first_order: i32) -> Real {
    assert!(!samples.is_empty(), "richardson needs samples");
    let mut row: Vec<Real> = samples.to_vec();
    let mut p = first_order;
    while row.len() > 1 {
        let f = ratio.powi(p) - 1.0;
        row = row.windows(2).map(|w| &w[1] + (&w[1] - &w[0]) / f).collect();
        p += 1;
    }
    row.pop().expect("non-empty")
}

/// ∫₀^b f(x) dx by tanh-sinh quadrature with step 2^{−level} on t ∈ [−6, 6].
/// The abscissae are formed as b/(1+e^{−2u}) so points crowd into both
/// endpoints without cancellation, which makes integrable endpoint
/// singularities harmless.
pub fn tanh_sinh(f: impl Fn(&Real) -> Real, b: &Real, level: u32) -> Real {
    let prec = b.prec();
    let half_pi = Real::pi(prec).mul_exp2(-1);
    let step = Real::exp2i(prec, -(level as i32));
    let n = 6i64 << level;
    let mut acc = Real::zero(prec);
    for k in -n..=n {
        let t = &step * (k as f64);
        let sinh = (t.exp() - (-&t).exp()).mul_exp2(-1);
        let cosh = (t.exp() + (-&t).exp()).mul_exp2(-1);
        let u = &half_pi * &sinh;
        let e = (-(u.mul_exp2(1))).exp();
        let x = b / (e.lit(1.0) + &e);
        // dx/dt = b·(π/2)cosh t·2e/(1+e)²
        let one_e = e.lit(1.0) + &e;
        let w = b * &half_pi * &cosh * e.mul_exp2(1) / (&one_e * &one_e);
        if w.is_zero() || !w.is_finite() || x.is_zero() {
            continue;
        }
        acc += f(&x) * w;
    }
    acc * step
}
