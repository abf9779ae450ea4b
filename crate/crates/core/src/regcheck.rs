//! Randomized verification of the regularization identities.
//!
//! Each check draws its inputs from a seeded ChaCha stream, so a given
//! (precision, seed) pair is fully reproducible. Tolerances depend only on the
//! precision; below 128 bits the relaxed row applies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::kinematics::FourVector;
use crate::real::Real;
use crate::regularization::{
    five, gelfand_pair, gelfand_residue, green_kernel, phi_second_derivative, remainder_residue, richardson,
    tanh_sinh, worldline_h_tensor, worldline_r, ExpansionCoefficients, HTensor, PolyWorldline,
};
use crate::series::{TaylorPoly, DEFAULT_ORDER};

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// relative, φ″ closed form vs series arithmetic
    pub phi_rel: f64,
    /// relative (floored at 1), Richardson limit of (λ+n)·pair vs residue
    pub residue_limit: f64,
    /// relative, closed-form pairing vs tanh-sinh quadrature
    pub quadrature_rel: f64,
    /// allowed normalized mismatch of second differences at δ and δ/2
    pub analyticity: f64,
    /// relative, remainder residue vs b^{5/2}·φ″
    pub remainder_rel: f64,
    /// allowed |p − expected| for Richardson-estimated remainder orders
    pub order: f64,
    /// relative (floored at 1), extracted coefficients of R(τ,τ−h)
    pub r_coeff: f64,
    /// absolute, extracted h² coefficient of the numerator tensor
    pub h2_coeff: f64,
    /// base step for remainder-order estimates
    pub order_step: f64,
    /// base step for the h² extraction
    pub h2_step: f64,
}

impl Tolerances {
    pub fn for_precision(bits: u32) -> Tolerances {
        if bits >= 128 {
            Tolerances {
                phi_rel: 1e-20,
                residue_limit: 1e-10,
                quadrature_rel: 1e-25,
                analyticity: 1e-2,
                remainder_rel: 1e-20,
                order: 0.05,
                r_coeff: 1e-10,
                h2_coeff: 1e-10,
                order_step: 2f64.powi(-20),
                h2_step: 2f64.powi(-12),
            }
        } else {
            Tolerances {
                phi_rel: 1e-10,
                residue_limit: 1e-6,
                quadrature_rel: 1e-12,
                analyticity: 1e-2,
                remainder_rel: 1e-10,
                order: 0.1,
                r_coeff: 1e-6,
                h2_coeff: 1e-8,
                order_step: 2f64.powi(-9),
                h2_step: 2f64.powi(-8),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub trials: usize,
    /// Largest observed deviation, in the units the tolerance is stated in.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &'static str, trials: usize, worst: f64, tolerance: f64, detail: String) -> CheckReport {
        let passed = worst.is_finite() && worst <= tolerance;
        CheckReport { name, trials, worst, tolerance, passed, detail }
    }
}

struct Draw {
    rng: ChaCha8Rng,
    prec: u32,
}

impl Draw {
    fn uniform(&mut self, lo: f64, hi: f64) -> Real {
        Real::from_f64(self.prec, self.rng.gen_range(lo..hi))
    }

    fn vector(&mut self, lo: f64, hi: f64) -> FourVector {
        FourVector::new(self.uniform(lo, hi), self.uniform(lo, hi), self.uniform(lo, hi), self.uniform(lo, hi))
    }

    fn poly(&mut self, degree: usize) -> TaylorPoly {
        let c = (0..=degree).map(|_| self.uniform(-1.0, 1.0)).collect();
        TaylorPoly::new(c, degree).expect("non-empty")
    }

    /// Expansion point on a drawn worldline. Below 128 bits it is the origin,
    /// where positions are O(h) and x(τ) − x(τ−h) suffers no cancellation;
    /// otherwise it is drawn from [−½, ½].
    fn expansion_point(&mut self) -> Real {
        if self.prec >= 128 {
            self.uniform(-0.5, 0.5)
        } else {
            Real::zero(self.prec)
        }
    }

    fn expansion(&mut self) -> ExpansionCoefficients {
        ExpansionCoefficients {
            b0: self.uniform(-1.0, 1.0),
            b1: self.uniform(-1.0, 1.0),
            b2: self.uniform(-1.0, 1.0),
            r0: self.uniform(0.1, 2.0),
            r1: self.uniform(-1.0, 1.0),
            r2: self.uniform(-1.0, 1.0),
        }
    }

    /// Quartic worldline with an above-shell velocity at s = 0, passing
    /// through the origin there.
    fn worldline(&mut self) -> PolyWorldline {
        let (vx, vy, vz) = (self.uniform(-0.5, 0.5), self.uniform(-0.5, 0.5), self.uniform(-0.5, 0.5));
        let eps = self.uniform(0.1, 1.0);
        let ut = (eps + 1.0 + &vx * &vx + &vy * &vy + &vz * &vz).sqrt();
        let jets = [
            FourVector::zero(self.prec),
            FourVector::new(ut, vx, vy, vz),
            self.vector(-1.0, 1.0),
            self.vector(-1.0, 1.0),
            self.vector(-1.0, 1.0),
        ];
        PolyWorldline::from_jets(&jets).expect("non-empty")
    }
}

fn rel(a: &Real, b: &Real) -> f64 {
    let scale = b.abs().max(&b.lit(1e-300));
    ((a - b).abs() / scale).to_f64()
}

/// log₂ of successive remainder ratios at h/2 and h/4.
fn observed_order(rem: impl Fn(&Real) -> Real, h: &Real) -> f64 {
    let a = rem(&h.mul_exp2(-1)).abs();
    let b = rem(&h.mul_exp2(-2)).abs();
    (a / b).to_f64().log2()
}

pub fn check_phi_second_derivative(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed), prec };
    let power = Real::ratio(prec, -5, 2);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let c = d.expansion();
        let oracle = (&c.k_series(2) * &c.t_series(2).powf(&power).expect("r0 > 0")).derivative_at_zero(2);
        let closed = phi_second_derivative(&c).expect("r0 > 0");
        worst = worst.max(rel(&closed, &oracle));
    }
    CheckReport::new("phi'' closed form = series k*T^(-5/2)", trials, worst, tol.phi_rel, "relative".into())
}

pub fn check_residue_limits(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x1), prec };
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = 1 + t % 4;
        let phi = d.poly(5);
        let b = d.uniform(0.5, 2.0);
        let m = n - 1 + d.rng.gen_range(0..2usize);
        let samples: Vec<Real> = [4, 6, 8]
            .iter()
            .map(|&k| {
                let delta = Real::from_f64(prec, 10f64.powi(-k));
                let lambda = Real::from_i64(prec, -(n as i64)) + &delta;
                let shift = &lambda + (n as f64);
                shift * gelfand_pair(&lambda, &phi, &b, m).expect("off the poles")
            })
            .collect();
        let limit = richardson(&samples, 100.0, 1);
        let res = gelfand_residue(n, &phi).expect("n >= 1");
        let err = (&limit - &res).abs() / res.abs().max(&res.lit(1.0));
        worst = worst.max(err.to_f64());
    }
    CheckReport::new(
        "(lambda+n)*pair -> residue (Richardson, 1e-4/1e-6/1e-8)",
        trials,
        worst,
        tol.residue_limit,
        "relative, floored at 1".into(),
    )
}

pub fn check_quadrature(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x2), prec };
    let lambdas = [-0.75, -0.5, 0.0, 0.3, 1.7];
    let level = if prec >= 128 { 6 } else { 4 };
    let mut worst = 0.0f64;
    for t in 0..trials {
        let lambda = Real::from_f64(prec, lambdas[t % lambdas.len()]);
        let phi = d.poly(4);
        let b = d.uniform(0.5, 2.0);
        let m = d.rng.gen_range(0..4usize);
        let closed = gelfand_pair(&lambda, &phi, &b, m).expect("lambda > -1");
        let direct = tanh_sinh(|x| x.powf(&lambda) * phi.eval(x), &b, level);
        worst = worst.max(rel(&closed, &direct));
    }
    CheckReport::new("pair = quadrature for lambda > -1", trials, worst, tol.quadrature_rel, "relative".into())
}

pub fn check_analyticity(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x3), prec };
    let center = Real::from_f64(prec, -1.5);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let phi = d.poly(4);
        let b = d.uniform(0.5, 2.0);
        let m = 1 + d.rng.gen_range(0..3usize);
        let f = |l: &Real| gelfand_pair(l, &phi, &b, m).expect("off the poles");
        let second = |delta: f64| f(&(&center + delta)) - f(&center).mul_exp2(1) + f(&(&center - delta));
        // For analytic f the second differences at δ and δ/2 differ by a factor
        // 4 up to O(δ⁴); a pole within reach would blow this up.
        let (d1, d2) = (second(0.01), second(0.005));
        let scale = d1.abs().max(&(f(&center).abs() * 1e-4));
        worst = worst.max(((&d1 - d2 * 4.0).abs() / scale).to_f64());
    }
    CheckReport::new(
        "pair smooth in lambda at -1.5 +- 0.01",
        trials,
        worst,
        tol.analyticity,
        "|D2(d) - 4 D2(d/2)| / max(|D2(d)|, d^2 |f|)".into(),
    )
}

pub fn check_poles(prec: u32) -> CheckReport {
    let phi = TaylorPoly::from_f64(prec, &[1.0, -0.5, 0.25, 0.125], 3);
    let b = Real::one(prec);
    let mut bad = 0usize;
    let mut trials = 0usize;
    for m in 0..4usize {
        for n in 1..=(m as i64 + 1) {
            trials += 1;
            if gelfand_pair(&Real::from_i64(prec, -n), &phi, &b, m) != Err(Error::Pole(-n)) {
                bad += 1;
            }
        }
        trials += 1;
        let between = Real::from_f64(prec, -(m as f64) - 0.5);
        if gelfand_pair(&between, &phi, &b, m).is_err() {
            bad += 1;
        }
    }
    CheckReport::new(
        "poles exactly at lambda = -1..-(m+1)",
        trials,
        bad as f64,
        0.0,
        "misclassified points".into(),
    )
}

pub fn check_remainder_residue(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x4), prec };
    let lambda = Real::ratio(prec, 5, 2);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let c = d.expansion();
        let b = d.uniform(0.5, 2.0);
        let rs = c.t_series(DEFAULT_ORDER).shift_up(2);
        let ps = c.k_series(DEFAULT_ORDER).shift_up(2);
        let res = remainder_residue(&rs, 2, &ps, 2, &lambda, &b).expect("valid series");
        let expect = b.powf(&lambda) * phi_second_derivative(&c).expect("r0 > 0");
        worst = worst.max(rel(&res, &expect));
    }
    CheckReport::new(
        "remainder residue (5/2, m=2, l=2) = b^(5/2)*phi''",
        trials,
        worst,
        tol.remainder_rel,
        "relative".into(),
    )
}

/// Coefficients of R(τ,τ−h) at h², h³, h⁴, extracted one at a time by
/// Richardson extrapolation of (R − lower terms)/hᵏ, against
/// −(ẋ·ẋ+1), ẋ·ẍ and −(¼ẍ·ẍ + ⅓ẋ·x⃛). Each match confirms that removing the
/// terms so far leaves a remainder of the next order.
pub fn check_r_expansion(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5), prec };
    let step = Real::from_f64(prec, tol.h2_step);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let z = d.worldline();
        let tau = d.expansion_point();
        let u = z.derivative(1, &tau);
        let a = z.derivative(2, &tau);
        let j = z.derivative(3, &tau);
        let terms = [-(u.dot(&u) + 1.0), u.dot(&a), -(a.dot(&a) * 0.25 + u.dot(&j) / 3.0)];
        for k in 0..terms.len() {
            let scaled = |h: &Real| {
                let mut v = worldline_r(&z, &tau, &(&tau - h));
                for (i, c) in terms.iter().take(k).enumerate() {
                    v -= c * h.powi(i as i32 + 2);
                }
                v / h.powi(k as i32 + 2)
            };
            let samples: Vec<Real> = (0..4).map(|i| scaled(&step.mul_exp2(-i))).collect();
            let extracted = richardson(&samples, 2.0, 1);
            let err = (&extracted - &terms[k]).abs() / terms[k].abs().max(&terms[k].lit(1.0));
            worst = worst.max(err.to_f64());
        }
    }
    CheckReport::new(
        "R(tau,tau-h) coefficients of h^2, h^3, h^4 (Richardson)",
        trials,
        worst,
        tol.r_coeff,
        "relative, floored at 1".into(),
    )
}

/// The h² coefficient of h^{αβ}(τ,τ−h), extracted by Richardson, equals
/// ẍ^αẋ^β − ẍ^βẋ^α (fifth components ẋ⁵ = 1, ẍ⁵ = 0); the remainder is O(h³).
pub fn check_h_expansion(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let tol = Tolerances::for_precision(prec);
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x6), prec };
    let h2_step = Real::from_f64(prec, tol.h2_step);
    let order_step = Real::from_f64(prec, tol.order_step);
    let mut worst_coeff = 0.0f64;
    let mut worst_flipped = f64::INFINITY;
    let mut worst_order = 0.0f64;
    for _ in 0..trials {
        let z = d.worldline();
        let tau = d.expansion_point();
        let u5 = five(&z.derivative(1, &tau), Real::one(prec));
        let a5 = five(&z.derivative(2, &tau), Real::zero(prec));
        let b0 = HTensor::wedge(&a5, &u5);
        let scaled = |h: &Real| {
            let inv = (h * h).lit(1.0) / (h * h);
            worldline_h_tensor(&z, &tau, &(&tau - h)).map(|v| v * &inv)
        };
        let samples: Vec<HTensor> = (0..4).map(|i| scaled(&h2_step.mul_exp2(-i))).collect();
        let extracted = HTensor {
            entries: std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    let col: Vec<Real> = samples.iter().map(|s| s.entries[r][c].clone()).collect();
                    richardson(&col, 2.0, 1)
                })
            }),
        };
        worst_coeff = worst_coeff.max(extracted.sub(&b0).max_abs().to_f64());
        worst_flipped = worst_flipped.min(extracted.add(&b0).max_abs().to_f64());
        let rem = |h: &Real| worldline_h_tensor(&z, &tau, &(&tau - h)).sub(&b0.map(|v| v * h * h)).max_abs();
        worst_order = worst_order.max((observed_order(rem, &order_step) - 3.0).abs());
    }
    let pass_coeff = worst_coeff <= tol.h2_coeff;
    let pass_order = worst_order <= tol.order;
    let worst = if pass_order { worst_coeff } else { f64::INFINITY };
    let mut r = CheckReport::new(
        "h-tensor h^2 coefficient = a^a u^b - a^b u^a, remainder O(h^3)",
        trials,
        worst,
        tol.h2_coeff,
        format!(
            "max coefficient error {worst_coeff:.1e}; remainder order off by {worst_order:.3}; \
             opposite orientation u^a a^b - u^b a^a misses by >= {worst_flipped:.2}"
        ),
    );
    r.passed = pass_coeff && pass_order;
    r
}

pub fn check_green_support(prec: u32, seed: u64, trials: usize) -> CheckReport {
    let mut d = Draw { rng: ChaCha8Rng::seed_from_u64(seed ^ 0x7), prec };
    let mut bad = 0usize;
    for _ in 0..trials {
        let x = d.vector(-2.0, 2.0);
        let tau = d.uniform(-1.0, 1.0);
        let inside = tau > 0.0 && (-x.dot(&x) - &tau * &tau) > 0.0;
        let g = green_kernel(&x, &tau);
        let ok = if inside { g < 0.0 } else { g.is_zero() };
        if !ok {
            bad += 1;
        }
    }
    CheckReport::new(
        "Green kernel supported inside the cone with tau > 0",
        trials,
        bad as f64,
        0.0,
        "violations".into(),
    )
}

/// All identities on one seed.
pub fn run_suite(prec: u32, seed: u64) -> Vec<CheckReport> {
    vec![
        check_phi_second_derivative(prec, seed, 1000),
        check_residue_limits(prec, seed, 40),
        check_quadrature(prec, seed, 20),
        check_analyticity(prec, seed, 20),
        check_poles(prec),
        check_remainder_residue(prec, seed, 100),
        check_r_expansion(prec, seed, 40),
        check_h_expansion(prec, seed, 40),
        check_green_support(prec, seed, 2000),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_256_bits() {
        for r in run_suite(256, 7) {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn suite_passes_at_53_bits_with_relaxed_tolerances() {
        for r in run_suite(53, 7) {
            assert!(r.passed, "{r:?}");
        }
    }
}
