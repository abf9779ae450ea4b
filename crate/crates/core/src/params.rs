//! Model coefficient and numeric policy.

use crate::error::{Error, Result};
use crate::real::{Real, MIN_PRECISION};

/// Default blow-up threshold. ε grows only like a power of ln(1/(τ*−τ)) near
/// the singularity, so caps much larger than this are not reachable before
/// the step size underflows any sensible `h_min`.
pub const DEFAULT_EPS_CAP: f64 = 10.0;
pub const DEFAULT_EPS_FLOOR: f64 = 1e-8;
pub const DEFAULT_TAU_MAX: f64 = 50.0;
pub const DEFAULT_H_MIN: f64 = 1e-30;
pub const DEFAULT_PRECISION: u32 = 256;

/// Tolerance default: 1e-20, loosened at low precision so it stays ~2^13 ulps
/// above the working epsilon (1e-20 is unreachable with a 53-bit mantissa).
pub fn default_tolerance(precision_bits: u32) -> f64 {
    let floor = 2f64.powi(-(precision_bits as i32 - 13));
    floor.max(1e-20)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Renormalized-mass coefficient D.
    pub d: Real,
    pub precision_bits: u32,
    /// On-shell halt threshold.
    pub eps_floor: Real,
    /// Blow-up threshold.
    pub eps_cap: Real,
    pub abs_tol: Real,
    pub rel_tol: Real,
    pub tau_max: Real,
    pub h_min: Real,
}

impl ModelParams {
    pub fn new(precision_bits: u32) -> ModelParams {
        let p = precision_bits.max(MIN_PRECISION);
        let r = |v: f64| Real::from_f64(p, v);
        let tol = default_tolerance(p);
        ModelParams {
            d: r(1.0),
            precision_bits,
            eps_floor: r(DEFAULT_EPS_FLOOR),
            eps_cap: r(DEFAULT_EPS_CAP),
            abs_tol: r(tol),
            rel_tol: r(tol),
            tau_max: r(DEFAULT_TAU_MAX),
            h_min: r(DEFAULT_H_MIN),
        }
    }

    pub fn prec(&self) -> u32 {
        self.precision_bits
    }

    /// A real at this parameter set's precision.
    pub fn real(&self, v: f64) -> Real {
        Real::from_f64(self.precision_bits, v)
    }

    pub fn with_d(mut self, d: f64) -> ModelParams {
        self.d = self.real(d);
        self
    }

    pub fn with_d_real(mut self, d: &Real) -> ModelParams {
        self.d = d.with_prec(self.precision_bits);
        self
    }

    pub fn with_tau_max(mut self, tau_max: f64) -> ModelParams {
        self.tau_max = self.real(tau_max);
        self
    }

    pub fn with_eps_cap(mut self, cap: f64) -> ModelParams {
        self.eps_cap = self.real(cap);
        self
    }

    pub fn with_eps_floor(mut self, floor: f64) -> ModelParams {
        self.eps_floor = self.real(floor);
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> ModelParams {
        self.abs_tol = self.real(abs_tol);
        self.rel_tol = self.real(rel_tol);
        self
    }

    pub fn with_h_min(mut self, h_min: f64) -> ModelParams {
        self.h_min = self.real(h_min);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.precision_bits < MIN_PRECISION {
            return bad(format!(
                "precision_bits must be >= {MIN_PRECISION}, got {}",
                self.precision_bits
            ));
        }
        let finite_pos = |name: &str, v: &Real| -> Result<()> {
            if v.is_finite() && *v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be a positive finite real, got {v}")))
            }
        };
        finite_pos("D", &self.d)?;
        finite_pos("eps_floor", &self.eps_floor)?;
        finite_pos("eps_cap", &self.eps_cap)?;
        finite_pos("abs_tol", &self.abs_tol)?;
        finite_pos("rel_tol", &self.rel_tol)?;
        finite_pos("tau_max", &self.tau_max)?;
        finite_pos("h_min", &self.h_min)?;
        if self.eps_floor >= self.eps_cap {
            return bad(format!(
                "eps_floor ({}) must be below eps_cap ({})",
                self.eps_floor, self.eps_cap
            ));
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> ModelParams {
        ModelParams::new(DEFAULT_PRECISION)
    }
}
