//! Truncated power series in one variable about 0.
//!
//! A [`TaylorPoly`] of order N holds c₀..c_N. Every operation truncates at
//! the smaller order of its operands, so results are exact through that order.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::Real;

/// Working order used when the caller has no reason to pick another:
/// two guard orders beyond the h² coefficients the regularization needs,
/// plus headroom for the shifts by h^m.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoly {
    coeffs: Vec<Real>,
}

impl TaylorPoly {
    /// Series with the given leading coefficients, padded with zeros or
    /// truncated to `order`. Fails on an empty coefficient list, which would
    /// leave the precision undetermined.
    pub fn new(coeffs: Vec<Real>, order: usize) -> Result<TaylorPoly> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Domain("series needs at least one coefficient".into()))?;
        let zero = first.zero_like();
        let mut c = coeffs;
        c.resize(order + 1, zero);
        Ok(TaylorPoly { coeffs: c })
    }

    pub fn from_f64(prec: u32, coeffs: &[f64], order: usize) -> TaylorPoly {
        let mut c: Vec<Real> = coeffs.iter().map(|&v| Real::from_f64(prec, v)).collect();
        c.resize(order + 1, Real::zero(prec));
        TaylorPoly { coeffs: c }
    }

    pub fn constant(c: Real, order: usize) -> TaylorPoly {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = c;
        TaylorPoly { coeffs }
    }

    /// The series `h`.
    pub fn variable(prec: u32, order: usize) -> TaylorPoly {
        let mut s = TaylorPoly::constant(Real::zero(prec), order);
        if order >= 1 {
            s.coeffs[1] = Real::one(prec);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// c_k, or zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> Real {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Real::zero(self.prec()))
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn leading_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> TaylorPoly {
        TaylorPoly::new(self.coeffs.clone(), order).expect("non-empty")
    }

    /// d^k/dh^k at h = 0, i.e. k!·c_k.
    pub fn derivative_at_zero(&self, k: usize) -> Real {
        let mut fact = Real::one(self.prec());
        for i in 2..=k {
            fact *= i as f64;
        }
        self.coeff(k) * &fact
    }

    /// Evaluates the truncated polynomial (Horner).
    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, k: &Real) -> TaylorPoly {
        TaylorPoly { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Multiplies by h^l; the order grows by l so nothing is lost.
    pub fn shift_up(&self, l: usize) -> TaylorPoly {
        let zero = Real::zero(self.prec());
        let mut c = vec![zero; l];
        c.extend(self.coeffs.iter().cloned());
        TaylorPoly { coeffs: c }
    }

    /// Divides by h^l. The first l coefficients must vanish exactly; the
    /// order drops by l.
    pub fn shift_down(&self, l: usize) -> Result<TaylorPoly> {
        if l > self.order() {
            return Err(Error::Domain(format!("cannot divide an order-{} series by h^{l}", self.order())));
        }
        if let Some(k) = self.coeffs[..l].iter().position(|c| !c.is_zero()) {
            return Err(Error::Domain(format!("series has a nonzero h^{k} term; cannot divide by h^{l}")));
        }
        Ok(TaylorPoly { coeffs: self.coeffs[l..].to_vec() })
    }

    /// d/dh, order drops by one (order-0 series give the zero constant).
    pub fn derivative(&self) -> TaylorPoly {
        if self.order() == 0 {
            return TaylorPoly::constant(Real::zero(self.prec()), 0);
        }
        let coeffs = (1..=self.order()).map(|k| &self.coeffs[k] * (k as f64)).collect();
        TaylorPoly { coeffs }
    }

    /// ∫₀^h, with the order kept (the top term is dropped).
    fn integral_same_order(&self) -> TaylorPoly {
        let n = self.order();
        let mut c = vec![Real::zero(self.prec()); n + 1];
        for k in 1..=n {
            c[k] = &self.coeffs[k - 1] / (k as f64);
        }
        TaylorPoly { coeffs: c }
    }

    pub fn recip(&self) -> Result<TaylorPoly> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Domain("reciprocal of a series with zero constant term".into()));
        }
        let n = self.order();
        let mut r: Vec<Real> = Vec::with_capacity(n + 1);
        r.push(c0.lit(1.0) / c0);
        for k in 1..=n {
            let mut s = Real::zero(self.prec());
            for j in 1..=k {
                s += &self.coeffs[j] * &r[k - j];
            }
            r.push(-(s / c0));
        }
        Ok(TaylorPoly { coeffs: r })
    }

    /// ln of a series with positive constant term, via (ln p)' = p'/p.
    pub fn ln(&self) -> Result<TaylorPoly> {
        let c0 = &self.coeffs[0];
        if !(*c0 > 0.0) {
            return Err(Error::Domain(format!("log of a series with constant term {c0}")));
        }
        let n = self.order();
        let ratio = &self.derivative() * &self.truncate(n.saturating_sub(1)).recip()?;
        let mut out = ratio.truncate(n).integral_same_order();
        out.coeffs[0] = c0.ln();
        Ok(out)
    }

    /// exp via e' = p'·e, giving e_k = (1/k)·Σⱼ j·p_j·e_{k−j}.
    pub fn exp(&self) -> TaylorPoly {
        let n = self.order();
        let mut e: Vec<Real> = Vec::with_capacity(n + 1);
        e.push(self.coeffs[0].exp());
        for k in 1..=n {
            let mut s = Real::zero(self.prec());
            for j in 1..=k {
                s += &self.coeffs[j] * &e[k - j] * (j as f64);
            }
            e.push(s / (k as f64));
        }
        TaylorPoly { coeffs: e }
    }

    /// p^a = exp(a·ln p); needs a positive constant term.
    pub fn powf(&self, a: &Real) -> Result<TaylorPoly> {
        Ok(self.ln()?.scale(a).exp())
    }
}

fn zip_with(a: &TaylorPoly, b: &TaylorPoly, f: impl Fn(&Real, &Real) -> Real) -> TaylorPoly {
    let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect();
    TaylorPoly { coeffs }
}

impl Add<&TaylorPoly> for &TaylorPoly {
    type Output = TaylorPoly;
    fn add(self, o: &TaylorPoly) -> TaylorPoly {
        zip_with(self, o, |x, y| x + y)
    }
}

impl Sub<&TaylorPoly> for &TaylorPoly {
    type Output = TaylorPoly;
    fn sub(self, o: &TaylorPoly) -> TaylorPoly {
        zip_with(self, o, |x, y| x - y)
    }
}

impl Mul<&TaylorPoly> for &TaylorPoly {
    type Output = TaylorPoly;
    fn mul(self, o: &TaylorPoly) -> TaylorPoly {
        let n = self.order().min(o.order());
        let mut c = vec![Real::zero(self.prec()); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                c[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        TaylorPoly { coeffs: c }
    }
}

impl Neg for &TaylorPoly {
    type Output = TaylorPoly;
    fn neg(self) -> TaylorPoly {
        TaylorPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}
