//! Jacobian of the scalar system and local stability classification.

use crate::dynamics::{k_potentials, scalar_rhs};
use crate::eigen::{self, Complex};
use crate::error::{Error, Result};
use crate::kinematics::ScalarState;
use crate::params::ModelParams;
use crate::real::Real;

/// ∂fᵢ/∂sⱼ, rows = components of f, columns = state in (ε, ε̇, ε̈, ρ, ρ̇, η) order.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianMatrix {
    pub entries: [[Real; 6]; 6],
}

impl JacobianMatrix {
    pub fn to_rows(&self) -> Vec<Vec<Real>> {
        self.entries.iter().map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> Real {
        (0..6).map(|i| self.entries[i][i].clone()).sum()
    }

    pub fn max_abs(&self) -> Real {
        self.entries
            .iter()
            .flatten()
            .map(Real::abs)
            .fold(self.entries[0][0].zero_like(), |m, v| m.max(&v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

pub fn jacobian(s: &ScalarState, p: &ModelParams, mode: JacobianMode) -> Result<JacobianMatrix> {
    match mode {
        JacobianMode::Analytic => analytic_jacobian(s, p),
        JacobianMode::FiniteDifference => fd_jacobian(s, p),
    }
}

fn analytic_jacobian(s: &ScalarState, p: &ModelParams) -> Result<JacobianMatrix> {
    let k = k_potentials(s, p)?;
    let (e, d, c, r, q, n) = (&s.eps, &s.deps, &s.ddeps, &s.rho, &s.drho, &s.eta);
    let dd = &p.d;
    let e2 = e * e;
    let e3 = &e2 * e;
    let se = e.sqrt();
    let e32 = e * &se;
    let d2 = d * d;

    // Partial derivatives of the K-potentials; K₁ depends on (ε, ε̇), K₂ on
    // (ε, ε̇, ε̈, ρ), K₃ on (ε, ε̇).
    let k1_e = -17.5 * &d2 * d / &e3 - 12.0 * dd * d * &se;
    let k1_d = 26.25 * &d2 / &e2 - 8.0 * dd * &e32;
    let k2_e = -8.0 * c / &e2 - 6.0 * r / &e2 + 70.0 * &d2 / &e3 + 24.0 * dd * &se;
    let k2_d = -70.0 * d / &e2;
    let k2_c = 8.0 / e;
    let k2_r = 6.0 / e;
    let k3_e = -12.0 * d / &e2;
    let k3_d = 12.0 / e;

    let cr = c + 2.0 * r;
    let z = e.zero_like();
    let one = e.lit(1.0);
    let (k1, k2, k3) = (&k.k1, &k.k2, &k.k3);

    let f3 = [
        2.0 * k1 + 2.0 * (e + 1.0) * &k1_e + d * &k2_e + &cr * &k3_e,
        2.0 * (e + 1.0) * &k1_d + k2 + d * &k2_d + &cr * &k3_d,
        d * &k2_c + k3,
        d * &k2_r + 2.0 * k3,
        e.lit(-3.0),
        z.clone(),
    ];
    let f5 = [
        -(d * &k1_e) + 2.0 * r * &k2_e + q * &k3_e,
        -k1 - d * &k1_d + 2.0 * r * &k2_d + q * &k3_d,
        2.0 * r * &k2_c,
        2.0 * k2 + 2.0 * r * &k2_r,
        k3.clone(),
        e.lit(2.0),
    ];
    let f6 = [
        -(&cr * &k1_e) + q * &k2_e + 2.0 * n * &k3_e,
        -(&cr * &k1_d) + q * &k2_d + 2.0 * n * &k3_d,
        -k1 + q * &k2_c,
        -2.0 * k1 + q * &k2_r,
        k2.clone(),
        2.0 * k3,
    ];
    let shift = |col: usize| -> [Real; 6] {
        std::array::from_fn(|j| if j == col { one.clone() } else { z.clone() })
    };
    Ok(JacobianMatrix { entries: [shift(1), shift(2), f3, shift(4), f5, f6] })
}

/// Central differences with step 2^{−p/2}·scale per component, where scale is
/// ε itself for the ε column (so the probe stays above shell) and
/// max(|sⱼ|, 1) otherwise.
fn fd_jacobian(s: &ScalarState, p: &ModelParams) -> Result<JacobianMatrix> {
    s.validate()?;
    let prec = s.prec();
    let rel = Real::exp2i(prec, -(prec as i32) / 2);
    let base = s.to_array();
    let mut cols: Vec<[Real; 6]> = Vec::with_capacity(6);
    for j in 0..6 {
        let scale = if j == 0 { base[0].abs() } else { base[j].abs().max(&base[j].lit(1.0)) };
        let h = &rel * &scale;
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += &h;
        minus[j] -= &h;
        let eval = |st: [Real; 6]| -> Result<[Real; 6]> {
            scalar_rhs(&ScalarState::from_array(st), p).map_err(|_| {
                Error::Domain("finite-difference probe left the domain eps > 0".into())
            })
        };
        let fp = eval(plus)?;
        let fm = eval(minus)?;
        let two_h = 2.0 * &h;
        cols.push(std::array::from_fn(|i| (&fp[i] - &fm[i]) / &two_h));
    }
    Ok(JacobianMatrix { entries: std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone())) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum {
    /// Sorted by descending real part, then descending imaginary part.
    pub values: Vec<Complex>,
    pub max_real: Real,
}

impl EigenSpectrum {
    pub fn count_positive_real(&self, tol: &Real) -> usize {
        self.values.iter().filter(|v| v.re > *tol).count()
    }

    pub fn count_nonnegative_real(&self, tol: &Real) -> usize {
        self.values.iter().filter(|v| v.re >= -tol.clone()).count()
    }
}

/// Eigenvalues of J with a residual check on each computed eigenpair.
pub fn eigenvalues(j: &JacobianMatrix) -> Result<EigenSpectrum> {
    let rows = j.to_rows();
    eigenvalues_of(&rows)
}

/// Same as [`eigenvalues`] for any square matrix.
pub fn eigenvalues_of(rows: &[Vec<Real>]) -> Result<EigenSpectrum> {
    let values = eigen::eigenvalues(rows, eigen::MAX_QR_SWEEPS)?;
    let norm = eigen::inf_norm(rows);
    let bound = &norm * 1e-10;
    for lam in &values {
        let v = eigen::eigenvector(rows, lam);
        let res = eigen::residual(rows, lam, &v);
        if res > bound {
            return Err(Error::Convergence(format!(
                "eigenpair residual {} exceeds 1e-10·‖J‖ = {}",
                res.to_string_digits(6),
                bound.to_string_digits(6)
            )));
        }
    }
    let max_real = values[0].re.clone();
    Ok(EigenSpectrum { values, max_real })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalClass {
    Attracting,
    Saddle,
    Repelling,
    Marginal,
}

impl LocalClass {
    pub fn as_str(self) -> &'static str {
        match self {
            LocalClass::Attracting => "attracting",
            LocalClass::Saddle => "saddle",
            LocalClass::Repelling => "repelling",
            LocalClass::Marginal => "marginal",
        }
    }
}

impl std::fmt::Display for LocalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_local(spec: &EigenSpectrum, tol: &Real) -> LocalClass {
    let re = || spec.values.iter().map(|v| &v.re);
    if re().any(|r| r.abs() <= *tol) {
        LocalClass::Marginal
    } else if re().all(|r| *r < -tol.clone()) {
        LocalClass::Attracting
    } else if re().all(|r| *r > *tol) {
        LocalClass::Repelling
    } else {
        LocalClass::Saddle
    }
}

/// Entrywise agreement test used for analytic vs finite-difference Jacobians:
/// relative `rel` per entry, with an absolute floor of `rel·2^{−p/4}·max|J|`
/// so entries that cancel to ~0 do not demand impossible relative accuracy.
pub fn jacobians_agree(a: &JacobianMatrix, b: &JacobianMatrix, rel: f64) -> bool {
    let prec = a.entries[0][0].prec();
    let floor = a.max_abs() * Real::exp2i(prec, -(prec as i32) / 4) * rel;
    a.entries.iter().flatten().zip(b.entries.iter().flatten()).all(|(x, y)| {
        let diff = (x - y).abs();
        diff <= x.abs().max(&y.abs()) * rel || diff <= floor
    })
}
