//! Four-vectors, the worldline state and its scalar reduction.
//!
//! Metric signature is (−,+,+,+). The fifth coordinate x⁵ ≡ τ is never
//! stored: it only contributes the −1 in ε = −ẋ·ẋ − 1.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct FourVector {
    pub t: Real,
    pub x: Real,
    pub y: Real,
    pub z: Real,
}

impl FourVector {
    pub fn new(t: Real, x: Real, y: Real, z: Real) -> FourVector {
        FourVector { t, x, y, z }
    }

    pub fn from_f64(prec: u32, c: [f64; 4]) -> FourVector {
        let [t, x, y, z] = c.map(|v| Real::from_f64(prec, v));
        FourVector { t, x, y, z }
    }

    pub fn zero(prec: u32) -> FourVector {
        FourVector::from_f64(prec, [0.0; 4])
    }

    pub fn from_array(c: [Real; 4]) -> FourVector {
        let [t, x, y, z] = c;
        FourVector { t, x, y, z }
    }

    pub fn to_array(&self) -> [Real; 4] {
        [self.t.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn components(&self) -> [&Real; 4] {
        [&self.t, &self.x, &self.y, &self.z]
    }

    pub fn prec(&self) -> u32 {
        self.t.prec()
    }

    pub fn dot(&self, other: &FourVector) -> Real {
        minkowski_dot(self, other)
    }

    pub fn scale(&self, k: &Real) -> FourVector {
        FourVector::new(&self.t * k, &self.x * k, &self.y * k, &self.z * k)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> Real {
        let [t, x, y, z] = self.components();
        t.abs().max(&x.abs()).max(&y.abs()).max(&z.abs())
    }
}

impl Add<&FourVector> for &FourVector {
    type Output = FourVector;
    fn add(self, o: &FourVector) -> FourVector {
        FourVector::new(&self.t + &o.t, &self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl Sub<&FourVector> for &FourVector {
    type Output = FourVector;
    fn sub(self, o: &FourVector) -> FourVector {
        FourVector::new(&self.t - &o.t, &self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl Mul<&Real> for &FourVector {
    type Output = FourVector;
    fn mul(self, k: &Real) -> FourVector {
        self.scale(k)
    }
}

impl Neg for &FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-&self.t, -&self.x, -&self.y, -&self.z)
    }
}

/// ⟨a,b⟩ = −a.t·b.t + a.x·b.x + a.y·b.y + a.z·b.z
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> Real {
    -(&a.t * &b.t) + &a.x * &b.x + &a.y * &b.y + &a.z * &b.z
}

/// Mass-shell deviation ε = −⟨u,u⟩ − 1.
pub fn epsilon_of(u: &FourVector) -> Real {
    -minkowski_dot(u, u) - 1.0
}

/// (ẋ, ẍ, x⃛) with an optional position carried along for output.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldlineState {
    pub u: FourVector,
    pub a: FourVector,
    pub j: FourVector,
    pub pos: Option<FourVector>,
}

impl WorldlineState {
    pub fn new(u: FourVector, a: FourVector, j: FourVector) -> WorldlineState {
        WorldlineState { u, a, j, pos: None }
    }

    pub fn with_pos(mut self, pos: FourVector) -> WorldlineState {
        self.pos = Some(pos);
        self
    }

    pub fn prec(&self) -> u32 {
        self.u.prec()
    }

    pub fn eps(&self) -> Real {
        epsilon_of(&self.u)
    }

    /// Checks ε > 0 and u.t > 0.
    pub fn validate(&self) -> Result<()> {
        let eps = self.eps();
        if !(eps > 0.0) {
            return Err(Error::Domain(format!(
                "worldline must be above mass shell (eps > 0), got eps = {eps}"
            )));
        }
        if !(self.u.t > 0.0) {
            return Err(Error::Domain(format!(
                "worldline must be future-directed (u.t > 0), got u.t = {}",
                self.u.t
            )));
        }
        Ok(())
    }
}

/// The reduced phase-space point (ε, ε̇, ε̈, ρ, ρ̇, η).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarState {
    pub eps: Real,
    pub deps: Real,
    pub ddeps: Real,
    pub rho: Real,
    pub drho: Real,
    pub eta: Real,
}

impl ScalarState {
    pub const NAMES: [&'static str; 6] = ["eps", "deps", "ddeps", "rho", "drho", "eta"];

    pub fn from_array(c: [Real; 6]) -> ScalarState {
        let [eps, deps, ddeps, rho, drho, eta] = c;
        ScalarState { eps, deps, ddeps, rho, drho, eta }
    }

    pub fn from_f64(prec: u32, c: [f64; 6]) -> ScalarState {
        ScalarState::from_array(c.map(|v| Real::from_f64(prec, v)))
    }

    pub fn to_array(&self) -> [Real; 6] {
        [
            self.eps.clone(),
            self.deps.clone(),
            self.ddeps.clone(),
            self.rho.clone(),
            self.drho.clone(),
            self.eta.clone(),
        ]
    }

    pub fn components(&self) -> [&Real; 6] {
        [&self.eps, &self.deps, &self.ddeps, &self.rho, &self.drho, &self.eta]
    }

    pub fn prec(&self) -> u32 {
        self.eps.prec()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("scalar state must have eps > 0, got eps = {}", self.eps)))
        }
    }
}

pub fn scalars_of(w: &WorldlineState) -> Result<ScalarState> {
    let eps = w.eps();
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("scalars_of needs eps > 0, got eps = {eps}")));
    }
    let deps = -2.0 * minkowski_dot(&w.u, &w.a);
    let rho = minkowski_dot(&w.a, &w.a);
    let ddeps = -2.0 * (&rho + minkowski_dot(&w.u, &w.j));
    let drho = 2.0 * minkowski_dot(&w.a, &w.j);
    let eta = minkowski_dot(&w.j, &w.j);
    Ok(ScalarState { eps, deps, ddeps, rho, drho, eta })
}

/// v^i = ẋ^i / ṫ.
pub fn three_velocity(u: &FourVector) -> Result<[Real; 3]> {
    if !(u.t > 0.0) {
        return Err(Error::Domain(format!("three_velocity needs u.t > 0, got {}", u.t)));
    }
    Ok([&u.x / &u.t, &u.y / &u.t, &u.z / &u.t])
}

/// Euclidean norm of a 3-velocity.
pub fn speed(v: &[Real; 3]) -> Real {
    (&v[0] * &v[0] + &v[1] * &v[1] + &v[2] * &v[2]).sqrt()
}

/// Builds a worldline state whose scalar reduction is `s`.
///
/// u = (√(1+ε), 0, 0, 0) is at rest. ⟨u,a⟩ = −ε̇/2 fixes a.t and ρ = ⟨a,a⟩
/// fixes a.x ≥ 0. Then ⟨u,j⟩ = −ε̈/2 − ρ fixes j.t, ⟨a,j⟩ = ρ̇/2 fixes j.x,
/// and η = ⟨j,j⟩ fixes j.y ≥ 0, so the motion stays in the t–x plane
/// whenever that plane suffices. Not every scalar point has a real
/// realization: a ⊥-decomposition forces ρ ≥ −ε̇²/(4(1+ε)), and similarly
/// for η; those return a domain error.
pub fn realize_worldline(s: &ScalarState) -> Result<WorldlineState> {
    s.validate()?;
    let prec = s.prec();
    let zero = Real::zero(prec);
    let ut = (&s.eps + 1.0).sqrt();
    let at = &s.deps / (2.0 * &ut);
    let ax2 = &s.rho + &at * &at;
    if ax2.is_sign_negative() && !ax2.is_zero() {
        return Err(Error::Domain(format!(
            "rho = {} is below -deps^2/(4(1+eps)); no real acceleration realizes it",
            s.rho
        )));
    }
    let ax = ax2.sqrt();
    let jt = (&s.ddeps / 2.0 + &s.rho) / &ut;
    let target = &s.drho / 2.0 + &at * &jt;
    let jx = if ax.is_zero() {
        if !target.abs().is_zero() && target.abs() > Real::exp2i(prec, -(prec as i32) / 2) {
            return Err(Error::Domain(
                "acceleration is parallel to u; drho is not reachable".to_string(),
            ));
        }
        let jx2 = &s.eta + &jt * &jt;
        if jx2.is_sign_negative() {
            return Err(Error::Domain("eta is not reachable by a real jerk".to_string()));
        }
        jx2.sqrt()
    } else {
        target / &ax
    };
    let jy2 = &s.eta + &jt * &jt - &jx * &jx;
    let tiny = Real::exp2i(prec, -(prec as i32) + 8) * (&s.eta.abs() + &jt * &jt + 1.0);
    let jy = if jy2.is_sign_negative() {
        if jy2.abs() > tiny {
            return Err(Error::Domain(format!(
                "eta = {} is not reachable by a real jerk (short by {})",
                s.eta,
                jy2.abs()
            )));
        }
        zero.clone()
    } else {
        jy2.sqrt()
    };
    Ok(WorldlineState::new(
        FourVector::new(ut, zero.clone(), zero.clone(), zero.clone()),
        FourVector::new(at, ax, zero.clone(), zero.clone()),
        FourVector::new(jt, jx, jy, zero),
    )
    .with_pos(FourVector::zero(prec)))
}
