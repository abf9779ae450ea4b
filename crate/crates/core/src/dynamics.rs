//! Right-hand sides of the renormalized equation of motion.
//!
//! The vector form is
//!
//! ```text
//! x⁗ = K₁·ẋ + K₂·ẍ + K₃·x⃛
//! ```
//!
//! with the K-potentials below; contracting it with ẋ, ẍ and x⃛ yields the
//! closed six-scalar system implemented by [`scalar_rhs`].

use crate::error::{Error, Result};
use crate::kinematics::{minkowski_dot, scalars_of, FourVector, ScalarState, WorldlineState};
use crate::params::ModelParams;
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct KPotentials {
    pub k1: Real,
    pub k2: Real,
    pub k3: Real,
}

impl KPotentials {
    pub fn to_array(&self) -> [Real; 3] {
        [self.k1.clone(), self.k2.clone(), self.k3.clone()]
    }
}

fn require_positive_eps(eps: &Real) -> Result<()> {
    if *eps > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("dynamics undefined at eps <= 0 (eps = {eps})")))
    }
}

/// ε^{3/2}, computed as ε·√ε.
fn eps_3_2(eps: &Real) -> Real {
    eps * eps.sqrt()
}

pub fn k_potentials(s: &ScalarState, p: &ModelParams) -> Result<KPotentials> {
    require_positive_eps(&s.eps)?;
    let e = &s.eps;
    let e2 = e * e;
    let d_e72 = &p.d * eps_3_2(e) * &e2;
    let de2 = &s.deps * &s.deps;
    let k1 = 2.0 * &s.deps / &e2 * (4.375 * &de2 - 4.0 * &d_e72);
    let k2 = 2.0 / &e2 * (4.0 * e * &s.ddeps + 3.0 * e * &s.rho - 17.5 * &de2 + 8.0 * &d_e72);
    let k3 = 12.0 * &s.deps / e;
    Ok(KPotentials { k1, k2, k3 })
}

/// θ(Kᵢ)·Kᵢ componentwise.
pub fn k_positive_part(k: &KPotentials) -> KPotentials {
    let pos = |v: &Real| if *v > 0.0 { v.clone() } else { v.zero_like() };
    KPotentials { k1: pos(&k.k1), k2: pos(&k.k2), k3: pos(&k.k3) }
}

/// d/dτ of (ε, ε̇, ε̈, ρ, ρ̇, η).
pub fn scalar_rhs(s: &ScalarState, p: &ModelParams) -> Result<[Real; 6]> {
    let k = k_potentials(s, p)?;
    Ok(scalar_rhs_with(s, &k))
}

pub(crate) fn scalar_rhs_with(s: &ScalarState, k: &KPotentials) -> [Real; 6] {
    let c = &s.ddeps + 2.0 * &s.rho;
    let dddeps =
        -3.0 * &s.drho + 2.0 * (&s.eps + 1.0) * &k.k1 + &s.deps * &k.k2 + &c * &k.k3;
    let ddrho = 2.0 * &s.eta - &s.deps * &k.k1 + 2.0 * &s.rho * &k.k2 + &s.drho * &k.k3;
    let deta = -(&c * &k.k1) + &s.drho * &k.k2 + 2.0 * &s.eta * &k.k3;
    [s.deps.clone(), s.ddeps.clone(), dddeps, s.drho.clone(), ddrho, deta]
}

/// x⁗ for the vector formulation.
pub fn vector_rhs(w: &WorldlineState, p: &ModelParams) -> Result<FourVector> {
    let s = scalars_of(w)?;
    let k = k_potentials(&s, p)?;
    Ok(&(&w.u.scale(&k.k1) + &w.a.scale(&k.k2)) + &w.j.scale(&k.k3))
}

/// max_ν |ε·ẋ_ν + (ẋ·ẋ)·ẋ_ν + ẋ_ν|, i.e. the residual of M^μ_ν ẋ_μ = −ẋ_ν
/// with M^μ_ν = ε·δ^μ_ν + ẋ^μ ẋ_ν.
pub fn mass_matrix_contraction_check(u: &FourVector) -> Real {
    let uu = minkowski_dot(u, u);
    let eps = -&uu - 1.0;
    // Lowering the index only flips the sign of t, which does not change |·|.
    u.components()
        .iter()
        .map(|c| (&eps * *c + &uu * *c + *c).abs())
        .fold(u.t.zero_like(), |m, v| m.max(&v))
}

/// The constant-ε, constant-ρ point (ε, 0, 0, ρ, 0, η) with
/// η = −ρ(6ρ/ε + 16·D·ε^{3/2}), at which ε⃛, ρ̈ and η̇ all vanish.
pub fn constant_eps_fixed_point(eps: &Real, rho: &Real, p: &ModelParams) -> Result<ScalarState> {
    require_positive_eps(eps)?;
    let eta = -(rho * (6.0 * rho / eps + 16.0 * &p.d * eps_3_2(eps)));
    let z = eps.zero_like();
    Ok(ScalarState {
        eps: eps.clone(),
        deps: z.clone(),
        ddeps: z.clone(),
        rho: rho.clone(),
        drho: z,
        eta,
    })
}

/// The D-proportional part of ε⃛: −16·D·ε̇·ε^{5/2}.
pub fn d_coefficient_pull(s: &ScalarState, p: &ModelParams) -> Result<Real> {
    require_positive_eps(&s.eps)?;
    Ok(-16.0 * &p.d * &s.deps * &s.eps * eps_3_2(&s.eps))
}
