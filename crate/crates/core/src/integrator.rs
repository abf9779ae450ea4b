//! Adaptive Runge–Kutta–Fehlberg 4(5) integration with event detection.

use rayon::prelude::*;

use crate::dynamics::{k_potentials, scalar_rhs, vector_rhs, KPotentials};
use crate::error::{Error, Result};
use crate::kinematics::{epsilon_of, scalars_of, speed, three_velocity, FourVector, ScalarState, WorldlineState};
use crate::params::ModelParams;
use crate::real::Real;
use crate::stability::{eigenvalues, jacobian, EigenSpectrum, JacobianMode};

/// Extra samples are taken whenever ε exceeds this factor times the largest
/// recorded ε (and ε > 1), so the blow-up fit has data on its last decade.
const GROWTH_SAMPLE_FACTOR: f64 = 1.1;

/// Fehlberg's tableau, evaluated once at the run precision.
#[derive(Clone, Debug)]
pub struct Tableau {
    a: Vec<Vec<Real>>,
    b4: [Real; 6],
    err: [Real; 6],
}

impl Tableau {
    pub fn fehlberg(prec: u32) -> Tableau {
        let r = |n: i64, d: i64| Real::ratio(prec, n, d);
        let a = vec![
            vec![],
            vec![r(1, 4)],
            vec![r(3, 32), r(9, 32)],
            vec![r(1932, 2197), r(-7200, 2197), r(7296, 2197)],
            vec![r(439, 216), r(-8, 1), r(3680, 513), r(-845, 4104)],
            vec![r(-8, 27), r(2, 1), r(-3544, 2565), r(1859, 4104), r(-11, 40)],
        ];
        let b4 = [r(25, 216), r(0, 1), r(1408, 2565), r(2197, 4104), r(-1, 5), r(0, 1)];
        let b5 = [r(16, 135), r(0, 1), r(6656, 12825), r(28561, 56430), r(-9, 50), r(2, 55)];
        let err = std::array::from_fn(|i| &b5[i] - &b4[i]);
        Tableau { a, b4, err }
    }
}

#[derive(Clone, Debug)]
pub struct StepTolerance {
    pub abs: Real,
    pub rel: Real,
}

impl StepTolerance {
    pub fn from_params(p: &ModelParams) -> StepTolerance {
        StepTolerance { abs: p.abs_tol.clone(), rel: p.rel_tol.clone() }
    }
}

/// One Fehlberg step. Returns the 4th-order solution and the error estimate
/// max_i |Δᵢ| / (abs + rel·|yᵢ|) from the embedded 5th-order solution.
///
/// Any stage evaluation that fails (ε ≤ 0) or produces non-finite values
/// yields [`Error::DomainStep`].
pub fn step_rk45<F>(
    y: &[Real],
    rhs: F,
    h: &Real,
    tab: &Tableau,
    tol: &StepTolerance,
) -> Result<(Vec<Real>, Real)>
where
    F: Fn(&[Real]) -> Result<Vec<Real>>,
{
    let n = y.len();
    let mut ks: Vec<Vec<Real>> = Vec::with_capacity(6);
    for stage in 0..6 {
        let yi: Vec<Real> = (0..n)
            .map(|c| {
                let mut acc = y[c].clone();
                for (aij, k) in tab.a[stage].iter().zip(&ks) {
                    if !aij.is_zero() {
                        acc += aij * h * &k[c];
                    }
                }
                acc
            })
            .collect();
        let k = rhs(&yi).map_err(|_| Error::DomainStep)?;
        if k.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainStep);
        }
        ks.push(k);
    }
    let mut out = Vec::with_capacity(n);
    let mut worst = h.zero_like();
    for c in 0..n {
        let mut incr = h.zero_like();
        let mut delta = h.zero_like();
        for s in 0..6 {
            if !tab.b4[s].is_zero() {
                incr += &tab.b4[s] * &ks[s][c];
            }
            delta += &tab.err[s] * &ks[s][c];
        }
        let next = &y[c] + &(incr * h);
        if !next.is_finite() {
            return Err(Error::DomainStep);
        }
        let scale = &tol.abs + &tol.rel * y[c].abs().max(&next.abs());
        let e = (delta * h).abs() / scale;
        worst = worst.max(&e);
        out.push(next);
    }
    Ok((out, worst))
}

/// How a state is laid out as a flat vector and differentiated.
pub trait Formulation: Sync {
    type State: Clone + Send + Sync + std::fmt::Debug;

    fn pack(&self, s: &Self::State) -> Vec<Real>;
    fn unpack(&self, y: &[Real]) -> Self::State;
    fn rhs(&self, y: &[Real], p: &ModelParams) -> Result<Vec<Real>>;
    fn scalars(&self, s: &Self::State) -> Result<ScalarState>;
    fn eps(&self, s: &Self::State) -> Real;
    fn validate(&self, s: &Self::State) -> Result<()>;

    /// Invariant checks on every accepted step.
    fn check_accepted(&self, _s: &Self::State) -> Result<()> {
        Ok(())
    }

    fn velocity(&self, _s: &Self::State) -> Option<[Real; 3]> {
        None
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarForm;

impl Formulation for ScalarForm {
    type State = ScalarState;

    fn pack(&self, s: &ScalarState) -> Vec<Real> {
        s.to_array().to_vec()
    }

    fn unpack(&self, y: &[Real]) -> ScalarState {
        ScalarState::from_array(std::array::from_fn(|i| y[i].clone()))
    }

    fn rhs(&self, y: &[Real], p: &ModelParams) -> Result<Vec<Real>> {
        Ok(scalar_rhs(&self.unpack(y), p)?.to_vec())
    }

    fn scalars(&self, s: &ScalarState) -> Result<ScalarState> {
        Ok(s.clone())
    }

    fn eps(&self, s: &ScalarState) -> Real {
        s.eps.clone()
    }

    fn validate(&self, s: &ScalarState) -> Result<()> {
        s.validate()
    }
}

/// The 4-vector form; the flat layout is u, a, j, x (16 reals).
#[derive(Clone, Copy, Debug, Default)]
pub struct VectorForm;

impl Formulation for VectorForm {
    type State = WorldlineState;

    fn pack(&self, w: &WorldlineState) -> Vec<Real> {
        let pos = w.pos.clone().unwrap_or_else(|| FourVector::zero(w.prec()));
        [&w.u, &w.a, &w.j, &pos].iter().flat_map(|v| v.to_array()).collect()
    }

    fn unpack(&self, y: &[Real]) -> WorldlineState {
        let v = |i: usize| FourVector::from_array(std::array::from_fn(|k| y[4 * i + k].clone()));
        WorldlineState::new(v(0), v(1), v(2)).with_pos(v(3))
    }

    fn rhs(&self, y: &[Real], p: &ModelParams) -> Result<Vec<Real>> {
        let w = self.unpack(y);
        let x4 = vector_rhs(&w, p)?;
        Ok([&w.a, &w.j, &x4, &w.u].iter().flat_map(|v| v.to_array()).collect())
    }

    fn scalars(&self, w: &WorldlineState) -> Result<ScalarState> {
        scalars_of(w)
    }

    fn eps(&self, w: &WorldlineState) -> Real {
        epsilon_of(&w.u)
    }

    fn validate(&self, w: &WorldlineState) -> Result<()> {
        w.validate()
    }

    fn check_accepted(&self, w: &WorldlineState) -> Result<()> {
        let v = three_velocity(&w.u)?;
        if speed(&v) < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("|v| = {} reached 1 above shell", speed(&v))))
        }
    }

    fn velocity(&self, w: &WorldlineState) -> Option<[Real; 3]> {
        three_velocity(&w.u).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    ConvergedOnShell,
    Diverged,
    TauMaxReached,
    StepCollapse,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::ConvergedOnShell => "CONVERGED_ONSHELL",
            OutcomeKind::Diverged => "DIVERGED",
            OutcomeKind::TauMaxReached => "TAU_MAX_REACHED",
            OutcomeKind::StepCollapse => "STEP_COLLAPSE",
        }
    }
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    /// τ at which ε crossed eps_cap; present iff `kind` is `Diverged`.
    pub blowup_tau: Option<Real>,
}

/// Optional per-sample observables, filled by [`annotate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Derived {
    pub k: Option<KPotentials>,
    pub spectrum: Option<EigenSpectrum>,
    pub velocity: Option<[Real; 3]>,
}

#[derive(Clone, Debug)]
pub struct Sample<S> {
    pub tau: Real,
    pub state: S,
    pub derived: Derived,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub domain_retries: u64,
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub samples: Vec<Sample<S>>,
    pub outcome: Outcome,
    pub tau_end: Real,
    pub stats: StepStats,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &Sample<S> {
        self.samples.last().expect("a trajectory always holds its initial sample")
    }
}

fn on_shell(s: &ScalarState, floor: &Real) -> bool {
    s.components().iter().all(|c| c.abs() < *floor)
}

/// Integrates from τ = 0 until one of the halting events or τ_max.
///
/// Samples land exactly on multiples of `record_every` (the step is clipped to
/// reach them), plus the first and last state and growth samples near blow-up.
pub fn integrate<F: Formulation>(
    form: &F,
    initial: &F::State,
    p: &ModelParams,
    record_every: &Real,
) -> Result<Trajectory<F::State>> {
    p.validate()?;
    if !(record_every.is_finite() && *record_every > 0.0) {
        return Err(Error::Config(format!("record_every must be positive, got {record_every}")));
    }
    form.validate(initial)?;
    let prec = p.prec();
    let tab = Tableau::fehlberg(prec);
    let tol = StepTolerance::from_params(p);
    let rhs = |y: &[Real]| form.rhs(y, p);

    let mut y = form.pack(initial);
    let mut tau = Real::zero(prec);
    let mut h = p.real(1e-3).min(record_every).min(&p.tau_max);
    let mut next_record = record_every.with_prec(prec);
    let mut stats = StepStats::default();
    let mut samples = vec![Sample { tau: tau.clone(), state: initial.clone(), derived: Derived::default() }];
    let mut growth_mark = form.eps(initial).max(&Real::one(prec)) * GROWTH_SAMPLE_FACTOR;

    let kind = loop {
        let current = form.unpack(&y);
        let scalars = form.scalars(&current)?;
        if scalars.eps > p.eps_cap {
            break OutcomeKind::Diverged;
        }
        if on_shell(&scalars, &p.eps_floor) {
            break OutcomeKind::ConvergedOnShell;
        }
        if tau >= p.tau_max {
            break OutcomeKind::TauMaxReached;
        }
        if h < p.h_min {
            break OutcomeKind::StepCollapse;
        }
        let to_end = &p.tau_max - &tau;
        let to_record = &next_record - &tau;
        let limit = to_end.min(&to_record);
        let clipped = limit <= h;
        let h_try = if clipped { limit } else { h.clone() };
        if &tau + &h_try == tau {
            break OutcomeKind::StepCollapse;
        }

        match step_rk45(&y, rhs, &h_try, &tab, &tol) {
            Err(Error::DomainStep) => {
                stats.domain_retries += 1;
                h = h_try * 0.5;
                continue;
            }
            Err(e) => return Err(e),
            Ok((y_new, err)) => {
                let err_f = err.to_f64();
                let factor = if err_f == 0.0 {
                    5.0
                } else if err_f.is_finite() {
                    (0.9 * err_f.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    0.2
                };
                if err_f <= 1.0 {
                    stats.accepted += 1;
                    let state = form.unpack(&y_new);
                    form.check_accepted(&state)?;
                    tau = if !clipped {
                        &tau + &h_try
                    } else if to_record <= to_end {
                        next_record.clone()
                    } else {
                        p.tau_max.clone()
                    };
                    y = y_new;
                    let eps = form.eps(&state);
                    let on_grid = tau == next_record;
                    if on_grid {
                        next_record = &next_record + record_every;
                    }
                    let growth = eps > growth_mark;
                    if growth {
                        growth_mark = &eps * GROWTH_SAMPLE_FACTOR;
                    }
                    if on_grid || growth {
                        samples.push(Sample { tau: tau.clone(), state, derived: Derived::default() });
                    }
                    let grown = h_try * factor;
                    h = if clipped { grown.max(&h) } else { grown };
                } else {
                    stats.rejected += 1;
                    h = h_try * factor;
                }
            }
        }
    };

    if samples.last().map(|s| s.tau != tau).unwrap_or(true) {
        samples.push(Sample { tau: tau.clone(), state: form.unpack(&y), derived: Derived::default() });
    }
    let blowup_tau = (kind == OutcomeKind::Diverged).then(|| tau.clone());
    Ok(Trajectory { samples, outcome: Outcome { kind, blowup_tau }, tau_end: tau, stats })
}

pub fn integrate_scalar(initial: &ScalarState, p: &ModelParams, record_every: &Real) -> Result<Trajectory<ScalarState>> {
    integrate(&ScalarForm, initial, p, record_every)
}

pub fn integrate_vector(
    initial: &WorldlineState,
    p: &ModelParams,
    record_every: &Real,
) -> Result<Trajectory<WorldlineState>> {
    integrate(&VectorForm, initial, p, record_every)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnnotateWhat {
    pub k: bool,
    pub spectrum: bool,
    pub velocity: bool,
}

/// Fills per-sample derived observables; samples are processed in parallel.
pub fn annotate<F: Formulation>(
    form: &F,
    traj: &mut Trajectory<F::State>,
    p: &ModelParams,
    what: AnnotateWhat,
) -> Result<()> {
    traj.samples.par_iter_mut().try_for_each(|s| -> Result<()> {
        let scalars = form.scalars(&s.state)?;
        if what.k {
            s.derived.k = Some(k_potentials(&scalars, p)?);
        }
        if what.spectrum {
            let j = jacobian(&scalars, p, JacobianMode::Analytic)?;
            s.derived.spectrum = Some(eigenvalues(&j)?);
        }
        if what.velocity {
            s.derived.velocity = form.velocity(&s.state);
        }
        Ok(())
    })
}

/// τ* from a straight-line least-squares fit of 1/ε against τ over the samples
/// in the last decade of ε growth (ε ≥ ε_last/10), never earlier than the last
/// recorded τ.
pub fn blowup_time_estimate<F: Formulation>(form: &F, traj: &Trajectory<F::State>) -> Result<Real> {
    if traj.outcome.kind != OutcomeKind::Diverged {
        return Err(Error::Fit(format!("trajectory ended with {}, not DIVERGED", traj.outcome.kind)));
    }
    let pts: Vec<(Real, Real)> = traj.samples.iter().map(|s| (s.tau.clone(), form.eps(&s.state))).collect();
    blowup_fit(&pts)
}

/// The fit behind [`blowup_time_estimate`] on raw (τ, ε) pairs.
pub fn blowup_fit(points: &[(Real, Real)]) -> Result<Real> {
    let (tau_last, eps_last) = points.last().ok_or_else(|| Error::Fit("no samples".into()))?;
    let threshold = eps_last / 10.0;
    let window: Vec<&(Real, Real)> = points.iter().filter(|(_, e)| *e >= threshold).collect();
    if window.len() < 4 {
        return Err(Error::Fit(format!(
            "{} samples in the last decade of eps growth, need at least 4",
            window.len()
        )));
    }
    let n = Real::from_i64(tau_last.prec(), window.len() as i64);
    let xs: Vec<Real> = window.iter().map(|(t, _)| t.clone()).collect();
    let ys: Vec<Real> = window.iter().map(|(_, e)| 1.0 / e).collect();
    let mx = xs.iter().cloned().sum::<Real>() / &n;
    let my = ys.iter().cloned().sum::<Real>() / &n;
    let mut sxy = n.zero_like();
    let mut sxx = n.zero_like();
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - &mx;
        sxy += &dx * (y - &my);
        sxx += &dx * &dx;
    }
    if sxx.is_zero() {
        return Err(Error::Fit("fit window spans zero time".into()));
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::Fit("1/eps is not decreasing over the fit window".into()));
    }
    let root = &mx - my / slope;
    Ok(root.max(tau_last))
}

#[derive(Clone, Debug)]
pub struct SweepItem<S> {
    pub d: Real,
    pub result: Result<Trajectory<S>>,
}

/// One integration per D from the same initial state, run in parallel;
/// results come back in input order.
pub fn sweep_d<F: Formulation>(
    form: &F,
    initial: &F::State,
    d_values: &[Real],
    p: &ModelParams,
    record_every: &Real,
) -> Vec<SweepItem<F::State>> {
    d_values
        .par_iter()
        .map(|d| {
            let pd = p.clone().with_d_real(d);
            SweepItem { d: d.clone(), result: integrate(form, initial, &pd, record_every) }
        })
        .collect()
}
