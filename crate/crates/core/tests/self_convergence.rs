mod common;

use common::*;
use offshell_core::integrator::integrate_scalar;
use offshell_core::{ModelParams, Real, ScalarState};

fn eps_at_checkpoints(tol: f64) -> (Vec<Real>, u64) {
    let s0 = ScalarState::from_array(["0.5", "0.1", "0", "0", "0", "0"].map(rs));
    let p = ModelParams::new(P).with_tau_max(5.0).with_tolerances(tol, tol);
    let traj = integrate_scalar(&s0, &p, &rs("1")).unwrap();
    (traj.samples.iter().map(|s| s.state.eps.clone()).collect(), traj.stats.accepted)
}

/// Tightening the tolerance moves ε at fixed checkpoints by no more than the
/// accumulated per-step budget of the coarse run, and the move shrinks as
/// the tolerance keeps shrinking.
#[test]
fn halving_tolerance_converges() {
    let (coarse, steps) = eps_at_checkpoints(1e-20);
    let (fine, _) = eps_at_checkpoints(5e-21);
    let (finer, _) = eps_at_checkpoints(2.5e-21);
    assert_eq!(coarse.len(), 6);
    let mut d1_total = r(0.0);
    let mut d2_total = r(0.0);
    for ((c, f), g) in coarse.iter().zip(&fine).zip(&finer) {
        let d1 = (c - f).abs();
        assert!(d1 < r(10.0 * 1e-20 * steps as f64), "{d1} over {steps} steps");
        d1_total += d1;
        d2_total += (f - g).abs();
    }
    assert!(d2_total < d1_total, "{d2_total} !< {d1_total}");
}
