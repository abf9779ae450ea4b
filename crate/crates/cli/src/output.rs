//! CSV and metadata emission.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use offshell_core::integrator::{Sample, Trajectory};
use offshell_core::{Real, ScalarState, WorldlineState};
use serde_json::{json, Value};

use crate::scenario::Emit;

pub const VECTOR_STATE_COLUMNS: [&str; 17] = [
    "t", "x", "y", "z", "ut", "ux", "uy", "uz", "at", "ax", "ay", "az", "jt", "jx", "jy", "jz", "eps",
];

/// Column layout shared by the CSV writer and the README: tau, state block,
/// then k1..k3, re0..re5, im0..im5, vx..vz as requested.
pub trait StateColumns {
    fn state_names() -> Vec<&'static str>;
    fn state_values(&self) -> Vec<Real>;
}

impl StateColumns for ScalarState {
    fn state_names() -> Vec<&'static str> {
        ScalarState::NAMES.to_vec()
    }

    fn state_values(&self) -> Vec<Real> {
        self.to_array().to_vec()
    }
}

impl StateColumns for WorldlineState {
    fn state_names() -> Vec<&'static str> {
        VECTOR_STATE_COLUMNS.to_vec()
    }

    fn state_values(&self) -> Vec<Real> {
        let pos = self.pos.clone().unwrap_or_else(|| offshell_core::FourVector::zero(self.prec()));
        let mut out: Vec<Real> = [&pos, &self.u, &self.a, &self.j].iter().flat_map(|v| v.to_array()).collect();
        out.push(self.eps());
        out
    }
}

pub fn columns<S: StateColumns>(emit: &BTreeSet<Emit>) -> Vec<String> {
    let mut cols = vec!["tau".to_string()];
    if emit.contains(&Emit::State) {
        cols.extend(S::state_names().iter().map(|s| s.to_string()));
    }
    if emit.contains(&Emit::KPotentials) {
        cols.extend(["k1", "k2", "k3"].map(String::from));
    }
    if emit.contains(&Emit::Eigenvalues) {
        cols.extend((0..6).map(|i| format!("re{i}")));
        cols.extend((0..6).map(|i| format!("im{i}")));
    }
    if emit.contains(&Emit::Velocity) {
        cols.extend(["vx", "vy", "vz"].map(String::from));
    }
    cols
}

fn row<S: StateColumns>(s: &Sample<S>, emit: &BTreeSet<Emit>, digits: usize) -> Vec<String> {
    let fmt = |v: &Real| v.to_string_digits(digits);
    let mut out = vec![fmt(&s.tau)];
    if emit.contains(&Emit::State) {
        out.extend(s.state.state_values().iter().map(fmt));
    }
    if emit.contains(&Emit::KPotentials) {
        let k = s.derived.k.as_ref().expect("K potentials annotated");
        out.extend(k.to_array().iter().map(fmt));
    }
    if emit.contains(&Emit::Eigenvalues) {
        let spec = s.derived.spectrum.as_ref().expect("spectrum annotated");
        out.extend(spec.values.iter().map(|c| fmt(&c.re)));
        out.extend(spec.values.iter().map(|c| fmt(&c.im)));
    }
    if emit.contains(&Emit::Velocity) {
        match &s.derived.velocity {
            Some(v) => out.extend(v.iter().map(fmt)),
            None => out.extend(["NaN"; 3].map(String::from)),
        }
    }
    out
}

/// Significant digits for a given precision (precision_bits / 3).
pub fn digits_for(prec: u32) -> usize {
    (prec / 3) as usize
}

pub fn write_trajectory<S: StateColumns>(
    path: &Path,
    traj: &Trajectory<S>,
    emit: &BTreeSet<Emit>,
    prec: u32,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(columns::<S>(emit))?;
    let digits = digits_for(prec);
    for s in &traj.samples {
        w.write_record(row(s, emit, digits))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Decimal string at the working precision, for metadata.
pub fn dec(v: &Real) -> Value {
    json!(v.to_string_digits(digits_for(v.prec())))
}
