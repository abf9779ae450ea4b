//! Scenario files: JSON with numbers given either as JSON numbers or as
//! decimal strings (strings keep digits beyond double precision).

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use offshell_core::{FourVector, ModelParams, Real, ScalarState, WorldlineState};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Scalar,
    Vector,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Scalar => "scalar",
            Form::Vector => "vector",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    State,
    KPotentials,
    Eigenvalues,
    Velocity,
}

/// A decimal kept as text until the working precision is known.
#[derive(Clone, Debug, PartialEq)]
pub struct Num(pub String);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Num, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => Ok(Num(n.to_string())),
            Value::String(s) => Ok(Num(s.trim().to_string())),
            other => Err(serde::de::Error::custom(format!("expected a number or decimal string, got {other}"))),
        }
    }
}

impl Num {
    fn real(&self, prec: u32, what: &str) -> Result<Real> {
        Real::parse(prec, &self.0).with_context(|| format!("{what}: cannot parse {:?} as a real", self.0))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Vector { u: [Num; 4], a: [Num; 4], j: [Num; 4] },
    Scalar { eps: Num, deps: Option<Num>, ddeps: Option<Num>, rho: Option<Num>, drho: Option<Num>, eta: Option<Num> },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    #[serde(rename = "D", alias = "d")]
    pub d: Option<Num>,
    pub eps_floor: Option<Num>,
    pub eps_cap: Option<Num>,
    pub abs_tol: Option<Num>,
    pub rel_tol: Option<Num>,
    pub tau_max: Option<Num>,
    pub h_min: Option<Num>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default = "default_form")]
    pub form: Form,
    pub precision_bits: Option<u32>,
    pub initial: InitialSpec,
    #[serde(default)]
    pub params: ParamSpec,
    pub record_every: Option<Num>,
    pub emit: Option<Vec<Emit>>,
    pub d_values: Option<Vec<Num>>,
}

fn default_form() -> Form {
    Form::Scalar
}

pub enum Initial {
    Scalar(ScalarState),
    Vector(WorldlineState),
}

/// A fully resolved scenario: every number at the working precision.
pub struct Scenario {
    pub name: String,
    pub form: Form,
    pub initial: Initial,
    pub params: ModelParams,
    pub record_every: Real,
    pub emit: BTreeSet<Emit>,
    /// (label as written, value)
    pub d_values: Option<Vec<(String, Real)>>,
}

pub const BUNDLED: &[(&str, &str)] = &[
    (
        "converge-fig2",
        r#"{"name": "converge-fig2", "form": "scalar", "precision_bits": 256,
            "initial": {"eps": "0.5", "deps": "0.1"},
            "params": {"D": "1", "tau_max": "20"},
            "record_every": "0.01", "emit": ["state", "k_potentials"]}"#,
    ),
    (
        "diverge-fig4",
        r#"{"name": "diverge-fig4", "form": "scalar", "precision_bits": 256,
            "initial": {"eps": "0.5", "rho": "-0.1"},
            "params": {"D": "1", "tau_max": "2"},
            "record_every": "0.01", "emit": ["state", "k_potentials"],
            "d_values": ["0.5", "1", "2", "4", "8"]}"#,
    ),
    (
        "vector-converge",
        r#"{"name": "vector-converge", "form": "vector", "precision_bits": 256,
            "initial": {"eps": "0.5", "deps": "0.1"},
            "params": {"D": "1", "tau_max": "20"},
            "record_every": "0.01", "emit": ["state", "velocity"]}"#,
    ),
    (
        "vector-diverge",
        r#"{"name": "vector-diverge", "form": "vector", "precision_bits": 256,
            "initial": {"u": ["1.22474487139158904909864203735294569598297374032833506421634628362548018872865751326992972", "0", "0", "0"],
                        "a": ["0.1", "0.1", "0", "0"], "j": ["0.2", "0.2", "0", "0"]},
            "params": {"D": "1", "tau_max": "5"},
            "record_every": "0.01", "emit": ["state", "velocity"]}"#,
    ),
];

pub fn bundled(name: &str) -> Result<ScenarioSpec> {
    let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == name) else {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        bail!("unknown scenario {name:?}; bundled scenarios: {}", names.join(", "));
    };
    Ok(serde_json::from_str(text)?)
}

pub fn load(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(spec)
}

impl ScenarioSpec {
    /// Resolves numbers at `prec` and checks every invariant the run relies on.
    pub fn resolve(&self, prec: u32, form_override: Option<Form>) -> Result<Scenario> {
        let form = form_override.unwrap_or(self.form);
        let num = |n: &Option<Num>, what: &str| -> Result<Option<Real>> {
            n.as_ref().map(|v| v.real(prec, what)).transpose()
        };
        let mut params = ModelParams::new(prec);
        let ps = &self.params;
        let fields: [(&Option<Num>, &str, &mut Real); 7] = [
            (&ps.d, "D", &mut params.d),
            (&ps.eps_floor, "eps_floor", &mut params.eps_floor),
            (&ps.eps_cap, "eps_cap", &mut params.eps_cap),
            (&ps.abs_tol, "abs_tol", &mut params.abs_tol),
            (&ps.rel_tol, "rel_tol", &mut params.rel_tol),
            (&ps.tau_max, "tau_max", &mut params.tau_max),
            (&ps.h_min, "h_min", &mut params.h_min),
        ];
        for (spec, what, slot) in fields {
            if let Some(v) = num(spec, what)? {
                *slot = v;
            }
        }
        params.validate()?;

        let initial = match (&self.initial, form) {
            (InitialSpec::Vector { .. }, Form::Scalar) => {
                bail!("initial u/a/j given but form is scalar; give (eps, deps, ddeps, rho, drho, eta) instead")
            }
            (InitialSpec::Vector { u, a, j }, Form::Vector) => {
                let v = |c: &[Num; 4], what: &str| -> Result<FourVector> {
                    let [t, x, y, z] = c;
                    Ok(FourVector::new(t.real(prec, what)?, x.real(prec, what)?, y.real(prec, what)?, z.real(prec, what)?))
                };
                let w = WorldlineState::new(v(u, "initial.u")?, v(a, "initial.a")?, v(j, "initial.j")?);
                w.validate()?;
                Initial::Vector(w)
            }
            (InitialSpec::Scalar { eps, deps, ddeps, rho, drho, eta }, _) => {
                let zero = Real::zero(prec);
                let get = |n: &Option<Num>, what: &str| -> Result<Real> { Ok(num(n, what)?.unwrap_or_else(|| zero.clone())) };
                let s = ScalarState {
                    eps: eps.real(prec, "initial.eps")?,
                    deps: get(deps, "initial.deps")?,
                    ddeps: get(ddeps, "initial.ddeps")?,
                    rho: get(rho, "initial.rho")?,
                    drho: get(drho, "initial.drho")?,
                    eta: get(eta, "initial.eta")?,
                };
                s.validate()?;
                match form {
                    Form::Scalar => Initial::Scalar(s),
                    Form::Vector => Initial::Vector(offshell_core::kinematics::realize_worldline(&s)?),
                }
            }
        };

        let record_every = num(&self.record_every, "record_every")?.unwrap_or_else(|| Real::from_f64(prec, 0.01));
        if !(record_every > 0.0) {
            return Err(offshell_core::Error::Config(format!("record_every must be positive, got {record_every}")).into());
        }
        let emit: BTreeSet<Emit> = self.emit.clone().unwrap_or_else(|| vec![Emit::State]).into_iter().collect();
        if emit.contains(&Emit::Velocity) && form != Form::Vector {
            return Err(offshell_core::Error::Config("emit \"velocity\" requires the vector form".into()).into());
        }
        let d_values = match &self.d_values {
            Some(list) => Some(parse_d_list(list.iter().map(|n| n.0.as_str()), prec)?),
            None => None,
        };
        Ok(Scenario { name: self.name.clone(), form, initial, params, record_every, emit, d_values })
    }
}

/// Parses D values and rejects non-positive ones.
pub fn parse_d_list<'a>(items: impl Iterator<Item = &'a str>, prec: u32) -> Result<Vec<(String, Real)>> {
    let mut out = Vec::new();
    for item in items {
        let item = item.trim();
        let d = Real::parse(prec, item).with_context(|| format!("cannot parse D value {item:?}"))?;
        if !(d > 0.0) {
            return Err(offshell_core::Error::Config(format!("D must be positive, got {item}")).into());
        }
        out.push((item.to_string(), d));
    }
    if out.is_empty() {
        return Err(offshell_core::Error::Config("empty D list".into()).into());
    }
    Ok(out)
}
