//! TOML configuration shared by the library entry points and the CLI.
//!
//! Every leaf key is listed in [`KNOWN_KEYS`] with a one-line description;
//! anything else is rejected with the nearest known key as a suggestion.

use crate::coeffs::{Mollifier, ScaleNet, Term, TimeDistribution};
use crate::experiments::{ExperimentConfig, ModerateCase};
use crate::fd_solver::Grid1D;
use crate::freq_energy::{EquationSpec, LeviOptions, Regularisation};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use toml::{Table, Value};

/// `(dotted key, description)` for every accepted key.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("output_dir", "directory for CSV/SVG output (overridden by VWLAB_OUTPUT_DIR and --output-dir)"),
    ("seed", "seed for all random sampling"),
    ("coefficient.horizon", "final time T of the coefficients"),
    ("coefficient.a", "principal coefficient: term or list of terms ({jump={at,left,right}}, {point={at,order,weight}}, {polynomial=[c0,c1,..]})"),
    ("coefficient.c", "first-order coefficient (same term syntax as coefficient.a)"),
    ("coefficient.d", "damping coefficient, regularised with damping_scale"),
    ("coefficient.e", "zero-order coefficient"),
    ("mollifier.kind", "friedrichs | vanishing-moments | gevrey"),
    ("mollifier.radius", "support radius of the friedrichs bump (1 gives phi1, 2 gives phi2)"),
    ("mollifier.sigma", "Gevrey order of the gevrey kind (> 1)"),
    ("scale.kind", "scale net for a, c, e: logpower | powerlaw | identity"),
    ("scale.c", "constant c of the scale net"),
    ("scale.r", "exponent r of logpower: omega^-1 = c (ln 1/eps)^r"),
    ("scale.p", "exponent p of powerlaw: omega = c eps^p"),
    ("damping_scale.kind", "scale net for d: logpower | powerlaw | identity"),
    ("damping_scale.c", "constant c of the damping scale net"),
    ("damping_scale.r", "exponent r of the logpower damping net"),
    ("damping_scale.p", "exponent p of the powerlaw damping net"),
    ("grid.x_lo", "left end of the periodic interval"),
    ("grid.x_hi", "right end of the periodic interval"),
    ("grid.nx", "number of grid cells (>= 8)"),
    ("window.t0", "start time of the finite-difference solve"),
    ("window.t1", "final time of the finite-difference solve"),
    ("study.model", "heaviside | delta | consistency | moderateness-case1 | moderateness-case2"),
    ("study.eps", "strictly decreasing list of eps values in (0,1]"),
    ("study.smooth_coefficient", "polynomial coefficients of a(t) for the consistency study"),
    ("study.s", "Gevrey order of the moderateness study"),
    ("study.k", "balance exponent k in delta = <xi>^(-k/(k+2))"),
    ("study.xi", "list of |xi| values for frequency sweeps"),
    ("levi.c1", "Levi constant for the lower-order ratio"),
    ("levi.c2", "Levi constant for the damping ratio (default: squared mollifier peak)"),
    ("levi.gamma", "weight gamma in C_eps = 4 (C1 + gamma C2)^(1/2)"),
    ("levi.r", "lower bound R on |xi|"),
    ("levi.nt", "number of time steps of the Levi grid"),
];

/// One term of a coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermSpec {
    Jump { at: f64, left: f64, right: f64 },
    Point { at: f64, order: u32, weight: f64 },
    Polynomial(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    One(TermSpec),
    Many(Vec<TermSpec>),
}

impl CoefficientSpec {
    fn zero() -> Self {
        CoefficientSpec::One(TermSpec::Polynomial(vec![0.0]))
    }

    fn terms(&self) -> &[TermSpec] {
        match self {
            CoefficientSpec::One(t) => std::slice::from_ref(t),
            CoefficientSpec::Many(v) => v,
        }
    }

    pub fn distribution(&self, horizon: f64) -> Result<TimeDistribution> {
        let mut d = TimeDistribution::new(horizon)?;
        for t in self.terms() {
            d = match t {
                TermSpec::Jump { at, left, right } => d.with(Term::Jump {
                    at: *at,
                    left: *left,
                    right: *right,
                })?,
                TermSpec::Point { at, order, weight } => d.with(Term::Point {
                    at: *at,
                    order: *order,
                    weight: *weight,
                })?,
                TermSpec::Polynomial(c) => {
                    let p = TimeDistribution::polynomial(horizon, c)?;
                    p.terms().iter().try_fold(d, |acc, t| acc.with(t.clone()))?
                }
            };
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoefficientSection {
    pub horizon: f64,
    pub a: CoefficientSpec,
    pub c: CoefficientSpec,
    pub d: CoefficientSpec,
    pub e: CoefficientSpec,
}

impl Default for CoefficientSection {
    fn default() -> Self {
        CoefficientSection {
            horizon: 2.0,
            a: CoefficientSpec::One(TermSpec::Jump {
                at: 1.0,
                left: 0.0,
                right: 1.0,
            }),
            c: CoefficientSpec::zero(),
            d: CoefficientSpec::zero(),
            e: CoefficientSpec::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MollifierSection {
    pub kind: String,
    pub radius: f64,
    pub sigma: f64,
}

impl Default for MollifierSection {
    fn default() -> Self {
        MollifierSection {
            kind: "friedrichs".into(),
            radius: 1.0,
            sigma: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScaleSection {
    pub kind: String,
    pub c: f64,
    pub r: f64,
    pub p: f64,
}

impl Default for ScaleSection {
    fn default() -> Self {
        ScaleSection {
            kind: "logpower".into(),
            c: 1.0,
            r: 1.0,
            p: 1.0,
        }
    }
}

impl ScaleSection {
    pub fn net(&self) -> Result<ScaleNet> {
        match self.kind.as_str() {
            "logpower" => ScaleNet::log_power(self.c, self.r),
            "powerlaw" => ScaleNet::power_law(self.c, self.p),
            "identity" => Ok(ScaleNet::Identity),
            other => Err(Error::Config(format!(
                "unknown scale kind '{other}' (logpower | powerlaw | identity)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSection {
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            x_lo: 0.0,
            x_hi: 2.0,
            nx: crate::fd_solver::DEFAULT_NX,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowSection {
    pub t0: f64,
    pub t1: f64,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection { t0: 0.8, t1: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudySection {
    pub model: String,
    pub eps: Vec<f64>,
    pub smooth_coefficient: Vec<f64>,
    pub s: f64,
    pub k: f64,
    pub xi: Vec<f64>,
}

impl Default for StudySection {
    fn default() -> Self {
        let d = ExperimentConfig::default();
        StudySection {
            model: "heaviside".into(),
            eps: d.eps_list,
            smooth_coefficient: d.smooth_coefficient,
            s: d.s,
            k: d.k,
            xi: d.xi_list,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LeviSection {
    pub c1: f64,
    pub c2: Option<f64>,
    pub gamma: f64,
    pub r: f64,
    pub nt: usize,
}

impl Default for LeviSection {
    fn default() -> Self {
        LeviSection {
            c1: 0.0,
            c2: None,
            gamma: 8.0,
            r: 1.0,
            nt: 2000,
        }
    }
}

/// Study selected by `study.model`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyModel {
    Heaviside,
    Delta,
    Consistency,
    Moderateness(ModerateCase),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub coefficient: CoefficientSection,
    pub mollifier: MollifierSection,
    pub scale: ScaleSection,
    pub damping_scale: ScaleSection,
    pub grid: GridSection,
    pub window: WindowSection,
    pub study: StudySection,
    pub levi: LeviSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            output_dir: PathBuf::from("out"),
            seed: 42,
            coefficient: CoefficientSection::default(),
            mollifier: MollifierSection::default(),
            scale: ScaleSection::default(),
            damping_scale: ScaleSection::default(),
            grid: GridSection::default(),
            window: WindowSection::default(),
            study: StudySection::default(),
            levi: LeviSection::default(),
        }
    }
}

/// Nearest entry of [`KNOWN_KEYS`] to `key`.
pub fn suggest(key: &str) -> Option<String> {
    KNOWN_KEYS
        .iter()
        .map(|(k, _)| (strsim::normalized_damerau_levenshtein(key, k), *k))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, k)| k.to_string())
}

fn is_known(key: &str) -> bool {
    KNOWN_KEYS.iter().any(|(k, _)| *k == key)
}

fn check_keys(table: &Table, prefix: &str) -> Result<()> {
    for (k, v) in table {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        if is_known(&path) {
            continue;
        }
        match v {
            Value::Table(t) if KNOWN_KEYS.iter().any(|(k, _)| k.starts_with(&format!("{path}."))) => {
                check_keys(t, &path)?
            }
            _ => {
                return Err(Error::UnknownKey {
                    suggestion: suggest(&path),
                    key: path,
                })
            }
        }
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies `key=value` to the table; the value is read as TOML, falling back
/// to a bare string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let key = key.trim();
    if !is_known(key) {
        return Err(Error::UnknownKey {
            key: key.to_string(),
            suggestion: suggest(key),
        });
    }
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().expect("split yields one part");
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{p}' is not a table")))?;
    }
    cur.insert(leaf.to_string(), parse_value(raw.trim()));
    Ok(())
}

impl Config {
    /// Parses TOML text, applies overrides, and checks every key.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        check_keys(&table, "")?;
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    /// Reads `path` (defaults when `None`) and applies overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            None => String::new(),
        };
        Self::parse(&text, overrides)
    }

    /// Canonical TOML rendering.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serialisable")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    pub fn mollifier(&self) -> Result<Mollifier> {
        let m = &self.mollifier;
        match m.kind.as_str() {
            "friedrichs" => Mollifier::friedrichs(m.radius),
            "vanishing-moments" => Ok(Mollifier::vanishing_moments()),
            "gevrey" => Mollifier::gevrey(m.sigma),
            other => Err(Error::Config(format!(
                "unknown mollifier kind '{other}' (friedrichs | vanishing-moments | gevrey)"
            ))),
        }
    }

    pub fn regularisation(&self) -> Result<Regularisation> {
        Ok(Regularisation {
            mollifier: self.mollifier()?,
            omega: self.scale.net()?,
            nu: self.damping_scale.net()?,
        })
    }

    /// One-dimensional equation with zero data.
    pub fn equation(&self) -> Result<EquationSpec> {
        let c = &self.coefficient;
        let h = c.horizon;
        let a = c.a.distribution(h)?.mark_nonnegative()?;
        Ok(EquationSpec::new(vec![a])?
            .with_c(vec![c.c.distribution(h)?])?
            .with_d(c.d.distribution(h)?)
            .with_e(c.e.distribution(h)?))
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.grid.x_lo, self.grid.x_hi, self.grid.nx)
    }

    pub fn study_model(&self) -> Result<StudyModel> {
        Ok(match self.study.model.as_str() {
            "heaviside" => StudyModel::Heaviside,
            "delta" => StudyModel::Delta,
            "consistency" => StudyModel::Consistency,
            "moderateness-case1" => StudyModel::Moderateness(ModerateCase::Analytic),
            "moderateness-case2" => StudyModel::Moderateness(ModerateCase::GevreyNet),
            other => {
                return Err(Error::Config(format!(
                    "unknown study model '{other}' (heaviside | delta | consistency | moderateness-case1 | moderateness-case2)"
                )))
            }
        })
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mollifier = self.mollifier()?;
        let alt_mollifier = if mollifier == Mollifier::phi2() {
            Mollifier::phi1()
        } else {
            Mollifier::phi2()
        };
        let cfg = ExperimentConfig {
            mollifier,
            alt_mollifier,
            eps_list: self.study.eps.clone(),
            grid: self.grid()?,
            t0: self.window.t0,
            t1: self.window.t1,
            smooth_coefficient: self.study.smooth_coefficient.clone(),
            s: self.study.s,
            k: self.study.k,
            xi_list: self.study.xi.clone(),
            output_dir: self.output_dir.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn levi_options(&self) -> Result<LeviOptions> {
        let l = &self.levi;
        let peak = self.mollifier()?.max_value();
        let h = self.coefficient.horizon;
        let nt = l.nt.max(1);
        Ok(LeviOptions {
            c1: l.c1,
            c2: l.c2.unwrap_or(peak * peak),
            gamma: l.gamma,
            t_grid: (0..=nt).map(|i| h * i as f64 / nt as f64).collect(),
            xi_grid: self.study.xi.iter().map(|&x| vec![x]).collect(),
            r: l.r,
        })
    }
}

/// Key summary printed with usage errors and `--help`.
pub fn schema_summary() -> String {
    let width = KNOWN_KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::from("Config keys (TOML, or --set key=value):\n");
    for (k, doc) in KNOWN_KEYS {
        let _ = writeln!(s, "  {k:<width$}  {doc}");
    }
    s
}
