//! End-to-end studies over ε lists, with CSV and SVG output.

use crate::coeffs::{fourier_decay_fit, Mollifier, TimeDistribution};
use crate::exact::{dalembert_const, eval_exact, mode_reference, PeriodicData, PiecewiseSolution};
use crate::fd_solver::{l2_norm, oleinik_parts, solve, Grid1D, SolutionField, ToyModel};
use crate::freq_energy::{self, fixed_data, moderateness_sweep, sweep_samples, EquationSpec, Regularisation};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// The list used by every study unless configured otherwise.
pub const DEFAULT_EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Which moderateness setting to sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModerateCase {
    /// Heaviside coefficient, analytic data `ĝ0 = e^{-⟨ξ⟩}`.
    Analytic,
    /// Heaviside coefficient, data `ĝ0 = ρ̂_ε` from the Gevrey net.
    GevreyNet,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub mollifier: Mollifier,
    /// Second mollifier for the consistency comparison.
    pub alt_mollifier: Mollifier,
    pub eps_list: Vec<f64>,
    pub grid: Grid1D,
    pub t0: f64,
    pub t1: f64,
    /// Polynomial coefficients of `a(t)` for the consistency study.
    pub smooth_coefficient: Vec<f64>,
    /// Gevrey order of the moderateness study.
    pub s: f64,
    /// Balance exponent `k` in `δ = ⟨ξ⟩^{-k/(k+2)}`.
    pub k: f64,
    pub xi_list: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        ExperimentConfig {
            mollifier: Mollifier::phi1(),
            alt_mollifier: Mollifier::phi2(),
            eps_list: DEFAULT_EPS.to_vec(),
            grid: Grid1D::standard(),
            t0: 0.8,
            t1: 2.0,
            smooth_coefficient: vec![1.0, 0.0, 1.0],
            s: 2.0,
            k: 2.0,
            xi_list: [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|m| m * pi).collect(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::Config("eps_list is empty".into()));
        }
        if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::Config(format!("eps {e} outside (0, 1]")));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps_list must be strictly decreasing".into()));
        }
        if !(self.t1 > self.t0 && self.t0 >= 0.0) {
            return Err(Error::Config(format!("bad time window [{}, {}]", self.t0, self.t1)));
        }
        Ok(())
    }

    /// SHA-256 of the debug rendering, which covers every field.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub eps: f64,
    pub metric: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyResult {
    pub name: String,
    pub provenance: BTreeMap<String, String>,
    pub rows: Vec<Row>,
}

impl StudyResult {
    fn new(name: &str, cfg: &ExperimentConfig, mollifier: &Mollifier) -> Self {
        let mut p = BTreeMap::new();
        p.insert("study".into(), name.into());
        p.insert("config_sha256".into(), cfg.hash());
        p.insert(
            "grid".into(),
            format!("[{}, {}] nx={}", cfg.grid.x_lo, cfg.grid.x_hi, cfg.grid.nx),
        );
        p.insert("mollifier".into(), format!("{:?}", mollifier.kind()));
        StudyResult {
            name: name.into(),
            provenance: p,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, eps: f64, metric: &str, value: f64) {
        self.rows.push(Row {
            eps,
            metric: metric.into(),
            value,
        });
    }

    /// Stable sort by ε descending; metrics keep insertion order.
    fn finish(mut self) -> Self {
        self.rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        self
    }

    /// Metric names in first-appearance order.
    pub fn metrics(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.metric) {
                out.push(r.metric.clone());
            }
        }
        out
    }

    /// `(ε, value)` pairs of one metric, ε descending.
    pub fn series(&self, metric: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric)
            .map(|r| (r.eps, r.value))
            .collect()
    }
}

fn heaviside_error(
    cfg: &ExperimentConfig,
    m: &Mollifier,
    eps: f64,
    data: &PeriodicData,
) -> Result<(SolutionField, f64)> {
    let out = solve(cfg.grid, &ToyModel::Heaviside, m, eps, data, cfg.t0, cfg.t1, &[])?;
    let sol = PiecewiseSolution::new(data.clone());
    let g = cfg.grid;
    let diff: Vec<f64> = (0..g.nx)
        .map(|j| out.field.u[j] - eval_exact(&sol, cfg.t1, g.x(j)))
        .collect();
    Ok((out.field, l2_norm(&diff, g.dx)))
}

/// Heaviside model: `L²` error against the piecewise solution at `t1`, and
/// the Oleinik ratio `‖u‖²_{H²}/(‖g0‖²_{H⁵} + ‖g1‖²_{H⁴})`.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let data = PeriodicData::standard();
    let per_eps: Vec<(f64, f64, f64)> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let (field, err) = heaviside_error(cfg, &cfg.mollifier, eps, &data)?;
            let (num, den) = oleinik_parts(&field, &data, 2)?;
            Ok((eps, err, num / den))
        })
        .collect::<Result<_>>()?;
    let mut r = StudyResult::new("convergence", cfg, &cfg.mollifier);
    for (eps, err, ratio) in per_eps {
        r.push(eps, "l2_error", err);
        r.push(eps, "oleinik_ratio", ratio);
    }
    Ok(r.finish())
}

/// Delta model: the ratio with `H²` numerator, its `L²`-numerator variant,
/// and the (ε-independent) denominator.
pub fn delta_ratio_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    delta_ratio_study_with(cfg, &PeriodicData::standard())
}

pub fn delta_ratio_study_with(cfg: &ExperimentConfig, data: &PeriodicData) -> Result<StudyResult> {
    cfg.validate()?;
    let per_eps: Vec<(f64, f64, f64, f64)> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let out = solve(cfg.grid, &ToyModel::Delta, &cfg.mollifier, eps, data, cfg.t0, cfg.t1, &[])?;
            let (h2, den) = oleinik_parts(&out.field, data, 2)?;
            let (l2, _) = oleinik_parts(&out.field, data, 0)?;
            let ratio = |n: f64| if den > 0.0 { n / den } else { 0.0 };
            Ok((eps, ratio(h2), ratio(l2), den))
        })
        .collect::<Result<_>>()?;
    let mut r = StudyResult::new("delta_ratio", cfg, &cfg.mollifier);
    for (eps, h2, l2, den) in per_eps {
        r.push(eps, "oleinik_ratio", h2);
        r.push(eps, "ratio_l2", l2);
        r.push(eps, "denominator", den);
    }
    Ok(r.finish())
}

/// Smooth coefficient `a(t) = Σ cₖ tᵏ` from `t = 0`: solutions for both
/// mollifiers against the classical solution, and their mutual gap.
pub fn consistency_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let data = PeriodicData::standard();
    let coeffs = cfg.smooth_coefficient.clone();
    let horizon = cfg.t1.max(2.0);
    let a = TimeDistribution::polynomial(horizon, &coeffs)?.mark_nonnegative()?;
    let model = ToyModel::Coefficient(a);
    let g = cfg.grid;
    let a_fn = move |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
    let classical: Vec<f64> = if cfg.smooth_coefficient.iter().skip(1).all(|&c| c == 0.0) {
        let a0 = cfg.smooth_coefficient.first().copied().unwrap_or(0.0);
        (0..g.nx).map(|j| dalembert_const(a0, &data, cfg.t1, g.x(j))).collect()
    } else {
        let (sa, ca) = mode_reference(&a_fn, &data, cfg.t1, 200_000)
            .ok_or_else(|| Error::Precondition("consistency data must be a single mode".into()))?;
        let (k, _) = data.mode.expect("mode checked above");
        (0..g.nx)
            .map(|j| sa * (k * g.x(j)).sin() + ca * (k * g.x(j)).cos())
            .collect()
    };
    let norm = l2_norm(&classical, g.dx);
    let per_eps: Vec<(f64, f64, f64, f64)> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let u1 = solve(g, &model, &cfg.mollifier, eps, &data, 0.0, cfg.t1, &[])?.field.u;
            let u2 = solve(g, &model, &cfg.alt_mollifier, eps, &data, 0.0, cfg.t1, &[])?.field.u;
            let dist = |a: &[f64], b: &[f64]| {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                l2_norm(&d, g.dx)
            };
            Ok((eps, dist(&u1, &classical), dist(&u2, &classical), dist(&u1, &u2)))
        })
        .collect::<Result<_>>()?;
    let mut r = StudyResult::new("consistency", cfg, &cfg.mollifier);
    r.provenance
        .insert("alt_mollifier".into(), format!("{:?}", cfg.alt_mollifier.kind()));
    r.provenance
        .insert("coefficient".into(), format!("{:?}", cfg.smooth_coefficient));
    for (eps, e1, e2, gap) in per_eps {
        r.push(eps, "l2_error", e1);
        r.push(eps, "l2_error_alt", e2);
        r.push(eps, "mollifier_gap", gap);
        r.push(eps, "gap_relative", gap / norm);
    }
    Ok(r.finish())
}

/// Moderateness sweep on the frequency side followed by the decay fit.
///
/// Per-ε rows hold `sup_V` at each `|ξ|`; the fit lands in the provenance.
pub fn moderateness_study(cfg: &ExperimentConfig, case: ModerateCase) -> Result<StudyResult> {
    cfg.validate()?;
    let (spec, reg, fit_s) = moderate_setting(cfg, case)?;
    let xi: Vec<Vec<f64>> = cfg.xi_list.iter().map(|&x| vec![x]).collect();
    let rows = moderateness_sweep(&spec, &reg, &cfg.eps_list, &xi, cfg.k)?;
    let fit = fourier_decay_fit(&sweep_samples(&rows), fit_s)?;
    let mut r = StudyResult::new(
        match case {
            ModerateCase::Analytic => "moderateness_case1",
            ModerateCase::GevreyNet => "moderateness_case2",
        },
        cfg,
        &reg.mollifier,
    );
    r.provenance.insert("fit_s".into(), fit_s.to_string());
    r.provenance.insert("fit_n".into(), fit.n.to_string());
    r.provenance.insert("fit_c".into(), fit.c.to_string());
    r.provenance.insert("fit_c_prime".into(), fit.c_prime.to_string());
    r.provenance.insert("fit_residual".into(), fit.residual.to_string());
    for row in rows {
        r.push(row.eps, &format!("sup_V[xi={}]", row.xi[0]), row.sup_v);
    }
    Ok(r.finish())
}

fn moderate_setting(
    cfg: &ExperimentConfig,
    case: ModerateCase,
) -> Result<(EquationSpec, Regularisation, f64)> {
    let base = EquationSpec::heaviside(cfg.t1.max(2.0), 1.0)?;
    let reg = Regularisation::logarithmic();
    let zero = fixed_data(|_| Complex64::new(0.0, 0.0));
    match case {
        ModerateCase::Analytic => {
            let g0 = fixed_data(|xi| Complex64::new((-freq_energy::bracket(xi)).exp(), 0.0));
            Ok((base.with_data(g0, zero), reg, cfg.s))
        }
        ModerateCase::GevreyNet => {
            let net = Mollifier::gevrey(cfg.s)?;
            let g0: freq_energy::DataHat = std::sync::Arc::new(move |eps, xi: &[f64]| {
                let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                Complex64::new(net.gevrey_net_fourier(eps, norm).unwrap_or(f64::NAN), 0.0)
            });
            Ok((base.with_data(g0, zero), reg, cfg.s))
        }
    }
}

/// Output kinds of [`emit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

/// `# key: value` provenance lines, then `eps,metric,value`.
pub fn to_csv(r: &StudyResult) -> String {
    let mut out = String::new();
    for (k, v) in &r.provenance {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str("eps,metric,value\n");
    for row in &r.rows {
        let _ = writeln!(out, "{},{},{}", row.eps, row.metric, row.value);
    }
    out
}

pub fn parse_csv(text: &str) -> Result<StudyResult> {
    let mut provenance = BTreeMap::new();
    let mut rows = Vec::new();
    let mut header = false;
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(": ")
                .ok_or_else(|| Error::Config(format!("line {}: bad comment", i + 1)))?;
            provenance.insert(k.to_string(), v.to_string());
        } else if !header {
            if line != "eps,metric,value" {
                return Err(Error::Config(format!("line {}: expected header", i + 1)));
            }
            header = true;
        } else {
            let bad = || Error::Config(format!("line {}: malformed row", i + 1));
            let (eps, rest) = line.split_once(',').ok_or_else(bad)?;
            let (metric, value) = rest.rsplit_once(',').ok_or_else(bad)?;
            rows.push(Row {
                eps: eps.parse().map_err(|_| bad())?,
                metric: metric.to_string(),
                value: value.parse().map_err(|_| bad())?,
            });
        }
    }
    if !header {
        return Err(Error::Config("missing header".into()));
    }
    Ok(StudyResult {
        name: provenance.get("study").cloned().unwrap_or_default(),
        provenance,
        rows,
    })
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot over a log-ε axis with one polyline per selected metric. The
/// value axis is logarithmic when every plotted value is positive.
pub fn to_svg(r: &StudyResult, metrics: &[String]) -> String {
    let series: Vec<(String, Vec<(f64, f64)>)> =
        metrics.iter().map(|m| (m.clone(), r.series(m))).collect();
    let pts = series.iter().flat_map(|(_, s)| s.iter().copied());
    let log_y = pts.clone().all(|(_, v)| v > 0.0);
    let fy = |v: f64| if log_y { v.log10() } else { v };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (e, v) in pts {
        x0 = x0.min(e.log10());
        x1 = x1.max(e.log10());
        y0 = y0.min(fy(v));
        y1 = y1.max(fy(v));
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |e: f64| MARGIN + (e.log10() - x0) / (x1 - x0) * (SVG_W - 2.0 * MARGIN);
    let py = |v: f64| SVG_H - MARGIN - (fy(v) - y0) / (y1 - y0) * (SVG_H - 2.0 * MARGIN);

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\">\n"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{b}\" stroke=\"black\"/>",
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">eps (log)</text>",
        SVG_W / 2.0,
        SVG_H - 15.0
    );
    let mut eps_ticks: Vec<f64> = r.rows.iter().map(|r| r.eps).collect();
    eps_ticks.dedup();
    for e in eps_ticks {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{e}</text>",
            px(e),
            SVG_H - MARGIN + 15.0
        );
    }
    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(e, v)| format!("{:.2},{:.2}", px(e), py(v)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{colour}\" points=\"{}\"><title>{name}</title></polyline>",
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{colour}\">{name}</text>",
            MARGIN + 10.0,
            MARGIN + 14.0 * i as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<name>.csv` and/or `<name>.svg` into `dir`. `metrics = None`
/// plots every metric; a selection matching nothing is an error.
pub fn emit(
    r: &StudyResult,
    dir: &Path,
    formats: &[Format],
    metrics: Option<&[String]>,
) -> Result<Vec<PathBuf>> {
    let available = r.metrics();
    let chosen: Vec<String> = match metrics {
        None => available.clone(),
        Some(sel) => available.iter().filter(|m| sel.contains(m)).cloned().collect(),
    };
    if chosen.is_empty() {
        return Err(Error::EmptySelection { available });
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for f in formats {
        let (ext, body) = match f {
            Format::Csv => {
                let mut sub = r.clone();
                sub.rows.retain(|row| chosen.contains(&row.metric));
                ("csv", to_csv(&sub))
            }
            Format::Svg => ("svg", to_svg(r, &chosen)),
        };
        let path = dir.join(format!("{}.{ext}", r.name));
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// One asserted trend of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> TrendCheck {
    TrendCheck {
        name: name.into(),
        pass,
        detail,
    }
}

/// Strictly decreasing as ε decreases (series is ε-descending).
pub fn strictly_decreasing(s: &[(f64, f64)]) -> bool {
    s.windows(2).all(|w| w[1].1 < w[0].1)
}

pub fn strictly_increasing(s: &[(f64, f64)]) -> bool {
    s.windows(2).all(|w| w[1].1 > w[0].1)
}

/// `max / min` of the values.
pub fn spread(s: &[(f64, f64)]) -> f64 {
    let (lo, hi) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, v)| (a.min(v), b.max(v)));
    hi / lo
}

/// Trends each study is expected to show.
pub fn trends(r: &StudyResult) -> Vec<TrendCheck> {
    match r.name.as_str() {
        "convergence" => {
            let err = r.series("l2_error");
            let ratio = r.series("oleinik_ratio");
            vec![
                check("l2_error decreasing", strictly_decreasing(&err), format!("{err:?}")),
                check(
                    "oleinik_ratio spread <= 1.5",
                    spread(&ratio) <= 1.5,
                    format!("spread {}", spread(&ratio)),
                ),
            ]
        }
        "delta_ratio" => {
            let ratio = r.series("oleinik_ratio");
            vec![
                check("oleinik_ratio increasing", strictly_increasing(&ratio), format!("{ratio:?}")),
                check(
                    "oleinik_ratio spread >= 2",
                    spread(&ratio) >= 2.0,
                    format!("spread {}", spread(&ratio)),
                ),
            ]
        }
        "consistency" => {
            let gap = r.series("gap_relative");
            let worst = gap.iter().map(|p| p.1).fold(0.0, f64::max);
            vec![check("mollifier gap <= 10%", worst <= 0.1, format!("worst {worst}"))]
        }
        _ => {
            let res: f64 = r
                .provenance
                .get("fit_residual")
                .and_then(|v| v.parse().ok())
                .unwrap_or(f64::NAN);
            let n: f64 = r
                .provenance
                .get("fit_n")
                .and_then(|v| v.parse().ok())
                .unwrap_or(f64::NAN);
            vec![check(
                "decay fit residual <= 1e-6 with finite N",
                res <= 1e-6 && n.is_finite(),
                format!("N = {n}, residual = {res}"),
            )]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            grid: Grid1D::new(0.0, 2.0, 400).unwrap(),
            eps_list: vec![0.1, 0.05],
            ..Default::default()
        }
    }

    #[test]
    fn validate_rejects_unsorted_eps() {
        let cfg = ExperimentConfig {
            eps_list: vec![0.05, 0.1],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            eps_list: vec![1.5],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_tracks_config() {
        let a = small_cfg();
        let mut b = small_cfg();
        assert_eq!(a.hash(), b.hash());
        b.t1 = 1.9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn exact_solution_self_error_is_quadrature_noise() {
        let d = PeriodicData::standard();
        let g = Grid1D::standard();
        let sol = PiecewiseSolution::new(d);
        let u: Vec<f64> = (0..g.nx).map(|j| eval_exact(&sol, 2.0, g.x(j))).collect();
        let diff: Vec<f64> = (0..g.nx).map(|j| u[j] - sol.eval(2.0, g.x(j))).collect();
        assert!(l2_norm(&diff, g.dx) <= 1e-10);
    }

    #[test]
    fn zero_data_gives_zero_ratios() {
        let r = delta_ratio_study_with(&small_cfg(), &PeriodicData::zero(2.0)).unwrap();
        assert!(r.series("oleinik_ratio").iter().all(|p| p.1 == 0.0));
        assert!(r.series("ratio_l2").iter().all(|p| p.1 == 0.0));
    }

    #[test]
    fn delta_denominator_fixed() {
        let r = delta_ratio_study(&small_cfg()).unwrap();
        let den = r.series("denominator");
        assert_eq!(den[0].1, den[1].1);
        assert!(r.series("oleinik_ratio")[1].1 > r.series("oleinik_ratio")[0].1);
    }

    #[test]
    fn csv_layout() {
        let r = convergence_study(&small_cfg()).unwrap();
        let csv = to_csv(&r);
        assert!(csv.starts_with("# config_sha256: "));
        assert!(csv.contains("\neps,metric,value\n0.1,l2_error,"));
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.rows[0].eps, 0.1);
        assert_eq!(r.metrics(), vec!["l2_error", "oleinik_ratio"]);
    }

    #[test]
    fn parse_rejects_missing_header() {
        assert!(parse_csv("# a: b\n0.1,x,1\n").is_err());
    }

    #[test]
    fn empty_selection_lists_metrics() {
        let mut r = StudyResult::new("t", &small_cfg(), &Mollifier::phi1());
        r.push(0.1, "m1", 1.0);
        let dir = tempfile::tempdir().unwrap();
        match emit(&r, dir.path(), &[Format::Csv], Some(&[])) {
            Err(Error::EmptySelection { available }) => assert_eq!(available, vec!["m1"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spread_and_monotone() {
        let s = [(0.1, 3.0), (0.05, 2.0), (0.025, 1.5)];
        assert!(strictly_decreasing(&s));
        assert!(!strictly_increasing(&s));
        assert_eq!(spread(&s), 2.0);
    }
}
