use super::{bracket, hform, to_complex, EquationSpec, FrequencySystem, Regularisation, I};
use crate::coeffs::DecaySample;
use crate::{Error, Result};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write as _;

/// Sampled solution of the frequency system with its energy diagnostics.
#[derive(Clone, Debug)]
pub struct EnergyTrace {
    pub eps: f64,
    pub delta: f64,
    pub bracket: f64,
    pub times: Vec<f64>,
    pub v: Vec<Vector2<Complex64>>,
    /// `E(t) = (Q_δ V, V)`.
    pub energy: Vec<f64>,
    /// `dE/dt = (∂ₜQ_δ V, V) + 2 Re (Q_δ ∂ₜV, V)` along the sampled trajectory.
    pub energy_rate: Vec<f64>,
    /// `K(t) = |(∂ₜQ_δ V, V)| / E`.
    pub k_rate: Vec<f64>,
    /// `|F̂(t)|`.
    pub forcing_norm: Vec<f64>,
    /// `|(Q F̂, V) − (Q V, F̂)|`.
    pub rhs_form: Vec<f64>,
}

impl EnergyTrace {
    pub fn sup_v(&self) -> f64 {
        self.v.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sup_forcing(&self) -> f64 {
        self.forcing_norm.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoid rule for `∫₀ᵀ K`.
    pub fn k_integral(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.k_rate.windows(2))
            .map(|(t, k)| 0.5 * (t[1] - t[0]) * (k[0] + k[1]))
            .sum()
    }
}

/// Classical RK4 over `[0, T]` with `⌈T/dt⌉` equal steps.
///
/// Coefficients are tabulated once on the half-step grid.
pub fn integrate(sys: &FrequencySystem, dt: f64, delta: f64) -> Result<EnergyTrace> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let limit = sys.stability_limit();
    if dt > limit {
        return Err(Error::Stability { dt, limit });
    }
    let horizon = sys.horizon;
    let n = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = horizon / n as f64;
    let br = sys.bracket;

    let half: Vec<f64> = (0..=2 * n).map(|k| 0.5 * h * k as f64).collect();
    let gen: Vec<Matrix2<Complex64>> = half
        .iter()
        .map(|&t| (to_complex(&sys.a1(t)) + sys.b(t)) * I)
        .collect();
    let force: Vec<Vector2<Complex64>> = half.iter().map(|&t| sys.forcing(t) * I).collect();

    let mut v = sys.v0;
    let mut trace = EnergyTrace {
        eps: sys.eps,
        delta,
        bracket: br,
        times: Vec::with_capacity(n + 1),
        v: Vec::with_capacity(n + 1),
        energy: Vec::with_capacity(n + 1),
        energy_rate: Vec::with_capacity(n + 1),
        k_rate: Vec::with_capacity(n + 1),
        forcing_norm: Vec::with_capacity(n + 1),
        rhs_form: Vec::with_capacity(n + 1),
    };
    for step in 0..=n {
        let t = h * step as f64;
        record(sys, &mut trace, t, &v, delta);
        if step == n {
            break;
        }
        let (k0, k1, k2) = (2 * step, 2 * step + 1, 2 * step + 2);
        let f = |k: usize, w: &Vector2<Complex64>| gen[k] * w + force[k];
        let s1 = f(k0, &v);
        let (hh, hc) = (Complex64::new(0.5 * h, 0.0), Complex64::new(h, 0.0));
        let s2 = f(k1, &(v + s1 * hh));
        let s3 = f(k1, &(v + s2 * hh));
        let s4 = f(k2, &(v + s3 * hc));
        v += (s1 + (s2 + s3) * Complex64::new(2.0, 0.0) + s4) * Complex64::new(h / 6.0, 0.0);
    }
    Ok(trace)
}

fn record(sys: &FrequencySystem, tr: &mut EnergyTrace, t: f64, v: &Vector2<Complex64>, delta: f64) {
    let q = to_complex(&sys.q(t, delta));
    let e = hform(&q, v).re;
    let dq11 = 2.0 * sys.principal_rate(t) / (tr.bracket * tr.bracket);
    let dq = dq11 * v[0].norm_sqr();
    let k = dq.abs() / e;
    let vdot = sys.rhs(t, v);
    tr.energy_rate.push(dq + 2.0 * v.dotc(&(q * vdot)).re);
    let f = sys.forcing(t);
    // (X, Y) = Σ Xᵢ conj(Yᵢ)
    let rhs = (v.dotc(&(q * f)) - f.dotc(&(q * v))).norm();
    tr.times.push(t);
    tr.v.push(*v);
    tr.energy.push(e);
    tr.k_rate.push(k);
    tr.forcing_norm.push(f.norm());
    tr.rhs_form.push(rhs);
}

/// Outcome of the Gronwall verification on a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallReport {
    /// Largest relative excess of `dE/dt` over the differential bound;
    /// `≤ 0` means satisfied.
    pub pointwise_excess: f64,
    /// Largest relative excess of `E(t)` over the integrated bound.
    pub integrated_excess: f64,
    /// Largest excess of `|(QF,V) − (QV,F)|` over `2|F̂|² + E`, relative.
    pub rhs_excess: f64,
    /// Trapezoid value of `∫ K`.
    pub k_integral: f64,
    pub keps_int: f64,
    pub pass: bool,
}

/// Relative tolerance of the Gronwall checks.
pub const GRONWALL_TOL: f64 = 1e-6;

/// Checks `E' ≤ (K + c2 δ⟨ξ⟩ + C_ε + 1) E + 2|F̂|²` and
/// `E(t) ≤ (E(0) + 2t sup|F̂|²) exp(K_ε + (c2 δ⟨ξ⟩ + C_ε + 1) t)`,
/// together with `∫K ≤ K_ε`.
pub fn gronwall_verify(trace: &EnergyTrace, keps_int: f64, c2: f64, ceps: f64) -> GronwallReport {
    let rate = c2 * trace.delta * trace.bracket + ceps + 1.0;
    let e = &trace.energy;
    let t = &trace.times;
    let rel = |lhs: f64, rhs: f64| (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE);

    let mut pointwise = f64::NEG_INFINITY;
    for k in 0..e.len() {
        let de = trace.energy_rate[k];
        let bound = (trace.k_rate[k] + rate) * e[k] + 2.0 * trace.forcing_norm[k].powi(2);
        pointwise = pointwise.max(rel(de, bound));
    }
    let sup_f2 = trace.sup_forcing().powi(2);
    let mut integrated = f64::NEG_INFINITY;
    let mut rhs_excess = f64::NEG_INFINITY;
    for k in 0..e.len() {
        let bound = (e[0] + 2.0 * t[k] * sup_f2) * (keps_int + rate * t[k]).exp();
        integrated = integrated.max(rel(e[k], bound));
        rhs_excess = rhs_excess.max(rel(
            trace.rhs_form[k],
            2.0 * trace.forcing_norm[k].powi(2) + e[k],
        ));
    }
    let k_integral = trace.k_integral();
    let pass = pointwise <= GRONWALL_TOL
        && integrated <= GRONWALL_TOL
        && rhs_excess <= GRONWALL_TOL
        && k_integral <= keps_int + GRONWALL_TOL * keps_int.max(1.0);
    GronwallReport {
        pointwise_excess: pointwise,
        integrated_excess: integrated,
        rhs_excess,
        k_integral,
        keps_int,
        pass,
    }
}

/// Total variation of `ln q₁₁(t)` over `n` uniform steps of `[0, T]`;
/// bounds `∫ |(∂ₜQ V, V)| / E` since `q₁₁` is the only varying entry.
pub fn log_variation_bound(sys: &FrequencySystem, delta: f64, n: usize) -> f64 {
    let n = n.max(1);
    let lq = |t: f64| sys.q(t, delta)[(0, 0)].ln();
    let mut prev = lq(0.0);
    let mut tv = 0.0;
    for i in 1..=n {
        let cur = lq(sys.horizon * i as f64 / n as f64);
        tv += (cur - prev).abs();
        prev = cur;
    }
    tv
}

/// One `(ε, ξ)` run of the moderateness sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub xi: Vec<f64>,
    pub delta: f64,
    pub sup_v: f64,
    pub e0: f64,
    pub et: f64,
}

/// Integrates every `(ε, ξ)` pair with `δ = ⟨ξ⟩^{-k/(k+2)}`, in parallel.
///
/// Rows come back ordered by ε then ξ as given.
pub fn moderateness_sweep(
    spec: &EquationSpec,
    reg: &Regularisation,
    eps_list: &[f64],
    xi_list: &[Vec<f64>],
    k: f64,
) -> Result<Vec<SweepRow>> {
    if eps_list.is_empty() || xi_list.is_empty() {
        return Err(Error::Domain("sweep needs at least one eps and one xi".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("balance exponent must be positive, got {k}")));
    }
    let jobs: Vec<(f64, &Vec<f64>)> = eps_list
        .iter()
        .flat_map(|&e| xi_list.iter().map(move |x| (e, x)))
        .collect();
    jobs.into_par_iter()
        .map(|(eps, xi)| {
            let sys = super::assemble(spec, eps, reg, xi)?;
            let delta = bracket(xi).powf(-k / (k + 2.0));
            let tr = integrate(&sys, sys.resolved_dt(), delta)?;
            Ok(SweepRow {
                eps,
                xi: xi.clone(),
                delta,
                sup_v: tr.sup_v(),
                e0: tr.energy[0],
                et: *tr.energy.last().expect("nonempty trace"),
            })
        })
        .collect()
}

/// `(ε, |ξ|, sup|V|)` triples for the decay fit.
pub fn sweep_samples(rows: &[SweepRow]) -> Vec<DecaySample> {
    rows.iter()
        .map(|r| DecaySample {
            eps: r.eps,
            xi: r.xi.iter().map(|x| x * x).sum::<f64>().sqrt(),
            magnitude: r.sup_v,
        })
        .collect()
}

/// CSV with columns `eps, xi_1.., delta, sup_V, E0, ET`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let n = rows.first().map_or(1, |r| r.xi.len());
    let mut out = String::from("eps");
    for i in 1..=n {
        let _ = write!(out, ",xi_{i}");
    }
    out.push_str(",delta,sup_V,E0,ET\n");
    for r in rows {
        let _ = write!(out, "{}", r.eps);
        for x in &r.xi {
            let _ = write!(out, ",{x}");
        }
        let _ = writeln!(out, ",{},{},{},{}", r.delta, r.sup_v, r.e0, r.et);
    }
    out
}
