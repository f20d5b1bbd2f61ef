//! Lax–Friedrichs solver for `u_tt = a_ε(t) u_xx` on a periodic interval,
//! written as the system `v_t = a w_x`, `w_t = v_x` with `v = u_t`, `w = u_x`.

use crate::coeffs::{regularise, Mollifier, RegularisedCoefficient, ScaleNet, TimeDistribution};
use crate::exact::PeriodicData;
use crate::{Error, Result};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Default number of cells on `[0, 2]`, giving `dx ≈ 0.0007`.
pub const DEFAULT_NX: usize = 2858;
/// Coefficient values below this count as zero when choosing the step.
pub const ZERO_COEFF: f64 = 1e-14;
/// Allowed overshoot of the Courant number.
pub const CFL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
    pub dx: f64,
    pub periodic: bool,
}

impl Grid1D {
    pub fn new(x_lo: f64, x_hi: f64, nx: usize) -> Result<Self> {
        if nx < 8 {
            return Err(Error::Domain(format!("nx must be at least 8, got {nx}")));
        }
        let dx = (x_hi - x_lo) / nx as f64;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Domain(format!("empty interval [{x_lo}, {x_hi}]")));
        }
        Ok(Grid1D { x_lo, x_hi, nx, dx, periodic: true })
    }

    /// `[0, 2]` with [`DEFAULT_NX`] cells.
    pub fn standard() -> Self {
        Self::new(0.0, 2.0, DEFAULT_NX).expect("valid default grid")
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_lo + self.dx * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x(j)).collect()
    }
}

/// State `(u, v = u_t, w = u_x)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionField {
    pub grid: Grid1D,
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl SolutionField {
    /// `u = g0`, `v = g1`, `w = g0'` at `t = 0`; `w` is the centred difference
    /// of `u` when no derivative is supplied.
    pub fn init(
        grid: Grid1D,
        g0: impl Fn(f64) -> f64,
        g1: impl Fn(f64) -> f64,
        g0_prime: Option<&dyn Fn(f64) -> f64>,
    ) -> Self {
        let xs = grid.points();
        let u: Vec<f64> = xs.iter().map(|&x| g0(x)).collect();
        let v = xs.iter().map(|&x| g1(x)).collect();
        let w = match g0_prime {
            Some(d) => xs.iter().map(|&x| d(x)).collect(),
            None => {
                let n = grid.nx;
                (0..n)
                    .map(|j| (u[(j + 1) % n] - u[(j + n - 1) % n]) / (2.0 * grid.dx))
                    .collect()
            }
        };
        SolutionField { grid, t: 0.0, u, v, w }
    }

    /// State at `t0` for a coefficient vanishing on `[0, t0]`, where
    /// `u = g0 + t g1` exactly.
    pub fn flat_start(grid: Grid1D, data: &PeriodicData, t0: f64) -> Self {
        let xs = grid.points();
        SolutionField {
            grid,
            t: t0,
            u: xs.iter().map(|&x| (data.g0)(x) + t0 * (data.g1)(x)).collect(),
            v: xs.iter().map(|&x| (data.g1)(x)).collect(),
            w: xs
                .iter()
                .map(|&x| (data.g0_prime)(x) + t0 * (data.g1_prime)(x))
                .collect(),
        }
    }
}

/// Courant number `dt √a / dx`.
pub fn courant(a_val: f64, dt: f64, dx: f64) -> f64 {
    dt * a_val.max(0.0).sqrt() / dx
}

/// One Lax–Friedrichs step of `(v, w)` with frozen coefficient `a_val`;
/// `u` advances by the trapezoid rule in time.
pub fn lf_step(state: &SolutionField, a_val: f64, dt: f64) -> Result<SolutionField> {
    let dx = state.grid.dx;
    let c = courant(a_val, dt, dx);
    if c > 1.0 + CFL_SLACK || !(dt > 0.0) {
        return Err(Error::Cfl { courant: c, dt, dx });
    }
    let n = state.grid.nx;
    let r = dt / (2.0 * dx);
    let (v, w) = (&state.v, &state.w);
    let mut nv = vec![0.0; n];
    let mut nw = vec![0.0; n];
    for j in 0..n {
        let (p, m) = ((j + 1) % n, (j + n - 1) % n);
        nv[j] = 0.5 * (v[p] + v[m]) + r * a_val * (w[p] - w[m]);
        nw[j] = 0.5 * (w[p] + w[m]) + r * (v[p] - v[m]);
    }
    let nu = state
        .u
        .iter()
        .zip(v.iter().zip(&nv))
        .map(|(u, (a, b))| u + 0.5 * dt * (a + b))
        .collect();
    Ok(SolutionField {
        grid: state.grid,
        t: state.t + dt,
        u: nu,
        v: nv,
        w: nw,
    })
}

/// Coefficient of the toy problem.
#[derive(Clone, Debug)]
pub enum ToyModel {
    /// `a = H(t − 1)`.
    Heaviside,
    /// `a = δ(t − 1)`.
    Delta,
    /// Any nonnegative coefficient.
    Coefficient(TimeDistribution),
}

impl ToyModel {
    pub fn distribution(&self, horizon: f64) -> Result<TimeDistribution> {
        match self {
            ToyModel::Heaviside => TimeDistribution::heaviside(horizon, 1.0),
            ToyModel::Delta => TimeDistribution::dirac(horizon, 1.0),
            ToyModel::Coefficient(d) => Ok(d.clone()),
        }
    }
}

/// Step taken by [`solve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub a_val: f64,
    pub courant: f64,
    /// The Courant-one rule was binding (`dx/√a < ε/10`).
    pub active: bool,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub field: SolutionField,
    pub steps: Vec<StepRecord>,
    pub snapshots: Vec<SolutionField>,
}

/// Integrates from `t0` to `t1` with `a_ε = a ∗ φ_ε`, `φ_ε = ε⁻¹φ(·/ε)`.
///
/// Steps are `dt = min(ε/10, dx/√a_ε(tₙ), t1 − tₙ)` with `a_ε` frozen at `tₙ`;
/// values below [`ZERO_COEFF`] count as zero. The state at `t0` is the flat
/// solution `g0 + t g1`, so `a_ε` must vanish on `[0, t0]`.
/// `snapshot_times` inside `(t0, t1)` are hit exactly.
pub fn solve(
    grid: Grid1D,
    model: &ToyModel,
    moll: &Mollifier,
    eps: f64,
    data: &PeriodicData,
    t0: f64,
    t1: f64,
    snapshot_times: &[f64],
) -> Result<SolveOutcome> {
    if !(t0 >= 0.0 && t1 > t0) {
        return Err(Error::Domain(format!("need 0 ≤ t0 < t1, got [{t0}, {t1}]")));
    }
    let coeff = regularise(&model.distribution(t1.max(2.0))?, moll, eps, ScaleNet::Identity)?;
    if t0 > 0.0 {
        check_flat(&coeff, t0)?;
    }
    let mut stops: Vec<f64> = snapshot_times
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t1)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.push(t1);

    let mut field = SolutionField::flat_start(grid, data, t0);
    let mut steps = Vec::new();
    let mut snapshots = Vec::new();
    let flat_dt = eps / 10.0;
    for &stop in &stops {
        while field.t < stop {
            let t = field.t;
            let mut a_val = coeff.eval(t);
            if a_val.abs() < ZERO_COEFF {
                a_val = 0.0;
            }
            if a_val < 0.0 {
                return Err(Error::Precondition(format!(
                    "regularised coefficient negative ({a_val:e}) at t = {t}"
                )));
            }
            let cfl_dt = if a_val > 0.0 { grid.dx / a_val.sqrt() } else { f64::INFINITY };
            let active = cfl_dt < flat_dt;
            let mut dt = flat_dt.min(cfl_dt);
            if stop - t <= dt * (1.0 + 1e-12) {
                dt = stop - t;
            }
            field = lf_step(&field, a_val, dt)?;
            if dt == stop - t {
                field.t = stop;
            }
            steps.push(StepRecord {
                t,
                dt,
                a_val,
                courant: courant(a_val, dt, grid.dx),
                active,
            });
        }
        if stop < t1 {
            snapshots.push(field.clone());
        }
    }
    Ok(SolveOutcome { field, steps, snapshots })
}

fn check_flat(coeff: &RegularisedCoefficient, t0: f64) -> Result<()> {
    let n = 2000;
    for i in 0..=n {
        let t = t0 * i as f64 / n as f64;
        let a = coeff.eval(t);
        if a.abs() >= ZERO_COEFF {
            return Err(Error::Precondition(format!(
                "coefficient {a:e} is nonzero at t = {t} before the start time {t0}"
            )));
        }
    }
    Ok(())
}

/// Rectangle-rule `L²` norm of periodic samples.
pub fn l2_norm(samples: &[f64], dx: f64) -> f64 {
    (samples.iter().map(|x| x * x).sum::<f64>() * dx).sqrt()
}

/// Spectral `H^s` norm of periodic samples on an interval of length `length`:
/// `‖u‖² = L Σ |c_k|² (1 + ξ_k²)^s` with `ξ_k = 2πk/L`.
pub fn sobolev_norm(samples: &[f64], length: f64, s: u32) -> Result<f64> {
    if s > 5 {
        return Err(Error::Domain(format!("Sobolev order {s} outside 0..=5")));
    }
    let n = samples.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut acc = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let xi = 2.0 * PI * signed / length;
        acc += (c.norm_sqr() / (n * n) as f64) * (1.0 + xi * xi).powi(s as i32);
    }
    Ok((length * acc).sqrt())
}

/// `‖u‖²_{H²} / (‖g0‖²_{H⁵} + ‖g1‖²_{H⁴})` with `g0, g1` sampled on the grid.
pub fn oleinik_ratio(field: &SolutionField, data: &PeriodicData) -> Result<f64> {
    let (num, den) = oleinik_parts(field, data, 2)?;
    Ok(num / den)
}

/// Numerator `‖u‖²_{H^s}` and denominator `‖g0‖²_{H⁵} + ‖g1‖²_{H⁴}`.
pub fn oleinik_parts(field: &SolutionField, data: &PeriodicData, s: u32) -> Result<(f64, f64)> {
    let g = field.grid;
    let xs = g.points();
    let g0: Vec<f64> = xs.iter().map(|&x| (data.g0)(x)).collect();
    let g1: Vec<f64> = xs.iter().map(|&x| (data.g1)(x)).collect();
    let den = sobolev_norm(&g0, g.length(), 5)?.powi(2) + sobolev_norm(&g1, g.length(), 4)?.powi(2);
    let num = sobolev_norm(&field.u, g.length(), s)?.powi(2);
    Ok((num, den))
}

/// CSV with columns `x,u,v,w`.
pub fn field_csv(field: &SolutionField) -> String {
    let mut out = String::from("x,u,v,w\n");
    for j in 0..field.grid.nx {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            field.grid.x(j),
            field.u[j],
            field.v[j],
            field.w[j]
        );
    }
    out
}
