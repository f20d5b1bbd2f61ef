//! Closed-form oracles: the piecewise solution of the Heaviside model
//! `u_tt = H(t−1) u_xx` and d'Alembert's formula for constant speed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Periodic initial data `(g0, g1)` with derivatives and an analytic
/// antiderivative of `g1`.
#[derive(Clone)]
pub struct PeriodicData {
    pub g0: Func,
    pub g1: Func,
    pub g0_prime: Func,
    pub g1_prime: Func,
    pub g1_antiderivative: Func,
    pub period: f64,
    /// Single Fourier mode `(k, g0 = a sin kx + b cos kx, g1 = c sin kx + d cos kx)`
    /// when known, for mode-wise oracles.
    pub mode: Option<(f64, [f64; 4])>,
}

impl fmt::Debug for PeriodicData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodicData(period = {}, mode = {:?})", self.period, self.mode)
    }
}

impl PeriodicData {
    /// `g0 = α sin kx`, `g1 = β cos kx` with `k = 2π n / period`.
    pub fn sin_cos(period: f64, n: u32, alpha: f64, beta: f64) -> Self {
        let k = 2.0 * PI * n as f64 / period;
        PeriodicData {
            g0: Arc::new(move |x| alpha * (k * x).sin()),
            g1: Arc::new(move |x| beta * (k * x).cos()),
            g0_prime: Arc::new(move |x| alpha * k * (k * x).cos()),
            g1_prime: Arc::new(move |x| -beta * k * (k * x).sin()),
            g1_antiderivative: Arc::new(move |x| beta * (k * x).sin() / k),
            period,
            mode: Some((k, [alpha, 0.0, 0.0, beta])),
        }
    }

    /// `g0 = sin 2πx`, `g1 = cos 2πx` on `[0, 2]`.
    pub fn standard() -> Self {
        Self::sin_cos(2.0, 2, 1.0, 1.0)
    }

    pub fn zero(period: f64) -> Self {
        Self::sin_cos(period, 1, 0.0, 0.0)
    }
}

/// `ū` for `u_tt = H(t − t_jump) u_xx`: `g0 + t g1` before the jump and
/// d'Alembert from `(g0 + t_jump g1, g1)` after it.
#[derive(Clone, Debug)]
pub struct PiecewiseSolution {
    pub data: PeriodicData,
    pub t_jump: f64,
}

impl PiecewiseSolution {
    pub fn new(data: PeriodicData) -> Self {
        PiecewiseSolution { data, t_jump: 1.0 }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let d = &self.data;
        let tj = self.t_jump;
        if t <= tj {
            return (d.g0)(x) + t * (d.g1)(x);
        }
        let s = t - tj;
        let h0 = |y: f64| (d.g0)(y) + tj * (d.g1)(y);
        0.5 * (h0(x + s) + h0(x - s))
            + 0.5 * ((d.g1_antiderivative)(x + s) - (d.g1_antiderivative)(x - s))
    }
}

/// Exact solution at `t ≤ 1`, or for `t > 1` the formula
/// `½[g1(x+s)+g1(x−s)+g0(x+s)+g0(x−s)] + ½∫_{x−s}^{x+s} g1` with `s = t − 1`.
pub fn eval_exact(sol: &PiecewiseSolution, t: f64, x: f64) -> f64 {
    sol.eval(t, x)
}

/// d'Alembert solution of `u_tt = a u_xx` with `u(0) = g0`, `u_t(0) = g1`;
/// `a = 0` gives `g0 + t g1`.
pub fn dalembert_const(a: f64, data: &PeriodicData, t: f64, x: f64) -> f64 {
    if a <= 0.0 {
        return (data.g0)(x) + t * (data.g1)(x);
    }
    let c = a.sqrt();
    let s = c * t;
    0.5 * ((data.g0)(x + s) + (data.g0)(x - s))
        + ((data.g1_antiderivative)(x + s) - (data.g1_antiderivative)(x - s)) / (2.0 * c)
}

/// `(u_t, u_x)` of [`dalembert_const`].
pub fn dalembert_const_gradient(a: f64, data: &PeriodicData, t: f64, x: f64) -> (f64, f64) {
    if a <= 0.0 {
        return ((data.g1)(x), (data.g0_prime)(x) + t * (data.g1_prime)(x));
    }
    let c = a.sqrt();
    let s = c * t;
    let ut = 0.5 * c * ((data.g0_prime)(x + s) - (data.g0_prime)(x - s))
        + 0.5 * ((data.g1)(x + s) + (data.g1)(x - s));
    let ux = 0.5 * ((data.g0_prime)(x + s) + (data.g0_prime)(x - s))
        + ((data.g1)(x + s) - (data.g1)(x - s)) / (2.0 * c);
    (ut, ux)
}

/// Mode-wise reference for `u_tt = a(t) u_xx` with single-mode data: each of
/// the sine and cosine amplitudes solves `y'' = −a(t) k² y`, integrated with
/// classical RK4 on `steps` uniform steps from 0 to `t1`.
/// Returns `(sin amplitude, cos amplitude)` at `t1`.
pub fn mode_reference(
    a: &dyn Fn(f64) -> f64,
    data: &PeriodicData,
    t1: f64,
    steps: usize,
) -> Option<(f64, f64)> {
    let (k, [s0, c0, s1, c1]) = data.mode?;
    let rhs = |t: f64, y: [f64; 4]| {
        let w = -a(t) * k * k;
        [y[1], w * y[0], y[3], w * y[2]]
    };
    let mut y = [s0, s1, c0, c1];
    let h = t1 / steps as f64;
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = rhs(t + h, add(y, k3, h));
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Some((y[0], y[2]))
}

fn add(y: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}
