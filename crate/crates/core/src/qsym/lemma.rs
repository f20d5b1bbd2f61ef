//! Nearly diagonal families and the integral lemma for time-dependent symmetrisers.

use super::{eig_range, EigenTuple};
use crate::quad::simpson;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// First pair violating `λᵢ² + λⱼ² ≤ M (λᵢ − λⱼ)²`, if any.
pub fn sm_violation(lam: &EigenTuple, m_bound: f64) -> Option<(usize, usize)> {
    let v = lam.values();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let lhs = v[i] * v[i] + v[j] * v[j];
            let rhs = m_bound * (v[i] - v[j]) * (v[i] - v[j]);
            if lhs > rhs * (1.0 + 1e-12) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Largest `c₀` with `Q ≥ c₀ diag(Q)` for every matrix in the family.
///
/// Uses the smallest eigenvalue of `D^{-1/2} Q D^{-1/2}` restricted to the
/// indices where the diagonal is positive.
pub fn near_diagonal_constant_of(family: &[DMatrix<f64>]) -> f64 {
    let mut c0 = f64::INFINITY;
    for q in family {
        let idx: Vec<usize> = (0..q.nrows()).filter(|&i| q[(i, i)] > 0.0).collect();
        if idx.is_empty() {
            continue;
        }
        let k = idx.len();
        let s = DMatrix::from_fn(k, k, |a, b| {
            let (i, j) = (idx[a], idx[b]);
            q[(i, j)] / (q[(i, i)] * q[(j, j)]).sqrt()
        });
        c0 = c0.min(eig_range(&s).0);
    }
    c0
}

/// Near-diagonal constant of `{Q_δ(λ)}` over the given tuples and δ values,
/// after checking every tuple lies in `S_M`.
pub fn nearly_diagonal_constant(
    lams: &[EigenTuple],
    deltas: &[f64],
    m_bound: f64,
) -> Result<f64> {
    let mut family = Vec::with_capacity(lams.len() * deltas.len());
    for lam in lams {
        if let Some((i, j)) = sm_violation(lam, m_bound) {
            let v = lam.values();
            return Err(Error::Precondition(format!(
                "λ{} = {}, λ{} = {} violate the S_M condition with M = {m_bound}",
                i + 1,
                v[i],
                j + 1,
                v[j]
            )));
        }
        for &d in deltas {
            family.push(super::build_q(d, lam)?.q);
        }
    }
    Ok(near_diagonal_constant_of(&family))
}

/// `min det Q / Π q_ii` over the family.
pub fn determinant_ratio_constant(family: &[DMatrix<f64>]) -> f64 {
    family
        .iter()
        .map(|q| q.determinant() / q.diagonal().iter().product::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Result of one integral-lemma evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaSample {
    /// `∫₀ᵀ |(∂ₜQ V, V)| / ((QV,V)^{1−1/k} |V|^{2/k}) dt`.
    pub integral: f64,
    /// `‖Q‖_{C^k([0,T])}`.
    pub ck_norm: f64,
    /// `integral / ‖Q‖_{C^k}^{1/k}`.
    pub ratio: f64,
}

fn fd_step(t_final: f64) -> f64 {
    1e-4 * t_final.max(1.0)
}

fn derivative(q: &dyn Fn(f64) -> DMatrix<f64>, t: f64, order: usize, h: f64) -> DMatrix<f64> {
    match order {
        0 => q(t),
        1 => (q(t + h) - q(t - h)) / (2.0 * h),
        _ => {
            let lower = |s: f64| derivative(q, s, order - 2, h);
            (lower(t + h) - 2.0 * lower(t) + lower(t - h)) / (h * h)
        }
    }
}

/// `Σ_{j≤k} sup_t ‖∂ₜ^j Q(t)‖₂` sampled on 2001 points, by central differences.
pub fn ck_norm(q: &dyn Fn(f64) -> DMatrix<f64>, k: usize, t_final: f64) -> f64 {
    let h = fd_step(t_final);
    (0..=k)
        .map(|j| {
            (0..=2000)
                .map(|i| {
                    let t = t_final * i as f64 / 2000.0;
                    derivative(q, t, j, h).norm()
                })
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Quadrature (Simpson, `nodes` intervals) of the integral-lemma integrand.
pub fn lemma_integral_check(
    q: &dyn Fn(f64) -> DMatrix<f64>,
    v: &dyn Fn(f64) -> DVector<f64>,
    k: usize,
    t_final: f64,
    nodes: usize,
) -> Result<LemmaSample> {
    if k < 1 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    let h = fd_step(t_final);
    let kf = k as f64;
    let integrand = |t: f64| {
        let vv = v(t);
        let dq = derivative(q, t, 1, h);
        let num = (vv.transpose() * dq * &vv)[(0, 0)].abs();
        let e = (vv.transpose() * q(t) * &vv)[(0, 0)];
        if num == 0.0 {
            return 0.0;
        }
        num / (e.powf(1.0 - 1.0 / kf) * vv.norm_squared().powf(1.0 / kf))
    };
    let integral = simpson(integrand, 0.0, t_final, nodes);
    let norm = ck_norm(q, k, t_final);
    Ok(LemmaSample {
        integral,
        ck_norm: norm,
        ratio: integral / norm.powf(1.0 / kf),
    })
}
