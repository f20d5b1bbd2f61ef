//! Quasi-symmetrisers of Sylvester matrices with real eigenvalues.
//!
//! For `λ ∈ ℝ^m` the Sylvester (companion) matrix `A(λ)` has characteristic
//! polynomial `Π(x − λᵢ)`. The quasi-symmetriser is
//! `Q_δ(λ) = Σ_ρ P_δ(λ_ρ)ᵀ P_δ(λ_ρ)` over all permutations `ρ`, with
//! `P_δ = H_δ P` and `H_δ = diag(δ^{m−1}, …, δ, 1)`.

mod lemma;
mod suite;

pub use lemma::{
    ck_norm, determinant_ratio_constant, lemma_integral_check, near_diagonal_constant_of,
    nearly_diagonal_constant, sm_violation, LemmaSample,
};
pub use suite::{run_suite, SuiteOptions, SuiteReport, SuiteRow};

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::ops::{Add, Mul, Neg, Sub};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Largest size for which the permutation sum is evaluated.
pub const MAX_M: usize = 8;

/// Ring operations shared by `f64` and exact integers.
trait Scalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}
impl<T> Scalar for T where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// Eigenvalue tuple `λ = (λ₁, …, λ_m)`, finite entries, no ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTuple(Vec<f64>);

impl EigenTuple {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Domain("eigen tuple must have m >= 1".into()));
        }
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("eigen tuple entries must be finite".into()));
        }
        Ok(EigenTuple(lambda))
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `π_i λ`: the tuple with entry `i` removed.
    pub fn without(&self, i: usize) -> EigenTuple {
        let mut v = self.0.clone();
        v.remove(i);
        EigenTuple(v)
    }
}

/// Coefficients of `Π(x − λᵢ)`: `c[h]` multiplies `x^{m−h}` and equals `σ_h`.
fn char_poly<S: Scalar>(lam: &[S]) -> Vec<S> {
    let mut c: Vec<S> = vec![S::one()];
    for l in lam {
        let mut next = vec![S::zero(); c.len() + 1];
        for (h, ch) in c.iter().enumerate() {
            next[h] = next[h].clone() + ch.clone();
            next[h + 1] = next[h + 1].clone() - ch.clone() * l.clone();
        }
        c = next;
    }
    c
}

/// Signed elementary symmetric polynomial `σ_h(λ) = (−1)^h e_h(λ)`.
pub fn elementary_symmetric(h: usize, lam: &EigenTuple) -> Result<f64> {
    if h < 1 || h > lam.m() {
        return Err(Error::Domain(format!(
            "h = {h} outside 1..={}",
            lam.m()
        )));
    }
    Ok(char_poly::<f64>(lam.values())[h])
}

/// Companion matrix with shift rows and last row `(−σ_m, …, −σ_1)`.
pub fn sylvester(lam: &EigenTuple) -> DMatrix<f64> {
    let m = lam.m();
    let c = char_poly::<f64>(lam.values());
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..m {
        a[(m - 1, j)] = -c[m - j];
    }
    a
}

/// Row-major `P^{(m)}(λ)`; only `λ₁..λ_{m−1}` are read.
fn p_rows<S: Scalar>(lam: &[S]) -> Vec<Vec<S>> {
    let m = lam.len();
    let mut p = vec![vec![S::zero(); m]; m];
    p[0][0] = S::one();
    for k in 2..=m {
        let c = char_poly::<S>(&lam[..k - 1]);
        for j in 0..k - 1 {
            p[k - 1][j] = c[k - 1 - j].clone();
        }
        p[k - 1][k - 1] = S::one();
    }
    p
}

/// The lower-triangular factor `P^{(m)}(λ)`.
pub fn build_p(lam: &EigenTuple) -> DMatrix<f64> {
    let m = lam.m();
    let rows = p_rows::<f64>(lam.values());
    DMatrix::from_fn(m, m, |i, j| rows[i][j])
}

/// Row vectors `W_i = (σ_{m−1}(π_iλ), …, σ_1(π_iλ), 1)`.
pub fn build_w(lam: &EigenTuple) -> DMatrix<f64> {
    let m = lam.m();
    let mut w = DMatrix::zeros(m, m);
    for i in 0..m {
        let c = char_poly::<f64>(lam.without(i).values());
        for j in 0..m {
            w[(i, j)] = c[m - 1 - j];
        }
    }
    w
}

/// All permutations of `0..m` (Heap's algorithm).
pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..m).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Layers `L_j = Σ_ρ p_{m−1−j}(λ_ρ)ᵀ p_{m−1−j}(λ_ρ)` with `p_r` row `r` of `P`,
/// so that `Q_δ = Σ_j δ^{2j} L_j`.
fn permutation_layers<S: Scalar>(lam: &[S]) -> Vec<Vec<Vec<S>>> {
    let m = lam.len();
    let mut layers = vec![vec![vec![S::zero(); m]; m]; m];
    for perm in permutations(m) {
        let permuted: Vec<S> = perm.iter().map(|&i| lam[i].clone()).collect();
        let p = p_rows::<S>(&permuted);
        for (j, layer) in layers.iter_mut().enumerate() {
            let row = &p[m - 1 - j];
            for a in 0..m {
                for b in 0..m {
                    layer[a][b] = layer[a][b].clone() + row[a].clone() * row[b].clone();
                }
            }
        }
    }
    layers
}

fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let m = rows.len();
    DMatrix::from_fn(m, m, |i, j| rows[i][j])
}

#[derive(Clone, Debug)]
pub struct QuasiSymmetriser {
    pub m: usize,
    pub delta: f64,
    /// `Q_δ` from the permutation sum.
    pub q: DMatrix<f64>,
    /// `Q_0, Q_1, …, Q_{m−1}` with `Q_δ = Σ δ^{2j} Q_j`.
    pub layers: Vec<DMatrix<f64>>,
    pub w: DMatrix<f64>,
}

/// Builds `Q_δ(λ)` for `δ ∈ [0, 1]` (δ = 0 gives `Q_0`).
pub fn build_q(delta: f64, lam: &EigenTuple) -> Result<QuasiSymmetriser> {
    let m = lam.m();
    if m > MAX_M {
        return Err(Error::Size { m, limit: MAX_M });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [0,1], got {delta}")));
    }
    let hd = permutation_layers::<f64>(lam.values());
    let mut q = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            // sum over rows of P weighted by H_δ² = diag(δ^{2(m−1)}, …, 1)
            let mut s = 0.0;
            for (j, layer) in hd.iter().enumerate() {
                s += delta.powi(2 * j as i32) * layer[a][b];
            }
            q[(a, b)] = s;
        }
    }
    Ok(QuasiSymmetriser {
        m,
        delta,
        q,
        layers: hd.iter().map(|l| to_dmatrix(l)).collect(),
        w: build_w(lam),
    })
}

/// `Q_δ` assembled directly as `Σ_ρ (H_δ P(λ_ρ))ᵀ (H_δ P(λ_ρ))` with matrix products.
pub fn build_q_direct(delta: f64, lam: &EigenTuple) -> Result<DMatrix<f64>> {
    let m = lam.m();
    if m > MAX_M {
        return Err(Error::Size { m, limit: MAX_M });
    }
    let h = DMatrix::from_diagonal(&DVector::from_fn(m, |i, _| delta.powi((m - 1 - i) as i32)));
    let mut q = DMatrix::zeros(m, m);
    for perm in permutations(m) {
        let permuted = EigenTuple(perm.iter().map(|&i| lam.values()[i]).collect());
        let pd = &h * build_p(&permuted);
        q += pd.transpose() * pd;
    }
    Ok(q)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn embed(small: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let mut big = DMatrix::zeros(m, m);
    let k = small.nrows();
    big.view_mut((0, 0), (k, k)).copy_from(small);
    big
}

/// Layers from the recursion
/// `Q_δ^{(m)}(λ) = (m−1)! WᵀW + δ² Σ_i Q_δ^{(m−1)}(π_iλ)^♯`,
/// where `♯` pads with a zero last row and column.
pub fn recursive_layers(lam: &EigenTuple) -> Vec<DMatrix<f64>> {
    let m = lam.m();
    if m == 1 {
        return vec![DMatrix::from_element(1, 1, 1.0)];
    }
    let w = build_w(lam);
    let mut layers = vec![factorial(m - 1) * w.transpose() * &w];
    let mut deeper = vec![DMatrix::zeros(m, m); m - 1];
    for i in 0..m {
        for (j, l) in recursive_layers(&lam.without(i)).iter().enumerate() {
            deeper[j] += embed(l, m);
        }
    }
    layers.extend(deeper);
    layers
}

/// `Σ_j δ^{2j} L_j`.
pub fn sum_layers(layers: &[DMatrix<f64>], delta: f64) -> DMatrix<f64> {
    let m = layers[0].nrows();
    layers
        .iter()
        .enumerate()
        .fold(DMatrix::zeros(m, m), |acc, (j, l)| acc + delta.powi(2 * j as i32) * l)
}

/// Sign of a permutation from its inversion count.
fn parity(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(mantissa, exponent)` with `x = mantissa · 2^exponent` exactly.
fn decode(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1 << 52)), exp - 1075)
    }
}

/// `x · 2^k` without intermediate overflow.
fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    x * 2f64.powi(k as i32)
}

/// `det Q_0(λ)` computed exactly: the `λᵢ` are scaled by a common power of
/// two to integers, `Q_0` is built from the permutation sum and expanded by
/// Leibniz in big-integer arithmetic. `Q_0` is homogeneous, so the scaled
/// determinant carries the factor `2^{K m(m−1)}`. Only the final conversion
/// to `f64` rounds.
pub fn q0_determinant(lam: &EigenTuple) -> Result<f64> {
    let m = lam.m();
    if m > MAX_M {
        return Err(Error::Size { m, limit: MAX_M });
    }
    let decoded: Vec<(i64, i64)> = lam.values().iter().map(|&x| decode(x)).collect();
    let k = decoded
        .iter()
        .filter(|(mant, _)| *mant != 0)
        .map(|(_, e)| -e)
        .max()
        .unwrap_or(0)
        .max(0);
    let ints: Vec<BigInt> = decoded
        .iter()
        .map(|&(mant, e)| BigInt::from(mant) << ((e + k) as usize))
        .collect();
    let a = permutation_layers::<BigInt>(&ints).swap_remove(0);
    let mut det = BigInt::zero();
    for perm in permutations(m) {
        let mut term = BigInt::one();
        for (i, &j) in perm.iter().enumerate() {
            term *= &a[i][j];
        }
        if parity(&perm) < 0.0 {
            det -= term;
        } else {
            det += term;
        }
    }
    if det.is_zero() {
        return Ok(0.0);
    }
    let shift = det.bits().saturating_sub(64);
    let top = (&det >> shift).to_f64().expect("64-bit head fits in f64");
    Ok(ldexp(top, shift as i64 - k * (m * (m - 1)) as i64))
}

/// Constant in front of `Π_{i<j}(λᵢ−λⱼ)²` in the determinant identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DetConstant {
    /// `(m−1)!`.
    SingleFactorial,
    /// `((m−1)!)^m`, the value implied by `Q_0 = (m−1)! WᵀW` and `det W = ±Π(λᵢ−λⱼ)`.
    FactorialPower,
}

/// Right-hand side of the determinant identity.
pub fn determinant_formula(lam: &EigenTuple, constant: DetConstant) -> f64 {
    let m = lam.m();
    let v = lam.values();
    let mut prod = 1.0;
    for i in 0..m {
        for j in i + 1..m {
            prod *= (v[i] - v[j]) * (v[i] - v[j]);
        }
    }
    let f = factorial(m - 1);
    match constant {
        DetConstant::SingleFactorial => f * prod,
        DetConstant::FactorialPower => f.powi(m as i32) * prod,
    }
}

/// Hermitian form `(M V, V)` for a real matrix and complex vector.
pub(crate) fn form(m: &DMatrix<f64>, v: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * v[j];
        }
        s += row * v[i].conj();
    }
    s
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `max |((QA − AᵀQ)V, V)| / (δ (QV, V))` over random complex unit vectors.
///
/// `QA − AᵀQ` is real antisymmetric, so the form vanishes on real vectors.
pub fn commutator_ratio<R: Rng>(
    delta: f64,
    lam: &EigenTuple,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0,1], got {delta}")));
    }
    let q = build_q(delta, lam)?.q;
    let a = sylvester(lam);
    let c = &q * &a - a.transpose() * &q;
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let v = random_unit(rng, lam.m());
        let num = form(&c, &v).norm();
        let den = delta * form(&q, &v).re;
        best = best.max(num / den);
    }
    Ok(best)
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eig_range(q: &DMatrix<f64>) -> (f64, f64) {
    let ev = q.clone().symmetric_eigenvalues();
    (ev.min(), ev.max())
}
