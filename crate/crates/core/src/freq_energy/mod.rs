//! Frequency-side first-order system `D_t V = (A1 + B) V + F̂` and its
//! quasi-symmetriser energy `E = (Q_δ V, V)`.
//!
//! With `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`:
//! `A1 = [[0, ⟨ξ⟩], [Σ aᵢ ξᵢ²/⟨ξ⟩, 0]]`,
//! `B = [[0, 0], [(iΣ cᵢ ξᵢ + e)/⟨ξ⟩, i d]]`, `F̂ = (0, −f̂)` and
//! `V(0) = (⟨ξ⟩ ĝ0, −i ĝ1)`.

mod energy;
mod levi;

pub use energy::{
    gronwall_verify, integrate, log_variation_bound, moderateness_sweep, sweep_csv,
    sweep_samples, EnergyTrace, GronwallReport, SweepRow, GRONWALL_TOL,
};
pub use levi::{levi_check, lot_bound_check, lot_bound_sweep, LeviOptions, LeviReport, LeviRow, LEVI_SLACK};

use crate::coeffs::{regularise, Mollifier, RegularisedCoefficient, ScaleNet, TimeDistribution};
use crate::{Error, Result};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use std::sync::Arc;

/// Regularised data `(ε, ξ) ↦ ĝ_ε(ξ)`.
pub type DataHat = Arc<dyn Fn(f64, &[f64]) -> Complex64 + Send + Sync>;
/// Regularised forcing `(ε, t, ξ) ↦ f̂_ε(t, ξ)`.
pub type ForcingHat = Arc<dyn Fn(f64, f64, &[f64]) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
pub fn bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Data independent of ε.
pub fn fixed_data(f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> DataHat {
    Arc::new(move |_, xi| f(xi))
}

/// The Cauchy problem `u_tt − Σ aᵢ ∂²ᵢu + Σ cᵢ ∂ᵢu + d ∂ₜu + e u = f`.
#[derive(Clone)]
pub struct EquationSpec {
    pub horizon: f64,
    pub a: Vec<TimeDistribution>,
    pub c: Vec<TimeDistribution>,
    pub d: TimeDistribution,
    pub e: TimeDistribution,
    pub f_hat: Option<ForcingHat>,
    pub g0_hat: DataHat,
    pub g1_hat: DataHat,
}

impl EquationSpec {
    /// Principal part only, zero data.
    pub fn new(a: Vec<TimeDistribution>) -> Result<Self> {
        let horizon = a
            .first()
            .ok_or_else(|| Error::Domain("need at least one principal coefficient".into()))?
            .horizon();
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_nonnegative() {
                return Err(Error::Precondition(format!(
                    "principal coefficient a{} is not flagged nonnegative",
                    i + 1
                )));
            }
            if ai.horizon() != horizon {
                return Err(Error::Domain("coefficients must share the horizon".into()));
            }
        }
        let zero = TimeDistribution::zero(horizon)?;
        Ok(EquationSpec {
            horizon,
            c: vec![zero.clone(); a.len()],
            a,
            d: zero.clone(),
            e: zero,
            f_hat: None,
            g0_hat: fixed_data(|_| Complex64::new(0.0, 0.0)),
            g1_hat: fixed_data(|_| Complex64::new(0.0, 0.0)),
        })
    }

    /// `u_tt = H(t − at) u_xx` on `[0, horizon]`.
    pub fn heaviside(horizon: f64, at: f64) -> Result<Self> {
        Self::new(vec![TimeDistribution::heaviside(horizon, at)?.mark_nonnegative()?])
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn with_c(mut self, c: Vec<TimeDistribution>) -> Result<Self> {
        if c.len() != self.a.len() {
            return Err(Error::Domain("c must have one entry per dimension".into()));
        }
        self.c = c;
        Ok(self)
    }

    pub fn with_d(mut self, d: TimeDistribution) -> Self {
        self.d = d;
        self
    }

    pub fn with_e(mut self, e: TimeDistribution) -> Self {
        self.e = e;
        self
    }

    pub fn with_forcing(mut self, f: ForcingHat) -> Self {
        self.f_hat = Some(f);
        self
    }

    pub fn with_data(mut self, g0: DataHat, g1: DataHat) -> Self {
        self.g0_hat = g0;
        self.g1_hat = g1;
        self
    }
}

/// Mollifier and scale nets: `ω` for `a, c, e`, `ν` for `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Regularisation {
    pub mollifier: Mollifier,
    pub omega: ScaleNet,
    pub nu: ScaleNet,
}

impl Regularisation {
    /// Friedrichs `φ₁` with `ω⁻¹ = ν⁻¹ = ln ε⁻¹`.
    pub fn logarithmic() -> Self {
        let log = ScaleNet::LogPower { c: 1.0, r: 1.0 };
        Regularisation {
            mollifier: Mollifier::phi1(),
            omega: log,
            nu: log,
        }
    }
}

/// Per-ξ system with regularised coefficients.
#[derive(Clone)]
pub struct FrequencySystem {
    pub xi: Vec<f64>,
    pub bracket: f64,
    pub eps: f64,
    pub horizon: f64,
    a: Vec<RegularisedCoefficient>,
    c: Vec<RegularisedCoefficient>,
    d: RegularisedCoefficient,
    e: RegularisedCoefficient,
    forcing: Option<ForcingHat>,
    pub v0: Vector2<Complex64>,
}

/// Builds `A1, B, F̂, V0` at frequency `ξ` from the regularised coefficients.
pub fn assemble(
    spec: &EquationSpec,
    eps: f64,
    reg: &Regularisation,
    xi: &[f64],
) -> Result<FrequencySystem> {
    if xi.len() != spec.n() {
        return Err(Error::Domain(format!(
            "xi has {} components, equation has dimension {}",
            xi.len(),
            spec.n()
        )));
    }
    let m = &reg.mollifier;
    let reg_all = |v: &[TimeDistribution]| -> Result<Vec<RegularisedCoefficient>> {
        v.iter().map(|d| regularise(d, m, eps, reg.omega)).collect()
    };
    let br = bracket(xi);
    let g0 = (spec.g0_hat)(eps, xi);
    let g1 = (spec.g1_hat)(eps, xi);
    Ok(FrequencySystem {
        xi: xi.to_vec(),
        bracket: br,
        eps,
        horizon: spec.horizon,
        a: reg_all(&spec.a)?,
        c: reg_all(&spec.c)?,
        d: regularise(&spec.d, m, eps, reg.nu)?,
        e: regularise(&spec.e, m, eps, reg.omega)?,
        forcing: spec.f_hat.clone(),
        v0: Vector2::new(g0 * br, -I * g1),
    })
}

impl FrequencySystem {
    /// `Σ aᵢ,ε(t) ξᵢ²`.
    pub fn principal(&self, t: f64) -> f64 {
        self.a.iter().zip(&self.xi).map(|(a, x)| a.eval(t) * x * x).sum()
    }

    /// `Σ ∂ₜaᵢ,ε(t) ξᵢ²`.
    pub fn principal_rate(&self, t: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.xi)
            .map(|(a, x)| a.eval_derivative(t, 1).expect("order 1") * x * x)
            .sum()
    }

    /// `iΣ cᵢ,ε ξᵢ + e_ε`.
    pub fn lower_symbol(&self, t: f64) -> Complex64 {
        let s: f64 = self.c.iter().zip(&self.xi).map(|(c, x)| c.eval(t) * x).sum();
        Complex64::new(self.e.eval(t), s)
    }

    pub fn damping(&self, t: f64) -> f64 {
        self.d.eval(t)
    }

    pub fn a1(&self, t: f64) -> Matrix2<f64> {
        Matrix2::new(0.0, self.bracket, self.principal(t) / self.bracket, 0.0)
    }

    pub fn b(&self, t: f64) -> Matrix2<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        Matrix2::new(z, z, self.lower_symbol(t) / self.bracket, I * self.damping(t))
    }

    pub fn forcing(&self, t: f64) -> Vector2<Complex64> {
        let f = self
            .forcing
            .as_ref()
            .map(|f| f(self.eps, t, &self.xi))
            .unwrap_or_default();
        Vector2::new(Complex64::new(0.0, 0.0), -f)
    }

    /// `∂ₜV = i(A1 + B)V + iF̂`.
    pub fn rhs(&self, t: f64, v: &Vector2<Complex64>) -> Vector2<Complex64> {
        let a = self.a1(t).map(|x| Complex64::new(x, 0.0));
        (a + self.b(t)) * v * I + self.forcing(t) * I
    }

    /// Sampled `sup_t Σ aᵢ,ε ξᵢ² / |ξ|²`-style bound: `max_i sup_t |aᵢ,ε|`.
    pub fn a_sup(&self) -> f64 {
        self.a.iter().map(|a| a.sup_estimate()).fold(0.0, f64::max)
    }

    /// Sampled `sup_t ‖B(t)‖` (Frobenius).
    pub fn b_sup(&self) -> f64 {
        let c_sup: f64 = self.c.iter().zip(&self.xi).map(|(c, x)| c.sup_estimate() * x.abs()).sum();
        let low = (c_sup + self.e.sup_estimate()) / self.bracket;
        (low * low + self.d.sup_estimate().powi(2)).sqrt()
    }

    /// `0.5 / (⟨ξ⟩(1 + ‖a_ε‖^{1/2}) + ‖B‖)`.
    pub fn stability_limit(&self) -> f64 {
        0.5 / (self.bracket * (1.0 + self.a_sup().sqrt()) + self.b_sup())
    }

    /// `0.1 / (⟨ξ⟩ + ‖B‖ + 1)`.
    pub fn default_dt(&self) -> f64 {
        0.1 / (self.bracket + self.b_sup() + 1.0)
    }

    /// Smallest mollifier width among the regularised coefficients.
    pub fn min_width(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.c)
            .chain([&self.d, &self.e])
            .map(|r| r.width())
            .fold(f64::INFINITY, f64::min)
    }

    /// Default step, capped at 0.9 of the stability limit and a tenth of the
    /// narrowest mollifier width.
    pub fn resolved_dt(&self) -> f64 {
        self.default_dt()
            .min(0.9 * self.stability_limit())
            .min(self.min_width() / 10.0)
    }

    /// Eigenvalue `λ = (Σ aᵢ,ε ξᵢ²)^{1/2}/⟨ξ⟩` of `A1/⟨ξ⟩` (the pair is `±λ`).
    pub fn lambda(&self, t: f64) -> f64 {
        self.principal(t).max(0.0).sqrt() / self.bracket
    }

    /// `Q_δ(λ, −λ) = diag(2λ² + 2δ², 2)`.
    pub fn q(&self, t: f64, delta: f64) -> Matrix2<f64> {
        let l2 = self.principal(t).max(0.0) / (self.bracket * self.bracket);
        Matrix2::new(2.0 * l2 + 2.0 * delta * delta, 0.0, 0.0, 2.0)
    }
}

/// Hermitian form `(M V, V)`.
pub fn hform(m: &Matrix2<Complex64>, v: &Vector2<Complex64>) -> Complex64 {
    v.dotc(&(m * v))
}

pub(crate) fn to_complex(m: &Matrix2<f64>) -> Matrix2<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsym::{build_q, EigenTuple};

    fn heaviside_system(eps: f64, xi: f64) -> FrequencySystem {
        let spec = EquationSpec::heaviside(2.0, 1.0).unwrap();
        let reg = Regularisation {
            mollifier: Mollifier::phi1(),
            omega: ScaleNet::Identity,
            nu: ScaleNet::Identity,
        };
        assemble(&spec, eps, &reg, &[xi]).unwrap()
    }

    #[test]
    fn zero_lower_order_gives_zero_b() {
        let s = heaviside_system(0.1, 2.0);
        for &t in &[0.0, 1.0, 1.7] {
            assert_eq!(s.b(t), Matrix2::zeros());
        }
    }

    #[test]
    fn a1_before_jump() {
        let s = heaviside_system(0.05, 1.0);
        assert_eq!(s.a1(0.0)[(1, 0)], 0.0);
        let br = 2f64.sqrt();
        let t = 1.02;
        let want = s.a[0].eval(t) * 1.0 / br;
        assert_eq!(s.a1(t), Matrix2::new(0.0, br, want, 0.0));
    }

    #[test]
    fn eigenvalues_of_a1() {
        let s = heaviside_system(0.1, 3.0);
        for &t in &[0.95, 1.0, 1.5] {
            let m = s.a1(t) / s.bracket;
            let ev = m.complex_eigenvalues();
            let lam = s.lambda(t);
            let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
            re.sort_by(f64::total_cmp);
            assert!((re[0] + lam).abs() < 1e-8 && (re[1] - lam).abs() < 1e-8);
        }
    }

    #[test]
    fn q_matches_general_construction() {
        let s = heaviside_system(0.1, 3.0);
        let t = 1.04;
        let l = s.lambda(t);
        let q = build_q(0.3, &EigenTuple::new(vec![l, -l]).unwrap()).unwrap().q;
        let mine = s.q(t, 0.3);
        for i in 0..2 {
            for j in 0..2 {
                assert!((q[(i, j)] - mine[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn initial_vector() {
        let spec = EquationSpec::heaviside(2.0, 1.0).unwrap().with_data(
            fixed_data(|_| Complex64::new(2.0, 0.0)),
            fixed_data(|_| Complex64::new(3.0, 0.0)),
        );
        let s = assemble(&spec, 0.1, &Regularisation::logarithmic(), &[1.0]).unwrap();
        assert_eq!(s.v0, Vector2::new(Complex64::new(2.0 * 2f64.sqrt(), 0.0), Complex64::new(0.0, -3.0)));
    }

    #[test]
    fn rejects_unflagged_principal() {
        let a = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        assert!(EquationSpec::new(vec![a]).is_err());
    }
}
