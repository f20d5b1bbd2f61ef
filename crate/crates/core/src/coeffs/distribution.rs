//! Symbolic distributions in time and their mollified regularisations.

use super::mollifier::Mollifier;
use super::scale::ScaleNet;
use crate::quad::{simpson, SIMPSON_NODES};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Grid size used when checking nonnegativity of smooth terms.
const NONNEG_SAMPLES: usize = 10_000;

/// Point terms are limited to derivatives the analytic jets can resolve
/// together with two further time derivatives.
pub const MAX_POINT_ORDER: u32 = 3;

/// A smooth function of time with a declared sup-norm bound.
#[derive(Clone)]
pub struct SmoothFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    sup: f64,
    label: String,
}

impl SmoothFn {
    pub fn new(label: &str, sup: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn {
            f: Arc::new(f),
            sup,
            label: label.to_string(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Smooth({}, |f| <= {})", self.label, self.sup)
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Smooth(SmoothFn),
    /// `left` before `at`, `right` after.
    Jump { at: f64, left: f64, right: f64 },
    /// `weight · δ^(order)_at`.
    Point { at: f64, order: u32, weight: f64 },
}

/// A compactly supported distribution on `[0, T]` built from smooth, jump and point terms.
#[derive(Clone, Debug)]
pub struct TimeDistribution {
    horizon: f64,
    terms: Vec<Term>,
    nonnegative: bool,
}

impl TimeDistribution {
    pub fn new(horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon must be > 0, got {horizon}")));
        }
        Ok(TimeDistribution {
            horizon,
            terms: Vec::new(),
            nonnegative: false,
        })
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::new(horizon)
    }

    pub fn heaviside(horizon: f64, at: f64) -> Result<Self> {
        Self::new(horizon)?.with(Term::Jump {
            at,
            left: 0.0,
            right: 1.0,
        })
    }

    pub fn dirac(horizon: f64, at: f64) -> Result<Self> {
        Self::new(horizon)?.with(Term::Point {
            at,
            order: 0,
            weight: 1.0,
        })
    }

    /// Polynomial `Σ c_k t^k` as a smooth term; its sup bound is taken over `[-1, T+1]`.
    pub fn polynomial(horizon: f64, coeffs: &[f64]) -> Result<Self> {
        let c = coeffs.to_vec();
        let eval = move |t: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck);
        let sup = (0..=1000)
            .map(|i| eval(-1.0 + (horizon + 2.0) * i as f64 / 1000.0).abs())
            .fold(0.0, f64::max);
        let label = format!("poly{coeffs:?}");
        Self::new(horizon)?.with(Term::Smooth(SmoothFn::new(&label, sup, eval)))
    }

    pub fn constant(horizon: f64, value: f64) -> Result<Self> {
        Self::polynomial(horizon, &[value])
    }

    /// Adds a term after checking its location lies in `[0, T]`.
    pub fn with(mut self, term: Term) -> Result<Self> {
        match &term {
            Term::Jump { at, left, right } => {
                self.check_location(*at)?;
                if !(left.is_finite() && right.is_finite()) {
                    return Err(Error::Domain("jump values must be finite".into()));
                }
            }
            Term::Point { at, order, weight } => {
                self.check_location(*at)?;
                if *order > MAX_POINT_ORDER {
                    return Err(Error::Domain(format!(
                        "point term order {order} exceeds {MAX_POINT_ORDER}"
                    )));
                }
                if !weight.is_finite() {
                    return Err(Error::Domain("point weight must be finite".into()));
                }
            }
            Term::Smooth(s) => {
                if !(s.sup >= 0.0) {
                    return Err(Error::Domain("smooth term needs a sup bound >= 0".into()));
                }
            }
        }
        self.terms.push(term);
        if self.nonnegative {
            self.nonnegative = false;
            return self.mark_nonnegative();
        }
        Ok(self)
    }

    fn check_location(&self, at: f64) -> Result<()> {
        if (0.0..=self.horizon).contains(&at) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "term location {at} outside [0, {}]",
                self.horizon
            )))
        }
    }

    /// Flags the distribution as nonnegative after verifying the sufficient
    /// conditions term by term.
    pub fn mark_nonnegative(mut self) -> Result<Self> {
        for term in &self.terms {
            match term {
                Term::Smooth(s) => {
                    let n = NONNEG_SAMPLES;
                    for i in 0..=n {
                        let t = self.horizon * i as f64 / n as f64;
                        if s.eval(t) < 0.0 {
                            return Err(Error::Precondition(format!(
                                "smooth term {} is negative at t = {t}",
                                s.label
                            )));
                        }
                    }
                }
                Term::Jump { at, left, right } => {
                    if *left < 0.0 || *right < 0.0 {
                        return Err(Error::Precondition(format!(
                            "jump at {at} has a negative value"
                        )));
                    }
                }
                Term::Point { at, order, weight } => {
                    if *order != 0 || *weight < 0.0 {
                        return Err(Error::Precondition(format!(
                            "point term at {at} (order {order}, weight {weight}) is not a nonnegative measure"
                        )));
                    }
                }
            }
        }
        self.nonnegative = true;
        Ok(self)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn has_point_terms(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Point { .. }))
    }

    /// Closed hull of the term supports; `None` for the zero distribution.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for term in &self.terms {
            let (a, b) = match term {
                Term::Smooth(_) => (0.0, self.horizon),
                Term::Jump { at, left, .. } if *left == 0.0 => (*at, self.horizon),
                Term::Jump { .. } => (0.0, self.horizon),
                Term::Point { at, .. } => (*at, *at),
            };
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// `a_ε = a ∗ ψ_{ω(ε)}` evaluable with derivatives.
#[derive(Clone, Debug)]
pub struct RegularisedCoefficient {
    source: TimeDistribution,
    mollifier: Mollifier,
    eps: f64,
    scale: ScaleNet,
    width: f64,
}

/// Regularises `d` with the mollifier scaled by `ω(ε)`.
pub fn regularise(
    d: &TimeDistribution,
    m: &Mollifier,
    eps: f64,
    net: ScaleNet,
) -> Result<RegularisedCoefficient> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1], got {eps}")));
    }
    let width = net.omega(eps);
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Domain(format!(
            "scale net gives width {width} at eps = {eps}"
        )));
    }
    Ok(RegularisedCoefficient {
        source: d.clone(),
        mollifier: m.clone(),
        eps,
        scale: net,
        width,
    })
}

impl RegularisedCoefficient {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Mollifier width `ω(ε)`.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn scale(&self) -> ScaleNet {
        self.scale
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    pub fn source(&self) -> &TimeDistribution {
        &self.source
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_order(t, 0)
    }

    /// Time derivative of order ≤ 2, obtained from derivatives of the mollifier.
    pub fn eval_derivative(&self, t: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::Domain(format!("derivative order {order} > 2")));
        }
        Ok(self.eval_order(t, order))
    }

    fn eval_order(&self, t: f64, order: usize) -> f64 {
        let h = self.width;
        let m = &self.mollifier;
        let r = m.quadrature_radius();
        let mut acc = 0.0;
        for term in self.source.terms() {
            acc += match term {
                Term::Smooth(s) => {
                    let pow = h.powi(order as i32);
                    simpson(
                        |u| s.eval(t - h * u) * m.derivative(u, order),
                        -r,
                        r,
                        SIMPSON_NODES,
                    ) / pow
                }
                Term::Jump { at, left, right } => {
                    if order == 0 {
                        left + (right - left) * m.cumulative((t - at) / h)
                    } else {
                        (right - left) * m.derivative((t - at) / h, order - 1) / h.powi(order as i32)
                    }
                }
                Term::Point { at, order: k, weight } => {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let j = *k as usize + order;
                    weight * sign * m.derivative((t - at) / h, j) / h.powi(j as i32 + 1)
                }
            };
        }
        acc
    }

    /// Largest `|eval|` on a uniform grid of `n + 1` points over `[a, b]`.
    pub fn sup_on(&self, a: f64, b: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| self.eval(a + (b - a) * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Sampled `sup |a_ε|` over `[0, T]`, including the peaks of point terms.
    pub fn sup_estimate(&self) -> f64 {
        let mut s = self.sup_on(0.0, self.source.horizon(), 4000);
        for term in self.source.terms() {
            if let Term::Point { at, .. } = term {
                s = s.max(self.eval(*at).abs());
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_gives_scaled_mollifier() {
        let d = TimeDistribution::dirac(2.0, 1.0).unwrap();
        let m = Mollifier::phi1();
        let a = regularise(&d, &m, 0.1, ScaleNet::Identity).unwrap();
        for &t in &[0.95, 1.0, 1.03, 1.2] {
            let want = m.scaled(0.1, t - 1.0).unwrap();
            assert!((a.eval(t) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn heaviside_bounds() {
        let d = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        let m = Mollifier::phi1();
        let a = regularise(&d, &m, 0.05, ScaleNet::Identity).unwrap();
        assert!(a.sup_on(0.0, 2.0, 4000) <= 1.0);
        assert_eq!(a.eval(1.0 - 0.05), 0.0);
        assert_eq!(a.eval(0.3), 0.0);
        assert!((a.eval(1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eps_out_of_range() {
        let d = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        let m = Mollifier::phi1();
        assert!(regularise(&d, &m, 0.0, ScaleNet::Identity).is_err());
        assert!(regularise(&d, &m, 1.5, ScaleNet::Identity).is_err());
        assert!(regularise(&d, &m, 1.0, ScaleNet::log_power(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn derivative_of_jump_is_mollifier() {
        let d = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        let m = Mollifier::phi1();
        let a = regularise(&d, &m, 0.1, ScaleNet::Identity).unwrap();
        let t = 1.04;
        let h = 1e-6;
        let fd = (a.eval(t + h) - a.eval(t - h)) / (2.0 * h);
        assert!((fd - a.eval_derivative(t, 1).unwrap()).abs() < 1e-5);
        let fd2 = (a.eval_derivative(t + h, 1).unwrap() - a.eval_derivative(t - h, 1).unwrap())
            / (2.0 * h);
        assert!((fd2 - a.eval_derivative(t, 2).unwrap()).abs() < 1e-3);
        assert!(a.eval_derivative(t, 3).is_err());
    }

    #[test]
    fn smooth_derivative_matches_polynomial() {
        let d = TimeDistribution::polynomial(2.0, &[1.0, 0.0, 1.0]).unwrap();
        let m = Mollifier::phi1();
        let a = regularise(&d, &m, 0.1, ScaleNet::Identity).unwrap();
        // (1 + t²) ∗ ψ_h = 1 + t² + h² m2 with m2 the second moment
        let m2 = m.moment(2);
        let t = 0.7;
        assert!((a.eval(t) - (1.0 + t * t + 0.01 * m2)).abs() < 1e-10);
        assert!((a.eval_derivative(t, 1).unwrap() - 2.0 * t).abs() < 1e-9);
        assert!((a.eval_derivative(t, 2).unwrap() - 2.0).abs() < 1e-7);
    }

    #[test]
    fn nonnegativity_flags() {
        let h = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        assert!(h.mark_nonnegative().is_ok());
        let p = TimeDistribution::new(2.0)
            .unwrap()
            .with(Term::Point { at: 1.0, order: 1, weight: 1.0 })
            .unwrap();
        assert!(p.mark_nonnegative().is_err());
        let neg = TimeDistribution::polynomial(2.0, &[-0.5, 1.0]).unwrap();
        assert!(neg.mark_nonnegative().is_err());
    }

    #[test]
    fn support_and_location_checks() {
        assert!(TimeDistribution::dirac(2.0, 2.5).is_err());
        let d = TimeDistribution::heaviside(2.0, 1.0).unwrap();
        assert_eq!(d.support(), Some((1.0, 2.0)));
        assert_eq!(TimeDistribution::zero(2.0).unwrap().support(), None);
    }
}
