//! Mollifiers of the three kinds and their scaled versions.

use super::jet::{Jet, JET_LEN};
use crate::quad::{simpson, SIMPSON_NODES};
use crate::{Error, Result};
use std::f64::consts::PI;

/// `∫_{-1}^{1} exp(1/(t²-1)) dt`, the Friedrichs bump mass.
pub const FRIEDRICHS_MASS: f64 = 0.443_993_816_168_079_4;

/// Band limit `b` of the vanishing-moments profile `sin(bt)/(πt)·exp(-t²/2s²)`.
pub const SINC_BAND: f64 = 8.0;
/// Gaussian spread `s` of the vanishing-moments profile.
pub const SINC_SPREAD: f64 = 1.5;
/// Truncation radius for quadrature of the non-compact profile (Gaussian below 1e-21).
pub const SINC_RADIUS: f64 = 15.0;
/// Plateau radius of the Gevrey cutoff in the order-σ profile; support is twice this.
pub const GEVREY_CUT: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MollifierKind {
    /// Nonnegative compactly supported bump.
    Friedrichs,
    /// Schwartz profile with vanishing moments.
    VanishingMoments,
    /// Vanishing-moments core cut off by a Gevrey function of order σ > 1.
    GevreyOrder(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    Bump { radius: f64 },
    GaussSinc,
    CutGaussSinc { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mollifier {
    kind: MollifierKind,
    shape: Shape,
    norm: f64,
}

impl Mollifier {
    pub fn friedrichs(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("mollifier radius must be > 0, got {radius}")));
        }
        Ok(Mollifier {
            kind: MollifierKind::Friedrichs,
            shape: Shape::Bump { radius },
            norm: radius * FRIEDRICHS_MASS,
        })
    }

    /// Unit-radius bump.
    pub fn phi1() -> Self {
        Self::friedrichs(1.0).expect("radius 1")
    }

    /// Bump of radius 2, i.e. `φ₁(t/2)/2`.
    pub fn phi2() -> Self {
        Self::friedrichs(2.0).expect("radius 2")
    }

    pub fn vanishing_moments() -> Self {
        let mut m = Mollifier {
            kind: MollifierKind::VanishingMoments,
            shape: Shape::GaussSinc,
            norm: 1.0,
        };
        m.norm = simpson(|t| m.raw_value(t), -SINC_RADIUS, SINC_RADIUS, 2 * SIMPSON_NODES);
        m
    }

    pub fn gevrey(sigma: f64) -> Result<Self> {
        if !(sigma > 1.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("Gevrey order must be > 1, got {sigma}")));
        }
        let mut m = Mollifier {
            kind: MollifierKind::GevreyOrder(sigma),
            shape: Shape::CutGaussSinc { sigma },
            norm: 1.0,
        };
        let r = 2.0 * GEVREY_CUT;
        m.norm = simpson(|t| m.raw_value(t), -r, r, 2 * SIMPSON_NODES);
        Ok(m)
    }

    pub fn kind(&self) -> MollifierKind {
        self.kind
    }

    pub fn normalisation(&self) -> f64 {
        self.norm
    }

    /// Radius of the support for compact kinds.
    pub fn support_radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Bump { radius } => Some(radius),
            Shape::GaussSinc => None,
            Shape::CutGaussSinc { .. } => Some(2.0 * GEVREY_CUT),
        }
    }

    /// Radius outside which the profile is zero or below quadrature resolution.
    pub fn quadrature_radius(&self) -> f64 {
        self.support_radius().unwrap_or(SINC_RADIUS)
    }

    fn raw_value(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Bump { radius } => bump(t / radius),
            Shape::GaussSinc => gauss_sinc(t),
            Shape::CutGaussSinc { sigma } => gauss_sinc(t) * gevrey_cutoff(t / GEVREY_CUT, sigma),
        }
    }

    fn raw_jet(&self, t: f64) -> Jet {
        let x = Jet::variable(t);
        match self.shape {
            Shape::Bump { radius } => bump_jet(x.scale(1.0 / radius)),
            Shape::GaussSinc => gauss_sinc_jet(x),
            Shape::CutGaussSinc { sigma } => {
                gauss_sinc_jet(x) * gevrey_cutoff_jet(x.scale(1.0 / GEVREY_CUT), sigma)
            }
        }
    }

    /// Profile value; zero outside the support for compact kinds.
    pub fn eval(&self, t: f64) -> f64 {
        self.raw_value(t) / self.norm
    }

    /// k-th derivative of the profile, computed analytically.
    ///
    /// # Panics
    /// If `k` exceeds the jet length.
    pub fn derivative(&self, t: f64, k: usize) -> f64 {
        assert!(k < JET_LEN, "derivative order {k} exceeds {}", JET_LEN - 1);
        if k == 0 {
            return self.eval(t);
        }
        self.raw_jet(t).derivative(k) / self.norm
    }

    /// Largest profile value (attained at the origin for every kind).
    pub fn max_value(&self) -> f64 {
        self.eval(0.0)
    }

    /// `h⁻¹ profile(t/h)`.
    pub fn scaled(&self, h: f64, t: f64) -> Result<f64> {
        check_width(h)?;
        Ok(self.eval(t / h) / h)
    }

    /// k-th derivative of the scaled mollifier, `h^{-1-k} profile^{(k)}(t/h)`.
    pub fn scaled_derivative(&self, h: f64, t: f64, k: usize) -> Result<f64> {
        check_width(h)?;
        if k >= JET_LEN {
            return Err(Error::Domain(format!(
                "derivative order {k} exceeds {}",
                JET_LEN - 1
            )));
        }
        Ok(self.derivative(t / h, k) / h.powi(k as i32 + 1))
    }

    /// `∫_{-∞}^{z} profile`.
    pub fn cumulative(&self, z: f64) -> f64 {
        let r = self.quadrature_radius();
        if z <= -r {
            return 0.0;
        }
        if z >= r {
            return 1.0;
        }
        simpson(|s| self.eval(s), -r, z, SIMPSON_NODES)
    }

    /// `∫ t^k profile(t) dt`.
    pub fn moment(&self, k: u32) -> f64 {
        let r = self.quadrature_radius();
        simpson(|t| t.powi(k as i32) * self.eval(t), -r, r, 2 * SIMPSON_NODES)
    }

    /// Fourier transform of the data net `ρ_ε(x) = ε⁻¹ φ(x/ε) χ_σ(x |ln ε|)` at `ξ`,
    /// with `φ` the vanishing-moments core. Only defined for the Gevrey kind.
    pub fn gevrey_net_fourier(&self, eps: f64, xi: f64) -> Result<f64> {
        let sigma = match self.kind {
            MollifierKind::GevreyOrder(s) => s,
            _ => {
                return Err(Error::Domain(
                    "data nets are only defined for the Gevrey-order kind".into(),
                ))
            }
        };
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Domain(format!("eps must lie in (0,1], got {eps}")));
        }
        let core_norm = simpson(gauss_sinc, -SINC_RADIUS, SINC_RADIUS, 2 * SIMPSON_NODES);
        let lg = -eps.ln();
        let scale = eps * lg;
        let y_max = if scale > 0.0 {
            SINC_RADIUS.min(2.0 / scale)
        } else {
            SINC_RADIUS
        };
        let freq = eps * xi.abs() + SINC_BAND;
        let n = ((2.0 * y_max * freq / 0.1).ceil() as usize).max(2 * SIMPSON_NODES);
        let v = simpson(
            |y| gauss_sinc(y) * gevrey_cutoff(scale * y, sigma) * (eps * y * xi).cos(),
            -y_max,
            y_max,
            n,
        );
        Ok(v / core_norm)
    }
}

fn check_width(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("scale h must be > 0, got {h}")))
    }
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (x * x - 1.0)).exp()
    }
}

fn bump_jet(x: Jet) -> Jet {
    if x.value().abs() >= 1.0 {
        return Jet::constant(0.0);
    }
    (x * x - Jet::constant(1.0)).recip().exp()
}

fn gauss_sinc(t: f64) -> f64 {
    let x = SINC_BAND * t;
    let sinc = if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
    SINC_BAND / PI * sinc * (-t * t / (2.0 * SINC_SPREAD * SINC_SPREAD)).exp()
}

fn gauss_sinc_jet(t: Jet) -> Jet {
    let g = (t * t).scale(-1.0 / (2.0 * SINC_SPREAD * SINC_SPREAD)).exp();
    t.scale(SINC_BAND).sinc().scale(SINC_BAND / PI) * g
}

/// `exp(-s^{-1/(σ-1)})` for `s > 0`, zero otherwise.
fn flat(s: f64, sigma: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-s.powf(-1.0 / (sigma - 1.0))).exp()
    }
}

/// Gevrey-σ plateau function: 1 on `|x| ≤ 1`, 0 on `|x| ≥ 2`.
pub fn gevrey_cutoff(x: f64, sigma: f64) -> f64 {
    let ax = x.abs();
    if ax <= 1.0 {
        1.0
    } else if ax >= 2.0 {
        0.0
    } else {
        let a = flat(2.0 - ax, sigma);
        let b = flat(ax - 1.0, sigma);
        a / (a + b)
    }
}

fn gevrey_cutoff_jet(x: Jet, sigma: f64) -> Jet {
    let ax = x.value().abs();
    if ax <= 1.0 {
        return Jet::constant(1.0);
    }
    if ax >= 2.0 {
        return Jet::constant(0.0);
    }
    let y = if x.value() > 0.0 { x } else { -x };
    let p = -1.0 / (sigma - 1.0);
    let a = (-(Jet::constant(2.0) - y).powf(p)).exp();
    let b = (-(y - Jet::constant(1.0)).powf(p)).exp();
    a * (a + b).recip()
}
