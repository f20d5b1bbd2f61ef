//! Scale nets `ε ↦ ω(ε)` controlling the mollifier width.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleNet {
    /// `ω(ε)⁻¹ = c (ln ε⁻¹)^r`.
    LogPower { c: f64, r: f64 },
    /// `ω(ε) = c ε^p`.
    PowerLaw { c: f64, p: f64 },
    /// `ω(ε) = ε`.
    Identity,
}

/// Constants exhibiting `c₂ ε^ρ ≤ ω(ε) ≤ c₁` on a tested ε range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosNet {
    pub c1: f64,
    pub c2: f64,
    pub rho: f64,
}

impl ScaleNet {
    pub fn log_power(c: f64, r: f64) -> Result<Self> {
        if !(c > 0.0 && r > 0.0) {
            return Err(Error::Domain(format!("log net needs c, r > 0 (got {c}, {r})")));
        }
        Ok(ScaleNet::LogPower { c, r })
    }

    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && p > 0.0) {
            return Err(Error::Domain(format!("power net needs c, p > 0 (got {c}, {p})")));
        }
        Ok(ScaleNet::PowerLaw { c, p })
    }

    /// Width `ω(ε)`; infinite for log nets at `ε = 1`.
    pub fn omega(&self, eps: f64) -> f64 {
        match *self {
            ScaleNet::LogPower { c, r } => 1.0 / (c * (-eps.ln()).powf(r)),
            ScaleNet::PowerLaw { c, p } => c * eps.powf(p),
            ScaleNet::Identity => eps,
        }
    }

    /// Exhibits `(c₁, c₂, ρ)` on the given ε grid, with ρ = 1 for log nets and
    /// ρ = p for power nets. Errors when ω is not finite and decreasing as ε
    /// decreases along the grid.
    pub fn pos_net_constants(&self, eps_grid: &[f64]) -> Result<PosNet> {
        if eps_grid.is_empty() {
            return Err(Error::Domain("empty eps grid".into()));
        }
        let mut eps: Vec<f64> = eps_grid.to_vec();
        eps.sort_by(|a, b| b.total_cmp(a));
        let om: Vec<f64> = eps.iter().map(|&e| self.omega(e)).collect();
        if om.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Domain("scale net not finite and positive on the grid".into()));
        }
        if om.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Domain("scale net not monotone on the grid".into()));
        }
        let rho = match *self {
            ScaleNet::PowerLaw { p, .. } => p,
            _ => 1.0,
        };
        let c1 = om[0];
        let c2 = eps
            .iter()
            .zip(&om)
            .map(|(e, w)| w / e.powf(rho))
            .fold(f64::INFINITY, f64::min);
        Ok(PosNet { c1, c2, rho })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_power_exact() {
        let n = ScaleNet::log_power(2.0, 1.5).unwrap();
        let e: f64 = 0.01;
        let inv = 2.0 * (1.0 / e).ln().powf(1.5);
        assert!((1.0 / n.omega(e) - inv).abs() < 1e-12 * inv);
    }

    #[test]
    fn pos_net_holds_on_grid() {
        let grid: Vec<f64> = (0..8).map(|j| 0.1 * 0.5f64.powi(j)).collect();
        for net in [
            ScaleNet::log_power(1.0, 1.0).unwrap(),
            ScaleNet::power_law(1.0, 0.5).unwrap(),
            ScaleNet::Identity,
        ] {
            let p = net.pos_net_constants(&grid).unwrap();
            for &e in &grid {
                let w = net.omega(e);
                assert!(w <= p.c1 * (1.0 + 1e-12));
                assert!(w >= p.c2 * e.powf(p.rho) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn log_net_undefined_at_one() {
        let n = ScaleNet::log_power(1.0, 1.0).unwrap();
        assert!(n.pos_net_constants(&[1.0, 0.5]).is_err());
        assert!(ScaleNet::log_power(0.0, 1.0).is_err());
    }
}
