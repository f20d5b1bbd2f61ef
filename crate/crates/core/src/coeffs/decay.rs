//! Envelope fit of Fourier decay bounds
//! `|V| ≤ c' ε^{-N} exp(-c ε^{1/s} ⟨ξ⟩^{1/s})`.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecaySample {
    pub eps: f64,
    /// `|ξ|`.
    pub xi: f64,
    pub magnitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub n: f64,
    pub c: f64,
    pub c_prime: f64,
    /// Largest `log|V| − log(bound)` over the samples, clamped at 0.
    pub residual: f64,
    /// Mean gap between the fitted log-bound and the samples.
    pub mean_gap: f64,
}

const GOLDEN_ITERS: usize = 160;
const BRACKET_CAP: f64 = 1e12;

struct Problem {
    y: Vec<f64>,
    l: Vec<f64>,
    x: Vec<f64>,
    mean_y: f64,
    mean_l: f64,
    mean_x: f64,
}

impl Problem {
    fn offset(&self, n: f64, c: f64) -> f64 {
        self.y
            .iter()
            .zip(&self.l)
            .zip(&self.x)
            .map(|((y, l), x)| y - n * l + c * x)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn gap(&self, n: f64, c: f64) -> f64 {
        self.offset(n, c) + n * self.mean_l - c * self.mean_x - self.mean_y
    }
}

/// Minimises a convex function on `[0, ∞)`.
fn convex_min(f: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    let mut prev = f(0.0);
    loop {
        let v = f(hi);
        if v >= prev || hi >= BRACKET_CAP {
            break;
        }
        prev = v;
        hi *= 2.0;
    }
    let (mut a, mut b) = (0.0, hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    // the endpoint 0 may be the exact minimiser of a piecewise-linear function
    if f(0.0) <= f(mid) {
        0.0
    } else {
        mid
    }
}

/// Fits the tightest bound of the form
/// `log|V| ≤ log c' + N log(1/ε) − c (ε⟨ξ⟩)^{1/s}` with `N, c ≥ 0`.
///
/// The constants minimise the mean gap between the bound and the samples
/// subject to the bound holding at every sample, so the reported residual is
/// zero up to rounding.
pub fn fourier_decay_fit(samples: &[DecaySample], s: f64) -> Result<DecayFit> {
    if samples.is_empty() {
        return Err(Error::Fit("no samples".into()));
    }
    if !(s > 1.0) {
        return Err(Error::Domain(format!("Gevrey order s must be > 1, got {s}")));
    }
    if let Some(bad) = samples
        .iter()
        .find(|p| !(p.magnitude > 0.0 && p.magnitude.is_finite()))
    {
        return Err(Error::Fit(format!(
            "sample magnitude must be positive and finite (eps = {}, xi = {})",
            bad.eps, bad.xi
        )));
    }
    if let Some(bad) = samples.iter().find(|p| !(p.eps > 0.0 && p.eps < 1.0)) {
        return Err(Error::Fit(format!("eps {} outside (0,1)", bad.eps)));
    }
    let distinct = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct(samples.iter().map(|p| p.eps).collect()) < 2 {
        return Err(Error::Fit("degenerate sample set: single eps".into()));
    }
    if distinct(samples.iter().map(|p| p.xi.abs()).collect()) < 2 {
        return Err(Error::Fit("degenerate sample set: single xi".into()));
    }
    let k = samples.len() as f64;
    let y: Vec<f64> = samples.iter().map(|p| p.magnitude.ln()).collect();
    let l: Vec<f64> = samples.iter().map(|p| -p.eps.ln()).collect();
    let x: Vec<f64> = samples
        .iter()
        .map(|p| (p.eps * (1.0 + p.xi * p.xi).sqrt()).powf(1.0 / s))
        .collect();
    let pb = Problem {
        mean_y: y.iter().sum::<f64>() / k,
        mean_l: l.iter().sum::<f64>() / k,
        mean_x: x.iter().sum::<f64>() / k,
        y,
        l,
        x,
    };
    let best_c = |n: f64| convex_min(|c| pb.gap(n, c));
    let n = convex_min(|n| pb.gap(n, best_c(n)));
    let c = best_c(n);
    let b = pb.offset(n, c);
    let residual = (0..samples.len())
        .map(|i| pb.y[i] - (b + n * pb.l[i] - c * pb.x[i]))
        .fold(0.0, f64::max);
    Ok(DecayFit {
        n,
        c,
        c_prime: b.exp(),
        residual,
        mean_gap: pb.gap(n, c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64, f64) -> f64) -> Vec<DecaySample> {
        let mut v = Vec::new();
        for j in 0..5 {
            let eps = 0.1 * 0.5f64.powi(j);
            for &xi in &[1.0, 3.0, 10.0, 30.0, 100.0] {
                v.push(DecaySample { eps, xi, magnitude: f(eps, xi) });
            }
        }
        v
    }

    #[test]
    fn synthetic_recovers_constants() {
        let s = 2.0;
        let data = grid(|e, xi| {
            let br = (1.0 + xi * xi).sqrt();
            e.powf(-2.0) * (-0.5 * (e * br).powf(1.0 / s)).exp()
        });
        let fit = fourier_decay_fit(&data, s).unwrap();
        assert!((fit.n - 2.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.c - 0.5).abs() < 1e-6, "{fit:?}");
        assert!((fit.c_prime - 1.0).abs() < 1e-6);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn constant_samples() {
        let data = grid(|_, _| 1.0);
        let fit = fourier_decay_fit(&data, 2.0).unwrap();
        assert!(fit.n.abs() < 1e-9 && fit.c.abs() < 1e-9, "{fit:?}");
        assert_eq!(fit.residual, 0.0);
    }

    #[test]
    fn degenerate_sets_rejected() {
        let one_eps: Vec<_> = [1.0, 2.0]
            .iter()
            .map(|&xi| DecaySample { eps: 0.1, xi, magnitude: 1.0 })
            .collect();
        assert!(matches!(fourier_decay_fit(&one_eps, 2.0), Err(Error::Fit(_))));
        let one_xi: Vec<_> = [0.1, 0.05]
            .iter()
            .map(|&eps| DecaySample { eps, xi: 1.0, magnitude: 1.0 })
            .collect();
        assert!(matches!(fourier_decay_fit(&one_xi, 2.0), Err(Error::Fit(_))));
        assert!(fourier_decay_fit(&[], 2.0).is_err());
        assert!(fourier_decay_fit(&grid(|_, _| 1.0), 1.0).is_err());
        assert!(fourier_decay_fit(&grid(|_, _| 0.0), 2.0).is_err());
    }
}
