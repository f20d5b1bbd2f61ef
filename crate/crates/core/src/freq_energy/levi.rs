use super::{assemble, hform, to_complex, EquationSpec, FrequencySystem, Regularisation};
use crate::{Error, Result};
use nalgebra::Vector2;
use num_complex::Complex64;
use rand::Rng;

/// Relative slack allowed when comparing the Levi ratios to their constants.
pub const LEVI_SLACK: f64 = 1e-12;

/// Grids and constants for [`levi_check`].
#[derive(Clone, Debug)]
pub struct LeviOptions {
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub t_grid: Vec<f64>,
    pub xi_grid: Vec<Vec<f64>>,
    /// Only frequencies with `|ξ| ≥ r` are admissible.
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviRow {
    pub eps: f64,
    /// `max |iΣ cᵢ,ε ξᵢ + e_ε|² / (2Σ aᵢ,ε ξᵢ²)`.
    pub c1_eps: f64,
    /// `max |d_ε|²`.
    pub c2_eps: f64,
    /// `c1_eps / (ln ε⁻¹)²`.
    pub ratio_lower: f64,
    /// `c2_eps / (ln ε⁻¹)²`.
    pub ratio_damping: f64,
    /// `4 (c1_eps + γ c2_eps)^{1/2}`.
    pub c_eps: f64,
    /// Location of a nonzero lower-order symbol over a vanishing principal part.
    pub violation: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviReport {
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub rows: Vec<LeviRow>,
}

impl LeviReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Evaluates the logarithmic Levi ratios on the given `(t, ξ)` grid for each ε.
pub fn levi_check(
    spec: &EquationSpec,
    reg: &Regularisation,
    eps_list: &[f64],
    opts: &LeviOptions,
) -> Result<LeviReport> {
    if opts.t_grid.is_empty() || opts.xi_grid.is_empty() || eps_list.is_empty() {
        return Err(Error::Domain("levi check needs nonempty eps, t and xi grids".into()));
    }
    if !(opts.r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {}", opts.r)));
    }
    for xi in &opts.xi_grid {
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < opts.r {
            return Err(Error::Precondition(format!(
                "|xi| = {norm} below R = {}",
                opts.r
            )));
        }
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
        }
        let log_sq = (1.0 / eps).ln().powi(2);
        let mut c1_eps: f64 = 0.0;
        let mut c2_eps: f64 = 0.0;
        let mut violation = None;
        for xi in &opts.xi_grid {
            let sys = assemble(spec, eps, reg, xi)?;
            for &t in &opts.t_grid {
                let num = sys.lower_symbol(t).norm_sqr();
                let den = 2.0 * sys.principal(t);
                if den > 0.0 {
                    c1_eps = c1_eps.max(num / den);
                } else if num > 0.0 && violation.is_none() {
                    violation = Some(format!(
                        "lower-order symbol {num:.3e} over vanishing principal part at t = {t}, xi = {xi:?}"
                    ));
                }
                c2_eps = c2_eps.max(sys.damping(t).powi(2));
            }
        }
        let ratio_lower = c1_eps / log_sq;
        let ratio_damping = c2_eps / log_sq;
        let pass = violation.is_none()
            && ratio_lower <= opts.c1 * (1.0 + LEVI_SLACK)
            && ratio_damping <= opts.c2 * (1.0 + LEVI_SLACK);
        rows.push(LeviRow {
            eps,
            c1_eps,
            c2_eps,
            ratio_lower,
            ratio_damping,
            c_eps: 4.0 * (c1_eps + opts.gamma * c2_eps).sqrt(),
            violation,
            pass,
        });
    }
    Ok(LeviReport {
        c1: opts.c1,
        c2: opts.c2,
        gamma: opts.gamma,
        rows,
    })
}

/// `max |((Q_δ B − B* Q_δ) V, V)| / (Q_δ V, V)` over `trials` random complex `V`
/// at time `t`.
pub fn lot_bound_check<R: Rng>(
    sys: &FrequencySystem,
    t: f64,
    delta: f64,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let q = to_complex(&sys.q(t, delta));
    let b = sys.b(t);
    let comm = q * b - b.adjoint() * q;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let v = Vector2::new(c(), c());
        let e = hform(&q, &v).re;
        if e > 0.0 {
            worst = worst.max(hform(&comm, &v).norm() / e);
        }
    }
    worst
}

/// Worst [`lot_bound_check`] ratio at one ε over the frequency grid, each
/// frequency probed at the grid time where `‖B‖` peaks with `δ = ⟨ξ⟩^{-1/2}`.
pub fn lot_bound_sweep<R: Rng>(
    spec: &EquationSpec,
    reg: &Regularisation,
    eps: f64,
    xi_grid: &[Vec<f64>],
    t_grid: &[f64],
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for xi in xi_grid {
        let sys = assemble(spec, eps, reg, xi)?;
        let t_star = t_grid
            .iter()
            .copied()
            .max_by(|a, b| sys.b(*a).norm().total_cmp(&sys.b(*b).norm()))
            .ok_or_else(|| Error::Domain("empty time grid".into()))?;
        let delta = sys.bracket.powf(-0.5);
        worst = worst.max(lot_bound_check(&sys, t_star, delta, trials, rng));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{Mollifier, ScaleNet, TimeDistribution};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect()
    }

    fn damped() -> EquationSpec {
        EquationSpec::heaviside(2.0, 1.0)
            .unwrap()
            .with_d(TimeDistribution::dirac(2.0, 1.0).unwrap())
    }

    #[test]
    fn log_damping_passes_with_peak_constant() {
        let reg = Regularisation::logarithmic();
        let peak = Mollifier::phi1().max_value();
        let opts = LeviOptions {
            c1: 0.0,
            c2: peak * peak,
            gamma: 8.0,
            t_grid: grid(2000),
            xi_grid: vec![vec![1.0], vec![5.0]],
            r: 1.0,
        };
        let rep = levi_check(&damped(), &reg, &[0.1, 0.01, 0.001], &opts).unwrap();
        assert!(rep.pass(), "{rep:?}");
        for row in &rep.rows {
            assert!((row.ratio_damping / (peak * peak) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_damping_fails() {
        let reg = Regularisation {
            mollifier: Mollifier::phi1(),
            omega: ScaleNet::Identity,
            nu: ScaleNet::Identity,
        };
        let opts = LeviOptions {
            c1: 0.0,
            c2: 1.0,
            gamma: 8.0,
            t_grid: grid(2000),
            xi_grid: vec![vec![1.0]],
            r: 1.0,
        };
        let rep = levi_check(&damped(), &reg, &[0.1, 0.01], &opts).unwrap();
        assert!(!rep.pass());
    }

    #[test]
    fn lower_order_over_zero_principal_is_located() {
        let spec = EquationSpec::heaviside(2.0, 1.0)
            .unwrap()
            .with_c(vec![TimeDistribution::constant(2.0, 1.0).unwrap()])
            .unwrap();
        let opts = LeviOptions {
            c1: 100.0,
            c2: 0.0,
            gamma: 8.0,
            t_grid: grid(200),
            xi_grid: vec![vec![1.0]],
            r: 1.0,
        };
        let rep = levi_check(&spec, &Regularisation::logarithmic(), &[0.1], &opts).unwrap();
        assert!(!rep.pass());
        assert!(rep.rows[0].violation.as_deref().unwrap().contains("t = 0"));
    }

    #[test]
    fn small_xi_rejected() {
        let opts = LeviOptions {
            c1: 1.0,
            c2: 1.0,
            gamma: 8.0,
            t_grid: grid(10),
            xi_grid: vec![vec![0.5]],
            r: 1.0,
        };
        assert!(levi_check(&damped(), &Regularisation::logarithmic(), &[0.1], &opts).is_err());
    }

    #[test]
    fn lot_ratio_below_constant() {
        let reg = Regularisation::logarithmic();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = assemble(&damped(), 0.01, &reg, &[3.0]).unwrap();
        let c2 = sys.damping(1.0).powi(2);
        let bound = 4.0 * (8.0 * c2).sqrt();
        let r = lot_bound_check(&sys, 1.0, 0.2, 10_000, &mut rng);
        assert!(r > 0.0 && r <= bound, "{r} vs {bound}");
    }
}
