use proptest::prelude::*;
use std::f64::consts::PI;
use vwlab::coeffs::{regularise, Mollifier, ScaleNet, Term, TimeDistribution};
use vwlab::exact::{eval_exact, PeriodicData, PiecewiseSolution};
use vwlab::experiments::{parse_csv, to_csv, Row, StudyResult};
use vwlab::fd_solver::{lf_step, sobolev_norm, Grid1D, SolutionField};
use vwlab::freq_energy::{assemble, fixed_data, integrate, EquationSpec, Regularisation};
use vwlab::qsym::{
    build_q, determinant_formula, eig_range, q0_determinant, recursive_layers, sum_layers,
    DetConstant, EigenTuple,
};
use vwlab::quad::simpson;

fn tuple(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn friedrichs_mass_is_one(radius in 0.2..5.0f64) {
        let m = Mollifier::friedrichs(radius).unwrap();
        let mass = simpson(|t| m.eval(t), -radius, radius, 4096);
        prop_assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn regularised_jump_stays_between_levels(
        left in -3.0..3.0f64, right in -3.0..3.0f64, eps in 0.01..0.5f64, t in 0.0..2.0f64,
    ) {
        let d = TimeDistribution::new(2.0).unwrap()
            .with(Term::Jump { at: 1.0, left, right }).unwrap();
        let a = regularise(&d, &Mollifier::phi1(), eps, ScaleNet::Identity).unwrap();
        let v = a.eval(t);
        prop_assert!(v >= left.min(right) - 1e-12 && v <= left.max(right) + 1e-12);
    }

    #[test]
    fn regularised_dirac_has_unit_mass(eps in 0.02..0.3f64) {
        let d = TimeDistribution::dirac(2.0, 1.0).unwrap();
        let a = regularise(&d, &Mollifier::phi1(), eps, ScaleNet::Identity).unwrap();
        let mass = simpson(|t| a.eval(t), 1.0 - eps, 1.0 + eps, 4096);
        prop_assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn log_net_width_decreases(e1 in 0.001..0.5f64, f in 0.05..0.95f64) {
        let net = ScaleNet::log_power(1.0, 1.0).unwrap();
        prop_assert!(net.omega(e1 * f) < net.omega(e1));
    }

    #[test]
    fn quasi_symmetriser_is_symmetric_psd(lam in tuple(3), delta in 0.0..1.0f64) {
        let lam = EigenTuple::new(lam).unwrap();
        let q = build_q(delta, &lam).unwrap();
        let scale = q.q.amax().max(1.0);
        prop_assert!((&q.q - q.q.transpose()).amax() <= 1e-12 * scale);
        prop_assert!(eig_range(&q.q).0 >= -1e-9 * scale);
        let summed = sum_layers(&recursive_layers(&lam), delta);
        prop_assert!((&q.q - summed).amax() <= 1e-10 * scale);
    }

    #[test]
    fn determinant_matches_factorial_power(lam in tuple(4)) {
        let lam = EigenTuple::new(lam).unwrap();
        let det = q0_determinant(&lam).unwrap();
        let want = determinant_formula(&lam, DetConstant::FactorialPower);
        prop_assert!((det - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn frequency_solution_is_linear_in_data(scale in -5.0..5.0f64, xi in 0.5..6.0f64) {
        let base = EquationSpec::heaviside(1.5, 1.0).unwrap();
        let one = base.clone().with_data(
            fixed_data(|_| 1.0.into()),
            fixed_data(|_| 0.5.into()),
        );
        let scaled = base.with_data(
            fixed_data(move |_| scale.into()),
            fixed_data(move |_| (0.5 * scale).into()),
        );
        let reg = Regularisation::logarithmic();
        let s1 = assemble(&one, 0.1, &reg, &[xi]).unwrap();
        let s2 = assemble(&scaled, 0.1, &reg, &[xi]).unwrap();
        let dt = s1.resolved_dt();
        let (t1, t2) = (integrate(&s1, dt, 0.5).unwrap(), integrate(&s2, dt, 0.5).unwrap());
        let v1 = t1.v.last().unwrap() * num_complex::Complex64::from(scale);
        let v2 = t2.v.last().unwrap();
        prop_assert!((v1 - v2).norm() <= 1e-12 * (1.0 + v2.norm()));
        prop_assert!(t2.energy.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn lax_friedrichs_conserves_mass(a in 0.0..4.0f64, courant in 0.05..1.0f64, n in 1usize..5) {
        let g = Grid1D::new(0.0, 2.0, 128).unwrap();
        let f = SolutionField::init(
            g,
            |x| (PI * x).sin(),
            |x| 0.5 + (n as f64 * PI * x).cos(),
            None,
        );
        let dt = if a > 0.0 { courant * g.dx / a.sqrt() } else { courant * g.dx };
        let mass = |s: &SolutionField| s.v.iter().sum::<f64>() * g.dx;
        let m0 = mass(&f);
        let mut s = f;
        for _ in 0..20 {
            s = lf_step(&s, a, dt).unwrap();
        }
        prop_assert!((mass(&s) - m0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_monotone_in_order(c in prop::collection::vec(-1.0..1.0f64, 4)) {
        let g = Grid1D::new(0.0, 2.0, 64).unwrap();
        let u: Vec<f64> = g.points().iter().map(|&x| {
            c.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * PI * x).sin()).sum()
        }).collect();
        let mut prev = 0.0;
        for s in 0..=5 {
            let n = sobolev_norm(&u, 2.0, s).unwrap();
            prop_assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn exact_solution_periodic_and_continuous(t in 0.0..3.0f64, x in 0.0..2.0f64) {
        let sol = PiecewiseSolution::new(PeriodicData::standard());
        prop_assert!((eval_exact(&sol, t, x) - eval_exact(&sol, t, x + 2.0)).abs() < 1e-12);
        let below = eval_exact(&sol, 1.0 - 1e-12, x);
        let above = eval_exact(&sol, 1.0 + 1e-12, x);
        prop_assert!((below - above).abs() < 1e-10);
    }

    #[test]
    fn csv_parse_inverts_emit(
        rows in prop::collection::vec((1e-4..1.0f64, "[a-z_]{1,8}", -1e6..1e6f64), 1..12),
    ) {
        let r = StudyResult {
            name: "p".into(),
            provenance: [("study".to_string(), "p".to_string())].into_iter().collect(),
            rows: rows.into_iter().map(|(eps, metric, value)| Row { eps, metric, value }).collect(),
        };
        prop_assert_eq!(parse_csv(&to_csv(&r)).unwrap(), r);
    }
}
