use vwlab::experiments::{
    consistency_study, convergence_study, emit, moderateness_study, strictly_decreasing, to_csv,
    trends, ExperimentConfig, Format, ModerateCase,
};
use vwlab::fd_solver::Grid1D;

// dx must stay below the smallest eps/10 or LF runs below Courant 1 and smears.
fn coarse() -> ExperimentConfig {
    ExperimentConfig {
        grid: Grid1D::new(0.0, 2.0, 1000).unwrap(),
        eps_list: vec![0.1, 0.05, 0.025],
        ..Default::default()
    }
}

#[test]
fn heaviside_errors_fall_on_a_coarse_grid() {
    let r = convergence_study(&coarse()).unwrap();
    assert!(strictly_decreasing(&r.series("l2_error")), "{:?}", r.series("l2_error"));
    assert!(trends(&r).iter().all(|c| c.pass));
}

#[test]
fn constant_coefficient_error_does_not_depend_on_eps() {
    let cfg = ExperimentConfig {
        smooth_coefficient: vec![1.0],
        ..coarse()
    };
    let r = consistency_study(&cfg).unwrap();
    let err = r.series("l2_error");
    let (lo, hi) = err
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
    assert!(hi / lo - 1.0 <= 0.02, "{err:?}");
    assert!(r.series("mollifier_gap").iter().all(|p| p.1 < 1e-9));
}

#[test]
fn moderateness_fit_is_finite() {
    let cfg = ExperimentConfig {
        xi_list: vec![3.0, 10.0, 30.0],
        ..coarse()
    };
    for case in [ModerateCase::Analytic, ModerateCase::GevreyNet] {
        let r = moderateness_study(&cfg, case).unwrap();
        assert_eq!(r.rows.len(), 9);
        assert!(trends(&r)[0].pass, "{:?}", r.provenance);
    }
}

#[test]
fn emitted_svg_has_one_polyline_per_metric() {
    let r = convergence_study(&coarse()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit(&r, dir.path(), &[Format::Csv, Format::Svg], None).unwrap();
    let svg = std::fs::read_to_string(&files[1]).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .collect();
    assert_eq!(lines.len(), r.metrics().len());
    for l in lines {
        assert_eq!(l.attribute("points").unwrap().split(' ').count(), 3);
    }
    let only = vec!["l2_error".to_string()];
    let files = emit(&r, dir.path(), &[Format::Svg], Some(&only)).unwrap();
    let svg = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = to_csv(&convergence_study(&coarse()).unwrap());
    let b = to_csv(&convergence_study(&coarse()).unwrap());
    assert_eq!(a, b);
}

#[test]
fn unwritable_output_is_io_error() {
    let r = convergence_study(&ExperimentConfig {
        eps_list: vec![0.1],
        ..coarse()
    })
    .unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    let err = emit(&r, &file.path().join("sub"), &[Format::Csv], None).unwrap_err();
    assert!(matches!(err, vwlab::Error::Io { .. }), "{err:?}");
}
