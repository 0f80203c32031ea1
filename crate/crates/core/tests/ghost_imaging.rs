use biphoton_core::engine::agreement_real;
use biphoton_core::{
    classical_coincidence_map, coincidence_map, cross_section, forward_transform,
    ghost_joint_amplitude, mirrored, Aperture64, Arm, CorrelationKernel, Error, Grating64,
    GridSpec, Line, RateMap64, SimulationGrid, SourceModel, TwoArm64, Warning, WidthConvention,
};
use proptest::prelude::*;

fn grating() -> Grating64 {
    Grating64::new(1.0, 3.2, 1.0, 10).unwrap()
}

fn setup(b: Arm<f64>, kernel: CorrelationKernel<f64>, n_x: usize, source: SourceModel) -> TwoArm64 {
    let a = Aperture64::grating(grating());
    let spec = GridSpec {
        n_x,
        ..GridSpec::default()
    };
    let grid = SimulationGrid::for_aperture(&spec, &a).unwrap();
    TwoArm64::new(a, b, kernel, grid, source).unwrap()
}

fn quantum(kernel: CorrelationKernel<f64>, n_x: usize) -> RateMap64 {
    let s = setup(Arm::Open, kernel, n_x, SourceModel::Quantum);
    coincidence_map(&ghost_joint_amplitude(&s).unwrap())
}

fn lattice_pattern(s: &TwoArm64) -> Vec<f64> {
    let grid = s.grid();
    let spec = forward_transform(grid.lattice(), &s.arm_a().sample(&grid.positions(), grid.dx())).unwrap();
    let axis = grid.display_axis();
    (0..axis.len()).map(|i| spec.at(axis.k(i)).unwrap().norm_sqr()).collect()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(0.0, f64::max);
    v.iter().map(|x| x / m).collect()
}

#[test]
fn uncorrelated_pairs_leave_the_open_arm_at_zero_momentum() {
    let r = quantum(CorrelationKernel::Constant, 4096);
    let axis = r.axis;
    let zero = axis.index_of(0).unwrap();
    for i in 0..axis.len() {
        for c in 0..axis.len() {
            if c != zero {
                assert_eq!(r.values[[i, c]], 0.0);
            }
        }
    }
    assert!(r.values.column(zero).iter().any(|&v| v > 0.0));
}

#[test]
fn perfect_correlation_images_the_grating_on_the_open_arm() {
    let s = setup(Arm::Open, CorrelationKernel::Dirac, 4096, SourceModel::Quantum);
    let r = coincidence_map(&ghost_joint_amplitude(&s).unwrap());
    let row = cross_section(&r, Line::Row(0.0)).unwrap();
    let pattern = lattice_pattern(&s);
    let a = agreement_real(&normalized(&row.values), &normalized(&pattern), 1e-10);
    assert!(a.passed, "{a:?}");
    // antidiagonal structure: R(q, q') depends on q + q' only
    let axis = r.axis;
    for i in 1..axis.len() {
        for c in 0..axis.len() - 1 {
            let (u, v) = (r.values[[i, c]], r.values[[i - 1, c + 1]]);
            assert!((u - v).abs() <= 1e-12 * r.max());
        }
    }
}

#[test]
fn fine_lattice_reproduces_closed_form_ghost_pattern() {
    let s = setup(Arm::Open, CorrelationKernel::Dirac, 1 << 19, SourceModel::Quantum);
    let r = coincidence_map(&ghost_joint_amplitude(&s).unwrap());
    let row = cross_section(&r, Line::Row(0.0)).unwrap();
    let g = grating();
    let exact: Vec<f64> = row.q.iter().map(|&q| g.fourier(q).powi(2)).collect();
    let a = agreement_real(&normalized(&row.values), &normalized(&exact), 1e-6);
    assert!(a.passed, "{a:?}");
}

#[test]
fn classical_open_arm_depends_on_momentum_difference() {
    let s = setup(Arm::Open, CorrelationKernel::Constant, 4096, SourceModel::ClassicalMomentumCorrelated);
    let r = classical_coincidence_map(&s).unwrap();
    let pattern = lattice_pattern(&s);
    let axis = r.axis;
    let zero = axis.index_of(0).unwrap();
    for i in 0..axis.len() {
        for c in 0..axis.len() {
            if let Some(d) = axis.index_of(axis.k(i) - axis.k(c)) {
                assert_eq!(r.values[[i, c]], pattern[d]);
            }
        }
    }
    // the quantum image along q' mirrors the classical one along q
    let q = quantum(CorrelationKernel::Dirac, 4096);
    let quantum_cut = normalized(&cross_section(&q, Line::Row(0.0)).unwrap().values);
    let classical_cut = mirrored(&cross_section(&r, Line::Column(0.0)).unwrap());
    assert!(agreement_real(&quantum_cut, &normalized(&classical_cut.values), 1e-10).passed);
    assert_eq!(r.values[[zero, zero]], r.max());
}

#[test]
fn classical_map_with_equal_gratings_is_flat_along_the_diagonal() {
    let b = Arm::Aperture(Aperture64::grating(grating()));
    let s = setup(b, CorrelationKernel::Constant, 2048, SourceModel::ClassicalMomentumCorrelated);
    let r = classical_coincidence_map(&s).unwrap();
    let d = cross_section(&r, Line::Diagonal).unwrap();
    let first = d.values[0];
    assert!(d.values.iter().all(|&v| v == first));
    let a = cross_section(&r, Line::AntiDiagonal).unwrap();
    assert!(a.values.iter().cloned().fold(0.0, f64::max) <= first);
}

#[test]
fn source_model_is_enforced() {
    let s = setup(Arm::Open, CorrelationKernel::Constant, 2048, SourceModel::Quantum);
    assert!(matches!(classical_coincidence_map(&s), Err(Error::InvalidScenario(_))));
    let s = setup(Arm::Open, CorrelationKernel::Constant, 2048, SourceModel::ClassicalMomentumCorrelated);
    assert!(ghost_joint_amplitude(&s).is_err());
}

#[test]
fn coarse_lattice_warns_about_scan_truncation() {
    // dx = 0.1 is close to the s/8 limit, so the slit spectrum still
    // carries weight near the lattice edge
    let s = setup(Arm::Open, CorrelationKernel::Constant, 2048, SourceModel::ClassicalMomentumCorrelated);
    let r = classical_coincidence_map(&s).unwrap();
    assert!(r.warnings.iter().any(|w| matches!(w, Warning::ScanTruncation { .. })));
}

#[test]
fn cross_sections_interpolate_and_refuse_outside_window() {
    let r = quantum(CorrelationKernel::Dirac, 4096);
    let axis = r.axis;
    let step = axis.dq() / axis.q_unit();
    let a = cross_section(&r, Line::Row(0.0)).unwrap();
    let b = cross_section(&r, Line::Row(step)).unwrap();
    let mid = cross_section(&r, Line::Row(0.5 * step)).unwrap();
    for i in 0..mid.len() {
        let expected = 0.5 * (a.values[i] + b.values[i]);
        assert!((mid.values[i] - expected).abs() <= 1e-15 * r.max());
    }
    let err = cross_section(&r, Line::Column(9.0)).unwrap_err();
    assert!(matches!(err, Error::OutsideWindow { line: "q'", .. }));
    let zeros = RateMap64 {
        values: r.values.mapv(|_| 0.0),
        ..r.clone()
    };
    let z = cross_section(&zeros, Line::Column(0.25)).unwrap();
    assert!(z.values.iter().all(|&v| v == 0.0));
}

#[test]
fn partial_correlation_blurs_the_ghost_image() {
    let sharp = quantum(CorrelationKernel::Dirac, 4096);
    let k = CorrelationKernel::gaussian(1.0, 3.2, WidthConvention::Fwhm).unwrap();
    let blurred = quantum(k, 4096);
    // the kernel spectrum weights q' as an envelope over the orders
    let first_order = |m: &RateMap64| {
        let row = cross_section(m, Line::Row(0.0)).unwrap();
        let at = |q: f64| row.values[row.q_normalized().iter().position(|x| (x - q).abs() < 1e-9).unwrap()];
        at(1.0) / at(0.0)
    };
    assert!(first_order(&blurred) < 0.9 * first_order(&sharp));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lattice_rows_are_copied_exactly(i in 0usize..80) {
        let r = quantum(CorrelationKernel::Dirac, 2048);
        let i = i.min(r.axis.len() - 1);
        let q = r.axis.q_normalized(i);
        let row = cross_section(&r, Line::Row(q)).unwrap();
        prop_assert!(row.values.iter().zip(r.values.row(i)).all(|(a, b)| a == b));
    }
}

#[test]
fn classical_scan_matches_direct_sums() {
    let other = Aperture64::grating(Grating64::new(0.7, 3.2, 1.6, 4).unwrap());
    for b in [Arm::Open, Arm::Aperture(other)] {
        let s = setup(b, CorrelationKernel::Constant, 2048, SourceModel::ClassicalMomentumCorrelated);
        let axis = s.grid().axis(-64, 128);
        let fast = biphoton_core::classical_coincidence_map_on(&s, &axis).unwrap();
        let slow = s.brute_force_classical_map(&axis).unwrap();
        let a = agreement_real(
            fast.values.as_slice().unwrap(),
            slow.values.as_slice().unwrap(),
            1e-8,
        );
        assert!(a.passed, "{a:?}");
    }
}
