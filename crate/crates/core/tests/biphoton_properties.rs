use biphoton_core::engine::{agreement, agreement_real};
use biphoton_core::{
    coincidence_map, diagonal_cut, first_order_coherence, forward_transform, one_photon_marginal,
    principal_maxima, r_sweep, spacings, visibility, Aperture64, CorrelationKernel, CutSign, Error,
    Grating64, GridSpec, Scenario32, Scenario64, SimulationGrid, Warning, WidthConvention,
    WindowSpec,
};
use num_complex::Complex;
use proptest::prelude::*;

fn grating(n: usize) -> Aperture64 {
    Aperture64::grating(Grating64::new(1.0, 3.2, 1.0, n).unwrap())
}

fn spec(n_x: usize) -> GridSpec<f64> {
    GridSpec {
        n_x,
        ..GridSpec::default()
    }
}

fn gaussian(r: f64) -> CorrelationKernel<f64> {
    CorrelationKernel::gaussian(r, 3.2, WidthConvention::Fwhm).unwrap()
}

fn scenario(slits: usize, kernel: CorrelationKernel<f64>, n_x: usize) -> Scenario64 {
    Scenario64::with_spec(grating(slits), kernel, &spec(n_x)).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn lattice_transform_matches_closed_form_at_principal_maxima() {
    // the Riemann sum of a box with half-weight edges is the exact transform
    // times (q dx/2) cot(q dx/2), so dx must be small for 1e-8
    let g = Grating64::new(1.0, 3.2, 1.0, 10).unwrap();
    let grid = SimulationGrid::new(1 << 22, 204.8, Some(g.q0()), 2.5).unwrap();
    let a = Aperture64::grating(g);
    let spec = forward_transform(grid.lattice(), &a.sample(&grid.positions(), grid.dx())).unwrap();
    let per_order = (g.q0() / grid.dq()).round() as i64;
    for m in -2i64..=2 {
        let k = m * per_order;
        let got = spec.at(k).unwrap();
        let exact = g.fourier(k as f64 * grid.dq());
        assert!(got.im.abs() <= 1e-12 * exact.abs());
        assert!(((got.re - exact) / exact).abs() <= 1e-8, "order {m}: {} vs {exact}", got.re);
    }
}

#[test]
fn parseval_for_closed_form_grating() {
    let g = Grating64::new(1.3, 3.2, 1.0, 10).unwrap();
    let expected = 10.0 * 1.0 * 1.3 * 1.3;
    // trapezoid over |q| <= Q with the oscillation-averaged 1/q^2 tail added
    let q_max = 5000.0 * g.q0();
    let h = g.q0() / 400.0;
    let steps = (q_max / h).round() as usize;
    let f = |q: f64| g.fourier(q).powi(2);
    let mut integral = 0.5 * (f(0.0) + f(q_max));
    for i in 1..steps {
        integral += f(i as f64 * h);
    }
    integral *= 2.0 * h;
    let half = steps / 2;
    let avg: f64 = (half..steps)
        .map(|i| {
            let q = i as f64 * h;
            f(q) * q * q
        })
        .sum::<f64>()
        / (steps - half) as f64;
    integral += 2.0 * avg / q_max;
    assert!(((integral - expected) / expected).abs() <= 1e-6, "{integral} vs {expected}");
}

#[test]
fn constant_kernel_is_separable() {
    let s = scenario(4, CorrelationKernel::Constant, 2048);
    let f = s.joint_amplitude().unwrap();
    let one = forward_transform(s.grid().lattice(), &s.samples()).unwrap();
    let axis = f.axis;
    let pairs = (0..axis.len()).flat_map(|i| {
        let one = &one;
        let f = &f;
        (0..axis.len()).map(move |c| {
            let expected = one.at(axis.k(i)).unwrap() * one.at(axis.k(c)).unwrap();
            (f.values[[i, c]], expected)
        })
    });
    let a = agreement(pairs, 1e-12);
    assert!(a.passed, "{a:?}");
}

#[test]
fn dirac_kernel_depends_only_on_total_momentum() {
    let s = scenario(4, CorrelationKernel::Dirac, 2048);
    let f = s.joint_amplitude().unwrap();
    let sq = forward_transform(s.grid().lattice(), &s.square_samples()).unwrap();
    let axis = f.axis;
    let root = (2.0 * std::f64::consts::PI).sqrt();
    let mut pairs = Vec::new();
    for i in 0..axis.len() {
        for c in 0..axis.len() {
            let total = axis.k(i) + axis.k(c);
            if let Some(v) = sq.at(total) {
                pairs.push((f.values[[i, c]], v / root));
            }
        }
    }
    let a = agreement(pairs, 1e-12);
    assert!(a.passed, "{a:?}");
    // antidiagonal steps leave the value unchanged
    let len = axis.len();
    for i in 1..len {
        for c in 0..len - 1 {
            let d = (f.values[[i, c]] - f.values[[i - 1, c + 1]]).norm();
            assert!(d <= 1e-12 * f.values[[i, c]].norm().max(1e-300) + 1e-300);
        }
    }
}

#[test]
fn coincidence_maps_are_symmetric_and_even() {
    for k in [CorrelationKernel::Constant, CorrelationKernel::Dirac, gaussian(0.7)] {
        let s = scenario(5, k, 2048);
        let r = coincidence_map(&s.joint_amplitude().unwrap());
        let len = r.axis.len();
        let peak = r.max();
        for i in 0..len {
            for c in 0..len {
                assert_eq!(r.values[[i, c]], r.values[[c, i]]);
                let flipped = r.values[[len - 1 - i, len - 1 - c]];
                assert!((r.values[[i, c]] - flipped).abs() <= 1e-12 * peak);
                assert!(r.values[[i, c]] >= 0.0);
            }
        }
        // maximum on the diagonal at the origin
        let mid = len / 2;
        assert!(r.values[[mid, mid]] >= peak * (1.0 - 1e-12));
    }
}

#[test]
fn marginal_matches_brute_force_sum_over_full_lattice() {
    for k in [CorrelationKernel::Constant, CorrelationKernel::Dirac, gaussian(1.0), gaussian(0.2)] {
        let s = scenario(2, k.clone(), 256);
        let full = s.grid().full_axis();
        let fast = one_photon_marginal(&coincidence_map(&s.joint_amplitude().unwrap()));
        let slow = coincidence_map(&s.brute_force_joint(&full).unwrap());
        let dq = s.grid().dq();
        let brute: Vec<f64> = slow.values.rows().into_iter().map(|r| r.sum() * dq).collect();
        let offset = (s.grid().display_axis().k_min() - full.k_min()) as usize;
        let window = &brute[offset..offset + fast.len()];
        let a = agreement_real(&fast.values, window, 1e-6);
        assert!(a.passed, "{k:?}: {a:?}");
    }
}

#[test]
fn plancherel_on_the_joint_amplitude() {
    for k in [gaussian(0.5), gaussian(3.0), CorrelationKernel::Constant] {
        let s = scenario(2, k.clone(), 256);
        let a = s.samples();
        let grid = s.grid();
        let dx = grid.dx();
        let mut object = 0.0;
        for (j, aj) in a.iter().enumerate() {
            for (l, al) in a.iter().enumerate() {
                let g = k.eval(grid.x(j) - grid.x(l)).unwrap();
                object += (aj * al * g).norm_sqr();
            }
        }
        object *= dx * dx;
        let full = grid.full_axis();
        let f = s.joint_amplitude_on(&full).unwrap();
        let dq = grid.dq();
        let far: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dq * dq;
        assert!(((far - object) / object).abs() <= 1e-6, "{k:?}: {far} vs {object}");
        // the same total from the full-lattice row powers
        let rows: f64 = f.row_power.as_ref().unwrap().iter().sum::<f64>() * dq;
        assert!(((rows - object) / object).abs() <= 1e-6);
    }
}

#[test]
fn halving_dx_leaves_normalized_diagonal_unchanged() {
    for k in [CorrelationKernel::Constant, CorrelationKernel::Dirac, gaussian(1.0)] {
        let s = scenario(10, k.clone(), 16384);
        let fine = s.with_grid(s.grid().with_resolution(32768).unwrap()).unwrap();
        let cut = |s: &Scenario64| {
            diagonal_cut(&coincidence_map(&s.joint_amplitude().unwrap()), CutSign::Plus)
                .peak_normalized()
                .values
        };
        let d = max_abs_diff(&cut(&s), &cut(&fine));
        assert!(d <= 1e-4, "{k:?}: {d}");
    }
}

#[test]
fn dirac_diagonal_halves_the_fringe_period() {
    let classical = scenario(10, CorrelationKernel::Constant, 16384);
    let quantum = classical.with_kernel(CorrelationKernel::Dirac);
    let step = classical.grid().dq() / classical.grid().q_unit();
    let fringe = |s: &Scenario64| {
        let cut = diagonal_cut(&coincidence_map(&s.joint_amplitude().unwrap()), CutSign::Plus);
        let peaks = principal_maxima(&cut.restricted(2.2), 0.3);
        spacings(&peaks)
    };
    let c = fringe(&classical);
    let q = fringe(&quantum);
    assert!(!c.is_empty() && !q.is_empty());
    assert!(c.iter().all(|s| (s - 1.0).abs() <= step), "{c:?}");
    assert!(q.iter().all(|s| (s - 0.5).abs() <= step), "{q:?}");
}

#[test]
fn dirac_marginal_is_exactly_flat_and_constant_marginal_is_classical() {
    let s = scenario(10, CorrelationKernel::Dirac, 16384);
    let m = one_photon_marginal(&coincidence_map(&s.joint_amplitude().unwrap()));
    let first = m.values[0];
    assert!(m.values.iter().all(|&v| v == first));
    assert_eq!(visibility(&m, 1.5), 0.0);

    let s = s.with_kernel(CorrelationKernel::Constant);
    let r = coincidence_map(&s.joint_amplitude().unwrap());
    let m = one_photon_marginal(&r).peak_normalized();
    let one = forward_transform(s.grid().lattice(), &s.samples()).unwrap();
    let axis = r.axis;
    let pattern: Vec<f64> = (0..axis.len()).map(|i| one.at(axis.k(i)).unwrap().norm_sqr()).collect();
    let peak = pattern.iter().cloned().fold(0.0, f64::max);
    let pattern: Vec<f64> = pattern.iter().map(|v| v / peak).collect();
    assert!(agreement_real(&m.values, &pattern, 1e-12).passed);
    // R2(q, q) = R1(q)^2 after normalization
    let diag = diagonal_cut(&r, CutSign::Plus).peak_normalized();
    let sq: Vec<f64> = m.values.iter().map(|v| v * v).collect();
    assert!(agreement_real(&diag.values, &sq, 1e-12).passed);
    // zeros of the classical pattern are zeros of the diagonal
    for (d, p) in diag.values.iter().zip(&pattern) {
        if *p < 1e-12 {
            assert!(*d < 1e-20);
        }
    }
}

#[test]
fn dirac_antidiagonal_is_flat() {
    let s = scenario(10, CorrelationKernel::Dirac, 4096);
    let cut = diagonal_cut(&coincidence_map(&s.joint_amplitude().unwrap()), CutSign::Minus);
    let first = cut.values[0];
    assert!(cut.values.iter().all(|v| ((v - first) / first).abs() < 1e-12));
}

#[test]
fn partial_correlation_gives_partial_visibility() {
    let base = scenario(10, gaussian(0.78), 16384);
    let vis = |k: CorrelationKernel<f64>| {
        let s = base.with_kernel(k);
        visibility(&one_photon_marginal(&coincidence_map(&s.joint_amplitude().unwrap())), 1.5)
    };
    let quantum = vis(CorrelationKernel::Dirac);
    let partial = vis(gaussian(0.78));
    let classical = vis(CorrelationKernel::Constant);
    assert!(quantum < partial && partial < classical, "{quantum} {partial} {classical}");
    // regression value of the fringe visibility at r = 0.78
    assert!((partial - 0.29).abs() < 0.2, "{partial}");
}

#[test]
fn sweep_profiles_move_from_quantum_to_classical() {
    let base = scenario(10, CorrelationKernel::Dirac, 16384);
    let rs = [0.05, 0.1, 1.0, 2.0, 5.0];
    let sweep = r_sweep(&base, &rs).unwrap();
    let reference = |k: CorrelationKernel<f64>| {
        diagonal_cut(&coincidence_map(&base.with_kernel(k).joint_amplitude().unwrap()), CutSign::Plus)
            .peak_normalized()
            .restricted(2.0)
            .values
    };
    let quantum = reference(CorrelationKernel::Dirac);
    let classical = reference(CorrelationKernel::Constant);
    let to_q: Vec<f64> = sweep
        .iter()
        .map(|p| max_abs_diff(&p.diagonal.restricted(2.0).values, &quantum))
        .collect();
    let to_c: Vec<f64> = sweep
        .iter()
        .map(|p| max_abs_diff(&p.diagonal.restricted(2.0).values, &classical))
        .collect();
    assert!(to_q.windows(2).all(|w| w[0] <= w[1]), "{to_q:?}");
    // the half-order peak first grows slightly, so only the broad end is monotone
    assert!(to_c[2..].windows(2).all(|w| w[0] >= w[1]), "{to_c:?}");
    assert!(to_c[4] < to_c[0], "{to_c:?}");
    // the half-order peak at q = q0/2 sits between the two extremes
    let half_order = |i: usize| {
        let p = &sweep[i].diagonal;
        let k = p.q_normalized().iter().position(|q| (q - 0.5).abs() < 1e-9).unwrap();
        p.values[k]
    };
    let (lo, mid, hi) = (half_order(4), half_order(2), half_order(0));
    assert!(lo < mid && mid < hi, "{lo} {mid} {hi}");
    assert!(r_sweep(&base, &[1.0, -1.0]).is_err());
}

#[test]
fn coherence_is_hermitian_and_factorizes_without_correlation() {
    let s = scenario(3, CorrelationKernel::Constant, 1024);
    let g = first_order_coherence(&s).unwrap();
    let m = g.x.len();
    assert!(m > 0);
    for i in 0..m {
        assert!(g.values[[i, i]].im == 0.0 && g.values[[i, i]].re >= 0.0);
        for j in 0..m {
            let h = g.values[[i, j]] - g.values[[j, i]].conj();
            assert!(h.norm() <= 1e-12);
            let lhs = g.values[[i, j]].norm_sqr();
            let rhs = g.values[[i, i]].re * g.values[[j, j]].re;
            assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(1e-300), "{i} {j}");
        }
    }

    let partial = first_order_coherence(&s.with_kernel(gaussian(0.5))).unwrap();
    for i in 0..m {
        for j in 0..m {
            let h = partial.values[[i, j]] - partial.values[[j, i]].conj();
            assert!(h.norm() <= 1e-12);
        }
    }
    // partial correlation breaks the factorization somewhere
    let broken = (0..m).any(|i| {
        (0..m).any(|j| {
            let lhs = partial.values[[i, j]].norm_sqr();
            let rhs = partial.values[[i, i]].re * partial.values[[j, j]].re;
            (lhs - rhs).abs() > 1e-3 * rhs
        })
    });
    assert!(broken);
}

#[test]
fn perfect_correlation_is_incoherent() {
    let s = scenario(3, CorrelationKernel::Dirac, 1024);
    let g = first_order_coherence(&s).unwrap();
    let m = g.x.len();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                assert_eq!(g.values[[i, j]], Complex::new(0.0, 0.0));
            }
        }
    }
    let top = g.values.diag().iter().map(|v| v.re).fold(0.0, f64::max);
    assert_eq!(top, 1.0);
}

#[test]
fn scenario_rejects_coarse_or_tight_grids() {
    let err = Scenario64::with_spec(grating(10), CorrelationKernel::Constant, &spec(512)).unwrap_err();
    assert!(matches!(err, Error::GridTooCoarse { .. }));
    let tight = GridSpec {
        n_x: 4096,
        window: WindowSpec::Explicit(60.0),
        q_window_q0: 2.5,
    };
    assert!(Scenario64::with_spec(grating(10), CorrelationKernel::Constant, &tight).is_err());
}

#[test]
fn opaque_screen_gives_zero_everywhere() {
    let g = Grating64::new(0.0, 3.2, 1.0, 10).unwrap();
    for k in [CorrelationKernel::Constant, CorrelationKernel::Dirac, gaussian(1.0)] {
        let s = Scenario64::with_spec(Aperture64::grating(g), k, &spec(2048)).unwrap();
        let r = coincidence_map(&s.joint_amplitude().unwrap());
        assert!(r.values.iter().all(|&v| v == 0.0));
        let m = one_photon_marginal(&r);
        assert!(m.values.iter().all(|&v| v == 0.0));
        assert!(m.peak_normalized().values.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn windowed_marginal_warns_about_truncation() {
    let s = scenario(10, gaussian(1.0), 4096);
    let mut r = coincidence_map(&s.joint_amplitude().unwrap());
    r.row_totals = None;
    let m = one_photon_marginal(&r);
    assert!(m
        .warnings
        .iter()
        .any(|w| matches!(w, Warning::MarginalTruncation { .. })));
}

#[test]
fn single_precision_runs() {
    let g = biphoton_core::Grating32::new(1.0, 3.2, 1.0, 4).unwrap();
    let spec = GridSpec::<f32> {
        n_x: 2048,
        ..GridSpec::default()
    };
    let k = CorrelationKernel::gaussian(1.0f32, 3.2, WidthConvention::Fwhm).unwrap();
    let s = Scenario32::with_spec(biphoton_core::Aperture32::grating(g), k, &spec).unwrap();
    let s64 = scenario(4, gaussian(1.0), 2048);
    let a = diagonal_cut(&coincidence_map(&s.joint_amplitude().unwrap()), CutSign::Plus)
        .peak_normalized();
    let b = diagonal_cut(&coincidence_map(&s64.joint_amplitude().unwrap()), CutSign::Plus)
        .peak_normalized();
    let a: Vec<f64> = a.values.iter().map(|&v| v as f64).collect();
    let d = max_abs_diff(&a, &b.values);
    assert!(d < 1e-5, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn maps_are_symmetric_and_nonnegative(slits in 1usize..=6, r in 0.05f64..6.0) {
        let s = scenario(slits, gaussian(r), 1024);
        let m = coincidence_map(&s.joint_amplitude().unwrap());
        prop_assert!(m.values.iter().all(|&v| v >= 0.0));
        prop_assert!(m.values == m.values.t());
        let n = m.peak_normalized();
        prop_assert!((n.max() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_kernel_is_even(r in 0.01f64..10.0, dx in -50.0f64..50.0) {
        let k = gaussian(r);
        prop_assert_eq!(k.eval(dx).unwrap(), k.eval(-dx).unwrap());
    }

    #[test]
    fn grating_transform_is_even(slits in 1usize..=12, q in -40.0f64..40.0) {
        let g = Grating64::new(1.0, 3.2, 1.0, slits).unwrap();
        prop_assert_eq!(g.fourier(q), g.fourier(-q));
    }
}
