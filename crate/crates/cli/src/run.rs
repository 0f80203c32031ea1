//! Runs one scenario and writes its outputs.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use biphoton_core::engine::{agreement, agreement_real, Agreement};
use biphoton_core::{
    classical_coincidence_map, classical_coincidence_map_on, coincidence_map, cross_section,
    diagonal_cut, envelope_fwhm, forward_transform, ghost_joint_amplitude, one_photon_marginal,
    r_sweep, sweep_kernel, visibility, Aperture64, Arm, CutSign, Grid64, Line, Profile64,
    RateMap64, RateProfile, Scenario64, SimulationGrid, SourceModel, TwoArm64,
};

use crate::config::{Geometry, LoadedConfig, OutputNormalization};
use crate::error::CliError;
use crate::manifest::{GridInfo, OracleReport, RunManifest};
use crate::output::{sha256_hex, Writer};

/// Points per axis of the window the oracle is checked on.
pub const ORACLE_POINTS: usize = 128;
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Half-width of the fringe-visibility window in units of `q0`: the
/// central three fringe periods.
pub const VISIBILITY_LIMIT: f64 = 1.5;
/// Neighbourhood a principal maximum must dominate, in units of `q0`.
pub const PEAK_HALF_WINDOW: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub oracle: bool,
    pub resolution: Option<usize>,
}

struct Run {
    writer: Writer,
    normalization: OutputNormalization,
    warnings: Vec<String>,
    metrics: BTreeMap<String, f64>,
    oracle: Vec<OracleReport>,
}

impl Run {
    fn note<I: IntoIterator<Item = String>>(&mut self, w: I) {
        for w in w {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    fn metric(&mut self, key: &str, v: Option<f64>) {
        if let Some(v) = v.filter(|v| v.is_finite()) {
            self.metrics.insert(key.into(), v);
        }
    }

    fn map(&mut self, stem: &str, m: &RateMap64) -> Result<(), CliError> {
        self.note(m.warnings.iter().map(|w| w.to_string()));
        match self.normalization {
            OutputNormalization::Peak => self.writer.map(stem, &m.peak_normalized()),
            OutputNormalization::Raw => self.writer.map(stem, m),
        }
    }

    fn profile(&mut self, stem: &str, p: &Profile64, title: &str) -> Result<(), CliError> {
        self.note(p.warnings.iter().map(|w| w.to_string()));
        match self.normalization {
            OutputNormalization::Peak => self.writer.profile(stem, &p.peak_normalized(), title),
            OutputNormalization::Raw => self.writer.profile(stem, p, title),
        }
    }

    fn check(&mut self, label: String, a: Agreement) {
        self.oracle.push(OracleReport {
            label,
            points: ORACLE_POINTS,
            max_rel: a.max_rel,
            max_abs_near_zero: a.max_abs_near_zero,
            passed: a.passed,
        });
    }
}

fn oracle_axis(grid: &Grid64) -> biphoton_core::QAxis<f64> {
    grid.axis(-(ORACLE_POINTS as i64 / 2), ORACLE_POINTS)
}

fn same_object_oracle(run: &mut Run, s: &Scenario64, label: String) -> Result<(), CliError> {
    let axis = oracle_axis(s.grid());
    let fast = s.joint_amplitude_on(&axis)?;
    let slow = s.brute_force_joint(&axis)?;
    let a = agreement(fast.values.iter().copied().zip(slow.values.iter().copied()), ORACLE_TOLERANCE);
    run.check(label, a);
    Ok(())
}

fn same_object(run: &mut Run, s: &Scenario64, cfg: &LoadedConfig, oracle: bool) -> Result<(), CliError> {
    let map = coincidence_map(&s.joint_amplitude()?);
    let marginal = one_photon_marginal(&map);
    let diagonal = diagonal_cut(&map, CutSign::Plus);
    let anti = diagonal_cut(&map, CutSign::Minus);
    run.map("coincidence", &map)?;
    run.profile("marginal", &marginal, "one-photon rate R1(q)")?;
    run.profile("diagonal", &diagonal, "coincidence rate along q' = q")?;
    run.profile("antidiagonal", &anti, "coincidence rate along q' = -q")?;
    run.metric("marginal_visibility", Some(visibility(&marginal, VISIBILITY_LIMIT)));
    run.metric("diagonal_envelope_fwhm", envelope_fwhm(&diagonal, PEAK_HALF_WINDOW));
    if oracle {
        same_object_oracle(run, s, "joint amplitude".into())?;
    }

    let Some(sweep) = &cfg.config.sweep else {
        return Ok(());
    };
    let points = r_sweep(s, &sweep.r)?;
    let mut rows = Vec::new();
    for p in &points {
        run.writer.profile(&format!("marginal_r{}", p.r), &p.marginal, &format!("R1(q), r = {}", p.r))?;
        run.writer.profile(&format!("diagonal_r{}", p.r), &p.diagonal, &format!("R2(q, q), r = {}", p.r))?;
        rows.push(vec![p.r, visibility(&p.marginal, VISIBILITY_LIMIT)]);
        if oracle {
            same_object_oracle(run, &s.with_kernel(sweep_kernel(s, p.r)?), format!("joint amplitude, r = {}", p.r))?;
        }
    }
    run.writer.table("sweep", &["r", "marginal_visibility"], &rows)?;
    let label = |p: &biphoton_core::SweepPoint<f64>| format!("r = {}", p.r);
    let diag: Vec<_> = points.iter().map(|p| (label(p), &p.diagonal)).collect();
    run.writer.overlay("sweep_diagonal", &diag, "R2(q, q) across r")?;
    let marg: Vec<_> = points.iter().map(|p| (label(p), &p.marginal)).collect();
    run.writer.overlay("sweep_marginal", &marg, "R1(q) across r")?;
    Ok(())
}

fn ghost_quantum(run: &mut Run, s: &TwoArm64, oracle: bool) -> Result<(), CliError> {
    let map = coincidence_map(&ghost_joint_amplitude(s)?);
    run.map("coincidence", &map)?;
    run.profile("section_q0", &cross_section(&map, Line::Row(0.0))?, "R2(0, q') against q'")?;
    if oracle {
        let axis = oracle_axis(s.grid());
        let fast = s.joint_amplitude_on(&axis)?;
        let slow = s.brute_force_joint(&axis)?;
        let a = agreement(fast.values.iter().copied().zip(slow.values.iter().copied()), ORACLE_TOLERANCE);
        run.check("two-arm joint amplitude".into(), a);
    }
    Ok(())
}

fn classical_oracle(run: &mut Run, s: &TwoArm64) -> Result<(), CliError> {
    let axis = oracle_axis(s.grid());
    let fast = classical_coincidence_map_on(s, &axis)?;
    let slow = s.brute_force_classical_map(&axis)?;
    let a = agreement_real(
        fast.values.as_slice().unwrap_or_default(),
        slow.values.as_slice().unwrap_or_default(),
        ORACLE_TOLERANCE,
    );
    run.check("classical scan".into(), a);
    Ok(())
}

fn ghost_classical(run: &mut Run, s: &TwoArm64, oracle: bool) -> Result<(), CliError> {
    let map = classical_coincidence_map(s)?;
    run.map("coincidence", &map)?;
    run.profile("section_q0", &cross_section(&map, Line::Row(0.0))?, "R2(0, q') against q'")?;
    if oracle {
        classical_oracle(run, s)?;
    }
    Ok(())
}

/// `|F[A](q)|^2` on the display window.
fn one_arm_pattern(grid: &Grid64, a: &Aperture64) -> Result<Profile64, CliError> {
    let spec = forward_transform(grid.lattice(), &a.sample(&grid.positions(), grid.dx()))?;
    let axis = grid.display_axis();
    let values = (0..axis.len())
        .map(|i| spec.at(axis.k(i)).map(|v| v.norm_sqr()).unwrap_or(0.0))
        .collect();
    Ok(RateProfile::new(axis.values(), axis.q_unit(), values))
}

fn same_object_classical(run: &mut Run, s: &TwoArm64, oracle: bool) -> Result<(), CliError> {
    let map = classical_coincidence_map(s)?;
    let diagonal = cross_section(&map, Line::Diagonal)?;
    let anti = cross_section(&map, Line::AntiDiagonal)?;
    let pattern = one_arm_pattern(s.grid(), s.arm_a())?;
    run.map("coincidence", &map)?;
    run.profile("diagonal", &diagonal, "R2 along q' = q")?;
    run.profile("antidiagonal", &anti, "R2 along q' = -q")?;
    run.profile("pattern", &pattern, "one-arm pattern R_A(q)")?;
    run.metric("antidiagonal_envelope_fwhm", envelope_fwhm(&anti, PEAK_HALF_WINDOW));
    run.metric("pattern_envelope_fwhm", envelope_fwhm(&pattern, PEAK_HALF_WINDOW));
    if oracle {
        classical_oracle(run, s)?;
    }
    Ok(())
}

/// Computes everything the config asks for, writes the files and returns
/// the manifest (not yet saved).
pub fn run(cfg: &LoadedConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let c = &cfg.config;
    let aperture = cfg.aperture()?;
    let kernel = cfg.kernel(&aperture)?;
    let spec = cfg.grid_spec(opts.resolution);
    let mut run = Run {
        writer: Writer::new(&opts.out_dir, &c.output.formats)?,
        normalization: c.output.normalization,
        warnings: Vec::new(),
        metrics: BTreeMap::new(),
        oracle: Vec::new(),
    };

    let grid = match c.geometry {
        Geometry::SameObject => {
            let s = Scenario64::with_spec(aperture, kernel, &spec)?;
            same_object(&mut run, &s, cfg, opts.oracle)?;
            *s.grid()
        }
        g => {
            let grid = SimulationGrid::for_aperture(&spec, &aperture)?;
            let (arm_b, source) = match g {
                Geometry::GhostQuantum => (Arm::Open, SourceModel::Quantum),
                Geometry::GhostClassical => (Arm::Open, SourceModel::ClassicalMomentumCorrelated),
                _ => (Arm::Aperture(aperture.clone()), SourceModel::ClassicalMomentumCorrelated),
            };
            let s = TwoArm64::new(aperture, arm_b, kernel, grid, source)?;
            match g {
                Geometry::GhostQuantum => ghost_quantum(&mut run, &s, opts.oracle)?,
                Geometry::GhostClassical => ghost_classical(&mut run, &s, opts.oracle)?,
                _ => same_object_classical(&mut run, &s, opts.oracle)?,
            }
            grid
        }
    };

    Ok(RunManifest {
        tool: "biphoton".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: cfg.name.clone(),
        geometry: c.geometry,
        config_sha256: sha256_hex(cfg.text.as_bytes()),
        grid: GridInfo {
            n_x: grid.n(),
            window_um: grid.window(),
            dx_um: grid.dx(),
            dq_per_um: grid.dq(),
            q0_per_um: grid.q0(),
            q_points: grid.display_axis().len(),
        },
        normalization: c.output.normalization,
        outputs: run.writer.emitted,
        warnings: run.warnings,
        metrics: run.metrics,
        oracle: run.oracle,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// [`run`], then saves the manifest. Fails with an oracle error after
/// saving when the fast path disagreed with the direct sums.
pub fn simulate(cfg: &LoadedConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let m = run(cfg, opts)?;
    m.save(&opts.out_dir)?;
    if let Some(bad) = m.oracle.iter().find(|o| !o.passed) {
        return Err(CliError::Oracle(format!(
            "{}: max relative error {:.3e}, near-zero error {:.3e}",
            bad.label, bad.max_rel, bad.max_abs_near_zero
        )));
    }
    Ok(m)
}
