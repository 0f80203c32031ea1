//! Two-arm geometries: the photons of a pair are split and each meets its
//! own object (or none).

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::aperture::{sample_product, ApertureProfile};
use crate::biphoton::check_object;
use crate::correlation::CorrelationKernel;
use crate::engine::grid::{QAxis, SimulationGrid};
use crate::engine::joint::{joint_spectrum_via, JointInput, KernelPath, SecondArm};
use crate::engine::oracle::{brute_force_joint, ORACLE_MAX_POINTS};
use crate::engine::rates::{JointSpectrum, Normalization, RateMap, RateProfile, Warning};
use crate::engine::transform::forward_transform;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fraction of a one-photon pattern allowed in the outer eighth of the
/// periodic scan lattice on either side.
pub const SCAN_BUDGET: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum Arm<T> {
    /// No object: `B(x') = 1`.
    Open,
    Aperture(ApertureProfile<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceModel {
    /// Correlated photon pairs.
    Quantum,
    /// Two classical beams deflected together by a scanning mirror.
    ClassicalMomentumCorrelated,
}

#[derive(Debug, Clone)]
pub struct TwoArmScenario<T> {
    arm_a: ApertureProfile<T>,
    arm_b: Arm<T>,
    kernel: CorrelationKernel<T>,
    grid: SimulationGrid<T>,
    source: SourceModel,
}

impl<T: Real> TwoArmScenario<T> {
    pub fn new(
        arm_a: ApertureProfile<T>,
        arm_b: Arm<T>,
        kernel: CorrelationKernel<T>,
        grid: SimulationGrid<T>,
        source: SourceModel,
    ) -> Result<Self> {
        check_object(&arm_a, &grid)?;
        if let Arm::Aperture(b) = &arm_b {
            check_object(b, &grid)?;
        }
        Ok(Self {
            arm_a,
            arm_b,
            kernel,
            grid,
            source,
        })
    }

    pub fn arm_a(&self) -> &ApertureProfile<T> {
        &self.arm_a
    }

    pub fn arm_b(&self) -> &Arm<T> {
        &self.arm_b
    }

    pub fn kernel(&self) -> &CorrelationKernel<T> {
        &self.kernel
    }

    pub fn grid(&self) -> &SimulationGrid<T> {
        &self.grid
    }

    pub fn source(&self) -> SourceModel {
        self.source
    }

    pub fn with_grid(&self, grid: SimulationGrid<T>) -> Result<Self> {
        Self::new(
            self.arm_a.clone(),
            self.arm_b.clone(),
            self.kernel.clone(),
            grid,
            self.source,
        )
    }

    fn with_input<R>(&self, f: impl FnOnce(&JointInput<T>) -> R) -> R {
        let pos = self.grid.positions();
        let dx = self.grid.dx();
        let a = self.arm_a.sample(&pos, dx);
        let b = match &self.arm_b {
            Arm::Open => None,
            Arm::Aperture(p) => Some(p.sample(&pos, dx)),
        };
        let b_profile = match &self.arm_b {
            Arm::Open => None,
            Arm::Aperture(p) => Some(p),
        };
        let product = sample_product(&self.arm_a, b_profile, &pos, dx);
        let input = JointInput {
            lattice: self.grid.lattice(),
            a: &a,
            b: match &b {
                None => SecondArm::Open,
                Some(v) => SecondArm::Sampled(v),
            },
            product: Some(&product),
            kernel: &self.kernel,
            prefactor: T::one() / (T::lit(2.0) * T::TAU()),
        };
        f(&input)
    }

    fn require(&self, source: SourceModel) -> Result<()> {
        if self.source == source {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!(
                "operation needs a {source:?} source, scenario has {:?}",
                self.source
            )))
        }
    }

    /// Classical map on `axis` from direct sums: each one-photon pattern is
    /// a term-by-term transform over the whole lattice and every map entry
    /// is its own scan sum.
    pub fn brute_force_classical_map(&self, axis: &QAxis<T>) -> Result<RateMap<T>> {
        self.require(SourceModel::ClassicalMomentumCorrelated)?;
        if axis.len() > ORACLE_MAX_POINTS {
            return Err(Error::OracleTooLarge {
                requested: axis.len(),
                limit: ORACLE_MAX_POINTS,
            });
        }
        let grid = &self.grid;
        let n = grid.n();
        let pattern = |p: &ApertureProfile<T>| -> Vec<T> {
            let pos = grid.positions();
            let a = p.sample(&pos, grid.dx());
            let scale = grid.dx() / T::TAU().sqrt();
            (0..n)
                .into_par_iter()
                .map(|m| {
                    let q = T::from_i64_lossy(m as i64) * grid.dq();
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (x, v) in pos.iter().zip(&a) {
                        if v.norm_sqr() > T::zero() {
                            acc = acc + v * Complex::new((q * *x).cos(), (q * *x).sin());
                        }
                    }
                    (acc * scale).norm_sqr()
                })
                .collect()
        };
        let ra = pattern(&self.arm_a);
        let rb = match &self.arm_b {
            Arm::Open => None,
            Arm::Aperture(b) => Some(pattern(b)),
        };
        let len = axis.len();
        let wrap = |k: i64| k.rem_euclid(n as i64) as usize;
        let rows: Vec<Vec<T>> = (0..len)
            .into_par_iter()
            .map(|i| {
                (0..len)
                    .map(|c| {
                        let (k, kp) = (axis.k(i), axis.k(c));
                        match &rb {
                            None => ra[wrap(k - kp)],
                            Some(rb) => {
                                let mut acc = T::zero();
                                for p in 0..n as i64 {
                                    acc = acc + ra[wrap(k - p)] * rb[wrap(kp - p)];
                                }
                                acc * grid.dq()
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let values = Array2::from_shape_fn((len, len), |(i, c)| rows[i][c]);
        Ok(RateMap {
            axis: *axis,
            values,
            row_totals: None,
            normalization: Normalization::Raw,
            warnings: Vec::new(),
        })
    }

    /// Direct double sum of the quantum two-arm amplitude on `axis`.
    pub fn brute_force_joint(&self, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
        self.require(SourceModel::Quantum)?;
        self.with_input(|input| brute_force_joint(input, axis))
    }

    pub fn joint_amplitude_on(&self, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
        self.joint_amplitude_via(axis, KernelPath::Auto)
    }

    /// Joint amplitude on `axis` using a specific kernel sum.
    pub fn joint_amplitude_via(&self, axis: &QAxis<T>, path: KernelPath) -> Result<JointSpectrum<T>> {
        self.require(SourceModel::Quantum)?;
        self.with_input(|input| joint_spectrum_via(input, axis, path))
    }
}

/// `F~(q, q') = (1/4 pi) int int A(x) B(x') G(x - x') exp(i(qx + q'x')) dx dx'`
/// on the display window. Not symmetric in general.
pub fn ghost_joint_amplitude<T: Real>(s: &TwoArmScenario<T>) -> Result<JointSpectrum<T>> {
    s.joint_amplitude_on(&s.grid.display_axis())
}

/// `|F[A](q_k)|^2` on the whole periodic lattice, indexed by `k mod n`.
fn classical_pattern<T: Real>(grid: &SimulationGrid<T>, a: &ApertureProfile<T>) -> Result<Vec<T>> {
    let n = grid.n();
    let samples = a.sample(&grid.positions(), grid.dx());
    let spec = forward_transform(grid.lattice(), &samples)?;
    let mut out = vec![T::zero(); n];
    for (i, v) in spec.values().iter().enumerate() {
        let k = spec.axis().k(i);
        out[k.rem_euclid(n as i64) as usize] = v.norm_sqr();
    }
    Ok(out)
}

/// Share of the pattern in `|k| >= 3n/8`.
fn outer_fraction<T: Real>(pattern: &[T]) -> f64 {
    let n = pattern.len();
    let total: T = pattern.iter().copied().sum();
    if total <= T::zero() {
        return 0.0;
    }
    let lo = (3 * n).div_ceil(8);
    let hi = n - lo;
    let outer: T = pattern[lo..=hi].iter().copied().sum();
    (outer / total).as_f64()
}

/// `R2(q, q') = int R_A(q - q0) R_B(q' - q0) dq0` with the scan `q0` running
/// over the whole periodic lattice. The result depends only on `q - q'`.
/// An open arm B contributes a lattice delta `R_B = delta_{k,0} / dq`, so the
/// map is `R_A(q - q')` exactly.
pub fn classical_coincidence_map<T: Real>(s: &TwoArmScenario<T>) -> Result<RateMap<T>> {
    classical_coincidence_map_on(s, &s.grid.display_axis())
}

/// [`classical_coincidence_map`] on an arbitrary q axis.
pub fn classical_coincidence_map_on<T: Real>(s: &TwoArmScenario<T>, axis: &QAxis<T>) -> Result<RateMap<T>> {
    s.require(SourceModel::ClassicalMomentumCorrelated)?;
    let grid = &s.grid;
    let n = grid.n();
    let dq = grid.dq();
    let ra = classical_pattern(grid, &s.arm_a)?;
    let mut warnings = Vec::new();
    let mut check = |p: &[T]| {
        let fraction = outer_fraction(p);
        if fraction > SCAN_BUDGET {
            warnings.push(Warning::ScanTruncation { fraction });
        }
    };
    check(&ra);
    let rb = match &s.arm_b {
        Arm::Open => None,
        Arm::Aperture(b) => {
            let p = classical_pattern(grid, b)?;
            check(&p);
            Some(p)
        }
    };
    let axis = *axis;
    let len = axis.len();
    let reach = len as i64 - 1;
    // C(delta) = sum_p R_A[p + delta] R_B[p] dq, for |delta| <= reach
    let corr: Vec<T> = (-reach..=reach)
        .into_par_iter()
        .map(|delta| match &rb {
            None => ra[delta.rem_euclid(n as i64) as usize],
            Some(rb) => {
                let mut acc = T::zero();
                for (p, &b) in rb.iter().enumerate() {
                    acc = acc + ra[(p as i64 + delta).rem_euclid(n as i64) as usize] * b;
                }
                acc * dq
            }
        })
        .collect();
    let values = Array2::from_shape_fn((len, len), |(i, c)| {
        corr[(axis.k(i) - axis.k(c) + reach) as usize]
    });
    Ok(RateMap {
        axis,
        values,
        row_totals: None,
        normalization: Normalization::Raw,
        warnings,
    })
}

/// A straight line through a rate map. Positions are in units of the map's
/// `q_unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Line<T> {
    /// `q = value`, profile over `q'`.
    Row(T),
    /// `q' = value`, profile over `q`.
    Column(T),
    /// `q' = q`.
    Diagonal,
    /// `q' = -q`.
    AntiDiagonal,
}

/// Extracts a profile along `line`, interpolating linearly between lattice
/// rows or columns when the position falls between them.
pub fn cross_section<T: Real>(map: &RateMap<T>, line: Line<T>) -> Result<RateProfile<T>> {
    let axis = map.axis;
    let len = axis.len();
    let unit = axis.q_unit();
    let lerp = |value: T, name: &'static str| -> Result<(usize, usize, T)> {
        let lo_q = axis.q_normalized(0);
        let hi_q = axis.q_normalized(len - 1);
        let tol = T::lit(1e-9) * axis.dq() / unit;
        if !(value >= lo_q - tol && value <= hi_q + tol) {
            return Err(Error::OutsideWindow {
                line: name,
                value: value.as_f64(),
                min: lo_q.as_f64(),
                max: hi_q.as_f64(),
            });
        }
        let pos = (value * unit / axis.dq()) - T::from_i64_lossy(axis.k_min());
        let pos = pos.max(T::zero()).min(T::from_usize_lossy(len - 1));
        let near = pos.round();
        if (pos - near).abs() < T::lit(1e-9) {
            let i = near.to_usize().unwrap_or(0);
            return Ok((i, i, T::zero()));
        }
        let i = pos.floor().to_usize().unwrap_or(0).min(len - 2);
        Ok((i, i + 1, pos - T::from_usize_lossy(i)))
    };
    let q = axis.values();
    let profile = match line {
        Line::Row(v) => {
            let (i, j, t) = lerp(v, "q")?;
            let vals = (0..len)
                .map(|c| map.values[[i, c]] * (T::one() - t) + map.values[[j, c]] * t)
                .collect();
            RateProfile::new(q, unit, vals)
        }
        Line::Column(v) => {
            let (i, j, t) = lerp(v, "q'")?;
            let vals = (0..len)
                .map(|r| map.values[[r, i]] * (T::one() - t) + map.values[[r, j]] * t)
                .collect();
            RateProfile::new(q, unit, vals)
        }
        Line::Diagonal | Line::AntiDiagonal => {
            let mut qs = Vec::new();
            let mut vals = Vec::new();
            for i in 0..len {
                let k = axis.k(i);
                let kp = if line == Line::Diagonal { k } else { -k };
                if let Some(v) = map.at(k, kp) {
                    qs.push(axis.q(i));
                    vals.push(v);
                }
            }
            RateProfile::new(qs, unit, vals)
        }
    };
    Ok(RateProfile {
        normalization: map.normalization,
        warnings: map.warnings.clone(),
        ..profile
    })
}

/// Reverses a profile's abscissa, `q -> -q`, keeping it ascending.
pub fn mirrored<T: Real>(p: &RateProfile<T>) -> RateProfile<T> {
    RateProfile {
        q: p.q.iter().rev().map(|&q| -q).collect(),
        q_unit: p.q_unit,
        values: p.values.iter().rev().copied().collect(),
        normalization: p.normalization,
        warnings: p.warnings.clone(),
    }
}

impl<T: Real> From<&JointSpectrum<T>> for RateMap<T> {
    fn from(s: &JointSpectrum<T>) -> Self {
        crate::biphoton::coincidence_map(s)
    }
}
