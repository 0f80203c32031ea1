//! Both photons of a pair traverse the same object.

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::aperture::{sample_product, ApertureKind, ApertureProfile};
use crate::correlation::{CorrelationKernel, WidthConvention};
use crate::engine::grid::{GridSpec, QAxis, SimulationGrid, MIN_PADDING};
use crate::engine::joint::{joint_spectrum_via, JointInput, KernelPath, SecondArm};
use crate::engine::oracle::brute_force_joint;
use crate::engine::rates::{JointSpectrum, Normalization, RateMap, RateProfile, Warning};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finest slit-width resolution required: `dx <= s / 8`.
pub const SLITS_PER_DX: f64 = 8.0;
/// Fraction of a marginal carried by the window's boundary columns above
/// which a truncation warning is attached.
pub const TRUNCATION_BUDGET: f64 = 1e-4;

/// `F(x, x') = A(x) A(x') G(x - x')` on a matched pair of lattices.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    aperture: ApertureProfile<T>,
    kernel: CorrelationKernel<T>,
    grid: SimulationGrid<T>,
}

/// Checks that an object fits the grid: padding of at least 4 around the
/// support, and at least 8 lattice points across each slit.
pub(crate) fn check_object<T: Real>(
    aperture: &ApertureProfile<T>,
    grid: &SimulationGrid<T>,
) -> Result<()> {
    let extent = aperture.support_halfwidth() * T::lit(2.0);
    let needed = extent * T::lit(MIN_PADDING);
    if grid.window() < needed * (T::one() - T::lit(1e-12)) {
        return Err(Error::InvalidGrid(format!(
            "window {} is narrower than {MIN_PADDING} times the aperture extent {}",
            grid.window(),
            extent
        )));
    }
    if let ApertureKind::Grating(g) = aperture.kind() {
        let limit = g.slit_width() / T::lit(SLITS_PER_DX);
        if grid.dx() > limit * (T::one() + T::lit(1e-12)) {
            return Err(Error::GridTooCoarse {
                dx: grid.dx().as_f64(),
                limit: limit.as_f64(),
            });
        }
    }
    Ok(())
}

impl<T: Real> Scenario<T> {
    pub fn new(
        aperture: ApertureProfile<T>,
        kernel: CorrelationKernel<T>,
        grid: SimulationGrid<T>,
    ) -> Result<Self> {
        check_object(&aperture, &grid)?;
        Ok(Self {
            aperture,
            kernel,
            grid,
        })
    }

    /// Builds the grid from `spec` around the aperture.
    pub fn with_spec(
        aperture: ApertureProfile<T>,
        kernel: CorrelationKernel<T>,
        spec: &GridSpec<T>,
    ) -> Result<Self> {
        let grid = SimulationGrid::for_aperture(spec, &aperture)?;
        Self::new(aperture, kernel, grid)
    }

    pub fn aperture(&self) -> &ApertureProfile<T> {
        &self.aperture
    }

    pub fn kernel(&self) -> &CorrelationKernel<T> {
        &self.kernel
    }

    pub fn grid(&self) -> &SimulationGrid<T> {
        &self.grid
    }

    /// Same object and grid with another kernel.
    pub fn with_kernel(&self, kernel: CorrelationKernel<T>) -> Self {
        Self {
            kernel,
            ..self.clone()
        }
    }

    /// Same object and kernel on another grid.
    pub fn with_grid(&self, grid: SimulationGrid<T>) -> Result<Self> {
        Self::new(self.aperture.clone(), self.kernel.clone(), grid)
    }

    /// `A(x_j)` on the object lattice.
    pub fn samples(&self) -> Vec<Complex<T>> {
        self.aperture.sample(&self.grid.positions(), self.grid.dx())
    }

    /// `A(x_j)^2` with discontinuities treated as for a single sample.
    pub fn square_samples(&self) -> Vec<Complex<T>> {
        sample_product(
            &self.aperture,
            Some(&self.aperture),
            &self.grid.positions(),
            self.grid.dx(),
        )
    }

    fn with_input<R>(&self, f: impl FnOnce(&JointInput<T>) -> R) -> R {
        let a = self.samples();
        let sq = self.square_samples();
        let input = JointInput {
            lattice: self.grid.lattice(),
            a: &a,
            b: SecondArm::Same,
            product: Some(&sq),
            kernel: &self.kernel,
            prefactor: T::one() / T::TAU(),
        };
        f(&input)
    }

    /// Joint amplitude on the display window.
    pub fn joint_amplitude(&self) -> Result<JointSpectrum<T>> {
        self.joint_amplitude_on(&self.grid.display_axis())
    }

    pub fn joint_amplitude_on(&self, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
        self.joint_amplitude_via(axis, KernelPath::Auto)
    }

    /// Joint amplitude on `axis` using a specific kernel sum.
    pub fn joint_amplitude_via(&self, axis: &QAxis<T>, path: KernelPath) -> Result<JointSpectrum<T>> {
        self.with_input(|input| joint_spectrum_via(input, axis, path))
    }

    /// Direct double sum on `axis` (at most 256 points).
    pub fn brute_force_joint(&self, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
        self.with_input(|input| brute_force_joint(input, axis))
    }
}

/// Fast joint amplitude `F~(q, q')` on the scenario's display window.
pub fn joint_amplitude<T: Real>(s: &Scenario<T>) -> Result<JointSpectrum<T>> {
    s.joint_amplitude()
}

/// `R2(q, q') = |F~(q, q')|^2`.
pub fn coincidence_map<T: Real>(spectrum: &JointSpectrum<T>) -> RateMap<T> {
    RateMap {
        axis: spectrum.axis,
        values: spectrum.values.mapv(|v| v.norm_sqr()),
        row_totals: spectrum.row_power.clone(),
        normalization: Normalization::Raw,
        warnings: Vec::new(),
    }
}

/// `R1(q) = int R2(q, q') dq'`.
///
/// Maps that carry full-lattice row totals use them directly. Otherwise the
/// integral is a trapezoid over the window's columns, and a
/// [`Warning::MarginalTruncation`] is attached when the two boundary columns
/// hold more than `1e-4` of the total.
pub fn one_photon_marginal<T: Real>(map: &RateMap<T>) -> RateProfile<T> {
    let axis = map.axis;
    let q = axis.values();
    let mut warnings = map.warnings.clone();
    let values = match &map.row_totals {
        Some(t) => t.clone(),
        None => {
            let len = axis.len();
            let half = T::lit(0.5);
            let mut edge = T::zero();
            let mut total = T::zero();
            let vals: Vec<T> = map
                .values
                .rows()
                .into_iter()
                .map(|row| {
                    let sum: T = row.iter().copied().sum();
                    let ends = row[0] + row[len - 1];
                    edge = edge + ends;
                    total = total + sum;
                    (sum - ends * half) * axis.dq()
                })
                .collect();
            if total > T::zero() {
                let fraction = (edge / total).as_f64();
                if fraction > TRUNCATION_BUDGET {
                    warnings.push(Warning::MarginalTruncation { fraction });
                }
            }
            vals
        }
    };
    let mut profile = RateProfile::new(q, axis.q_unit(), values);
    profile.warnings = warnings;
    profile.normalization = map.normalization;
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSign {
    /// `q' = q`.
    Plus,
    /// `q' = -q`.
    Minus,
}

/// `R2(q, +q)` or `R2(q, -q)` at the lattice points of the map window.
pub fn diagonal_cut<T: Real>(map: &RateMap<T>, sign: CutSign) -> RateProfile<T> {
    let axis = map.axis;
    let mut q = Vec::new();
    let mut values = Vec::new();
    for i in 0..axis.len() {
        let k = axis.k(i);
        let kp = match sign {
            CutSign::Plus => k,
            CutSign::Minus => -k,
        };
        if let Some(v) = map.at(k, kp) {
            q.push(axis.q(i));
            values.push(v);
        }
    }
    let mut p = RateProfile::new(q, axis.q_unit(), values);
    p.normalization = map.normalization;
    p.warnings = map.warnings.clone();
    p
}

/// One member of an `r` sweep; both profiles are peak-normalized.
#[derive(Debug, Clone)]
pub struct SweepPoint<T> {
    pub r: T,
    pub marginal: RateProfile<T>,
    pub diagonal: RateProfile<T>,
}

/// The kernel an r sweep uses at `r`: the base kernel with its `r`
/// replaced when it is Gaussian, otherwise a FWHM Gaussian referenced to
/// the grating period.
pub fn sweep_kernel<T: Real>(base: &Scenario<T>, r: T) -> Result<CorrelationKernel<T>> {
    let template: CorrelationKernel<T> = match base.kernel() {
        k @ CorrelationKernel::Gaussian { .. } => k.clone(),
        _ => {
            let d = base.aperture().period().ok_or_else(|| {
                Error::InvalidScenario(
                    "an r sweep needs a grating or a Gaussian base kernel".into(),
                )
            })?;
            CorrelationKernel::gaussian(T::one(), d, WidthConvention::Fwhm)?
        }
    };
    template.with_r(r)
}

/// Recomputes the scenario with Gaussian kernels of each `r`. A base
/// scenario without a Gaussian kernel uses the grating period as the
/// reference length and the FWHM convention.
pub fn r_sweep<T: Real>(base: &Scenario<T>, r_values: &[T]) -> Result<Vec<SweepPoint<T>>> {
    if let Some(&r) = r_values.iter().find(|r| !(r.is_finite() && **r > T::zero())) {
        return Err(Error::InvalidKernel(format!("r must be positive, got {r}")));
    }
    r_values
        .iter()
        .map(|&r| {
            let s = base.with_kernel(sweep_kernel(base, r)?);
            let map = coincidence_map(&s.joint_amplitude()?);
            Ok(SweepPoint {
                r,
                marginal: one_photon_marginal(&map).peak_normalized(),
                diagonal: diagonal_cut(&map, CutSign::Plus).peak_normalized(),
            })
        })
        .collect()
}

/// `g1(x, x')` on the lattice points of the aperture support.
#[derive(Debug, Clone)]
pub struct Coherence<T> {
    pub x: Vec<T>,
    pub values: Array2<Complex<T>>,
    pub normalization: Normalization,
}

/// First-order coherence of one photon of the pair,
/// `g1(x, x') ∝ int F*(x, y) F(x', y) dy`, peak-normalized.
///
/// For the Dirac kernel the closed form
/// `2 (|A(x)|^2 + |A(x')|^2) A*(x) A(x') delta(x - x')` is used, with the
/// delta becoming `1/dx` on the diagonal; off-diagonal entries are exactly
/// zero. The numeric contraction costs `O(m^3)` in the number `m` of support
/// points, so coarse grids are advisable.
pub fn first_order_coherence<T: Real>(s: &Scenario<T>) -> Result<Coherence<T>> {
    let a = s.samples();
    let grid = s.grid();
    let idx: Vec<usize> = (0..a.len()).filter(|&j| a[j].norm_sqr() > T::zero()).collect();
    let x: Vec<T> = idx.iter().map(|&j| grid.x(j)).collect();
    let m = idx.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut g = Array2::from_elem((m, m), zero);
    if m == 0 {
        return Ok(Coherence {
            x,
            values: g,
            normalization: Normalization::Raw,
        });
    }
    let dx = grid.dx();
    match s.kernel() {
        CorrelationKernel::Dirac => {
            for (r, &j) in idx.iter().enumerate() {
                let p = a[j].norm_sqr();
                let v = a[j].conj() * a[j] * (T::lit(2.0) * (p + p)) / dx;
                g[[r, r]] = Complex::new(v.re, T::zero());
            }
        }
        kernel => {
            // F(x_j, y_l) = A_j A_l G(x_j - y_l), restricted to the support
            let f: Vec<Vec<Complex<T>>> = idx
                .par_iter()
                .map(|&j| {
                    idx.iter()
                        .map(|&l| {
                            let gv = kernel.eval(grid.x(j) - grid.x(l)).unwrap_or_else(|_| T::zero());
                            a[j] * a[l] * gv
                        })
                        .collect()
                })
                .collect();
            let w = T::lit(4.0) * dx;
            let rows: Vec<Vec<Complex<T>>> = (0..m)
                .into_par_iter()
                .map(|r| {
                    (r..m)
                        .map(|c| {
                            f[r].iter()
                                .zip(&f[c])
                                .fold(zero, |acc, (u, v)| acc + u.conj() * v)
                                * w
                        })
                        .collect()
                })
                .collect();
            for (r, row) in rows.into_iter().enumerate() {
                for (o, v) in row.into_iter().enumerate() {
                    let c = r + o;
                    if c == r {
                        g[[r, r]] = Complex::new(v.re, T::zero());
                    } else {
                        g[[r, c]] = v;
                        g[[c, r]] = v.conj();
                    }
                }
            }
        }
    }
    let peak = g.diag().iter().fold(T::zero(), |mx, v| mx.max(v.re));
    if peak > T::zero() {
        g.mapv_inplace(|v| v / peak);
        return Ok(Coherence {
            x,
            values: g,
            normalization: Normalization::Peak {
                scale: peak.as_f64(),
            },
        });
    }
    Ok(Coherence {
        x,
        values: g,
        normalization: Normalization::Raw,
    })
}
