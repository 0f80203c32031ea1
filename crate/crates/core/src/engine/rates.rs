//! Joint far-field amplitudes and the counting rates derived from them.

use ndarray::Array2;
use num_complex::Complex;

use super::grid::QAxis;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Both photons traverse the same object.
    SameObject,
    /// The photons are split into two arms with separate objects.
    TwoArm,
}

/// Algorithm that produced a joint spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMethod {
    /// Product of one-photon transforms (constant kernel).
    Separable,
    /// Single-sum reduction (Dirac kernel).
    SingleIntegral,
    /// Sum over kernel lags `G(t dx)`.
    LagBand { lags: usize },
    /// Sum over the kernel's discrete spectrum.
    FrequencyBand { terms: usize },
    /// Direct double Riemann sum.
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub geometry: Geometry,
    pub kernel: String,
    pub method: JointMethod,
    pub n_x: usize,
    pub dx: f64,
}

/// Numeric-budget diagnostics attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Columns at the edge of a windowed marginal carry this fraction of the
    /// row total (budget 1e-4).
    MarginalTruncation { fraction: f64 },
    /// One-photon patterns put this fraction of their weight in the outer
    /// band of the scan lattice (budget 1e-4).
    ScanTruncation { fraction: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::MarginalTruncation { fraction } => write!(
                f,
                "marginal truncation: boundary columns carry {fraction:.3e} of the total"
            ),
            Warning::ScanTruncation { fraction } => write!(
                f,
                "scan truncation: {fraction:.3e} of the pattern lies in the outer scan band"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Raw,
    /// Divided by the original maximum, stored here.
    Peak { scale: f64 },
}

/// `F~(q, q')` on a square window of the conjugate lattice.
///
/// `row_power[i]`, when present, holds `sum_{q'} |F~(q_i, q')|^2 dq` taken
/// over the whole periodic lattice rather than the window.
#[derive(Debug, Clone)]
pub struct JointSpectrum<T> {
    pub axis: QAxis<T>,
    pub values: Array2<Complex<T>>,
    pub row_power: Option<Vec<T>>,
    pub provenance: Provenance,
}

/// `R2(q, q')`: rows are indexed by `q`, columns by `q'`.
#[derive(Debug, Clone)]
pub struct RateMap<T> {
    pub axis: QAxis<T>,
    pub values: Array2<T>,
    /// Full-lattice row integrals, see [`JointSpectrum`].
    pub row_totals: Option<Vec<T>>,
    pub normalization: Normalization,
    pub warnings: Vec<Warning>,
}

impl<T: Real> RateMap<T> {
    pub fn max(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    /// Divides by the maximum so the peak becomes 1. An all-zero map is
    /// returned unchanged.
    pub fn peak_normalized(&self) -> RateMap<T> {
        let peak = self.max();
        if peak <= T::zero() {
            return self.clone();
        }
        let prior = match self.normalization {
            Normalization::Raw => 1.0,
            Normalization::Peak { scale } => scale,
        };
        RateMap {
            axis: self.axis,
            values: self.values.mapv(|v| v / peak),
            row_totals: self
                .row_totals
                .as_ref()
                .map(|r| r.iter().map(|&v| v / peak).collect()),
            normalization: Normalization::Peak {
                scale: prior * peak.as_f64(),
            },
            warnings: self.warnings.clone(),
        }
    }

    /// Entry at lattice indices `(k, k')`.
    pub fn at(&self, k: i64, kp: i64) -> Option<T> {
        let i = self.axis.index_of(k)?;
        let j = self.axis.index_of(kp)?;
        Some(self.values[[i, j]])
    }
}

/// A real profile sampled at wavenumbers `q` (raw units); `q_unit` is the
/// normalization unit used for reporting.
#[derive(Debug, Clone)]
pub struct RateProfile<T> {
    pub q: Vec<T>,
    pub q_unit: T,
    pub values: Vec<T>,
    pub normalization: Normalization,
    pub warnings: Vec<Warning>,
}

impl<T: Real> RateProfile<T> {
    pub fn new(q: Vec<T>, q_unit: T, values: Vec<T>) -> Self {
        Self {
            q,
            q_unit,
            values,
            normalization: Normalization::Raw,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn q_normalized(&self) -> Vec<T> {
        self.q.iter().map(|&q| q / self.q_unit).collect()
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    /// Lattice spacing of the profile's abscissa.
    pub fn step(&self) -> T {
        if self.q.len() < 2 {
            T::zero()
        } else {
            (self.q[1] - self.q[0]).abs()
        }
    }

    pub fn peak_normalized(&self) -> RateProfile<T> {
        let peak = self.max();
        if peak <= T::zero() {
            return self.clone();
        }
        RateProfile {
            q: self.q.clone(),
            q_unit: self.q_unit,
            values: self.values.iter().map(|&v| v / peak).collect(),
            normalization: Normalization::Peak {
                scale: peak.as_f64(),
            },
            warnings: self.warnings.clone(),
        }
    }

    /// Values for `|q| <= limit * q_unit`.
    pub fn restricted(&self, limit: T) -> RateProfile<T> {
        let keep: Vec<usize> = (0..self.q.len())
            .filter(|&i| (self.q[i] / self.q_unit).abs() <= limit + T::lit(1e-12))
            .collect();
        RateProfile {
            q: keep.iter().map(|&i| self.q[i]).collect(),
            q_unit: self.q_unit,
            values: keep.iter().map(|&i| self.values[i]).collect(),
            normalization: self.normalization,
            warnings: self.warnings.clone(),
        }
    }
}
