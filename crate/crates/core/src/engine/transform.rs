//! Continuum-scaled discrete Fourier transforms with the
//! `(2 pi)^{-1/2} int f(x) exp(+iqx) dx` convention.

use num_complex::Complex;
use rustfft::FftPlanner;

use super::grid::{QAxis, UniformLattice};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Far-field samples on the full conjugate lattice, in natural order
/// (`k = -n/2 .. n/2` for even `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    axis: QAxis<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn axis(&self) -> &QAxis<T> {
        &self.axis
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Value at lattice index `k`, if present.
    pub fn at(&self, k: i64) -> Option<Complex<T>> {
        self.axis.index_of(k).map(|i| self.values[i])
    }
}

/// `sum_j v_j exp(+2 pi i j k / n)` for `k = 0..n`, unnormalized.
pub(crate) fn dft_plus<T: Real>(values: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// `sum_j v_j exp(-2 pi i j k / n)` for `k = 0..n`, unnormalized.
pub(crate) fn dft_minus<T: Real>(values: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Table of `exp(+2 pi i m / n)` for `m = 0..n`.
#[derive(Debug, Clone)]
pub(crate) struct Twiddles<T> {
    table: Vec<Complex<T>>,
}

impl<T: Real> Twiddles<T> {
    pub(crate) fn new(n: usize) -> Self {
        let step = T::TAU() / T::from_usize_lossy(n);
        let table = (0..n)
            .map(|m| {
                let a = step * T::from_usize_lossy(m);
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        Self { table }
    }

    /// `exp(+2 pi i e / n)` for any integer exponent.
    #[inline]
    pub(crate) fn pow(&self, e: i64) -> Complex<T> {
        let n = self.table.len() as i64;
        self.table[e.rem_euclid(n) as usize]
    }
}

#[inline]
pub(crate) fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// `exp(i q_k x_min)` for the lattice origin.
pub(crate) fn origin_phase<T: Real>(lattice: &UniformLattice<T>, k: i64) -> Complex<T> {
    let a = T::from_i64_lossy(k) * lattice.dq() * lattice.x_min();
    Complex::new(a.cos(), a.sin())
}

/// Approximates `(2 pi)^{-1/2} int f(x) exp(iqx) dx` on the conjugate
/// lattice by a Riemann sum with weight `dx`.
pub fn forward_transform<T: Real>(
    lattice: &UniformLattice<T>,
    samples: &[Complex<T>],
) -> Result<Spectrum<T>> {
    let n = lattice.len();
    if samples.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} samples on a lattice of {n} points",
            samples.len()
        )));
    }
    let raw = dft_plus(samples);
    let scale = lattice.dx() / T::TAU().sqrt();
    let axis = QAxis::new(-((n / 2) as i64), n, lattice.dq(), T::one());
    let values = (0..n)
        .map(|i| {
            let k = axis.k(i);
            raw[wrap(k, n)] * origin_phase(lattice, k) * scale
        })
        .collect();
    Ok(Spectrum { axis, values })
}

/// Inverse of [`forward_transform`]:
/// `f(x_j) = (2 pi)^{-1/2} sum_k F(q_k) exp(-i q_k x_j) dq`.
pub fn inverse_transform<T: Real>(
    lattice: &UniformLattice<T>,
    spectrum: &Spectrum<T>,
) -> Result<Vec<Complex<T>>> {
    let n = lattice.len();
    if spectrum.values.len() != n || spectrum.axis.dq() != lattice.dq() {
        return Err(Error::ShapeMismatch(
            "spectrum does not belong to this lattice".into(),
        ));
    }
    let mut raw = vec![Complex::new(T::zero(), T::zero()); n];
    for (i, v) in spectrum.values.iter().enumerate() {
        let k = spectrum.axis.k(i);
        raw[wrap(k, n)] = *v * origin_phase(lattice, k).conj();
    }
    let out = dft_minus(&raw);
    let scale = lattice.dq() / T::TAU().sqrt();
    Ok(out.into_iter().map(|v| v * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aperture::{ApertureProfile, GratingSpec};
    use crate::engine::grid::SimulationGrid;

    fn c(v: f64) -> Complex<f64> {
        Complex::new(v, 0.0)
    }

    #[test]
    fn zero_maps_to_zero() {
        let lat = UniformLattice::new(-1.0, 0.25, 8).unwrap();
        let s = forward_transform(&lat, &[c(0.0); 8]).unwrap();
        assert!(s.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn centered_rectangle_matches_slit_transform() {
        // rectangle of width 1 sampled with half-weight edges; the
        // trapezoid factor (q dx/2) cot(q dx/2) is the only discrepancy
        let grid = SimulationGrid::new(1 << 18, 16.0, None, 4.0).unwrap();
        let a = ApertureProfile::grating(GratingSpec::new(1.0, 3.2, 1.0, 1).unwrap());
        let samples = a.sample(&grid.positions(), grid.dx());
        let s = forward_transform(grid.lattice(), &samples).unwrap();
        for k in -20i64..=20 {
            let q = k as f64 * grid.dq();
            let exact = if q == 0.0 {
                1.0
            } else {
                (q / 2.0).sin() / (q / 2.0)
            } / (2.0 * std::f64::consts::PI).sqrt();
            let got = s.at(k).unwrap();
            assert!(got.im.abs() < 1e-12);
            assert!((got.re - exact).abs() < 1e-8, "k = {k}: {} vs {exact}", got.re);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let lat = UniformLattice::new(-3.0, 0.1, 60).unwrap();
        let f: Vec<Complex<f64>> = (0..60)
            .map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos()))
            .collect();
        let back = inverse_transform(&lat, &forward_transform(&lat, &f).unwrap()).unwrap();
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let lat = UniformLattice::new(0.0, 1.0, 4).unwrap();
        assert!(forward_transform(&lat, &[c(1.0); 3]).is_err());
    }

    #[test]
    fn twiddles_wrap_negative_exponents() {
        let t = Twiddles::<f64>::new(8);
        assert!((t.pow(-1) - t.pow(7)).norm() == 0.0);
        assert!((t.pow(2) - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }
}
