//! One-dimensional transmission-amplitude profiles.
//!
//! Two kinds of profile are supported: a closed-form binary grating, whose
//! Fourier transform is known exactly, and an arbitrary sampled profile that
//! is linearly interpolated between its samples.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Binary transmission grating of `slit_count` slits of width `slit_width`
/// repeated with pitch `period`.
///
/// Slits are centred at `x_k = (k - (N-1)/2) * period` for `k = 0..N`, so the
/// profile is even about `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec<T> {
    amplitude: T,
    period: T,
    slit_width: T,
    slit_count: usize,
}

impl<T: Real> GratingSpec<T> {
    /// `amplitude` may be zero (an opaque screen); it must not be negative.
    pub fn new(amplitude: T, period: T, slit_width: T, slit_count: usize) -> Result<Self> {
        let finite = amplitude.is_finite() && period.is_finite() && slit_width.is_finite();
        if !finite {
            return Err(Error::InvalidAperture("grating parameters must be finite".into()));
        }
        if amplitude < T::zero() {
            return Err(Error::InvalidAperture(format!(
                "amplitude must be non-negative, got {amplitude}"
            )));
        }
        if !(slit_width > T::zero() && slit_width < period) {
            return Err(Error::InvalidAperture(format!(
                "need 0 < slit_width < period, got s = {slit_width}, d = {period}"
            )));
        }
        if slit_count == 0 {
            return Err(Error::InvalidAperture("slit_count must be at least 1".into()));
        }
        Ok(Self {
            amplitude,
            period,
            slit_width,
            slit_count,
        })
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn slit_width(&self) -> T {
        self.slit_width
    }

    pub fn slit_count(&self) -> usize {
        self.slit_count
    }

    /// Total width of the open region, `(N-1) d + s`.
    pub fn extent(&self) -> T {
        T::from_usize_lossy(self.slit_count - 1) * self.period + self.slit_width
    }

    pub fn slit_center(&self, k: usize) -> T {
        let offset = T::from_usize_lossy(self.slit_count - 1) * T::lit(0.5);
        (T::from_usize_lossy(k) - offset) * self.period
    }

    /// Fundamental order spacing `q0 = 2 pi / d`.
    pub fn q0(&self) -> T {
        T::TAU() / self.period
    }

    /// Samples the grating; points within `edge_tol` of a slit edge take
    /// half the amplitude.
    fn value_at(&self, x: T, edge_tol: T) -> T {
        let half_n = T::from_usize_lossy(self.slit_count - 1) * T::lit(0.5);
        let k = (x / self.period + half_n).round();
        let k_max = T::from_usize_lossy(self.slit_count - 1);
        let k = k.max(T::zero()).min(k_max);
        let center = (k - half_n) * self.period;
        let u = (x - center).abs();
        let half_s = self.slit_width * T::lit(0.5);
        if (u - half_s).abs() <= edge_tol {
            self.amplitude * T::lit(0.5)
        } else if u < half_s {
            self.amplitude
        } else {
            T::zero()
        }
    }

    /// Closed-form Fourier transform with the `exp(+iqx)/sqrt(2 pi)` kernel:
    ///
    /// `F[A](q) = A0/sqrt(2 pi) * sin(N d q/2)/sin(d q/2) * sin(s q/2)/(q/2)`.
    ///
    /// The transform of an even real profile is real, so a real value is
    /// returned. Removable singularities at `q = 2 pi m / d` are evaluated
    /// through their limits.
    pub fn fourier(&self, q: T) -> T {
        let theta = self.period * q * T::lit(0.5);
        let array = dirichlet(self.slit_count, theta);
        let slit = self.slit_width * sinc(self.slit_width * q * T::lit(0.5));
        self.amplitude / T::TAU().sqrt() * array * slit
    }
}

/// `sin(N theta) / sin(theta)`, continuous through `theta = m pi`.
fn dirichlet<T: Real>(n: usize, theta: T) -> T {
    let denom = theta.sin();
    if denom.abs() > T::lit(1e-3) {
        return (T::from_usize_lossy(n) * theta).sin() / denom;
    }
    // sum_{k=0}^{N-1} cos((N-1-2k) theta) has no removable singularity
    let top = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|k| ((top - T::from_usize_lossy(2 * k)) * theta).cos())
        .sum()
}

/// `sin(u)/u` with the limit 1 at the origin.
pub(crate) fn sinc<T: Real>(u: T) -> T {
    if u.abs() < T::lit(1e-4) {
        let u2 = u * u;
        T::one() - u2 / T::lit(6.0) + u2 * u2 / T::lit(120.0)
    } else {
        u.sin() / u
    }
}

/// Free function form of [`GratingSpec::fourier`].
pub fn grating_fourier<T: Real>(spec: &GratingSpec<T>, q: T) -> T {
    spec.fourier(q)
}

/// Arbitrary profile given by samples on an increasing lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAperture<T> {
    x: Vec<T>,
    amplitude: Vec<Complex<T>>,
}

impl<T: Real> SampledAperture<T> {
    pub fn positions(&self) -> &[T] {
        &self.x
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitude
    }

    fn eval(&self, x: T) -> Complex<T> {
        let xs = &self.x;
        let n = xs.len();
        if x < xs[0] || x > xs[n - 1] {
            return Complex::new(T::zero(), T::zero());
        }
        // first index with xs[i] >= x
        let hi = xs.partition_point(|&p| p < x);
        if hi == 0 {
            return self.amplitude[0];
        }
        let lo = hi - 1;
        let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        self.amplitude[lo] * (T::one() - t) + self.amplitude[hi] * t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ApertureKind<T> {
    Grating(GratingSpec<T>),
    Sampled(SampledAperture<T>),
}

/// A transmission profile `A(x)` together with the half-width of its support.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureProfile<T> {
    kind: ApertureKind<T>,
    support_halfwidth: T,
}

impl<T: Real> ApertureProfile<T> {
    pub fn grating(spec: GratingSpec<T>) -> Self {
        Self {
            support_halfwidth: spec.extent() * T::lit(0.5),
            kind: ApertureKind::Grating(spec),
        }
    }

    /// Builds a sampled profile from strictly increasing positions and the
    /// complex amplitudes at those positions. Between samples the profile is
    /// linearly interpolated; outside the sampled range it is zero.
    pub fn sampled(x: Vec<T>, amplitude: Vec<Complex<T>>) -> Result<Self> {
        if x.len() != amplitude.len() {
            return Err(Error::InvalidAperture(format!(
                "{} positions but {} amplitudes",
                x.len(),
                amplitude.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidAperture("need at least two samples".into()));
        }
        if x.iter().any(|v| !v.is_finite())
            || amplitude.iter().any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidAperture("samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidAperture(
                "sample positions must be strictly increasing".into(),
            ));
        }
        let zero = T::zero();
        let mut halfwidth = zero;
        for (i, a) in amplitude.iter().enumerate() {
            if a.norm_sqr() == zero {
                continue;
            }
            // interpolation reaches the neighbouring samples
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(x.len() - 1);
            halfwidth = halfwidth.max(x[lo].abs()).max(x[hi].abs());
        }
        Ok(Self {
            kind: ApertureKind::Sampled(SampledAperture { x, amplitude }),
            support_halfwidth: halfwidth,
        })
    }

    pub fn kind(&self) -> &ApertureKind<T> {
        &self.kind
    }

    pub fn support_halfwidth(&self) -> T {
        self.support_halfwidth
    }

    pub fn as_grating(&self) -> Option<&GratingSpec<T>> {
        match &self.kind {
            ApertureKind::Grating(g) => Some(g),
            ApertureKind::Sampled(_) => None,
        }
    }

    /// Grating period, when the profile is a grating.
    pub fn period(&self) -> Option<T> {
        self.as_grating().map(|g| g.period())
    }

    /// Evaluates `A(x)`. A point lying exactly on a grating slit edge takes
    /// half the slit amplitude.
    pub fn eval(&self, x: T) -> Complex<T> {
        match &self.kind {
            ApertureKind::Grating(g) => {
                let tol = T::epsilon() * T::lit(16.0) * (x.abs() + g.extent());
                Complex::new(g.value_at(x, tol), T::zero())
            }
            ApertureKind::Sampled(s) => {
                if x.abs() > self.support_halfwidth {
                    Complex::new(T::zero(), T::zero())
                } else {
                    s.eval(x)
                }
            }
        }
    }

    /// Samples the profile on a uniform lattice of spacing `dx`. Lattice
    /// points within `1e-6 * dx` of a slit edge (or a few ulps of the
    /// window, whichever is wider) take half the amplitude.
    pub fn sample(&self, positions: &[T], dx: T) -> Vec<Complex<T>> {
        match &self.kind {
            ApertureKind::Grating(g) => {
                let tol = lattice_tolerance(positions, dx);
                positions
                    .iter()
                    .map(|&x| Complex::new(g.value_at(x, tol), T::zero()))
                    .collect()
            }
            ApertureKind::Sampled(_) => positions.iter().map(|&x| self.eval(x)).collect(),
        }
    }

    /// One-sided limits `(A(x-0), A(x+0))` at each lattice point.
    fn sample_sides(&self, positions: &[T], dx: T) -> Vec<(Complex<T>, Complex<T>)> {
        match &self.kind {
            ApertureKind::Grating(g) => {
                let tol = lattice_tolerance(positions, dx);
                let h = tol * T::lit(2.0);
                positions
                    .iter()
                    .map(|&x| {
                        if g.value_at(x, tol) == g.amplitude * T::lit(0.5) && g.amplitude > T::zero()
                        {
                            (
                                Complex::new(g.value_at(x - h, T::zero()), T::zero()),
                                Complex::new(g.value_at(x + h, T::zero()), T::zero()),
                            )
                        } else {
                            let v = Complex::new(g.value_at(x, tol), T::zero());
                            (v, v)
                        }
                    })
                    .collect()
            }
            ApertureKind::Sampled(_) => positions
                .iter()
                .map(|&x| {
                    let v = self.eval(x);
                    (v, v)
                })
                .collect(),
        }
    }
}

/// Samples the product `A(x) B(x)` (with `B = 1` when `b` is `None`) on a
/// lattice. Points on a discontinuity take the mean of the one-sided limits
/// of the product, which for a binary grating gives `A^2 = A0 A` rather
/// than the square of the half-amplitude edge sample.
pub fn sample_product<T: Real>(
    a: &ApertureProfile<T>,
    b: Option<&ApertureProfile<T>>,
    positions: &[T],
    dx: T,
) -> Vec<Complex<T>> {
    let sa = a.sample_sides(positions, dx);
    let half = T::lit(0.5);
    match b {
        None => sa.into_iter().map(|(l, r)| (l + r) * half).collect(),
        Some(b) => {
            let sb = b.sample_sides(positions, dx);
            sa.into_iter()
                .zip(sb)
                .map(|((al, ar), (bl, br))| (al * bl + ar * br) * half)
                .collect()
        }
    }
}

/// Evaluates `A(x)`; see [`ApertureProfile::eval`].
pub fn aperture_eval<T: Real>(profile: &ApertureProfile<T>, x: T) -> Complex<T> {
    profile.eval(x)
}

fn lattice_tolerance<T: Real>(positions: &[T], dx: T) -> T {
    let reach = positions.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    (dx * T::lit(1e-6)).max(T::epsilon() * T::lit(64.0) * reach)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grating(n: usize) -> GratingSpec<f64> {
        GratingSpec::new(1.0, 3.2, 1.0, n).unwrap()
    }

    #[test]
    fn single_slit_center_and_outside() {
        let spec = GratingSpec::new(1.0, 250.0, 125.0, 1).unwrap();
        let a = ApertureProfile::grating(spec);
        assert_eq!(a.eval(0.0).re, 1.0);
        assert_eq!(a.eval(100.0).re, 0.0);
        assert_eq!(a.eval(-100.0).re, 0.0);
        assert_eq!(a.support_halfwidth(), 62.5);
    }

    #[test]
    fn double_slit_centers_are_symmetric() {
        let a = ApertureProfile::grating(unit_grating(2));
        assert_eq!(a.eval(1.6).re, 1.0);
        assert_eq!(a.eval(-1.6).re, 1.0);
        assert_eq!(a.eval(0.0).re, 0.0);
        assert_eq!(a.eval(2.1).re, 0.5);
    }

    #[test]
    fn rejects_invalid_gratings() {
        assert!(GratingSpec::new(1.0, 1.0, 1.0, 3).is_err());
        assert!(GratingSpec::new(1.0, 1.0, 0.0, 3).is_err());
        assert!(GratingSpec::new(1.0, 1.0, 0.5, 0).is_err());
        assert!(GratingSpec::new(-1.0, 1.0, 0.5, 2).is_err());
        assert!(GratingSpec::new(f64::NAN, 1.0, 0.5, 2).is_err());
        assert!(GratingSpec::new(0.0, 1.0, 0.5, 2).is_ok());
    }

    #[test]
    fn extent_matches_slit_layout() {
        let g = unit_grating(10);
        assert!((g.extent() - (9.0 * 3.2 + 1.0)).abs() < 1e-12);
        assert!((g.slit_center(0) + 14.4).abs() < 1e-12);
        assert!((g.slit_center(9) - 14.4).abs() < 1e-12);
    }

    #[test]
    fn fourier_at_origin_is_total_open_area() {
        let g = GratingSpec::new(0.7, 3.2, 1.0, 10).unwrap();
        let expected = 0.7 * 10.0 * 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((g.fourier(0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn fourier_vanishes_at_first_array_zero() {
        for n in 2..8 {
            let g = unit_grating(n);
            let q = 2.0 * std::f64::consts::PI / (n as f64 * 3.2);
            assert!(g.fourier(q).abs() < 1e-14, "N = {n}");
        }
    }

    #[test]
    fn fourier_limit_at_principal_orders() {
        let g = unit_grating(5);
        let q0 = g.q0();
        for m in 1..4 {
            let q = m as f64 * q0;
            let slit = (q * 0.5).sin() / (q * 0.5);
            let expected = 5.0 / (2.0 * std::f64::consts::PI).sqrt() * slit;
            assert!((g.fourier(q) - expected).abs() < 1e-12);
            // continuity across the removable singularity
            let near = g.fourier(q * (1.0 + 1e-9));
            assert!((near - expected).abs() < 1e-6 * expected.abs().max(1e-3));
        }
        // even N flips sign at odd orders
        let g = unit_grating(4);
        assert!(g.fourier(g.q0()) < 0.0);
    }

    #[test]
    fn first_order_ratio_is_sinc_squared() {
        let g = unit_grating(10);
        let ratio = (g.fourier(g.q0()) / g.fourier(0.0)).powi(2);
        let u = std::f64::consts::PI / 3.2;
        assert!((ratio - (u.sin() / u).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn sampled_profile_interpolates_and_bounds_support() {
        let x = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
        let a = vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ];
        let p: ApertureProfile<f64> = ApertureProfile::sampled(x, a).unwrap();
        assert_eq!(p.support_halfwidth(), 1.0);
        assert!((p.eval(0.5).re - 0.5).abs() < 1e-15);
        assert_eq!(p.eval(1.5).re, 0.0);
        assert_eq!(p.eval(5.0).re, 0.0);
    }

    #[test]
    fn sampled_profile_rejects_bad_input() {
        let c = |v: f64| Complex::new(v, 0.0);
        assert!(ApertureProfile::sampled(vec![0.0, 0.0], vec![c(1.0), c(1.0)]).is_err());
        assert!(ApertureProfile::sampled(vec![0.0], vec![c(1.0)]).is_err());
        assert!(ApertureProfile::sampled(vec![0.0, 1.0], vec![c(1.0)]).is_err());
        assert!(ApertureProfile::sampled(vec![0.0, 1.0], vec![c(f64::NAN), c(1.0)]).is_err());
    }

    #[test]
    fn lattice_sampling_uses_half_amplitude_on_edges() {
        let a = ApertureProfile::grating(unit_grating(1));
        let dx = 0.25;
        let xs: Vec<f64> = (-4..=4).map(|j| j as f64 * dx).collect();
        let v: Vec<f64> = a.sample(&xs, dx).iter().map(|c| c.re).collect();
        assert_eq!(v, vec![0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn squared_grating_keeps_half_weight_on_edges() {
        let g = GratingSpec::new(2.0, 3.2, 1.0, 1).unwrap();
        let a = ApertureProfile::grating(g);
        let dx = 0.25;
        let xs: Vec<f64> = (-4..=4).map(|j| j as f64 * dx).collect();
        let sq: Vec<f64> = sample_product(&a, Some(&a), &xs, dx).iter().map(|c| c.re).collect();
        assert_eq!(sq, vec![0.0, 0.0, 2.0, 4.0, 4.0, 4.0, 2.0, 0.0, 0.0]);
        let open: Vec<f64> = sample_product(&a, None, &xs, dx).iter().map(|c| c.re).collect();
        let plain: Vec<f64> = a.sample(&xs, dx).iter().map(|c| c.re).collect();
        assert_eq!(open, plain);
    }

    #[test]
    fn works_in_single_precision() {
        let g = GratingSpec::<f32>::new(1.0, 3.2, 1.0, 4).unwrap();
        let expected = 4.0 / (2.0 * std::f32::consts::PI).sqrt();
        assert!((g.fourier(0.0) - expected).abs() < 1e-5);
    }
}
