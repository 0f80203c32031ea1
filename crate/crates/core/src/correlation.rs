//! Transverse correlation kernels `G(x - x')` between the two photons of a
//! pair, and their Fourier images `g(kappa)`.

use crate::aperture::sinc;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the dimensionless parameter `r` maps onto the Gaussian width `w` in
/// `G(dx) = exp(-(dx / w)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthConvention {
    /// `w = r d / (2 sqrt(ln 2))`: `r d` is the full width at half maximum.
    #[default]
    Fwhm,
    /// `w = r d / (2 ln 2)`. With `r = 0.78` this gives `w = 0.5627 d`,
    /// the width quoted for the fitted lens-geometry data.
    TwoLnTwo,
}

impl WidthConvention {
    pub fn width<T: Real>(self, r: T, d_ref: T) -> T {
        let ln2 = T::LN_2();
        match self {
            WidthConvention::Fwhm => r * d_ref / (T::lit(2.0) * ln2.sqrt()),
            WidthConvention::TwoLnTwo => r * d_ref / (T::lit(2.0) * ln2),
        }
    }
}

/// Symmetric kernel tabulated at non-negative offsets and linearly
/// interpolated between them. Zero beyond the last offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledKernel<T> {
    offsets: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> SampledKernel<T> {
    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn eval(&self, dx: T) -> T {
        let u = dx.abs();
        let last = self.offsets.len() - 1;
        if u > self.offsets[last] {
            return T::zero();
        }
        let hi = self.offsets.partition_point(|&p| p < u);
        if hi == 0 {
            return self.values[0];
        }
        let lo = hi - 1;
        let t = (u - self.offsets[lo]) / (self.offsets[hi] - self.offsets[lo]);
        self.values[lo] * (T::one() - t) + self.values[hi] * t
    }

    /// Exact transform of the piecewise-linear interpolant.
    fn fourier(&self, kappa: T) -> T {
        let mut acc = T::zero();
        for i in 0..self.offsets.len() - 1 {
            let (u0, u1) = (self.offsets[i], self.offsets[i + 1]);
            let (a, b) = (self.values[i], self.values[i + 1]);
            let h = u1 - u0;
            let slope = (b - a) / h;
            let half = T::lit(0.5);
            // int_u0^u1 (a + slope (u - u0)) cos(kappa u) du, written with
            // sinc factors so that kappa -> 0 stays well conditioned
            let edge = b * u1 * sinc(kappa * u1) - a * u0 * sinc(kappa * u0);
            let ramp = slope * (u0 + u1) * h * half
                * sinc(kappa * (u0 + u1) * half)
                * sinc(kappa * h * half);
            acc = acc + edge - ramp;
        }
        T::lit(2.0) / T::TAU().sqrt() * acc
    }
}

/// Fourier image of a kernel. Constant and Dirac kernels transform into
/// distributions and are reported symbolically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FourierImage<T> {
    Value(T),
    /// `weight * delta(kappa)`.
    Delta { weight: T },
    /// A constant function of `kappa`.
    Flat(T),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationKernel<T> {
    /// `G = 1`: no transverse correlation.
    Constant,
    /// `G = delta(x - x')`: perfect correlation. Never sampled; the engine
    /// routes it to the single-integral form.
    Dirac,
    Gaussian {
        r: T,
        d_ref: T,
        convention: WidthConvention,
    },
    SampledSymmetric(SampledKernel<T>),
}

impl<T: Real> CorrelationKernel<T> {
    pub fn gaussian(r: T, d_ref: T, convention: WidthConvention) -> Result<Self> {
        if !(r.is_finite() && r > T::zero()) {
            return Err(Error::InvalidKernel(format!("r must be positive, got {r}")));
        }
        if !(d_ref.is_finite() && d_ref > T::zero()) {
            return Err(Error::InvalidKernel(format!(
                "reference length must be positive, got {d_ref}"
            )));
        }
        Ok(CorrelationKernel::Gaussian {
            r,
            d_ref,
            convention,
        })
    }

    /// Builds a tabulated kernel. Offsets may cover only `dx >= 0` (starting
    /// at zero) or a lattice symmetric about zero, in which case the two
    /// halves must agree. Values are rescaled so that `G(0) = 1`.
    pub fn sampled_symmetric(offsets: Vec<T>, values: Vec<T>) -> Result<Self> {
        if offsets.len() != values.len() || offsets.len() < 2 {
            return Err(Error::InvalidKernel(
                "need at least two (offset, value) pairs of equal length".into(),
            ));
        }
        if offsets.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidKernel("samples must be finite".into()));
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidKernel("offsets must be strictly increasing".into()));
        }
        let (offsets, values) = fold_symmetric(offsets, values)?;
        if offsets[0] != T::zero() {
            return Err(Error::InvalidKernel("offsets must start at zero".into()));
        }
        let peak = values[0];
        if !(peak > T::zero()) {
            return Err(Error::InvalidKernel("G(0) must be positive".into()));
        }
        let values: Vec<T> = values.into_iter().map(|v| v / peak).collect();
        if values.iter().any(|&v| v < T::zero() || v > T::one()) {
            return Err(Error::InvalidKernel("need 0 <= G(dx) <= G(0)".into()));
        }
        Ok(CorrelationKernel::SampledSymmetric(SampledKernel { offsets, values }))
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self, CorrelationKernel::Dirac)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CorrelationKernel::Constant)
    }

    /// Width `w` of `exp(-(dx/w)^2)` for Gaussian kernels.
    pub fn gaussian_width(&self) -> Option<T> {
        match *self {
            CorrelationKernel::Gaussian {
                r,
                d_ref,
                convention,
            } => Some(convention.width(r, d_ref)),
            _ => None,
        }
    }

    /// Same Gaussian kernel with a different `r`.
    pub fn with_r(&self, r: T) -> Result<Self> {
        match *self {
            CorrelationKernel::Gaussian {
                d_ref, convention, ..
            } => Self::gaussian(r, d_ref, convention),
            _ => Err(Error::InvalidKernel("only Gaussian kernels carry r".into())),
        }
    }

    /// `G(dx)`. The Dirac kernel has no pointwise value and yields
    /// [`Error::AnalyticKernel`].
    pub fn eval(&self, dx: T) -> Result<T> {
        match self {
            CorrelationKernel::Constant => Ok(T::one()),
            CorrelationKernel::Dirac => Err(Error::AnalyticKernel),
            CorrelationKernel::Gaussian { .. } => {
                let w = self.gaussian_width().unwrap_or_else(T::one);
                let u = dx / w;
                Ok((-(u * u)).exp())
            }
            CorrelationKernel::SampledSymmetric(s) => Ok(s.eval(dx)),
        }
    }

    /// `g(kappa) = (2 pi)^{-1/2} int G(u) exp(i kappa u) du`.
    pub fn fourier(&self, kappa: T) -> FourierImage<T> {
        match self {
            CorrelationKernel::Constant => FourierImage::Delta {
                weight: T::TAU().sqrt(),
            },
            CorrelationKernel::Dirac => FourierImage::Flat(T::one() / T::TAU().sqrt()),
            CorrelationKernel::Gaussian { .. } => {
                let w = self.gaussian_width().unwrap_or_else(T::one);
                let quarter = T::lit(0.25);
                FourierImage::Value(w / T::SQRT_2() * (-(kappa * kappa * w * w * quarter)).exp())
            }
            CorrelationKernel::SampledSymmetric(s) => FourierImage::Value(s.fourier(kappa)),
        }
    }
}

fn fold_symmetric<T: Real>(offsets: Vec<T>, values: Vec<T>) -> Result<(Vec<T>, Vec<T>)> {
    if offsets[0] >= T::zero() {
        return Ok((offsets, values));
    }
    let n = offsets.len();
    let scale = offsets[n - 1].abs().max(offsets[0].abs());
    for i in 0..n {
        let j = n - 1 - i;
        let off_err = (offsets[i] + offsets[j]).abs();
        let val_err = (values[i] - values[j]).abs();
        let val_scale = values[i].abs().max(values[j].abs()).max(T::min_positive_value());
        if off_err > T::lit(1e-12) * scale || val_err > T::lit(1e-12) * val_scale {
            return Err(Error::InvalidKernel(
                "kernel samples are not symmetric about zero".into(),
            ));
        }
    }
    let start = offsets.partition_point(|&o| o < T::zero());
    Ok((offsets[start..].to_vec(), values[start..].to_vec()))
}

/// Evaluates `G(dx)`; see [`CorrelationKernel::eval`].
pub fn correlation_eval<T: Real>(kernel: &CorrelationKernel<T>, dx: T) -> Result<T> {
    kernel.eval(dx)
}

/// Fourier image `g(kappa)`; see [`CorrelationKernel::fourier`].
pub fn correlation_fourier<T: Real>(kernel: &CorrelationKernel<T>, kappa: T) -> FourierImage<T> {
    kernel.fourier(kappa)
}
