//! Fast evaluation of the discrete joint amplitude
//!
//! `F~(q_k, q_k') = c dx^2 sum_j sum_l A_j B_l G(x_j - x_l) exp(i q_k x_j + i q_k' x_l)`
//!
//! on a window of the conjugate lattice. Every path below reproduces that
//! double sum (up to rounding and a truncation of kernel terms below
//! `1e-15` of the peak); none of them approximates the kernel.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{QAxis, UniformLattice};
use super::oracle::kernel_label;
use super::rates::{Geometry, JointMethod, JointSpectrum, Provenance};
use super::transform::{dft_plus, origin_phase, wrap, Twiddles};
use crate::correlation::CorrelationKernel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Kernel values and spectral terms below this fraction of their peak are
/// dropped.
const NEGLIGIBLE: f64 = 1e-15;

/// The second photon's transmission profile.
#[derive(Debug, Clone, Copy)]
pub enum SecondArm<'a, T> {
    /// Same object as the first photon; the result is symmetric.
    Same,
    Sampled(&'a [Complex<T>]),
    /// No object: `B = 1` across the whole window.
    Open,
}

/// Everything the joint-amplitude sums depend on.
#[derive(Debug, Clone, Copy)]
pub struct JointInput<'a, T> {
    pub lattice: &'a UniformLattice<T>,
    pub a: &'a [Complex<T>],
    pub b: SecondArm<'a, T>,
    /// Samples of `A(x) B(x)` for the Dirac kernel. When absent the
    /// pointwise product of the two sample vectors is used.
    pub product: Option<&'a [Complex<T>]>,
    pub kernel: &'a CorrelationKernel<T>,
    /// Overall constant `c` in front of the sum.
    pub prefactor: T,
}

impl<T: Real> JointInput<'_, T> {
    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.lattice.len();
        let check = |name: &str, len: usize| {
            if len == n {
                Ok(())
            } else {
                Err(Error::ShapeMismatch(format!(
                    "{name} has {len} samples on a lattice of {n} points"
                )))
            }
        };
        check("A", self.a.len())?;
        if let SecondArm::Sampled(b) = self.b {
            check("B", b.len())?;
        }
        if let Some(p) = self.product {
            check("A*B", p.len())?;
        }
        Ok(())
    }

    /// `B` as an explicit sample vector.
    pub(crate) fn b_samples(&self) -> Vec<Complex<T>> {
        match self.b {
            SecondArm::Same => self.a.to_vec(),
            SecondArm::Sampled(b) => b.to_vec(),
            SecondArm::Open => vec![Complex::new(T::one(), T::zero()); self.lattice.len()],
        }
    }

    pub(crate) fn product_samples(&self) -> Vec<Complex<T>> {
        match self.product {
            Some(p) => p.to_vec(),
            None => self
                .a
                .iter()
                .zip(self.b_samples())
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    fn symmetric(&self) -> bool {
        matches!(self.b, SecondArm::Same)
    }
}

pub(crate) struct JointOutput<T> {
    pub values: Array2<Complex<T>>,
    /// `sum_{k'} |F~(q_k, q_k')|^2 dq` over the whole periodic lattice, for
    /// each row of the window.
    pub row_power: Vec<T>,
    pub method: JointMethod,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn support<T: Real>(v: &[Complex<T>]) -> Option<(usize, usize)> {
    let lo = v.iter().position(|c| c.norm_sqr() > T::zero())?;
    let hi = v.iter().rposition(|c| c.norm_sqr() > T::zero())?;
    Some((lo, hi))
}

/// Builds the window matrix row by row in parallel. `row(i, start)` returns
/// columns `start..len`; for symmetric problems only the upper triangle is
/// computed and mirrored, so the result is exactly symmetric.
fn assemble<T, F>(len: usize, symmetric: bool, row: F) -> Array2<Complex<T>>
where
    T: Real,
    F: Fn(usize, usize) -> Vec<Complex<T>> + Sync,
{
    let rows: Vec<Vec<Complex<T>>> = (0..len)
        .into_par_iter()
        .map(|i| row(i, if symmetric { i } else { 0 }))
        .collect();
    let mut out = Array2::from_elem((len, len), zero());
    for (i, r) in rows.into_iter().enumerate() {
        let start = if symmetric { i } else { 0 };
        for (c, v) in r.into_iter().enumerate() {
            out[[i, start + c]] = v;
            if symmetric {
                out[[start + c, i]] = v;
            }
        }
    }
    out
}

/// Which sum to use for sampled kernels. Both give the same numbers; they
/// differ only in cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelPath {
    /// Cheaper of the two, estimated from the number of significant terms.
    #[default]
    Auto,
    LagBand,
    /// Fails when kernel lags wrap around the periodic lattice.
    FrequencyBand,
}

pub(crate) fn fast_joint<T: Real>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    path: KernelPath,
) -> Result<JointOutput<T>> {
    input.validate()?;
    match input.kernel {
        CorrelationKernel::Dirac => Ok(single_integral(input, axis)),
        CorrelationKernel::Constant => Ok(separable(input, axis)),
        _ => kernel_sum(input, axis, path),
    }
}

fn phases<T: Real>(lattice: &UniformLattice<T>, axis: &QAxis<T>) -> Vec<Complex<T>> {
    (0..axis.len()).map(|i| origin_phase(lattice, axis.k(i))).collect()
}

fn single_integral<T: Real>(input: &JointInput<T>, axis: &QAxis<T>) -> JointOutput<T> {
    let lat = input.lattice;
    let n = lat.len();
    let h = dft_plus(&input.product_samples());
    let ph = phases(lat, axis);
    let scale = input.prefactor * lat.dx();
    let values = assemble(axis.len(), input.symmetric(), |i, start| {
        (start..axis.len())
            .map(|c| h[wrap(axis.k(i) + axis.k(c), n)] * (ph[i] * ph[c]) * scale)
            .collect()
    });
    // every row sees the same rotated copy of h
    let total: T = h.iter().map(|v| v.norm_sqr()).sum();
    let power = total * scale * scale * lat.dq();
    JointOutput {
        values,
        row_power: vec![power; axis.len()],
        method: JointMethod::SingleIntegral,
    }
}

fn separable<T: Real>(input: &JointInput<T>, axis: &QAxis<T>) -> JointOutput<T> {
    let lat = input.lattice;
    let n = lat.len();
    let ah = dft_plus(input.a);
    let bh = match input.b {
        SecondArm::Same => ah.clone(),
        SecondArm::Sampled(b) => dft_plus(b),
        SecondArm::Open => {
            let mut v = vec![zero(); n];
            v[0] = Complex::new(T::from_usize_lossy(n), T::zero());
            v
        }
    };
    let ph = phases(lat, axis);
    let scale = input.prefactor * lat.dx() * lat.dx();
    let values = assemble(axis.len(), input.symmetric(), |i, start| {
        let a = ah[wrap(axis.k(i), n)];
        (start..axis.len())
            .map(|c| a * bh[wrap(axis.k(c), n)] * (ph[i] * ph[c]) * scale)
            .collect()
    });
    let b_total: T = bh.iter().map(|v| v.norm_sqr()).sum();
    let w = scale * scale * lat.dq();
    let row_power = (0..axis.len())
        .map(|i| ah[wrap(axis.k(i), n)].norm_sqr() * b_total * w)
        .collect();
    JointOutput {
        values,
        row_power,
        method: JointMethod::Separable,
    }
}

/// Kernel on the non-negative lags `0..n`, plus the largest lag whose value
/// is not negligible.
struct LagTable<T> {
    values: Vec<T>,
    reach: usize,
}

impl<T: Real> LagTable<T> {
    fn new(kernel: &CorrelationKernel<T>, dx: T, n: usize) -> Result<Self> {
        let values = (0..n)
            .map(|t| kernel.eval(T::from_usize_lossy(t) * dx))
            .collect::<Result<Vec<T>>>()?;
        let peak = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let cut = peak * T::lit(NEGLIGIBLE).max(T::epsilon() * T::lit(1e-2));
        let reach = values.iter().rposition(|v| v.abs() > cut).unwrap_or(0);
        Ok(Self { values, reach })
    }

    fn at(&self, t: i64) -> T {
        self.values[t.unsigned_abs() as usize]
    }
}

fn kernel_sum<T: Real>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    path: KernelPath,
) -> Result<JointOutput<T>> {
    let lat = input.lattice;
    let n = lat.len();
    let len = axis.len();
    let lags = LagTable::new(input.kernel, lat.dx(), n)?;
    let b = input.b_samples();

    let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (support(input.a), support(&b)) else {
        return Ok(JointOutput {
            values: Array2::from_elem((len, len), zero()),
            row_power: vec![T::zero(); len],
            method: JointMethod::LagBand { lags: 0 },
        });
    };

    // lags t = l - j spanned by the two supports
    let t_min = b_lo as i64 - a_hi as i64;
    let t_max = b_hi as i64 - a_lo as i64;
    let d_max = t_min.unsigned_abs().max(t_max.unsigned_abs()) as usize;
    // the periodic kernel spectrum represents every lag faithfully when no
    // lag wraps, or when the kernel has died out before the wrapped ones
    let periodic_ok = 2 * d_max < n || lags.reach < n - d_max;

    let t_lo = t_min.max(-(lags.reach as i64));
    let t_hi = t_max.min(lags.reach as i64);
    let lag_count = (t_hi - t_lo + 1).max(0) as usize;

    let log_n = (usize::BITS - n.leading_zeros()) as f64;
    let len2 = (len * len) as f64;
    let cost_lag = lag_count as f64 * (n as f64 * log_n + len2);

    let ph = phases(lat, axis);
    let scale = input.prefactor * lat.dx() * lat.dx();
    let finish = |s: Complex<T>, i: usize, c: usize| s * (ph[i] * ph[c]) * scale;

    let mut method = JointMethod::LagBand { lags: lag_count };
    let mut values = None;
    if path == KernelPath::FrequencyBand && !periodic_ok {
        return Err(Error::InvalidScenario(
            "kernel lags wrap around the window; the frequency band is not exact here".into(),
        ));
    }
    if periodic_ok && path != KernelPath::LagBand {
        let band = kernel_band(&lags, n);
        let cost_freq = match input.b {
            SecondArm::Open => len2,
            _ => band.len() as f64 * len2,
        };
        if cost_freq <= cost_lag || path == KernelPath::FrequencyBand {
            method = JointMethod::FrequencyBand { terms: band.len() };
            values = Some(frequency_band(input, axis, &band, &finish));
        }
    }
    let values = match values {
        Some(v) => v,
        None => lag_band(input, axis, &b, &lags, (t_lo, t_hi), &finish),
    };

    let power = kernel_row_power(input, axis, &b, &lags, (a_lo, a_hi), (b_lo, b_hi));
    let w = scale * scale * lat.dq();
    Ok(JointOutput {
        values,
        row_power: power.into_iter().map(|p| p * w).collect(),
        method,
    })
}

/// Significant terms `(m, g_m)` of the DFT of the wrapped kernel lattice.
fn kernel_band<T: Real>(lags: &LagTable<T>, n: usize) -> Vec<(i64, Complex<T>)> {
    let wrapped: Vec<Complex<T>> = (0..n)
        .map(|t| Complex::new(lags.values[t.min(n - t)], T::zero()))
        .collect();
    let g = dft_plus(&wrapped);
    let peak = g.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let cut = peak * T::lit(NEGLIGIBLE).max(T::epsilon() * T::lit(1e-2));
    let half = (n / 2) as i64;
    (-half..half)
        .filter_map(|m| {
            let v = g[wrap(m, n)];
            (v.norm() > cut).then_some((m, v))
        })
        .collect()
}

/// `S(k, k') = (1/n) sum_m g_m A^[k - m] B^[k' + m]`.
fn frequency_band<T: Real, F>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    band: &[(i64, Complex<T>)],
    finish: &F,
) -> Array2<Complex<T>>
where
    F: Fn(Complex<T>, usize, usize) -> Complex<T> + Sync,
{
    let n = input.lattice.len();
    let inv_n = T::one() / T::from_usize_lossy(n);
    let ah = dft_plus(input.a);
    if let SecondArm::Open = input.b {
        // B^ = n delta: only m = -k' survives
        let g: Vec<Complex<T>> = {
            let mut full = vec![zero(); n];
            for &(m, v) in band {
                full[wrap(m, n)] = v;
            }
            full
        };
        return assemble(axis.len(), false, |i, _| {
            (0..axis.len())
                .map(|c| {
                    let (k, kp) = (axis.k(i), axis.k(c));
                    finish(g[wrap(-kp, n)] * ah[wrap(k + kp, n)], i, c)
                })
                .collect()
        });
    }
    let bh = match input.b {
        SecondArm::Sampled(b) => dft_plus(b),
        _ => ah.clone(),
    };
    assemble(axis.len(), input.symmetric(), |i, start| {
        let k = axis.k(i);
        let mut acc = vec![zero(); axis.len() - start];
        for &(m, g) in band {
            let coef = g * ah[wrap(k - m, n)] * inv_n;
            for (c, slot) in acc.iter_mut().enumerate() {
                *slot = *slot + coef * bh[wrap(axis.k(start + c) + m, n)];
            }
        }
        acc.into_iter()
            .enumerate()
            .map(|(c, s)| finish(s, i, start + c))
            .collect()
    })
}

/// `S(k, k') = sum_t G_t w^{t k'} P_t[k + k']` with
/// `P_t[m] = sum_j A_j B_{j+t} w^{j m}`.
fn lag_band<T: Real, F>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    b: &[Complex<T>],
    lags: &LagTable<T>,
    (t_lo, t_hi): (i64, i64),
    finish: &F,
) -> Array2<Complex<T>>
where
    F: Fn(Complex<T>, usize, usize) -> Complex<T> + Sync,
{
    let n = input.lattice.len();
    let len = axis.len();
    let a = input.a;
    let plan: Arc<dyn Fft<T>> = FftPlanner::new().plan_fft_inverse(n);
    let m0 = 2 * axis.k_min();
    let ts: Vec<i64> = (t_lo..=t_hi).collect();
    let partial: Vec<Vec<Complex<T>>> = ts
        .par_iter()
        .map(|&t| {
            let mut buf = vec![zero(); n];
            let j_lo = 0i64.max(-t) as usize;
            let j_hi = (n as i64).min(n as i64 - t) as usize;
            for j in j_lo..j_hi {
                buf[j] = a[j] * b[(j as i64 + t) as usize];
            }
            plan.process(&mut buf);
            (0..2 * len - 1)
                .map(|u| buf[wrap(m0 + u as i64, n)])
                .collect()
        })
        .collect();
    let tw = Twiddles::<T>::new(n);
    assemble(len, input.symmetric(), |i, start| {
        let mut acc = vec![zero(); len - start];
        for (ti, &t) in ts.iter().enumerate() {
            let g = lags.at(t);
            if g == T::zero() {
                continue;
            }
            let p = &partial[ti];
            for (c, slot) in acc.iter_mut().enumerate() {
                let col = start + c;
                *slot = *slot + tw.pow(t * axis.k(col)) * p[i + col] * g;
            }
        }
        acc.into_iter()
            .enumerate()
            .map(|(c, s)| finish(s, i, start + c))
            .collect()
    })
}

/// `sum_{k'} |S(k, k')|^2` over the full lattice, which by Parseval over
/// `l` equals `n sum_l |B_l|^2 |c_l(k)|^2` with
/// `c_l(k) = sum_j A_j w^{jk} G_{l-j}` (a linear convolution).
fn kernel_row_power<T: Real>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    b: &[Complex<T>],
    lags: &LagTable<T>,
    (a_lo, a_hi): (usize, usize),
    (b_lo, b_hi): (usize, usize),
) -> Vec<T> {
    let n = input.lattice.len();
    let reach = lags.reach;
    let span = a_hi - a_lo + 1;
    let size = (span + 2 * reach).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut kern = vec![zero(); size];
    for s in 0..=2 * reach {
        kern[s] = Complex::new(lags.at(s as i64 - reach as i64), T::zero());
    }
    fwd.process(&mut kern);
    let inv_size = T::one() / T::from_usize_lossy(size);
    let tw = Twiddles::<T>::new(n);
    let n_t = T::from_usize_lossy(n);
    (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let k = axis.k(i);
            let mut buf = vec![zero(); size];
            for (jj, slot) in buf.iter_mut().take(span).enumerate() {
                let j = a_lo + jj;
                *slot = input.a[j] * tw.pow(j as i64 * k);
            }
            fwd.process(&mut buf);
            for (v, g) in buf.iter_mut().zip(&kern) {
                *v = *v * g;
            }
            inv.process(&mut buf);
            // conv index for l is l - a_lo + reach
            let mut total = T::zero();
            for l in b_lo..=b_hi {
                let idx = l as i64 - a_lo as i64 + reach as i64;
                if idx < 0 || idx as usize >= span + 2 * reach {
                    continue;
                }
                let c = buf[idx as usize] * inv_size;
                total = total + b[l].norm_sqr() * c.norm_sqr();
            }
            total * n_t
        })
        .collect()
}

/// Fast joint amplitude on `axis`, dispatched on the kernel.
pub fn joint_spectrum<T: Real>(input: &JointInput<T>, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
    joint_spectrum_via(input, axis, KernelPath::Auto)
}

/// [`joint_spectrum`] with an explicit choice of kernel sum.
pub fn joint_spectrum_via<T: Real>(
    input: &JointInput<T>,
    axis: &QAxis<T>,
    path: KernelPath,
) -> Result<JointSpectrum<T>> {
    let out = fast_joint(input, axis, path)?;
    Ok(JointSpectrum {
        axis: *axis,
        values: out.values,
        row_power: Some(out.row_power),
        provenance: Provenance {
            geometry: match input.b {
                SecondArm::Same => Geometry::SameObject,
                _ => Geometry::TwoArm,
            },
            kernel: kernel_label(input.kernel),
            method: out.method,
            n_x: input.lattice.len(),
            dx: input.lattice.dx().as_f64(),
        },
    })
}
