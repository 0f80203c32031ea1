//! Direct double Riemann sum of the joint amplitude. Slow and simple; used
//! to validate the fast paths.

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use super::grid::QAxis;
use super::joint::{JointInput, SecondArm};
use super::rates::{Geometry, JointMethod, JointSpectrum, Provenance};
use crate::correlation::CorrelationKernel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest q window (points per axis) the oracle accepts.
pub const ORACLE_MAX_POINTS: usize = 256;

fn cis<T: Real>(a: T) -> Complex<T> {
    Complex::new(a.cos(), a.sin())
}

/// `F~(q, q') = c sum_j sum_l A(x_j) B(x_l) G(x_j - x_l) exp(i(q x_j + q' x_l)) dx^2`
/// evaluated term by term. The Dirac kernel collapses to the single sum
/// `c sum_j A(x_j) B(x_j) exp(i(q + q') x_j) dx`.
pub fn brute_force_joint<T: Real>(input: &JointInput<T>, axis: &QAxis<T>) -> Result<JointSpectrum<T>> {
    if axis.len() > ORACLE_MAX_POINTS {
        return Err(Error::OracleTooLarge {
            requested: axis.len(),
            limit: ORACLE_MAX_POINTS,
        });
    }
    input.validate()?;
    let lat = input.lattice;
    let dx = lat.dx();
    let nq = axis.len();
    let xs = lat.positions();
    let qs = axis.values();
    let b = input.b_samples();
    let nonzero = |v: &[Complex<T>]| -> Vec<usize> {
        (0..v.len()).filter(|&j| v[j].norm_sqr() > T::zero()).collect()
    };

    let (values, method) = if input.kernel.is_dirac() {
        let p = input.product_samples();
        let js = nonzero(&p);
        let scale = input.prefactor * dx;
        let rows: Vec<Vec<Complex<T>>> = (0..nq)
            .into_par_iter()
            .map(|i| {
                (0..nq)
                    .map(|c| {
                        let q = qs[i] + qs[c];
                        js.iter()
                            .fold(Complex::new(T::zero(), T::zero()), |acc, &j| {
                                acc + p[j] * cis(q * xs[j])
                            })
                            * scale
                    })
                    .collect()
            })
            .collect();
        (rows, JointMethod::SingleIntegral)
    } else {
        let ja = nonzero(input.a);
        let lb = nonzero(&b);
        // M_{jl} = A_j B_l G(x_j - x_l)
        let m: Vec<Vec<Complex<T>>> = ja
            .par_iter()
            .map(|&j| {
                lb.iter()
                    .map(|&l| {
                        let g = input.kernel.eval(xs[j] - xs[l]).unwrap_or_else(|_| T::zero());
                        input.a[j] * b[l] * g
                    })
                    .collect()
            })
            .collect();
        let scale = input.prefactor * dx * dx;
        let rows: Vec<Vec<Complex<T>>> = (0..nq)
            .into_par_iter()
            .map(|i| {
                // w_l = sum_j exp(i q x_j) M_{jl}
                let mut w = vec![Complex::new(T::zero(), T::zero()); lb.len()];
                for (r, &j) in ja.iter().enumerate() {
                    let e = cis(qs[i] * xs[j]);
                    for (wl, mv) in w.iter_mut().zip(&m[r]) {
                        *wl = *wl + e * mv;
                    }
                }
                (0..nq)
                    .map(|c| {
                        lb.iter()
                            .zip(&w)
                            .fold(Complex::new(T::zero(), T::zero()), |acc, (&l, wl)| {
                                acc + *wl * cis(qs[c] * xs[l])
                            })
                            * scale
                    })
                    .collect()
            })
            .collect();
        (rows, JointMethod::BruteForce)
    };

    let mut out = Array2::from_elem((nq, nq), Complex::new(T::zero(), T::zero()));
    for (i, row) in values.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            out[[i, c]] = v;
        }
    }
    Ok(JointSpectrum {
        axis: *axis,
        values: out,
        row_power: None,
        provenance: Provenance {
            geometry: match input.b {
                SecondArm::Same => Geometry::SameObject,
                _ => Geometry::TwoArm,
            },
            kernel: kernel_label(input.kernel),
            method,
            n_x: lat.len(),
            dx: dx.as_f64(),
        },
    })
}

pub(crate) fn kernel_label<T: Real>(kernel: &CorrelationKernel<T>) -> String {
    match kernel {
        CorrelationKernel::Constant => "constant".into(),
        CorrelationKernel::Dirac => "dirac".into(),
        CorrelationKernel::Gaussian { r, convention, .. } => {
            format!("gaussian(r={r}, {convention:?})")
        }
        CorrelationKernel::SampledSymmetric(s) => {
            format!("sampled({} points)", s.values().len())
        }
    }
}
