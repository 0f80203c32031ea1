use num_complex::Complex;

use crate::scalar::Real;

/// Below this fraction of the largest expected magnitude a point counts as
/// a near-zero and is held to an absolute bound instead.
pub const NEAR_ZERO_FRACTION: f64 = 1e-6;
/// Absolute bound near zeros, as a fraction of the largest magnitude.
pub const NEAR_ZERO_ABS: f64 = 1e-10;

/// Outcome of comparing a computed array against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    /// Largest relative error over points with `|expected| >= 1e-6 max`.
    pub max_rel: f64,
    /// Largest absolute error over the near-zero points, divided by the
    /// largest expected magnitude.
    pub max_abs_near_zero: f64,
    /// Flat index of the worst offender.
    pub worst: Option<usize>,
    pub passed: bool,
}

/// Compares element by element with relative tolerance `rel_tol`, using
/// the absolute bound `1e-10 max|expected|` where `|expected|` is tiny.
pub fn agreement<T, I>(pairs: I, rel_tol: f64) -> Agreement
where
    T: Real,
    I: IntoIterator<Item = (Complex<T>, Complex<T>)>,
{
    let pairs: Vec<(Complex<f64>, Complex<f64>)> = pairs
        .into_iter()
        .map(|(g, e)| {
            (
                Complex::new(g.re.as_f64(), g.im.as_f64()),
                Complex::new(e.re.as_f64(), e.im.as_f64()),
            )
        })
        .collect();
    let scale = pairs.iter().fold(0.0f64, |m, (_, e)| m.max(e.norm()));
    let mut out = Agreement {
        max_rel: 0.0,
        max_abs_near_zero: 0.0,
        worst: None,
        passed: true,
    };
    if scale == 0.0 {
        // reference identically zero: everything must be zero too
        let worst = pairs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.norm().total_cmp(&b.1 .0.norm()));
        if let Some((i, (g, _))) = worst {
            if g.norm() > 0.0 {
                out.max_abs_near_zero = f64::INFINITY;
                out.worst = Some(i);
                out.passed = false;
            }
        }
        return out;
    }
    let mut worst_excess = 0.0f64;
    for (i, (g, e)) in pairs.iter().enumerate() {
        let err = (g - e).norm();
        let excess = if e.norm() >= NEAR_ZERO_FRACTION * scale {
            let rel = err / e.norm();
            out.max_rel = out.max_rel.max(rel);
            rel / rel_tol
        } else {
            let abs = err / scale;
            out.max_abs_near_zero = out.max_abs_near_zero.max(abs);
            abs / NEAR_ZERO_ABS
        };
        if excess > worst_excess || excess.is_nan() {
            worst_excess = if excess.is_nan() { f64::INFINITY } else { excess };
            out.worst = Some(i);
        }
    }
    out.passed = worst_excess <= 1.0;
    out
}

/// [`agreement`] for real sequences.
pub fn agreement_real<T: Real>(got: &[T], expected: &[T], rel_tol: f64) -> Agreement {
    let z = T::zero();
    agreement(
        got.iter()
            .zip(expected)
            .map(|(&g, &e)| (Complex::new(g, z), Complex::new(e, z))),
        rel_tol,
    )
}
