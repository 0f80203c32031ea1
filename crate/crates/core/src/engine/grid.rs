use crate::aperture::ApertureProfile;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest padding factor between the aperture support and the window.
pub const MIN_PADDING: f64 = 4.0;

/// A uniform lattice `x_j = x_min + j dx`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformLattice<T> {
    x_min: T,
    dx: T,
    n: usize,
}

impl<T: Real> UniformLattice<T> {
    pub fn new(x_min: T, dx: T, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(dx.is_finite() && dx > T::zero() && x_min.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad lattice origin {x_min} / spacing {dx}")));
        }
        Ok(Self { x_min, dx, n })
    }

    /// Validates that `points` are uniformly spaced (to 1e-9 of the spacing).
    pub fn from_points(points: &[T]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        let n = points.len();
        let dx = (points[n - 1] - points[0]) / T::from_usize_lossy(n - 1);
        let tol = T::lit(1e-9);
        for (j, &p) in points.iter().enumerate() {
            let expected = points[0] + T::from_usize_lossy(j) * dx;
            let dev = ((p - expected) / dx).abs();
            if !(dev <= tol) {
                return Err(Error::NonUniformLattice {
                    index: j,
                    deviation: dev.as_f64(),
                });
            }
        }
        Self::new(points[0], dx, n)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x(&self, j: usize) -> T {
        self.x_min + T::from_usize_lossy(j) * self.dx
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Spacing of the conjugate lattice, `2 pi / (n dx)`.
    pub fn dq(&self) -> T {
        T::TAU() / (T::from_usize_lossy(self.n) * self.dx)
    }
}

/// A contiguous run of conjugate-lattice points `q_k = k dq`,
/// `k = k_min .. k_min + len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QAxis<T> {
    k_min: i64,
    len: usize,
    dq: T,
    q_unit: T,
}

impl<T: Real> QAxis<T> {
    pub fn new(k_min: i64, len: usize, dq: T, q_unit: T) -> Self {
        Self {
            k_min,
            len,
            dq,
            q_unit,
        }
    }

    /// Symmetric axis `k = -half ..= half`.
    pub fn symmetric(half: i64, dq: T, q_unit: T) -> Self {
        Self::new(-half, (2 * half + 1) as usize, dq, q_unit)
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.len as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dq(&self) -> T {
        self.dq
    }

    /// Unit used when reporting normalized wavenumbers (`q0` for gratings).
    pub fn q_unit(&self) -> T {
        self.q_unit
    }

    pub fn k(&self, i: usize) -> i64 {
        self.k_min + i as i64
    }

    pub fn q(&self, i: usize) -> T {
        T::from_i64_lossy(self.k(i)) * self.dq
    }

    pub fn q_normalized(&self, i: usize) -> T {
        self.q(i) / self.q_unit
    }

    pub fn index_of(&self, k: i64) -> Option<usize> {
        let i = k - self.k_min;
        (i >= 0 && (i as usize) < self.len).then_some(i as usize)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.len).map(|i| self.q(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSpec<T> {
    /// Window width in length units.
    Explicit(T),
    /// Window = padding factor times the aperture extent, rounded up so that
    /// it is a power-of-two multiple of twice the grating period.
    Padding(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub n_x: usize,
    pub window: WindowSpec<T>,
    /// Half-width of the reported q-window in units of `q0`.
    pub q_window_q0: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            n_x: 16_384,
            window: WindowSpec::Padding(T::lit(MIN_PADDING)),
            q_window_q0: T::lit(2.5),
        }
    }
}

/// Matched object-plane and far-field sampling.
///
/// The object lattice is `x_j = (j - n/2) dx`, symmetric about zero; the
/// far-field lattice is its conjugate, `q_k = k dq` with `dq = 2 pi / W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationGrid<T> {
    lattice: UniformLattice<T>,
    q0: Option<T>,
    q_half: i64,
}

impl<T: Real> SimulationGrid<T> {
    /// `n` must be even. `q0` is the normalization unit of the q axes (when
    /// absent, q is reported in raw rad/length). The display window covers
    /// `|q| <= q_window * q0`.
    pub fn new(n: usize, window: T, q0: Option<T>, q_window: T) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n_x must be even and >= 4, got {n}")));
        }
        if !(window.is_finite() && window > T::zero()) {
            return Err(Error::InvalidGrid(format!("window must be positive, got {window}")));
        }
        if !(q_window.is_finite() && q_window > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "q window must be positive, got {q_window}"
            )));
        }
        if let Some(q0) = q0 {
            if !(q0.is_finite() && q0 > T::zero()) {
                return Err(Error::InvalidGrid(format!("q0 must be positive, got {q0}")));
            }
        }
        let dx = window / T::from_usize_lossy(n);
        let x_min = -T::from_usize_lossy(n / 2) * dx;
        let lattice = UniformLattice::new(x_min, dx, n)?;
        let unit = q0.unwrap_or_else(T::one);
        let half = (q_window * unit / lattice.dq() + T::lit(1e-9)).floor();
        let q_half = half.to_i64().unwrap_or(0).min((n / 2 - 1) as i64).max(1);
        Ok(Self {
            lattice,
            q0,
            q_half,
        })
    }

    /// Builds the grid for an aperture. Gratings supply `q0 = 2 pi / d`.
    pub fn for_aperture(spec: &GridSpec<T>, aperture: &ApertureProfile<T>) -> Result<Self> {
        let extent = aperture.support_halfwidth() * T::lit(2.0);
        let window = match spec.window {
            WindowSpec::Explicit(w) => w,
            WindowSpec::Padding(p) => {
                if !(p >= T::lit(MIN_PADDING)) {
                    return Err(Error::InvalidGrid(format!(
                        "padding factor must be >= {MIN_PADDING}, got {p}"
                    )));
                }
                padded_window(p * extent, aperture.period())
            }
        };
        let q0 = aperture.as_grating().map(|g| g.q0());
        Self::new(spec.n_x, window, q0, spec.q_window_q0)
    }

    pub fn lattice(&self) -> &UniformLattice<T> {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.len()
    }

    pub fn dx(&self) -> T {
        self.lattice.dx()
    }

    pub fn window(&self) -> T {
        self.lattice.dx() * T::from_usize_lossy(self.n())
    }

    pub fn x(&self, j: usize) -> T {
        self.lattice.x(j)
    }

    pub fn positions(&self) -> Vec<T> {
        self.lattice.positions()
    }

    pub fn dq(&self) -> T {
        self.lattice.dq()
    }

    pub fn q0(&self) -> Option<T> {
        self.q0
    }

    pub fn q_unit(&self) -> T {
        self.q0.unwrap_or_else(T::one)
    }

    /// Number of lattice steps in the half-width of the display window.
    pub fn q_half(&self) -> i64 {
        self.q_half
    }

    /// Reported window, `k = -q_half ..= q_half`.
    pub fn display_axis(&self) -> QAxis<T> {
        QAxis::symmetric(self.q_half, self.dq(), self.q_unit())
    }

    /// The whole conjugate lattice, `k = -n/2 .. n/2`.
    pub fn full_axis(&self) -> QAxis<T> {
        QAxis::new(-((self.n() / 2) as i64), self.n(), self.dq(), self.q_unit())
    }

    /// Axis of `len` points starting at `k_min`, for oracle comparisons.
    pub fn axis(&self, k_min: i64, len: usize) -> QAxis<T> {
        QAxis::new(k_min, len, self.dq(), self.q_unit())
    }

    /// Same window with a different number of points.
    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        let q_window = T::from_i64_lossy(self.q_half) * self.dq() / self.q_unit();
        Self::new(n, self.window(), self.q0, q_window)
    }
}

fn padded_window<T: Real>(min_window: T, period: Option<T>) -> T {
    match period {
        Some(d) => {
            // W = 2 d 2^p places the half orders q0/2 on lattice points and,
            // for dyadic slit ratios, the slit edges as well
            let mut w = T::lit(2.0) * d;
            while w < min_window {
                w = w * T::lit(2.0);
            }
            w
        }
        None => min_window,
    }
}
