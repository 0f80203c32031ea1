//! Measurements on rate profiles: principal maxima, envelope width and
//! fringe visibility. Positions are reported in units of the profile's
//! `q_unit`.

use crate::engine::rates::RateProfile;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub index: usize,
    /// Position in units of `q_unit`.
    pub q: T,
    pub value: T,
}

/// Points that dominate every other point within `half_window` (in units
/// of `q_unit`) on either side. The end points of the profile never count,
/// and of a flat top only the leftmost point is reported.
pub fn principal_maxima<T: Real>(profile: &RateProfile<T>, half_window: T) -> Vec<Peak<T>> {
    let q = profile.q_normalized();
    let v = &profile.values;
    let len = v.len();
    if len < 3 {
        return Vec::new();
    }
    let floor = profile.max() * T::lit(1e-12);
    let mut peaks = Vec::new();
    for i in 1..len - 1 {
        if !(v[i] > floor) {
            continue;
        }
        let mut dominant = true;
        let mut j = i;
        while j > 0 && q[i] - q[j - 1] <= half_window {
            j -= 1;
            if v[j] >= v[i] {
                dominant = false;
                break;
            }
        }
        if dominant {
            let mut j = i;
            while j + 1 < len && q[j + 1] - q[i] <= half_window {
                j += 1;
                if v[j] > v[i] {
                    dominant = false;
                    break;
                }
            }
        }
        if dominant {
            peaks.push(Peak {
                index: i,
                q: q[i],
                value: v[i],
            });
        }
    }
    peaks
}

/// Gaps between consecutive peaks.
pub fn spacings<T: Real>(peaks: &[Peak<T>]) -> Vec<T> {
    peaks.windows(2).map(|w| w[1].q - w[0].q).collect()
}

/// Full width at half maximum of the envelope traced by the principal
/// maxima. Starting at the tallest peak, heights are followed outward on
/// each side until they drop below half of it; the crossing is located by
/// linear interpolation between the two straddling peaks. `None` when the
/// envelope never falls to half within the profile.
pub fn envelope_fwhm<T: Real>(profile: &RateProfile<T>, half_window: T) -> Option<T> {
    let peaks = principal_maxima(profile, half_window);
    let (c, top) = peaks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap_or(std::cmp::Ordering::Equal))?;
    let half = top.value * T::lit(0.5);
    let cross = |a: &Peak<T>, b: &Peak<T>| a.q + (b.q - a.q) * (a.value - half) / (a.value - b.value);
    let right = (c + 1..peaks.len())
        .find(|&j| peaks[j].value < half)
        .map(|j| cross(&peaks[j - 1], &peaks[j]))?;
    let left = (0..c)
        .rev()
        .find(|&j| peaks[j].value < half)
        .map(|j| cross(&peaks[j + 1], &peaks[j]))?;
    Some(right - left)
}

/// `(max - min) / (max + min)` over `|q| <= limit`; zero for an all-zero
/// profile.
pub fn visibility<T: Real>(profile: &RateProfile<T>, limit: T) -> T {
    let p = profile.restricted(limit);
    let mut hi = T::neg_infinity();
    let mut lo = T::infinity();
    for &v in &p.values {
        hi = hi.max(v);
        lo = lo.min(v);
    }
    if p.values.is_empty() || hi + lo <= T::zero() {
        return T::zero();
    }
    (hi - lo) / (hi + lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(values: Vec<f64>) -> RateProfile<f64> {
        let n = values.len() as i64;
        let q = (0..n).map(|i| (i - n / 2) as f64 * 0.1).collect();
        RateProfile::new(q, 1.0, values)
    }

    #[test]
    fn finds_isolated_maxima_only() {
        let p = profile(vec![0.0, 1.0, 0.2, 0.3, 0.1, 0.0, 0.5, 0.0, 0.0]);
        let peaks = principal_maxima(&p, 0.25);
        let idx: Vec<usize> = peaks.iter().map(|p| p.index).collect();
        // 0.3 at index 3 is dominated by 1.0 two steps away
        assert_eq!(idx, vec![1, 6]);
    }

    #[test]
    fn flat_profile_has_no_interior_peaks() {
        let p = profile(vec![1.0; 9]);
        assert!(principal_maxima(&p, 0.25).is_empty());
        assert_eq!(visibility(&p, 10.0), 0.0);
    }

    #[test]
    fn envelope_width_of_comb_under_triangle() {
        // peaks of height 1, 0.75, 0.25 at spacing 0.2 on each side
        let mut v = vec![0.0; 13];
        for (i, h) in [(2, 0.25), (4, 0.75), (6, 1.0), (8, 0.75), (10, 0.25)] {
            v[i] = h;
        }
        let p = profile(v);
        let w = envelope_fwhm(&p, 0.15).unwrap();
        // half max crossed halfway between 0.2 and 0.4 on each side
        assert!((w - 0.6).abs() < 1e-12);
    }

    #[test]
    fn visibility_of_cosine_fringes() {
        let v: Vec<f64> = (0..101).map(|i| 2.0 + (i as f64 * 0.3).cos()).collect();
        let p = profile(v);
        assert!((visibility(&p, 100.0) - 0.5).abs() < 2e-3);
    }
}
