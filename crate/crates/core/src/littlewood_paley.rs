//! Dyadic frequency projections built from a smooth radial bump, with
//! Bernstein-ratio measurement.
//!
//! The bump is the standard `exp(-1/x)` smoothstep
//!
//! ```text
//! φ(r) = 1                      r <= 1
//!      = h(2-r)/(h(2-r)+h(r-1)) 1 < r < 2,   h(x) = exp(-1/x)
//!      = 0                      r >= 2
//! ```
//!
//! which is C^∞, monotone on `[1, 2]`, with `φ(1) = 1`, `φ(2) = 0`. The
//! projections are the multipliers `P_{≤N}: φ(|ξ|/N)`,
//! `P_N: φ(|ξ|/N) - φ(2|ξ|/N)` and `P_{>N} = 1 - P_{≤N}`, so
//! `P_{≤N} + P_{>N}` is the identity exactly and ranges telescope exactly.

use crate::error::{Result, WaveError};
use crate::spectral::{
    apply_radial_multiplier, forward_transform, fractional_derivative, inverse_transform,
    lebesgue_norm, GridSpec, RealField, SpectralField,
};

/// Smooth transition `h(x) = exp(-1/x)` for `x > 0`, else `0`.
fn h(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// The radial bump profile described in the module docs.
pub fn bump_profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = h(2.0 - r);
        a / (a + h(r - 1.0))
    }
}

/// Dyadic scale `N = 2^k` (physical frequency units).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DyadicIndex(pub i32);

impl DyadicIndex {
    pub fn value(&self) -> f64 {
        (self.0 as f64).exp2()
    }

    /// Smallest dyadic `2^k >= x` for `x > 0`.
    pub fn ceil_from(x: f64) -> Self {
        DyadicIndex(x.log2().ceil() as i32)
    }
}

fn project(field: &SpectralField, symbol: impl Fn(f64) -> f64 + Sync) -> SpectralField {
    // The LP symbols are finite everywhere, so the multiplier cannot fail.
    apply_radial_multiplier(field, symbol).expect("LP symbol is finite")
}

pub fn project_leq_spectral(f: &SpectralField, n: DyadicIndex) -> SpectralField {
    let nv = n.value();
    project(f, move |r| bump_profile(r / nv))
}

pub fn project_gt_spectral(f: &SpectralField, n: DyadicIndex) -> SpectralField {
    let nv = n.value();
    project(f, move |r| 1.0 - bump_profile(r / nv))
}

pub fn project_band_spectral(f: &SpectralField, n: DyadicIndex) -> SpectralField {
    let nv = n.value();
    project(f, move |r| bump_profile(r / nv) - bump_profile(2.0 * r / nv))
}

pub fn project_range_spectral(
    f: &SpectralField,
    m: DyadicIndex,
    n: DyadicIndex,
) -> Result<SpectralField> {
    if m > n {
        return Err(WaveError::Domain(format!(
            "range projection needs M <= N, got 2^{} > 2^{}",
            m.0, n.0
        )));
    }
    let (mv, nv) = (m.value(), n.value());
    Ok(project(f, move |r| bump_profile(r / nv) - bump_profile(r / mv)))
}

/// `P_{≤N} f` on a real field.
pub fn project_leq(f: &RealField, n: DyadicIndex) -> RealField {
    inverse_transform(&project_leq_spectral(&forward_transform(f), n))
}

/// `P_{>N} f`.
pub fn project_gt(f: &RealField, n: DyadicIndex) -> RealField {
    inverse_transform(&project_gt_spectral(&forward_transform(f), n))
}

/// `P_N f`.
pub fn project_band(f: &RealField, n: DyadicIndex) -> RealField {
    inverse_transform(&project_band_spectral(&forward_transform(f), n))
}

/// `P_{M < · ≤ N} f = (P_{≤N} - P_{≤M}) f`.
pub fn project_range(f: &RealField, m: DyadicIndex, n: DyadicIndex) -> Result<RealField> {
    Ok(inverse_transform(&project_range_spectral(&forward_transform(f), m, n)?))
}

/// The dyadic shells whose band symbol is not identically zero on the
/// lattice: `P_N` vanishes unless `(N/2, 2N)` meets `(0, |ξ|_max]`.
pub fn active_shells(grid: &GridSpec) -> Vec<DyadicIndex> {
    let xi_min = grid.fundamental_frequency();
    let xi_max = grid.max_frequency();
    let lo = (xi_min / 2.0).log2().ceil() as i32;
    let hi = (2.0 * xi_max).log2().floor() as i32;
    (lo..=hi).map(DyadicIndex).collect()
}

/// Measured Bernstein ratios for one band-projected field.
#[derive(Clone, Copy, Debug)]
pub enum BernsteinRatios {
    /// `P_N f` vanishes; the ratios are undefined (not an error).
    Undefined,
    Ratios {
        /// `‖P_N f‖_q / (N^{d/p - d/q} ‖P_N f‖_p)`
        norm_ratio: f64,
        /// `‖|∇|^s P_N f‖_p / (N^s ‖P_N f‖_p)`
        derivative_ratio: f64,
        /// `‖P_{≤N} f‖_q / (N^{d/p - d/q} ‖P_{≤N} f‖_p)`
        cumulative_ratio: f64,
    },
}

/// Measure the three Bernstein ratios at scale `N`. Requires
/// `1 <= p <= q` and `s >= 0`.
pub fn bernstein_ratio(
    f: &RealField,
    n: DyadicIndex,
    p: f64,
    q: f64,
    s: f64,
) -> Result<BernsteinRatios> {
    if !(p >= 1.0) || q < p {
        return Err(WaveError::Domain(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    if s < 0.0 {
        return Err(WaveError::Domain(format!("need s >= 0, got {s}")));
    }
    let d = f.grid().dim() as f64;
    let nv = n.value();
    let band = project_band(f, n);
    let band_p = lebesgue_norm(&band, p)?;
    let l2_scale = lebesgue_norm(f, 2.0)?;
    if band_p <= 1e-14 * l2_scale.max(1e-300) {
        return Ok(BernsteinRatios::Undefined);
    }
    let band_q = lebesgue_norm(&band, q)?;
    let deriv = fractional_derivative(&band, s)?;
    let deriv_p = lebesgue_norm(&deriv, p)?;
    let leq = project_leq(f, n);
    let leq_p = lebesgue_norm(&leq, p)?;
    let leq_q = lebesgue_norm(&leq, q)?;
    let gap = nv.powf(d / p - d / q);
    Ok(BernsteinRatios::Ratios {
        norm_ratio: band_q / (gap * band_p),
        derivative_ratio: deriv_p / (nv.powf(s) * band_p),
        cumulative_ratio: if leq_p > 0.0 { leq_q / (gap * leq_p) } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_band_limited, random_real_field};

    fn grid2(n: usize) -> GridSpec {
        GridSpec::new(2, n, std::f64::consts::TAU).unwrap()
    }

    #[test]
    fn bump_profile_shape() {
        assert_eq!(bump_profile(0.0), 1.0);
        assert_eq!(bump_profile(1.0), 1.0);
        assert_eq!(bump_profile(2.0), 0.0);
        assert_eq!(bump_profile(3.0), 0.0);
        let mut prev = 1.0;
        for i in 1..100 {
            let v = bump_profile(1.0 + i as f64 / 100.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn projection_of_band_limited_field_is_identity() {
        // f band-limited below frequency N: P_{≤N'} f = f for N' >= 2N.
        let g = grid2(64);
        let f = random_band_limited(g, 4, 3); // content at |ξ| <= 4√2 < 8
        let p = project_leq(&f, DyadicIndex(4)); // φ = 1 on |ξ| <= 16
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for (a, b) in p.samples().iter().zip(f.samples().iter()) {
            assert!((a - b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn leq_plus_gt_is_identity_exactly() {
        let g = grid2(32);
        let f = random_real_field(g, 17);
        let n = DyadicIndex(2);
        let lo = project_leq(&f, n);
        let hi = project_gt(&f, n);
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for i in 0..f.samples().len() {
            let sum = lo.samples()[i] + hi.samples()[i];
            assert!((sum - f.samples()[i]).abs() < 1e-13 * scale);
        }
    }

    #[test]
    fn range_telescopes_into_bands() {
        let g = grid2(64);
        let f = random_real_field(g, 23);
        let (m, n) = (DyadicIndex(0), DyadicIndex(4));
        let range = project_range(&f, m, n).unwrap();
        let mut acc = RealField::zeros(g);
        for k in (m.0 + 1)..=n.0 {
            let band = project_band(&f, DyadicIndex(k));
            for (a, b) in acc.samples_mut().iter_mut().zip(band.samples()) {
                *a += b;
            }
        }
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for (a, b) in range.samples().iter().zip(acc.samples()) {
            assert!((a - b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn range_with_m_above_n_rejected() {
        let g = grid2(16);
        let f = random_real_field(g, 2);
        assert!(project_range(&f, DyadicIndex(3), DyadicIndex(1)).is_err());
    }

    #[test]
    fn band_weight_of_single_mode_matches_profile() {
        // mode at |ξ| = 3 against shell N = 2: weight φ(3/2) - φ(3) = φ(3/2)
        let g = grid2(32);
        let f = RealField::from_fn(g, |x| (3.0 * x[0]).cos());
        let band = project_band(&f, DyadicIndex(1));
        let w = bump_profile(1.5) - bump_profile(3.0);
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for (a, b) in band.samples().iter().zip(f.samples().iter()) {
            assert!((a - w * b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn shell_partition_reconstructs_exactly() {
        let g = grid2(64);
        let f = random_real_field(g, 29);
        let shells = active_shells(&g);
        let lowest = DyadicIndex(shells[0].0 - 1);
        let mut acc = project_leq(&f, lowest);
        for n in &shells {
            let band = project_band(&f, *n);
            for (a, b) in acc.samples_mut().iter_mut().zip(band.samples()) {
                *a += b;
            }
        }
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for (a, b) in acc.samples().iter().zip(f.samples()) {
            assert!((a - b).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn projections_commute_with_each_other_and_derivatives() {
        let g = grid2(32);
        let mut f = random_real_field(g, 31);
        let mean: f64 = f.samples().iter().sum::<f64>() / f.samples().len() as f64;
        for v in f.samples_mut() {
            *v -= mean;
        }
        let n1 = DyadicIndex(1);
        let n2 = DyadicIndex(3);
        let a = project_band(&project_leq(&f, n2), n1);
        let b = project_leq(&project_band(&f, n1), n2);
        let scale = lebesgue_norm(&f, f64::INFINITY).unwrap();
        for i in 0..a.samples().len() {
            assert!((a.samples()[i] - b.samples()[i]).abs() < 1e-12 * scale);
        }
        let s = 0.5;
        let c = fractional_derivative(&project_band(&f, n1), s).unwrap();
        let d = project_band(&fractional_derivative(&f, s).unwrap(), n1);
        for i in 0..c.samples().len() {
            assert!((c.samples()[i] - d.samples()[i]).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn single_mode_derivative_ratio_is_exact_eigenvalue() {
        let g = grid2(32);
        let f = RealField::from_fn(g, |x| (2.0 * x[0]).cos()); // |ξ| = 2 = N
        let s = 1.25;
        match bernstein_ratio(&f, DyadicIndex(1), 2.0, 4.0, s).unwrap() {
            BernsteinRatios::Ratios { derivative_ratio, .. } => {
                // eigenvalue (|ξ|/N)^s = 1 exactly at |ξ| = N
                assert!((derivative_ratio - 1.0).abs() < 1e-10);
            }
            BernsteinRatios::Undefined => panic!("mode projected away"),
        }
    }

    #[test]
    fn zero_field_gives_undefined_signal() {
        let g = grid2(16);
        let f = RealField::zeros(g);
        assert!(matches!(
            bernstein_ratio(&f, DyadicIndex(1), 2.0, 4.0, 1.0).unwrap(),
            BernsteinRatios::Undefined
        ));
    }

    #[test]
    fn ratios_uniformly_bounded_over_shells_and_fields() {
        // single constant across N ∈ {2^0..2^4} and many random fields
        let g = grid2(64);
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            let f = random_band_limited(g, 31, 1000 + trial);
            for k in 0..=4 {
                match bernstein_ratio(&f, DyadicIndex(k), 2.0, 4.0, 1.0).unwrap() {
                    BernsteinRatios::Ratios {
                        norm_ratio,
                        derivative_ratio,
                        cumulative_ratio,
                    } => {
                        worst = worst.max(norm_ratio).max(derivative_ratio).max(cumulative_ratio);
                    }
                    BernsteinRatios::Undefined => {}
                }
            }
        }
        assert!(worst < 8.0, "Bernstein constant blew up: {worst}");
    }

    #[test]
    fn projection_bounded_on_lp() {
        let g = grid2(32);
        for trial in 0..100 {
            let f = random_real_field(g, 2000 + trial);
            for k in [0, 2, 4] {
                let band = project_band(&f, DyadicIndex(k));
                let num = lebesgue_norm(&band, 4.0).unwrap();
                let den = lebesgue_norm(&f, 4.0).unwrap();
                assert!(num <= 4.0 * den, "‖P_N f‖_4 = {num} vs ‖f‖_4 = {den}");
            }
        }
    }
}
